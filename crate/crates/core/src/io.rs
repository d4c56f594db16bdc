//! Plain-text graph and label files.
//!
//! Graph file: a header line `n m`, then `m` lines `u v` with `u < v`,
//! sorted lexicographically, LF line endings.
//!
//! Labels file: `n` lines `vertex community`, vertices in increasing order.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::graph::{Graph, PartitionLabels};

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn parse_pair(path: &Path, lineno: usize, line: &str) -> Result<(usize, usize)> {
    let mut it = line.split_whitespace();
    let (Some(a), Some(b), None) = (it.next(), it.next(), it.next()) else {
        return Err(parse_err(path, lineno, format!("expected two integers, got {line:?}")));
    };
    let a = a
        .parse()
        .map_err(|_| parse_err(path, lineno, format!("not an integer: {a:?}")))?;
    let b = b
        .parse()
        .map_err(|_| parse_err(path, lineno, format!("not an integer: {b:?}")))?;
    Ok((a, b))
}

/// Canonical text form of a graph.
pub fn format_graph(g: &Graph) -> String {
    let mut out = String::with_capacity(12 * (g.m() + 1));
    writeln!(out, "{} {}", g.n(), g.m()).unwrap();
    for (u, v) in g.edges() {
        writeln!(out, "{u} {v}").unwrap();
    }
    out
}

/// Parses the graph format; `origin` is only used in error messages.
pub fn parse_graph(text: &str, origin: &Path) -> Result<Graph> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (hl, header) = lines
        .by_ref()
        .find(|(_, l)| !l.trim().is_empty())
        .ok_or_else(|| parse_err(origin, 1, "missing header line"))?;
    let (n, m) = parse_pair(origin, hl, header)?;
    let mut g = Graph::empty(n);
    let mut last: Option<(usize, usize)> = None;
    for (lineno, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let (u, v) = parse_pair(origin, lineno, line)?;
        if u >= n || v >= n {
            return Err(parse_err(origin, lineno, format!("vertex out of range for n = {n}")));
        }
        if u == v {
            return Err(parse_err(origin, lineno, format!("self-loop at {u}")));
        }
        if u > v {
            return Err(parse_err(origin, lineno, "edge not in canonical form (u < v)"));
        }
        if g.has_edge(u, v) {
            return Err(parse_err(origin, lineno, format!("duplicate edge ({u}, {v})")));
        }
        if last.is_some_and(|p| p > (u, v)) {
            return Err(parse_err(origin, lineno, "edges not sorted"));
        }
        last = Some((u, v));
        g.add_edge(u, v);
    }
    if g.m() != m {
        return Err(parse_err(
            origin,
            hl,
            format!("header declares {m} edges, found {}", g.m()),
        ));
    }
    Ok(g)
}

pub fn write_graph(path: impl AsRef<Path>, g: &Graph) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, format_graph(g)).map_err(io_err(path))
}

pub fn read_graph(path: impl AsRef<Path>) -> Result<Graph> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    parse_graph(&text, path)
}

pub fn format_labels(labels: &PartitionLabels) -> String {
    let mut out = String::with_capacity(8 * labels.n());
    for (v, c) in labels.labels().iter().enumerate() {
        writeln!(out, "{v} {c}").unwrap();
    }
    out
}

/// Community count is inferred as `max label + 1`; every community must be used.
pub fn parse_labels(text: &str, origin: &Path) -> Result<PartitionLabels> {
    let mut labels = Vec::new();
    let mut last_line = 0;
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        last_line = lineno;
        let (v, c) = parse_pair(origin, lineno, line)?;
        if v != labels.len() {
            return Err(parse_err(
                origin,
                lineno,
                format!("expected vertex {}, found {v}", labels.len()),
            ));
        }
        labels.push(c);
    }
    let r = labels.iter().max().map_or(0, |m| m + 1);
    PartitionLabels::new(labels, r).map_err(|e| parse_err(origin, last_line.max(1), e.to_string()))
}

pub fn write_labels(path: impl AsRef<Path>, labels: &PartitionLabels) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, format_labels(labels)).map_err(io_err(path))
}

pub fn read_labels(path: impl AsRef<Path>) -> Result<PartitionLabels> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    parse_labels(&text, path)
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    Ok(serde_json::from_str(&text)?)
}

pub fn write_text(path: impl AsRef<Path>, text: &str) -> Result<()> {
    let path: PathBuf = path.as_ref().to_path_buf();
    std::fs::write(&path, text).map_err(io_err(&path))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn origin() -> &'static Path {
        Path::new("<test>")
    }

    #[test]
    fn empty_graph_header_only() {
        assert_eq!(format_graph(&Graph::empty(3)), "3 0\n");
    }

    #[test]
    fn triangle_sorted() {
        let g = Graph::from_edges(3, [(1, 2), (0, 2), (0, 1)]).unwrap();
        assert_eq!(format_graph(&g), "3 3\n0 1\n0 2\n1 2\n");
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let cases = [
            ("3 1\n0 x\n", 2),
            ("3 1\n0 3\n", 2),
            ("3 2\n0 1\n0 1\n", 3),
            ("3 2\n0 1\n", 1),
            ("3 1\n1 1\n", 2),
            ("3 2\n0 2\n0 1\n", 3),
        ];
        for (text, want) in cases {
            match parse_graph(text, origin()) {
                Err(Error::Parse { line, .. }) => assert_eq!(line, want, "{text:?}"),
                other => panic!("expected parse error for {text:?}, got {other:?}"),
            }
        }
    }

    #[test]
    fn labels_round_trip_and_errors() {
        let p = PartitionLabels::new(vec![0, 1, 1, 2], 3).unwrap();
        let text = format_labels(&p);
        assert_eq!(text, "0 0\n1 1\n2 1\n3 2\n");
        assert_eq!(parse_labels(&text, origin()).unwrap(), p);
        assert!(matches!(
            parse_labels("0 0\n2 1\n", origin()),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(parse_labels("0 0\n1 2\n", origin()).is_err());
    }
}
