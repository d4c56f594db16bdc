//! Exhaustive maximum-likelihood search on tiny graphs.
//!
//! Partitions into exactly `r` blocks are enumerated as restricted growth
//! strings (vertex 0 in block 0, each new block opened by the first vertex
//! that uses it), so every set partition is visited once and in lexicographic
//! order. Scores use 0/1 partition matrices: `<A, X>` counts ordered intra
//! pairs joined by an edge and `<J, X> = sum_i s_i^2`.

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::graph::{Graph, PartitionLabels};

/// Default guard on the number of vertices.
pub const DEFAULT_MAX_N: usize = 14;
/// Hard limit from the bitset representation.
pub const HARD_MAX_N: usize = 64;
/// Tied optima beyond this many are counted but not stored.
pub const ARGMAX_CAP: usize = 10_000;
const TIE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy)]
pub struct OracleOptions {
    pub max_n: usize,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self { max_n: DEFAULT_MAX_N }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MleResult {
    /// Lexicographically smallest canonical labeling among the optima.
    pub labels: PartitionLabels,
    pub objective: f64,
    pub is_unique: bool,
    /// Number of optimal partitions.
    pub ties: usize,
    /// Optimal partitions in lexicographic order, truncated at `ARGMAX_CAP`.
    pub argmax: Vec<PartitionLabels>,
    /// Partitions scored.
    pub evaluated: u64,
}

enum Mode<'a> {
    Known(&'a [usize]),
    Unknown(f64),
}

struct Search<'a> {
    n: usize,
    r: usize,
    nbr: Vec<u64>,
    mode: Mode<'a>,
    max_size: usize,
    labels: Vec<usize>,
    masks: Vec<u64>,
    counts: Vec<usize>,
    best: f64,
    argmax: Vec<Vec<usize>>,
    ties: usize,
    evaluated: u64,
}

impl Search<'_> {
    fn leaf(&mut self, intra: usize) {
        let score = match self.mode {
            Mode::Known(sorted) => {
                let mut c = self.counts.clone();
                c.sort_unstable();
                if c != sorted {
                    return;
                }
                2.0 * intra as f64
            }
            Mode::Unknown(omega) => {
                let sq: usize = self.counts.iter().map(|s| s * s).sum();
                2.0 * intra as f64 - omega * sq as f64
            }
        };
        self.evaluated += 1;
        if score > self.best + TIE_TOL {
            self.best = score;
            self.argmax.clear();
            self.ties = 0;
        }
        if score >= self.best - TIE_TOL {
            self.ties += 1;
            if self.argmax.len() < ARGMAX_CAP {
                self.argmax.push(self.labels.clone());
            }
        }
    }

    fn descend(&mut self, v: usize, used: usize, intra: usize) {
        if v == self.n {
            if used == self.r {
                self.leaf(intra);
            }
            return;
        }
        // blocks still to open must fit in the remaining vertices
        if self.r - used > self.n - v {
            return;
        }
        let top = (used + 1).min(self.r);
        for b in 0..top {
            if self.counts[b] == self.max_size {
                continue;
            }
            let gained = (self.nbr[v] & self.masks[b]).count_ones() as usize;
            self.labels[v] = b;
            self.masks[b] |= 1 << v;
            self.counts[b] += 1;
            self.descend(v + 1, used.max(b + 1), intra + gained);
            self.masks[b] &= !(1 << v);
            self.counts[b] -= 1;
        }
    }
}

fn run(g: &Graph, r: usize, mode: Mode, opts: &OracleOptions) -> Result<MleResult> {
    let n = g.n();
    let limit = opts.max_n.min(HARD_MAX_N);
    if n > limit {
        return Err(Error::EnumerationLimit { n, limit });
    }
    if r < 1 || r > n {
        return Err(invalid(format!("cannot split {n} vertices into {r} communities")));
    }
    let mut nbr = vec![0u64; n];
    for (u, v) in g.edges() {
        nbr[u] |= 1 << v;
        nbr[v] |= 1 << u;
    }
    let max_size = match mode {
        Mode::Known(s) => s.iter().copied().max().unwrap_or(n),
        Mode::Unknown(_) => n,
    };
    let mut search = Search {
        n,
        r,
        nbr,
        mode,
        max_size,
        labels: vec![0; n],
        masks: vec![0; r],
        counts: vec![0; r],
        best: f64::NEG_INFINITY,
        argmax: Vec::new(),
        ties: 0,
        evaluated: 0,
    };
    search.descend(0, 0, 0);
    if search.argmax.is_empty() {
        return Err(invalid("no partition matches the requested sizes"));
    }
    let argmax = search
        .argmax
        .into_iter()
        .map(|l| PartitionLabels::new(l, r))
        .collect::<Result<Vec<_>>>()?;
    Ok(MleResult {
        labels: argmax[0].clone(),
        objective: search.best,
        is_unique: search.ties == 1,
        ties: search.ties,
        argmax,
        evaluated: search.evaluated,
    })
}

/// Maximize `<A, X>` over partition matrices with the given block sizes (in any order).
pub fn mle_known_sizes(g: &Graph, sizes: &[usize], opts: &OracleOptions) -> Result<MleResult> {
    if sizes.contains(&0) {
        return Err(invalid("community sizes must be positive"));
    }
    let total: usize = sizes.iter().sum();
    if total != g.n() {
        return Err(Error::Dimension(format!(
            "sizes sum to {total}, graph has {} vertices",
            g.n()
        )));
    }
    let mut sorted = sizes.to_vec();
    sorted.sort_unstable();
    run(g, sizes.len(), Mode::Known(&sorted), opts)
}

/// Maximize `<A, X> - omega <J, X>` over partition matrices with exactly `r` blocks.
pub fn mle_unknown_sizes(g: &Graph, r: usize, omega: f64, opts: &OracleOptions) -> Result<MleResult> {
    if !omega.is_finite() {
        return Err(invalid("omega must be finite"));
    }
    run(g, r, Mode::Unknown(omega), opts)
}

/// `log L`: sum over unordered pairs of the Bernoulli log-probability of the
/// observed edge state, with `p` inside communities and `q` across.
pub fn loglikelihood(g: &Graph, labels: &PartitionLabels, p: f64, q: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0 && q > 0.0 && q < 1.0) {
        return Err(invalid(format!("edge probabilities ({p}, {q}) must lie in (0, 1)")));
    }
    if labels.n() != g.n() {
        return Err(Error::Dimension(format!(
            "labels cover {} vertices, graph has {}",
            labels.n(),
            g.n()
        )));
    }
    let n = g.n();
    let (lp, lp1, lq, lq1) = (p.ln(), (-p).ln_1p(), q.ln(), (-q).ln_1p());
    let mut total = 0.0;
    for u in 0..n {
        for v in u + 1..n {
            let edge = g.has_edge(u, v);
            total += match (labels.same_community(u, v), edge) {
                (true, true) => lp,
                (true, false) => lp1,
                (false, true) => lq,
                (false, false) => lq1,
            };
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> OracleOptions {
        OracleOptions::default()
    }

    #[test]
    fn two_edges_two_pairs() {
        let g = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        let res = mle_known_sizes(&g, &[2, 2], &opts()).unwrap();
        assert!(res.is_unique);
        assert_eq!(res.objective, 4.0);
        assert_eq!(res.labels.labels(), &[0, 0, 1, 1]);
    }

    #[test]
    fn empty_graph_all_tie() {
        let g = Graph::empty(4);
        let res = mle_known_sizes(&g, &[2, 2], &opts()).unwrap();
        assert_eq!(res.ties, 3);
        assert!(!res.is_unique);
        assert_eq!(res.objective, 0.0);
        // lexicographically smallest: {0,1},{2,3}
        assert_eq!(res.labels.labels(), &[0, 0, 1, 1]);
    }

    #[test]
    fn two_triangles() {
        let g = Graph::from_edges(6, [(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5)]).unwrap();
        let res = mle_known_sizes(&g, &[3, 3], &opts()).unwrap();
        assert!(res.is_unique);
        assert_eq!(res.objective, 12.0);
        assert_eq!(res.evaluated, 10);
    }

    #[test]
    fn single_edge_grouping_flips_with_omega() {
        let g = Graph::from_edges(2, [(0, 1)]).unwrap();
        // r = 1 groups, r = 2 splits; compare the two candidates directly
        let grouped = |w: f64| mle_unknown_sizes(&g, 1, w, &opts()).unwrap().objective;
        let split = |w: f64| mle_unknown_sizes(&g, 2, w, &opts()).unwrap().objective;
        assert_eq!((grouped(0.5), split(0.5)), (0.0, -1.0));
        assert!(grouped(0.9) > split(0.9));
        assert!(grouped(1.1) < split(1.1));
    }

    #[test]
    fn counts_set_partitions() {
        // Stirling numbers of the second kind
        let g = Graph::empty(10);
        assert_eq!(mle_unknown_sizes(&g, 3, 0.0, &opts()).unwrap().evaluated, 9330);
        assert_eq!(mle_unknown_sizes(&g, 2, 0.0, &opts()).unwrap().evaluated, 511);
    }

    #[test]
    fn guard_refuses_large_instances() {
        let g = Graph::empty(15);
        match mle_unknown_sizes(&g, 2, 0.1, &opts()) {
            Err(Error::EnumerationLimit { n: 15, limit: 14 }) => {}
            other => panic!("{other:?}"),
        }
        assert!(mle_unknown_sizes(&g, 2, 0.1, &OracleOptions { max_n: 15 }).is_ok());
    }

    #[test]
    fn loglikelihood_values() {
        let g = Graph::from_edges(2, [(0, 1)]).unwrap();
        let together = PartitionLabels::new(vec![0, 0], 1).unwrap();
        assert!((loglikelihood(&g, &together, 0.3, 0.1).unwrap() - 0.3f64.ln()).abs() < 1e-15);
        let g = Graph::from_edges(4, [(0, 1), (1, 2)]).unwrap();
        let a = PartitionLabels::new(vec![0, 0, 1, 1], 2).unwrap();
        let b = PartitionLabels::new(vec![0, 1, 0, 1], 2).unwrap();
        let la = loglikelihood(&g, &a, 0.2, 0.2).unwrap();
        let lb = loglikelihood(&g, &b, 0.2, 0.2).unwrap();
        assert!((la - lb).abs() < 1e-12);
        assert!(loglikelihood(&g, &a, 1.0, 0.2).is_err());
    }
}
