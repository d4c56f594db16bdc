//! Snap a solved matrix to the nearest centered partition matrix.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::centered_partition_matrix;
use crate::graph::PartitionLabels;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct RoundOptions {
    /// Largest accepted entrywise distance between `X` and the rounded matrix.
    pub round_tol: f64,
}

impl Default for RoundOptions {
    fn default() -> Self {
        Self { round_tol: 0.1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RoundingMethod {
    Threshold,
    Spectral,
}

#[derive(Debug, Clone)]
pub struct Rounded {
    pub labels: PartitionLabels,
    pub method: RoundingMethod,
    pub max_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundingFailure {
    /// Deviation of the best candidate found; infinite if none had `r` nonempty parts.
    pub max_deviation: f64,
    pub reason: String,
}

impl std::fmt::Display for RoundingFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} (max deviation {})", self.reason, self.max_deviation)
    }
}

impl std::error::Error for RoundingFailure {}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Components of the graph `X_uv > mid`, provided they are exactly `r`
/// cliques with no linked pair across components.
fn threshold_labels(x: &DMatrix<f64>, r: usize) -> Option<Vec<usize>> {
    let n = x.nrows();
    let mid = 0.5 * (1.0 - 1.0 / (r as f64 - 1.0));
    let linked = |u: usize, v: usize| 0.5 * (x[(u, v)] + x[(v, u)]) > mid;
    let mut parent: Vec<usize> = (0..n).collect();
    for v in 0..n {
        for u in 0..v {
            if linked(u, v) {
                let (a, b) = (find(&mut parent, u), find(&mut parent, v));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut ids = vec![usize::MAX; n];
    let mut labels = vec![0; n];
    let mut next = 0;
    for v in 0..n {
        let root = find(&mut parent, v);
        if ids[root] == usize::MAX {
            ids[root] = next;
            next += 1;
        }
        labels[v] = ids[root];
    }
    if next != r {
        return None;
    }
    for v in 0..n {
        for u in 0..v {
            if (labels[u] == labels[v]) != linked(u, v) {
                return None;
            }
        }
    }
    Some(labels)
}

/// k-means on rows of the top `r - 1` scaled eigenvectors, farthest-point seeding.
fn spectral_labels(x: &DMatrix<f64>, r: usize) -> Option<Vec<usize>> {
    let n = x.nrows();
    let eig = SymmetricEigen::new(0.5 * (x + x.transpose()));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let dim = (r - 1).min(n);
    let pts: Vec<Vec<f64>> = (0..n)
        .map(|v| {
            order[..dim]
                .iter()
                .map(|&k| eig.eigenvectors[(v, k)] * eig.eigenvalues[k].max(0.0).sqrt())
                .collect()
        })
        .collect();
    let dist = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>();

    let mut centers = vec![pts[0].clone()];
    while centers.len() < r {
        let (far, d) = (0..n)
            .map(|v| {
                let d = centers.iter().map(|c| dist(&pts[v], c)).fold(f64::INFINITY, f64::min);
                (v, d)
            })
            .fold((0, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if d <= 1e-12 {
            return None;
        }
        centers.push(pts[far].clone());
    }

    let mut labels = vec![0; n];
    for _ in 0..100 {
        let mut changed = false;
        for v in 0..n {
            let best = (0..r)
                .min_by(|&a, &b| dist(&pts[v], &centers[a]).total_cmp(&dist(&pts[v], &centers[b])))
                .unwrap_or(0);
            if labels[v] != best {
                labels[v] = best;
                changed = true;
            }
        }
        let mut sums = vec![vec![0.0; dim]; r];
        let mut counts = vec![0usize; r];
        for v in 0..n {
            counts[labels[v]] += 1;
            for (s, p) in sums[labels[v]].iter_mut().zip(&pts[v]) {
                *s += p;
            }
        }
        if counts.contains(&0) {
            return None;
        }
        for i in 0..r {
            centers[i] = sums[i].iter().map(|s| s / counts[i] as f64).collect();
        }
        if !changed {
            break;
        }
    }
    Some(labels)
}

fn deviation(x: &DMatrix<f64>, labels: &PartitionLabels) -> f64 {
    (centered_partition_matrix(labels) - x).amax()
}

/// Round `x` to an `r`-community partition, or explain why it is not close to one.
pub fn round_to_partition(
    x: &DMatrix<f64>,
    r: usize,
    opts: &RoundOptions,
) -> std::result::Result<Rounded, RoundingFailure> {
    let n = x.nrows();
    if r < 2 || r > n || x.ncols() != n {
        return Err(RoundingFailure {
            max_deviation: f64::INFINITY,
            reason: format!("cannot split a {n} x {} matrix into {r} communities", x.ncols()),
        });
    }
    let mut best_dev = f64::INFINITY;
    for (method, labels) in [
        (RoundingMethod::Threshold, threshold_labels(x, r)),
        (RoundingMethod::Spectral, spectral_labels(x, r)),
    ] {
        let Some(raw) = labels else { continue };
        let Ok(labels) = PartitionLabels::new(raw, r) else { continue };
        let labels = labels.canonical();
        let dev = deviation(x, &labels);
        if dev <= opts.round_tol {
            return Ok(Rounded {
                labels,
                method,
                max_deviation: dev,
            });
        }
        best_dev = best_dev.min(dev);
    }
    Err(RoundingFailure {
        max_deviation: best_dev,
        reason: if best_dev.is_finite() {
            format!("nearest partition matrix is {best_dev:.4} away (tolerance {})", opts.round_tol)
        } else {
            format!("no split into {r} nonempty communities")
        },
    })
}
