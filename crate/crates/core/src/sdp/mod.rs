//! The two semidefinite relaxations of maximum-likelihood community
//! detection, over centered partition matrices.
//!
//! Both programs maximize a linear objective over
//! `{X : X_uu = 1, X_uv >= -1/(r-1), X PSD}`. The known-sizes program
//! maximizes `<A, X>` and adds `<J, X> = (r sum_i s_i^2 - n^2) / (r-1)`; the
//! unknown-sizes program maximizes `<A, X> - omega <J, X>`.

mod admm;
mod rounding;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

pub use admm::{solve, solve_with_observer, SolveOptions, SdpSolution, WarmStart};
pub use rounding::{round_to_partition, RoundOptions, RoundingFailure, RoundingMethod, Rounded};

use crate::error::{invalid, Error, Result};
use crate::graph::{Graph, PartitionLabels};

/// Which of the two programs a problem encodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SizeConstraint {
    /// `<J, X>` fixed to `j_target`.
    Known { sizes: Vec<usize>, j_target: f64 },
    /// `-omega <J, X>` added to the objective.
    Unknown { omega: f64 },
}

#[derive(Debug, Clone)]
pub struct SdpProblem {
    r: usize,
    adjacency: DMatrix<f64>,
    objective: DMatrix<f64>,
    constraint: SizeConstraint,
}

impl SdpProblem {
    pub fn n(&self) -> usize {
        self.adjacency.nrows()
    }

    pub fn r(&self) -> usize {
        self.r
    }

    /// Entrywise lower bound `-1/(r-1)`.
    pub fn lower_bound(&self) -> f64 {
        -1.0 / (self.r as f64 - 1.0)
    }

    /// Objective matrix `C`, so the program maximizes `<C, X>`.
    pub fn objective(&self) -> &DMatrix<f64> {
        &self.objective
    }

    pub fn adjacency(&self) -> &DMatrix<f64> {
        &self.adjacency
    }

    pub fn constraint(&self) -> &SizeConstraint {
        &self.constraint
    }

    pub fn j_target(&self) -> Option<f64> {
        match &self.constraint {
            SizeConstraint::Known { j_target, .. } => Some(*j_target),
            SizeConstraint::Unknown { .. } => None,
        }
    }

    pub fn omega(&self) -> Option<f64> {
        match &self.constraint {
            SizeConstraint::Known { .. } => None,
            SizeConstraint::Unknown { omega } => Some(*omega),
        }
    }

    /// `<C, X>`.
    pub fn evaluate(&self, x: &DMatrix<f64>) -> f64 {
        self.objective.dot(x)
    }

    /// Largest violation of the affine and entrywise constraints (PSD not included).
    pub fn constraint_violation(&self, x: &DMatrix<f64>) -> f64 {
        let lo = self.lower_bound();
        let mut worst = 0.0f64;
        for u in 0..self.n() {
            worst = worst.max((x[(u, u)] - 1.0).abs());
        }
        for v in x.iter() {
            worst = worst.max(lo - v);
        }
        if let Some(b) = self.j_target() {
            worst = worst.max((x.sum() - b).abs());
        }
        worst
    }
}

/// `<J, X>` for the centered partition matrix with these sizes.
pub fn j_target(sizes: &[usize]) -> f64 {
    let r = sizes.len() as f64;
    let n: usize = sizes.iter().sum();
    let sq: usize = sizes.iter().map(|s| s * s).sum();
    (r * sq as f64 - (n * n) as f64) / (r - 1.0)
}

/// Known-sizes program for community sizes `sizes`.
pub fn build_known_sizes(g: &Graph, sizes: &[usize]) -> Result<SdpProblem> {
    if sizes.len() < 2 {
        return Err(invalid("need at least two communities"));
    }
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
    let adjacency = g.adjacency();
    Ok(SdpProblem {
        r: sizes.len(),
        objective: adjacency.clone(),
        adjacency,
        constraint: SizeConstraint::Known {
            sizes: sizes.to_vec(),
            j_target: j_target(sizes),
        },
    })
}

/// Unknown-sizes program with regularizer `omega`.
pub fn build_unknown_sizes(g: &Graph, r: usize, omega: f64) -> Result<SdpProblem> {
    if r < 2 {
        return Err(invalid("need at least two communities"));
    }
    if r > g.n() {
        return Err(invalid(format!("{r} communities on {} vertices", g.n())));
    }
    if !(0.0..=1.0).contains(&omega) {
        return Err(invalid(format!("omega = {omega} outside [0, 1]")));
    }
    let adjacency = g.adjacency();
    let objective = adjacency.add_scalar(-omega);
    Ok(SdpProblem {
        r,
        objective,
        adjacency,
        constraint: SizeConstraint::Unknown { omega },
    })
}

/// `X_uv = 1` for same-community pairs, `-1/(r-1)` otherwise.
pub fn centered_partition_matrix(labels: &PartitionLabels) -> DMatrix<f64> {
    let n = labels.n();
    let off = -1.0 / (labels.r() as f64 - 1.0);
    DMatrix::from_fn(n, n, |u, v| if labels.same_community(u, v) { 1.0 } else { off })
}

/// 0/1 partition matrix.
pub fn partition_matrix(labels: &PartitionLabels) -> DMatrix<f64> {
    let n = labels.n();
    DMatrix::from_fn(n, n, |u, v| if labels.same_community(u, v) { 1.0 } else { 0.0 })
}

/// `<A, X> - omega <J, X>` (omega omitted for the known-sizes objective).
pub fn objective_value(g: &Graph, x: &DMatrix<f64>, omega: Option<f64>) -> Result<f64> {
    let n = g.n();
    if x.nrows() != n || x.ncols() != n {
        return Err(Error::Dimension(format!(
            "matrix is {} x {}, graph has {n} vertices",
            x.nrows(),
            x.ncols()
        )));
    }
    let edges: f64 = g.edges().map(|(u, v)| x[(u, v)] + x[(v, u)]).sum();
    Ok(match omega {
        Some(w) => edges - w * x.sum(),
        None => edges,
    })
}
