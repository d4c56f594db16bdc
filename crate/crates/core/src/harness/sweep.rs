//! Solve the unknown-sizes program over a grid of `omega` (and `r`) values,
//! keeping only solutions that round to partition matrices.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::graph::{Graph, PartitionLabels};
use crate::sdp::{build_unknown_sizes, round_to_partition, solve_with_observer, RoundOptions, SolveOptions, WarmStart};

#[derive(Debug, Clone, Default)]
pub struct SweepOptions {
    pub solver: SolveOptions,
    pub round: RoundOptions,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepPoint {
    pub r: usize,
    pub omega: f64,
    pub converged: bool,
    pub iterations: usize,
    pub objective: f64,
    /// The solution rounds to a partition within tolerance.
    pub partition: bool,
    pub max_deviation: f64,
    /// Index of the first reference partition equal to the rounded one.
    pub matched_reference: Option<usize>,
    #[serde(skip)]
    pub labels: Option<PartitionLabels>,
    pub message: String,
}

/// `steps` values spaced geometrically between `lo` and `hi` inclusive.
pub fn omega_grid(lo: f64, hi: f64, steps: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi >= lo && hi.is_finite()) || steps == 0 {
        return Err(invalid(format!("bad omega range [{lo}, {hi}] with {steps} steps")));
    }
    if steps == 1 {
        return Ok(vec![lo]);
    }
    let ratio = (hi / lo).ln() / (steps - 1) as f64;
    Ok((0..steps).map(|k| lo * (ratio * k as f64).exp()).collect())
}

/// For each `r` and each `omega`, solve, round and compare against `references`.
/// Consecutive solves with the same `r` are warm-started.
pub fn omega_sweep(
    g: &Graph,
    r_values: &[usize],
    omegas: &[f64],
    references: &[PartitionLabels],
    opts: &SweepOptions,
) -> Vec<SweepPoint> {
    let mut out = Vec::new();
    for &r in r_values {
        let mut warm: Option<WarmStart> = None;
        for &omega in omegas {
            let mut point = SweepPoint {
                r,
                omega,
                converged: false,
                iterations: 0,
                objective: f64::NAN,
                partition: false,
                max_deviation: f64::INFINITY,
                matched_reference: None,
                labels: None,
                message: String::new(),
            };
            let prob = match build_unknown_sizes(g, r, omega) {
                Ok(p) => p,
                Err(e) => {
                    point.message = e.to_string();
                    out.push(point);
                    continue;
                }
            };
            let sol = solve_with_observer(&prob, &opts.solver, warm.as_ref(), |_, _| {});
            point.converged = sol.converged;
            point.iterations = sol.iterations;
            point.objective = sol.objective;
            match round_to_partition(&sol.x, r, &opts.round) {
                Ok(rounded) => {
                    point.partition = true;
                    point.max_deviation = rounded.max_deviation;
                    point.matched_reference = references.iter().position(|t| t.same_partition(&rounded.labels));
                    point.labels = Some(rounded.labels);
                }
                Err(f) => {
                    point.max_deviation = f.max_deviation;
                    point.message = f.reason;
                }
            }
            warm = Some(sol.state);
            out.push(point);
        }
    }
    out
}
