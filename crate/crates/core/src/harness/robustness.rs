//! Paired clean/adversarial trials. Each trial samples one graph, solves it,
//! applies the monotone adversary and solves again (warm-started from the
//! clean iterate). A violation is a trial recovered on the clean graph but
//! not on the modified one.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{format_pi, run_sdp, thread_pool, Algorithm, Cell, ExperimentConfig, Outcome};
use crate::adversary::{apply_adversary, AdversarySpec};
use crate::error::{invalid, Result};
use crate::model::sample_ppm;
use crate::rng::{derive_seed, purpose};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RobustnessTrial {
    pub cell: usize,
    pub trial: usize,
    pub seed: u64,
    pub algorithm: Algorithm,
    pub clean: Outcome,
    pub adversarial: Outcome,
    pub changes: usize,
    pub clean_iterations: usize,
    pub adversarial_iterations: usize,
    pub message: String,
}

impl RobustnessTrial {
    pub fn violation(&self) -> bool {
        self.clean == Outcome::Recovered && self.adversarial != Outcome::Recovered
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RobustnessRow {
    pub cell: usize,
    pub n: usize,
    pub r: usize,
    pub pi: String,
    pub p_tilde: f64,
    pub q_tilde: f64,
    pub min_divergence: f64,
    pub algorithm: Algorithm,
    pub trials: usize,
    pub errors: usize,
    pub clean_recovered: usize,
    pub adversarial_recovered: usize,
    /// `(adversarial_recovered - clean_recovered) / trials`.
    pub delta: f64,
    /// Clean recovered, adversarial not.
    pub violations: usize,
    pub mean_changes: f64,
    pub wall_seconds: f64,
}

#[derive(Debug, Clone)]
pub struct RobustnessReport {
    pub rows: Vec<RobustnessRow>,
    pub trials: Vec<RobustnessTrial>,
}

impl RobustnessReport {
    pub fn total_violations(&self) -> usize {
        self.rows.iter().map(|r| r.violations).sum()
    }
}

fn run_pair(cfg: &ExperimentConfig, spec: &AdversarySpec, cell: &Cell, trial: usize) -> (Vec<RobustnessTrial>, f64) {
    let start = Instant::now();
    let seed = derive_seed(cfg.seed, &[cell.index as u64, trial as u64]);
    let algorithms: Vec<Algorithm> = cfg
        .algorithms
        .iter()
        .copied()
        .filter(|a| *a != Algorithm::CertifyOnly)
        .collect();
    let blank = |algorithm, msg: String| RobustnessTrial {
        cell: cell.index,
        trial,
        seed,
        algorithm,
        clean: Outcome::Error,
        adversarial: Outcome::Error,
        changes: 0,
        clean_iterations: 0,
        adversarial_iterations: 0,
        message: msg,
    };
    let attempt = || -> Result<Vec<RobustnessTrial>> {
        let params = cell.params.as_ref().map_err(|m| invalid(m.clone()))?;
        let (g, truth) = sample_ppm(params, seed)?;
        let omega = params.omega()?;
        let modified = apply_adversary(&g, &truth, spec, derive_seed(seed, &[purpose::ROBUST_ADVERSARY]))?;
        let mut out = Vec::new();
        for &algorithm in &algorithms {
            let clean = run_sdp(&g, &truth, omega, algorithm, &cfg.solver, &cfg.round, None)?;
            let adv = if modified.change_count() == 0 {
                clean.clone()
            } else {
                let warm = clean.solution.state.clone();
                run_sdp(&modified.graph, &truth, omega, algorithm, &cfg.solver, &cfg.round, Some(&warm))?
            };
            out.push(RobustnessTrial {
                cell: cell.index,
                trial,
                seed,
                algorithm,
                clean: clean.outcome(),
                adversarial: adv.outcome(),
                changes: modified.change_count(),
                clean_iterations: clean.solution.iterations,
                adversarial_iterations: adv.solution.iterations,
                message: String::new(),
            });
        }
        Ok(out)
    };
    let recs = attempt().unwrap_or_else(|e| algorithms.iter().map(|&a| blank(a, e.to_string())).collect());
    (recs, start.elapsed().as_secs_f64())
}

/// Paired robustness run over every cell of `cfg`; `cfg.adversary` is required.
pub fn run_robustness_suite(cfg: &ExperimentConfig) -> Result<RobustnessReport> {
    cfg.validate()?;
    let spec = cfg
        .adversary
        .as_ref()
        .ok_or_else(|| invalid("robustness suite needs an adversary"))?;
    if cfg.algorithms.iter().all(|a| *a == Algorithm::CertifyOnly) {
        return Err(invalid("robustness suite needs an SDP algorithm"));
    }
    log::info!("robustness suite: {} (each solve runs twice)", cfg.work_estimate());
    let cells = cfg.cells();
    let tasks: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| (0..cfg.trials).map(move |t| (c, t)))
        .collect();
    let pool = thread_pool(cfg.jobs)?;
    let results: Vec<(Vec<RobustnessTrial>, f64)> =
        pool.install(|| tasks.par_iter().map(|&(c, t)| run_pair(cfg, spec, &cells[c], t)).collect());

    let mut rows = Vec::new();
    for cell in &cells {
        let mine: Vec<&(Vec<RobustnessTrial>, f64)> = results
            .iter()
            .zip(&tasks)
            .filter(|(_, (c, _))| *c == cell.index)
            .map(|(r, _)| r)
            .collect();
        let wall: f64 = mine.iter().map(|(_, w)| w).sum();
        for &algorithm in cfg.algorithms.iter().filter(|a| **a != Algorithm::CertifyOnly) {
            let recs: Vec<&RobustnessTrial> = mine
                .iter()
                .flat_map(|(rs, _)| rs.iter().filter(|r| r.algorithm == algorithm))
                .collect();
            let trials = recs.len();
            let errors = recs
                .iter()
                .filter(|r| r.clean == Outcome::Error || r.adversarial == Outcome::Error)
                .count();
            let clean = recs.iter().filter(|r| r.clean == Outcome::Recovered).count();
            let adv = recs.iter().filter(|r| r.adversarial == Outcome::Recovered).count();
            rows.push(RobustnessRow {
                cell: cell.index,
                n: cell.n,
                r: cell.pi.len(),
                pi: format_pi(&cell.pi),
                p_tilde: cell.p_tilde,
                q_tilde: cell.q_tilde,
                min_divergence: cell.min_divergence,
                algorithm,
                trials,
                errors,
                clean_recovered: clean,
                adversarial_recovered: adv,
                delta: (adv as f64 - clean as f64) / trials as f64,
                violations: recs.iter().filter(|r| r.violation()).count(),
                mean_changes: recs.iter().map(|r| r.changes as f64).sum::<f64>() / trials.max(1) as f64,
                wall_seconds: wall,
            });
        }
    }
    let trials = results.into_iter().flat_map(|(r, _)| r).collect();
    Ok(RobustnessReport { rows, trials })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::PlantedPartitionParams;

    #[test]
    fn null_adversary_has_zero_delta() {
        let params = PlantedPartitionParams::new(40, vec![0.5, 0.5], 9.0, 1.0).unwrap();
        let mut cfg = ExperimentConfig::single(&params, 3, 17);
        cfg.adversary = Some(AdversarySpec::None);
        let rep = run_robustness_suite(&cfg).unwrap();
        for row in &rep.rows {
            assert_eq!(row.delta, 0.0);
            assert_eq!(row.violations, 0);
            assert_eq!(row.mean_changes, 0.0);
        }
    }

    #[test]
    fn adversary_is_required() {
        let params = PlantedPartitionParams::new(40, vec![0.5, 0.5], 9.0, 1.0).unwrap();
        let cfg = ExperimentConfig::single(&params, 1, 0);
        assert!(run_robustness_suite(&cfg).is_err());
    }
}
