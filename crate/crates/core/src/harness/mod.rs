//! Experiment orchestration: phase diagrams, paired robustness runs, tail
//! demonstrations and omega sweeps. Results are plain rows meant for CSV.
//!
//! Every trial draws its graph from `derive_seed(seed, [cell, trial])`, so a
//! cell can be rerun on its own and the output does not depend on `jobs`.

mod robustness;
mod sweep;
mod tails;

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use robustness::{run_robustness_suite, RobustnessReport, RobustnessRow, RobustnessTrial};
pub use sweep::{omega_grid, omega_sweep, SweepOptions, SweepPoint};
pub use tails::{exact_tail_probability, tail_exponent_demo, TailReport};

use crate::adversary::{apply_adversary, AdversarySpec};
use crate::certificate::{build_certificate, verify_certificate, CertificateOptions, CertificateParams};
use crate::error::{invalid, Error, Result};
use crate::graph::{Graph, PartitionLabels};
use crate::model::{sample_ppm, PlantedPartitionParams};
use crate::rng::derive_seed;
use crate::sdp::{
    build_known_sizes, build_unknown_sizes, round_to_partition, solve_with_observer, RoundOptions, SdpSolution,
    SolveOptions, WarmStart,
};
use crate::thresholds::{min_planted_divergence, p_tilde_for_divergence};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    SolveKnown,
    SolveUnknown,
    CertifyOnly,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::SolveKnown => "solve_known",
            Algorithm::SolveUnknown => "solve_unknown",
            Algorithm::CertifyOnly => "certify_only",
        }
    }
}

fn default_algorithms() -> Vec<Algorithm> {
    vec![Algorithm::SolveKnown, Algorithm::SolveUnknown]
}

fn default_jobs() -> usize {
    1
}

/// A grid of planted partition models. Cells are the product
/// `n x pi x q_tilde x (p_tilde or divergence)`; with `divergence` set, each
/// `p_tilde` is chosen so the smallest pairwise divergence hits the level.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub n: Vec<usize>,
    pub pi: Vec<Vec<f64>>,
    pub q_tilde: Vec<f64>,
    #[serde(default)]
    pub p_tilde: Vec<f64>,
    #[serde(default)]
    pub divergence: Vec<f64>,
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_algorithms")]
    pub algorithms: Vec<Algorithm>,
    #[serde(default)]
    pub adversary: Option<AdversarySpec>,
    #[serde(default)]
    pub solver: SolveOptions,
    #[serde(default)]
    pub round: RoundOptions,
    #[serde(default)]
    pub certificate: CertificateOptions,
    #[serde(default = "default_jobs")]
    pub jobs: usize,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub trial_log: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Single-cell configuration with default solver settings.
    pub fn single(params: &PlantedPartitionParams, trials: usize, seed: u64) -> Self {
        Self {
            n: vec![params.n()],
            pi: vec![params.pi().to_vec()],
            q_tilde: vec![params.q_tilde()],
            p_tilde: vec![params.p_tilde()],
            divergence: Vec::new(),
            trials,
            seed,
            algorithms: default_algorithms(),
            adversary: None,
            solver: SolveOptions::default(),
            round: RoundOptions::default(),
            certificate: CertificateOptions::default(),
            jobs: 1,
            output: None,
            trial_log: None,
        }
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let cfg: Self = crate::io::read_json(path)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n.is_empty() || self.pi.is_empty() || self.q_tilde.is_empty() {
            return Err(invalid("config needs at least one n, pi and q_tilde"));
        }
        match (self.p_tilde.is_empty(), self.divergence.is_empty()) {
            (true, true) => return Err(invalid("config needs p_tilde or divergence values")),
            (false, false) => return Err(invalid("give either p_tilde or divergence, not both")),
            _ => {}
        }
        if self.trials == 0 {
            return Err(invalid("trials must be positive"));
        }
        if self.algorithms.is_empty() {
            return Err(invalid("no algorithm selected"));
        }
        if self.jobs == 0 {
            return Err(invalid("jobs must be positive"));
        }
        Ok(())
    }

    /// Cells in output order. Parameter errors are kept per cell.
    pub fn cells(&self) -> Vec<Cell> {
        let mut out = Vec::new();
        for &n in &self.n {
            for pi in &self.pi {
                for &q_tilde in &self.q_tilde {
                    let levels: Vec<(Option<f64>, Option<f64>)> = if self.divergence.is_empty() {
                        self.p_tilde.iter().map(|&p| (Some(p), None)).collect()
                    } else {
                        self.divergence.iter().map(|&d| (None, Some(d))).collect()
                    };
                    for (p, d) in levels {
                        let rate = match (p, d) {
                            (Some(p), _) => Ok(p),
                            (None, Some(d)) => p_tilde_for_divergence(q_tilde, pi, d),
                            (None, None) => Err(invalid("missing rate")),
                        };
                        let p_tilde = rate.as_ref().copied().unwrap_or(f64::NAN);
                        let params = rate.and_then(|p| PlantedPartitionParams::new(n, pi.clone(), p, q_tilde));
                        let min_divergence = min_planted_divergence(p_tilde, q_tilde, pi).unwrap_or(f64::NAN);
                        out.push(Cell {
                            index: out.len(),
                            n,
                            pi: pi.clone(),
                            p_tilde,
                            q_tilde,
                            min_divergence,
                            params: params.map_err(|e| e.to_string()),
                        });
                    }
                }
            }
        }
        out
    }

    pub fn work_estimate(&self) -> WorkEstimate {
        let cells = self.cells();
        let solves_per_trial = self
            .algorithms
            .iter()
            .filter(|a| **a != Algorithm::CertifyOnly)
            .count();
        let cube: f64 = cells.iter().map(|c| (c.n as f64).powi(3)).sum();
        WorkEstimate {
            cells: cells.len(),
            trials: cells.len() * self.trials,
            solves: cells.len() * self.trials * solves_per_trial,
            largest_n: self.n.iter().copied().max().unwrap_or(0),
            // per solve: one n^3 eigendecomposition per iteration, iteration count unknown
            n_cubed_per_iteration: cube * (self.trials * solves_per_trial) as f64,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct WorkEstimate {
    pub cells: usize,
    pub trials: usize,
    pub solves: usize,
    pub largest_n: usize,
    pub n_cubed_per_iteration: f64,
}

impl std::fmt::Display for WorkEstimate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} cells, {} trials, {} SDP solves, largest n = {} (~{:.2e} flops per ADMM iteration summed over solves)",
            self.cells, self.trials, self.solves, self.largest_n, self.n_cubed_per_iteration
        )
    }
}

#[derive(Debug, Clone)]
pub struct Cell {
    pub index: usize,
    pub n: usize,
    pub pi: Vec<f64>,
    pub p_tilde: f64,
    pub q_tilde: f64,
    pub min_divergence: f64,
    pub params: std::result::Result<PlantedPartitionParams, String>,
}

pub(crate) fn format_pi(pi: &[f64]) -> String {
    pi.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";")
}

/// One aggregated CSV row.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CellResult {
    pub cell: usize,
    pub n: usize,
    pub r: usize,
    pub pi: String,
    pub p_tilde: f64,
    pub q_tilde: f64,
    pub min_divergence: f64,
    pub algorithm: Algorithm,
    pub trials: usize,
    pub successes: usize,
    pub failures: usize,
    pub errors: usize,
    pub recovery_rate: f64,
    pub certified: usize,
    pub verified_rate: f64,
    pub mean_iterations: f64,
    /// Excluded from the determinism contract.
    pub wall_seconds: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Recovered,
    WrongPartition,
    RoundingFailed,
    Certified,
    NotCertified,
    Error,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrialRecord {
    pub cell: usize,
    pub trial: usize,
    pub seed: u64,
    pub algorithm: Algorithm,
    pub outcome: Outcome,
    pub converged: bool,
    pub iterations: usize,
    pub certificate_verified: bool,
    pub interval_margin: f64,
    pub adversary_changes: usize,
    pub message: String,
}

/// Result of one SDP solve followed by rounding.
#[derive(Debug, Clone)]
pub struct SdpRun {
    pub solution: SdpSolution,
    pub labels: Option<PartitionLabels>,
    pub recovered: bool,
}

impl SdpRun {
    pub fn outcome(&self) -> Outcome {
        match (&self.labels, self.recovered) {
            (_, true) => Outcome::Recovered,
            (Some(_), false) => Outcome::WrongPartition,
            (None, _) => Outcome::RoundingFailed,
        }
    }
}

/// Solve the known- or unknown-sizes program on `g` and compare with `truth`.
pub fn run_sdp(
    g: &Graph,
    truth: &PartitionLabels,
    omega: f64,
    algorithm: Algorithm,
    solver: &SolveOptions,
    round: &RoundOptions,
    warm: Option<&WarmStart>,
) -> Result<SdpRun> {
    let prob = match algorithm {
        Algorithm::SolveKnown => build_known_sizes(g, &truth.sizes())?,
        Algorithm::SolveUnknown => build_unknown_sizes(g, truth.r(), omega)?,
        Algorithm::CertifyOnly => return Err(invalid("certify_only does not solve an SDP")),
    };
    let solution = solve_with_observer(&prob, solver, warm, |_, _| {});
    let labels = round_to_partition(&solution.x, truth.r(), round).ok().map(|r| r.labels);
    let recovered = labels.as_ref().is_some_and(|l| l.same_partition(truth));
    Ok(SdpRun {
        solution,
        labels,
        recovered,
    })
}

pub(crate) struct Sampled {
    pub graph: Graph,
    pub truth: PartitionLabels,
    pub changes: usize,
}

pub(crate) fn sample_trial(
    params: &PlantedPartitionParams,
    seed: u64,
    adversary: Option<&AdversarySpec>,
) -> Result<Sampled> {
    let (g, truth) = sample_ppm(params, seed)?;
    match adversary {
        None | Some(AdversarySpec::None) => Ok(Sampled {
            graph: g,
            truth,
            changes: 0,
        }),
        Some(spec) => {
            let out = apply_adversary(&g, &truth, spec, seed)?;
            Ok(Sampled {
                changes: out.change_count(),
                graph: out.graph,
                truth,
            })
        }
    }
}

fn error_records(cell: usize, trial: usize, seed: u64, algorithms: &[Algorithm], err: &Error) -> Vec<TrialRecord> {
    algorithms
        .iter()
        .map(|&algorithm| TrialRecord {
            cell,
            trial,
            seed,
            algorithm,
            outcome: Outcome::Error,
            converged: false,
            iterations: 0,
            certificate_verified: false,
            interval_margin: f64::NAN,
            adversary_changes: 0,
            message: err.to_string(),
        })
        .collect()
}

fn run_trial(cfg: &ExperimentConfig, cell: &Cell, trial: usize) -> (Vec<TrialRecord>, f64) {
    let start = Instant::now();
    let seed = derive_seed(cfg.seed, &[cell.index as u64, trial as u64]);
    let params = match &cell.params {
        Ok(p) => p,
        Err(msg) => {
            let err = invalid(msg.clone());
            return (error_records(cell.index, trial, seed, &cfg.algorithms, &err), 0.0);
        }
    };
    let attempt = || -> Result<Vec<TrialRecord>> {
        let sampled = sample_trial(params, seed, cfg.adversary.as_ref())?;
        let omega = params.omega()?;
        let prm = CertificateParams::from_model(params)?;
        let cert = build_certificate(&sampled.graph, &sampled.truth, &prm, &cfg.certificate)?;
        let report = verify_certificate(&sampled.graph, &sampled.truth, &cert);
        let mut out = Vec::new();
        for &algorithm in &cfg.algorithms {
            let mut rec = TrialRecord {
                cell: cell.index,
                trial,
                seed,
                algorithm,
                outcome: if report.verified {
                    Outcome::Certified
                } else {
                    Outcome::NotCertified
                },
                converged: false,
                iterations: 0,
                certificate_verified: report.verified,
                interval_margin: report.interval_margin,
                adversary_changes: sampled.changes,
                message: String::new(),
            };
            if algorithm != Algorithm::CertifyOnly {
                match run_sdp(&sampled.graph, &sampled.truth, omega, algorithm, &cfg.solver, &cfg.round, None) {
                    Ok(run) => {
                        rec.outcome = run.outcome();
                        rec.converged = run.solution.converged;
                        rec.iterations = run.solution.iterations;
                    }
                    Err(e) => {
                        rec.outcome = Outcome::Error;
                        rec.message = e.to_string();
                    }
                }
            }
            out.push(rec);
        }
        Ok(out)
    };
    let records = attempt().unwrap_or_else(|e| error_records(cell.index, trial, seed, &cfg.algorithms, &e));
    (records, start.elapsed().as_secs_f64())
}

pub(crate) fn thread_pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| invalid(format!("thread pool: {e}")))
}

#[derive(Debug, Clone)]
pub struct PhaseDiagram {
    pub rows: Vec<CellResult>,
    pub trials: Vec<TrialRecord>,
}

fn aggregate(cell: &Cell, algorithm: Algorithm, records: &[&TrialRecord], wall: f64) -> CellResult {
    let trials = records.len();
    let errors = records.iter().filter(|r| r.outcome == Outcome::Error).count();
    let successes = records
        .iter()
        .filter(|r| matches!(r.outcome, Outcome::Recovered | Outcome::Certified))
        .count();
    let certified = records.iter().filter(|r| r.certificate_verified).count();
    let solved: Vec<_> = records.iter().filter(|r| r.outcome != Outcome::Error).collect();
    let mean_iterations = if solved.is_empty() {
        0.0
    } else {
        solved.iter().map(|r| r.iterations as f64).sum::<f64>() / solved.len() as f64
    };
    CellResult {
        cell: cell.index,
        n: cell.n,
        r: cell.pi.len(),
        pi: format_pi(&cell.pi),
        p_tilde: cell.p_tilde,
        q_tilde: cell.q_tilde,
        min_divergence: cell.min_divergence,
        algorithm,
        trials,
        successes,
        failures: trials - successes - errors,
        errors,
        recovery_rate: successes as f64 / trials as f64,
        certified,
        verified_rate: certified as f64 / trials as f64,
        mean_iterations,
        wall_seconds: wall,
    }
}

/// Run every cell of the grid; per-trial errors are recorded, never fatal.
pub fn run_phase_diagram(cfg: &ExperimentConfig) -> Result<PhaseDiagram> {
    cfg.validate()?;
    log::info!("phase diagram: {}", cfg.work_estimate());
    let cells = cfg.cells();
    let tasks: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| (0..cfg.trials).map(move |t| (c, t)))
        .collect();
    let pool = thread_pool(cfg.jobs)?;
    let results: Vec<(Vec<TrialRecord>, f64)> =
        pool.install(|| tasks.par_iter().map(|&(c, t)| run_trial(cfg, &cells[c], t)).collect());

    let mut rows = Vec::new();
    for cell in &cells {
        let mine: Vec<&(Vec<TrialRecord>, f64)> = results
            .iter()
            .zip(&tasks)
            .filter(|(_, (c, _))| *c == cell.index)
            .map(|(r, _)| r)
            .collect();
        let wall: f64 = mine.iter().map(|(_, w)| w).sum();
        for &algorithm in &cfg.algorithms {
            let recs: Vec<&TrialRecord> = mine
                .iter()
                .flat_map(|(rs, _)| rs.iter().filter(|r| r.algorithm == algorithm))
                .collect();
            rows.push(aggregate(cell, algorithm, &recs, wall));
        }
        log::info!("cell {} done ({:.1}s)", cell.index, wall);
    }
    let trials = results.into_iter().flat_map(|(r, _)| r).collect();
    Ok(PhaseDiagram { rows, trials })
}

/// Serialize rows as CSV with a header line.
pub fn to_csv<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| invalid(format!("csv buffer: {e}")))?;
    String::from_utf8(bytes).map_err(|e| invalid(format!("csv encoding: {e}")))
}

pub fn write_csv<T: Serialize>(path: impl AsRef<Path>, rows: &[T]) -> Result<()> {
    crate::io::write_text(path, &to_csv(rows)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_config() -> ExperimentConfig {
        let params = PlantedPartitionParams::new(30, vec![0.5, 0.5], 8.0, 1.0).unwrap();
        ExperimentConfig::single(&params, 2, 3)
    }

    #[test]
    fn config_json_defaults() {
        let json = r#"{"n": [500], "pi": [[0.5, 0.5]], "q_tilde": [2], "divergence": [1.5, 3], "trials": 4}"#;
        let cfg: ExperimentConfig = serde_json::from_str(json).unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.algorithms, default_algorithms());
        assert_eq!(cfg.solver.max_iters, 20_000);
        let cells = cfg.cells();
        assert_eq!(cells.len(), 2);
        assert!((cells[1].min_divergence - 3.0).abs() < 1e-9);
        assert_eq!(cfg.work_estimate().solves, 16);
    }

    #[test]
    fn config_rejects_ambiguous_rates() {
        let mut cfg = tiny_config();
        cfg.divergence = vec![2.0];
        assert!(cfg.validate().is_err());
        cfg.p_tilde.clear();
        cfg.divergence.clear();
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn single_cell_single_trial() {
        let mut cfg = tiny_config();
        cfg.trials = 1;
        cfg.algorithms = vec![Algorithm::SolveUnknown];
        let out = run_phase_diagram(&cfg).unwrap();
        assert_eq!(out.rows.len(), 1);
        let csv = to_csv(&out.rows).unwrap();
        assert_eq!(csv.lines().count(), 2);
        assert!(csv.starts_with("cell,n,r,pi,p_tilde"));
    }

    #[test]
    fn invalid_cells_become_errors() {
        let mut cfg = tiny_config();
        // p = 40 log 30 / 30 > 1
        cfg.p_tilde = vec![40.0];
        let out = run_phase_diagram(&cfg).unwrap();
        for row in &out.rows {
            assert_eq!(row.errors, row.trials);
            assert_eq!(row.successes + row.failures + row.errors, row.trials);
        }
    }
}
