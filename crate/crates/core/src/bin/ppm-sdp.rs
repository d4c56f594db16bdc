use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;
use serde::Serialize;

use ppm_sdp::adversary::{apply_adversary, AdversaryConfig};
use ppm_sdp::certificate::{build_certificate, verify_certificate, CertificateOptions, CertificateParams};
use ppm_sdp::graph::{Graph, PartitionLabels};
use ppm_sdp::harness::{
    omega_grid, omega_sweep, run_phase_diagram, run_robustness_suite, tail_exponent_demo, to_csv, write_csv,
    ExperimentConfig, SweepOptions,
};
use ppm_sdp::io::{read_graph, read_json, read_labels, write_graph, write_labels, write_text};
use ppm_sdp::model::{sample_ppm, PlantedPartitionParams};
use ppm_sdp::oracle::{mle_known_sizes, mle_unknown_sizes, OracleOptions};
use ppm_sdp::sdp::{build_known_sizes, build_unknown_sizes, round_to_partition, solve, RoundOptions, SolveOptions};
use ppm_sdp::thresholds::{compute_omega, feasibility_report, RateModel};
use ppm_sdp::{Error, Result};

const EXIT_FAILURE: u8 = 1;
const EXIT_ROUNDING: u8 = 2;
const EXIT_NOT_CONVERGED: u8 = 3;

#[derive(Parser)]
#[command(name = "ppm-sdp", version, about = "Exact recovery in the planted partition model by semidefinite programming")]
struct Cli {
    /// Base seed; commands without randomness ignore it.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a graph from the planted partition model.
    Sample(SampleArgs),
    /// Apply a monotone adversary to a graph.
    Adversary(AdversaryArgs),
    /// Print pairwise divergences and the feasibility verdict as JSON.
    Threshold(ThresholdArgs),
    /// Solve one of the two SDPs and round the result.
    Solve(SolveArgs),
    /// Exhaustive maximum-likelihood search on a tiny graph.
    Oracle(OracleArgs),
    /// Build and verify the dual certificate for a labeling.
    Certify(CertifyArgs),
    /// Recovery and certificate rates over a grid of models.
    Phase(ExperimentArgs),
    /// Paired clean/adversarial runs over a grid of models.
    Robustness(ExperimentArgs),
    /// Monte-Carlo estimate of the binomial tail exponent.
    Tails(TailsArgs),
    /// Solve the unknown-sizes program over a range of omega values.
    OmegaSweep(SweepArgs),
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long)]
    n: usize,
    /// Community proportions, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pi: Vec<f64>,
    #[arg(long)]
    p_tilde: f64,
    #[arg(long)]
    q_tilde: f64,
}

impl ModelArgs {
    fn params(&self) -> Result<PlantedPartitionParams> {
        PlantedPartitionParams::new(self.n, self.pi.clone(), self.p_tilde, self.q_tilde)
    }
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    out_graph: PathBuf,
    #[arg(long)]
    out_labels: Option<PathBuf>,
}

#[derive(Args)]
struct AdversaryArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Ground-truth labels the changes must respect.
    #[arg(long)]
    labels: PathBuf,
    /// JSON object `{kind, params, seed}`; `--seed` overrides the stored seed.
    #[arg(long)]
    spec: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Write the applied changes as JSON.
    #[arg(long)]
    changes: Option<PathBuf>,
}

#[derive(Args)]
struct ThresholdArgs {
    /// JSON `{n, r, pi, p_tilde, q_tilde}` or `{q_tilde_matrix, pi}`.
    #[arg(long, conflicts_with_all = ["pi", "p_tilde", "q_tilde"])]
    model: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    pi: Vec<f64>,
    #[arg(long)]
    p_tilde: Option<f64>,
    #[arg(long)]
    q_tilde: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Known,
    Unknown,
}

#[derive(Args)]
struct ProgramArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, value_enum)]
    mode: Mode,
    /// Community sizes for `--mode known`, comma separated.
    #[arg(long, value_delimiter = ',')]
    sizes: Vec<usize>,
    /// Regularizer for `--mode unknown`.
    #[arg(long)]
    omega: Option<f64>,
    /// Number of communities for `--mode unknown`.
    #[arg(long)]
    r: Option<usize>,
    #[arg(long)]
    out_labels: Option<PathBuf>,
}

enum Program {
    Known(Vec<usize>),
    Unknown { r: usize, omega: f64 },
}

impl ProgramArgs {
    fn program(&self) -> Result<Program> {
        match self.mode {
            Mode::Known => {
                if self.sizes.is_empty() {
                    return Err(usage("--mode known needs --sizes"));
                }
                Ok(Program::Known(self.sizes.clone()))
            }
            Mode::Unknown => match (self.r, self.omega) {
                (Some(r), Some(omega)) => Ok(Program::Unknown { r, omega }),
                _ => Err(usage("--mode unknown needs --r and --omega")),
            },
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    program: ProgramArgs,
    #[arg(long, default_value_t = SolveOptions::default().tol)]
    tol: f64,
    #[arg(long, default_value_t = SolveOptions::default().max_iters)]
    max_iters: usize,
    /// Largest entrywise distance from a partition matrix accepted by rounding.
    #[arg(long, default_value_t = RoundOptions::default().round_tol)]
    round_tol: f64,
    /// Write the solution matrix, one row per line.
    #[arg(long)]
    out_matrix: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    program: ProgramArgs,
    /// Raise the vertex-count guard (at most 64). Run time grows like r^n.
    #[arg(long, default_value_t = ppm_sdp::oracle::DEFAULT_MAX_N)]
    max_n: usize,
    /// Print every optimal partition instead of the count.
    #[arg(long)]
    all: bool,
}

#[derive(Args)]
struct CertifyArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    labels: PathBuf,
    #[arg(long, requires = "q_tilde", conflicts_with_all = ["omega", "p", "q"])]
    p_tilde: Option<f64>,
    #[arg(long, requires = "p_tilde")]
    q_tilde: Option<f64>,
    #[arg(long, requires_all = ["p", "q"])]
    omega: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    /// Override the per-community total of the slack vector.
    #[arg(long)]
    c: Option<f64>,
    /// Also print the algebraic identity checks.
    #[arg(long)]
    identities: bool,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Experiment configuration JSON.
    #[arg(long)]
    config: PathBuf,
    /// Aggregate CSV; defaults to the config's `output`, else stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-trial CSV; defaults to the config's `trial_log`.
    #[arg(long)]
    trial_log: Option<PathBuf>,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
}

#[derive(Args)]
struct TailsArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value_t = 0)]
    i: usize,
    #[arg(long, default_value_t = 1)]
    j: usize,
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Community counts to try, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    r: Vec<usize>,
    /// Explicit omega values; otherwise a geometric grid from the range flags.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["omega_min", "omega_max"])]
    omegas: Vec<f64>,
    #[arg(long)]
    omega_min: Option<f64>,
    #[arg(long)]
    omega_max: Option<f64>,
    #[arg(long, default_value_t = 10)]
    steps: usize,
    /// Reference labelings to match against (repeatable).
    #[arg(long = "reference")]
    references: Vec<PathBuf>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn usage(msg: &str) -> Error {
    Error::InvalidParameter(msg.to_string())
}

// a closed pipe downstream is not an error
fn stdout(text: &str) -> Result<()> {
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Error::Io {
            path: PathBuf::from("<stdout>"),
            source: e,
        }),
        _ => Ok(()),
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    stdout(&(serde_json::to_string_pretty(value)? + "\n"))
}

fn emit_csv<T: Serialize>(path: Option<&Path>, rows: &[T]) -> Result<()> {
    match path {
        Some(p) => write_csv(p, rows),
        None => stdout(&to_csv(rows)?),
    }
}

fn format_matrix(x: &DMatrix<f64>) -> String {
    let mut out = String::new();
    for i in 0..x.nrows() {
        let row: Vec<String> = (0..x.ncols()).map(|j| format!("{:.10e}", x[(i, j)])).collect();
        writeln!(out, "{}", row.join(" ")).unwrap();
    }
    out
}

fn check_graph_size(g: &Graph, labels: &PartitionLabels) -> Result<()> {
    if g.n() != labels.n() {
        return Err(Error::Dimension(format!(
            "graph has {} vertices, labels cover {}",
            g.n(),
            labels.n()
        )));
    }
    Ok(())
}

fn sample(args: &SampleArgs, seed: u64) -> Result<u8> {
    let params = args.model.params()?;
    let (g, labels) = sample_ppm(&params, seed)?;
    write_graph(&args.out_graph, &g)?;
    if let Some(path) = &args.out_labels {
        write_labels(path, &labels)?;
    }
    log::info!("sampled n = {}, m = {}, p = {:.6}, q = {:.6}", g.n(), g.m(), params.p(), params.q());
    Ok(0)
}

#[derive(Serialize)]
struct ChangeLog<'a> {
    added: &'a [(usize, usize)],
    removed: &'a [(usize, usize)],
}

fn adversary(args: &AdversaryArgs, seed: Option<u64>) -> Result<u8> {
    let g = read_graph(&args.graph)?;
    let truth = read_labels(&args.labels)?;
    check_graph_size(&g, &truth)?;
    let cfg: AdversaryConfig = read_json(&args.spec)?;
    let out = apply_adversary(&g, &truth, &cfg.spec, seed.unwrap_or(cfg.seed))?;
    write_graph(&args.out, &out.graph)?;
    if let Some(path) = &args.changes {
        let log = ChangeLog {
            added: &out.added,
            removed: &out.removed,
        };
        write_text(path, &serde_json::to_string_pretty(&log)?)?;
    }
    log::info!("{} added, {} removed", out.added.len(), out.removed.len());
    Ok(0)
}

fn threshold(args: &ThresholdArgs) -> Result<u8> {
    let model = match &args.model {
        Some(path) => read_json::<RateModel>(path)?,
        None => match (args.p_tilde, args.q_tilde) {
            (Some(p_tilde), Some(q_tilde)) if !args.pi.is_empty() => RateModel::Planted {
                n: None,
                r: None,
                pi: args.pi.clone(),
                p_tilde,
                q_tilde,
            },
            _ => return Err(usage("give --model, or --pi with --p-tilde and --q-tilde")),
        },
    };
    print_json(&feasibility_report(&model)?)?;
    Ok(0)
}

#[derive(Serialize)]
struct SolveSummary {
    n: usize,
    r: usize,
    converged: bool,
    iterations: usize,
    objective: f64,
    primal_residual: f64,
    dual_residual: f64,
    min_eigenvalue: f64,
    rounded: bool,
    max_deviation: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    rounding_method: Option<ppm_sdp::sdp::RoundingMethod>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sizes: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    message: Option<String>,
}

fn solve_cmd(args: &SolveArgs) -> Result<u8> {
    let g = read_graph(&args.program.graph)?;
    let prob = match args.program.program()? {
        Program::Known(sizes) => build_known_sizes(&g, &sizes)?,
        Program::Unknown { r, omega } => build_unknown_sizes(&g, r, omega)?,
    };
    let opts = SolveOptions {
        tol: args.tol,
        max_iters: args.max_iters,
        ..SolveOptions::default()
    };
    let sol = solve(&prob, &opts);
    if let Some(path) = &args.out_matrix {
        write_text(path, &format_matrix(&sol.x))?;
    }
    let rounded = round_to_partition(&sol.x, prob.r(), &RoundOptions { round_tol: args.round_tol });
    let mut summary = SolveSummary {
        n: prob.n(),
        r: prob.r(),
        converged: sol.converged,
        iterations: sol.iterations,
        objective: sol.objective,
        primal_residual: sol.primal_residual,
        dual_residual: sol.dual_residual,
        min_eigenvalue: sol.min_eigenvalue,
        rounded: rounded.is_ok(),
        max_deviation: f64::NAN,
        rounding_method: None,
        sizes: None,
        message: None,
    };
    match &rounded {
        Ok(r) => {
            summary.max_deviation = r.max_deviation;
            summary.rounding_method = Some(r.method);
            summary.sizes = Some(r.labels.sizes());
            if let Some(path) = &args.program.out_labels {
                write_labels(path, &r.labels)?;
            }
        }
        Err(f) => {
            summary.max_deviation = f.max_deviation;
            summary.message = Some(f.reason.clone());
        }
    }
    print_json(&summary)?;
    Ok(if !sol.converged {
        EXIT_NOT_CONVERGED
    } else if rounded.is_err() {
        EXIT_ROUNDING
    } else {
        0
    })
}

#[derive(Serialize)]
struct OracleSummary<'a> {
    objective: f64,
    is_unique: bool,
    ties: usize,
    evaluated: u64,
    sizes: Vec<usize>,
    labels: &'a [usize],
    #[serde(skip_serializing_if = "Option::is_none")]
    argmax: Option<Vec<&'a [usize]>>,
}

fn oracle(args: &OracleArgs) -> Result<u8> {
    let g = read_graph(&args.program.graph)?;
    let opts = OracleOptions { max_n: args.max_n };
    let res = match args.program.program()? {
        Program::Known(sizes) => mle_known_sizes(&g, &sizes, &opts)?,
        Program::Unknown { r, omega } => mle_unknown_sizes(&g, r, omega, &opts)?,
    };
    if let Some(path) = &args.program.out_labels {
        write_labels(path, &res.labels)?;
    }
    print_json(&OracleSummary {
        objective: res.objective,
        is_unique: res.is_unique,
        ties: res.ties,
        evaluated: res.evaluated,
        sizes: res.labels.sizes(),
        labels: res.labels.labels(),
        argmax: args.all.then(|| res.argmax.iter().map(|l| l.labels()).collect()),
    })?;
    Ok(0)
}

fn certify(args: &CertifyArgs) -> Result<u8> {
    let g = read_graph(&args.graph)?;
    let truth = read_labels(&args.labels)?;
    check_graph_size(&g, &truth)?;
    let prm = match (args.p_tilde, args.q_tilde, args.omega, args.p, args.q) {
        (Some(pt), Some(qt), None, None, None) => {
            let scale = (g.n() as f64).ln() / g.n() as f64;
            let (p, q) = (pt * scale, qt * scale);
            CertificateParams::new(compute_omega(p, q)?, p, q)?
        }
        (None, None, Some(omega), Some(p), Some(q)) => CertificateParams::new(omega, p, q)?,
        _ => return Err(usage("give --p-tilde and --q-tilde, or --omega, --p and --q")),
    };
    let opts = CertificateOptions {
        c: args.c,
        ..CertificateOptions::default()
    };
    let cert = build_certificate(&g, &truth, &prm, &opts)?;
    let report = verify_certificate(&g, &truth, &cert);
    if args.identities {
        #[derive(Serialize)]
        struct WithIdentities<'a> {
            report: &'a ppm_sdp::certificate::CertificateReport,
            identities: Vec<ppm_sdp::certificate::IdentityCheck>,
        }
        let identities = ppm_sdp::certificate::algebraic_identity_suite(&cert, &g, &truth);
        print_json(&WithIdentities {
            report: &report,
            identities,
        })?;
    } else {
        print_json(&report)?;
    }
    Ok(if report.verified { 0 } else { EXIT_FAILURE })
}

fn load_experiment(args: &ExperimentArgs, seed: Option<u64>) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::from_json_file(&args.config)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(j) = args.jobs {
        cfg.jobs = j;
    }
    if let Some(t) = args.trials {
        cfg.trials = t;
    }
    if args.out.is_some() {
        cfg.output = args.out.clone();
    }
    if args.trial_log.is_some() {
        cfg.trial_log = args.trial_log.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn phase(args: &ExperimentArgs, seed: Option<u64>) -> Result<u8> {
    let cfg = load_experiment(args, seed)?;
    let diagram = run_phase_diagram(&cfg)?;
    if let Some(path) = &cfg.trial_log {
        write_csv(path, &diagram.trials)?;
    }
    emit_csv(cfg.output.as_deref(), &diagram.rows)?;
    Ok(0)
}

fn robustness(args: &ExperimentArgs, seed: Option<u64>) -> Result<u8> {
    let cfg = load_experiment(args, seed)?;
    let report = run_robustness_suite(&cfg)?;
    if let Some(path) = &cfg.trial_log {
        write_csv(path, &report.trials)?;
    }
    emit_csv(cfg.output.as_deref(), &report.rows)?;
    let v = report.total_violations();
    if v > 0 {
        log::warn!("{v} trial(s) recovered on the clean graph but not after the adversary");
    }
    Ok(0)
}

fn tails(args: &TailsArgs, seed: u64) -> Result<u8> {
    let params = args.model.params()?;
    print_json(&tail_exponent_demo(&params, args.i, args.j, args.samples, seed)?)?;
    Ok(0)
}

fn sweep(args: &SweepArgs) -> Result<u8> {
    let g = read_graph(&args.graph)?;
    let omegas = if !args.omegas.is_empty() {
        args.omegas.clone()
    } else {
        match (args.omega_min, args.omega_max) {
            (Some(lo), Some(hi)) => omega_grid(lo, hi, args.steps)?,
            _ => return Err(usage("give --omegas, or --omega-min and --omega-max")),
        }
    };
    let references = args
        .references
        .iter()
        .map(read_labels)
        .collect::<Result<Vec<_>>>()?;
    let mut opts = SweepOptions::default();
    if let Some(t) = args.tol {
        opts.solver.tol = t;
    }
    if let Some(m) = args.max_iters {
        opts.solver.max_iters = m;
    }
    let points = omega_sweep(&g, &args.r, &omegas, &references, &opts);
    emit_csv(args.out.as_deref(), &points)?;
    Ok(0)
}

fn run(cli: Cli) -> Result<u8> {
    let seed = cli.seed.unwrap_or(0);
    match &cli.command {
        Command::Sample(a) => sample(a, seed),
        Command::Adversary(a) => adversary(a, cli.seed),
        Command::Threshold(a) => threshold(a),
        Command::Solve(a) => solve_cmd(a),
        Command::Oracle(a) => oracle(a),
        Command::Certify(a) => certify(a),
        Command::Phase(a) => phase(a, cli.seed),
        Command::Robustness(a) => robustness(a, cli.seed),
        Command::Tails(a) => tails(a, seed),
        Command::OmegaSweep(a) => sweep(a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_FAILURE)
        }
    }
}
