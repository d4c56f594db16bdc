//! A small recovery phase diagram across the threshold for two equal
//! communities, written as CSV.
//!
//!     cargo run --release --example phase_diagram > phase.csv

use ppm_sdp::harness::{run_phase_diagram, to_csv, Algorithm, ExperimentConfig};
use ppm_sdp::model::PlantedPartitionParams;

fn main() -> ppm_sdp::Result<()> {
    env_logger::init();
    let base = PlantedPartitionParams::new(100, vec![0.5, 0.5], 8.0, 2.0)?;
    let mut cfg = ExperimentConfig::single(&base, 4, 1);
    cfg.p_tilde = vec![4.0, 8.0, 14.0, 20.0];
    cfg.algorithms = vec![Algorithm::SolveUnknown, Algorithm::CertifyOnly];
    cfg.solver.max_iters = 3000;
    cfg.jobs = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    eprintln!("{}", cfg.work_estimate());
    let diagram = run_phase_diagram(&cfg)?;
    print!("{}", to_csv(&diagram.rows)?);
    Ok(())
}
