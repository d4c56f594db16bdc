//! Two nested planted partitions in one graph. Sweeping omega with r = 2 and
//! r = 4 and discarding non-partition solutions finds both.
//!
//!     cargo run --release --example hierarchical_sweep

use ppm_sdp::adversary::simulate_dominating_sbm;
use ppm_sdp::graph::PartitionLabels;
use ppm_sdp::harness::{omega_grid, omega_sweep, SweepOptions};
use ppm_sdp::model::{sample_ppm, PlantedPartitionParams};
use ppm_sdp::thresholds::{compute_omega, hierarchical_matrix};

fn main() -> ppm_sdp::Result<()> {
    let (a, b, c, n) = (33.6, 9.0, 1.0, 200);
    let base = PlantedPartitionParams::new(n, vec![0.25; 4], a, b)?;
    let (g0, fine) = sample_ppm(&base, 3)?;
    let g = simulate_dominating_sbm(&g0, &fine, &hierarchical_matrix(a, b, c), &base, 3)?.graph;
    let coarse = PartitionLabels::new(fine.labels().iter().map(|&l| l / 2).collect(), 2)?;

    let s = (n as f64).ln() / n as f64;
    println!(
        "omega(a, b) = {:.4}, omega(b, c) = {:.4}",
        compute_omega(a * s, b * s)?,
        compute_omega(b * s, c * s)?
    );
    let mut opts = SweepOptions::default();
    opts.solver.max_iters = 2000;
    let omegas = omega_grid(0.02, 0.8, 6)?;
    let names = ["four-way", "two-way"];
    for p in omega_sweep(&g, &[2, 4], &omegas, &[fine, coarse], &opts) {
        let found = match (p.partition, p.matched_reference) {
            (true, Some(k)) => names[k].to_string(),
            (true, None) => "other partition".into(),
            (false, _) => "-".into(),
        };
        println!("r = {} omega = {:.4}: {found}", p.r, p.omega);
    }
    Ok(())
}
