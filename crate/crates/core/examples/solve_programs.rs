//! Solve the known-sizes and unknown-sizes programs on one sample and round
//! the solutions back to partitions.
//!
//!     cargo run --release --example solve_programs

use ppm_sdp::model::{sample_ppm, PlantedPartitionParams};
use ppm_sdp::sdp::{build_known_sizes, build_unknown_sizes, round_to_partition, solve, RoundOptions, SolveOptions};

fn main() -> ppm_sdp::Result<()> {
    let params = PlantedPartitionParams::new(300, vec![0.5, 0.3, 0.2], 20.92, 2.0)?;
    let (g, truth) = sample_ppm(&params, 5)?;
    let omega = params.omega()?;
    let opts = SolveOptions::default();

    let programs = [
        ("known sizes", build_known_sizes(&g, &truth.sizes())?),
        ("unknown sizes", build_unknown_sizes(&g, params.r(), omega)?),
    ];
    for (name, prob) in programs {
        let t = std::time::Instant::now();
        let sol = solve(&prob, &opts);
        print!(
            "{name:<14} converged = {} in {} iterations ({:.2?}), objective = {:.3}, ",
            sol.converged,
            sol.iterations,
            t.elapsed(),
            sol.objective
        );
        match round_to_partition(&sol.x, prob.r(), &RoundOptions::default()) {
            Ok(r) => println!("rounded by {:?}, matches truth = {}", r.method, r.labels.same_partition(&truth)),
            Err(e) => println!("rounding failed: {e}"),
        }
    }

    // below the threshold the solution is not a partition matrix
    let weak = PlantedPartitionParams::new(120, vec![0.5, 0.5], 3.0, 2.0)?;
    let (g, _) = sample_ppm(&weak, 5)?;
    let prob = build_known_sizes(&g, &[60, 60])?;
    let sol = solve(&prob, &SolveOptions { max_iters: 2000, ..opts });
    match round_to_partition(&sol.x, 2, &RoundOptions::default()) {
        Ok(r) => println!("weak model rounded anyway ({:?})", r.method),
        Err(e) => println!("weak model: {e}"),
    }
    Ok(())
}
