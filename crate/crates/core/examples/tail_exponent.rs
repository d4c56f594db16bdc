//! Monte-Carlo look at the binomial tail whose exponent is the divergence.
//! At desk sizes the correction term is large; compare with the exact value.
//!
//!     cargo run --release --example tail_exponent

use ppm_sdp::harness::tail_exponent_demo;
use ppm_sdp::model::PlantedPartitionParams;

fn main() -> ppm_sdp::Result<()> {
    for (pi, p, q) in [(vec![0.5, 0.5], 8.0, 2.0), (vec![0.5, 0.5], 3.0, 2.0), (vec![0.6, 0.4], 8.0, 2.0)] {
        let params = PlantedPartitionParams::new(10_000, pi.clone(), p, q)?;
        let rep = tail_exponent_demo(&params, 0, 1, 100_000, 3)?;
        println!(
            "pi = {pi:?}, p~ = {p}, q~ = {q}: D+ = {:.3}, estimate = {:.3}{}, exact = {:.3} ({} events)",
            rep.divergence,
            rep.exponent,
            if rep.lower_bound_only { " (lower bound)" } else { "" },
            rep.exact_exponent,
            rep.events
        );
    }
    Ok(())
}
