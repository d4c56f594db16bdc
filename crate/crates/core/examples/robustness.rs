//! Paired clean/adversarial trials: any trial recovered on the clean graph
//! must also be recovered after monotone changes.
//!
//!     cargo run --release --example robustness

use ppm_sdp::adversary::AdversarySpec;
use ppm_sdp::harness::{run_robustness_suite, to_csv, ExperimentConfig};
use ppm_sdp::model::PlantedPartitionParams;

fn main() -> ppm_sdp::Result<()> {
    let params = PlantedPartitionParams::new(150, vec![0.5, 0.3, 0.2], 20.92, 2.0)?;
    for spec in [
        AdversarySpec::RandomMonotone { delta_add: 0.3, delta_rem: 0.3 },
        AdversarySpec::SubcommunityPlant { community: 2, size: 12, density: 1.0 },
    ] {
        let mut cfg = ExperimentConfig::single(&params, 5, 8);
        cfg.adversary = Some(spec.clone());
        let report = run_robustness_suite(&cfg)?;
        println!("{spec:?}: {} violation(s)", report.total_violations());
        print!("{}", to_csv(&report.rows)?);
    }
    Ok(())
}
