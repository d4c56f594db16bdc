//! Compare the SDP with exhaustive maximum likelihood on tiny graphs.
//!
//!     cargo run --release --example oracle_vs_sdp

use ppm_sdp::certificate::{build_certificate, verify_certificate, CertificateOptions, CertificateParams};
use ppm_sdp::graph::PartitionLabels;
use ppm_sdp::model::sample_planted;
use ppm_sdp::oracle::{mle_known_sizes, OracleOptions};
use ppm_sdp::sdp::{build_known_sizes, round_to_partition, solve, RoundOptions, SolveOptions};
use ppm_sdp::thresholds::compute_omega;

fn main() -> ppm_sdp::Result<()> {
    let (p, q) = (0.95, 0.05);
    let prm = CertificateParams::new(compute_omega(p, q)?, p, q)?;
    let truth = PartitionLabels::from_sizes(&[6, 6])?;
    println!("seed  oracle-unique  sdp-rounded  certified  agree");
    for seed in 0..12 {
        let g = sample_planted(&truth, p, q, seed)?;
        let mle = mle_known_sizes(&g, &truth.sizes(), &OracleOptions::default())?;
        let sol = solve(&build_known_sizes(&g, &truth.sizes())?, &SolveOptions::default());
        let rounded = round_to_partition(&sol.x, 2, &RoundOptions::default()).ok();
        let cert = build_certificate(&g, &truth, &prm, &CertificateOptions::default())?;
        let verified = verify_certificate(&g, &truth, &cert).verified;
        let agree = rounded.as_ref().map(|r| r.labels.same_partition(&mle.labels));
        println!(
            "{seed:>4}  {:>13}  {:>11}  {:>9}  {:?}",
            mle.is_unique,
            rounded.is_some(),
            verified,
            agree
        );
    }
    Ok(())
}
