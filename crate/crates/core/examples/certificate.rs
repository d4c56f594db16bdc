//! Build the dual certificate for the planted labels and check it, with and
//! without a monotone adversary applied first.
//!
//!     cargo run --release --example certificate

use ppm_sdp::adversary::{apply_adversary, AdversarySpec};
use ppm_sdp::certificate::{algebraic_identity_suite, build_certificate, verify_certificate, CertificateOptions, CertificateParams};
use ppm_sdp::model::{sample_ppm, PlantedPartitionParams};

fn main() -> ppm_sdp::Result<()> {
    let params = PlantedPartitionParams::new(200, vec![0.5, 0.5], 11.66, 2.0)?;
    let prm = CertificateParams::from_model(&params)?;
    let (g, truth) = sample_ppm(&params, 31)?;

    let cert = build_certificate(&g, &truth, &prm, &CertificateOptions::default())?;
    let report = verify_certificate(&g, &truth, &cert);
    println!("verified = {}", report.verified);
    println!("  interval margin   {:.4}", report.interval_margin);
    println!("  kernel residual   {:.2e} (tol {:.2e})", report.kernel_residual, report.kernel_tol);
    println!("  psd margin        {:.4} (tol {:.2e})", report.psd_margin, report.psd_tol);
    println!("  slackness gap     {:.2e}", report.slackness_gap);
    for check in algebraic_identity_suite(&cert, &g, &truth) {
        println!("  {:<28} rel err {:.1e} {}", check.name, check.rel_error, if check.pass { "ok" } else { "FAIL" });
    }

    let adv = apply_adversary(&g, &truth, &AdversarySpec::RandomMonotone { delta_add: 0.3, delta_rem: 0.3 }, 1)?;
    let cert = build_certificate(&adv.graph, &truth, &prm, &CertificateOptions::default())?;
    println!("after {} monotone changes: verified = {}", adv.change_count(), verify_certificate(&adv.graph, &truth, &cert).verified);

    // a wrong labeling has no certificate
    let mut wrong = truth.labels().to_vec();
    wrong.swap(0, g.n() - 1);
    let wrong = ppm_sdp::graph::PartitionLabels::new(wrong, 2)?;
    let cert = build_certificate(&g, &wrong, &prm, &CertificateOptions::default())?;
    let bad = verify_certificate(&g, &wrong, &cert);
    println!("swapped two vertices: verified = {}, issues = {:?}", bad.verified, bad.issues);
    Ok(())
}
