//! Regularizer, rate constant and divergences for a few models, including the
//! three-community pair where a monotone change destroys feasibility.
//!
//!     cargo run --release --example thresholds

use ppm_sdp::thresholds::{
    compute_omega, counterexample_matrices, dominates, feasibility_report, monotone_divergence,
    p_tilde_for_divergence, planted_divergence, tau, RateModel,
};

fn main() -> ppm_sdp::Result<()> {
    println!("omega(0.5, 0.1) = {:.10}", compute_omega(0.5, 0.1)?);
    println!("tau(8, 2)       = {:.10}", tau(8.0, 2.0));

    // equal halves: D = (sqrt p - sqrt q)^2 / 2, exactly 1 at (8, 2)
    for p in [4.0, 8.0, 12.0] {
        let d = planted_divergence(p, 2.0, 0.5, 0.5)?;
        println!("halves, p~ = {p:>4}: D+ = {:.6} (t* = {:.3})", d.value, d.t_star);
    }

    let model = RateModel::Planted {
        n: Some(300),
        r: Some(3),
        pi: vec![0.5, 0.3, 0.2],
        p_tilde: p_tilde_for_divergence(2.0, &[0.5, 0.3, 0.2], 2.5)?,
        q_tilde: 2.0,
    };
    let report = feasibility_report(&model)?;
    println!("\n{}", serde_json::to_string_pretty(&report)?);

    let pi = [1.0 / 3.0; 3];
    let (q1, q2) = counterexample_matrices(31.4, 15.0, 10.0, 1.0);
    for (name, q) in [("Q1", &q1), ("Q2", &q2)] {
        let r = feasibility_report(&RateModel::General { q_tilde_matrix: q.clone(), pi: pi.to_vec() })?;
        let m = monotone_divergence(q, &pi, 0, 1)?;
        println!(
            "{name}: min D+ = {:.4} at {:?}, feasible = {}, monotone D(0,1) = {:.4}",
            r.min_value, r.min_pair, r.feasible, m.value
        );
    }
    println!("Q2 dominates Q1: {}", dominates(&q2, &q1));
    Ok(())
}
