//! Monte-Carlo look at the binomial tail behind the divergence threshold.
//!
//! For a vertex `v` in community `i`, `E(v,i) ~ Bin(s_i - 1, p)` and
//! `E(v,j) ~ Bin(s_j, q)` independently. The event `E(v,i) - E(v,j) <= T`
//! with `T = tau (pi_i - pi_j) log n` has probability `n^(-D+(i,j) + o(1))`.
//! The `o(1)` term is far from negligible at desk sizes, so the estimate is a
//! demonstration only.

use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::model::PlantedPartitionParams;
use crate::rng::{derive_seed, purpose, seeded};
use crate::thresholds::planted_divergence;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TailReport {
    pub n: usize,
    pub i: usize,
    pub j: usize,
    pub threshold: f64,
    pub samples: u64,
    pub events: u64,
    pub frequency: f64,
    /// `-log(frequency) / log n`; with no events, the one-sided bound
    /// `log(samples) / log n` (see `lower_bound_only`).
    pub exponent: f64,
    pub lower_bound_only: bool,
    pub divergence: f64,
    /// Exact tail probability and its exponent, by convolution.
    pub exact_probability: f64,
    pub exact_exponent: f64,
    pub note: String,
}

fn check_pair(params: &PlantedPartitionParams, i: usize, j: usize) -> Result<()> {
    let r = params.r();
    if i >= r || j >= r || i == j {
        return Err(invalid(format!("need distinct communities below {r}, got ({i}, {j})")));
    }
    Ok(())
}

fn tail_setup(params: &PlantedPartitionParams, i: usize, j: usize) -> Result<(u64, u64, f64)> {
    check_pair(params, i, j)?;
    let sizes = params.sizes()?;
    let pi = params.pi();
    let t = params.tau() * (pi[i] - pi[j]) * (params.n() as f64).ln();
    Ok(((sizes[i] - 1) as u64, sizes[j] as u64, t))
}

fn binomial_pmf(m: u64, p: f64) -> Vec<f64> {
    if p <= 0.0 {
        let mut v = vec![0.0; m as usize + 1];
        v[0] = 1.0;
        return v;
    }
    if p >= 1.0 {
        let mut v = vec![0.0; m as usize + 1];
        v[m as usize] = 1.0;
        return v;
    }
    let (lp, lq) = (p.ln(), (-p).ln_1p());
    let mut logs = Vec::with_capacity(m as usize + 1);
    let mut acc = m as f64 * lq;
    logs.push(acc);
    for k in 0..m {
        acc += ((m - k) as f64).ln() - ((k + 1) as f64).ln() + lp - lq;
        logs.push(acc);
    }
    logs.into_iter().map(f64::exp).collect()
}

/// `P(Bin(s_i - 1, p) - Bin(s_j, q) <= tau (pi_i - pi_j) log n)`.
pub fn exact_tail_probability(params: &PlantedPartitionParams, i: usize, j: usize) -> Result<f64> {
    let (mi, mj, t) = tail_setup(params, i, j)?;
    let px = binomial_pmf(mi, params.p());
    let py = binomial_pmf(mj, params.q());
    let mut cdf = Vec::with_capacity(px.len());
    let mut acc = 0.0;
    for x in &px {
        acc += x;
        cdf.push(acc);
    }
    let mut total = 0.0;
    for (y, w) in py.iter().enumerate() {
        let bound = (t + y as f64).floor();
        if bound < 0.0 {
            continue;
        }
        let k = (bound as usize).min(cdf.len() - 1);
        total += w * cdf[k];
    }
    Ok(total.min(1.0))
}

/// Estimate the tail exponent from `samples` independent vertex draws.
pub fn tail_exponent_demo(params: &PlantedPartitionParams, i: usize, j: usize, samples: u64, seed: u64) -> Result<TailReport> {
    let (mi, mj, t) = tail_setup(params, i, j)?;
    if samples == 0 {
        return Err(invalid("need at least one sample"));
    }
    let bx = Binomial::new(mi, params.p()).map_err(|e| invalid(e.to_string()))?;
    let by = Binomial::new(mj, params.q()).map_err(|e| invalid(e.to_string()))?;
    let mut rng = seeded(derive_seed(seed, &[purpose::TAILS, i as u64, j as u64]));
    let mut events = 0u64;
    for _ in 0..samples {
        let x = bx.sample(&mut rng) as f64;
        let y = by.sample(&mut rng) as f64;
        if x - y <= t {
            events += 1;
        }
    }
    let ln_n = (params.n() as f64).ln();
    let frequency = events as f64 / samples as f64;
    let (exponent, lower_bound_only) = if events == 0 {
        ((samples as f64).ln() / ln_n, true)
    } else {
        (-frequency.ln() / ln_n, false)
    };
    let pi = params.pi();
    let divergence = planted_divergence(params.p_tilde(), params.q_tilde(), pi[i], pi[j])?.value;
    let exact_probability = exact_tail_probability(params, i, j)?;
    Ok(TailReport {
        n: params.n(),
        i,
        j,
        threshold: t,
        samples,
        events,
        frequency,
        exponent,
        lower_bound_only,
        divergence,
        exact_probability,
        exact_exponent: -exact_probability.ln() / ln_n,
        note: "demonstration: the o(1) term in the exponent is material at this n".into(),
    })
}
