//! Recovery thresholds: the regularizer `omega`, the Chernoff-Hellinger
//! divergence (numeric and planted-partition closed form), the monotone
//! divergence and block-model domination.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::model::{validate_pi, PlantedPartitionParams};

/// `omega = log((1-q)/(1-p)) / log(p(1-q) / (q(1-p)))`, which lies strictly
/// between `q` and `p`.
pub fn compute_omega(p: f64, q: f64) -> Result<f64> {
    if !(0.0 < q && q < p && p < 1.0) {
        return Err(invalid(format!("omega needs 0 < q < p < 1, got p = {p}, q = {q}")));
    }
    let beta = (-q).ln_1p() - (-p).ln_1p();
    let alpha = p.ln() - q.ln() + beta;
    Ok(beta / alpha)
}

/// `(p_tilde - q_tilde) / (log p_tilde - log q_tilde)`; equals `p_tilde` when the rates coincide.
pub fn tau(p_tilde: f64, q_tilde: f64) -> f64 {
    let d = p_tilde.ln() - q_tilde.ln();
    if d.abs() < 1e-12 {
        // logarithmic mean limit
        0.5 * (p_tilde + q_tilde)
    } else {
        (p_tilde - q_tilde) / d
    }
}

/// Constants of one planted partition regime.
#[derive(Debug, Clone, Serialize)]
pub struct RegimeConstants {
    pub alpha: f64,
    pub beta: f64,
    pub omega: f64,
    pub tau: f64,
    /// `gamma[i][j] = sqrt(tau^2 (pi_i - pi_j)^2 + 4 pi_i pi_j p_tilde q_tilde)`.
    pub gamma: Vec<Vec<f64>>,
}

impl RegimeConstants {
    pub fn new(params: &PlantedPartitionParams) -> Result<Self> {
        let (p, q) = (params.p(), params.q());
        let omega = compute_omega(p, q)?;
        let beta = (-q).ln_1p() - (-p).ln_1p();
        let alpha = p.ln() - q.ln() + beta;
        let tau = params.tau();
        let pi = params.pi();
        let gamma = pi
            .iter()
            .map(|&a| {
                pi.iter()
                    .map(|&b| gamma_term(tau, a, b, params.p_tilde(), params.q_tilde()))
                    .collect()
            })
            .collect();
        Ok(Self {
            alpha,
            beta,
            omega,
            tau,
            gamma,
        })
    }
}

fn gamma_term(tau: f64, pi_i: f64, pi_j: f64, p_tilde: f64, q_tilde: f64) -> f64 {
    let d = pi_i - pi_j;
    (tau * tau * d * d + 4.0 * pi_i * pi_j * p_tilde * q_tilde).sqrt()
}

/// A divergence value with a maximizing `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Divergence {
    pub value: f64,
    pub t_star: f64,
}

fn validate_rates(q_tilde: &[Vec<f64>], pi: &[f64], i: usize, j: usize) -> Result<()> {
    validate_pi(pi)?;
    let r = pi.len();
    if q_tilde.len() != r || q_tilde.iter().any(|row| row.len() != r) {
        return Err(Error::Dimension(format!("rate matrix must be {r} x {r}")));
    }
    for (a, row) in q_tilde.iter().enumerate() {
        for (b, &x) in row.iter().enumerate() {
            if !(x > 0.0) || !x.is_finite() {
                return Err(invalid(format!("rate entry ({a}, {b}) = {x} must be positive")));
            }
            if (x - q_tilde[b][a]).abs() > 1e-12 * x.abs().max(1.0) {
                return Err(invalid("rate matrix must be symmetric"));
            }
        }
    }
    if i >= r || j >= r || i == j {
        return Err(invalid(format!("need distinct communities below {r}, got ({i}, {j})")));
    }
    Ok(())
}

/// Maximize the concave function `sum_k w_k (t a_k + (1-t) b_k - a_k^t b_k^{1-t})`
/// over `t` in `[0, 1]` by bisection on its (decreasing) derivative.
fn sup_concave(terms: &[(f64, f64, f64)]) -> Divergence {
    let value = |t: f64| -> f64 {
        terms
            .iter()
            .map(|&(w, a, b)| w * (t * a + (1.0 - t) * b - b * (t * (a / b).ln()).exp()))
            .sum()
    };
    let slope = |t: f64| -> f64 {
        terms
            .iter()
            .map(|&(w, a, b)| {
                let l = (a / b).ln();
                w * (a - b - b * (t * l).exp() * l)
            })
            .sum()
    };
    let t_star = if slope(0.0) <= 0.0 {
        0.0
    } else if slope(1.0) >= 0.0 {
        1.0
    } else {
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if slope(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    Divergence {
        value: value(t_star).max(0.0),
        t_star,
    }
}

/// CH-divergence `D+(i, j)` of a general block model, by numeric supremum over `t`.
pub fn ch_divergence_numeric(q_tilde: &[Vec<f64>], pi: &[f64], i: usize, j: usize) -> Result<Divergence> {
    validate_rates(q_tilde, pi, i, j)?;
    let terms: Vec<_> = (0..pi.len())
        .map(|k| (pi[k], q_tilde[i][k], q_tilde[j][k]))
        .collect();
    Ok(sup_concave(&terms))
}

/// Monotone divergence: the supremum restricted to the `k = i, j` terms.
pub fn monotone_divergence(q_tilde: &[Vec<f64>], pi: &[f64], i: usize, j: usize) -> Result<Divergence> {
    validate_rates(q_tilde, pi, i, j)?;
    let terms: Vec<_> = [i, j]
        .iter()
        .map(|&k| (pi[k], q_tilde[i][k], q_tilde[j][k]))
        .collect();
    Ok(sup_concave(&terms))
}

/// Closed-form planted-partition divergence between communities of
/// proportions `pi_i` and `pi_j`.
pub fn planted_divergence(p_tilde: f64, q_tilde: f64, pi_i: f64, pi_j: f64) -> Result<Divergence> {
    if !(q_tilde > 0.0 && pi_i > 0.0 && pi_j > 0.0) {
        return Err(invalid("rates and proportions must be positive"));
    }
    if p_tilde < q_tilde {
        return Err(invalid(format!(
            "closed form needs p_tilde >= q_tilde, got {p_tilde} < {q_tilde}"
        )));
    }
    if p_tilde == q_tilde {
        return Ok(Divergence {
            value: 0.0,
            t_star: 0.5,
        });
    }
    if pi_i < pi_j {
        // evaluate in one fixed order so the value is exactly symmetric; t maps to 1 - t
        let d = planted_divergence(p_tilde, q_tilde, pi_j, pi_i)?;
        return Ok(Divergence {
            value: d.value,
            t_star: 1.0 - d.t_star,
        });
    }
    let tau = tau(p_tilde, q_tilde);
    let gamma = gamma_term(tau, pi_i, pi_j, p_tilde, q_tilde);
    let d = pi_i - pi_j;
    let log_arg = (pi_j * p_tilde) / (pi_i * q_tilde) * ((tau * d + gamma) / (-tau * d + gamma));
    let value = pi_i * q_tilde + pi_j * p_tilde - gamma + 0.5 * tau * d * log_arg.ln();
    let e_u = (tau * d + gamma) / (2.0 * pi_i * q_tilde);
    let t_star = e_u.ln() / (p_tilde / q_tilde).ln();
    Ok(Divergence {
        value: value.max(0.0),
        t_star,
    })
}

/// Closed-form `D+(i, j)` for a planted partition model.
pub fn ch_divergence_closed_form(params: &PlantedPartitionParams, i: usize, j: usize) -> Result<f64> {
    let r = params.r();
    if i >= r || j >= r || i == j {
        return Err(invalid(format!("need distinct communities below {r}, got ({i}, {j})")));
    }
    let pi = params.pi();
    Ok(planted_divergence(params.p_tilde(), params.q_tilde(), pi[i], pi[j])?.value)
}

/// Either a planted partition model or a general rate matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RateModel {
    Planted {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        r: Option<usize>,
        pi: Vec<f64>,
        p_tilde: f64,
        q_tilde: f64,
    },
    General {
        q_tilde_matrix: Vec<Vec<f64>>,
        pi: Vec<f64>,
    },
}

impl From<&PlantedPartitionParams> for RateModel {
    fn from(p: &PlantedPartitionParams) -> Self {
        RateModel::Planted {
            n: Some(p.n()),
            r: Some(p.r()),
            pi: p.pi().to_vec(),
            p_tilde: p.p_tilde(),
            q_tilde: p.q_tilde(),
        }
    }
}

impl RateModel {
    pub fn pi(&self) -> &[f64] {
        match self {
            RateModel::Planted { pi, .. } | RateModel::General { pi, .. } => pi,
        }
    }

    pub fn rate_matrix(&self) -> Vec<Vec<f64>> {
        match self {
            RateModel::Planted {
                pi,
                p_tilde,
                q_tilde,
                ..
            } => (0..pi.len())
                .map(|i| {
                    (0..pi.len())
                        .map(|j| if i == j { *p_tilde } else { *q_tilde })
                        .collect()
                })
                .collect(),
            RateModel::General { q_tilde_matrix, .. } => q_tilde_matrix.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairDivergence {
    pub i: usize,
    pub j: usize,
    pub value: f64,
    pub t_star: f64,
}

/// All-pairs divergences and the resulting feasibility verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergenceReport {
    pub pairs: Vec<PairDivergence>,
    pub min_pair: (usize, usize),
    pub min_value: f64,
    /// `min_value > 1`; the boundary case counts as infeasible.
    pub feasible: bool,
    /// For planted partition models, the pair of the two smallest communities,
    /// where the minimum is known to be attained.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub predicted_min_pair: Option<(usize, usize)>,
}

impl DivergenceReport {
    pub fn value(&self, i: usize, j: usize) -> Option<f64> {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        self.pairs.iter().find(|p| p.i == a && p.j == b).map(|p| p.value)
    }
}

pub fn feasibility_report(model: &RateModel) -> Result<DivergenceReport> {
    let pi = model.pi();
    validate_pi(pi)?;
    let r = pi.len();
    let mut pairs = Vec::with_capacity(r * (r - 1) / 2);
    let mut predicted = None;
    match model {
        RateModel::Planted {
            r: declared,
            p_tilde,
            q_tilde,
            ..
        } => {
            if declared.is_some_and(|d| d != r) {
                return Err(invalid("declared r does not match pi"));
            }
            for i in 0..r {
                for j in i + 1..r {
                    let d = planted_divergence(*p_tilde, *q_tilde, pi[i], pi[j])?;
                    pairs.push(PairDivergence {
                        i,
                        j,
                        value: d.value,
                        t_star: d.t_star,
                    });
                }
            }
            let mut order: Vec<usize> = (0..r).collect();
            order.sort_by(|&a, &b| pi[a].total_cmp(&pi[b]).then(a.cmp(&b)));
            let (a, b) = (order[0].min(order[1]), order[0].max(order[1]));
            predicted = Some((a, b));
        }
        RateModel::General { q_tilde_matrix, .. } => {
            for i in 0..r {
                for j in i + 1..r {
                    let d = ch_divergence_numeric(q_tilde_matrix, pi, i, j)?;
                    pairs.push(PairDivergence {
                        i,
                        j,
                        value: d.value,
                        t_star: d.t_star,
                    });
                }
            }
        }
    }
    let best = pairs
        .iter()
        .min_by(|a, b| a.value.total_cmp(&b.value))
        .expect("at least one pair");
    Ok(DivergenceReport {
        min_pair: (best.i, best.j),
        min_value: best.value,
        feasible: best.value > 1.0,
        predicted_min_pair: predicted,
        pairs,
    })
}

/// Smallest pairwise planted divergence, attained at the two smallest communities.
pub fn min_planted_divergence(p_tilde: f64, q_tilde: f64, pi: &[f64]) -> Result<f64> {
    validate_pi(pi)?;
    let mut sorted = pi.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(planted_divergence(p_tilde, q_tilde, sorted[0], sorted[1])?.value)
}

/// The `p_tilde` at which the minimum pairwise divergence equals `target`,
/// for fixed `q_tilde` and `pi` (the divergence increases with `p_tilde`).
pub fn p_tilde_for_divergence(q_tilde: f64, pi: &[f64], target: f64) -> Result<f64> {
    if !(target >= 0.0) || !target.is_finite() {
        return Err(invalid(format!("target divergence {target} must be a nonnegative number")));
    }
    let f = |p: f64| min_planted_divergence(p, q_tilde, pi);
    let mut lo = q_tilde;
    let mut hi = 2.0 * q_tilde + 1.0;
    while f(hi)? < target {
        lo = hi;
        hi *= 2.0;
        if hi > 1e12 {
            return Err(invalid(format!("divergence {target} out of reach")));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-13 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// First entry at which `upper` fails to dominate `lower` in block-model
/// ordering, i.e. where `upper` has a smaller intra rate or a larger inter rate.
pub fn domination_violation(upper: &[Vec<f64>], lower: &[Vec<f64>]) -> Option<(usize, usize)> {
    let r = lower.len();
    if upper.len() != r {
        return Some((r.min(upper.len()), 0));
    }
    for i in 0..r {
        if upper[i].len() != r || lower[i].len() != r {
            return Some((i, 0));
        }
        for j in 0..r {
            let ok = if i == j {
                upper[i][j] >= lower[i][j]
            } else {
                upper[i][j] <= lower[i][j]
            };
            if !ok {
                return Some((i, j));
            }
        }
    }
    None
}

/// `upper` dominates `lower` in block-model ordering: every intra rate is at
/// least as large and every inter rate at most as large. A dominating model can
/// be simulated from the dominated one by monotone changes.
pub fn dominates(upper: &[Vec<f64>], lower: &[Vec<f64>]) -> bool {
    domination_violation(upper, lower).is_none()
}

/// The two three-community rate matrices `(Q1, Q2)` that differ only in the
/// `(0, 2)` entry, `c + eps` versus `c`.
pub fn counterexample_matrices(a: f64, b: f64, c: f64, eps: f64) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let q1 = vec![
        vec![a, b, c + eps],
        vec![b, a, c],
        vec![c + eps, c, a],
    ];
    let q2 = vec![vec![a, b, c], vec![b, a, c], vec![c, c, a]];
    (q1, q2)
}

/// Four-community model where two planted partitions nest: blocks `{0,1}`
/// and `{2,3}` at coarse level.
pub fn hierarchical_matrix(a: f64, b: f64, c: f64) -> Vec<Vec<f64>> {
    vec![
        vec![a, b, c, c],
        vec![b, a, c, c],
        vec![c, c, a, b],
        vec![c, c, b, a],
    ]
}
