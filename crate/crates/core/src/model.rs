//! Planted partition model parameters and sampling.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::graph::{Graph, PartitionLabels};
use crate::rng::{derive_seed, purpose, PairStream};
use crate::thresholds;

/// `(n, pi, p_tilde, q_tilde)` with edge probabilities `p = p_tilde log n / n`
/// and `q = q_tilde log n / n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct PlantedPartitionParams {
    n: usize,
    pi: Vec<f64>,
    p_tilde: f64,
    q_tilde: f64,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    r: Option<usize>,
    pi: Vec<f64>,
    p_tilde: f64,
    q_tilde: f64,
}

impl TryFrom<RawParams> for PlantedPartitionParams {
    type Error = crate::Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        if let Some(r) = raw.r {
            if r != raw.pi.len() {
                return Err(invalid(format!("r = {r} but pi has {} entries", raw.pi.len())));
            }
        }
        Self::new(raw.n, raw.pi, raw.p_tilde, raw.q_tilde)
    }
}

impl From<PlantedPartitionParams> for RawParams {
    fn from(p: PlantedPartitionParams) -> Self {
        RawParams {
            n: p.n,
            r: Some(p.pi.len()),
            pi: p.pi,
            p_tilde: p.p_tilde,
            q_tilde: p.q_tilde,
        }
    }
}

pub(crate) fn validate_pi(pi: &[f64]) -> Result<()> {
    if pi.len() < 2 {
        return Err(invalid("need at least two communities"));
    }
    if pi.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
        return Err(invalid("community proportions must be positive"));
    }
    let total: f64 = pi.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(invalid(format!("community proportions sum to {total}, expected 1")));
    }
    Ok(())
}

impl PlantedPartitionParams {
    /// Requires `p_tilde >= q_tilde > 0` and `p < 1`. Equal rates are accepted
    /// as the structureless null model; `p_tilde < q_tilde` (dissortative) is rejected.
    pub fn new(n: usize, pi: Vec<f64>, p_tilde: f64, q_tilde: f64) -> Result<Self> {
        validate_pi(&pi)?;
        if n < 2 {
            return Err(invalid("need at least two vertices"));
        }
        if !(q_tilde > 0.0) || !q_tilde.is_finite() || !p_tilde.is_finite() {
            return Err(invalid("rate constants must be positive and finite"));
        }
        if p_tilde < q_tilde {
            return Err(invalid(format!(
                "dissortative rates (p_tilde = {p_tilde} < q_tilde = {q_tilde}) are not supported"
            )));
        }
        let params = Self {
            n,
            pi,
            p_tilde,
            q_tilde,
        };
        if params.p() >= 1.0 {
            return Err(invalid(format!(
                "p = {} is not below 1 (p_tilde too large for n = {n})",
                params.p()
            )));
        }
        params.sizes()?;
        Ok(params)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.pi.len()
    }

    pub fn pi(&self) -> &[f64] {
        &self.pi
    }

    pub fn p_tilde(&self) -> f64 {
        self.p_tilde
    }

    pub fn q_tilde(&self) -> f64 {
        self.q_tilde
    }

    /// `log n / n`, the scale linking rate constants to probabilities.
    pub fn scale(&self) -> f64 {
        (self.n as f64).ln() / self.n as f64
    }

    pub fn p(&self) -> f64 {
        self.p_tilde * self.scale()
    }

    pub fn q(&self) -> f64 {
        self.q_tilde * self.scale()
    }

    pub fn omega(&self) -> Result<f64> {
        thresholds::compute_omega(self.p(), self.q())
    }

    pub fn tau(&self) -> f64 {
        thresholds::tau(self.p_tilde, self.q_tilde)
    }

    /// Community sizes by largest-remainder rounding of `pi * n`.
    pub fn sizes(&self) -> Result<Vec<usize>> {
        largest_remainder_sizes(&self.pi, self.n)
    }

    /// Ground truth with contiguous communities.
    pub fn labels(&self) -> Result<PartitionLabels> {
        PartitionLabels::from_sizes(&self.sizes()?)
    }

    /// The rate matrix with `p_tilde` on the diagonal and `q_tilde` elsewhere.
    pub fn rate_matrix(&self) -> Vec<Vec<f64>> {
        let r = self.r();
        (0..r)
            .map(|i| {
                (0..r)
                    .map(|j| if i == j { self.p_tilde } else { self.q_tilde })
                    .collect()
            })
            .collect()
    }
}

/// Floors of `pi_i * n`, with the leftover vertices handed to the largest
/// fractional parts (ties to the lower index). Fails if a community ends up empty.
pub fn largest_remainder_sizes(pi: &[f64], n: usize) -> Result<Vec<usize>> {
    let quotas: Vec<f64> = pi.iter().map(|&x| x * n as f64).collect();
    let mut sizes: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let assigned: usize = sizes.iter().sum();
    let mut order: Vec<usize> = (0..pi.len()).collect();
    order.sort_by(|&a, &b| {
        let fa = quotas[a] - quotas[a].floor();
        let fb = quotas[b] - quotas[b].floor();
        fb.total_cmp(&fa).then(a.cmp(&b))
    });
    for &i in order.iter().take(n.saturating_sub(assigned)) {
        sizes[i] += 1;
    }
    if let Some(i) = sizes.iter().position(|&s| s == 0) {
        return Err(invalid(format!("rounding leaves community {i} empty at n = {n}")));
    }
    Ok(sizes)
}

/// Sample an SBM with intra probability `p` and inter probability `q` on a
/// fixed partition. Accepts the degenerate endpoints 0 and 1.
pub fn sample_planted(labels: &PartitionLabels, p: f64, q: f64, seed: u64) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) || !(0.0..=1.0).contains(&q) {
        return Err(invalid(format!("edge probabilities ({p}, {q}) outside [0, 1]")));
    }
    let n = labels.n();
    let mut stream = PairStream::new(derive_seed(seed, &[purpose::SAMPLE]), n);
    let mut g = Graph::empty(n);
    for u in 0..n {
        for v in u + 1..n {
            let prob = if labels.same_community(u, v) { p } else { q };
            if stream.bernoulli(u, v, prob) {
                g.add_edge(u, v);
            }
        }
    }
    Ok(g)
}

/// Draw a graph from the planted partition model together with its ground truth.
pub fn sample_ppm(params: &PlantedPartitionParams, seed: u64) -> Result<(Graph, PartitionLabels)> {
    let labels = params.labels()?;
    let g = sample_planted(&labels, params.p(), params.q(), seed)?;
    Ok((g, labels))
}
