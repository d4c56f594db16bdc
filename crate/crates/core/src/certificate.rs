//! Dual certificate for the planted partition.
//!
//! Given a graph, the planted partition and `(omega, p, q)`, the builder
//! chooses the dual variables `(nu, Gamma)` of the unknown-sizes program so
//! that `Lambda = diag(nu) + omega J - A - Gamma` annihilates every `1_i - 1_j`
//! and `Gamma` vanishes on diagonal blocks. If in addition `Gamma` is strictly
//! positive off the diagonal blocks and `Lambda` is positive definite on the
//! complement of `span{1_i - 1_j}`, the centered partition matrix of the
//! planted partition is the unique optimum of both SDPs.
//!
//! Construction, for `v` in community `i`:
//!
//! ```text
//! c        = (omega - q) s_min s_2ndmin / 2
//! alpha_v  = omega (s_i - 1) - E(v,i) + eps1
//! beta_v   = min_{j != i} omega s_j - E(v,j) - eps2
//! kappa_i  = (c - abar_i) / (bbar_i - abar_i)          clamped to [0, 1]
//! gamma'_v = (1 - kappa_i) alpha_v + kappa_i beta_v
//! gamma_v  = gamma'_v + (c - sum_{S_i} gamma') / s_i
//! nu_v     = E(v,i) - omega s_i + gamma_v
//! R_vj     = omega s_j - E(v,j) - gamma_v
//! T_ij     = omega s_i s_j - E(i,j) - c
//! Gamma_uv = R_uj R_vi / T_ij                            u in S_i, v in S_j
//! ```
//!
//! with `abar_i = (omega - p) s_i (s_i - 1) + s_i eps1` and
//! `bbar_i = (omega - q) s_i min_{j != i} s_j - s_i eps2`. The slacks are
//! `eps1 = max|delta| + omega + L` and `eps2 = max|delta| + 1` with
//! `L = log n / log log n`; since `delta` depends on the slacks, a first pass
//! uses `max|delta| = 0` and a second pass uses the first pass's `delta`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::graph::{Graph, PartitionLabels};
use crate::model::PlantedPartitionParams;

/// `(omega, p, q)`; `p` and `q` only enter through `abar_i`, `bbar_i` and `c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertificateParams {
    pub omega: f64,
    pub p: f64,
    pub q: f64,
}

impl CertificateParams {
    pub fn new(omega: f64, p: f64, q: f64) -> Result<Self> {
        if ![omega, p, q].iter().all(|x| x.is_finite()) {
            return Err(invalid("omega, p and q must be finite"));
        }
        Ok(Self { omega, p, q })
    }

    pub fn from_model(params: &PlantedPartitionParams) -> Result<Self> {
        Self::new(params.omega()?, params.p(), params.q())
    }
}

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct CertificateOptions {
    /// Overrides the default choice of `c`.
    pub c: Option<f64>,
    /// Overrides `L = log n / log log n` in `eps1`.
    pub nu_slack: Option<f64>,
}

/// `log n / log log n`, floored at its minimum value `e` (attained near n = 15)
/// so that tiny graphs get a positive slack.
pub fn nu_slack(n: usize) -> f64 {
    let ln = (n as f64).ln();
    if n < 16 {
        std::f64::consts::E
    } else {
        ln / ln.ln()
    }
}

#[derive(Debug, Clone)]
pub struct DualCertificate {
    pub params: CertificateParams,
    pub c: f64,
    pub eps1: f64,
    pub eps2: f64,
    /// Per vertex.
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub gamma_prime: Vec<f64>,
    pub gamma: Vec<f64>,
    pub nu: Vec<f64>,
    /// Per community.
    pub alpha_bar: Vec<f64>,
    pub beta_bar: Vec<f64>,
    pub kappa: Vec<f64>,
    pub delta: Vec<f64>,
    /// `r_table[v][j] = R_vj`; the entry for `v`'s own community is 0.
    pub r_table: Vec<Vec<f64>>,
    /// `t[i][j] = T_ij`, zero on the diagonal.
    pub t: Vec<Vec<f64>>,
    pub gamma_matrix: DMatrix<f64>,
    pub lambda: DMatrix<f64>,
    /// Non-fatal construction problems (clamped kappa, empty intervals, T <= 0).
    pub issues: Vec<String>,
}

/// One pass of the construction at fixed slacks.
struct Pass {
    alpha: Vec<f64>,
    beta: Vec<f64>,
    alpha_bar: Vec<f64>,
    beta_bar: Vec<f64>,
    kappa: Vec<f64>,
    gamma_prime: Vec<f64>,
    delta: Vec<f64>,
    issues: Vec<String>,
}

fn two_smallest(sizes: &[usize]) -> (f64, f64) {
    let mut s = sizes.to_vec();
    s.sort_unstable();
    (s[0] as f64, s[1] as f64)
}

fn run_pass(
    sizes: &[usize],
    labels: &PartitionLabels,
    deg: &[Vec<usize>],
    prm: &CertificateParams,
    c: f64,
    eps1: f64,
    eps2: f64,
) -> Pass {
    let n = labels.n();
    let r = sizes.len();
    let w = prm.omega;
    let mut issues = Vec::new();

    let mut alpha = vec![0.0; n];
    let mut beta = vec![0.0; n];
    for v in 0..n {
        let i = labels.label(v);
        let si = sizes[i] as f64;
        alpha[v] = w * (si - 1.0) - deg[v][i] as f64 + eps1;
        beta[v] = (0..r)
            .filter(|&j| j != i)
            .map(|j| w * sizes[j] as f64 - deg[v][j] as f64)
            .fold(f64::INFINITY, f64::min)
            - eps2;
    }

    let mut alpha_bar = vec![0.0; r];
    let mut beta_bar = vec![0.0; r];
    let mut kappa = vec![0.0; r];
    for i in 0..r {
        let si = sizes[i] as f64;
        let s_other = (0..r)
            .filter(|&j| j != i)
            .map(|j| sizes[j])
            .min()
            .unwrap_or(0) as f64;
        alpha_bar[i] = (w - prm.p) * si * (si - 1.0) + si * eps1;
        beta_bar[i] = (w - prm.q) * si * s_other - si * eps2;
        let den = beta_bar[i] - alpha_bar[i];
        let raw = (c - alpha_bar[i]) / den;
        kappa[i] = if !(den > 0.0) || !raw.is_finite() {
            issues.push(format!("community {i}: degenerate kappa denominator {den}"));
            0.5
        } else if !(0.0..=1.0).contains(&raw) {
            issues.push(format!("community {i}: kappa {raw} clamped to [0, 1]"));
            raw.clamp(0.0, 1.0)
        } else {
            raw
        };
    }

    let mut gamma_prime = vec![0.0; n];
    let mut empty = 0;
    for v in 0..n {
        let k = kappa[labels.label(v)];
        gamma_prime[v] = if alpha[v] <= beta[v] {
            (1.0 - k) * alpha[v] + k * beta[v]
        } else {
            empty += 1;
            0.5 * (alpha[v] + beta[v])
        };
    }
    if empty > 0 {
        issues.push(format!("{empty} vertices with empty interval"));
    }

    let mut totals = vec![0.0; r];
    for v in 0..n {
        totals[labels.label(v)] += gamma_prime[v];
    }
    let delta = (0..r).map(|i| (c - totals[i]) / sizes[i] as f64).collect();
    Pass {
        alpha,
        beta,
        alpha_bar,
        beta_bar,
        kappa,
        gamma_prime,
        delta,
        issues,
    }
}

fn check_inputs(g: &Graph, truth: &PartitionLabels) -> Result<()> {
    if truth.n() != g.n() {
        return Err(Error::Dimension(format!(
            "labels cover {} vertices, graph has {}",
            truth.n(),
            g.n()
        )));
    }
    if truth.r() < 2 {
        return Err(invalid("a certificate needs at least two communities"));
    }
    Ok(())
}

fn resolve(
    g: &Graph,
    truth: &PartitionLabels,
    prm: &CertificateParams,
    opts: &CertificateOptions,
) -> Result<(f64, f64, f64, Pass, Vec<Vec<usize>>)> {
    check_inputs(g, truth)?;
    let sizes = truth.sizes();
    let deg = g.community_degrees(truth);
    let (s1, s2) = two_smallest(&sizes);
    let c = opts.c.unwrap_or(0.5 * (prm.omega - prm.q) * s1 * s2);
    let slack = opts.nu_slack.unwrap_or_else(|| nu_slack(g.n()));

    let first = run_pass(&sizes, truth, &deg, prm, c, prm.omega + slack, 1.0);
    let dmax = first.delta.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    let eps1 = dmax + prm.omega + slack;
    let eps2 = dmax + 1.0;
    let second = run_pass(&sizes, truth, &deg, prm, c, eps1, eps2);
    Ok((c, eps1, eps2, second, deg))
}

/// Per-vertex intervals `[alpha_v, beta_v]` at the final slacks.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IntervalMargins {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub eps1: f64,
    pub eps2: f64,
    /// `min_v beta_v - alpha_v` and a vertex attaining it.
    pub min_margin: f64,
    pub argmin: usize,
}

pub fn interval_margins(
    g: &Graph,
    truth: &PartitionLabels,
    prm: &CertificateParams,
    opts: &CertificateOptions,
) -> Result<IntervalMargins> {
    let (_, eps1, eps2, pass, _) = resolve(g, truth, prm, opts)?;
    let (argmin, min_margin) = pass
        .alpha
        .iter()
        .zip(&pass.beta)
        .map(|(a, b)| b - a)
        .enumerate()
        .fold((0, f64::INFINITY), |best, (v, m)| if m < best.1 { (v, m) } else { best });
    Ok(IntervalMargins {
        alpha: pass.alpha,
        beta: pass.beta,
        eps1,
        eps2,
        min_margin,
        argmin,
    })
}

/// `diag(nu) + omega J - A - Gamma`.
pub fn assemble_lambda(g: &Graph, nu: &[f64], gamma_matrix: &DMatrix<f64>, omega: f64) -> DMatrix<f64> {
    let n = g.n();
    let mut lambda = DMatrix::from_element(n, n, omega) - gamma_matrix;
    for (u, v) in g.edges() {
        lambda[(u, v)] -= 1.0;
        lambda[(v, u)] -= 1.0;
    }
    for v in 0..n {
        lambda[(v, v)] += nu[v];
    }
    lambda
}

pub fn build_certificate(
    g: &Graph,
    truth: &PartitionLabels,
    prm: &CertificateParams,
    opts: &CertificateOptions,
) -> Result<DualCertificate> {
    let (c, eps1, eps2, pass, deg) = resolve(g, truth, prm, opts)?;
    let n = g.n();
    let r = truth.r();
    let sizes = truth.sizes();
    let w = prm.omega;
    let mut issues = pass.issues;

    let gamma: Vec<f64> = (0..n)
        .map(|v| pass.gamma_prime[v] + pass.delta[truth.label(v)])
        .collect();
    let nu: Vec<f64> = (0..n)
        .map(|v| {
            let i = truth.label(v);
            deg[v][i] as f64 - w * sizes[i] as f64 + gamma[v]
        })
        .collect();
    let r_table: Vec<Vec<f64>> = (0..n)
        .map(|v| {
            (0..r)
                .map(|j| {
                    if j == truth.label(v) {
                        0.0
                    } else {
                        w * sizes[j] as f64 - deg[v][j] as f64 - gamma[v]
                    }
                })
                .collect()
        })
        .collect();
    let blocks = g.block_edge_counts(truth);
    let mut t = vec![vec![0.0; r]; r];
    for i in 0..r {
        for j in 0..r {
            if i != j {
                t[i][j] = w * (sizes[i] * sizes[j]) as f64 - blocks[i][j] as f64 - c;
            }
        }
    }
    for i in 0..r {
        for j in i + 1..r {
            if !(t[i][j] > 0.0) {
                issues.push(format!("T({i},{j}) = {} is not positive; block left at zero", t[i][j]));
            }
        }
    }

    let mut gamma_matrix = DMatrix::zeros(n, n);
    for u in 0..n {
        let i = truth.label(u);
        for v in 0..n {
            let j = truth.label(v);
            if i != j && t[i][j] > 0.0 {
                gamma_matrix[(u, v)] = r_table[u][j] * r_table[v][i] / t[i][j];
            }
        }
    }
    let lambda = assemble_lambda(g, &nu, &gamma_matrix, w);

    Ok(DualCertificate {
        params: *prm,
        c,
        eps1,
        eps2,
        alpha: pass.alpha,
        beta: pass.beta,
        gamma_prime: pass.gamma_prime,
        gamma,
        nu,
        alpha_bar: pass.alpha_bar,
        beta_bar: pass.beta_bar,
        kappa: pass.kappa,
        delta: pass.delta,
        r_table,
        t,
        gamma_matrix,
        lambda,
        issues,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertificateReport {
    pub n: usize,
    pub r: usize,
    pub intervals_nonempty: bool,
    /// `min_v beta_v - alpha_v`.
    pub interval_margin: f64,
    pub nu_min: f64,
    /// `log n / log log n`, the level `nu` is expected to clear.
    pub nu_target: f64,
    pub r_positive: bool,
    pub r_min: f64,
    pub gamma_diagonal_blocks_zero: bool,
    pub gamma_symmetric: bool,
    pub gamma_offdiagonal_positive: bool,
    pub gamma_offdiagonal_min: f64,
    /// `max_{i<j} ||Lambda (1_i - 1_j)||_inf`.
    pub kernel_residual: f64,
    pub kernel_tol: f64,
    /// Smallest eigenvalue of `Lambda` restricted to the complement of `span{1_i - 1_j}`.
    pub psd_margin: f64,
    pub psd_tol: f64,
    /// Primal minus dual objective at the planted partition.
    pub slackness_gap: f64,
    pub slackness_tol: f64,
    /// Largest entrywise difference between the stored `Lambda` and the one
    /// recomputed from `nu` and `Gamma` (verification uses the recomputed one).
    pub lambda_mismatch: f64,
    pub issues: Vec<String>,
    pub verified: bool,
}

/// Orthonormal basis of the complement of `span{1_i - 1_j}`: the normalized
/// `sum_i 1_i / s_i` followed by Helmert vectors summing to zero on each block.
pub fn complement_basis(truth: &PartitionLabels) -> DMatrix<f64> {
    let n = truth.n();
    let blocks = truth.blocks();
    let mut p = DMatrix::zeros(n, n - blocks.len() + 1);
    let norm = blocks.iter().map(|b| 1.0 / b.len() as f64).sum::<f64>().sqrt();
    for b in &blocks {
        for &v in b {
            p[(v, 0)] = 1.0 / (b.len() as f64 * norm);
        }
    }
    let mut col = 1;
    for b in &blocks {
        for k in 1..b.len() {
            let kf = k as f64;
            let scale = 1.0 / (kf * (kf + 1.0)).sqrt();
            for &v in &b[..k] {
                p[(v, col)] = scale;
            }
            p[(b[k], col)] = -kf * scale;
            col += 1;
        }
    }
    p
}

fn indicator(truth: &PartitionLabels, i: usize) -> DVector<f64> {
    DVector::from_fn(truth.n(), |v, _| if truth.label(v) == i { 1.0 } else { 0.0 })
}

pub fn verify_certificate(g: &Graph, truth: &PartitionLabels, cert: &DualCertificate) -> CertificateReport {
    let n = g.n();
    let r = truth.r();
    let mut issues = cert.issues.clone();
    let shape_ok = truth.n() == n
        && r >= 2
        && cert.nu.len() == n
        && cert.gamma_matrix.shape() == (n, n)
        && cert.lambda.shape() == (n, n)
        && cert.r_table.len() == n;
    if !shape_ok {
        issues.push("certificate dimensions do not match the instance".into());
        return CertificateReport {
            n,
            r,
            intervals_nonempty: false,
            interval_margin: f64::NAN,
            nu_min: f64::NAN,
            nu_target: nu_slack(n),
            r_positive: false,
            r_min: f64::NAN,
            gamma_diagonal_blocks_zero: false,
            gamma_symmetric: false,
            gamma_offdiagonal_positive: false,
            gamma_offdiagonal_min: f64::NAN,
            kernel_residual: f64::INFINITY,
            kernel_tol: 0.0,
            psd_margin: f64::NEG_INFINITY,
            psd_tol: 0.0,
            slackness_gap: f64::INFINITY,
            slackness_tol: 0.0,
            lambda_mismatch: f64::INFINITY,
            issues,
            verified: false,
        };
    }
    let w = cert.params.omega;
    let gm = &cert.gamma_matrix;
    let lambda = assemble_lambda(g, &cert.nu, gm, w);
    let lambda_mismatch = (&lambda - &cert.lambda).amax();

    let interval_margin = cert
        .alpha
        .iter()
        .zip(&cert.beta)
        .map(|(a, b)| b - a)
        .fold(f64::INFINITY, f64::min);
    let nu_min = cert.nu.iter().copied().fold(f64::INFINITY, f64::min);
    let r_min = (0..n)
        .flat_map(|v| {
            let own = truth.label(v);
            cert.r_table[v]
                .iter()
                .enumerate()
                .filter(move |(j, _)| *j != own)
                .map(|(_, &x)| x)
        })
        .fold(f64::INFINITY, f64::min);

    let mut diag_zero = true;
    let mut symmetric = true;
    let mut off_min = f64::INFINITY;
    for u in 0..n {
        for v in 0..n {
            let x = gm[(u, v)];
            if x != gm[(v, u)] {
                symmetric = false;
            }
            if truth.same_community(u, v) {
                diag_zero &= x == 0.0;
            } else {
                off_min = off_min.min(x);
            }
        }
    }
    // NaN entries must not pass
    let off_positive = off_min > 0.0 && gm.iter().all(|x| x.is_finite());

    let lambda_inf = lambda
        .row_iter()
        .map(|row| row.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let kernel_tol = 1e-8 * (1.0 + lambda_inf);
    let ind: Vec<DVector<f64>> = (0..r).map(|i| indicator(truth, i)).collect();
    let images: Vec<DVector<f64>> = ind.iter().map(|x| &lambda * x).collect();
    let mut kernel_residual = 0.0f64;
    for i in 0..r {
        for j in i + 1..r {
            kernel_residual = kernel_residual.max((&images[i] - &images[j]).amax());
        }
    }
    if !kernel_residual.is_finite() {
        kernel_residual = f64::INFINITY;
    }

    let spectral = lambda
        .clone()
        .symmetric_eigenvalues()
        .iter()
        .fold(0.0f64, |m, x| m.max(x.abs()));
    let psd_tol = 1e-8 * spectral;
    let basis = complement_basis(truth);
    let restricted = basis.transpose() * &lambda * &basis;
    let psd_margin = restricted
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);

    let sizes = truth.sizes();
    let xhat_sum: f64 = {
        let sq: usize = sizes.iter().map(|s| s * s).sum();
        (r as f64 * sq as f64 - (n * n) as f64) / (r as f64 - 1.0)
    };
    let intra = g.edges().filter(|&(u, v)| truth.same_community(u, v)).count() as f64;
    let inter = g.m() as f64 - intra;
    let primal = 2.0 * intra - 2.0 * inter / (r as f64 - 1.0) - w * xhat_sum;
    let dual = cert.nu.iter().sum::<f64>() + gm.sum() / (r as f64 - 1.0);
    let slackness_gap = (primal - dual).abs();
    let nf = n as f64;
    let slackness_tol = 1e-6 * nf * nf.ln().max(1.0);

    let kernel_ok = kernel_residual <= kernel_tol;
    let psd_ok = psd_margin > psd_tol;
    let slack_ok = slackness_gap <= slackness_tol;
    CertificateReport {
        n,
        r,
        intervals_nonempty: interval_margin >= 0.0,
        interval_margin,
        nu_min,
        nu_target: nu_slack(n),
        r_positive: r_min > 0.0,
        r_min,
        gamma_diagonal_blocks_zero: diag_zero,
        gamma_symmetric: symmetric,
        gamma_offdiagonal_positive: off_positive,
        gamma_offdiagonal_min: off_min,
        kernel_residual,
        kernel_tol,
        psd_margin,
        psd_tol,
        slackness_gap,
        slackness_tol,
        lambda_mismatch,
        issues,
        verified: diag_zero && symmetric && off_positive && kernel_ok && psd_ok && slack_ok,
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `|lhs - rhs| / max(|lhs|, |rhs|, 1)`.
    pub rel_error: f64,
    pub pass: bool,
}

const IDENTITY_TOL: f64 = 1e-9;

fn identity(name: impl Into<String>, lhs: f64, rhs: f64) -> IdentityCheck {
    let rel_error = (lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(1.0);
    IdentityCheck {
        name: name.into(),
        lhs,
        rhs,
        rel_error,
        pass: rel_error < IDENTITY_TOL,
    }
}

/// Numerical check of the closed-form identities the construction implies.
/// Vector-valued identities are reported at their worst coordinate.
pub fn algebraic_identity_suite(cert: &DualCertificate, g: &Graph, truth: &PartitionLabels) -> Vec<IdentityCheck> {
    let n = g.n();
    let r = truth.r();
    let sizes = truth.sizes();
    let inv_sum: f64 = sizes.iter().map(|&s| 1.0 / s as f64).sum();
    let lambda = &cert.lambda;
    let mut out = Vec::new();

    let y_raw = DVector::from_fn(n, |v, _| 1.0 / sizes[truth.label(v)] as f64);
    let y = &y_raw / inv_sum.sqrt();
    out.push(identity("y^T Lambda y = c sum 1/s_i", y.dot(&(lambda * &y)), cert.c * inv_sum));

    let ly = lambda * &y_raw;
    let worst = (0..n)
        .map(|v| identity(format!("(Lambda y')_{v} = gamma_{v} sum 1/s_i"), ly[v], cert.gamma[v] * inv_sum))
        .max_by(|a, b| a.rel_error.total_cmp(&b.rel_error));
    out.extend(worst);

    for i in 0..r {
        let total: f64 = truth.members(i).iter().map(|&v| cert.gamma[v]).sum();
        out.push(identity(format!("sum_(S_{i}) gamma = c"), total, cert.c));
    }

    for i in 0..r {
        for j in i + 1..r {
            let row: f64 = truth.members(i).iter().map(|&u| cert.r_table[u][j]).sum();
            let col: f64 = truth.members(j).iter().map(|&v| cert.r_table[v][i]).sum();
            out.push(identity(format!("sum_(S_{i}) R_uj = sum_(S_{j}) R_vi ({i},{j})"), row, col));
            out.push(identity(format!("T_{i}{j} = sum_(S_{i}) R_uj"), cert.t[i][j], row));
        }
    }

    let mut worst_rowsum: Option<IdentityCheck> = None;
    for u in 0..n {
        for j in 0..r {
            if j == truth.label(u) {
                continue;
            }
            let s: f64 = truth.members(j).iter().map(|&v| cert.gamma_matrix[(u, v)]).sum();
            let chk = identity(format!("sum_(S_{j}) Gamma_{u}v = R_{u}{j}"), s, cert.r_table[u][j]);
            if worst_rowsum.as_ref().is_none_or(|w| chk.rel_error > w.rel_error) {
                worst_rowsum = Some(chk);
            }
        }
    }
    out.extend(worst_rowsum);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_k4() -> (Graph, PartitionLabels) {
        let mut edges = Vec::new();
        for base in [0, 4] {
            for u in 0..4 {
                for v in u + 1..4 {
                    edges.push((base + u, base + v));
                }
            }
        }
        (
            Graph::from_edges(8, edges).unwrap(),
            PartitionLabels::from_sizes(&[4, 4]).unwrap(),
        )
    }

    #[test]
    fn disjoint_cliques_have_symmetric_certificate() {
        let (g, truth) = two_k4();
        let prm = CertificateParams::new(0.5, 1.0 - 1e-9, 1e-9).unwrap();
        let cert = build_certificate(&g, &truth, &prm, &CertificateOptions::default()).unwrap();
        // symmetry: gamma' identical within communities, delta equal across them
        for v in 1..4 {
            assert!((cert.gamma_prime[v] - cert.gamma_prime[0]).abs() < 1e-12);
            assert!((cert.gamma_prime[4 + v] - cert.gamma_prime[4]).abs() < 1e-12);
        }
        assert!((cert.delta[0] - cert.delta[1]).abs() < 1e-12);
        let report = verify_certificate(&g, &truth, &cert);
        assert!(report.kernel_residual < 1e-8, "{report:?}");
        assert_eq!(report.lambda_mismatch, 0.0);
    }

    #[test]
    fn complement_basis_is_orthonormal_and_orthogonal_to_differences() {
        let truth = PartitionLabels::new(vec![0, 1, 2, 0, 2, 2, 1, 0, 0], 3).unwrap();
        let p = complement_basis(&truth);
        assert_eq!(p.ncols(), 9 - 3 + 1);
        let gram = p.transpose() * &p;
        assert!((gram - DMatrix::identity(7, 7)).amax() < 1e-12);
        let d = indicator(&truth, 0) - indicator(&truth, 2);
        assert!((p.transpose() * d).amax() < 1e-12);
    }

    #[test]
    fn interval_margin_on_ideal_graph_is_exact() {
        let (g, truth) = two_k4();
        let prm = CertificateParams::new(0.5, 0.9, 0.1).unwrap();
        let m = interval_margins(&g, &truth, &prm, &CertificateOptions::default()).unwrap();
        // omega s_j - omega (s_i - 1) + E(v,i) - eps1 - eps2 with E(v,i) = 3
        let want = 0.5 * 4.0 - 0.5 * 3.0 + 3.0 - m.eps1 - m.eps2;
        assert!((m.min_margin - want).abs() < 1e-12);
    }

    #[test]
    fn corrupted_certificates_fail() {
        let (g, truth) = two_k4();
        let prm = CertificateParams::new(0.5, 1.0 - 1e-9, 1e-9).unwrap();
        let cert = build_certificate(&g, &truth, &prm, &CertificateOptions::default()).unwrap();
        let mut bad = cert.clone();
        bad.gamma_matrix[(0, 5)] = -1.0;
        bad.gamma_matrix[(5, 0)] = -1.0;
        assert!(!verify_certificate(&g, &truth, &bad).gamma_offdiagonal_positive);
        let mut bad = cert.clone();
        bad.nu[3] += 1.0;
        let rep = verify_certificate(&g, &truth, &bad);
        assert!(rep.kernel_residual > rep.kernel_tol && !rep.verified);
    }

    #[test]
    fn wrong_sizes_are_rejected() {
        let (g, _) = two_k4();
        let truth = PartitionLabels::from_sizes(&[3, 3]).unwrap();
        let prm = CertificateParams::new(0.5, 0.9, 0.1).unwrap();
        assert!(build_certificate(&g, &truth, &prm, &CertificateOptions::default()).is_err());
        let one = PartitionLabels::from_sizes(&[8]);
        if let Ok(one) = one {
            assert!(build_certificate(&g, &one, &prm, &CertificateOptions::default()).is_err());
        }
    }

    #[test]
    fn slack_floor() {
        assert_eq!(nu_slack(5), std::f64::consts::E);
        assert!(nu_slack(16) > std::f64::consts::E);
        assert!((nu_slack(1000) - 1000f64.ln() / 1000f64.ln().ln()).abs() < 1e-15);
    }
}
