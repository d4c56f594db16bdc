//! ADMM for the centered-partition SDPs.
//!
//! The feasible set is split as `PSD ∩ K`, where
//! `K = {X : X_uu = 1, lo <= X_uv <= 1, [sum X = b]}`. The upper bound 1 is
//! implied by the other constraints and keeps `K` compact. Both projections are
//! exact: the PSD one by a full symmetric eigendecomposition, the one onto `K`
//! by clipping after a scalar shift of the off-diagonal entries chosen so the
//! optional sum constraint holds (a monotone piecewise-linear equation solved
//! by safeguarded Newton steps).
//!
//! Iteration (scaled form, over-relaxation `a`):
//!
//! ```text
//! X+ = P_psd(Z - U + C / rho)
//! H  = a X+ + (1 - a) Z
//! Z+ = P_K(H + U)
//! U+ = U + H - Z+
//! ```
//!
//! Residuals are relative: `||X - Z|| / max(||X||, ||Z||, 1)` and
//! `rho ||Z+ - Z|| / max(||C||, rho ||U||, 1)` in Frobenius norm.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::SdpProblem;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SolveOptions {
    /// Convergence threshold on both relative residuals.
    pub tol: f64,
    pub max_iters: usize,
    /// Initial penalty; `None` picks `max(||C||_F / n, 0.1)`.
    pub rho: Option<f64>,
    pub relaxation: f64,
    /// Iterations between penalty updates (0 disables adaptation).
    pub adapt_interval: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            max_iters: 20_000,
            rho: None,
            relaxation: 1.6,
            adapt_interval: 20,
        }
    }
}

/// Iterate state that can seed another solve of a problem of the same size.
#[derive(Debug, Clone)]
pub struct WarmStart {
    pub z: DMatrix<f64>,
    pub u: DMatrix<f64>,
    pub rho: f64,
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    /// Returned iterate; satisfies the diagonal, entrywise and sum constraints exactly.
    pub x: DMatrix<f64>,
    pub objective: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Smallest eigenvalue of `x`.
    pub min_eigenvalue: f64,
    pub state: WarmStart,
}

/// Eigendecomposition-based projection onto the PSD cone.
pub(crate) fn project_psd(m: DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    let eig = SymmetricEigen::new(m);
    let keep: Vec<usize> = (0..n).filter(|&k| eig.eigenvalues[k] > 0.0).collect();
    let mut w = DMatrix::zeros(n, keep.len());
    for (c, &k) in keep.iter().enumerate() {
        let s = eig.eigenvalues[k].sqrt();
        for row in 0..n {
            w[(row, c)] = eig.eigenvectors[(row, k)] * s;
        }
    }
    &w * w.transpose()
}

/// Projection onto `K`. `shift_guess` carries the previous shift between calls.
struct BoxProjector {
    lo: f64,
    hi: f64,
    /// Target for the sum over the strict upper triangle.
    upper_sum: Option<f64>,
    shift: f64,
    buf: Vec<f64>,
}

impl BoxProjector {
    fn new(prob: &SdpProblem) -> Self {
        let n = prob.n();
        Self {
            lo: prob.lower_bound(),
            hi: 1.0,
            upper_sum: prob.j_target().map(|b| 0.5 * (b - n as f64)),
            shift: 0.0,
            buf: Vec::with_capacity(n * (n - 1) / 2),
        }
    }

    fn clipped_sum(&self, shift: f64) -> (f64, usize) {
        let mut total = 0.0;
        let mut free = 0usize;
        for &v in &self.buf {
            let t = v - shift;
            if t <= self.lo {
                total += self.lo;
            } else if t >= self.hi {
                total += self.hi;
            } else {
                total += t;
                free += 1;
            }
        }
        (total, free)
    }

    fn solve_shift(&mut self, target: f64) -> f64 {
        let (mut a, mut b) = self
            .buf
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(mn, mx), &v| (mn.min(v), mx.max(v)));
        // h(a) = P * hi >= target >= P * lo = h(b)
        a -= self.hi;
        b -= self.lo;
        let tol = 1e-12 * target.abs().max(1.0);
        let mut s = self.shift.clamp(a, b);
        for _ in 0..200 {
            let (h, free) = self.clipped_sum(s);
            let gap = h - target;
            if gap.abs() <= tol {
                return s;
            }
            if gap > 0.0 {
                a = s;
            } else {
                b = s;
            }
            let newton = if free > 0 { s + gap / free as f64 } else { f64::NAN };
            s = if newton > a && newton < b {
                newton
            } else {
                0.5 * (a + b)
            };
            if b - a < 1e-15 {
                break;
            }
        }
        s
    }

    fn project(&mut self, m: &mut DMatrix<f64>) {
        let n = m.nrows();
        if let Some(target) = self.upper_sum {
            self.buf.clear();
            for v in 1..n {
                for u in 0..v {
                    self.buf.push(0.5 * (m[(u, v)] + m[(v, u)]));
                }
            }
            self.shift = self.solve_shift(target);
        } else {
            self.shift = 0.0;
        }
        for v in 0..n {
            m[(v, v)] = 1.0;
            for u in 0..v {
                let t = (0.5 * (m[(u, v)] + m[(v, u)]) - self.shift).clamp(self.lo, self.hi);
                m[(u, v)] = t;
                m[(v, u)] = t;
            }
        }
    }
}

/// Initial iterate: the projection of the identity onto `K`.
fn initial_state(prob: &SdpProblem, proj: &mut BoxProjector) -> WarmStart {
    let n = prob.n();
    let mut z = DMatrix::identity(n, n);
    proj.project(&mut z);
    WarmStart {
        z,
        u: DMatrix::zeros(n, n),
        rho: initial_rho(prob.objective().norm(), n),
    }
}

fn initial_rho(c_norm: f64, n: usize) -> f64 {
    (c_norm / n as f64).max(0.1)
}

pub fn solve(prob: &SdpProblem, opts: &SolveOptions) -> SdpSolution {
    solve_with_observer(prob, opts, None, |_, _| {})
}

/// Solve with an optional warm start; `observer(iteration, z)` sees every
/// constraint-feasible iterate.
pub fn solve_with_observer<F>(
    prob: &SdpProblem,
    opts: &SolveOptions,
    warm: Option<&WarmStart>,
    mut observer: F,
) -> SdpSolution
where
    F: FnMut(usize, &DMatrix<f64>),
{
    let n = prob.n();
    let c = prob.objective();
    let c_norm = c.norm();
    let mut proj = BoxProjector::new(prob);
    let mut state = match warm {
        Some(w) if w.z.nrows() == n && w.u.nrows() == n && w.rho > 0.0 => {
            // keep the unscaled dual, restart the penalty
            let mut z = w.z.clone();
            proj.project(&mut z);
            let rho = initial_rho(c_norm, n);
            WarmStart {
                z,
                u: &w.u * (w.rho / rho),
                rho,
            }
        }
        _ => initial_state(prob, &mut proj),
    };
    if let Some(rho) = opts.rho {
        state.rho = rho;
    }
    let alpha = opts.relaxation;

    let mut best: Option<(f64, DMatrix<f64>, f64, f64, usize)> = None;
    let mut primal = f64::INFINITY;
    let mut dual = f64::INFINITY;
    let mut iterations = 0;
    let mut converged = false;

    for it in 1..=opts.max_iters {
        iterations = it;
        let WarmStart { z, u, rho } = &mut state;
        let x = project_psd(&*z - &*u + c / *rho);
        let h = &x * alpha + &*z * (1.0 - alpha);
        let mut z_next = &h + &*u;
        proj.project(&mut z_next);
        *u += &h - &z_next;

        let x_norm = x.norm();
        let z_norm = z_next.norm();
        primal = (&x - &z_next).norm() / x_norm.max(z_norm).max(1.0);
        dual = *rho * (&z_next - &*z).norm() / c_norm.max(*rho * u.norm()).max(1.0);
        *z = z_next;
        observer(it, z);

        let score = primal.max(dual);
        if best.as_ref().is_none_or(|b| score < b.0) {
            best = Some((score, z.clone(), primal, dual, it));
        }
        if score < opts.tol {
            converged = true;
            break;
        }
        if opts.adapt_interval > 0 && it % opts.adapt_interval == 0 && primal > 0.0 && dual > 0.0 {
            let ratio = (primal / dual).sqrt();
            if !(0.2..=5.0).contains(&ratio) {
                let new_rho = (*rho * ratio).clamp(1e-6, 1e6);
                *u *= *rho / new_rho;
                *rho = new_rho;
            }
        }
    }

    let (x, primal_residual, dual_residual) = if converged {
        (state.z.clone(), primal, dual)
    } else {
        match best {
            Some((_, z, p, d, _)) => (z, p, d),
            None => (state.z.clone(), primal, dual),
        }
    };
    let min_eigenvalue = x
        .clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    SdpSolution {
        objective: prob.evaluate(&x),
        x,
        primal_residual,
        dual_residual,
        iterations,
        converged,
        min_eigenvalue,
        state,
    }
}
