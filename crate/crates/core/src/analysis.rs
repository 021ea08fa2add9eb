//! Discrete stability constant and condition estimates.
//!
//! The stability constant is the smallest eigenvalue `λ₁` of the pencil
//! `B x = λ N x` on the interior dofs. It is computed as the largest
//! eigenvalue `1/λ₁` of `B⁻¹N`, which is self-adjoint in the `N` inner
//! product, with a restarted Lanczos-type Rayleigh–Ritz iteration: the
//! search space is expanded by one solve with `B` per step, fully
//! reorthogonalized, and compressed to the leading Ritz vectors when it gets
//! too large. Plain inverse iteration converges with ratio `λ₁/λ₂`, which
//! approaches one for large penalties where the low spectrum clusters near 1.

use faer::{Mat, Side};

use crate::linsolve::SpdSolver;
use crate::sparse::{dot, CsrMatrix};
use crate::{Error, Result};

/// Eigenvalue iteration settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOptions {
    /// Relative tolerance on the eigenvalue, via the residual bound
    /// `‖r‖²/gap`, or on the Ritz residual itself.
    pub tol: f64,
    /// Maximum number of solves with `B`.
    pub max_solves: usize,
    /// Search-space dimension that triggers a restart.
    pub max_dim: usize,
    /// Ritz vectors kept at a restart.
    pub keep: usize,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions {
            tol: 1e-8,
            max_solves: 500,
            max_dim: 40,
            keep: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenResult {
    pub lambda1: f64,
    /// `‖B⁻¹N y − θ y‖_N / θ` for the returned Ritz pair (`θ = 1/λ₁`).
    pub residual: f64,
    pub solves: usize,
    /// The eigenvector, normalized in the `N` norm.
    pub vector: Vec<f64>,
}

/// Smallest eigenvalue of `B x = λ N x` for restricted (interior) matrices.
pub fn principal_eigenvalue(b: &CsrMatrix, n: &CsrMatrix) -> Result<EigenResult> {
    let solver = factorize_shifted(b)?;
    principal_eigenvalue_with(n, &solver, EigenOptions::default())
}

/// Cholesky of `B`, retried once with a shift `10⁻¹² tr(B)` if `B` is
/// numerically singular.
pub fn factorize_shifted(b: &CsrMatrix) -> Result<SpdSolver> {
    match SpdSolver::cholesky(b) {
        Ok(s) => Ok(s),
        Err(Error::NotPositiveDefinite(msg)) => {
            let trace: f64 = b.diagonal().iter().sum();
            let shift = 1e-12 * trace;
            log::warn!("B is not numerically positive definite ({msg}); retrying with shift {shift:e}");
            let id = CsrMatrix::from_triplets(b.nrows, b.ncols, (0..b.nrows).map(|i| (i, i, 1.0)).collect());
            SpdSolver::cholesky(&b.linear_combination(1.0, &id, shift))
        }
        Err(e) => Err(e),
    }
}

/// [`principal_eigenvalue`] with a prefactored `B`.
pub fn principal_eigenvalue_with(n: &CsrMatrix, b_solver: &SpdSolver, opts: EigenOptions) -> Result<EigenResult> {
    let dim = n.nrows;
    if dim == 0 {
        return Err(Error::InsufficientData("no interior degrees of freedom".into()));
    }
    // basis V (N-orthonormal), Z = N V, W = B⁻¹ N V
    let mut v: Vec<Vec<f64>> = Vec::new();
    let mut z: Vec<Vec<f64>> = Vec::new();
    let mut w: Vec<Vec<f64>> = Vec::new();
    let mut solves = 0;
    let mut best = (f64::NAN, f64::INFINITY, Vec::new());
    let mut next = vec![1.0; dim];
    let mut fallback_used = false;

    loop {
        // N-orthogonalize the candidate (twice, for stability) and append
        let before = n_norm(n, &next);
        for _ in 0..2 {
            for (vj, zj) in v.iter().zip(&z) {
                let c = dot(zj, &next);
                for (x, y) in next.iter_mut().zip(vj) {
                    *x -= c * y;
                }
            }
        }
        let after = n_norm(n, &next);
        if !(after > 1e-10 * before) || v.len() >= dim {
            // the search space is invariant: the Ritz values are exact
            if best.1 <= opts.tol || v.len() >= dim || fallback_used {
                return finish(best, solves);
            }
            fallback_used = true;
            next = (0..dim).map(|i| ((i as f64 + 1.0) * 0.7548776662).fract() - 0.5).collect();
            continue;
        }
        next.iter_mut().for_each(|x| *x /= after);
        let zn = n.matvec(&next);
        let wn = b_solver.solve(&zn)?;
        solves += 1;
        v.push(next);
        z.push(zn);
        w.push(wn);

        let (theta, s_all) = ritz(&z, &w)?;
        let m = v.len();
        let top = m - 1;
        let y = combine(&v, &s_all, top);
        let ty = combine(&w, &s_all, top);
        let r: Vec<f64> = ty.iter().zip(&y).map(|(a, b)| a - theta[top] * b).collect();
        let residual = n_norm(n, &r) / theta[top];
        // |θ − μ| ≤ ‖r‖²/gap; the gap to the next Ritz value stands in for
        // the gap to the rest of the spectrum
        let value_error = if top > 0 {
            residual * residual * theta[top] / (theta[top] - theta[top - 1]).max(f64::MIN_POSITIVE)
        } else {
            residual
        };
        log::trace!("solve {solves}: theta {:.12} residual {residual:.3e} value error {value_error:.3e}", theta[top]);
        if residual <= opts.tol || value_error <= opts.tol {
            return finish((1.0 / theta[top], residual, y), solves);
        }
        if solves >= opts.max_solves {
            return Err(Error::EigenNoConvergence {
                iterations: solves,
                residual,
            });
        }

        // the Ritz residual spans the next Krylov direction, also across
        // restarts (thick restart)
        best = (1.0 / theta[top], residual, y);
        next = r;

        if m >= opts.max_dim {
            // compress to the leading Ritz vectors
            let keep = opts.keep.min(m);
            let cols: Vec<usize> = (m - keep..m).collect();
            let nv: Vec<Vec<f64>> = cols.iter().map(|&c| combine(&v, &s_all, c)).collect();
            let nz: Vec<Vec<f64>> = cols.iter().map(|&c| combine(&z, &s_all, c)).collect();
            let nw: Vec<Vec<f64>> = cols.iter().map(|&c| combine(&w, &s_all, c)).collect();
            v = nv;
            z = nz;
            w = nw;
        }
    }
}

fn finish(best: (f64, f64, Vec<f64>), solves: usize) -> Result<EigenResult> {
    let (lambda1, residual, vector) = best;
    if !lambda1.is_finite() {
        return Err(Error::EigenNoConvergence {
            iterations: solves,
            residual,
        });
    }
    Ok(EigenResult {
        lambda1,
        residual,
        solves,
        vector,
    })
}

fn n_norm(n: &CsrMatrix, x: &[f64]) -> f64 {
    dot(x, &n.matvec(x)).max(0.0).sqrt()
}

/// Ritz values (ascending) and vectors of `H = Zᵀ W`.
fn ritz(z: &[Vec<f64>], w: &[Vec<f64>]) -> Result<(Vec<f64>, Mat<f64>)> {
    let m = z.len();
    let mut h = Mat::<f64>::zeros(m, m);
    for i in 0..m {
        for j in 0..=i {
            let hij = 0.5 * (dot(&z[i], &w[j]) + dot(&z[j], &w[i]));
            h[(i, j)] = hij;
            h[(j, i)] = hij;
        }
    }
    let evd = h
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| Error::EigenNoConvergence {
            iterations: m,
            residual: f64::NAN,
        })?;
    let s = evd.S().column_vector();
    let values = (0..m).map(|i| s[i]).collect();
    Ok((values, evd.U().to_owned()))
}

fn combine(basis: &[Vec<f64>], coeffs: &Mat<f64>, col: usize) -> Vec<f64> {
    let mut out = vec![0.0; basis[0].len()];
    for (k, b) in basis.iter().enumerate() {
        let c = coeffs[(k, col)];
        for (o, x) in out.iter_mut().zip(b) {
            *o += c * x;
        }
    }
    out
}

/// Lower bound for `‖A⁻¹‖₁` of a symmetric matrix from solves only
/// (Hager's method with Higham's refinements).
pub fn inverse_norm1_estimate(dim: usize, solve: impl Fn(&[f64]) -> Result<Vec<f64>>) -> Result<f64> {
    if dim == 0 {
        return Ok(0.0);
    }
    let norm1 = |x: &[f64]| x.iter().map(|v| v.abs()).sum::<f64>();
    let sign = |x: &[f64]| x.iter().map(|&v| if v >= 0.0 { 1.0 } else { -1.0 }).collect::<Vec<f64>>();
    let argmax = |x: &[f64]| {
        let mut j = 0;
        for i in 1..x.len() {
            if x[i].abs() > x[j].abs() {
                j = i;
            }
        }
        j
    };

    let y = solve(&vec![1.0 / dim as f64; dim])?;
    let mut est = norm1(&y);
    if dim == 1 {
        return Ok(est);
    }
    let mut xi = sign(&y);
    let mut x = solve(&xi)?;
    let mut j = argmax(&x);
    for _ in 0..4 {
        let mut e = vec![0.0; dim];
        e[j] = 1.0;
        let y = solve(&e)?;
        let old = est;
        est = norm1(&y);
        let new_xi = sign(&y);
        if new_xi == xi || est <= old {
            est = est.max(old);
            break;
        }
        xi = new_xi;
        x = solve(&xi)?;
        let jlast = j;
        j = argmax(&x);
        if x[jlast].abs() == x[j].abs() {
            break;
        }
    }
    let alt: Vec<f64> = (0..dim)
        .map(|i| {
            let s = if i % 2 == 0 { 1.0 } else { -1.0 };
            s * (1.0 + i as f64 / (dim - 1) as f64)
        })
        .collect();
    let y = solve(&alt)?;
    Ok(est.max(2.0 * norm1(&y) / (3.0 * dim as f64)))
}

/// Lower bound of the 1-norm condition number `‖B‖₁‖B⁻¹‖₁`.
pub fn condition_estimate_1norm(b: &CsrMatrix) -> Result<f64> {
    let solver = SpdSolver::cholesky(b)?;
    condition_estimate_with(b, &solver)
}

pub fn condition_estimate_with(b: &CsrMatrix, solver: &SpdSolver) -> Result<f64> {
    Ok(b.norm1() * inverse_norm1_estimate(b.nrows, |x| solver.solve(x))?)
}

/// `λ₁`, the guaranteed bound `κ` and the condition estimate of one system.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub lambda1: f64,
    pub kappa: f64,
    pub cond1: f64,
}

pub fn stability_report(b: &CsrMatrix, n: &CsrMatrix, kappa: f64) -> Result<StabilityReport> {
    let solver = factorize_shifted(b)?;
    let eig = principal_eigenvalue_with(n, &solver, EigenOptions::default())?;
    let cond1 = condition_estimate_with(b, &solver)?;
    Ok(StabilityReport {
        lambda1: eig.lambda1,
        kappa,
        cond1,
    })
}
