//! Symmetric positive definite solvers: sparse Cholesky (default) and
//! Jacobi-preconditioned conjugate gradients (fallback for large systems).

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::Llt;
use faer::sparse::{SparseColMat, Triplet};
use faer::{Mat, Side};

use crate::sparse::{dot, norm2, CsrMatrix};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    #[default]
    Direct,
    Cg,
}

/// A reusable solver for one SPD matrix.
pub enum SpdSolver {
    Cholesky { llt: Llt<usize, f64>, n: usize },
    Cg { matrix: CsrMatrix, tol: f64 },
}

impl SpdSolver {
    pub fn new(matrix: &CsrMatrix, kind: SolverKind) -> Result<Self> {
        match kind {
            SolverKind::Direct => Self::cholesky(matrix),
            SolverKind::Cg => Ok(SpdSolver::Cg {
                matrix: matrix.clone(),
                tol: 1e-10,
            }),
        }
    }

    pub fn cholesky(matrix: &CsrMatrix) -> Result<Self> {
        let n = matrix.nrows;
        let triplets: Vec<_> = matrix.triplets().map(|(i, j, v)| Triplet::new(i, j, v)).collect();
        let a = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &triplets)
            .map_err(|e| Error::NotPositiveDefinite(format!("{e:?}")))?;
        let llt = a
            .sp_cholesky(Side::Lower)
            .map_err(|e| Error::NotPositiveDefinite(format!("Cholesky factorization failed: {e:?}")))?;
        Ok(SpdSolver::Cholesky { llt, n })
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        match self {
            SpdSolver::Cholesky { llt, n } => {
                assert_eq!(b.len(), *n);
                let mut x = Mat::<f64>::from_fn(*n, 1, |i, _| b[i]);
                llt.solve_in_place(x.as_mut());
                let out: Vec<f64> = (0..*n).map(|i| x[(i, 0)]).collect();
                if out.iter().any(|v| !v.is_finite()) {
                    return Err(Error::NotPositiveDefinite("non-finite solution".into()));
                }
                Ok(out)
            }
            SpdSolver::Cg { matrix, tol } => conjugate_gradient(matrix, b, *tol, 10 * matrix.nrows.max(1)),
        }
    }
}

/// Jacobi-preconditioned conjugate gradients; stops at `‖r‖ ≤ tol·‖b‖`.
pub fn conjugate_gradient(a: &CsrMatrix, b: &[f64], tol: f64, max_iter: usize) -> Result<Vec<f64>> {
    let n = b.len();
    let diag = a.diagonal();
    if diag.iter().any(|&d| !(d > 0.0)) {
        return Err(Error::NotPositiveDefinite("non-positive diagonal entry".into()));
    }
    let bnorm = norm2(b);
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return Ok(x);
    }
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&diag).map(|(r, d)| r / d).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    for _ in 0..max_iter {
        let ap = a.matvec(&p);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(Error::NotPositiveDefinite("negative curvature in conjugate gradients".into()));
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        if norm2(&r) <= tol * bnorm {
            return Ok(x);
        }
        for i in 0..n {
            z[i] = r[i] / diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::NoConvergence {
        iterations: max_iter,
        residual: norm2(&r) / bnorm,
    })
}
