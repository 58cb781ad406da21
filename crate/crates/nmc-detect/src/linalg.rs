//! Complex linear-algebra helpers shared by the statistics and synthesis code.
//!
//! All detector math funnels through one Cholesky factorization per matrix
//! (factor once, solve many), so this module wraps a Hermitian Cholesky with
//! an explicit scale-free pivot tolerance instead of relying on the silent
//! failure mode of a generic factorization.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;
pub type RMatrix = DMatrix<f64>;

/// Relative pivot floor: a diagonal pivot below `tol * max_initial_diagonal`
/// marks the matrix as numerically singular.
pub const CHOL_PIVOT_REL_TOL: f64 = 1e-12;

/// Lower-triangular Cholesky factor of a Hermitian positive definite matrix.
#[derive(Debug, Clone)]
pub struct CholeskyHerm {
    l: CMatrix,
}

impl CholeskyHerm {
    /// Factors `m = L L^H`. `m` is read as Hermitian: only the lower triangle
    /// and the real part of the diagonal are used.
    pub fn factor(m: &CMatrix) -> Result<Self> {
        let n = m.nrows();
        if m.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "Cholesky requires a square matrix, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let max_diag = (0..n).map(|i| m[(i, i)].re).fold(0.0f64, f64::max);
        if max_diag <= 0.0 || !max_diag.is_finite() {
            return Err(Error::NotPositiveDefinite(format!(
                "largest diagonal entry {max_diag:e} is not positive and finite"
            )));
        }
        let floor = CHOL_PIVOT_REL_TOL * max_diag;
        let mut l = CMatrix::zeros(n, n);
        for j in 0..n {
            let mut d = m[(j, j)].re;
            for k in 0..j {
                d -= l[(j, k)].norm_sqr();
            }
            if d <= floor {
                return Err(Error::NotPositiveDefinite(format!(
                    "pivot {d:e} at index {j} fell below the scale-free floor {floor:e}"
                )));
            }
            let djj = d.sqrt();
            l[(j, j)] = Complex64::new(djj, 0.0);
            for i in (j + 1)..n {
                let mut s = m[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)].conj();
                }
                l[(i, j)] = s / djj;
            }
        }
        Ok(Self { l })
    }

    pub fn dim(&self) -> usize {
        self.l.nrows()
    }

    /// Solves `m y = b` by forward then back substitution.
    pub fn solve_vec(&self, b: &CVector) -> CVector {
        let mut y = self.forward_vec(b);
        self.backward_in_place(&mut y);
        y
    }

    /// Solves `m Y = B` column by column.
    pub fn solve_mat(&self, b: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(b.nrows(), b.ncols());
        for j in 0..b.ncols() {
            let col = CVector::from_column_slice(b.column(j).as_slice());
            out.set_column(j, &self.solve_vec(&col));
        }
        out
    }

    /// Applies `L^{-1}` (one whitening half-step): returns `y` with `L y = b`.
    pub fn forward_vec(&self, b: &CVector) -> CVector {
        let n = self.dim();
        let mut y = b.clone();
        for i in 0..n {
            for k in 0..i {
                let t = self.l[(i, k)] * y[k];
                y[i] -= t;
            }
            y[i] /= self.l[(i, i)].re;
        }
        y
    }

    /// Column-wise `L^{-1} b`.
    pub fn forward_mat(&self, b: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(b.nrows(), b.ncols());
        for j in 0..b.ncols() {
            let col = b.column(j).into_owned();
            out.set_column(j, &self.forward_vec(&col));
        }
        out
    }

    fn backward_in_place(&self, y: &mut CVector) {
        let n = self.dim();
        for i in (0..n).rev() {
            for k in (i + 1)..n {
                let t = self.l[(k, i)].conj() * y[k];
                y[i] -= t;
            }
            y[i] /= self.l[(i, i)].re;
        }
    }

    /// log det(m) from the factor diagonal.
    pub fn log_det(&self) -> f64 {
        (0..self.dim()).map(|i| self.l[(i, i)].re.ln()).sum::<f64>() * 2.0
    }

    /// Lower factor access (whitening against this matrix uses `L^{-1} v`).
    pub fn l(&self) -> &CMatrix {
        &self.l
    }
}

/// `re(a^H b)` (Hermitian quadratic forms are real up to roundoff).
pub fn dot_re(a: &CVector, b: &CVector) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}

/// `a^H b` as a complex scalar.
pub fn dot_c(a: &CVector, b: &CVector) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Symmetrizes roundoff away: returns `(m + m^H)/2`.
pub fn hermitianize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Rank-one Hermitian update `m += scale * v v^H` touching the full matrix.
pub fn add_outer(m: &mut CMatrix, v: &CVector, scale: f64) {
    let n = v.len();
    for j in 0..n {
        let vj = v[j].conj() * scale;
        for i in 0..n {
            let t = v[i] * vj;
            m[(i, j)] += t;
        }
    }
}

/// Frobenius norm of the difference, relative to the norm of `a`.
pub fn rel_frobenius(a: &CMatrix, b: &CMatrix) -> f64 {
    let d = (a - b).norm();
    let n = a.norm();
    if n == 0.0 {
        d
    } else {
        d / n
    }
}
