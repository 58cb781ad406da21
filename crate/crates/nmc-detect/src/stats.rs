//! Shared sufficient statistics for detection with an unknown clutter mean.
//!
//! Every detector statistic in this crate is assembled from the same pieces:
//! the joint mean estimate over the test vector and training set, two scatter
//! matrices, a rescaled test deviation `z`, and the quadratic forms
//! `q1 = z^H S2^{-1} z` and `q2` (its projection onto the whitened subspace).

use crate::error::{Error, Result};
use crate::linalg::{add_outer, dot_re, hermitianize, CMatrix, CVector, CholeskyHerm};

/// Sufficient statistics of one test vector plus its training set.
///
/// Invariants: `s0` and `s2` are exactly Hermitian; `0 <= q2 <= q1`;
/// `beta = 1 / (1 + q1 - q2)` lies in `(0, 1]`.
#[derive(Debug, Clone)]
pub struct SufficientStats {
    /// Number of training vectors.
    pub l: usize,
    /// Joint mean estimate `(x + sum_l x_l) / (l + 1)`.
    pub mu_hat0: CVector,
    /// Training scatter about `mu_hat0`.
    pub s0: CMatrix,
    /// `s0` minus the rank-one test-vector deflation `(1/l) d0 d0^H`.
    pub s2: CMatrix,
    /// Rescaled deviation `sqrt((l+1)/l) * (x - mu_hat0)`.
    pub z: CVector,
    /// `z^H S2^{-1} z`.
    pub q1: f64,
    /// `z^H S2^{-1} A (A^H S2^{-1} A)^{-1} A^H S2^{-1} z`.
    pub q2: f64,
    /// Loss factor `1 / (1 + q1 - q2)`.
    pub beta: f64,
    s2_chol: CholeskyHerm,
    gram_chol: CholeskyHerm,
    ah_s2i_z: CVector,
}

impl SufficientStats {
    /// Cholesky factor of `s2`, reusable for whitening-based statistics.
    pub fn s2_chol(&self) -> &CholeskyHerm {
        &self.s2_chol
    }
}

/// Computes the sufficient statistics of `(x, training)` for subspace `a`.
///
/// Requires at least `n + 1` training vectors; the deflated scatter `s2`
/// is rank deficient below that, which is reported as degenerate data.
pub fn compute_sufficient_stats(
    x: &CVector,
    training: &CMatrix,
    a: &CMatrix,
) -> Result<SufficientStats> {
    let n = x.len();
    let l = training.ncols();
    let p = a.ncols();
    if training.nrows() != n || a.nrows() != n {
        return Err(Error::DimensionMismatch(format!(
            "x has {} rows, training is {}x{}, basis is {}x{}",
            n,
            training.nrows(),
            l,
            a.nrows(),
            p
        )));
    }
    if p == 0 || p >= n {
        return Err(Error::Domain(format!(
            "subspace dimension must satisfy 0 < p < n, got p = {p}, n = {n}"
        )));
    }
    if l < n + 1 {
        return Err(Error::DegenerateData(format!(
            "deflated scatter needs l >= n + 1 training vectors, got l = {l}, n = {n}"
        )));
    }
    let lf = l as f64;

    let mut sum = training.column(0).into_owned();
    for j in 1..l {
        sum += training.column(j);
    }
    let mu_hat0 = (x + &sum) / Complex64::new(lf + 1.0, 0.0);

    let mut s0 = CMatrix::zeros(n, n);
    for j in 0..l {
        let d = training.column(j) - &mu_hat0;
        add_outer(&mut s0, &d, 1.0);
    }
    let s0 = hermitianize(&s0);

    let d0 = x - &mu_hat0;
    let mut s2 = s0.clone();
    add_outer(&mut s2, &d0, -1.0 / lf);
    let s2 = hermitianize(&s2);

    let z = &d0 * Complex64::new(((lf + 1.0) / lf).sqrt(), 0.0);

    let s2_chol = CholeskyHerm::factor(&s2).map_err(|_| {
        Error::DegenerateData(format!(
            "deflated scatter is numerically singular; need l >= n + 1 informative \
             training vectors (l = {l}, n = {n})"
        ))
    })?;
    let s2i_z = s2_chol.solve_vec(&z);
    let q1 = dot_re(&z, &s2i_z).max(0.0);

    let s2i_a = s2_chol.solve_mat(a);
    let gram = hermitianize(&(a.adjoint() * s2i_a));
    let gram_chol = CholeskyHerm::factor(&gram)
        .map_err(|_| Error::RankDeficient("basis is rank deficient under S2^{-1}".into()))?;
    let ah_s2i_z = a.adjoint() * s2i_z;
    let q2 = dot_re(&ah_s2i_z, &gram_chol.solve_vec(&ah_s2i_z)).clamp(0.0, q1);

    let beta = 1.0 / (1.0 + q1 - q2);
    Ok(SufficientStats {
        l,
        mu_hat0,
        s0,
        s2,
        z,
        q1,
        q2,
        beta,
        s2_chol,
        gram_chol,
        ah_s2i_z,
    })
}

use num_complex::Complex64;

/// Training-only route to the deflated scatter:
/// `sum_l x_l x_l^H - (1/l)(sum_l x_l)(sum_l x_l)^H`.
///
/// Kept as an independent formula for cross-checking `SufficientStats::s2`;
/// also `(l - 1)` times the usual sample covariance of the training set.
pub fn compute_s2_direct(training: &CMatrix) -> Result<CMatrix> {
    let n = training.nrows();
    let l = training.ncols();
    if l < 2 {
        return Err(Error::Domain(format!(
            "direct scatter needs at least 2 training vectors, got {l}"
        )));
    }
    let mut acc = CMatrix::zeros(n, n);
    let mut sum = CVector::zeros(n);
    for j in 0..l {
        let col = training.column(j).into_owned();
        add_outer(&mut acc, &col, 1.0);
        sum += col;
    }
    add_outer(&mut acc, &sum, -1.0 / l as f64);
    Ok(hermitianize(&acc))
}

/// Subspace amplitude estimate `((l+1)/l) (A^H S2^{-1} A)^{-1} A^H S2^{-1} (x - mu_hat0)`.
pub fn estimate_alpha(stats: &SufficientStats, a: &CMatrix) -> Result<CVector> {
    if a.ncols() != stats.ah_s2i_z.len() || a.nrows() != stats.z.len() {
        return Err(Error::DimensionMismatch(format!(
            "basis is {}x{} but stats were computed for n = {}, p = {}",
            a.nrows(),
            a.ncols(),
            stats.z.len(),
            stats.ah_s2i_z.len()
        )));
    }
    let lf = stats.l as f64;
    // z = sqrt((l+1)/l) (x - mu_hat0), so the prefactor reduces to sqrt((l+1)/l).
    let scale = Complex64::new(((lf + 1.0) / lf).sqrt(), 0.0);
    Ok(stats.gram_chol.solve_vec(&stats.ah_s2i_z) * scale)
}
