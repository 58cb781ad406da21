//! Detector test statistics.
//!
//! The mean-adaptive family (`*_nmc`) jointly estimates the clutter mean from
//! the test vector and training set; its canonical forms are closed functions
//! of the quadratic forms `q1`, `q2`. The matrix forms evaluate the original
//! estimator-substitution expressions directly and exist as permanent
//! cross-checks of the algebraic reductions. The conventional trio whitens by
//! the raw (uncentered) training scatter and serves as the zero-mean-design
//! baseline.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{add_outer, dot_re, hermitianize, CMatrix, CVector, CholeskyHerm};
use crate::stats::{compute_sufficient_stats, estimate_alpha, SufficientStats};

/// Every statistic this crate can evaluate, one function per variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DetectorKind {
    /// Mean-adaptive subspace GLRT, canonical form.
    SglrtNmc,
    /// Mean-adaptive subspace Rao test, canonical form.
    SraoNmc,
    /// Mean-adaptive subspace matched filter (Wald test), canonical form.
    SamfNmc,
    /// Mean-adaptive gradient test.
    GradientNmc,
    /// Mean-adaptive Durbin test (matrix route; coincides with the Rao test).
    DurbinNmc,
    /// Conventional subspace GLRT, zero-mean design.
    Sglrt,
    /// Conventional subspace matched filter, zero-mean design.
    Samf,
    /// Conventional subspace Rao test, zero-mean design.
    Srao,
    /// Rank-1 mean-adaptive GLRT (requires p = 1).
    GlrtNmcRank1,
}

impl DetectorKind {
    pub const ALL: [DetectorKind; 9] = [
        DetectorKind::SglrtNmc,
        DetectorKind::SraoNmc,
        DetectorKind::SamfNmc,
        DetectorKind::GradientNmc,
        DetectorKind::DurbinNmc,
        DetectorKind::Sglrt,
        DetectorKind::Samf,
        DetectorKind::Srao,
        DetectorKind::GlrtNmcRank1,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            DetectorKind::SglrtNmc => "sglrt-nmc",
            DetectorKind::SraoNmc => "srao-nmc",
            DetectorKind::SamfNmc => "samf-nmc",
            DetectorKind::GradientNmc => "gradient-nmc",
            DetectorKind::DurbinNmc => "durbin-nmc",
            DetectorKind::Sglrt => "sglrt",
            DetectorKind::Samf => "samf",
            DetectorKind::Srao => "srao",
            DetectorKind::GlrtNmcRank1 => "glrt-nmc-rank1",
        }
    }

    /// True for statistics assembled from `SufficientStats`.
    pub fn uses_sufficient_stats(&self) -> bool {
        matches!(
            self,
            DetectorKind::SglrtNmc
                | DetectorKind::SraoNmc
                | DetectorKind::SamfNmc
                | DetectorKind::GradientNmc
                | DetectorKind::GlrtNmcRank1
        )
    }

    /// True for the zero-mean-design trio.
    pub fn is_conventional(&self) -> bool {
        matches!(
            self,
            DetectorKind::Sglrt | DetectorKind::Samf | DetectorKind::Srao
        )
    }

    /// True for every mean-adaptive statistic (translation invariant family).
    pub fn is_mean_adaptive(&self) -> bool {
        !self.is_conventional()
    }
}

impl fmt::Display for DetectorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DetectorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DetectorKind::ALL
            .iter()
            .find(|k| k.name() == s)
            .copied()
            .ok_or_else(|| {
                Error::Parse(format!(
                    "unknown detector '{s}'; expected one of: {}",
                    DetectorKind::ALL.map(|k| k.name()).join(", ")
                ))
            })
    }
}

/// Mean-adaptive subspace GLRT, canonical form `q2 / (1 + q1 - q2)`.
pub fn sglrt_nmc(s: &SufficientStats) -> f64 {
    s.q2 / (1.0 + s.q1 - s.q2)
}

/// Mean-adaptive subspace Rao test, canonical form
/// `q2 / ((1 + q1)(1 + q1 - q2))`. Bounded in `[0, 1)`.
pub fn srao_nmc(s: &SufficientStats) -> f64 {
    s.q2 / ((1.0 + s.q1) * (1.0 + s.q1 - s.q2))
}

/// Mean-adaptive subspace matched filter (Wald test), canonical form `q2`.
pub fn samf_nmc(s: &SufficientStats) -> f64 {
    s.q2
}

/// Mean-adaptive gradient test `q2 / (1 + q1)`. Bounded in `[0, 1)`.
pub fn gradient_nmc(s: &SufficientStats) -> f64 {
    s.q2 / (1.0 + s.q1)
}

fn deviation_from_joint_mean(x: &CVector, training: &CMatrix) -> (CVector, f64) {
    let l = training.ncols() as f64;
    let mut sum = x.clone();
    for j in 0..training.ncols() {
        sum += training.column(j);
    }
    let mu0 = sum / Complex64::new(l + 1.0, 0.0);
    (x - mu0, l)
}

fn scatter_about(training: &CMatrix, center: &CVector) -> CMatrix {
    let mut s = CMatrix::zeros(training.nrows(), training.nrows());
    for j in 0..training.ncols() {
        let d = training.column(j) - center;
        add_outer(&mut s, &d, 1.0);
    }
    hermitianize(&s)
}

/// Quadratic form `d^H M^{-1} A (A^H M^{-1} A)^{-1} A^H M^{-1} d` given a
/// factorization of `M`.
fn projected_form(chol: &CholeskyHerm, d: &CVector, a: &CMatrix) -> Result<f64> {
    let mi_d = chol.solve_vec(d);
    let mi_a = chol.solve_mat(a);
    let gram = hermitianize(&(a.adjoint() * mi_a));
    let gram_chol = CholeskyHerm::factor(&gram)
        .map_err(|_| Error::RankDeficient("basis is rank deficient under the scatter".into()))?;
    let w = a.adjoint() * mi_d;
    Ok(dot_re(&w, &gram_chol.solve_vec(&w)).max(0.0))
}

/// Mean-adaptive GLRT in its original determinant-ratio form.
///
/// Always at least 1; exceeding a threshold `1 + eta` is equivalent to the
/// canonical form exceeding `eta` (the two are related by `t = 1 + t'`).
pub fn sglrt_nmc_full(x: &CVector, training: &CMatrix, a: &CMatrix) -> Result<f64> {
    let (d0, l) = deviation_from_joint_mean(x, training);
    let mu0 = x - &d0;
    let s0 = scatter_about(training, &mu0);
    let mut s2 = s0.clone();
    add_outer(&mut s2, &d0, -1.0 / l);
    let s2 = hermitianize(&s2);

    let s0_chol = CholeskyHerm::factor(&s0)
        .map_err(|_| Error::DegenerateData("training scatter is singular".into()))?;
    let s2_chol = CholeskyHerm::factor(&s2)
        .map_err(|_| Error::DegenerateData("deflated scatter is singular".into()))?;

    let num_quad = 1.0 + dot_re(&d0, &s0_chol.solve_vec(&d0));
    let den_quad = 1.0
        + (l + 1.0) / l
            * (dot_re(&d0, &s2_chol.solve_vec(&d0)) - projected_form(&s2_chol, &d0, a)?);
    Ok((s0_chol.log_det() - s2_chol.log_det()).exp() * num_quad / den_quad)
}

/// Mean-adaptive Rao test evaluated from its matrix expression.
///
/// The raw expression whitens by `d0 d0^H + S0` and carries a constant
/// `l / (l + 1)` relative to the canonical scale; the result is normalized so
/// both routes produce identical values.
pub fn srao_nmc_full(x: &CVector, training: &CMatrix, a: &CMatrix) -> Result<f64> {
    let (d0, l) = deviation_from_joint_mean(x, training);
    let mu0 = x - &d0;
    let mut m = scatter_about(training, &mu0);
    add_outer(&mut m, &d0, 1.0);
    let m = hermitianize(&m);
    let m_chol = CholeskyHerm::factor(&m)
        .map_err(|_| Error::DegenerateData("augmented scatter is singular".into()))?;
    Ok(projected_form(&m_chol, &d0, a)? * (l + 1.0) / l)
}

/// Mean-adaptive Durbin test.
///
/// Whitens by the null-hypothesis covariance estimate `(d0 d0^H + S0)/(l+1)`;
/// the raw value is `l` times the canonical Rao statistic and is normalized
/// here, making the coincidence with the Rao test an exact identity.
pub fn durbin_nmc(x: &CVector, training: &CMatrix, a: &CMatrix) -> Result<f64> {
    let (d0, l) = deviation_from_joint_mean(x, training);
    let mu0 = x - &d0;
    let mut m = scatter_about(training, &mu0);
    add_outer(&mut m, &d0, 1.0);
    let r0 = hermitianize(&m) / Complex64::new(l + 1.0, 0.0);
    let r0_chol = CholeskyHerm::factor(&r0).map_err(|_| {
        Error::DegenerateData("null-hypothesis covariance estimate is singular".into())
    })?;
    Ok(projected_form(&r0_chol, &d0, a)? / l)
}

/// Alternative-hypothesis covariance estimate used by the matrix-form Wald
/// test: `(S2 + u v^H) / (l + 1)` built from the amplitude estimate.
fn samf_r1_estimate(stats: &SufficientStats, x: &CVector, a: &CMatrix) -> Result<CMatrix> {
    let l = stats.l as f64;
    let d0 = x - &stats.mu_hat0;
    let alpha = estimate_alpha(stats, a)?;
    let a_alpha = a * alpha;
    let u = &d0 * Complex64::new((l + 1.0) / l, 0.0) - &a_alpha;
    let v = &d0 - &a_alpha * Complex64::new(l / (l + 1.0), 0.0);
    let mut r1 = stats.s2.clone();
    // u v^H is Hermitian because v = (l/(l+1)) u exactly.
    r1 += &u * v.adjoint();
    Ok(hermitianize(&r1) / Complex64::new(l + 1.0, 0.0))
}

/// Mean-adaptive matched filter (Wald test) in its matrix form.
///
/// Evaluates the estimator-substitution expression including the
/// `A^H R1^{-1} A` inner factor; the raw value is `l` times the canonical
/// `q2` and is normalized here.
pub fn samf_nmc_full(x: &CVector, training: &CMatrix, a: &CMatrix) -> Result<f64> {
    let stats = compute_sufficient_stats(x, training, a)?;
    let l = stats.l as f64;
    let r1 = samf_r1_estimate(&stats, x, a)?;
    let r1_chol = CholeskyHerm::factor(&r1).map_err(|_| {
        Error::DegenerateData("alternative-hypothesis covariance estimate is singular".into())
    })?;

    let d0 = x - &stats.mu_hat0;
    let s2_chol = stats.s2_chol();
    let s2i_a = s2_chol.solve_mat(a);
    let gram = hermitianize(&(a.adjoint() * s2i_a));
    let gram_chol = CholeskyHerm::factor(&gram)
        .map_err(|_| Error::RankDeficient("basis is rank deficient under S2^{-1}".into()))?;
    let w = a.adjoint() * s2_chol.solve_vec(&d0);
    let mid = gram_chol.solve_vec(&w);
    let inner = hermitianize(&(a.adjoint() * r1_chol.solve_mat(a)));
    let raw = dot_re(&mid, &(&inner * &mid)).max(0.0);
    Ok(raw / l)
}

/// Conventional zero-mean-design trio `(t_sglrt, t_samf, t_srao)`.
///
/// Whitens the test vector by the raw training scatter `sum_l x_l x_l^H`
/// with no mean removal; not translation invariant.
pub fn conventional_detectors(
    x: &CVector,
    training: &CMatrix,
    a: &CMatrix,
) -> Result<(f64, f64, f64)> {
    let n = x.len();
    if training.nrows() != n || a.nrows() != n {
        return Err(Error::DimensionMismatch(format!(
            "x has {} rows, training is {}x{}, basis is {}x{}",
            n,
            training.nrows(),
            training.ncols(),
            a.nrows(),
            a.ncols()
        )));
    }
    if training.ncols() < n {
        return Err(Error::DegenerateData(format!(
            "raw scatter needs l >= n training vectors, got l = {}, n = {n}",
            training.ncols()
        )));
    }
    let mut s = CMatrix::zeros(n, n);
    for j in 0..training.ncols() {
        let col = training.column(j).into_owned();
        add_outer(&mut s, &col, 1.0);
    }
    let s = hermitianize(&s);
    let s_chol = CholeskyHerm::factor(&s)
        .map_err(|_| Error::DegenerateData("raw training scatter is singular".into()))?;
    let q1 = dot_re(x, &s_chol.solve_vec(x)).max(0.0);
    let q2 = projected_form(&s_chol, x, a)?.min(q1);
    let t_sglrt = q2 / (1.0 + q1 - q2);
    let t_samf = q2;
    let t_srao = q2 / ((1.0 + q1 - q2) * (1.0 + q1));
    Ok((t_sglrt, t_samf, t_srao))
}

/// Rank-1 mean-adaptive GLRT `|a^H S2^{-1} z|^2` normalized by
/// `(a^H S2^{-1} a)(1 + z^H S2^{-1} z)`, computed by half-whitening with the
/// lower Cholesky factor (the statistic is invariant to which square root of
/// `S2` is used).
pub fn glrt_nmc_rank1(s: &SufficientStats, a: &CVector) -> Result<f64> {
    if a.len() != s.z.len() {
        return Err(Error::DimensionMismatch(format!(
            "steering has {} rows, stats were computed for n = {}",
            a.len(),
            s.z.len()
        )));
    }
    if a.iter().all(|v| v.norm_sqr() == 0.0) {
        return Err(Error::Domain("steering vector must be nonzero".into()));
    }
    let chol = s.s2_chol();
    let aw = chol.forward_vec(a);
    let zw = chol.forward_vec(&s.z);
    let cross = aw.dotc(&zw).norm_sqr();
    Ok(cross / (aw.norm_squared() * (1.0 + zw.norm_squared())))
}

fn canonical_value(kind: DetectorKind, s: &SufficientStats, a: &CMatrix) -> Result<f64> {
    match kind {
        DetectorKind::SglrtNmc => Ok(sglrt_nmc(s)),
        DetectorKind::SraoNmc => Ok(srao_nmc(s)),
        DetectorKind::SamfNmc => Ok(samf_nmc(s)),
        DetectorKind::GradientNmc => Ok(gradient_nmc(s)),
        DetectorKind::GlrtNmcRank1 => {
            if a.ncols() != 1 {
                return Err(Error::Domain(format!(
                    "rank-1 statistic requires p = 1, got p = {}",
                    a.ncols()
                )));
            }
            glrt_nmc_rank1(s, &a.column(0).into_owned())
        }
        _ => unreachable!("not a sufficient-stats detector"),
    }
}

/// Evaluates one statistic from raw data.
pub fn evaluate(kind: DetectorKind, x: &CVector, training: &CMatrix, a: &CMatrix) -> Result<f64> {
    Ok(evaluate_batch(&[kind], x, training, a)?[0])
}

/// Evaluates several statistics from one dataset, sharing the sufficient
/// statistics and the conventional whitening across kinds.
pub fn evaluate_batch(
    kinds: &[DetectorKind],
    x: &CVector,
    training: &CMatrix,
    a: &CMatrix,
) -> Result<Vec<f64>> {
    let stats = if kinds.iter().any(|k| k.uses_sufficient_stats()) {
        Some(compute_sufficient_stats(x, training, a)?)
    } else {
        None
    };
    let conv = if kinds.iter().any(|k| k.is_conventional()) {
        Some(conventional_detectors(x, training, a)?)
    } else {
        None
    };
    kinds
        .iter()
        .map(|&kind| match kind {
            DetectorKind::DurbinNmc => durbin_nmc(x, training, a),
            DetectorKind::Sglrt => Ok(conv.as_ref().unwrap().0),
            DetectorKind::Samf => Ok(conv.as_ref().unwrap().1),
            DetectorKind::Srao => Ok(conv.as_ref().unwrap().2),
            _ => canonical_value(kind, stats.as_ref().unwrap(), a),
        })
        .collect()
}
