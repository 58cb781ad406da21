//! Scenario description for subspace detection in nonzero-mean clutter.
//!
//! A scenario fixes the dimensions `(n, p, l)`, the clutter covariance `R`,
//! the clutter mean `mu`, the signal subspace basis `A` (n x p, full column
//! rank), and the target signature `p0` injected under H1. All derived
//! quantities (SCR, alignment angles, noncentrality split) are computed in
//! the whitened domain `R^{-1/2}`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot_re, CMatrix, CVector, CholeskyHerm};

/// Condition-number bound above which a basis is treated as rank deficient.
const RANK_COND_BOUND: f64 = 1e8;

/// Steering vector `[1, e^{-j2πf}, …, e^{-j2π(n-1)f}]` for a normalized
/// frequency `f` (cycles per sample, typically in `[-0.5, 0.5)`).
pub fn steering_vector(n: usize, f: f64) -> CVector {
    CVector::from_fn(n, |i, _| {
        Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * f * i as f64)
    })
}

/// Exponential-decay Toeplitz covariance: `R[i, j] = eps^|i - j|`.
///
/// Requires `eps` in `[0, 1)` so the result is positive definite for any `n`.
pub fn build_toeplitz_covariance(n: usize, eps: f64) -> Result<CMatrix> {
    if n == 0 {
        return Err(Error::Domain(
            "covariance dimension must be positive".into(),
        ));
    }
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::Domain(format!(
            "toeplitz decay must lie in [0, 1), got {eps}"
        )));
    }
    Ok(CMatrix::from_fn(n, n, |i, j| {
        Complex64::new(eps.powi((i as i64 - j as i64).unsigned_abs() as i32), 0.0)
    }))
}

/// Squared cosine of the whitened angle between `p0` and the column span of `a`.
///
/// With `w = R^{-1/2} p0` and `B = R^{-1/2} a`, returns
/// `w^H P_B w / w^H w` where `P_B` projects onto span(B). Lies in `[0, 1]`;
/// equals 1 iff `p0` is in span(a) and 0 iff `p0` is `R^{-1}`-orthogonal to it.
pub fn compute_cos2_theta(p0: &CVector, a: &CMatrix, r: &CMatrix) -> Result<f64> {
    check_vector_nonzero(p0, "p0")?;
    if a.nrows() != p0.len() || r.nrows() != p0.len() {
        return Err(Error::DimensionMismatch(format!(
            "p0 has {} rows, a is {}x{}, r is {}x{}",
            p0.len(),
            a.nrows(),
            a.ncols(),
            r.nrows(),
            r.ncols()
        )));
    }
    let chol = CholeskyHerm::factor(r)?;
    let ri_p0 = chol.solve_vec(p0);
    let ri_a = chol.solve_mat(a);
    let total = dot_re(p0, &ri_p0);
    if total <= 0.0 {
        return Err(Error::Domain("p0 has no energy under R^{-1}".into()));
    }
    // Gram of the whitened basis; solve the p x p normal equations.
    let gram = a.adjoint() * &ri_a;
    let gram_chol = CholeskyHerm::factor(&gram).map_err(|_| {
        Error::RankDeficient("subspace basis is rank deficient under R^{-1}".into())
    })?;
    let proj_coeff = gram_chol.solve_vec(&(a.adjoint() * &ri_p0));
    let in_span = dot_re(&(a.adjoint() * ri_p0), &proj_coeff);
    Ok((in_span / total).clamp(0.0, 1.0))
}

/// Signal-to-clutter ratio `(l / (l + 1)) * p0^H R^{-1} p0`.
///
/// The `l / (l + 1)` factor accounts for the energy absorbed by joint mean
/// estimation from the test vector plus `l` training vectors.
pub fn compute_scr(p0: &CVector, r: &CMatrix, l: usize) -> Result<f64> {
    check_vector_nonzero(p0, "p0")?;
    if l == 0 {
        return Err(Error::Domain("training count l must be positive".into()));
    }
    let chol = CholeskyHerm::factor(r)?;
    let quad = dot_re(p0, &chol.solve_vec(p0));
    Ok(l as f64 / (l as f64 + 1.0) * quad)
}

/// Whitened mean energy `mu^H R^{-1} mu`.
pub fn compute_xi(mu: &CVector, r: &CMatrix) -> Result<f64> {
    if mu.len() != r.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "mu has {} rows, r is {}x{}",
            mu.len(),
            r.nrows(),
            r.ncols()
        )));
    }
    let chol = CholeskyHerm::factor(r)?;
    Ok(dot_re(mu, &chol.solve_vec(mu)))
}

/// Squared cosine of the whitened angle between the clutter mean and `p0`:
/// `|mu^H R^{-1} p0|^2 / ((mu^H R^{-1} mu)(p0^H R^{-1} p0))`.
pub fn compute_cos2_phi(p0: &CVector, mu: &CVector, r: &CMatrix) -> Result<f64> {
    check_vector_nonzero(p0, "p0")?;
    check_vector_nonzero(mu, "mu")?;
    if p0.len() != mu.len() || r.nrows() != p0.len() {
        return Err(Error::DimensionMismatch(format!(
            "p0 has {} rows, mu has {} rows, r is {}x{}",
            p0.len(),
            mu.len(),
            r.nrows(),
            r.ncols()
        )));
    }
    let chol = CholeskyHerm::factor(r)?;
    let ri_p0 = chol.solve_vec(p0);
    let cross = mu.dotc(&ri_p0).norm_sqr();
    let mu_energy = dot_re(mu, &chol.solve_vec(mu));
    let p0_energy = dot_re(p0, &ri_p0);
    Ok((cross / (mu_energy * p0_energy)).clamp(0.0, 1.0))
}

/// Least-squares subspace coordinates of `p0`: `(a^H a)^{-1} a^H p0`.
///
/// Exact when `p0` lies in span(a); otherwise the Euclidean projection
/// coefficients.
pub fn subspace_coordinates(p0: &CVector, a: &CMatrix) -> Result<CVector> {
    if a.nrows() != p0.len() {
        return Err(Error::DimensionMismatch(format!(
            "p0 has {} rows, a is {}x{}",
            p0.len(),
            a.nrows(),
            a.ncols()
        )));
    }
    let gram = a.adjoint() * a;
    let chol = CholeskyHerm::factor(&gram)
        .map_err(|_| Error::RankDeficient("subspace basis is rank deficient".into()))?;
    Ok(chol.solve_vec(&(a.adjoint() * p0)))
}

fn check_vector_nonzero(v: &CVector, name: &str) -> Result<()> {
    if v.iter().all(|z| z.norm_sqr() == 0.0) {
        return Err(Error::Domain(format!("{name} must be nonzero")));
    }
    Ok(())
}

fn check_full_column_rank(a: &CMatrix) -> Result<()> {
    if a.ncols() == 0 || a.nrows() < a.ncols() {
        return Err(Error::RankDeficient(format!(
            "basis must be tall with at least one column, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    let gram = a.adjoint() * a;
    let eig = gram.symmetric_eigen();
    let mut min = f64::INFINITY;
    let mut max = 0.0f64;
    for &ev in eig.eigenvalues.iter() {
        min = min.min(ev);
        max = max.max(ev);
    }
    if min <= 0.0 || max / min > RANK_COND_BOUND * RANK_COND_BOUND {
        return Err(Error::RankDeficient(format!(
            "basis condition number exceeds {RANK_COND_BOUND:.0e}"
        )));
    }
    Ok(())
}

/// How the covariance is recorded on disk.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum CovarianceSpec {
    /// Exponential-decay Toeplitz parameterized by its one-lag correlation.
    Toeplitz { toeplitz_eps: f64 },
    /// Explicit Hermitian entries, row-major, each entry `[re, im]`.
    Entries { entries: Vec<Vec<[f64; 2]>> },
}

impl CovarianceSpec {
    pub fn build(&self, n: usize) -> Result<CMatrix> {
        match self {
            CovarianceSpec::Toeplitz { toeplitz_eps } => {
                build_toeplitz_covariance(n, *toeplitz_eps)
            }
            CovarianceSpec::Entries { entries } => {
                if entries.len() != n || entries.iter().any(|row| row.len() != n) {
                    return Err(Error::DimensionMismatch(format!(
                        "covariance entries must form an {n}x{n} matrix"
                    )));
                }
                Ok(CMatrix::from_fn(n, n, |i, j| {
                    Complex64::new(entries[i][j][0], entries[i][j][1])
                }))
            }
        }
    }

    fn from_matrix(r: &CMatrix) -> Self {
        CovarianceSpec::Entries {
            entries: (0..r.nrows())
                .map(|i| {
                    (0..r.ncols())
                        .map(|j| [r[(i, j)].re, r[(i, j)].im])
                        .collect()
                })
                .collect(),
        }
    }
}

/// Complete detection scenario.
///
/// Invariants established at construction: `r` is Hermitian positive
/// definite, `a` is `n x p` with full column rank, `mu` and `p0` have length
/// `n`, and `l >= n` so the training covariance estimate is invertible.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub n: usize,
    pub p: usize,
    pub l: usize,
    pub r: CMatrix,
    pub mu: CVector,
    pub a: CMatrix,
    /// Signature injected under H1.
    pub p0: CVector,
    /// Subspace coordinates of `p0` (least squares; exact when in span).
    pub alpha: CVector,
    cov_spec: CovarianceSpec,
}

impl Scenario {
    /// Validates and assembles a scenario from explicit parts.
    pub fn new(l: usize, r: CMatrix, mu: CVector, a: CMatrix, p0: CVector) -> Result<Self> {
        let cov_spec = CovarianceSpec::from_matrix(&r);
        Self::with_spec(l, r, cov_spec, mu, a, p0)
    }

    /// Validates and assembles a scenario with a Toeplitz covariance.
    pub fn with_toeplitz(
        l: usize,
        n: usize,
        eps: f64,
        mu: CVector,
        a: CMatrix,
        p0: CVector,
    ) -> Result<Self> {
        let r = build_toeplitz_covariance(n, eps)?;
        Self::with_spec(
            l,
            r,
            CovarianceSpec::Toeplitz { toeplitz_eps: eps },
            mu,
            a,
            p0,
        )
    }

    fn with_spec(
        l: usize,
        r: CMatrix,
        cov_spec: CovarianceSpec,
        mu: CVector,
        a: CMatrix,
        p0: CVector,
    ) -> Result<Self> {
        let n = r.nrows();
        if r.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "covariance must be square, got {}x{}",
                r.nrows(),
                r.ncols()
            )));
        }
        if mu.len() != n || p0.len() != n || a.nrows() != n {
            return Err(Error::DimensionMismatch(format!(
                "mu ({}), p0 ({}) and basis rows ({}) must all equal n = {n}",
                mu.len(),
                p0.len(),
                a.nrows()
            )));
        }
        let p = a.ncols();
        if p == 0 || p >= n {
            return Err(Error::Domain(format!(
                "subspace dimension must satisfy 0 < p < n, got p = {p}, n = {n}"
            )));
        }
        if l < n {
            return Err(Error::Domain(format!(
                "need at least n training vectors for an invertible estimate, got l = {l} < n = {n}"
            )));
        }
        CholeskyHerm::factor(&r)?;
        check_full_column_rank(&a)?;
        check_vector_nonzero(&p0, "p0")?;
        let alpha = subspace_coordinates(&p0, &a)?;
        Ok(Scenario {
            n,
            p,
            l,
            r,
            mu,
            a,
            p0,
            alpha,
            cov_spec,
        })
    }

    pub fn metrics(&self) -> Result<ScenarioMetrics> {
        ScenarioMetrics::for_scenario(self)
    }

    pub fn cov_spec(&self) -> &CovarianceSpec {
        &self.cov_spec
    }

    pub fn to_json(&self) -> Result<String> {
        let file = ScenarioFile::from(self);
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ScenarioFile = serde_json::from_str(text)?;
        file.into_scenario()
    }

    pub fn write_json(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn read_json(path: &std::path::Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// Derived scenario quantities controlling detection performance.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct ScenarioMetrics {
    /// `(l / (l + 1)) * p0^H R^{-1} p0`.
    pub scr: f64,
    /// Whitened alignment of `p0` with the subspace, in `[0, 1]`.
    pub cos2_theta: f64,
    /// Whitened mean energy `mu^H R^{-1} mu`.
    pub xi: f64,
    /// Whitened alignment of `mu` with `p0`, in `[0, 1]`; 0 when `mu = 0`.
    pub cos2_phi: f64,
    /// In-subspace noncentrality `scr * cos2_theta`.
    pub rho_theta: f64,
    /// Out-of-subspace leakage `scr * (1 - cos2_theta)`.
    pub delta2: f64,
}

impl ScenarioMetrics {
    pub fn for_scenario(s: &Scenario) -> Result<Self> {
        let scr = compute_scr(&s.p0, &s.r, s.l)?;
        let cos2_theta = compute_cos2_theta(&s.p0, &s.a, &s.r)?;
        let xi = compute_xi(&s.mu, &s.r)?;
        let mu_is_zero = s.mu.iter().all(|z| z.norm_sqr() == 0.0);
        let cos2_phi = if mu_is_zero {
            0.0
        } else {
            compute_cos2_phi(&s.p0, &s.mu, &s.r)?
        };
        Ok(ScenarioMetrics {
            scr,
            cos2_theta,
            xi,
            cos2_phi,
            rho_theta: scr * cos2_theta,
            delta2: scr * (1.0 - cos2_theta),
        })
    }
}

/// On-disk layout: complex values as `[re, im]` pairs, matrices row-major.
#[derive(Serialize, Deserialize)]
struct ScenarioFile {
    n: usize,
    p: usize,
    l: usize,
    r: CovarianceSpec,
    mu: Vec<[f64; 2]>,
    a: Vec<Vec<[f64; 2]>>,
    p0: Vec<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha: Option<Vec<[f64; 2]>>,
}

fn vec_to_pairs(v: &CVector) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

fn pairs_to_vec(pairs: &[[f64; 2]]) -> CVector {
    CVector::from_iterator(
        pairs.len(),
        pairs.iter().map(|p| Complex64::new(p[0], p[1])),
    )
}

impl From<&Scenario> for ScenarioFile {
    fn from(s: &Scenario) -> Self {
        ScenarioFile {
            n: s.n,
            p: s.p,
            l: s.l,
            r: s.cov_spec.clone(),
            mu: vec_to_pairs(&s.mu),
            a: (0..s.n)
                .map(|i| (0..s.p).map(|j| [s.a[(i, j)].re, s.a[(i, j)].im]).collect())
                .collect(),
            p0: vec_to_pairs(&s.p0),
            alpha: Some(vec_to_pairs(&s.alpha)),
        }
    }
}

impl ScenarioFile {
    fn into_scenario(self) -> Result<Scenario> {
        if self.mu.len() != self.n || self.p0.len() != self.n || self.a.len() != self.n {
            return Err(Error::DimensionMismatch(
                "scenario file arrays disagree with declared n".into(),
            ));
        }
        if self.a.iter().any(|row| row.len() != self.p) {
            return Err(Error::DimensionMismatch(
                "scenario file basis rows disagree with declared p".into(),
            ));
        }
        let r = self.r.build(self.n)?;
        let a = CMatrix::from_fn(self.n, self.p, |i, j| {
            Complex64::new(self.a[i][j][0], self.a[i][j][1])
        });
        let scenario = Scenario::with_spec(
            self.l,
            r,
            self.r.clone(),
            pairs_to_vec(&self.mu),
            a,
            pairs_to_vec(&self.p0),
        )?;
        Ok(scenario)
    }
}


#[cfg(test)]
mod tests {
    use super::testgen::*;
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn toeplitz_zero_decay_is_identity() {
        let r = build_toeplitz_covariance(5, 0.0).unwrap();
        assert_eq!(r, CMatrix::identity(5, 5));
    }

    #[test]
    fn toeplitz_two_by_two() {
        let r = build_toeplitz_covariance(2, 0.95).unwrap();
        assert_eq!(r[(0, 0)], c(1.0, 0.0));
        assert_eq!(r[(0, 1)], c(0.95, 0.0));
        assert_eq!(r[(1, 0)], c(0.95, 0.0));
        assert_eq!(r[(1, 1)], c(1.0, 0.0));
    }

    #[test]
    fn toeplitz_is_positive_definite() {
        for &eps in &[0.0, 0.5, 0.95, 0.999] {
            let r = build_toeplitz_covariance(12, eps).unwrap();
            CholeskyHerm::factor(&r).unwrap();
        }
    }

    #[test]
    fn toeplitz_rejects_bad_decay() {
        assert!(build_toeplitz_covariance(4, 1.0).is_err());
        assert!(build_toeplitz_covariance(4, -0.1).is_err());
    }

    #[test]
    fn cos2_theta_in_span_is_one() {
        let mut rng = rng(11);
        for _ in 0..20 {
            let a = random_cmatrix(&mut rng, 12, 3);
            let r = random_hpd(&mut rng, 12);
            let alpha = random_cvector(&mut rng, 3);
            let p0 = &a * alpha;
            let v = compute_cos2_theta(&p0, &a, &r).unwrap();
            assert_relative_eq!(v, 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn cos2_theta_orthogonal_complement_is_zero() {
        // Build p0 R^{-1}-orthogonal to span(a): take w orthogonal to the
        // whitened basis columns and map back through R^{1/2}.
        let mut rng = rng(12);
        let a = random_cmatrix(&mut rng, 8, 2);
        let r = random_hpd(&mut rng, 8);
        let chol = CholeskyHerm::factor(&r).unwrap();
        let wb = chol.forward_mat(&a);
        // Project a random vector onto the orthogonal complement of wb.
        let w = random_cvector(&mut rng, 8);
        let gram = wb.adjoint() * &wb;
        let gram_chol = CholeskyHerm::factor(&gram).unwrap();
        let coeff = gram_chol.solve_vec(&(wb.adjoint() * &w));
        let w_perp = &w - &wb * coeff;
        // p0 = R^{1/2} w_perp => R^{-1/2} p0 = w_perp, orthogonal to wb.
        let p0 = chol.l() * w_perp;
        let v = compute_cos2_theta(&p0, &a, &r).unwrap();
        assert!(v < 1e-10, "expected zero alignment, got {v}");
    }

    #[test]
    fn cos2_theta_matches_explicit_projection() {
        // Independent oracle: form the whitened projector densely.
        let mut rng = rng(13);
        for _ in 0..10 {
            let a = random_cmatrix(&mut rng, 10, 3);
            let r = random_hpd(&mut rng, 10);
            let p0 = random_cvector(&mut rng, 10);
            let chol = CholeskyHerm::factor(&r).unwrap();
            let wb = chol.forward_mat(&a);
            let w = chol.forward_vec(&p0);
            let gram = wb.adjoint() * &wb;
            let gram_inv = CholeskyHerm::factor(&gram)
                .unwrap()
                .solve_mat(&CMatrix::identity(3, 3));
            let proj = &wb * gram_inv * wb.adjoint() * &w;
            let oracle = proj.norm_squared() / w.norm_squared();
            let v = compute_cos2_theta(&p0, &a, &r).unwrap();
            assert_relative_eq!(v, oracle, epsilon = 1e-10);
        }
    }

    #[test]
    fn cos2_theta_invariant_to_basis_change_and_scale() {
        let mut rng = rng(14);
        let a = random_cmatrix(&mut rng, 9, 3);
        let r = random_hpd(&mut rng, 9);
        let p0 = random_cvector(&mut rng, 9);
        let base = compute_cos2_theta(&p0, &a, &r).unwrap();
        for _ in 0..5 {
            let t = random_cmatrix(&mut rng, 3, 3);
            let v = compute_cos2_theta(&p0, &(&a * t), &r).unwrap();
            assert_relative_eq!(v, base, epsilon = 1e-8);
        }
        let scaled = compute_cos2_theta(&(&p0 * c(0.0, 2.5)), &a, &r).unwrap();
        assert_relative_eq!(scaled, base, epsilon = 1e-10);
    }

    #[test]
    fn scr_identity_covariance() {
        let p0 = CVector::from_element(4, c(1.0, 0.0));
        let r = CMatrix::identity(4, 4);
        // l/(l+1) * ||p0||^2 with l = 24: (24/25) * 4.
        let v = compute_scr(&p0, &r, 24).unwrap();
        assert_relative_eq!(v, 24.0 / 25.0 * 4.0, epsilon = 1e-12);
    }

    #[test]
    fn scr_approaches_raw_quadratic_form_for_large_l() {
        let mut rng = rng(15);
        let p0 = random_cvector(&mut rng, 6);
        let r = random_hpd(&mut rng, 6);
        let chol = CholeskyHerm::factor(&r).unwrap();
        let raw = dot_re(&p0, &chol.solve_vec(&p0));
        let v = compute_scr(&p0, &r, 1_000_000).unwrap();
        assert_relative_eq!(v, raw, max_relative = 2e-6);
    }

    #[test]
    fn xi_identity_covariance_is_norm_squared() {
        let mu = CVector::from_vec(vec![c(1.0, 1.0), c(0.0, -1.0), c(1.0, 0.0)]);
        let r = CMatrix::identity(3, 3);
        assert_relative_eq!(compute_xi(&mu, &r).unwrap(), 4.0, epsilon = 1e-12);
    }

    #[test]
    fn cos2_phi_aligned_and_orthogonal() {
        let mut rng = rng(16);
        let r = random_hpd(&mut rng, 7);
        let p0 = random_cvector(&mut rng, 7);
        let aligned = compute_cos2_phi(&p0, &(&p0 * c(0.3, -1.1)), &r).unwrap();
        assert_relative_eq!(aligned, 1.0, epsilon = 1e-10);

        // mu R^{-1}-orthogonal to p0: whiten, orthogonalize, unwhiten.
        let chol = CholeskyHerm::factor(&r).unwrap();
        let w0 = chol.forward_vec(&p0);
        let w = random_cvector(&mut rng, 7);
        let coeff = w0.dotc(&w) / w0.norm_squared();
        let w_perp = &w - w0 * coeff;
        let mu = chol.l() * w_perp;
        let v = compute_cos2_phi(&p0, &mu, &r).unwrap();
        assert!(v < 1e-10, "expected orthogonality, got {v}");
    }

    #[test]
    fn cos2_phi_rejects_zero_vectors() {
        let r = CMatrix::identity(3, 3);
        let z = CVector::zeros(3);
        let v = CVector::from_element(3, c(1.0, 0.0));
        assert!(compute_cos2_phi(&z, &v, &r).is_err());
        assert!(compute_cos2_phi(&v, &z, &r).is_err());
    }

    #[test]
    fn metrics_split_noncentrality() {
        let mut rng = rng(17);
        let a = random_cmatrix(&mut rng, 12, 3);
        let mu = random_cvector(&mut rng, 12);
        let p0 = random_cvector(&mut rng, 12);
        let s = Scenario::with_toeplitz(24, 12, 0.95, mu, a, p0).unwrap();
        let m = s.metrics().unwrap();
        assert_relative_eq!(m.rho_theta + m.delta2, m.scr, epsilon = 1e-12);
        assert_relative_eq!(m.rho_theta, m.scr * m.cos2_theta, epsilon = 1e-12);
        assert!(m.cos2_theta >= 0.0 && m.cos2_theta <= 1.0);
        assert!(m.cos2_phi >= 0.0 && m.cos2_phi <= 1.0);
    }

    #[test]
    fn metrics_zero_mean_has_zero_xi_and_phi() {
        let mut rng = rng(18);
        let a = random_cmatrix(&mut rng, 8, 2);
        let p0 = random_cvector(&mut rng, 8);
        let s = Scenario::with_toeplitz(16, 8, 0.5, CVector::zeros(8), a, p0).unwrap();
        let m = s.metrics().unwrap();
        assert_eq!(m.xi, 0.0);
        assert_eq!(m.cos2_phi, 0.0);
    }

    #[test]
    fn alpha_recovers_in_span_signature() {
        let mut rng = rng(19);
        let a = random_cmatrix(&mut rng, 10, 3);
        let alpha = random_cvector(&mut rng, 3);
        let p0 = &a * &alpha;
        let s = Scenario::with_toeplitz(20, 10, 0.9, CVector::zeros(10), a, p0).unwrap();
        assert!((&s.alpha - &alpha).norm() < 1e-10);
    }

    #[test]
    fn scenario_rejects_bad_inputs() {
        let mut rng = rng(20);
        let a = random_cmatrix(&mut rng, 6, 2);
        let mu = CVector::zeros(6);
        let p0 = random_cvector(&mut rng, 6);

        // Too few training vectors.
        assert!(Scenario::with_toeplitz(5, 6, 0.5, mu.clone(), a.clone(), p0.clone()).is_err());

        // Rank-deficient basis (duplicated column).
        let mut bad = a.clone();
        let col0 = bad.column(0).into_owned();
        bad.set_column(1, &col0);
        assert!(Scenario::with_toeplitz(12, 6, 0.5, mu.clone(), bad, p0.clone()).is_err());

        // Non positive definite covariance.
        let mut r = CMatrix::identity(6, 6);
        r[(0, 0)] = c(-1.0, 0.0);
        assert!(Scenario::new(12, r, mu.clone(), a.clone(), p0.clone()).is_err());

        // Dimension mismatch.
        let short_mu = CVector::zeros(5);
        assert!(Scenario::with_toeplitz(12, 6, 0.5, short_mu, a, p0).is_err());
    }

    #[test]
    fn scenario_json_round_trip_toeplitz() {
        let mut rng = rng(21);
        let a = random_cmatrix(&mut rng, 12, 3);
        let mu = random_cvector(&mut rng, 12);
        let p0 = random_cvector(&mut rng, 12);
        let s = Scenario::with_toeplitz(24, 12, 0.95, mu, a, p0).unwrap();
        let text = s.to_json().unwrap();
        let back = Scenario::from_json(&text).unwrap();
        assert_eq!(back.n, 12);
        assert_eq!(back.p, 3);
        assert_eq!(back.l, 24);
        assert_eq!(back.cov_spec(), s.cov_spec());
        assert_eq!(back.r, s.r);
        assert_eq!(back.mu, s.mu);
        assert_eq!(back.a, s.a);
        assert_eq!(back.p0, s.p0);
    }

    #[test]
    fn scenario_json_round_trip_explicit_entries() {
        let mut rng = rng(22);
        let a = random_cmatrix(&mut rng, 5, 2);
        let mu = random_cvector(&mut rng, 5);
        let p0 = random_cvector(&mut rng, 5);
        let r = random_hpd(&mut rng, 5);
        let s = Scenario::new(10, r, mu, a, p0).unwrap();
        let text = s.to_json().unwrap();
        let back = Scenario::from_json(&text).unwrap();
        assert_eq!(back.r, s.r);
        assert!(matches!(back.cov_spec(), CovarianceSpec::Entries { .. }));
    }

    #[test]
    fn scenario_file_rejects_inconsistent_dims() {
        let text = r#"{
            "n": 4, "p": 2, "l": 8,
            "r": {"toeplitz_eps": 0.5},
            "mu": [[0,0],[0,0],[0,0]],
            "a": [[[1,0],[0,0]],[[0,0],[1,0]],[[0,0],[0,0]],[[0,0],[0,0]]],
            "p0": [[1,0],[0,0],[0,0],[0,0]]
        }"#;
        assert!(Scenario::from_json(text).is_err());
    }
}
