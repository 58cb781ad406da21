//! Analytic detection performance for the mean-adaptive detectors.
//!
//! Conditioned on the loss factor `beta`, the canonical GLRT statistic
//! follows a complex noncentral F law with `p` and `l - n` degrees of freedom
//! and noncentrality `rho_theta * beta`; `beta` itself follows a complex
//! noncentral Beta law with parameters `(l - n + p, n - p)` and noncentrality
//! `delta2`. PD and PFA for all three detectors are finite sums integrated
//! against the beta densities. Everything is evaluated in the log domain so
//! the combinatorics stay finite for large dimensions.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::detectors::DetectorKind;
use crate::error::{Error, Result};
use crate::model::Scenario;
use crate::quad::{integrate, QuadratureConfig};

/// Distribution parameters controlling analytic PD/PFA.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerformanceModel {
    pub n: usize,
    pub p: usize,
    pub l: usize,
    /// In-subspace noncentrality `scr * cos2_theta`.
    pub rho_theta: f64,
    /// Beta-law noncentrality `scr * (1 - cos2_theta)`.
    pub delta2: f64,
}

impl PerformanceModel {
    pub fn new(n: usize, p: usize, l: usize, rho_theta: f64, delta2: f64) -> Result<Self> {
        if p == 0 || p >= n {
            return Err(Error::Domain(format!(
                "subspace dimension must satisfy 0 < p < n, got p = {p}, n = {n}"
            )));
        }
        if l <= n {
            return Err(Error::Domain(format!(
                "analytic laws need l > n, got l = {l}, n = {n}"
            )));
        }
        if rho_theta < 0.0 || delta2 < 0.0 {
            return Err(Error::Domain(format!(
                "noncentralities must be nonnegative, got rho_theta = {rho_theta}, delta2 = {delta2}"
            )));
        }
        Ok(PerformanceModel {
            n,
            p,
            l,
            rho_theta,
            delta2,
        })
    }

    /// Null-hypothesis model (both noncentralities zero).
    pub fn central(n: usize, p: usize, l: usize) -> Result<Self> {
        PerformanceModel::new(n, p, l, 0.0, 0.0)
    }

    /// Distribution parameters implied by a scenario's geometry.
    pub fn from_scenario(s: &Scenario) -> Result<Self> {
        let m = s.metrics()?;
        PerformanceModel::new(s.n, s.p, s.l, m.rho_theta, m.delta2)
    }

    fn dof_sum(&self) -> usize {
        // Shared combinatorial order l - n + p - 1.
        self.l - self.n + self.p - 1
    }
}

fn ln_factorial(k: usize) -> f64 {
    ln_gamma(k as f64 + 1.0)
}

fn ln_binomial(n: usize, k: usize) -> f64 {
    debug_assert!(k <= n);
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// Compensated sum of `exp(term - shift)` over log-domain terms.
fn sum_exp_shifted(logs: &[f64]) -> f64 {
    let shift = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if shift == f64::NEG_INFINITY || shift < -700.0 {
        return 0.0;
    }
    let mut sum = 0.0;
    let mut comp = 0.0;
    for &lt in logs {
        let term = (lt - shift).exp();
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum * shift.exp()
}

/// Truncated-exponential tail weight `e^{-a} * sum_{m=0}^{k} a^m / m!`.
///
/// Equals the probability that a unit-rate Poisson count with mean `a` does
/// not exceed `k`; decreasing in `a`, with value 1 at `a = 0`.
pub fn inverse_gamma_ig(k: usize, a: f64) -> f64 {
    debug_assert!(a >= 0.0);
    if a == 0.0 {
        return 1.0;
    }
    let ln_a = a.ln();
    let logs: Vec<f64> = (0..=k)
        .map(|m| -a + m as f64 * ln_a - ln_factorial(m))
        .collect();
    sum_exp_shifted(&logs).min(1.0)
}

/// Conditional null CDF of the canonical GLRT statistic at threshold `eta`
/// (independent of `beta`, which is the CFAR mechanism).
pub fn cdf_cond_p0(eta: f64, model: &PerformanceModel) -> f64 {
    if eta <= 0.0 {
        return 0.0;
    }
    let a1 = model.dof_sum();
    let ln_eta = eta.ln();
    let ln_1p = eta.ln_1p();
    let logs: Vec<f64> = (0..model.l - model.n)
        .map(|k| ln_binomial(a1, k + model.p) + (k + model.p) as f64 * ln_eta - a1 as f64 * ln_1p)
        .collect();
    sum_exp_shifted(&logs).min(1.0)
}

/// Conditional alternative CDF at threshold `eta` given loss factor `beta`.
///
/// Each null term is damped by the tail weight at `rho_theta * beta / (1 + eta)`;
/// with zero noncentrality this reduces exactly to `cdf_cond_p0`.
pub fn cdf_cond_p1(eta: f64, beta: f64, model: &PerformanceModel) -> f64 {
    if eta <= 0.0 {
        return 0.0;
    }
    let a1 = model.dof_sum();
    let ln_eta = eta.ln();
    let ln_1p = eta.ln_1p();
    let arg = model.rho_theta * beta / (1.0 + eta);
    let mut total = 0.0;
    let mut comp = 0.0;
    for k in 0..model.l - model.n {
        let lt = ln_binomial(a1, k + model.p) + (k + model.p) as f64 * ln_eta - a1 as f64 * ln_1p;
        let term = if lt < -700.0 {
            0.0
        } else {
            lt.exp() * inverse_gamma_ig(k, arg)
        };
        let y = term - comp;
        let t = total + y;
        comp = (t - total) - y;
        total = t;
    }
    total.clamp(0.0, 1.0)
}

/// Central density of the loss factor: Beta with parameters
/// `(l - n + p, n - p)`.
pub fn pdf_beta_h0(beta: f64, model: &PerformanceModel) -> f64 {
    if beta <= 0.0 || beta >= 1.0 {
        return 0.0;
    }
    let a = (model.l - model.n + model.p) as f64;
    let b = (model.n - model.p) as f64;
    let ln_beta_fn = ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b);
    ((a - 1.0) * beta.ln() + (b - 1.0) * (-beta).ln_1p() - ln_beta_fn).exp()
}

/// Noncentral density of the loss factor under the alternative hypothesis,
/// a finite mixture over the out-of-subspace leakage `delta2`.
pub fn pdf_beta_h1(beta: f64, model: &PerformanceModel) -> f64 {
    if beta <= 0.0 || beta >= 1.0 {
        return 0.0;
    }
    if model.delta2 == 0.0 {
        return pdf_beta_h0(beta, model);
    }
    let a = model.l - model.n + model.p;
    let b = model.n - model.p;
    let ln_d2 = model.delta2.ln();
    let ln_1m = (-beta).ln_1p();
    let pre = (a as f64).ln() + ln_factorial(model.l - 1) - model.delta2 * beta
        + (a as f64 - 1.0) * beta.ln();
    let logs: Vec<f64> = (0..=a)
        .map(|k| {
            let exp_1m = (b + k) as f64 - 1.0;
            // Guard 0 * ln(0) at beta -> 1 when the (1-beta) exponent vanishes.
            let pow_1m = if exp_1m == 0.0 { 0.0 } else { exp_1m * ln_1m };
            pre + k as f64 * ln_d2 + pow_1m
                - ln_factorial(k)
                - ln_factorial(a - k)
                - ln_factorial(b + k - 1)
        })
        .collect();
    sum_exp_shifted(&logs)
}

/// Closed-form PFA of the mean-adaptive GLRT at threshold `eta`.
pub fn pfa_sglrt_nmc(eta: f64, model: &PerformanceModel) -> f64 {
    if eta <= 0.0 {
        return 1.0;
    }
    let a1 = model.dof_sum();
    let ln_eta = eta.ln();
    let ln_1p = eta.ln_1p();
    let logs: Vec<f64> = (0..model.p)
        .map(|t| {
            let pow = if t == 0 { 0.0 } else { t as f64 * ln_eta };
            ln_binomial(a1, t) + pow - a1 as f64 * ln_1p
        })
        .collect();
    sum_exp_shifted(&logs).min(1.0)
}

/// PD of the mean-adaptive GLRT: `1 - E_beta[P1(eta | beta)]` under the
/// alternative-hypothesis beta law.
pub fn pd_sglrt_nmc(eta: f64, model: &PerformanceModel, cfg: &QuadratureConfig) -> Result<f64> {
    if eta <= 0.0 {
        return Ok(1.0);
    }
    let v = integrate(
        |b| cdf_cond_p1(eta, b, model) * pdf_beta_h1(b, model),
        0.0,
        1.0,
        cfg,
    )?;
    Ok((1.0 - v).clamp(0.0, 1.0))
}

/// Shared integral for the Rao detector: the statistic exceeds `eta` exactly
/// when the conditional GLRT statistic exceeds `eta / (beta - eta)`, which is
/// only possible for `beta > eta`. The substitution
/// `beta = eta + u (1 - eta)` tames the `beta -> eta` endpoint.
fn srao_integral(
    eta: f64,
    model: &PerformanceModel,
    cfg: &QuadratureConfig,
    density_h1: bool,
) -> Result<f64> {
    if !(0.0..1.0).contains(&eta) {
        return Err(Error::Domain(format!(
            "rao threshold must lie in [0, 1), got {eta}"
        )));
    }
    let width = 1.0 - eta;
    let v = integrate(
        |u| {
            let beta = eta + u * width;
            let inner = if beta <= eta {
                0.0
            } else {
                let t = eta / (beta - eta);
                if density_h1 {
                    1.0 - cdf_cond_p1(t, beta, model)
                } else {
                    pfa_sglrt_nmc(t, model)
                }
            };
            let density = if density_h1 {
                pdf_beta_h1(beta, model)
            } else {
                pdf_beta_h0(beta, model)
            };
            inner * density * width
        },
        0.0,
        1.0,
        cfg,
    )?;
    Ok(v.clamp(0.0, 1.0))
}

/// PFA of the mean-adaptive Rao detector at threshold `eta` in `[0, 1)`.
pub fn pfa_srao_nmc(eta: f64, model: &PerformanceModel, cfg: &QuadratureConfig) -> Result<f64> {
    srao_integral(eta, model, cfg, false)
}

/// PD of the mean-adaptive Rao detector at threshold `eta` in `[0, 1)`.
pub fn pd_srao_nmc(eta: f64, model: &PerformanceModel, cfg: &QuadratureConfig) -> Result<f64> {
    srao_integral(eta, model, cfg, true)
}

/// PFA of the mean-adaptive matched filter at threshold `eta >= 0`.
pub fn pfa_samf_nmc(eta: f64, model: &PerformanceModel, cfg: &QuadratureConfig) -> Result<f64> {
    if eta <= 0.0 {
        return Ok(1.0);
    }
    let v = integrate(
        |b| cdf_cond_p0(b * eta, model) * pdf_beta_h0(b, model),
        0.0,
        1.0,
        cfg,
    )?;
    Ok((1.0 - v).clamp(0.0, 1.0))
}

/// PD of the mean-adaptive matched filter; the conditional threshold scales
/// with the loss factor (`beta * eta`), and the tail-weight argument is
/// `rho_theta * beta / (1 + beta * eta)`.
pub fn pd_samf_nmc(eta: f64, model: &PerformanceModel, cfg: &QuadratureConfig) -> Result<f64> {
    if eta <= 0.0 {
        return Ok(1.0);
    }
    let v = integrate(
        |b| cdf_cond_p1(b * eta, b, model) * pdf_beta_h1(b, model),
        0.0,
        1.0,
        cfg,
    )?;
    Ok((1.0 - v).clamp(0.0, 1.0))
}

/// True for detectors whose false-alarm and detection laws have closed
/// analytic characterizations in this module.
pub fn has_analytic_law(kind: DetectorKind) -> bool {
    matches!(
        kind,
        DetectorKind::SglrtNmc | DetectorKind::SraoNmc | DetectorKind::SamfNmc
    )
}

/// Analytic PFA at threshold `eta` for a detector with a characterized law.
pub fn pfa(
    kind: DetectorKind,
    eta: f64,
    model: &PerformanceModel,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    match kind {
        DetectorKind::SglrtNmc => Ok(pfa_sglrt_nmc(eta, model)),
        DetectorKind::SraoNmc => pfa_srao_nmc(eta, model, cfg),
        DetectorKind::SamfNmc => pfa_samf_nmc(eta, model, cfg),
        other => Err(Error::Unsupported(format!(
            "no analytic false-alarm law for detector '{other}'"
        ))),
    }
}

/// Analytic PD at threshold `eta` for a detector with a characterized law.
pub fn pd(
    kind: DetectorKind,
    eta: f64,
    model: &PerformanceModel,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    match kind {
        DetectorKind::SglrtNmc => pd_sglrt_nmc(eta, model, cfg),
        DetectorKind::SraoNmc => pd_srao_nmc(eta, model, cfg),
        DetectorKind::SamfNmc => pd_samf_nmc(eta, model, cfg),
        other => Err(Error::Unsupported(format!(
            "no analytic detection law for detector '{other}'"
        ))),
    }
}

/// Inverts the PFA law by bisection: returns `eta` with
/// `|pfa(eta) - target| <= 1e-3 * target`.
pub fn threshold_from_pfa(
    kind: DetectorKind,
    target_pfa: f64,
    model: &PerformanceModel,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    if !(0.0..1.0).contains(&target_pfa) || target_pfa == 0.0 {
        return Err(Error::Domain(format!(
            "target false-alarm probability must lie in (0, 1), got {target_pfa}"
        )));
    }
    let eval = |eta: f64| -> Result<f64> { pfa(kind, eta, model, cfg) };

    let mut lo = 0.0;
    let mut hi = match kind {
        // The Rao statistic is bounded by 1.
        DetectorKind::SraoNmc => 1.0 - 1e-12,
        _ => {
            let mut hi = 1.0;
            let mut guard = 0;
            while eval(hi)? > target_pfa {
                hi *= 2.0;
                guard += 1;
                if guard > 64 {
                    return Err(Error::InversionFailure(format!(
                        "could not bracket target {target_pfa} for detector '{kind}'"
                    )));
                }
            }
            hi
        }
    };

    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let v = eval(mid)?;
        if (v - target_pfa).abs() <= 1e-3 * target_pfa {
            return Ok(mid);
        }
        if v > target_pfa {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::InversionFailure(format!(
        "bisection did not reach |pfa - {target_pfa}| <= 1e-3 * target for '{kind}'"
    )))
}
