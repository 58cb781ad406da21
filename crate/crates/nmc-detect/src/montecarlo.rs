//! Deterministic-seeded simulation engine: clutter sampling, empirical
//! threshold calibration, exceedance estimation, and parameter sweeps.
//!
//! Trials are partitioned into fixed-size chunks; each chunk draws from its
//! own counter-derived RNG stream, so results are bit-identical across runs
//! and across worker counts.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::detectors::{evaluate_batch, DetectorKind};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, CholeskyHerm};
use crate::model::Scenario;
use crate::perf::{has_analytic_law, pd, pfa, threshold_from_pfa, PerformanceModel};
use crate::quad::QuadratureConfig;
use crate::synth::{generate_scenario, GenReport, GenTargets};

/// Trials per RNG stream; the unit of parallel work.
const CHUNK_TRIALS: usize = 1024;

/// Stream purposes live in the top byte so calibration, estimation, and raw
/// batch draws never share a stream.
const STREAM_THRESHOLD: u64 = 1 << 56;
const STREAM_DETECTION: u64 = 2 << 56;
const STREAM_FALSE_ALARM: u64 = 3 << 56;
const STREAM_BATCH: u64 = 4 << 56;

fn stream_base(purpose: u64, point: usize) -> u64 {
    purpose | ((point as u64) << 40)
}

/// Which data-generating hypothesis a batch is drawn under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Hypothesis {
    /// Clutter only.
    H0,
    /// Clutter plus the scenario signature in the test vector.
    H1,
}

/// Trial counts and seeding for a simulation run.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TrialConfig {
    /// H0 trials for threshold calibration and false-alarm estimation.
    pub n_threshold_trials: usize,
    /// H1 trials for detection estimation.
    pub n_pd_trials: usize,
    pub seed: u64,
    pub target_pfa: f64,
}

impl Default for TrialConfig {
    fn default() -> Self {
        TrialConfig {
            n_threshold_trials: 100_000,
            n_pd_trials: 10_000,
            seed: 0,
            target_pfa: 1e-3,
        }
    }
}

impl TrialConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_threshold_trials == 0 || self.n_pd_trials == 0 {
            return Err(Error::Domain("trial counts must be at least 1".into()));
        }
        if !(0.0..1.0).contains(&self.target_pfa) || self.target_pfa <= 0.0 {
            return Err(Error::Domain(format!(
                "target false-alarm probability must lie in (0, 1), got {}",
                self.target_pfa
            )));
        }
        if self.target_pfa * (self.n_threshold_trials as f64) < 10.0 {
            return Err(Error::Domain(format!(
                "quantile not estimable: target_pfa * n_threshold_trials = {:.1} < 10",
                self.target_pfa * self.n_threshold_trials as f64
            )));
        }
        Ok(())
    }
}

/// Draws (test vector, training matrix) pairs from a scenario's clutter
/// model: each vector is mu + G w with G the lower Cholesky factor of R and
/// w standard complex normal (real and imaginary parts each variance 1/2).
pub struct ClutterSampler {
    mu: CVector,
    p0: CVector,
    g: CMatrix,
    n: usize,
    l: usize,
}

impl ClutterSampler {
    pub fn new(scenario: &Scenario) -> Result<Self> {
        let chol = CholeskyHerm::factor(&scenario.r)?;
        Ok(ClutterSampler {
            mu: scenario.mu.clone(),
            p0: scenario.p0.clone(),
            g: chol.l().clone(),
            n: scenario.n,
            l: scenario.l,
        })
    }

    /// One trial: the signature is added to the test vector only.
    pub fn draw(&self, rng: &mut ChaCha8Rng, hypothesis: Hypothesis) -> (CVector, CMatrix) {
        let scale = std::f64::consts::FRAC_1_SQRT_2;
        let w = CMatrix::from_fn(self.n, self.l + 1, |_, _| {
            Complex64::new(
                scale * rng.sample::<f64, _>(StandardNormal),
                scale * rng.sample::<f64, _>(StandardNormal),
            )
        });
        let c = &self.g * w;
        let mut x = CVector::from_fn(self.n, |i, _| self.mu[i] + c[(i, 0)]);
        let training = CMatrix::from_fn(self.n, self.l, |i, j| self.mu[i] + c[(i, j + 1)]);
        if hypothesis == Hypothesis::H1 {
            x += &self.p0;
        }
        (x, training)
    }
}

fn chunk_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Deterministic batch of (x, training) draws; chunked so the output is
/// independent of worker count.
pub fn sample_clutter_batch(
    scenario: &Scenario,
    hypothesis: Hypothesis,
    count: usize,
    seed: u64,
) -> Result<Vec<(CVector, CMatrix)>> {
    if count == 0 {
        return Ok(Vec::new());
    }
    let sampler = ClutterSampler::new(scenario)?;
    let n_chunks = count.div_ceil(CHUNK_TRIALS);
    let chunks: Vec<Vec<(CVector, CMatrix)>> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let take = CHUNK_TRIALS.min(count - c * CHUNK_TRIALS);
            let mut rng = chunk_rng(seed, stream_base(STREAM_BATCH, 0) | c as u64);
            (0..take)
                .map(|_| sampler.draw(&mut rng, hypothesis))
                .collect()
        })
        .collect();
    Ok(chunks.into_iter().flatten().collect())
}

/// Degeneracy that a fresh draw can plausibly fix.
fn is_redraw_error(e: &Error) -> bool {
    matches!(
        e,
        Error::NotPositiveDefinite(_) | Error::DegenerateData(_) | Error::RankDeficient(_)
    )
}

fn chunk_statistics(
    sampler: &ClutterSampler,
    a: &CMatrix,
    kinds: &[DetectorKind],
    hypothesis: Hypothesis,
    count: usize,
    seed: u64,
    stream: u64,
) -> Result<(Vec<Vec<f64>>, usize)> {
    let mut rng = chunk_rng(seed, stream);
    let mut out = vec![Vec::with_capacity(count); kinds.len()];
    let mut redraws = 0usize;
    let mut produced = 0usize;
    while produced < count {
        let (x, training) = sampler.draw(&mut rng, hypothesis);
        match evaluate_batch(kinds, &x, &training, a) {
            Ok(vals) if vals.iter().all(|v| v.is_finite()) => {
                for (col, v) in out.iter_mut().zip(vals) {
                    col.push(v);
                }
                produced += 1;
            }
            Ok(_) => {
                redraws += 1;
            }
            Err(e) if is_redraw_error(&e) => {
                redraws += 1;
            }
            Err(e) => return Err(e),
        }
        if redraws > count {
            return Err(Error::DegenerateData(
                "re-draw budget exhausted within a simulation chunk".into(),
            ));
        }
    }
    Ok((out, redraws))
}

fn simulate_multi(
    kinds: &[DetectorKind],
    scenario: &Scenario,
    hypothesis: Hypothesis,
    trials: usize,
    seed: u64,
    stream_hi: u64,
) -> Result<Vec<Vec<f64>>> {
    if kinds.is_empty() {
        return Err(Error::Domain("no detectors requested".into()));
    }
    if trials == 0 {
        return Err(Error::Domain("trial count must be at least 1".into()));
    }
    let sampler = ClutterSampler::new(scenario)?;
    let n_chunks = trials.div_ceil(CHUNK_TRIALS);
    let per_chunk: Vec<(Vec<Vec<f64>>, usize)> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let take = CHUNK_TRIALS.min(trials - c * CHUNK_TRIALS);
            chunk_statistics(
                &sampler,
                &scenario.a,
                kinds,
                hypothesis,
                take,
                seed,
                stream_hi | c as u64,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let redraws: usize = per_chunk.iter().map(|p| p.1).sum();
    if redraws * 100 > trials {
        return Err(Error::DegenerateData(format!(
            "{redraws} degenerate draws exceeded the 1% re-draw budget over {trials} trials"
        )));
    }
    let mut out = vec![Vec::with_capacity(trials); kinds.len()];
    for (chunk, _) in per_chunk {
        for (col, part) in out.iter_mut().zip(chunk) {
            col.extend(part);
        }
    }
    Ok(out)
}

/// Raw statistic sample for one detector under the given hypothesis.
/// Deterministic in (seed, scenario); independent of worker count.
pub fn simulate_statistics(
    kind: DetectorKind,
    scenario: &Scenario,
    hypothesis: Hypothesis,
    trials: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    let purpose = match hypothesis {
        Hypothesis::H0 => STREAM_FALSE_ALARM,
        Hypothesis::H1 => STREAM_DETECTION,
    };
    Ok(simulate_multi(
        &[kind],
        scenario,
        hypothesis,
        trials,
        seed,
        stream_base(purpose, 0),
    )?
    .pop()
    .unwrap())
}

/// Upper empirical quantile by order statistic: the ceil((1 - pfa) n)-th
/// smallest value, so strictly exceeding it has empirical probability <= pfa.
pub fn empirical_upper_quantile(values: &[f64], target_pfa: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::Domain("empty sample".into()));
    }
    if !(0.0..1.0).contains(&target_pfa) || target_pfa <= 0.0 {
        return Err(Error::Domain(format!(
            "target false-alarm probability must lie in (0, 1), got {target_pfa}"
        )));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let idx = (((1.0 - target_pfa) * n as f64).ceil() as usize).clamp(1, n);
    Ok(sorted[idx - 1])
}

fn calibrate_at(
    kinds: &[DetectorKind],
    scenario: &Scenario,
    config: &TrialConfig,
    point: usize,
) -> Result<Vec<f64>> {
    let stats = simulate_multi(
        kinds,
        scenario,
        Hypothesis::H0,
        config.n_threshold_trials,
        config.seed,
        stream_base(STREAM_THRESHOLD, point),
    )?;
    stats
        .iter()
        .map(|col| empirical_upper_quantile(col, config.target_pfa))
        .collect()
}

/// Empirical threshold at the configured false-alarm target, from
/// `n_threshold_trials` H0 draws, one shared sample across the kinds.
pub fn calibrate_thresholds_mc(
    kinds: &[DetectorKind],
    scenario: &Scenario,
    config: &TrialConfig,
) -> Result<Vec<f64>> {
    config.validate()?;
    calibrate_at(kinds, scenario, config, 0)
}

/// Single-detector convenience wrapper around [`calibrate_thresholds_mc`].
pub fn calibrate_threshold_mc(
    kind: DetectorKind,
    scenario: &Scenario,
    config: &TrialConfig,
) -> Result<f64> {
    Ok(calibrate_thresholds_mc(&[kind], scenario, config)?[0])
}

/// Binomial standard error of an exceedance estimate.
pub fn binomial_std_error(estimate: f64, trials: usize) -> f64 {
    (estimate * (1.0 - estimate) / trials as f64).sqrt()
}

fn exceedance_at(
    kinds: &[DetectorKind],
    scenario: &Scenario,
    hypothesis: Hypothesis,
    thresholds: &[f64],
    trials: usize,
    seed: u64,
    point: usize,
) -> Result<Vec<(f64, f64)>> {
    if kinds.len() != thresholds.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} detectors but {} thresholds",
            kinds.len(),
            thresholds.len()
        )));
    }
    let purpose = match hypothesis {
        Hypothesis::H0 => STREAM_FALSE_ALARM,
        Hypothesis::H1 => STREAM_DETECTION,
    };
    let stats = simulate_multi(
        kinds,
        scenario,
        hypothesis,
        trials,
        seed,
        stream_base(purpose, point),
    )?;
    Ok(stats
        .iter()
        .zip(thresholds)
        .map(|(col, &thr)| {
            let exceed = col.iter().filter(|&&v| v > thr).count();
            let est = exceed as f64 / trials as f64;
            (est, binomial_std_error(est, trials))
        })
        .collect())
}

/// Fraction of draws whose statistic strictly exceeds its threshold, with
/// binomial standard error, one shared sample across the kinds.
pub fn estimate_exceedance_multi(
    kinds: &[DetectorKind],
    scenario: &Scenario,
    hypothesis: Hypothesis,
    thresholds: &[f64],
    trials: usize,
    seed: u64,
) -> Result<Vec<(f64, f64)>> {
    exceedance_at(kinds, scenario, hypothesis, thresholds, trials, seed, 0)
}

/// Detection probability estimate over `n_pd_trials` H1 draws.
pub fn estimate_pd_mc(
    kind: DetectorKind,
    scenario: &Scenario,
    threshold: f64,
    config: &TrialConfig,
) -> Result<(f64, f64)> {
    config.validate()?;
    Ok(exceedance_at(
        &[kind],
        scenario,
        Hypothesis::H1,
        &[threshold],
        config.n_pd_trials,
        config.seed,
        0,
    )?[0])
}

/// False-alarm probability estimate over `n_threshold_trials` H0 draws,
/// on a stream distinct from the calibration stream.
pub fn estimate_pfa_mc(
    kind: DetectorKind,
    scenario: &Scenario,
    threshold: f64,
    config: &TrialConfig,
) -> Result<(f64, f64)> {
    config.validate()?;
    Ok(exceedance_at(
        &[kind],
        scenario,
        Hypothesis::H0,
        &[threshold],
        config.n_threshold_trials,
        config.seed,
        0,
    )?[0])
}

/// Where a curve's numbers came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    MonteCarlo,
    Analytic,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::MonteCarlo => "monte-carlo",
            Provenance::Analytic => "analytic",
        })
    }
}

/// One point of an estimated or analytic curve. Analytic points carry zero
/// trials and zero standard error.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CurvePoint {
    pub sweep_value: f64,
    pub estimate: f64,
    pub trials: u64,
    pub std_error: f64,
}

/// A detector's estimates across a sweep grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EmpiricalCurve {
    pub sweep_name: String,
    pub detector: DetectorKind,
    pub provenance: Provenance,
    pub points: Vec<CurvePoint>,
}

/// Quantity swept over a grid. Alignment and energy targets regenerate the
/// scenario per point; dimension sweeps change the problem size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepVariable {
    #[serde(rename = "scr_db")]
    ScrDb,
    #[serde(rename = "cos2_theta")]
    Cos2Theta,
    #[serde(rename = "xi_db")]
    XiDb,
    #[serde(rename = "cos2_phi")]
    Cos2Phi,
    #[serde(rename = "L")]
    TrainingCount,
    #[serde(rename = "p")]
    SubspaceDim,
}

/// What a sweep estimates: detection probability under H1, or false-alarm
/// probability under H0 at held thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepMeasure {
    Detection,
    FalseAlarm,
}

impl SweepVariable {
    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::ScrDb => "scr_db",
            SweepVariable::Cos2Theta => "cos2_theta",
            SweepVariable::XiDb => "xi_db",
            SweepVariable::Cos2Phi => "cos2_phi",
            SweepVariable::TrainingCount => "L",
            SweepVariable::SubspaceDim => "p",
        }
    }

    /// Energy/alignment targets of the clutter mean are false-alarm sweeps;
    /// everything else measures detection.
    pub fn measure(self) -> SweepMeasure {
        match self {
            SweepVariable::XiDb | SweepVariable::Cos2Phi => SweepMeasure::FalseAlarm,
            _ => SweepMeasure::Detection,
        }
    }
}

impl fmt::Display for SweepVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepVariable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "scr_db" | "scr-db" | "scr" => Ok(SweepVariable::ScrDb),
            "cos2_theta" | "cos2-theta" | "cos2theta" => Ok(SweepVariable::Cos2Theta),
            "xi_db" | "xi-db" | "xi" => Ok(SweepVariable::XiDb),
            "cos2_phi" | "cos2-phi" | "cos2phi" => Ok(SweepVariable::Cos2Phi),
            "L" | "l" => Ok(SweepVariable::TrainingCount),
            "p" => Ok(SweepVariable::SubspaceDim),
            other => Err(Error::Parse(format!(
                "unknown sweep variable '{other}' (expected scr_db, cos2_theta, xi_db, cos2_phi, L, or p)"
            ))),
        }
    }
}

/// Grid of values for one sweep variable.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub grid: Vec<f64>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(Error::Domain("sweep grid is empty".into()));
        }
        if self.grid.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain(
                "sweep grid contains non-finite values".into(),
            ));
        }
        Ok(())
    }
}

/// Base synthesis parameters; `realize` overrides one knob per grid point
/// and regenerates, so everything not swept stays fixed across the grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioTemplate {
    pub n: usize,
    pub p: usize,
    pub l: usize,
    pub toeplitz_eps: f64,
    pub targets: GenTargets,
    pub gen_seed: u64,
}

fn grid_integer(value: f64, what: &str) -> Result<usize> {
    if value.fract() != 0.0 || !(1.0..=1e9).contains(&value) {
        return Err(Error::Domain(format!(
            "{what} grid values must be positive integers, got {value}"
        )));
    }
    Ok(value as usize)
}

impl ScenarioTemplate {
    pub fn realize(&self, variable: SweepVariable, value: f64) -> Result<(Scenario, GenReport)> {
        let mut targets = self.targets;
        let mut p = self.p;
        let mut l = self.l;
        match variable {
            SweepVariable::ScrDb => targets.scr_db = value,
            SweepVariable::Cos2Theta => targets.cos2_theta_star = value,
            SweepVariable::XiDb => targets.xi_db = value,
            SweepVariable::Cos2Phi => targets.cos2_phi_star = value,
            SweepVariable::TrainingCount => l = grid_integer(value, "training-count")?,
            SweepVariable::SubspaceDim => p = grid_integer(value, "subspace-dimension")?,
        }
        generate_scenario(self.n, p, l, self.toeplitz_eps, &targets, self.gen_seed)
    }
}

/// Replaces the clutter mean with zero, keeping covariance, subspace, and
/// signature. Reference point for held-threshold false-alarm sweeps.
fn zero_mean_variant(s: &Scenario) -> Result<Scenario> {
    Scenario::new(
        s.l,
        s.r.clone(),
        CVector::zeros(s.n),
        s.a.clone(),
        s.p0.clone(),
    )
}

/// Runs a sweep and returns Monte Carlo curves for every requested detector,
/// followed by analytic companion curves for detectors with closed laws.
///
/// Threshold semantics: detectors built on the centered statistics are
/// mean-invariant, so their thresholds are set once per problem size, from
/// the analytic law where one exists and otherwise by one calibration run.
/// Conventional detectors are recalibrated at every detection grid point; in
/// false-alarm sweeps they hold the threshold calibrated on a zero-mean
/// reference, which is exactly what exposes their false-alarm drift.
///
/// Grid points the generator cannot reach are skipped (gaps), not errors.
pub fn sweep(
    kinds: &[DetectorKind],
    template: &ScenarioTemplate,
    spec: &SweepSpec,
    config: &TrialConfig,
) -> Result<Vec<EmpiricalCurve>> {
    config.validate()?;
    spec.validate()?;
    if kinds.is_empty() {
        return Err(Error::Domain("no detectors requested".into()));
    }

    let mut realized: Vec<(f64, Scenario)> = Vec::with_capacity(spec.grid.len());
    for &value in &spec.grid {
        match template.realize(spec.variable, value) {
            Ok((scenario, _)) => realized.push((value, scenario)),
            Err(Error::GenerationInfeasible(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    if realized.is_empty() {
        return Err(Error::GenerationInfeasible(
            "every sweep grid point was infeasible".into(),
        ));
    }

    let quad = QuadratureConfig::default();
    let mut mc_curves: Vec<EmpiricalCurve> = kinds
        .iter()
        .map(|&k| EmpiricalCurve {
            sweep_name: spec.variable.name().to_string(),
            detector: k,
            provenance: Provenance::MonteCarlo,
            points: Vec::new(),
        })
        .collect();
    let mut analytic_curves: Vec<(usize, EmpiricalCurve)> = kinds
        .iter()
        .enumerate()
        .filter(|(_, k)| has_analytic_law(**k))
        .map(|(i, &k)| {
            (
                i,
                EmpiricalCurve {
                    sweep_name: spec.variable.name().to_string(),
                    detector: k,
                    provenance: Provenance::Analytic,
                    points: Vec::new(),
                },
            )
        })
        .collect();

    match spec.variable.measure() {
        SweepMeasure::FalseAlarm => {
            let first = &realized[0].1;
            let central = PerformanceModel::new(first.n, first.p, first.l, 0.0, 0.0)?;
            let reference = zero_mean_variant(first)?;

            let mut thresholds = vec![f64::NAN; kinds.len()];
            let mut needs_mc: Vec<usize> = Vec::new();
            for (i, &kind) in kinds.iter().enumerate() {
                if has_analytic_law(kind) {
                    thresholds[i] = threshold_from_pfa(kind, config.target_pfa, &central, &quad)?;
                } else {
                    needs_mc.push(i);
                }
            }
            if !needs_mc.is_empty() {
                let subset: Vec<DetectorKind> = needs_mc.iter().map(|&i| kinds[i]).collect();
                let cal = calibrate_at(&subset, &reference, config, 0)?;
                for (slot, thr) in needs_mc.iter().zip(cal) {
                    thresholds[*slot] = thr;
                }
            }

            for (point_idx, (value, scenario)) in realized.iter().enumerate() {
                let estimates = exceedance_at(
                    kinds,
                    scenario,
                    Hypothesis::H0,
                    &thresholds,
                    config.n_threshold_trials,
                    config.seed,
                    point_idx,
                )?;
                for (curve, (est, se)) in mc_curves.iter_mut().zip(estimates) {
                    curve.points.push(CurvePoint {
                        sweep_value: *value,
                        estimate: est,
                        trials: config.n_threshold_trials as u64,
                        std_error: se,
                    });
                }
            }
            for (i, curve) in analytic_curves.iter_mut() {
                let flat = pfa(kinds[*i], thresholds[*i], &central, &quad)?;
                for (value, _) in &realized {
                    curve.points.push(CurvePoint {
                        sweep_value: *value,
                        estimate: flat,
                        trials: 0,
                        std_error: 0.0,
                    });
                }
            }
        }
        SweepMeasure::Detection => {
            let mut mc_threshold_cache: HashMap<(DetectorKind, usize, usize, usize), f64> =
                HashMap::new();
            for (point_idx, (value, scenario)) in realized.iter().enumerate() {
                let dims = (scenario.n, scenario.p, scenario.l);
                let central = PerformanceModel::new(dims.0, dims.1, dims.2, 0.0, 0.0)?;

                let mut thresholds = vec![f64::NAN; kinds.len()];
                let mut needs_mc: Vec<usize> = Vec::new();
                let mut cacheable: Vec<usize> = Vec::new();
                for (i, &kind) in kinds.iter().enumerate() {
                    if has_analytic_law(kind) {
                        thresholds[i] =
                            threshold_from_pfa(kind, config.target_pfa, &central, &quad)?;
                    } else if kind.is_conventional() {
                        needs_mc.push(i);
                    } else if let Some(&thr) =
                        mc_threshold_cache.get(&(kind, dims.0, dims.1, dims.2))
                    {
                        thresholds[i] = thr;
                    } else {
                        needs_mc.push(i);
                        cacheable.push(i);
                    }
                }
                if !needs_mc.is_empty() {
                    let subset: Vec<DetectorKind> = needs_mc.iter().map(|&i| kinds[i]).collect();
                    let cal = calibrate_at(&subset, scenario, config, point_idx)?;
                    for (slot, thr) in needs_mc.iter().zip(cal) {
                        thresholds[*slot] = thr;
                        if cacheable.contains(slot) {
                            mc_threshold_cache.insert((kinds[*slot], dims.0, dims.1, dims.2), thr);
                        }
                    }
                }

                let estimates = exceedance_at(
                    kinds,
                    scenario,
                    Hypothesis::H1,
                    &thresholds,
                    config.n_pd_trials,
                    config.seed,
                    point_idx,
                )?;
                for (curve, (est, se)) in mc_curves.iter_mut().zip(estimates) {
                    curve.points.push(CurvePoint {
                        sweep_value: *value,
                        estimate: est,
                        trials: config.n_pd_trials as u64,
                        std_error: se,
                    });
                }

                if !analytic_curves.is_empty() {
                    let model = PerformanceModel::from_scenario(scenario)?;
                    for (i, curve) in analytic_curves.iter_mut() {
                        let value_an = pd(kinds[*i], thresholds[*i], &model, &quad)?;
                        curve.points.push(CurvePoint {
                            sweep_value: *value,
                            estimate: value_an,
                            trials: 0,
                            std_error: 0.0,
                        });
                    }
                }
            }
        }
    }

    let mut curves = mc_curves;
    curves.extend(analytic_curves.into_iter().map(|(_, c)| c));
    Ok(curves)
}

/// Writes curves as CSV with one row per point:
/// sweep_value, detector, provenance, estimate, std_error, trials.
pub fn write_curves_csv<P: AsRef<Path>>(path: P, curves: &[EmpiricalCurve]) -> Result<()> {
    let mut writer = csv::Writer::from_path(path.as_ref())?;
    writer.write_record([
        "sweep_value",
        "detector",
        "provenance",
        "estimate",
        "std_error",
        "trials",
    ])?;
    for curve in curves {
        for point in &curve.points {
            writer.write_record([
                point.sweep_value.to_string(),
                curve.detector.to_string(),
                curve.provenance.to_string(),
                point.estimate.to_string(),
                point.std_error.to_string(),
                point.trials.to_string(),
            ])?;
        }
    }
    writer.flush()?;
    Ok(())
}

fn now_unix_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

/// Reproducibility record for a run: full configuration echo, seed, wall
/// clock bounds, and the build's version stamps.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub seed: u64,
    pub config: serde_json::Value,
    pub started_unix_ms: u64,
    pub finished_unix_ms: u64,
    pub version: String,
    pub git_describe: String,
    /// Files this run produced; each output artifact belongs to one manifest.
    #[serde(default)]
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(command: impl Into<String>, seed: u64, config: serde_json::Value) -> Self {
        RunManifest {
            command: command.into(),
            seed,
            config,
            started_unix_ms: now_unix_ms(),
            finished_unix_ms: 0,
            version: env!("CARGO_PKG_VERSION").to_string(),
            git_describe: env!("NMCDET_GIT_DESCRIBE").to_string(),
            outputs: Vec::new(),
        }
    }

    pub fn record_output(&mut self, path: impl AsRef<Path>) {
        self.outputs.push(path.as_ref().display().to_string());
    }

    pub fn finish(&mut self) {
        self.finished_unix_ms = now_unix_ms();
    }

    pub fn write_json<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let file = std::fs::File::create(path.as_ref())?;
        serde_json::to_writer_pretty(file, self)?;
        Ok(())
    }
}
