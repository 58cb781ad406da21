//! Measured-data preprocessing: texture estimation, Gaussianization,
//! standardization, Rayleigh-fit diagnostics, segmentation into detection
//! vectors, measured-data covariance and SCR, and a complex mean test.
//!
//! The chain targets range-pulse clutter records: compound-Gaussian data is
//! divided by a windowed texture estimate to recover Gaussian speckle, scaled
//! so magnitudes follow a unit-scale Rayleigh law, and cut into length-N
//! vectors for the detection machinery.

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, FisherSnedecor};

use crate::error::{Error, Result};
use crate::linalg::{add_outer, hermitianize, CMatrix, CVector, CholeskyHerm, RMatrix};

/// Floor substituted when a texture window is entirely zero.
const TEXTURE_FLOOR: f64 = 1e-30;

/// Range-pulse clutter record: row i holds the pulse sequence of one range
/// cell. `cell_offset` and `pulse_start` keep the absolute indices of the
/// record's origin.
#[derive(Debug, Clone, PartialEq)]
pub struct RangePulseMatrix {
    pub data: CMatrix,
    pub cell_offset: usize,
    pub pulse_start: usize,
}

impl RangePulseMatrix {
    pub fn new(data: CMatrix, cell_offset: usize, pulse_start: usize) -> Result<Self> {
        if data.nrows() == 0 || data.ncols() == 0 {
            return Err(Error::Domain("range-pulse record is empty".into()));
        }
        if data.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Domain(
                "range-pulse record contains non-finite entries".into(),
            ));
        }
        Ok(RangePulseMatrix {
            data,
            cell_offset,
            pulse_start,
        })
    }

    pub fn cells(&self) -> usize {
        self.data.nrows()
    }

    pub fn pulses(&self) -> usize {
        self.data.ncols()
    }
}

/// Preprocessing knobs. `window_k` is the K in the (K + 1)-sample texture
/// window; `pulse_start`/`pulse_count` describe the intercepted record;
/// `vector_len` is the N used for segmentation.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PreprocessConfig {
    pub window_k: usize,
    pub pulse_start: usize,
    pub pulse_count: usize,
    pub vector_len: usize,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        PreprocessConfig {
            window_k: 32,
            pulse_start: 10_000,
            pulse_count: 40_001,
            vector_len: 12,
        }
    }
}

impl PreprocessConfig {
    pub fn validate(&self) -> Result<()> {
        if self.window_k < 2 || !self.window_k.is_multiple_of(2) {
            return Err(Error::Domain(format!(
                "texture window K must be an even integer >= 2, got {}",
                self.window_k
            )));
        }
        if self.vector_len == 0 {
            return Err(Error::Domain("vector length must be positive".into()));
        }
        if self.pulse_count < self.vector_len {
            return Err(Error::Domain(format!(
                "pulse count {} is shorter than one vector of length {}",
                self.pulse_count, self.vector_len
            )));
        }
        Ok(())
    }
}

/// Windowed texture estimate plus a count of degenerate (all-zero) windows
/// that were floored.
#[derive(Debug, Clone)]
pub struct TextureEstimate {
    pub tau: RMatrix,
    pub floored_windows: usize,
}

/// Squared windowed mean magnitude per sample. Windows near the record edges
/// are clipped to valid indices and divided by their actual length, so short
/// records (down to a single pulse) are well defined.
pub fn estimate_texture(
    mat: &RangePulseMatrix,
    config: &PreprocessConfig,
) -> Result<TextureEstimate> {
    config.validate()?;
    let half = config.window_k / 2;
    let (cells, pulses) = (mat.cells(), mat.pulses());
    let mut floored = 0usize;
    let tau = RMatrix::from_fn(cells, pulses, |i, j| {
        let lo = j.saturating_sub(half);
        let hi = (j + half).min(pulses - 1);
        let mut sum = 0.0;
        for k in lo..=hi {
            sum += mat.data[(i, k)].norm();
        }
        let mean = sum / (hi - lo + 1) as f64;
        let t = mean * mean;
        if t > 0.0 {
            t
        } else {
            floored += 1;
            TEXTURE_FLOOR
        }
    });
    Ok(TextureEstimate {
        tau,
        floored_windows: floored,
    })
}

/// Divides each sample by the square root of its texture estimate.
pub fn gaussianize(mat: &RangePulseMatrix, tau: &RMatrix) -> Result<RangePulseMatrix> {
    if tau.nrows() != mat.cells() || tau.ncols() != mat.pulses() {
        return Err(Error::DimensionMismatch(format!(
            "texture is {}x{}, record is {}x{}",
            tau.nrows(),
            tau.ncols(),
            mat.cells(),
            mat.pulses()
        )));
    }
    if tau.iter().any(|&t| t <= 0.0 || !t.is_finite()) {
        return Err(Error::Domain("texture must be strictly positive".into()));
    }
    let data = CMatrix::from_fn(mat.cells(), mat.pulses(), |i, j| {
        mat.data[(i, j)] / tau[(i, j)].sqrt()
    });
    RangePulseMatrix::new(data, mat.cell_offset, mat.pulse_start)
}

/// Which stage the standardization input came from; the scaling rule is the
/// same either way.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StandardizeMode {
    Gaussianized,
    Raw,
}

/// Standardized record plus the per-cell scale factors; all-zero cells are
/// left unscaled and listed in `skipped_rows`.
#[derive(Debug, Clone)]
pub struct StandardizeOutcome {
    pub matrix: RangePulseMatrix,
    pub mode: StandardizeMode,
    pub scales: Vec<f64>,
    pub skipped_rows: Vec<usize>,
}

/// Scales each range cell by sqrt(pi/2) * L_c / sum_j |c_ij|, which makes the
/// mean magnitude per cell exactly sqrt(pi/2), the mean of a unit-scale
/// Rayleigh law.
pub fn standardize(mat: &RangePulseMatrix, mode: StandardizeMode) -> StandardizeOutcome {
    let (cells, pulses) = (mat.cells(), mat.pulses());
    let target = (PI / 2.0).sqrt();
    let mut data = mat.data.clone();
    let mut scales = vec![1.0; cells];
    let mut skipped = Vec::new();
    for i in 0..cells {
        let total: f64 = (0..pulses).map(|j| mat.data[(i, j)].norm()).sum();
        if total <= 0.0 {
            skipped.push(i);
            continue;
        }
        let scale = target * pulses as f64 / total;
        scales[i] = scale;
        for j in 0..pulses {
            data[(i, j)] *= scale;
        }
    }
    StandardizeOutcome {
        matrix: RangePulseMatrix {
            data,
            cell_offset: mat.cell_offset,
            pulse_start: mat.pulse_start,
        },
        mode,
        scales,
        skipped_rows: skipped,
    }
}

/// One histogram bin of the magnitude fit: observed density against the
/// unit-scale Rayleigh density at the bin center.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct HistogramBin {
    pub center: f64,
    pub width: f64,
    pub observed_density: f64,
    pub reference_density: f64,
}

/// Goodness of fit of sample magnitudes against the unit-scale Rayleigh law.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RayleighFitReport {
    pub n_samples: usize,
    pub ks_statistic: f64,
    pub bins: Vec<HistogramBin>,
}

impl RayleighFitReport {
    pub fn write_json<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let file = std::fs::File::create(path.as_ref())?;
        serde_json::to_writer_pretty(file, self)?;
        Ok(())
    }

    pub fn write_histogram_csv<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let mut writer = csv::Writer::from_path(path.as_ref())?;
        writer.write_record(["center", "width", "observed_density", "reference_density"])?;
        for bin in &self.bins {
            writer.write_record([
                bin.center.to_string(),
                bin.width.to_string(),
                bin.observed_density.to_string(),
                bin.reference_density.to_string(),
            ])?;
        }
        writer.flush()?;
        Ok(())
    }
}

fn rayleigh_cdf(x: f64) -> f64 {
    1.0 - (-0.5 * x * x).exp()
}

fn rayleigh_pdf(x: f64) -> f64 {
    x * (-0.5 * x * x).exp()
}

const HISTOGRAM_BINS: usize = 60;

/// Kolmogorov-Smirnov statistic of the entry magnitudes against the
/// unit-scale Rayleigh CDF, plus a density histogram for plotting.
pub fn rayleigh_fit_report(mat: &RangePulseMatrix) -> Result<RayleighFitReport> {
    let mut magnitudes: Vec<f64> = mat.data.iter().map(|v| v.norm()).collect();
    let n = magnitudes.len();
    if n < 100 {
        return Err(Error::DegenerateData(format!(
            "need at least 100 samples for a distribution fit, got {n}"
        )));
    }
    magnitudes.sort_by(f64::total_cmp);
    let nf = n as f64;
    let mut ks = 0.0f64;
    for (i, &x) in magnitudes.iter().enumerate() {
        let f = rayleigh_cdf(x);
        ks = ks.max(f - i as f64 / nf).max((i + 1) as f64 / nf - f);
    }

    let max = magnitudes[n - 1].max(1e-12);
    let width = max / HISTOGRAM_BINS as f64;
    let mut counts = vec![0usize; HISTOGRAM_BINS];
    for &x in &magnitudes {
        let b = ((x / width) as usize).min(HISTOGRAM_BINS - 1);
        counts[b] += 1;
    }
    let bins = counts
        .iter()
        .enumerate()
        .map(|(b, &c)| {
            let center = (b as f64 + 0.5) * width;
            HistogramBin {
                center,
                width,
                observed_density: c as f64 / (nf * width),
                reference_density: rayleigh_pdf(center),
            }
        })
        .collect();
    Ok(RayleighFitReport {
        n_samples: n,
        ks_statistic: ks,
        bins,
    })
}

/// Cuts each range cell into floor(L_c / N) consecutive non-overlapping
/// length-N vectors; the trailing remainder is dropped.
pub fn segment_vectors(mat: &RangePulseMatrix, n: usize) -> Result<Vec<Vec<CVector>>> {
    if n == 0 {
        return Err(Error::Domain("vector length must be positive".into()));
    }
    let l_r = mat.pulses() / n;
    if l_r == 0 {
        return Err(Error::Domain(format!(
            "record of {} pulses cannot hold a vector of length {n}",
            mat.pulses()
        )));
    }
    let mut out = Vec::with_capacity(mat.cells());
    for i in 0..mat.cells() {
        let mut cell = Vec::with_capacity(l_r);
        for s in 0..l_r {
            cell.push(CVector::from_fn(n, |k, _| mat.data[(i, s * n + k)]));
        }
        out.push(cell);
    }
    Ok(out)
}

/// Pooled sample covariance over the L + 1 cells' segmented vectors (no mean
/// removal): sum of outer products divided by (L + 1) L_r. Errors when the
/// result is not positive definite; no silent diagonal loading.
pub fn measured_scm(segmented: &[Vec<CVector>], l: usize) -> Result<CMatrix> {
    if segmented.len() != l + 1 {
        return Err(Error::DimensionMismatch(format!(
            "expected L + 1 = {} cells, got {}",
            l + 1,
            segmented.len()
        )));
    }
    let l_r = segmented[0].len();
    if l_r == 0 || segmented.iter().any(|c| c.len() != l_r) {
        return Err(Error::Domain(
            "every cell must contribute the same nonzero vector count".into(),
        ));
    }
    let n = segmented[0][0].len();
    if (l + 1) * l_r < n {
        return Err(Error::DegenerateData(format!(
            "{} vectors cannot estimate a {n}x{n} covariance",
            (l + 1) * l_r
        )));
    }
    let mut scm = CMatrix::zeros(n, n);
    for cell in segmented {
        for v in cell {
            if v.len() != n {
                return Err(Error::DimensionMismatch(
                    "segmented vectors have inconsistent lengths".into(),
                ));
            }
            add_outer(&mut scm, v, 1.0);
        }
    }
    scm /= Complex64::new(((l + 1) * l_r) as f64, 0.0);
    let scm = hermitianize(&scm);
    CholeskyHerm::factor(&scm)?;
    Ok(scm)
}

/// Output signal-to-clutter ratio against a measured covariance:
/// (L / (L + 1)) p0^H R^{-1} p0.
pub fn measured_scr(p0: &CVector, scm: &CMatrix, l: usize) -> Result<f64> {
    if scm.nrows() != p0.len() || scm.ncols() != p0.len() {
        return Err(Error::DimensionMismatch(format!(
            "signature has {} rows, covariance is {}x{}",
            p0.len(),
            scm.nrows(),
            scm.ncols()
        )));
    }
    if l == 0 {
        return Err(Error::Domain("training count must be positive".into()));
    }
    let chol = CholeskyHerm::factor(scm)?;
    let quad = crate::linalg::dot_re(p0, &chol.solve_vec(p0));
    Ok(l as f64 / (l as f64 + 1.0) * quad)
}

/// Result of the complex mean test on a vector sample.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct HotellingOutcome {
    pub f_statistic: f64,
    pub critical_value: f64,
    pub reject: bool,
    pub alpha: f64,
    /// Real F degrees of freedom (numerator, denominator).
    pub dof: (usize, usize),
}

/// F critical value of the complex mean test at level `alpha` for dimension
/// `n` and sample count `l_r`: the (1 - alpha) quantile of
/// F(2 n, 2 (l_r - n)).
pub fn hotelling_critical_value(n: usize, l_r: usize, alpha: f64) -> Result<f64> {
    if l_r <= n {
        return Err(Error::Domain(format!(
            "mean test needs more samples than dimensions, got l_r = {l_r}, n = {n}"
        )));
    }
    if !(0.0..1.0).contains(&alpha) || alpha <= 0.0 {
        return Err(Error::Domain(format!(
            "significance level must lie in (0, 1), got {alpha}"
        )));
    }
    let dist = FisherSnedecor::new(2.0 * n as f64, 2.0 * (l_r - n) as f64)
        .map_err(|e| Error::Domain(format!("F distribution: {e}")))?;
    Ok(dist.inverse_cdf(1.0 - alpha))
}

/// Complex mean test: rejects "the population mean is zero" when the scaled
/// quadratic form l_r (l_r - n) / (n (l_r - 1)) * xbar^H S^{-1} xbar exceeds
/// the F(2n, 2(l_r - n)) quantile at level `alpha`. S is the sample
/// covariance about the sample mean with divisor l_r - 1.
pub fn hotelling_t2(vectors: &[CVector], alpha: f64) -> Result<HotellingOutcome> {
    let l_r = vectors.len();
    if l_r == 0 {
        return Err(Error::Domain("empty sample".into()));
    }
    let n = vectors[0].len();
    if vectors.iter().any(|v| v.len() != n) {
        return Err(Error::DimensionMismatch(
            "sample vectors have inconsistent lengths".into(),
        ));
    }
    let critical_value = hotelling_critical_value(n, l_r, alpha)?;

    let mut mean = CVector::zeros(n);
    for v in vectors {
        mean += v;
    }
    mean /= Complex64::new(l_r as f64, 0.0);
    let mut s = CMatrix::zeros(n, n);
    for v in vectors {
        let d = v - &mean;
        add_outer(&mut s, &d, 1.0);
    }
    s /= Complex64::new((l_r - 1) as f64, 0.0);
    let s = hermitianize(&s);
    let chol = CholeskyHerm::factor(&s)?;
    let quad = crate::linalg::dot_re(&mean, &chol.solve_vec(&mean));

    let lf = l_r as f64;
    let nf = n as f64;
    let f_statistic = lf * (lf - nf) / (nf * (lf - 1.0)) * quad;
    Ok(HotellingOutcome {
        f_statistic,
        critical_value,
        reject: f_statistic > critical_value,
        alpha,
        dof: (2 * n, 2 * (l_r - n)),
    })
}

/// Synthetic compound-Gaussian record: unit-mean exponentially distributed
/// texture held constant over `texture_block` consecutive pulses per cell,
/// multiplying standard complex normal speckle. Deterministic in `seed`.
pub fn generate_compound_gaussian(
    cells: usize,
    pulses: usize,
    texture_block: usize,
    seed: u64,
) -> Result<RangePulseMatrix> {
    if cells == 0 || pulses == 0 || texture_block == 0 {
        return Err(Error::Domain(
            "cells, pulses, and texture block must be positive".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let mut data = CMatrix::zeros(cells, pulses);
    for i in 0..cells {
        let mut j = 0;
        while j < pulses {
            let tau: f64 = rng.sample(Exp1);
            let amp = tau.sqrt();
            let end = (j + texture_block).min(pulses);
            for jj in j..end {
                let speckle = Complex64::new(
                    scale * rng.sample::<f64, _>(StandardNormal),
                    scale * rng.sample::<f64, _>(StandardNormal),
                );
                data[(i, jj)] = amp * speckle;
            }
            j = end;
        }
    }
    RangePulseMatrix::new(data, 0, 0)
}

/// Pure Gaussian record with independent CN(0, 1) entries; the texture-free
/// reference case. Deterministic in `seed`.
pub fn generate_speckle(cells: usize, pulses: usize, seed: u64) -> Result<RangePulseMatrix> {
    if cells == 0 || pulses == 0 {
        return Err(Error::Domain("cells and pulses must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let mut data = CMatrix::zeros(cells, pulses);
    for i in 0..cells {
        for j in 0..pulses {
            data[(i, j)] = Complex64::new(
                scale * rng.sample::<f64, _>(StandardNormal),
                scale * rng.sample::<f64, _>(StandardNormal),
            );
        }
    }
    RangePulseMatrix::new(data, 0, 0)
}

/// Reads a record from CSV with header `cell,pulse,re,im`. Cell and pulse
/// indices may start anywhere but must tile a full rectangle exactly once.
pub fn read_csv_matrix<P: AsRef<Path>>(path: P) -> Result<RangePulseMatrix> {
    let mut reader = csv::Reader::from_path(path.as_ref())?;
    let mut records: Vec<(usize, usize, f64, f64)> = Vec::new();
    for row in reader.deserialize() {
        let rec: (usize, usize, f64, f64) = row?;
        records.push(rec);
    }
    if records.is_empty() {
        return Err(Error::Parse("CSV record is empty".into()));
    }
    let cell_lo = records.iter().map(|r| r.0).min().unwrap();
    let cell_hi = records.iter().map(|r| r.0).max().unwrap();
    let pulse_lo = records.iter().map(|r| r.1).min().unwrap();
    let pulse_hi = records.iter().map(|r| r.1).max().unwrap();
    let cells = cell_hi - cell_lo + 1;
    let pulses = pulse_hi - pulse_lo + 1;
    if records.len() != cells * pulses {
        return Err(Error::Parse(format!(
            "expected {} entries for a {}x{} record, got {}",
            cells * pulses,
            cells,
            pulses,
            records.len()
        )));
    }
    let mut data = CMatrix::zeros(cells, pulses);
    let mut seen = vec![false; cells * pulses];
    for (cell, pulse, re, im) in records {
        let i = cell - cell_lo;
        let j = pulse - pulse_lo;
        if seen[i * pulses + j] {
            return Err(Error::Parse(format!(
                "duplicate entry for cell {cell}, pulse {pulse}"
            )));
        }
        seen[i * pulses + j] = true;
        data[(i, j)] = Complex64::new(re, im);
    }
    RangePulseMatrix::new(data, cell_lo, pulse_lo)
}

/// Writes a record as CSV with header `cell,pulse,re,im` using absolute
/// cell and pulse indices.
pub fn write_csv_matrix<P: AsRef<Path>>(path: P, mat: &RangePulseMatrix) -> Result<()> {
    let mut writer = csv::Writer::from_path(path.as_ref())?;
    writer.write_record(["cell", "pulse", "re", "im"])?;
    for i in 0..mat.cells() {
        for j in 0..mat.pulses() {
            let v = mat.data[(i, j)];
            writer.write_record([
                (mat.cell_offset + i).to_string(),
                (mat.pulse_start + j).to_string(),
                v.re.to_string(),
                v.im.to_string(),
            ])?;
        }
    }
    writer.flush()?;
    Ok(())
}

/// Companion metadata for the raw binary format.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BinarySidecar {
    pub cells: usize,
    pub pulses: usize,
    /// Absolute index of the first pulse (the record's m).
    pub pulse_start: usize,
    #[serde(default)]
    pub cell_offset: usize,
}

/// Reads a record stored as raw interleaved little-endian 32-bit float
/// (re, im) pairs in cell-major order, described by a JSON sidecar.
pub fn read_binary_matrix<P: AsRef<Path>, Q: AsRef<Path>>(
    data_path: P,
    sidecar_path: Q,
) -> Result<RangePulseMatrix> {
    let sidecar: BinarySidecar =
        serde_json::from_str(&std::fs::read_to_string(sidecar_path.as_ref())?)?;
    let bytes = std::fs::read(data_path.as_ref())?;
    let expected = sidecar.cells * sidecar.pulses * 8;
    if bytes.len() != expected {
        return Err(Error::Parse(format!(
            "binary record is {} bytes, sidecar implies {expected}",
            bytes.len()
        )));
    }
    let mut data = CMatrix::zeros(sidecar.cells, sidecar.pulses);
    for (idx, chunk) in bytes.chunks_exact(8).enumerate() {
        let re = f32::from_le_bytes(chunk[0..4].try_into().unwrap());
        let im = f32::from_le_bytes(chunk[4..8].try_into().unwrap());
        let i = idx / sidecar.pulses;
        let j = idx % sidecar.pulses;
        data[(i, j)] = Complex64::new(re as f64, im as f64);
    }
    RangePulseMatrix::new(data, sidecar.cell_offset, sidecar.pulse_start)
}

/// Writes a record in the raw binary format plus its JSON sidecar. Values
/// are rounded to 32-bit floats.
pub fn write_binary_matrix<P: AsRef<Path>, Q: AsRef<Path>>(
    data_path: P,
    sidecar_path: Q,
    mat: &RangePulseMatrix,
) -> Result<()> {
    let mut bytes = Vec::with_capacity(mat.cells() * mat.pulses() * 8);
    for i in 0..mat.cells() {
        for j in 0..mat.pulses() {
            let v = mat.data[(i, j)];
            bytes.extend_from_slice(&(v.re as f32).to_le_bytes());
            bytes.extend_from_slice(&(v.im as f32).to_le_bytes());
        }
    }
    std::fs::write(data_path.as_ref(), bytes)?;
    let sidecar = BinarySidecar {
        cells: mat.cells(),
        pulses: mat.pulses(),
        pulse_start: mat.pulse_start,
        cell_offset: mat.cell_offset,
    };
    let file = std::fs::File::create(sidecar_path.as_ref())?;
    serde_json::to_writer_pretty(file, &sidecar)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn config_k(window_k: usize) -> PreprocessConfig {
        PreprocessConfig {
            window_k,
            ..PreprocessConfig::default()
        }
    }

    fn record_from_fn<F: FnMut(usize, usize) -> Complex64>(
        cells: usize,
        pulses: usize,
        f: F,
    ) -> RangePulseMatrix {
        RangePulseMatrix::new(CMatrix::from_fn(cells, pulses, f), 0, 0).unwrap()
    }

    #[test]
    fn texture_of_constant_modulus_row_is_its_square() {
        let mat = record_from_fn(1, 200, |_, j| Complex64::from_polar(2.0, 0.37 * j as f64));
        let est = estimate_texture(&mat, &config_k(32)).unwrap();
        for &t in est.tau.iter() {
            assert_relative_eq!(t, 4.0, epsilon = 1e-12);
        }
        assert_eq!(est.floored_windows, 0);
    }

    #[test]
    fn texture_window_clips_to_a_single_pulse() {
        let mat = record_from_fn(1, 1, |_, _| Complex64::new(0.0, 3.0));
        let est = estimate_texture(&mat, &config_k(32)).unwrap();
        assert_relative_eq!(est.tau[(0, 0)], 9.0, epsilon = 1e-12);
    }

    #[test]
    fn all_zero_window_is_floored_and_flagged() {
        let mat = RangePulseMatrix {
            data: CMatrix::zeros(1, 5),
            cell_offset: 0,
            pulse_start: 0,
        };
        let est = estimate_texture(&mat, &config_k(2)).unwrap();
        assert_eq!(est.floored_windows, 5);
        assert!(est.tau.iter().all(|&t| t == TEXTURE_FLOOR));
    }

    #[test]
    fn texture_config_rejects_odd_window() {
        let mat = record_from_fn(1, 10, |_, j| Complex64::new(j as f64 + 1.0, 0.0));
        assert!(estimate_texture(&mat, &config_k(5)).is_err());
    }

    #[test]
    fn gaussianize_with_unit_texture_is_identity() {
        let mat = record_from_fn(2, 50, |i, j| Complex64::new(i as f64 + 1.0, j as f64));
        let tau = RMatrix::from_element(2, 50, 1.0);
        let out = gaussianize(&mat, &tau).unwrap();
        assert_eq!(out.data, mat.data);
    }

    #[test]
    fn gaussianize_cancels_input_scale() {
        let cfg = config_k(8);
        let mat = record_from_fn(1, 300, |_, j| {
            Complex64::from_polar(1.0 + 0.3 * (0.11 * j as f64).sin(), 0.9 * j as f64)
        });
        let doubled = record_from_fn(1, 300, |_, j| mat.data[(0, j)] * 2.0);
        let out_a = gaussianize(&mat, &estimate_texture(&mat, &cfg).unwrap().tau).unwrap();
        let out_b = gaussianize(&doubled, &estimate_texture(&doubled, &cfg).unwrap().tau).unwrap();
        for (a, b) in out_a.data.iter().zip(out_b.data.iter()) {
            assert_relative_eq!(a.re, b.re, epsilon = 1e-12);
            assert_relative_eq!(a.im, b.im, epsilon = 1e-12);
        }
    }

    #[test]
    fn gaussianize_recovers_speckle_magnitudes() {
        let speckle = generate_speckle(1, 8192, 5).unwrap();
        let compound = {
            let mut rng = ChaCha8Rng::seed_from_u64(6);
            let mut data = speckle.data.clone();
            let mut j = 0;
            while j < data.ncols() {
                let tau: f64 = rng.sample(Exp1);
                let end = (j + 512).min(data.ncols());
                for jj in j..end {
                    data[(0, jj)] *= tau.sqrt();
                }
                j = end;
            }
            RangePulseMatrix::new(data, 0, 0).unwrap()
        };
        let est = estimate_texture(&compound, &config_k(32)).unwrap();
        let recovered = gaussianize(&compound, &est.tau).unwrap();
        let xs: Vec<f64> = recovered.data.iter().map(|v| v.norm()).collect();
        let ys: Vec<f64> = speckle.data.iter().map(|v| v.norm()).collect();
        let mx = xs.iter().sum::<f64>() / xs.len() as f64;
        let my = ys.iter().sum::<f64>() / ys.len() as f64;
        let mut cov = 0.0;
        let mut vx = 0.0;
        let mut vy = 0.0;
        for (x, y) in xs.iter().zip(&ys) {
            cov += (x - mx) * (y - my);
            vx += (x - mx) * (x - mx);
            vy += (y - my) * (y - my);
        }
        let corr = cov / (vx * vy).sqrt();
        assert!(corr > 0.95, "magnitude correlation {corr}");
    }

    #[test]
    fn standardize_sets_exact_mean_magnitude() {
        let mat = record_from_fn(1, 64, |_, j| Complex64::from_polar(5.0, j as f64));
        let out = standardize(&mat, StandardizeMode::Raw);
        let target = (PI / 2.0).sqrt();
        for v in out.matrix.data.iter() {
            assert_relative_eq!(v.norm(), target, epsilon = 1e-12);
        }
        // General data: the mean magnitude is the fixed point, so a second
        // pass changes nothing.
        let mixed = record_from_fn(2, 500, |i, j| {
            Complex64::new((0.3 * j as f64 + i as f64).sin() + 1.5, 0.2 * j as f64)
        });
        let once = standardize(&mixed, StandardizeMode::Raw);
        for i in 0..2 {
            let mean: f64 = (0..500)
                .map(|j| once.matrix.data[(i, j)].norm())
                .sum::<f64>()
                / 500.0;
            assert_relative_eq!(mean, target, epsilon = 1e-12);
        }
        let twice = standardize(&once.matrix, StandardizeMode::Raw);
        for (a, b) in once.matrix.data.iter().zip(twice.matrix.data.iter()) {
            assert_relative_eq!(a.re, b.re, epsilon = 1e-12);
            assert_relative_eq!(a.im, b.im, epsilon = 1e-12);
        }
    }

    #[test]
    fn standardize_scale_is_near_one_for_unit_rayleigh_data() {
        // CN entries with unit-variance components have Rayleigh(1) moduli.
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mat = record_from_fn(1, 40_001, |_, _| {
            Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        let out = standardize(&mat, StandardizeMode::Raw);
        assert!(
            (out.scales[0] - 1.0).abs() < 0.02,
            "scale {}",
            out.scales[0]
        );
    }

    #[test]
    fn standardize_skips_zero_rows() {
        let mut data = CMatrix::zeros(2, 10);
        for j in 0..10 {
            data[(1, j)] = Complex64::new(1.0, 1.0);
        }
        let mat = RangePulseMatrix::new(data, 3, 0).unwrap();
        let out = standardize(&mat, StandardizeMode::Gaussianized);
        assert_eq!(out.skipped_rows, vec![0]);
        assert_eq!(out.scales[0], 1.0);
        assert!(out.scales[1] > 0.0);
        assert_eq!(out.matrix.cell_offset, 3);
    }

    #[test]
    fn rayleigh_fit_accepts_unit_scale_data_and_rejects_small_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mat = record_from_fn(1, 200_000, |_, _| {
            Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        let report = rayleigh_fit_report(&mat).unwrap();
        assert!(report.ks_statistic < 0.004, "ks {}", report.ks_statistic);
        assert_eq!(report.n_samples, 200_000);
        assert_eq!(report.bins.len(), HISTOGRAM_BINS);
        let small = record_from_fn(1, 50, |_, j| Complex64::new(j as f64 + 1.0, 0.0));
        assert!(rayleigh_fit_report(&small).is_err());
    }

    #[test]
    fn ks_statistic_detects_wrong_scale() {
        // Rayleigh with scale 1/sqrt(2) against the unit-scale reference.
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let scale = std::f64::consts::FRAC_1_SQRT_2;
        let mat = record_from_fn(1, 50_000, |_, _| {
            Complex64::new(
                scale * rng.sample::<f64, _>(StandardNormal),
                scale * rng.sample::<f64, _>(StandardNormal),
            )
        });
        let report = rayleigh_fit_report(&mat).unwrap();
        assert!(report.ks_statistic > 0.1, "ks {}", report.ks_statistic);
    }

    #[test]
    fn pipeline_straightens_compound_gaussian_magnitudes() {
        let raw = generate_compound_gaussian(1, 200_000, 512, 3).unwrap();
        let raw_fit = rayleigh_fit_report(&standardize(&raw, StandardizeMode::Raw).matrix).unwrap();
        let est = estimate_texture(&raw, &config_k(32)).unwrap();
        let cooked = standardize(
            &gaussianize(&raw, &est.tau).unwrap(),
            StandardizeMode::Gaussianized,
        );
        let cooked_fit = rayleigh_fit_report(&cooked.matrix).unwrap();
        assert!(
            cooked_fit.ks_statistic < raw_fit.ks_statistic,
            "cooked {} vs raw {}",
            cooked_fit.ks_statistic,
            raw_fit.ks_statistic
        );
        assert!(
            cooked_fit.ks_statistic < 0.01,
            "cooked {}",
            cooked_fit.ks_statistic
        );
        assert!(raw_fit.ks_statistic > 0.05, "raw {}", raw_fit.ks_statistic);
    }

    #[test]
    fn segmentation_counts_and_energy() {
        let mat = record_from_fn(2, 25, |i, j| Complex64::new(i as f64 + 1.0, j as f64));
        let segs = segment_vectors(&mat, 12).unwrap();
        assert_eq!(segs.len(), 2);
        assert_eq!(segs[0].len(), 2, "25 pulses give 2 vectors of 12");
        let kept: f64 = segs
            .iter()
            .flatten()
            .map(|v| v.iter().map(|z| z.norm_sqr()).sum::<f64>())
            .sum();
        let direct: f64 = (0..2)
            .flat_map(|i| (0..24).map(move |j| (i, j)))
            .map(|(i, j)| mat.data[(i, j)].norm_sqr())
            .sum();
        assert_relative_eq!(kept, direct, epsilon = 1e-12);
        let wide = record_from_fn(1, 40_001, |_, j| Complex64::new(j as f64, 0.0));
        assert_eq!(segment_vectors(&wide, 12).unwrap()[0].len(), 3333);
    }

    #[test]
    fn measured_scm_recovers_identity_for_white_vectors() {
        let speckle = generate_speckle(5, 8 * 20_000, 21).unwrap();
        let segs = segment_vectors(&speckle, 8).unwrap();
        let scm = measured_scm(&segs, 4).unwrap();
        let eye = CMatrix::identity(8, 8);
        let rel = crate::linalg::rel_frobenius(&scm, &eye);
        assert!(rel < 0.05, "relative deviation {rel}");
    }

    #[test]
    fn measured_scm_rejects_rank_deficient_input() {
        let v = CVector::from_fn(6, |i, _| Complex64::new(i as f64 + 1.0, 0.5));
        let cells: Vec<Vec<CVector>> = (0..3).map(|_| vec![v.clone(), v.clone()]).collect();
        match measured_scm(&cells, 2) {
            Err(Error::NotPositiveDefinite(_)) => {}
            other => panic!("expected a positive-definiteness error, got {other:?}"),
        }
    }

    #[test]
    fn measured_scr_hand_case() {
        let p0 = CVector::from_fn(2, |_, _| Complex64::new(1.0, 0.0));
        let eye = CMatrix::identity(2, 2);
        let scr = measured_scr(&p0, &eye, 24).unwrap();
        assert_relative_eq!(scr, 48.0 / 25.0, epsilon = 1e-12);
    }

    #[test]
    fn hotelling_critical_value_matches_reference_table() {
        let crit = hotelling_critical_value(12, 3333, 0.001).unwrap();
        assert!((crit - 2.1371).abs() < 0.001, "critical value {crit}");
        assert!(hotelling_critical_value(12, 12, 0.001).is_err());
    }

    fn draw_sample(n: usize, l_r: usize, mean: f64, rng: &mut ChaCha8Rng) -> Vec<CVector> {
        let scale = std::f64::consts::FRAC_1_SQRT_2;
        (0..l_r)
            .map(|_| {
                CVector::from_fn(n, |_, _| {
                    Complex64::new(
                        mean + scale * rng.sample::<f64, _>(StandardNormal),
                        scale * rng.sample::<f64, _>(StandardNormal),
                    )
                })
            })
            .collect()
    }

    #[test]
    fn hotelling_size_is_near_alpha() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let reps = 2000;
        let alpha = 0.05;
        let mut rejections = 0;
        for _ in 0..reps {
            let sample = draw_sample(4, 200, 0.0, &mut rng);
            if hotelling_t2(&sample, alpha).unwrap().reject {
                rejections += 1;
            }
        }
        let rate = rejections as f64 / reps as f64;
        let band = 4.0 * (alpha * (1.0 - alpha) / reps as f64).sqrt();
        assert!((rate - alpha).abs() < band, "size {rate}");
    }

    #[test]
    fn hotelling_rejects_a_shifted_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let sample = draw_sample(12, 3333, 0.2, &mut rng);
        let outcome = hotelling_t2(&sample, 0.001).unwrap();
        assert!(outcome.reject, "F = {}", outcome.f_statistic);
        assert_eq!(outcome.dof, (24, 2 * (3333 - 12)));
    }

    #[test]
    fn compound_gaussian_has_unit_power_and_is_deterministic() {
        let a = generate_compound_gaussian(2, 60_000, 512, 8).unwrap();
        let b = generate_compound_gaussian(2, 60_000, 512, 8).unwrap();
        assert_eq!(a.data, b.data);
        let power: f64 = a.data.iter().map(|v| v.norm_sqr()).sum::<f64>() / (a.data.len() as f64);
        assert!((power - 1.0).abs() < 0.05, "mean power {power}");
        let c = generate_compound_gaussian(2, 60_000, 512, 9).unwrap();
        assert!(a.data != c.data);
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let mat = record_from_fn(3, 7, |i, j| {
            Complex64::new(0.1 * i as f64 - 0.77, 1.0 / (j as f64 + 1.0))
        });
        let mat = RangePulseMatrix {
            cell_offset: 11,
            pulse_start: 10_000,
            ..mat
        };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("record.csv");
        write_csv_matrix(&path, &mat).unwrap();
        let back = read_csv_matrix(&path).unwrap();
        assert_eq!(back, mat);
    }

    #[test]
    fn csv_rejects_ragged_and_duplicate_input() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "cell,pulse,re,im\n0,0,1.0,0.0\n0,2,1.0,0.0\n").unwrap();
        assert!(read_csv_matrix(&path).is_err());
        std::fs::write(
            &path,
            "cell,pulse,re,im\n0,0,1.0,0.0\n0,1,1.0,0.0\n0,1,2.0,0.0\n0,2,1.0,0.0\n",
        )
        .unwrap();
        assert!(read_csv_matrix(&path).is_err());
    }

    #[test]
    fn binary_round_trip_preserves_f32_values() {
        let mat = record_from_fn(2, 9, |i, j| {
            Complex64::new(
                (i as f64 + 1.0) * 0.333333333333,
                -(j as f64) * 0.111111111111,
            )
        });
        let dir = tempfile::tempdir().unwrap();
        let data_path = dir.path().join("record.bin");
        let sidecar_path = dir.path().join("record.json");
        write_binary_matrix(&data_path, &sidecar_path, &mat).unwrap();
        let back = read_binary_matrix(&data_path, &sidecar_path).unwrap();
        assert_eq!(back.cells(), 2);
        assert_eq!(back.pulses(), 9);
        for (orig, read) in mat.data.iter().zip(back.data.iter()) {
            assert_eq!(orig.re as f32, read.re as f32);
            assert_eq!(orig.im as f32, read.im as f32);
        }
        let truncated = std::fs::read(&data_path).unwrap();
        std::fs::write(&data_path, &truncated[..truncated.len() - 4]).unwrap();
        assert!(read_binary_matrix(&data_path, &sidecar_path).is_err());
    }
}
