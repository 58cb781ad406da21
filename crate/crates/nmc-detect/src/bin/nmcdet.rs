//! Batch reproduction tool: scenario synthesis, threshold calibration,
//! performance curves, measured-data preprocessing, and the complex mean
//! test, each as one subcommand writing tidy CSV/JSON artifacts.
//!
//! Exit codes: 0 success, 1 runtime or numeric failure, 2 usage error.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use nmc_detect::detectors::DetectorKind;
use nmc_detect::model::{CovarianceSpec, Scenario};
use nmc_detect::montecarlo::{
    calibrate_threshold_mc, sweep, write_curves_csv, RunManifest, ScenarioTemplate, SweepSpec,
    SweepVariable, TrialConfig,
};
use nmc_detect::perf::{has_analytic_law, threshold_from_pfa, PerformanceModel};
use nmc_detect::pipeline::{
    estimate_texture, gaussianize, hotelling_t2, rayleigh_fit_report, read_binary_matrix,
    read_csv_matrix, segment_vectors, standardize, write_binary_matrix, write_csv_matrix,
    HotellingOutcome, PreprocessConfig, RangePulseMatrix, StandardizeMode,
};
use nmc_detect::quad::QuadratureConfig;
use nmc_detect::synth::{generate_scenario, GenTargets};

/// Errors split by exit code: flag problems exit 2, everything after
/// validation exits 1.
enum CliError {
    Usage(String),
    Runtime(anyhow::Error),
}

type CliResult<T = ()> = Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

impl<E: Into<anyhow::Error>> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError::Runtime(e.into())
    }
}

#[derive(Parser)]
#[command(
    name = "nmcdet",
    version,
    about = "Adaptive subspace detection in nonzero-mean Gaussian clutter",
    after_help = "Thread count for Monte Carlo runs follows --threads, then the \
RAYON_NUM_THREADS environment variable, then the available cores. Results are \
bit-identical for any thread count at a fixed seed."
)]
struct Cli {
    /// Worker threads for Monte Carlo runs (default: available cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize a detection scenario hitting alignment and energy targets.
    GenScenario(GenScenarioArgs),
    /// Compute a detection threshold for a target false-alarm probability.
    Threshold(ThresholdArgs),
    /// Sweep one scenario knob and estimate detection or false-alarm curves.
    Curve(CurveArgs),
    /// Run the clutter preprocessing chain on a range-pulse record.
    Preprocess(PreprocessArgs),
    /// Test each range cell's vectors for a nonzero population mean.
    Hotelling(HotellingArgs),
}

#[derive(Args)]
struct GenScenarioArgs {
    /// Vector length N.
    #[arg(long, default_value_t = 12)]
    n: usize,
    /// Signal subspace dimension p.
    #[arg(long, default_value_t = 3)]
    p: usize,
    /// Training vector count L.
    #[arg(long, default_value_t = 24)]
    l: usize,
    /// One-lag correlation of the exponential Toeplitz clutter covariance.
    #[arg(long, default_value_t = 0.95)]
    eps: f64,
    /// Squared alignment target between signature and subspace, in [0, 1].
    #[arg(long = "cos2-theta", default_value_t = 1.0)]
    cos2_theta: f64,
    /// Signal-to-clutter ratio target in dB (hit exactly).
    #[arg(long = "scr-db", default_value_t = 20.0)]
    scr_db: f64,
    /// Whitened clutter-mean energy target in dB (hit exactly).
    #[arg(long = "xi-db", default_value_t = 35.0)]
    xi_db: f64,
    /// Squared alignment target between clutter mean and signature, in [0, 1].
    #[arg(long = "cos2-phi", default_value_t = 0.3)]
    cos2_phi: f64,
    /// Blend-weight candidates for the signature alignment search.
    #[arg(long, default_value_t = 300)]
    weight_candidates: usize,
    /// Steering-frequency candidates for the mean alignment search.
    #[arg(long, default_value_t = 500)]
    freq_candidates: usize,
    /// Draw search candidates uniformly at random instead of on even grids.
    #[arg(long)]
    random_candidates: bool,
    /// Polish the winning candidates with a bounded golden-section search.
    #[arg(long)]
    refine: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Scenario JSON path; the synthesis report and run manifest are written
    /// next to it.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ThresholdMethod {
    /// Invert the exact false-alarm law (centered detectors only).
    Analytic,
    /// Calibrate on simulated clutter-only trials.
    Mc,
}

#[derive(Args)]
struct ThresholdArgs {
    /// Scenario JSON produced by gen-scenario.
    #[arg(long)]
    scenario: PathBuf,
    /// Detector name, e.g. sglrt-nmc, srao-nmc, samf-nmc, sglrt.
    #[arg(long)]
    detector: String,
    /// Target false-alarm probability, in (0, 1).
    #[arg(long, default_value_t = 1e-3)]
    pfa: f64,
    #[arg(long, value_enum, default_value_t = ThresholdMethod::Analytic)]
    method: ThresholdMethod,
    /// Clutter-only trials for the mc method.
    #[arg(long, default_value_t = 100_000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct CurveArgs {
    /// Scenario JSON fixing the operating point; the sweep regenerates the
    /// scenario at each grid value, holding this point's other metrics.
    #[arg(long)]
    scenario: PathBuf,
    /// Comma-separated detector names.
    #[arg(long, default_value = "sglrt-nmc,srao-nmc,samf-nmc")]
    detectors: String,
    /// Swept knob: scr, cos2theta, xi, cos2phi, L, or p.
    #[arg(long)]
    sweep: String,
    /// Grid values, either comma-separated or start:step:end (inclusive).
    #[arg(long)]
    grid: String,
    /// Target false-alarm probability, in (0, 1).
    #[arg(long, default_value_t = 1e-3)]
    pfa: f64,
    /// Trials per grid point for the measured probability.
    #[arg(long, default_value_t = 10_000)]
    trials: usize,
    /// Clutter-only trials per threshold calibration.
    #[arg(long = "threshold-trials", default_value_t = 100_000)]
    threshold_trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Seed for the per-point scenario regeneration.
    #[arg(long = "gen-seed", default_value_t = 0)]
    gen_seed: u64,
    /// Curve CSV path; the run manifest is written next to it.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RecordFormat {
    /// Header cell,pulse,re,im; one sample per row.
    Csv,
    /// Raw interleaved little-endian f32 (re, im) pairs plus a JSON sidecar.
    Binary,
}

#[derive(Args)]
struct PreprocessArgs {
    /// Input range-pulse record.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = RecordFormat::Csv)]
    format: RecordFormat,
    /// Sidecar JSON for binary input (default: <in>.json).
    #[arg(long)]
    sidecar: Option<PathBuf>,
    /// Texture window width K; the estimate averages K + 1 samples.
    #[arg(long, default_value_t = 32)]
    k: usize,
    /// First pulse of the processed slice, as an absolute index
    /// (default: the record's own start).
    #[arg(long)]
    m: Option<usize>,
    /// Pulse count of the processed slice (default: the whole record).
    #[arg(long)]
    lc: Option<usize>,
    /// Detection vector length N used for segmentation.
    #[arg(long, default_value_t = 12)]
    n: usize,
    /// Skip the texture estimate and Gaussianization stage.
    #[arg(long)]
    no_texture: bool,
    /// Output prefix; writes <prefix>.processed.<ext>, <prefix>.fit.json,
    /// <prefix>.fit.csv, and <prefix>.manifest.json.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct HotellingArgs {
    /// Input range-pulse record, one test per range cell.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = RecordFormat::Csv)]
    format: RecordFormat,
    /// Sidecar JSON for binary input (default: <in>.json).
    #[arg(long)]
    sidecar: Option<PathBuf>,
    /// Vector length N; each cell is cut into floor(pulses / N) vectors.
    #[arg(long, default_value_t = 12)]
    n: usize,
    /// Significance level of the mean test.
    #[arg(long, default_value_t = 0.001)]
    alpha: f64,
    /// Optional JSON report path.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if threads == 0 {
            eprintln!("usage error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        // Ignore the error if a global pool already exists.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    let result = match cli.command {
        Command::GenScenario(args) => cmd_gen_scenario(args),
        Command::Threshold(args) => cmd_threshold(args),
        Command::Curve(args) => cmd_curve(args),
        Command::Preprocess(args) => cmd_preprocess(args),
        Command::Hotelling(args) => cmd_hotelling(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn check_unit_interval(value: f64, what: &str) -> CliResult {
    if !(0.0..=1.0).contains(&value) {
        return Err(usage(format!("{what} must lie in [0, 1], got {value}")));
    }
    Ok(())
}

fn check_pfa(pfa: f64) -> CliResult {
    if !(pfa > 0.0 && pfa < 1.0) {
        return Err(usage(format!(
            "false-alarm probability must lie strictly in (0, 1), got {pfa}"
        )));
    }
    Ok(())
}

fn parse_detector(name: &str) -> CliResult<DetectorKind> {
    DetectorKind::from_str(name.trim()).map_err(|e| usage(e.to_string()))
}

/// Sibling path sharing `out`'s directory and stem: scenario.json ->
/// scenario.report.json.
fn sibling(out: &Path, suffix: &str) -> PathBuf {
    let stem = out.file_stem().unwrap_or_default().to_string_lossy();
    out.with_file_name(format!("{stem}.{suffix}"))
}

fn command_echo() -> String {
    let args: Vec<String> = std::env::args().collect();
    args.join(" ")
}

fn cmd_gen_scenario(args: GenScenarioArgs) -> CliResult {
    check_unit_interval(args.cos2_theta, "subspace alignment target")?;
    check_unit_interval(args.cos2_phi, "mean alignment target")?;
    if !args.scr_db.is_finite() || !args.xi_db.is_finite() {
        return Err(usage("energy targets must be finite dB values"));
    }
    if args.n == 0 || args.p == 0 || args.p >= args.n || args.l < args.n {
        return Err(usage(format!(
            "need 0 < p < N <= L, got N = {}, p = {}, L = {}",
            args.n, args.p, args.l
        )));
    }
    if !(0.0..1.0).contains(&args.eps) {
        return Err(usage(format!(
            "Toeplitz correlation must lie in [0, 1), got {}",
            args.eps
        )));
    }
    if args.weight_candidates < 2 || args.freq_candidates < 2 {
        return Err(usage("candidate counts must be at least 2"));
    }

    let targets = GenTargets {
        cos2_theta_star: args.cos2_theta,
        scr_db: args.scr_db,
        xi_db: args.xi_db,
        cos2_phi_star: args.cos2_phi,
        n_weight_candidates: args.weight_candidates,
        n_freq_candidates: args.freq_candidates,
        random_candidates: args.random_candidates,
        refine: args.refine,
    };
    let mut manifest = RunManifest::new(
        command_echo(),
        args.seed,
        serde_json::json!({
            "n": args.n, "p": args.p, "l": args.l, "eps": args.eps, "targets": targets,
        }),
    );

    let (scenario, report) =
        generate_scenario(args.n, args.p, args.l, args.eps, &targets, args.seed)?;
    let metrics = scenario.metrics()?;

    scenario.write_json(&args.out)?;
    manifest.record_output(&args.out);

    let report_path = sibling(&args.out, "report.json");
    let report_doc = serde_json::json!({
        "targets": targets,
        "report": report,
        "metrics": metrics,
    });
    serde_json::to_writer_pretty(std::fs::File::create(&report_path)?, &report_doc)?;
    manifest.record_output(&report_path);

    let manifest_path = sibling(&args.out, "manifest.json");
    manifest.finish();
    manifest.write_json(&manifest_path)?;

    println!(
        "scenario N={} p={} L={} -> {}",
        args.n,
        args.p,
        args.l,
        args.out.display()
    );
    println!(
        "achieved cos2_theta={:.6} scr={:.4} dB xi={:.4} dB cos2_phi={:.6}",
        report.achieved_cos2_theta,
        10.0 * report.achieved_scr.log10(),
        10.0 * report.achieved_xi.log10(),
        report.achieved_cos2_phi
    );
    Ok(())
}

#[derive(Serialize)]
struct ThresholdRecord {
    detector: String,
    method: &'static str,
    target_pfa: f64,
    threshold: f64,
    n: usize,
    p: usize,
    l: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    trials: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    scenario: String,
}

fn cmd_threshold(args: ThresholdArgs) -> CliResult {
    check_pfa(args.pfa)?;
    let kind = parse_detector(&args.detector)?;
    if args.method == ThresholdMethod::Analytic && !has_analytic_law(kind) {
        return Err(usage(format!(
            "no analytic false-alarm law for detector '{kind}'; closed-form \
thresholds exist for sglrt-nmc, srao-nmc, and samf-nmc (use --method mc)"
        )));
    }
    if args.trials == 0 {
        return Err(usage("--trials must be at least 1"));
    }
    let scenario = Scenario::read_json(&args.scenario)?;

    let record = match args.method {
        ThresholdMethod::Analytic => {
            let model = PerformanceModel::central(scenario.n, scenario.p, scenario.l)?;
            let eta = threshold_from_pfa(kind, args.pfa, &model, &QuadratureConfig::default())?;
            ThresholdRecord {
                detector: kind.name().to_string(),
                method: "analytic",
                target_pfa: args.pfa,
                threshold: eta,
                n: scenario.n,
                p: scenario.p,
                l: scenario.l,
                trials: None,
                seed: None,
                scenario: args.scenario.display().to_string(),
            }
        }
        ThresholdMethod::Mc => {
            let config = TrialConfig {
                n_threshold_trials: args.trials,
                seed: args.seed,
                target_pfa: args.pfa,
                ..TrialConfig::default()
            };
            let eta = calibrate_threshold_mc(kind, &scenario, &config)?;
            ThresholdRecord {
                detector: kind.name().to_string(),
                method: "mc",
                target_pfa: args.pfa,
                threshold: eta,
                n: scenario.n,
                p: scenario.p,
                l: scenario.l,
                trials: Some(args.trials),
                seed: Some(args.seed),
                scenario: args.scenario.display().to_string(),
            }
        }
    };
    println!(
        "{}",
        serde_json::to_string_pretty(&record).map_err(anyhow::Error::from)?
    );
    Ok(())
}

/// Grid syntax: "1,2,5" or "0:5:25" (start:step:end, inclusive within a
/// half-step tolerance).
fn parse_grid(text: &str) -> CliResult<Vec<f64>> {
    let parse_one = |s: &str| -> CliResult<f64> {
        s.trim()
            .parse::<f64>()
            .map_err(|_| usage(format!("grid value '{s}' is not a number")))
    };
    let values: Vec<f64> = if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(usage(format!(
                "range grid must be start:step:end, got '{text}'"
            )));
        }
        let (start, step, end) = (
            parse_one(parts[0])?,
            parse_one(parts[1])?,
            parse_one(parts[2])?,
        );
        if step <= 0.0 || end < start {
            return Err(usage("range grid needs step > 0 and end >= start"));
        }
        let count = ((end - start) / step + 0.5).floor() as usize;
        (0..=count).map(|i| start + step * i as f64).collect()
    } else {
        text.split(',')
            .map(parse_one)
            .collect::<CliResult<Vec<f64>>>()?
    };
    if values.is_empty() {
        return Err(usage("grid is empty"));
    }
    Ok(values)
}

/// Rebuilds a synthesis template pinned to a realized scenario's measured
/// operating point, so a sweep holds everything but the swept knob.
fn template_from_scenario(scenario: &Scenario, gen_seed: u64) -> CliResult<ScenarioTemplate> {
    let eps = match scenario.cov_spec() {
        CovarianceSpec::Toeplitz { toeplitz_eps } => *toeplitz_eps,
        CovarianceSpec::Entries { .. } => {
            return Err(CliError::Runtime(anyhow::anyhow!(
                "curve sweeps regenerate the scenario per grid point and need \
a Toeplitz covariance; this scenario stores explicit entries"
            )))
        }
    };
    let metrics = scenario.metrics()?;
    // A mean-free scenario has zero whitened energy; pin the floor of the
    // dB scale instead of -inf.
    let xi_db = if metrics.xi > 1e-30 {
        10.0 * metrics.xi.log10()
    } else {
        -300.0
    };
    Ok(ScenarioTemplate {
        n: scenario.n,
        p: scenario.p,
        l: scenario.l,
        toeplitz_eps: eps,
        targets: GenTargets {
            cos2_theta_star: metrics.cos2_theta.clamp(0.0, 1.0),
            scr_db: 10.0 * metrics.scr.log10(),
            xi_db,
            cos2_phi_star: metrics.cos2_phi.clamp(0.0, 1.0),
            ..GenTargets::default()
        },
        gen_seed,
    })
}

fn cmd_curve(args: CurveArgs) -> CliResult {
    check_pfa(args.pfa)?;
    let kinds: Vec<DetectorKind> = args
        .detectors
        .split(',')
        .map(parse_detector)
        .collect::<CliResult<Vec<_>>>()?;
    if kinds.is_empty() {
        return Err(usage("no detectors requested"));
    }
    let variable = SweepVariable::from_str(&args.sweep).map_err(|e| usage(e.to_string()))?;
    let grid = parse_grid(&args.grid)?;
    if args.trials == 0 || args.threshold_trials == 0 {
        return Err(usage("trial counts must be at least 1"));
    }
    if args.pfa * (args.threshold_trials as f64) < 10.0 {
        return Err(usage(format!(
            "{} threshold trials resolve false-alarm rates only down to ~10/{}; \
raise --threshold-trials or --pfa",
            args.threshold_trials, args.threshold_trials
        )));
    }

    let scenario = Scenario::read_json(&args.scenario)?;
    let template = template_from_scenario(&scenario, args.gen_seed)?;
    let spec = SweepSpec {
        variable,
        grid: grid.clone(),
    };
    let config = TrialConfig {
        n_threshold_trials: args.threshold_trials,
        n_pd_trials: args.trials,
        seed: args.seed,
        target_pfa: args.pfa,
    };

    let mut manifest = RunManifest::new(
        command_echo(),
        args.seed,
        serde_json::json!({
            "template": template,
            "sweep": spec,
            "trials": config,
            "detectors": kinds.iter().map(|k| k.name()).collect::<Vec<_>>(),
        }),
    );

    let curves = sweep(&kinds, &template, &spec, &config)?;
    write_curves_csv(&args.out, &curves)?;
    manifest.record_output(&args.out);
    let manifest_path = sibling(&args.out, "manifest.json");
    manifest.finish();
    manifest.write_json(&manifest_path)?;

    let requested = grid.len();
    for curve in &curves {
        let mut line = format!(
            "{} [{}] {} points",
            curve.detector,
            curve.provenance,
            curve.points.len()
        );
        if curve.points.len() < requested {
            let _ = write!(
                line,
                " ({} grid values infeasible)",
                requested - curve.points.len()
            );
        }
        println!("{line}");
    }
    println!("curves -> {}", args.out.display());
    Ok(())
}

fn read_record(
    input: &Path,
    format: RecordFormat,
    sidecar: &Option<PathBuf>,
) -> CliResult<RangePulseMatrix> {
    let mat = match format {
        RecordFormat::Csv => read_csv_matrix(input)?,
        RecordFormat::Binary => {
            let sidecar_path = sidecar
                .clone()
                .unwrap_or_else(|| input.with_extension("json"));
            read_binary_matrix(input, &sidecar_path)?
        }
    };
    Ok(mat)
}

/// Cuts the record to the requested absolute pulse window [m, m + lc).
fn slice_pulses(
    mat: &RangePulseMatrix,
    m: Option<usize>,
    lc: Option<usize>,
) -> CliResult<RangePulseMatrix> {
    let start_abs = m.unwrap_or(mat.pulse_start);
    let count = lc.unwrap_or_else(|| {
        mat.pulses()
            .saturating_sub(start_abs.saturating_sub(mat.pulse_start))
    });
    if start_abs < mat.pulse_start
        || start_abs + count > mat.pulse_start + mat.pulses()
        || count == 0
    {
        return Err(CliError::Runtime(anyhow::anyhow!(
            "requested pulses [{}, {}) but the record covers [{}, {})",
            start_abs,
            start_abs + count,
            mat.pulse_start,
            mat.pulse_start + mat.pulses()
        )));
    }
    let offset = start_abs - mat.pulse_start;
    let data = mat.data.columns(offset, count).into_owned();
    Ok(RangePulseMatrix::new(data, mat.cell_offset, start_abs).map_err(anyhow::Error::from)?)
}

fn cmd_preprocess(args: PreprocessArgs) -> CliResult {
    let config = PreprocessConfig {
        window_k: args.k,
        pulse_start: args.m.unwrap_or(0),
        pulse_count: args.lc.unwrap_or(1).max(args.n),
        vector_len: args.n,
    };
    config.validate().map_err(|e| match e {
        nmc_detect::Error::Domain(msg) => usage(msg),
        other => usage(other.to_string()),
    })?;

    let raw = read_record(&args.input, args.format, &args.sidecar)?;
    let raw = slice_pulses(&raw, args.m, args.lc)?;

    let mut manifest = RunManifest::new(
        command_echo(),
        0,
        serde_json::json!({
            "input": args.input.display().to_string(),
            "k": args.k,
            "m": raw.pulse_start,
            "lc": raw.pulses(),
            "n": args.n,
            "texture": !args.no_texture,
        }),
    );

    let raw_fit = rayleigh_fit_report(&standardize(&raw, StandardizeMode::Raw).matrix)?;

    let (cooked, mode, floored) = if args.no_texture {
        (raw.clone(), StandardizeMode::Raw, 0)
    } else {
        let estimate = estimate_texture(&raw, &config)?;
        (
            gaussianize(&raw, &estimate.tau)?,
            StandardizeMode::Gaussianized,
            estimate.floored_windows,
        )
    };
    let standardized = standardize(&cooked, mode);
    let fit = rayleigh_fit_report(&standardized.matrix)?;
    let segments = segment_vectors(&standardized.matrix, args.n)?;

    let ext = match args.format {
        RecordFormat::Csv => "csv",
        RecordFormat::Binary => "bin",
    };
    let processed_path = sibling(&args.out, &format!("processed.{ext}"));
    match args.format {
        RecordFormat::Csv => write_csv_matrix(&processed_path, &standardized.matrix)?,
        RecordFormat::Binary => {
            let sidecar_path = sibling(&args.out, "processed.json");
            write_binary_matrix(&processed_path, &sidecar_path, &standardized.matrix)?;
            manifest.record_output(&sidecar_path);
        }
    }
    manifest.record_output(&processed_path);

    let fit_json = sibling(&args.out, "fit.json");
    fit.write_json(&fit_json)?;
    manifest.record_output(&fit_json);
    let fit_csv = sibling(&args.out, "fit.csv");
    fit.write_histogram_csv(&fit_csv)?;
    manifest.record_output(&fit_csv);

    let manifest_path = sibling(&args.out, "manifest.json");
    manifest.finish();
    manifest.write_json(&manifest_path)?;

    println!(
        "{} cells x {} pulses, {} vectors of length {} per cell",
        standardized.matrix.cells(),
        standardized.matrix.pulses(),
        segments[0].len(),
        args.n
    );
    if floored > 0 {
        println!("warning: {floored} all-zero texture windows floored");
    }
    if !standardized.skipped_rows.is_empty() {
        println!(
            "warning: {} all-zero cells left unscaled",
            standardized.skipped_rows.len()
        );
    }
    println!(
        "magnitude fit vs unit Rayleigh: KS = {:.5} raw, {:.5} processed",
        raw_fit.ks_statistic, fit.ks_statistic
    );
    println!("processed record -> {}", processed_path.display());
    Ok(())
}

#[derive(Serialize)]
struct HotellingRow {
    cell: usize,
    vectors: usize,
    #[serde(flatten)]
    outcome: HotellingOutcome,
}

fn cmd_hotelling(args: HotellingArgs) -> CliResult {
    if !(args.alpha > 0.0 && args.alpha < 1.0) {
        return Err(usage(format!(
            "significance level must lie strictly in (0, 1), got {}",
            args.alpha
        )));
    }
    if args.n == 0 {
        return Err(usage("--n must be at least 1"));
    }
    let record = read_record(&args.input, args.format, &args.sidecar)?;
    let segments = segment_vectors(&record, args.n)?;

    let mut rows = Vec::with_capacity(segments.len());
    println!(
        "{:>6} {:>6} {:>14} {:>14}  decision",
        "cell", "L_r", "F", "F_crit"
    );
    for (i, vectors) in segments.iter().enumerate() {
        let outcome = hotelling_t2(vectors, args.alpha)?;
        println!(
            "{:>6} {:>6} {:>14.6} {:>14.6}  {}",
            record.cell_offset + i,
            vectors.len(),
            outcome.f_statistic,
            outcome.critical_value,
            if outcome.reject {
                "mean != 0"
            } else {
                "mean = 0"
            }
        );
        rows.push(HotellingRow {
            cell: record.cell_offset + i,
            vectors: vectors.len(),
            outcome,
        });
    }
    let rejected = rows.iter().filter(|r| r.outcome.reject).count();
    println!(
        "{rejected} of {} cells reject the zero-mean hypothesis at alpha = {}",
        rows.len(),
        args.alpha
    );
    if let Some(out) = &args.out {
        serde_json::to_writer_pretty(std::fs::File::create(out)?, &rows)
            .map_err(anyhow::Error::from)?;
        println!("report -> {}", out.display());
    }
    Ok(())
}
