//! Cross-check the two threshold routes: exact inversion of the false-alarm
//! law against empirical calibration on simulated clutter.
//!
//! Run with: cargo run --release --example threshold_calibration

use nmc_detect::detectors::DetectorKind;
use nmc_detect::montecarlo::{calibrate_thresholds_mc, estimate_pfa_mc, TrialConfig};
use nmc_detect::perf::{threshold_from_pfa, PerformanceModel};
use nmc_detect::quad::QuadratureConfig;
use nmc_detect::synth::{generate_scenario, GenTargets};

fn main() -> nmc_detect::Result<()> {
    let (n, p, l) = (12, 3, 24);
    let kinds = [
        DetectorKind::SglrtNmc,
        DetectorKind::SraoNmc,
        DetectorKind::SamfNmc,
    ];
    let config = TrialConfig {
        n_threshold_trials: 200_000,
        target_pfa: 1e-3,
        seed: 5,
        ..TrialConfig::default()
    };
    let (scenario, _) = generate_scenario(n, p, l, 0.95, &GenTargets::default(), 11)?;

    println!(
        "N = {n}, p = {p}, L = {l}, PFA = {:.0e}, {} calibration trials\n",
        config.target_pfa, config.n_threshold_trials
    );

    let central = PerformanceModel::central(n, p, l)?;
    let quad = QuadratureConfig::default();
    let empirical = calibrate_thresholds_mc(&kinds, &scenario, &config)?;

    println!(
        "{:>10} {:>16} {:>16} {:>10}",
        "detector", "analytic", "empirical", "rel diff"
    );
    for (kind, &emp) in kinds.iter().zip(&empirical) {
        let exact = threshold_from_pfa(*kind, config.target_pfa, &central, &quad)?;
        println!(
            "{:>10} {:>16.8} {:>16.8} {:>9.2}%",
            kind.name(),
            exact,
            emp,
            100.0 * (emp / exact - 1.0)
        );
    }

    // Closing the loop: clutter-only exceedance of the analytic threshold
    // lands on the target within binomial error.
    println!();
    println!("false-alarm rate at the analytic threshold (fresh trials):");
    for kind in kinds {
        let eta = threshold_from_pfa(kind, config.target_pfa, &central, &quad)?;
        let (rate, se) = estimate_pfa_mc(kind, &scenario, eta, &config)?;
        println!("{:>10}  {:.5e}  (std error {:.1e})", kind.name(), rate, se);
    }
    Ok(())
}
