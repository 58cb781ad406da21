//! Detection-probability sweep across signal-to-clutter ratio, estimated by
//! Monte Carlo and overlaid with the exact laws.
//!
//! Run with: cargo run --release --example theory_vs_simulation

use std::collections::HashMap;

use nmc_detect::detectors::DetectorKind;
use nmc_detect::montecarlo::{
    sweep, Provenance, ScenarioTemplate, SweepSpec, SweepVariable, TrialConfig,
};
use nmc_detect::synth::GenTargets;

fn main() -> nmc_detect::Result<()> {
    let template = ScenarioTemplate {
        n: 12,
        p: 3,
        l: 24,
        toeplitz_eps: 0.95,
        targets: GenTargets::default(),
        gen_seed: 0,
    };
    let spec = SweepSpec {
        variable: SweepVariable::ScrDb,
        grid: (1..=5).map(|k| 5.0 * k as f64).collect(),
    };
    let config = TrialConfig {
        n_pd_trials: 4000,
        target_pfa: 1e-3,
        seed: 0,
        ..TrialConfig::default()
    };
    let kinds = [
        DetectorKind::SglrtNmc,
        DetectorKind::SraoNmc,
        DetectorKind::SamfNmc,
    ];

    println!(
        "PD vs SCR at N = 12, p = 3, L = 24, PFA = 1e-3, {} trials/point\n",
        config.n_pd_trials
    );
    let curves = sweep(&kinds, &template, &spec, &config)?;

    // Index curves by (detector, provenance) to print matched pairs.
    let by_key: HashMap<(DetectorKind, Provenance), _> = curves
        .iter()
        .map(|c| ((c.detector, c.provenance), c))
        .collect();

    for kind in kinds {
        let mc = &by_key[&(kind, Provenance::MonteCarlo)];
        let th = &by_key[&(kind, Provenance::Analytic)];
        println!("{}:", kind.name());
        println!(
            "{:>8} {:>12} {:>12} {:>12} {:>8}",
            "SCR dB", "simulated", "exact law", "gap", "gap/se"
        );
        for (m, t) in mc.points.iter().zip(&th.points) {
            let gap = m.estimate - t.estimate;
            // A saturated estimate has zero binomial error; skip the ratio.
            let ratio = if m.std_error > 0.0 {
                format!("{:>8.2}", gap / m.std_error)
            } else {
                format!("{:>8}", "-")
            };
            println!(
                "{:>8.0} {:>12.4} {:>12.4} {:>+12.4} {ratio}",
                m.sweep_value, m.estimate, t.estimate, gap
            );
        }
        println!();
    }
    println!("gaps sit within a few standard errors when the laws are right.");
    Ok(())
}
