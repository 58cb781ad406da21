//! Evaluate every detection statistic on one simulated trial and show the
//! exact algebraic relations tying the canonical forms together.
//!
//! Run with: cargo run --release --example detector_statistics

use nmc_detect::detectors::{self, DetectorKind};
use nmc_detect::montecarlo::{sample_clutter_batch, Hypothesis};
use nmc_detect::stats::{compute_sufficient_stats, estimate_alpha};
use nmc_detect::synth::{generate_scenario, GenTargets};

fn main() -> nmc_detect::Result<()> {
    let targets = GenTargets {
        scr_db: 15.0,
        ..GenTargets::default()
    };
    let (scenario, _) = generate_scenario(12, 3, 24, 0.95, &targets, 1)?;
    let (x, training) = sample_clutter_batch(&scenario, Hypothesis::H1, 1, 9)?
        .pop()
        .unwrap();

    println!("one H1 trial at N = 12, p = 3, L = 24, SCR = 15 dB\n");
    println!("{:>16} {:>14}", "detector", "statistic");
    for kind in DetectorKind::ALL {
        match detectors::evaluate(kind, &x, &training, &scenario.a) {
            Ok(value) => println!("{:>16} {:>14.8}", kind.name(), value),
            // The rank-1 route only exists for p = 1.
            Err(e) => println!("{:>16} {:>14}", kind.name(), format!("({e})")),
        }
    }

    let stats = compute_sufficient_stats(&x, &training, &scenario.a)?;
    println!();
    println!(
        "sufficient statistics: q1 = {:.6}, q2 = {:.6}, beta = {:.6}",
        stats.q1, stats.q2, stats.beta
    );

    let t = detectors::sglrt_nmc(&stats);
    let rao = detectors::srao_nmc(&stats);
    let wald = detectors::samf_nmc(&stats);
    let grad = detectors::gradient_nmc(&stats);

    // One scalar family: every canonical statistic is a monotone function of
    // the pair (t, beta).
    println!();
    println!("exact relations on this trial:");
    println!(
        "  rao  = beta t / (1 + t)   -> {:.3e}",
        (rao - stats.beta * t / (1.0 + t)).abs()
    );
    println!(
        "  wald = t / beta           -> {:.3e}",
        (wald - t / stats.beta).abs()
    );
    println!(
        "  t    = grad / (1 - grad)  -> {:.3e}",
        (t - grad / (1.0 - grad)).abs()
    );

    let alpha_hat = estimate_alpha(&stats, &scenario.a)?;
    println!();
    println!("signal coordinate estimate (true scenario alpha alongside):");
    for i in 0..alpha_hat.len() {
        println!(
            "  alpha[{i}] = {:>24}   true {:>24}",
            format!("{:.4} {:+.4}i", alpha_hat[i].re, alpha_hat[i].im),
            format!("{:.4} {:+.4}i", scenario.alpha[i].re, scenario.alpha[i].im)
        );
    }
    Ok(())
}
