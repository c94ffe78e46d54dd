//! Fidelity of the recoupled swap gate against the number of recoupling
//! blocks, for the three schemes, with decay-law fits.
//!
//! cargo run --release --example swap_gate_scaling [runs]

use recoupling::aht::CalibrationOrder;
use recoupling::analysis::{
    fit_decay, run_experiment, DecayPoint, ExperimentConfig, FitModel, RunResult,
};
use recoupling::sequences::SchemeVariant;

fn main() -> recoupling::Result<()> {
    let runs = std::env::args()
        .nth(1)
        .map_or(100, |s| s.parse().expect("runs"));
    let n: Vec<usize> = (4..=20).collect();
    let schemes = [
        (
            SchemeVariant::Original,
            CalibrationOrder::Zeroth,
            FitModel::InvN4,
        ),
        (
            SchemeVariant::Randomized,
            CalibrationOrder::Zeroth,
            FitModel::InvN5,
        ),
        (
            SchemeVariant::RandomizedSymmetrized,
            CalibrationOrder::Second,
            FitModel::InvN5,
        ),
    ];
    for (scheme, calibration, model) in schemes {
        let config = ExperimentConfig {
            calibration,
            ..ExperimentConfig::gate(scheme, n.clone(), runs, 7)
        };
        let set = run_experiment(&config)?;
        let mut points = Vec::new();
        println!("{scheme} (calibration order {calibration})");
        for r in &set.results {
            if let RunResult::GateFidelity(g) = r {
                println!(
                    "  n = {:2}  1 - f = {:.3e} +- {:.1e}",
                    g.n_swhh,
                    1.0 - g.stat.mean,
                    g.stat.stderr
                );
                points.push(DecayPoint {
                    n_swhh: g.n_swhh,
                    t: 0.0,
                    fidelity: g.stat.mean,
                });
            }
        }
        let fit = fit_decay(&points, model)?;
        println!(
            "  f = exp(-c x), x = {model}: c = {:.4}, rms residual {:.1e}\n",
            fit.constant, fit.residual
        );
    }
    Ok(())
}
