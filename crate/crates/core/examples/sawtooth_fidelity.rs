//! Fidelity decay of the quantum sawtooth map run on the simulated
//! processor.
//!
//! cargo run --release --example sawtooth_fidelity [nq] [iterations] [runs]
//!
//! `nq` is 4 (chain, default) or 9 (grid; minutes per scheme).

use recoupling::aht::CalibrationOrder;
use recoupling::analysis::{fit_decay, run_experiment, ExperimentConfig, FitModel, RunResult};
use recoupling::model::LatticeKind;
use recoupling::sawtooth::{sawtooth_circuit, SawtoothParams};
use recoupling::sequences::SchemeVariant;

fn main() -> recoupling::Result<()> {
    let arg = |i: usize, d: usize| {
        std::env::args()
            .nth(i)
            .map_or(d, |s| s.parse().expect("integer argument"))
    };
    let (nq, iterations, runs) = (arg(1, 4), arg(2, 25), arg(3, 10));
    let lattice = if nq == 9 {
        LatticeKind::Grid3x3
    } else {
        LatticeKind::Chain4
    };
    let params = SawtoothParams::new(lattice.n_qubits(), -0.5)?;
    println!(
        "{} qubits, {} gates per iteration",
        params.n_q,
        sawtooth_circuit(&params)
            .iter()
            .filter(|e| e.is_gate())
            .count()
    );

    for (scheme, calibration, model) in [
        (
            SchemeVariant::Original,
            CalibrationOrder::Zeroth,
            FitModel::T2N4,
        ),
        (
            SchemeVariant::RandomizedSymmetrized,
            CalibrationOrder::Second,
            FitModel::TN5,
        ),
    ] {
        let config = ExperimentConfig {
            lattice,
            calibration,
            ..ExperimentConfig::sawtooth(scheme, vec![4], iterations, runs, 11)
        };
        let set = run_experiment(&config)?;
        let RunResult::Sawtooth(s) = &set.results[0] else {
            unreachable!()
        };
        println!("\n{scheme}, n = 4:");
        for p in s.series.iter().step_by((iterations / 5).max(1)) {
            println!(
                "  t = {:3}  f = {:.6} +- {:.1e}",
                p.t, p.mean_fidelity, p.stderr
            );
        }
        let fit = fit_decay(&s.decay_points(), model)?;
        println!("  exp(-c x), x = {model}: c = {:.3}", fit.constant);
        if let Some(trace) = &s.metadata.trace {
            println!(
                "  per iteration: {} blocks, {} swaps",
                trace.uphi_blocks, trace.swaps
            );
        }
    }
    Ok(())
}
