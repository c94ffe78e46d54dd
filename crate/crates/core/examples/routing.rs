//! Running a logical circuit on the 3x3 grid, where two-qubit gates need
//! neighbouring qubits and distant operands are brought together by swaps.
//!
//! cargo run --release --example routing

use recoupling::aht::CalibrationOrder;
use recoupling::gates::GateKind;
use recoupling::model::{build_couplings, LatticeKind, LatticeSpec};
use recoupling::processor::{
    execute_circuit, logical_evaluate, route_pair, to_logical_order, GateEvent, Grid,
    ProcessorSpec, QubitMap,
};
use recoupling::qstate::{state_fidelity, StateVector};
use recoupling::rng::run_rng;
use recoupling::sequences::SchemeVariant;

fn main() -> recoupling::Result<()> {
    let grid = Grid::for_lattice(LatticeKind::Grid3x3);
    let (swaps, map) = route_pair(&QubitMap::identity(9), 0, 8, grid)?;
    println!(
        "bringing 0 next to 8: swaps {swaps:?}, map afterwards {:?}",
        map.as_slice()
    );

    let circuit = vec![
        GateEvent::TwoQubit {
            kind: GateKind::Cnot,
            a: 0,
            b: 4,
        },
        GateEvent::TwoQubit {
            kind: GateKind::Cphase(0.9),
            a: 2,
            b: 6,
        },
        GateEvent::TwoQubit {
            kind: GateKind::Swap,
            a: 1,
            b: 7,
        },
        GateEvent::TwoQubit {
            kind: GateKind::Cnot,
            a: 8,
            b: 0,
        },
    ];
    let sys = build_couplings(LatticeSpec::new(LatticeKind::Grid3x3, 1.0));
    let psi = StateVector::random(9, &mut run_rng(3, 0));
    let want = logical_evaluate(&circuit, &psi)?;
    println!("\nscheme       blocks  swaps  fidelity");
    for variant in SchemeVariant::ALL {
        let spec = ProcessorSpec {
            n_swhh: 10,
            variant,
            calibration: CalibrationOrder::Zeroth,
        };
        let (got, map, trace) = execute_circuit(
            &circuit,
            LatticeKind::Grid3x3,
            &sys,
            spec,
            &psi,
            run_rng(3, 1),
        )?;
        let f = state_fidelity(&want, &to_logical_order(&got, &map))?;
        println!(
            "{:<12} {:<7} {:<6} {f:.8}",
            variant.label(),
            trace.uphi_blocks,
            trace.swaps
        );
    }
    Ok(())
}
