//! Swap, CNOT and controlled-phase gates built from `U_{pi/8}` blocks and
//! single-qubit rotations.
//!
//! cargo run --release --example gate_decompositions

use recoupling::gates::{decompose_gate, ideal_gate, GateKind, Layer};

fn main() -> recoupling::Result<()> {
    for kind in [
        GateKind::Swap,
        GateKind::Cnot,
        GateKind::Cphase(0.7),
        GateKind::Uphi(std::f64::consts::PI / 2.0),
    ] {
        let g = decompose_gate(kind)?;
        let err = g
            .compile_ideal()
            .phase_insensitive_distance(&ideal_gate(kind));
        println!(
            "{kind:?}: {} blocks, distance to target {err:.1e}",
            g.uphi_blocks()
        );
        for layer in &g.layers {
            match layer {
                Layer::SingleQubit { qubit, axis, angle } => {
                    println!("  R{axis:?}({angle:+.4}) on {qubit}")
                }
                Layer::UphiBlock => println!("  U_pi/8 block"),
            }
        }
    }
    Ok(())
}
