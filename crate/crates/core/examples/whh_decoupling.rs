//! Freezing and selectively recoupling a four-spin chain with pulse
//! sequences.
//!
//! cargo run --release --example whh_decoupling

use recoupling::gates::ideal_uphi;
use recoupling::model::{build_couplings, LatticeKind, LatticeSpec};
use recoupling::qstate::{apply_unitary, embed_local, state_fidelity, StateVector};
use recoupling::rng::run_rng;
use recoupling::sequences::{execute_schedule, super_whh_schedule, whh4_schedule, Schedule};

fn main() -> recoupling::Result<()> {
    let sys = build_couplings(LatticeSpec::new(LatticeKind::Chain4, 1.0));
    let psi = StateVector::random(4, &mut run_rng(1, 0));
    println!("one WHH-4 cycle:\n{}", whh4_schedule(0.05, None)?.to_text());

    // Same total time with and without decoupling.
    println!("cycles  tau     free evolution  WHH-4");
    for (cycles, tau) in [(10, 0.05), (40, 0.0125), (160, 0.003125)] {
        let mut whh = Schedule::new();
        let mut free = Schedule::new();
        for _ in 0..cycles {
            whh.extend(&whh4_schedule(tau, None)?);
            free.push_free(6.0 * tau);
        }
        let f_free = state_fidelity(&psi, &execute_schedule(psi.clone(), &free, &sys)?)?;
        let f_whh = state_fidelity(&psi, &execute_schedule(psi.clone(), &whh, &sys)?)?;
        println!("{cycles:<7} {tau:<7} {f_free:<15.6} {f_whh:.10}");
    }

    // Super-WHH blocks leave only the exchange of the chosen pair: phase
    // j0 * 36 tau per block, j0 = 2J/9.
    let phi = std::f64::consts::PI / 4.0;
    let target = apply_unitary(psi.clone(), &embed_local(&ideal_uphi(phi), &[1, 2], 4)?)?;
    println!("\nblocks  fidelity with U_pi/4 on (1,2)");
    for n in [2, 4, 8, 16] {
        let tau = phi / (36.0 * n as f64 * 2.0 / 9.0);
        let mut s = Schedule::new();
        for _ in 0..n {
            s.extend(&super_whh_schedule(1, 2, tau)?);
        }
        let f = state_fidelity(&target, &execute_schedule(psi.clone(), &s, &sys)?)?;
        println!("{n:<7} {f:.8}");
    }
    Ok(())
}
