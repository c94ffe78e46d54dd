//! Average Hamiltonian checks of the decoupling and recoupling sequences.
//!
//! cargo run --release --example aht_verify

use recoupling::aht::{j2_coefficient, reference_grid_j2};
use recoupling::analysis::{
    check_decoupling, check_three_spin_h2, h2_pair_coefficients, reference_h2,
};
use recoupling::model::{build_couplings, LatticeKind, LatticeSpec, SpinSystem};

fn main() -> recoupling::Result<()> {
    let chain = build_couplings(LatticeSpec::new(LatticeKind::Chain4, 1.0));
    let check = check_decoupling(&chain, None, 0.02, true)?;
    println!(
        "WHH-4 on the chain: max|h0| = {:.1e}, max|h1| = {:.1e}",
        check.whh4_h0_max, check.whh4_h1_max
    );
    for p in &check.pairs {
        println!(
            "Super-WHH on ({},{}): j0 = {:.6}, |h0 - j0 iso| = {:.1e}, max|h1| = {:.1e}",
            p.k,
            p.l,
            p.j0,
            p.h0_error,
            p.h1_max.unwrap_or(f64::NAN)
        );
    }

    let (jak, jal, jkl, tau) = (1.0, 0.7, 1.3, 0.1);
    let sys = SpinSystem::from_pairs(3, &[(0, 1, jak), (0, 2, jal), (1, 2, jkl)])?;
    let got = h2_pair_coefficients(&sys, 1, 2, tau)?;
    let want = reference_h2(jak, jal, jkl, tau);
    println!("\nsecond-order pair terms (computed, reference):");
    for (name, (g, w)) in ["xx", "yy", "zz"].iter().zip(got.iter().zip(want)) {
        println!("  {name}: {g:+.10e}  {w:+.10e}");
    }
    println!(
        "worst relative error over spectator placements: {:.1e}",
        check_three_spin_h2(jak, jal, jkl, tau)?
    );

    let grid = build_couplings(LatticeSpec::new(LatticeKind::Grid3x3, 1.0));
    println!("\ngrid j2 per pair class:");
    for (want, pairs) in reference_grid_j2() {
        let (k, l) = pairs[0];
        println!(
            "  ({k},{l}) and {} others: {:.12} (reference {want:.12})",
            pairs.len() - 1,
            j2_coefficient(&grid, k, l)?.j2
        );
    }
    Ok(())
}
