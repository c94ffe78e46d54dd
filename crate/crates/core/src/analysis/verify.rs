use serde::{Deserialize, Serialize};

use crate::aht::{
    aht_terms, extract_pauli_coefficient, j2_coefficient, H2_DENOMINATOR, REFERENCE_H2_ROWS,
    REFERENCE_MONOMIALS,
};
use crate::error::Result;
use crate::model::{dipole_hamiltonian, SpinSystem};
use crate::qstate::{pauli_string, Operator, PauliAxis};
use crate::sequences::{super_whh_schedule, toggled_sequence, whh4_schedule};

/// Average Hamiltonian of one recoupled pair against the ideal isotropic
/// exchange `j0 (XX + YY + ZZ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairCheck {
    pub k: usize,
    pub l: usize,
    pub coupling: f64,
    pub j0: f64,
    pub j2: f64,
    /// Largest entry of `h0 - j0 (XX + YY + ZZ)`.
    pub h0_error: f64,
    /// Largest entry of `h1`; `None` if first order was skipped.
    pub h1_max: Option<f64>,
    /// Largest difference between mirrored toggling-frame segments.
    pub palindrome_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecouplingCheck {
    /// Largest entries of the WHH-4 `h0` and `h1`.
    pub whh4_h0_max: f64,
    pub whh4_h1_max: f64,
    pub pairs: Vec<PairCheck>,
}

impl DecouplingCheck {
    /// Largest deviation from the ideal zeroth- and first-order terms.
    pub fn worst_error(&self) -> f64 {
        self.pairs
            .iter()
            .flat_map(|p| [p.h0_error, p.h1_max.unwrap_or(0.0)])
            .fold(self.whh4_h0_max.max(self.whh4_h1_max), f64::max)
    }
}

fn isotropic(n_q: usize, k: usize, l: usize, j: f64) -> Result<Operator> {
    let mut op = Operator::zeros(1 << n_q);
    for a in PauliAxis::NONTRIVIAL {
        op = &op + &pauli_string(n_q, &[(k, a), (l, a)])?;
    }
    Ok(op.scale_real(j))
}

/// Checks WHH-4 decoupling and Super-WHH recoupling of every coupled pair
/// (or only `pairs` if given) at spacing `tau`. First order costs two dense
/// products per segment and is skipped when `first_order` is false.
pub fn check_decoupling(
    system: &SpinSystem,
    pairs: Option<&[(usize, usize)]>,
    tau: f64,
    first_order: bool,
) -> Result<DecouplingCheck> {
    let n = system.n_qubits();
    let h = dipole_hamiltonian(system);
    let whh = aht_terms(&toggled_sequence(&whh4_schedule(tau, None)?, &h)?, 1)?;
    let targets: Vec<(usize, usize)> = match pairs {
        Some(p) => p.to_vec(),
        None => system
            .coupled_pairs()
            .iter()
            .map(|&(k, l, _)| (k, l))
            .collect(),
    };
    let mut out = Vec::with_capacity(targets.len());
    for (k, l) in targets {
        let s = j2_coefficient(system, k, l)?;
        let pw = toggled_sequence(&super_whh_schedule(k, l, tau)?, &h)?;
        let t = aht_terms(&pw, if first_order { 1 } else { 0 })?;
        out.push(PairCheck {
            k,
            l,
            coupling: system.coupling(k, l),
            j0: s.j0,
            j2: s.j2,
            h0_error: (&t.h0 - &isotropic(n, k, l, s.j0)?).max_abs(),
            h1_max: first_order.then(|| t.h1.max_abs()),
            palindrome_error: pw.palindrome_error(),
        });
    }
    Ok(DecouplingCheck {
        whh4_h0_max: whh.h0.max_abs(),
        whh4_h1_max: whh.h1.max_abs(),
        pairs: out,
    })
}

/// Reference `xx, yy, zz` coefficients of the second-order term on
/// `(k, l)` for a three-spin system with spectator couplings `J_ak, J_al`.
pub fn reference_h2(jak: f64, jal: f64, jkl: f64, tau: f64) -> [f64; 3] {
    REFERENCE_H2_ROWS.map(|row| {
        row.iter()
            .zip(REFERENCE_MONOMIALS)
            .map(|(c, (ek, el, ekl))| {
                *c as f64 * jak.powi(ek as i32) * jal.powi(el as i32) * jkl.powi(ekl as i32)
            })
            .sum::<f64>()
            * tau
            * tau
            / H2_DENOMINATOR as f64
    })
}

/// Computed `xx, yy, zz` coefficients of the second-order term of the
/// Super-WHH block on `(k, l)`.
pub fn h2_pair_coefficients(system: &SpinSystem, k: usize, l: usize, tau: f64) -> Result<[f64; 3]> {
    let h = dipole_hamiltonian(system);
    let pw = toggled_sequence(&super_whh_schedule(k, l, tau)?, &h)?;
    let t = aht_terms(&pw, 2)?;
    let n = system.n_qubits();
    let mut out = [0.0; 3];
    for (o, ax) in out.iter_mut().zip(PauliAxis::NONTRIVIAL) {
        *o = extract_pauli_coefficient(&t.h2, n, &[(k, ax), (l, ax)])?;
    }
    Ok(out)
}

/// Second-order coefficients of a three-spin system against the reference
/// rows, for each placement of the spectator. Returns the largest relative
/// error.
pub fn check_three_spin_h2(jak: f64, jal: f64, jkl: f64, tau: f64) -> Result<f64> {
    let want = reference_h2(jak, jal, jkl, tau);
    let mut worst = 0.0f64;
    for (a, k, l) in [(0, 1, 2), (2, 0, 1), (1, 0, 2)] {
        let sys = SpinSystem::from_pairs(3, &[(a, k, jak), (a, l, jal), (k, l, jkl)])?;
        let got = h2_pair_coefficients(&sys, k, l, tau)?;
        for (g, w) in got.iter().zip(want) {
            worst = worst.max(((g - w) / w).abs());
        }
    }
    Ok(worst)
}
