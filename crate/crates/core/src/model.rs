//! Spin systems and their Hamiltonians.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qstate::{pauli_string, Operator, OperatorKind, PauliAxis, C64, MAX_DENSE_QUBITS};

/// Qubit register with pairwise dipolar couplings and optional Larmor
/// frequencies.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpinSystem {
    n_q: usize,
    /// Row-major symmetric `n_q x n_q`, zero diagonal.
    couplings: Vec<f64>,
    larmor: Vec<f64>,
}

impl SpinSystem {
    /// An uncoupled register of `n_q >= 2` qubits.
    pub fn new(n_q: usize) -> Result<Self> {
        if n_q < 2 {
            return Err(Error::InvalidParameter(format!(
                "spin system needs at least 2 qubits, got {n_q}"
            )));
        }
        if n_q > MAX_DENSE_QUBITS {
            return Err(Error::ResourceLimit {
                n_q,
                limit: MAX_DENSE_QUBITS,
            });
        }
        Ok(Self {
            n_q,
            couplings: vec![0.0; n_q * n_q],
            larmor: vec![0.0; n_q],
        })
    }

    /// Builds a system from `(k, l, J_kl)` triples.
    pub fn from_pairs(n_q: usize, pairs: &[(usize, usize, f64)]) -> Result<Self> {
        let mut s = Self::new(n_q)?;
        for &(k, l, j) in pairs {
            s.set_coupling(k, l, j)?;
        }
        Ok(s)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_q
    }

    pub fn coupling(&self, k: usize, l: usize) -> f64 {
        self.couplings[k * self.n_q + l]
    }

    pub fn set_coupling(&mut self, k: usize, l: usize, j: f64) -> Result<()> {
        self.check(k)?;
        self.check(l)?;
        if k == l {
            return Err(Error::SamePair(k));
        }
        self.couplings[k * self.n_q + l] = j;
        self.couplings[l * self.n_q + k] = j;
        Ok(())
    }

    pub fn larmor(&self) -> &[f64] {
        &self.larmor
    }

    pub fn set_larmor(&mut self, k: usize, omega: f64) -> Result<()> {
        self.check(k)?;
        self.larmor[k] = omega;
        Ok(())
    }

    /// Nonzero couplings as `(k, l, J)` with `k < l`.
    pub fn coupled_pairs(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for k in 0..self.n_q {
            for l in k + 1..self.n_q {
                let j = self.coupling(k, l);
                if j != 0.0 {
                    out.push((k, l, j));
                }
            }
        }
        out
    }

    /// Same geometry with every coupling multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        let mut s = self.clone();
        s.couplings.iter_mut().for_each(|j| *j *= c);
        s
    }

    fn check(&self, q: usize) -> Result<()> {
        if q >= self.n_q {
            return Err(Error::QubitOutOfRange {
                index: q,
                n_q: self.n_q,
            });
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LatticeKind {
    /// Four qubits in a line, nearest-neighbour coupling.
    Chain4,
    /// Nine qubits on a square grid; label `3 * row + col`, row 0 at the
    /// bottom.
    Grid3x3,
}

impl LatticeKind {
    pub fn n_qubits(self) -> usize {
        match self {
            LatticeKind::Chain4 => 4,
            LatticeKind::Grid3x3 => 9,
        }
    }
}

impl fmt::Display for LatticeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LatticeKind::Chain4 => "chain4",
            LatticeKind::Grid3x3 => "grid3x3",
        })
    }
}

impl FromStr for LatticeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "chain4" => Ok(LatticeKind::Chain4),
            "grid3x3" => Ok(LatticeKind::Grid3x3),
            other => Err(Error::InvalidParameter(format!(
                "unknown lattice {other:?}"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub kind: LatticeKind,
    pub base_coupling: f64,
}

impl LatticeSpec {
    pub fn new(kind: LatticeKind, base_coupling: f64) -> Self {
        Self {
            kind,
            base_coupling,
        }
    }
}

/// Diagonal neighbours on the grid couple at `J / 2^{3/2}` (distance
/// `sqrt 2`, dipolar `1/r^3`).
pub fn diagonal_factor() -> f64 {
    2f64.powf(-1.5)
}

pub fn build_couplings(spec: LatticeSpec) -> SpinSystem {
    let j = spec.base_coupling;
    let n = spec.kind.n_qubits();
    let mut s = SpinSystem::new(n).expect("lattice sizes are valid");
    match spec.kind {
        LatticeKind::Chain4 => {
            for k in 0..3 {
                s.set_coupling(k, k + 1, j).expect("in range");
            }
        }
        LatticeKind::Grid3x3 => {
            let label = |row: usize, col: usize| 3 * row + col;
            for row in 0..3 {
                for col in 0..3 {
                    if col < 2 {
                        s.set_coupling(label(row, col), label(row, col + 1), j)
                            .unwrap();
                    }
                    if row < 2 {
                        s.set_coupling(label(row, col), label(row + 1, col), j)
                            .unwrap();
                    }
                    if row < 2 && col < 2 {
                        let jd = j * diagonal_factor();
                        s.set_coupling(label(row, col), label(row + 1, col + 1), jd)
                            .unwrap();
                        s.set_coupling(label(row, col + 1), label(row + 1, col), jd)
                            .unwrap();
                    }
                }
            }
        }
    }
    s
}

/// `sum_{k<l} (J_kl / 4)(2 ZZ - XX - YY)`, built directly in the
/// computational basis.
pub fn dipole_hamiltonian(system: &SpinSystem) -> Operator {
    let n = system.n_qubits();
    let dim = 1usize << n;
    let mut h = Operator::zeros(dim);
    for (k, l, j) in system.coupled_pairs() {
        let (mk, ml) = (1usize << k, 1usize << l);
        for r in 0..dim {
            let aligned = ((r & mk) != 0) == ((r & ml) != 0);
            // 2 ZZ / 4 on the diagonal.
            h[(r, r)] += C64::new(if aligned { j / 2.0 } else { -j / 2.0 }, 0.0);
            // -(XX + YY) / 4 = -(1/2) flip-flop on anti-aligned pairs.
            if !aligned {
                h[(r ^ mk ^ ml, r)] += C64::new(-j / 2.0, 0.0);
            }
        }
    }
    h.with_kind(OperatorKind::Hermitian)
}

/// `-sum_k (omega_k / 2) Z_k`.
pub fn zeeman_hamiltonian(system: &SpinSystem) -> Operator {
    let n = system.n_qubits();
    let dim = 1usize << n;
    let mut h = Operator::zeros(dim);
    for (k, &w) in system.larmor().iter().enumerate() {
        for r in 0..dim {
            let z = if (r >> k) & 1 == 0 { 1.0 } else { -1.0 };
            h[(r, r)] += C64::new(-w / 2.0 * z, 0.0);
        }
    }
    h
}

/// Two-body term `(J/4)(2 ZZ - XX - YY)` on a single pair, via Pauli strings.
pub fn dipole_pair_term(n_q: usize, k: usize, l: usize, j: f64) -> Result<Operator> {
    let mut h = Operator::zeros(1 << n_q);
    for (axis, w) in [
        (PauliAxis::Z, 2.0),
        (PauliAxis::X, -1.0),
        (PauliAxis::Y, -1.0),
    ] {
        let p = pauli_string(n_q, &[(k, axis), (l, axis)])?;
        h.add_scaled(C64::new(w * j / 4.0, 0.0), &p);
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn grid_couplings() {
        let s = build_couplings(LatticeSpec::new(LatticeKind::Grid3x3, 1.0));
        assert_eq!(s.coupling(0, 1), 1.0);
        assert_eq!(s.coupling(0, 4), 2f64.powf(-1.5));
        assert_eq!(s.coupling(0, 2), 0.0);
        let pairs = s.coupled_pairs();
        let hv = pairs.iter().filter(|p| p.2 == 1.0).count();
        let diag = pairs.len() - hv;
        assert_eq!((hv, diag), (12, 8));
        for k in 0..9 {
            assert_eq!(s.coupling(k, k), 0.0);
            for l in 0..9 {
                assert_eq!(s.coupling(k, l), s.coupling(l, k));
            }
        }
    }

    #[test]
    fn grid_edge_count_matches_brute_force() {
        // King-graph edges restricted to distance <= sqrt 2.
        let s = build_couplings(LatticeSpec::new(LatticeKind::Grid3x3, 1.0));
        let mut count = 0;
        for a in 0..9usize {
            for b in a + 1..9usize {
                let (dr, dc) = ((a / 3).abs_diff(b / 3), (a % 3).abs_diff(b % 3));
                let expect = match (dr, dc) {
                    (0, 1) | (1, 0) => 1.0,
                    (1, 1) => 2f64.powf(-1.5),
                    _ => 0.0,
                };
                assert_eq!(s.coupling(a, b), expect, "{a},{b}");
                count += (expect != 0.0) as usize;
            }
        }
        assert_eq!(count, 20);
    }

    #[test]
    fn chain_couplings() {
        let s = build_couplings(LatticeSpec::new(LatticeKind::Chain4, 2.0));
        assert_eq!(s.coupling(1, 2), 2.0);
        assert_eq!(s.coupling(0, 2), 0.0);
        assert_eq!(s.coupled_pairs().len(), 3);
    }

    #[test]
    fn two_qubit_dipole_eigenvalues_on_aligned_states() {
        let s = SpinSystem::from_pairs(2, &[(0, 1, 1.7)]).unwrap();
        let h = dipole_hamiltonian(&s);
        assert_eq!(h[(0, 0)], C64::new(0.85, 0.0));
        assert_eq!(h[(3, 3)], C64::new(0.85, 0.0));
        assert_eq!(h[(1, 0)], C64::new(0.0, 0.0));
    }

    #[test]
    fn grid_dipole_matches_pauli_sum() {
        let s = build_couplings(LatticeSpec::new(LatticeKind::Grid3x3, 1.3));
        let h = dipole_hamiltonian(&s);
        let mut want = Operator::zeros(512);
        for (k, l, j) in s.coupled_pairs() {
            want = &want + &dipole_pair_term(9, k, l, j).unwrap();
        }
        assert!((&h - &want).max_abs() < 1e-13);
        assert!(h.trace().norm() < 1e-12);
        assert!(h.is_hermitian(0.0));
    }

    #[test]
    fn dipole_conserves_magnetization() {
        let s = build_couplings(LatticeSpec::new(LatticeKind::Chain4, 1.0));
        let h = dipole_hamiltonian(&s);
        let mut mz = Operator::zeros(16);
        for q in 0..4 {
            mz = &mz + &pauli_string(4, &[(q, PauliAxis::Z)]).unwrap();
        }
        assert!(h.commutator(&mz).max_abs() < 1e-12);
    }

    #[test]
    fn zeeman_examples() {
        let s = build_couplings(LatticeSpec::new(LatticeKind::Chain4, 1.0));
        assert_eq!(zeeman_hamiltonian(&s).max_abs(), 0.0);
        let mut one = SpinSystem::new(2).unwrap();
        one.set_larmor(0, 3.0).unwrap();
        let h = zeeman_hamiltonian(&one);
        assert_eq!(h[(0, 0)].re, -1.5);
        assert_eq!(h[(1, 1)].re, 1.5);
        one.set_coupling(0, 1, 1.0).unwrap();
        let zz = pauli_string(2, &[(0, PauliAxis::Z), (1, PauliAxis::Z)]).unwrap();
        assert!(h.commutator(&zz).max_abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_systems() {
        assert!(SpinSystem::new(1).is_err());
        let mut s = SpinSystem::new(3).unwrap();
        assert!(matches!(s.set_coupling(1, 1, 1.0), Err(Error::SamePair(1))));
        assert!(s.set_coupling(0, 3, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn dipole_linear_in_coupling(c in -3.0f64..3.0) {
            let s = build_couplings(LatticeSpec::new(LatticeKind::Chain4, 0.8));
            let a = dipole_hamiltonian(&s.scaled(c));
            let b = dipole_hamiltonian(&s).scale_real(c);
            prop_assert!((&a - &b).max_abs() < 1e-14);
        }
    }
}
