//! Dense state-vector and operator kernel.
//!
//! Qubit `q` is bit `q` of a computational basis index, so qubit 0 is the
//! least significant bit. Units have `hbar = 1`.

mod batch;
mod kernels;
mod operator;
mod spectral;
mod state;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use batch::StateBatch;
pub use kernels::C64;
pub(crate) use kernels::{apply_mat2_rows, apply_pauli_rows, PauliMasks};
pub use operator::{Operator, OperatorKind};
pub use spectral::{propagator, BlockPropagator, Spectral, HERMITIAN_TOL};
pub use state::{apply_unitary, state_fidelity, StateVector};

use crate::error::{Error, Result};

/// Largest register the dense kernels accept.
pub const MAX_DENSE_QUBITS: usize = 12;

/// Single-qubit matrix `[[u00, u01], [u10, u11]]`.
pub type Mat2 = [[C64; 2]; 2];

/// Two-qubit matrix; local index bit 0 is the first qubit.
pub type Mat4 = [[C64; 4]; 4];

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// Pauli operator on one qubit; `I` is the identity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PauliAxis {
    #[serde(rename = "0")]
    I,
    #[serde(rename = "x")]
    X,
    #[serde(rename = "y")]
    Y,
    #[serde(rename = "z")]
    Z,
}

impl PauliAxis {
    pub const ALL: [PauliAxis; 4] = [PauliAxis::I, PauliAxis::X, PauliAxis::Y, PauliAxis::Z];
    pub const NONTRIVIAL: [PauliAxis; 3] = [PauliAxis::X, PauliAxis::Y, PauliAxis::Z];

    pub fn matrix(self) -> Mat2 {
        match self {
            PauliAxis::I => [[ONE, ZERO], [ZERO, ONE]],
            PauliAxis::X => [[ZERO, ONE], [ONE, ZERO]],
            PauliAxis::Y => [[ZERO, -I], [I, ZERO]],
            PauliAxis::Z => [[ONE, ZERO], [ZERO, -ONE]],
        }
    }

    pub fn symbol(self) -> char {
        match self {
            PauliAxis::I => '0',
            PauliAxis::X => 'x',
            PauliAxis::Y => 'y',
            PauliAxis::Z => 'z',
        }
    }
}

impl fmt::Display for PauliAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

impl FromStr for PauliAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "0" | "i" | "I" => Ok(PauliAxis::I),
            "x" | "X" => Ok(PauliAxis::X),
            "y" | "Y" => Ok(PauliAxis::Y),
            "z" | "Z" => Ok(PauliAxis::Z),
            other => Err(Error::InvalidParameter(format!(
                "unknown Pauli axis {other:?}"
            ))),
        }
    }
}

/// Bit masks for a Pauli string given qubit by qubit.
pub(crate) fn pauli_masks(frame: &[PauliAxis]) -> PauliMasks {
    let mut m = PauliMasks::default();
    for (q, p) in frame.iter().enumerate() {
        match p {
            PauliAxis::I => {}
            PauliAxis::X => m.x_mask |= 1 << q,
            PauliAxis::Z => m.z_mask |= 1 << q,
            PauliAxis::Y => {
                m.x_mask |= 1 << q;
                m.z_mask |= 1 << q;
                m.n_y += 1;
            }
        }
    }
    m
}

/// `exp(-i sigma_axis phi / 2)`.
pub fn rotation(axis: PauliAxis, phi: f64) -> Mat2 {
    let (c, s) = ((phi / 2.0).cos(), (phi / 2.0).sin());
    let p = axis.matrix();
    let mut out = [[ZERO; 2]; 2];
    for r in 0..2 {
        for k in 0..2 {
            let id = if r == k { ONE } else { ZERO };
            out[r][k] = id * c - I * s * p[r][k];
        }
    }
    out
}

pub fn mat2_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[ZERO; 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            out[r][c] = a[r][0] * b[0][c] + a[r][1] * b[1][c];
        }
    }
    out
}

pub fn mat2_adjoint(a: &Mat2) -> Mat2 {
    [
        [a[0][0].conj(), a[1][0].conj()],
        [a[0][1].conj(), a[1][1].conj()],
    ]
}

fn check_register(n_q: usize) -> Result<()> {
    if n_q > MAX_DENSE_QUBITS {
        return Err(Error::ResourceLimit {
            n_q,
            limit: MAX_DENSE_QUBITS,
        });
    }
    Ok(())
}

/// Tensor product of the given Pauli factors, identity elsewhere.
pub fn pauli_string(n_q: usize, assignments: &[(usize, PauliAxis)]) -> Result<Operator> {
    check_register(n_q)?;
    let mut frame = vec![PauliAxis::I; n_q];
    for &(q, p) in assignments {
        if q >= n_q {
            return Err(Error::QubitOutOfRange { index: q, n_q });
        }
        frame[q] = p;
    }
    let dim = 1usize << n_q;
    let mut op = Operator::identity(dim);
    apply_pauli_rows(op.as_mut_slice(), dim, pauli_masks(&frame));
    Ok(op.with_kind(OperatorKind::Hermitian))
}

/// Embeds a `d`-qubit operator acting on `targets` into an `n_q`-qubit
/// register. `targets[i]` receives local qubit `i`.
pub fn embed_local(op: &Operator, targets: &[usize], n_q: usize) -> Result<Operator> {
    check_register(n_q)?;
    let d = targets.len();
    if op.dim() != 1usize << d {
        return Err(Error::DimensionMismatch {
            expected: 1 << d,
            actual: op.dim(),
        });
    }
    for (i, &t) in targets.iter().enumerate() {
        if t >= n_q {
            return Err(Error::QubitOutOfRange { index: t, n_q });
        }
        if targets[..i].contains(&t) {
            return Err(Error::DuplicateTarget(t));
        }
    }
    let target_mask: usize = targets.iter().map(|&t| 1usize << t).sum();
    let local = |g: usize| -> usize {
        targets
            .iter()
            .enumerate()
            .map(|(i, &t)| ((g >> t) & 1) << i)
            .sum()
    };
    let dim = 1usize << n_q;
    Ok(Operator::from_fn(dim, op.kind(), |r, c| {
        if r & !target_mask != c & !target_mask {
            ZERO
        } else {
            op[(local(r), local(c))]
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn close(a: C64, b: C64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn zz_on_two_qubits_is_diagonal() {
        let op = pauli_string(2, &[(0, PauliAxis::Z), (1, PauliAxis::Z)]).unwrap();
        let want = [1.0, -1.0, -1.0, 1.0];
        for r in 0..4 {
            for c in 0..4 {
                let w = if r == c { want[r] } else { 0.0 };
                assert!(close(op[(r, c)], C64::new(w, 0.0)));
            }
        }
    }

    #[test]
    fn empty_assignment_is_identity() {
        let op = pauli_string(1, &[]).unwrap();
        assert_eq!(op.phase_insensitive_distance(&Operator::identity(2)), 0.0);
    }

    #[test]
    fn pauli_string_squares_to_identity_and_is_traceless() {
        let op = pauli_string(3, &[(0, PauliAxis::X), (2, PauliAxis::Y)]).unwrap();
        let sq = op.matmul(&op);
        assert!((&sq - &Operator::identity(8)).max_abs() < 1e-14);
        assert!(op.trace().norm() < 1e-14);
        assert!(op.is_hermitian(1e-14) && op.is_unitary(1e-12));
    }

    #[test]
    fn pauli_string_rejects_out_of_range() {
        assert!(matches!(
            pauli_string(2, &[(2, PauliAxis::X)]),
            Err(Error::QubitOutOfRange { index: 2, n_q: 2 })
        ));
    }

    #[test]
    fn pauli_strings_follow_commutation_rules() {
        // Two strings commute iff the number of positions with distinct
        // non-identity factors is even.
        let n = 3;
        let strings: Vec<Vec<PauliAxis>> = (0..64)
            .map(|code| {
                (0..n)
                    .map(|q| PauliAxis::ALL[(code >> (2 * q)) & 3])
                    .collect()
            })
            .collect();
        let ops: Vec<Operator> = strings
            .iter()
            .map(|s| {
                let a: Vec<_> = s.iter().copied().enumerate().collect();
                pauli_string(n, &a).unwrap()
            })
            .collect();
        for (i, a) in strings.iter().enumerate() {
            for (j, b) in strings.iter().enumerate() {
                let clashes = a
                    .iter()
                    .zip(b)
                    .filter(|(x, y)| **x != PauliAxis::I && **y != PauliAxis::I && x != y)
                    .count();
                let ab = ops[i].matmul(&ops[j]);
                let ba = ops[j].matmul(&ops[i]);
                let err = if clashes % 2 == 0 {
                    (&ab - &ba).max_abs()
                } else {
                    (&ab + &ba).max_abs()
                };
                assert!(err < 1e-14, "{a:?} {b:?}");
            }
        }
    }

    #[test]
    fn embed_x_on_high_qubit() {
        let x = Operator::from_mat2(&PauliAxis::X.matrix(), OperatorKind::Hermitian);
        let e = embed_local(&x, &[1], 2).unwrap();
        let want = x.kron(&Operator::identity(2));
        assert!((&e - &want).max_abs() < 1e-15);
        assert_eq!(e.kind(), OperatorKind::Hermitian);
    }

    #[test]
    fn embed_identity_is_identity() {
        let e = embed_local(&Operator::identity(4), &[2, 0], 3).unwrap();
        assert!((&e - &Operator::identity(8)).max_abs() < 1e-15);
    }

    #[test]
    fn embed_rejects_bad_targets() {
        let x = Operator::identity(4);
        assert!(matches!(
            embed_local(&x, &[1, 1], 3),
            Err(Error::DuplicateTarget(1))
        ));
        assert!(matches!(
            embed_local(&x, &[0, 5], 3),
            Err(Error::QubitOutOfRange { index: 5, .. })
        ));
        assert!(embed_local(&x, &[0], 3).is_err());
    }

    #[test]
    fn embed_matches_explicit_local_action() {
        // A two-qubit operator on targets [2, 0] of a three-qubit register,
        // compared with a hand-built permutation of the Kronecker product.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = random_unitary(2, &mut rng);
        let e = embed_local(&a, &[2, 0], 3).unwrap();
        for basis in 0..8 {
            let s = StateVector::basis(3, basis).unwrap();
            let got = apply_unitary(s, &e).unwrap();
            let (b2, b1, b0) = ((basis >> 2) & 1, (basis >> 1) & 1, basis & 1);
            let col = b2 | (b0 << 1);
            for out in 0..8 {
                let (o2, o1, o0) = ((out >> 2) & 1, (out >> 1) & 1, out & 1);
                let want = if o1 == b1 {
                    a[(o2 | (o0 << 1), col)]
                } else {
                    ZERO
                };
                assert!(close(got.amplitudes()[out], want));
            }
        }
    }

    #[test]
    fn apply_identity_and_x() {
        let s = StateVector::basis(1, 0).unwrap();
        let same = apply_unitary(s.clone(), &Operator::identity(2)).unwrap();
        assert_eq!(same, s);
        let x = Operator::from_mat2(&PauliAxis::X.matrix(), OperatorKind::Unitary);
        let flipped = apply_unitary(s, &x).unwrap();
        assert!(close(flipped.amplitudes()[1], ONE));
    }

    #[test]
    fn apply_unitary_checks_tag_and_dimension() {
        let s = StateVector::basis(1, 0).unwrap();
        let h = Operator::from_mat2(&PauliAxis::X.matrix(), OperatorKind::Hermitian);
        assert!(matches!(
            apply_unitary(s.clone(), &h),
            Err(Error::WrongKind { .. })
        ));
        assert!(matches!(
            apply_unitary(s, &Operator::identity(4)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn propagator_of_zero_is_identity() {
        let u = propagator(&Operator::zeros(4), 3.7).unwrap();
        assert!((&u - &Operator::identity(4)).max_abs() < 1e-15);
    }

    #[test]
    fn propagator_half_turn_about_x() {
        let tau = 0.3;
        let h = Operator::from_mat2(&PauliAxis::X.matrix(), OperatorKind::Hermitian)
            .scale_real(std::f64::consts::PI / (2.0 * tau));
        let u = propagator(&h, tau).unwrap();
        let want = Operator::from_mat2(&PauliAxis::X.matrix(), OperatorKind::General).scale(-I);
        assert!((&u - &want).max_abs() < 1e-12);
        assert!(u.is_unitary(1e-10));
    }

    #[test]
    fn dipolar_pair_on_00_picks_up_phase() {
        let j = 1.3;
        let tau = 0.41;
        let zz = pauli_string(2, &[(0, PauliAxis::Z), (1, PauliAxis::Z)]).unwrap();
        let xx = pauli_string(2, &[(0, PauliAxis::X), (1, PauliAxis::X)]).unwrap();
        let yy = pauli_string(2, &[(0, PauliAxis::Y), (1, PauliAxis::Y)]).unwrap();
        let h = (&(&zz.scale_real(2.0) - &xx) - &yy).scale_real(j / 4.0);
        let u = propagator(&h, tau).unwrap();
        let s = apply_unitary(StateVector::basis(2, 0).unwrap(), &u).unwrap();
        assert!(close(
            s.amplitudes()[0],
            C64::from_polar(1.0, -j * tau / 2.0)
        ));
    }

    #[test]
    fn propagator_rejects_non_hermitian() {
        let mut h = Operator::zeros(2);
        h[(0, 1)] = ONE;
        assert!(matches!(propagator(&h, 1.0), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn spectral_detects_blocks() {
        let zz = pauli_string(2, &[(0, PauliAxis::Z), (1, PauliAxis::Z)]).unwrap();
        let xx = pauli_string(2, &[(0, PauliAxis::X), (1, PauliAxis::X)]).unwrap();
        let yy = pauli_string(2, &[(0, PauliAxis::Y), (1, PauliAxis::Y)]).unwrap();
        let h = &(&zz + &xx) + &yy;
        let mut sizes = Spectral::new(&h).unwrap().block_sizes();
        sizes.sort();
        assert_eq!(sizes, vec![1, 1, 2]);
    }

    #[test]
    fn block_propagator_apply_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = random_hermitian(3, &mut rng);
        let spec = Spectral::new(&h).unwrap();
        let bp = spec.block_propagator(0.7);
        let dense = bp.to_dense();
        let mut rows: Vec<C64> = (0..8 * 3)
            .map(|i| C64::new((i as f64).sin(), (i as f64).cos()))
            .collect();
        let mut want = vec![ZERO; 24];
        kernels::gemm(8, 8, 3, dense.as_slice(), &rows, &mut want);
        bp.apply_rows(&mut rows, 3);
        for (a, b) in rows.iter().zip(&want) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn fidelity_examples() {
        let a = StateVector::basis(1, 0).unwrap();
        let b = StateVector::basis(1, 1).unwrap();
        let h = StateVector::from_amplitudes(1, vec![ONE, ONE]).unwrap();
        assert!((state_fidelity(&a, &a).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(state_fidelity(&a, &b).unwrap(), 0.0);
        assert!((state_fidelity(&h, &a).unwrap() - 0.5).abs() < 1e-15);
        let c = StateVector::basis(2, 0).unwrap();
        assert!(state_fidelity(&a, &c).is_err());
    }

    #[test]
    fn rotation_matches_propagator() {
        for axis in PauliAxis::NONTRIVIAL {
            let h = Operator::from_mat2(&axis.matrix(), OperatorKind::Hermitian).scale_real(0.5);
            let u = propagator(&h, 1.1).unwrap();
            let r = Operator::from_mat2(&rotation(axis, 1.1), OperatorKind::Unitary);
            assert!((&u - &r).max_abs() < 1e-12);
        }
    }

    pub(crate) fn random_hermitian(n_q: usize, rng: &mut ChaCha8Rng) -> Operator {
        use rand::Rng;
        let dim = 1 << n_q;
        let a = Operator::from_fn(dim, OperatorKind::General, |_, _| {
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        (&a + &a.adjoint())
            .scale_real(0.5)
            .with_kind(OperatorKind::Hermitian)
    }

    pub(crate) fn random_unitary(n_q: usize, rng: &mut ChaCha8Rng) -> Operator {
        let h = random_hermitian(n_q, rng);
        propagator(&h, 1.0).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn random_unitaries_preserve_norm(seed in any::<u64>(), n_q in 1usize..5) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let u = random_unitary(n_q, &mut rng);
            let s = StateVector::random(n_q, &mut rng);
            let out = apply_unitary(s, &u).unwrap();
            prop_assert!((out.norm() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn propagator_is_additive_in_time(seed in any::<u64>(), t1 in -2.0f64..2.0, t2 in -2.0f64..2.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let h = random_hermitian(2, &mut rng);
            let spec = Spectral::new(&h).unwrap();
            let lhs = spec.propagator(t1).matmul(&spec.propagator(t2));
            let rhs = spec.propagator(t1 + t2);
            prop_assert!((&lhs - &rhs).max_abs() < 1e-10);
        }

        #[test]
        fn fidelity_symmetric_and_phase_blind(seed in any::<u64>(), phase in 0.0f64..6.3) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = StateVector::random(3, &mut rng);
            let b = StateVector::random(3, &mut rng);
            let rot = |s: &StateVector| {
                let amps = s.amplitudes().iter().map(|z| z * C64::from_polar(1.0, phase)).collect();
                StateVector::from_amplitudes(3, amps).unwrap()
            };
            let fab = state_fidelity(&a, &b).unwrap();
            prop_assert!((fab - state_fidelity(&b, &a).unwrap()).abs() < 1e-14);
            prop_assert!((fab - state_fidelity(&rot(&a), &rot(&b)).unwrap()).abs() < 1e-12);
        }
    }
}
