use super::*;
use crate::model::{build_couplings, dipole_hamiltonian, LatticeKind, LatticeSpec};
use crate::qstate::{pauli_string, propagator, Spectral};
use crate::sequences::{super_whh_schedule, toggled_sequence, whh4_schedule};
use nalgebra::{DMatrix, DVector};
use num_rational::Rational64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_hermitian(dim: usize, rng: &mut ChaCha8Rng) -> Operator {
    let a = Operator::from_fn(dim, OperatorKind::General, |_, _| {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    (&a + &a.adjoint())
        .scale_real(0.5)
        .with_kind(OperatorKind::Hermitian)
}

/// Distance between the exact cycle propagator and the exponential of the
/// truncated average Hamiltonian, for durations scaled by `s`.
fn magnus_error(hs: &[Operator], taus: &[f64], s: f64, order: u8) -> f64 {
    let segs: Vec<_> = hs.iter().cloned().zip(taus.iter().map(|t| t * s)).collect();
    let pw = PiecewiseHamiltonian::new(segs.clone()).unwrap();
    let t = pw.cycle_time();
    let terms = aht_terms(&pw, order).unwrap();
    let approx = propagator(&terms.total().with_kind(OperatorKind::Hermitian), t).unwrap();
    let mut exact = Operator::identity(hs[0].dim());
    for (h, tau) in &segs {
        exact = propagator(h, *tau).unwrap().matmul(&exact);
    }
    (&approx - &exact).max_abs()
}

#[test]
fn truncated_magnus_error_is_fourth_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n_seg in [2, 3, 5] {
        let hs: Vec<_> = (0..n_seg).map(|_| random_hermitian(4, &mut rng)).collect();
        let taus: Vec<f64> = (0..n_seg).map(|_| rng.random_range(0.5..1.5)).collect();
        let e1 = magnus_error(&hs, &taus, 0.02, 2);
        let e2 = magnus_error(&hs, &taus, 0.01, 2);
        let ratio = e1 / e2;
        assert!(
            (13.0..19.0).contains(&ratio),
            "n_seg {n_seg}: ratio {ratio}"
        );
        // Dropping h2 leaves a third-order error.
        let r1 = magnus_error(&hs, &taus, 0.02, 1) / magnus_error(&hs, &taus, 0.01, 1);
        assert!((6.5..9.5).contains(&r1), "n_seg {n_seg}: ratio {r1}");
    }
}

#[test]
fn constant_hamiltonian_has_no_corrections() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let h = random_hermitian(4, &mut rng);
    let pw = PiecewiseHamiltonian::new(vec![(h.clone(), 0.3), (h.clone(), 0.5), (h.clone(), 0.2)])
        .unwrap();
    let t = aht_terms(&pw, 2).unwrap();
    assert!((&t.h0 - &h).max_abs() < 1e-14);
    assert!(t.h1.max_abs() < 1e-14);
    assert!(t.h2.max_abs() < 1e-14);
}

#[test]
fn rejects_bad_input() {
    assert!(matches!(
        PiecewiseHamiltonian::new(vec![]),
        Err(Error::EmptySegments)
    ));
    let h = Operator::zeros(2);
    assert!(PiecewiseHamiltonian::new(vec![(h.clone(), 0.0)]).is_err());
    assert!(PiecewiseHamiltonian::new(vec![(h, 1.0), (Operator::zeros(4), 1.0)]).is_err());
}

#[test]
fn whh4_average_vanishes() {
    let sys = build_couplings(LatticeSpec::new(LatticeKind::Chain4, 1.0));
    let h = dipole_hamiltonian(&sys);
    let pw = toggled_sequence(&whh4_schedule(0.05, None).unwrap(), &h).unwrap();
    let t = aht_terms(&pw, 1).unwrap();
    assert!(t.h0.max_abs() < 1e-13);
    assert!(t.h1.max_abs() < 1e-13);
}

fn isotropic(n_q: usize, k: usize, l: usize) -> Operator {
    let mut op = Operator::zeros(1 << n_q);
    for a in PauliAxis::NONTRIVIAL {
        op = &op + &pauli_string(n_q, &[(k, a), (l, a)]).unwrap();
    }
    op
}

#[test]
fn super_whh_recouples_every_grid_pair() {
    let j = 1.0;
    let sys = build_couplings(LatticeSpec::new(LatticeKind::Grid3x3, j));
    let h = dipole_hamiltonian(&sys);
    for (k, l, jkl) in sys.coupled_pairs() {
        let pw = toggled_sequence(&super_whh_schedule(k, l, 0.01).unwrap(), &h).unwrap();
        let t = aht_terms(&pw, 0).unwrap();
        let want = isotropic(9, k, l).scale_real(2.0 * jkl / 9.0);
        assert!((&t.h0 - &want).max_abs() < 1e-12 * j, "pair ({k},{l})");
    }
}

fn three_spin(jak: f64, jal: f64, jkl: f64, a: usize, k: usize, l: usize) -> SpinSystem {
    SpinSystem::from_pairs(3, &[(a, k, jak), (a, l, jal), (k, l, jkl)]).unwrap()
}

fn h2_pair_coefficients(sys: &SpinSystem, k: usize, l: usize, tau: f64) -> [f64; 3] {
    let h = dipole_hamiltonian(sys);
    let pw = toggled_sequence(&super_whh_schedule(k, l, tau).unwrap(), &h).unwrap();
    let t = aht_terms(&pw, 2).unwrap();
    PauliAxis::NONTRIVIAL
        .map(|ax| extract_pauli_coefficient(&t.h2, 3, &[(k, ax), (l, ax)]).unwrap())
}

#[test]
fn second_order_matches_reference_rows() {
    let (jak, jal, jkl) = (1.0, 0.7, 1.3);
    let tau = 0.1;
    // Spectator below, above and between the pair labels.
    for (a, k, l) in [(0, 1, 2), (2, 0, 1), (1, 0, 2)] {
        let got = h2_pair_coefficients(&three_spin(jak, jal, jkl, a, k, l), k, l, tau);
        for (row, g) in REFERENCE_H2_ROWS.iter().zip(got) {
            let want: f64 = row
                .iter()
                .zip(REFERENCE_MONOMIALS)
                .map(|(c, (ek, el, ekl))| {
                    *c as f64 * jak.powi(ek as i32) * jal.powi(el as i32) * jkl.powi(ekl as i32)
                })
                .sum::<f64>()
                * tau
                * tau
                / H2_DENOMINATOR as f64;
            assert!(
                ((g - want) / want).abs() < 1e-10,
                "({a},{k},{l}): {g} vs {want}"
            );
        }
    }
}

/// All ten cubic monomials in `(J_ak, J_al, J_kl)`.
const CUBICS: [(i32, i32, i32); 10] = [
    (1, 2, 0),
    (2, 1, 0),
    (1, 1, 1),
    (2, 0, 1),
    (0, 2, 1),
    (3, 0, 0),
    (0, 3, 0),
    (0, 0, 3),
    (1, 0, 2),
    (0, 1, 2),
];

#[test]
fn second_order_monomial_fit() {
    // Recover every cubic coefficient by solving a linear system over
    // random coupling triples: the five published monomials must match and
    // the remaining five must vanish.
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let tau = 1.0;
    let samples: Vec<(f64, f64, f64)> = (0..10)
        .map(|_| {
            (
                rng.random_range(0.3..1.5),
                rng.random_range(0.3..1.5),
                rng.random_range(0.3..1.5),
            )
        })
        .collect();
    let design = DMatrix::from_fn(10, 10, |i, j| {
        let (a, b, c) = samples[i];
        let (ea, eb, ec) = CUBICS[j];
        a.powi(ea) * b.powi(eb) * c.powi(ec)
    });
    let lu = design.lu();
    let values: Vec<[f64; 3]> = samples
        .iter()
        .map(|&(a, b, c)| h2_pair_coefficients(&three_spin(a, b, c, 0, 1, 2), 1, 2, tau))
        .collect();
    for row in 0..3 {
        let rhs = DVector::from_fn(10, |i, _| values[i][row] * H2_DENOMINATOR as f64);
        let coef = lu.solve(&rhs).unwrap();
        for j in 0..5 {
            let want = REFERENCE_H2_ROWS[row][j] as f64;
            assert!(
                (coef[j] - want).abs() < 1e-6,
                "row {row} col {j}: {}",
                coef[j]
            );
        }
        for j in 5..10 {
            assert!(coef[j].abs() < 1e-6, "row {row} extra {j}: {}", coef[j]);
        }
    }
}

#[test]
fn symmetrized_means_are_the_j2_coefficients() {
    let mean = |c: usize| {
        let s: i64 = REFERENCE_H2_ROWS.iter().map(|r| r[c]).sum();
        Rational64::new(s, 3 * H2_DENOMINATOR)
    };
    assert_eq!(mean(0), Rational64::new(1, 12));
    assert_eq!(mean(1), Rational64::new(1, 12));
    assert_eq!(mean(2), Rational64::new(217, 108));
    assert_eq!(mean(3), Rational64::new(-103, 72));
    assert_eq!(mean(4), Rational64::new(-103, 72));
}

#[test]
fn grid_j2_classes() {
    let sys = build_couplings(LatticeSpec::new(LatticeKind::Grid3x3, 1.0));
    for (want, pairs) in reference_grid_j2() {
        for &(k, l) in pairs {
            let s = j2_coefficient(&sys, k, l).unwrap();
            assert!((s.j2 - want).abs() < 1e-12, "({k},{l})");
            assert!((s.j0 - 2.0 / 9.0).abs() < 1e-15);
        }
    }
}

#[test]
fn j2_of_a_lone_pair_is_zero() {
    let sys = SpinSystem::from_pairs(2, &[(0, 1, 1.0)]).unwrap();
    assert_eq!(j2_coefficient(&sys, 0, 1).unwrap().j2, 0.0);
    assert!(matches!(
        j2_coefficient(&sys, 1, 1),
        Err(Error::SamePair(1))
    ));
}

#[test]
fn solve_tau_examples() {
    let j = 1.0;
    let s = RecouplingStrengths {
        j0: 2.0 * j / 9.0,
        j2: 0.0,
    };
    let pi = std::f64::consts::PI;
    let t0 = solve_tau(pi / 4.0, 1, s, CalibrationOrder::Zeroth).unwrap();
    assert!((t0 - pi / (32.0 * j)).abs() < 1e-15);
    assert_eq!(
        solve_tau(pi / 4.0, 1, s, CalibrationOrder::Second).unwrap(),
        t0
    );

    let sys = build_couplings(LatticeSpec::new(LatticeKind::Grid3x3, j));
    let s = j2_coefficient(&sys, 0, 1).unwrap();
    assert!(s.j2 < 0.0);
    let phi = pi / 8.0;
    let t2 = solve_tau(phi, 10, s, CalibrationOrder::Second).unwrap();
    let t0 = solve_tau(phi, 10, s, CalibrationOrder::Zeroth).unwrap();
    let residual = (s.j0 + s.j2 * t2 * t2) * 360.0 * t2 - phi;
    assert!(residual.abs() <= 1e-12 * phi);
    assert!(t2 > t0);
}

#[test]
fn solve_tau_errors() {
    let s = RecouplingStrengths { j0: 0.2, j2: 0.0 };
    assert!(solve_tau(0.0, 1, s, CalibrationOrder::Zeroth).is_err());
    assert!(solve_tau(1.0, 0, s, CalibrationOrder::Zeroth).is_err());
    let bad = RecouplingStrengths { j0: 0.2, j2: -1e6 };
    assert!(matches!(
        solve_tau(1.0, 1, bad, CalibrationOrder::Second),
        Err(Error::NoCalibrationRoot { .. })
    ));
}

#[test]
fn lower_bound_examples() {
    let b = |h_norm, delta_t, total_time| BoundInput {
        h_norm,
        delta_t,
        total_time,
    };
    assert_eq!(fidelity_lower_bound(b(0.0, 1.0, 10.0)), 1.0);
    assert!((fidelity_lower_bound(b(1.0, 0.1, 1.0)) - 0.9).abs() < 1e-15);
}

#[test]
fn lower_bound_error_scaling() {
    // With |H| ~ J (J tau)^2, dt = 36 tau and T = 36 n tau the deficit is
    // ~ n tau^6, and tau = phi / (36 n j0) makes it ~ phi^6 / n^5.
    let j = 1.0;
    let j0 = 2.0 * j / 9.0;
    let deficit = |phi: f64, n: usize| {
        let tau = phi / (36.0 * n as f64 * j0);
        let h = j * (j * tau).powi(2);
        1.0 - fidelity_lower_bound(BoundInput {
            h_norm: h,
            delta_t: 36.0 * tau,
            total_time: 36.0 * n as f64 * tau,
        })
    };
    let phi = std::f64::consts::FRAC_PI_4;
    let r_n = deficit(phi, 10) / deficit(phi, 20);
    assert!((r_n / 32.0 - 1.0).abs() < 1e-5, "{r_n}");
    let r_phi = deficit(phi, 10) / deficit(phi / 2.0, 10);
    assert!((r_phi / 64.0 - 1.0).abs() < 1e-5, "{r_phi}");
}

#[test]
fn pauli_coefficient_examples() {
    let zz = pauli_string(2, &[(0, PauliAxis::Z), (1, PauliAxis::Z)]).unwrap();
    let h = zz.scale_real(3.0);
    assert!(
        (extract_pauli_coefficient(&h, 2, &[(0, PauliAxis::Z), (1, PauliAxis::Z)]).unwrap() - 3.0)
            .abs()
            < 1e-15
    );
    assert_eq!(
        extract_pauli_coefficient(&h, 2, &[(0, PauliAxis::X)]).unwrap(),
        0.0
    );
}

#[test]
fn pauli_basis_reconstructs_operator() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let n = 3;
    let h = random_hermitian(1 << n, &mut rng);
    let mut rebuilt = Operator::zeros(1 << n);
    for code in 0..64usize {
        let a: Vec<_> = (0..n)
            .map(|q| (q, PauliAxis::ALL[(code >> (2 * q)) & 3]))
            .collect();
        let c = extract_pauli_coefficient(&h, n, &a).unwrap();
        rebuilt.add_scaled(C64::new(c, 0.0), &pauli_string(n, &a).unwrap());
    }
    assert!((&rebuilt - &h).max_abs() < 1e-13);
}

#[test]
fn spectral_norm_of_isotropic_exchange() {
    // XX + YY + ZZ has eigenvalues 1 (triplet) and -3 (singlet).
    let op = isotropic(2, 0, 1);
    let e = Spectral::new(&op).unwrap().eigenvalues();
    let mut e: Vec<i64> = e.iter().map(|v| v.round() as i64).collect();
    e.sort();
    assert_eq!(e, vec![-3, 1, 1, 1]);
    assert!((op.hermitian_norm().unwrap() - 3.0).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn zeroth_order_tau_scaling(phi in 0.01f64..3.0, n in 1usize..30, j0 in 0.01f64..5.0) {
        let s = RecouplingStrengths { j0, j2: 0.0 };
        let t = solve_tau(phi, n, s, CalibrationOrder::Zeroth).unwrap();
        let t2 = solve_tau(2.0 * phi, n, s, CalibrationOrder::Zeroth).unwrap();
        let tn = solve_tau(phi, 2 * n, s, CalibrationOrder::Zeroth).unwrap();
        prop_assert!((t2 - 2.0 * t).abs() < 1e-14 * t);
        prop_assert!((tn - t / 2.0).abs() < 1e-14 * t);
    }

    #[test]
    fn palindromic_sequences_have_no_first_order(seed in any::<u64>(), half in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let hs: Vec<(Operator, f64)> = (0..half)
            .map(|_| (random_hermitian(4, &mut rng), rng.random_range(0.1..1.0)))
            .collect();
        let mut segs = hs.clone();
        segs.extend(hs.into_iter().rev());
        let t = aht_terms(&PiecewiseHamiltonian::new(segs).unwrap(), 1).unwrap();
        prop_assert!(t.h1.max_abs() < 1e-13);
    }
}
