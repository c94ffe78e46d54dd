use super::*;
use crate::aht::aht_terms;
use crate::model::{build_couplings, LatticeKind, LatticeSpec};
use crate::qstate::{pauli_string, state_fidelity};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn chain() -> SpinSystem {
    build_couplings(LatticeSpec::new(LatticeKind::Chain4, 1.0))
}

#[test]
fn whh4_layout() {
    let s = whh4_schedule(0.2, None).unwrap();
    assert_eq!(s.free_intervals(), WHH4_INTERVALS);
    assert_eq!(s.pulse_count(), 4);
    assert!((s.total_duration() - 1.2).abs() < 1e-15);
    assert!(matches!(
        whh4_schedule(0.0, None),
        Err(Error::InvalidDuration(_))
    ));
    assert!(whh4_schedule(0.1, Some(&Pulse::broadband(PauliAxis::X, false))).is_err());
}

#[test]
fn whh4_toggled_frames() {
    let h = dipole_hamiltonian(&chain());
    let pw = toggled_sequence(&whh4_schedule(0.1, None).unwrap(), &h).unwrap();
    assert_eq!(pw.len(), 6);
    assert!(pw.palindrome_error() < 1e-14);
    assert!((&pw.segments()[0].0 - &h).max_abs() < 1e-15);
    // Second interval: P_xbar H P_x.
    let px = compile_schedule(
        &Schedule::from_items(vec![ScheduleItem::Pulse(Pulse::broadband(
            PauliAxis::X,
            false,
        ))]),
        &chain(),
    )
    .unwrap();
    let want = h.conjugate_by(&px);
    assert!((&pw.segments()[1].0 - &want).max_abs() < 1e-13);
}

#[test]
fn bare_free_evolution_is_one_segment() {
    let h = dipole_hamiltonian(&chain());
    let mut s = Schedule::new();
    s.push_free(0.7);
    let pw = toggled_sequence(&s, &h).unwrap();
    assert_eq!(pw.len(), 1);
    assert_eq!(pw.segments()[0].1, 0.7);
    assert!((&pw.segments()[0].0 - &h).max_abs() == 0.0);
}

#[test]
fn super_whh_layout_and_palindrome() {
    let s = super_whh_schedule(2, 1, 0.01).unwrap();
    assert_eq!(s.free_intervals(), SUPER_WHH_INTERVALS);
    assert!((s.total_duration() - 0.36).abs() < 1e-14);
    let h = dipole_hamiltonian(&chain());
    let pw = toggled_sequence(&s, &h).unwrap();
    assert_eq!(pw.len(), 36);
    assert!(pw.palindrome_error() < 1e-12);
    let t = aht_terms(&pw, 1).unwrap();
    assert!(t.h1.max_abs() < 1e-12);
    assert!(matches!(
        super_whh_schedule(1, 1, 0.1),
        Err(Error::SamePair(1))
    ));
}

#[test]
fn smaller_label_takes_x_role() {
    let [_, xy, ..] = super_whh_toggles(5, 2).unwrap();
    assert_eq!(
        xy,
        Pulse::PauliFrame {
            assignments: vec![(2, PauliAxis::X), (5, PauliAxis::Y)]
        }
    );
}

#[test]
fn text_dump_round_trips() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let block = super_whh_schedule(0, 1, 0.125).unwrap();
    let s = randomize_blocks(
        &[block.clone(), block],
        4,
        0,
        1,
        SchemeVariant::RandomizedSymmetrized,
        &mut rng,
    )
    .unwrap();
    let text = s.to_text();
    assert!(text.starts_with("pulse frame"));
    assert_eq!(Schedule::parse_text(&text).unwrap(), s);
    assert!(matches!(
        Schedule::parse_text("free 1\nbogus\n"),
        Err(Error::ScheduleParse { line: 2, .. })
    ));
}

#[test]
fn original_variant_is_plain_concatenation() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let b = super_whh_schedule(1, 2, 0.1).unwrap();
    let out = randomize_blocks(
        &[b.clone(), b.clone()],
        4,
        1,
        2,
        SchemeVariant::Original,
        &mut rng,
    )
    .unwrap();
    let mut want = b.clone();
    want.extend(&b);
    assert_eq!(out, want);
    assert!(matches!(
        randomize_blocks(&[], 4, 1, 2, SchemeVariant::Original, &mut rng),
        Err(Error::EmptyBlocks)
    ));
}

#[test]
fn lone_pair_is_blind_to_dressing() {
    let sys = SpinSystem::from_pairs(2, &[(0, 1, 1.0)]).unwrap();
    let b = super_whh_schedule(0, 1, 0.05).unwrap();
    let blocks = vec![b; 3];
    let reference = {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let s = randomize_blocks(&blocks, 2, 0, 1, SchemeVariant::Original, &mut rng).unwrap();
        compile_schedule(&s, &sys).unwrap()
    };
    for variant in SchemeVariant::ALL {
        for seed in 0..5 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = randomize_blocks(&blocks, 2, 0, 1, variant, &mut rng).unwrap();
            let u = compile_schedule(&s, &sys).unwrap();
            assert!(
                u.phase_insensitive_distance(&reference) < 1e-10,
                "{variant}"
            );
        }
    }
}

#[test]
fn frames_leave_isotropic_exchange_invariant() {
    let mut iso = Operator::zeros(4);
    for a in PauliAxis::NONTRIVIAL {
        iso = &iso + &pauli_string(2, &[(0, a), (1, a)]).unwrap();
    }
    let sys = SpinSystem::new(2).unwrap();
    for r in PauliAxis::ALL {
        for alpha in PauliAxis::NONTRIVIAL {
            let frame = BlockFrame {
                pauli: PauliFrame { r: vec![r, r] },
                alpha: Some(alpha),
            };
            let u = compile_schedule(&dress_block(&Schedule::new(), &frame, 0, 1), &sys).unwrap();
            // A frame shared by both qubits of the pair.
            let shared = compile_schedule(
                &Schedule::from_items(vec![ScheduleItem::Pulse(frame.pauli.to_pulse())]),
                &sys,
            )
            .unwrap();
            for op in [&u, &shared] {
                assert!(
                    (&iso.conjugate_by(op) - &iso).max_abs() < 1e-12,
                    "{r} {alpha}"
                );
            }
        }
    }
}

#[test]
fn frames_avoid_the_pair() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..100 {
        let f = draw_block_frame(9, 3, 4, SchemeVariant::RandomizedSymmetrized, &mut rng);
        assert_eq!(f.pauli.r[3], PauliAxis::I);
        assert_eq!(f.pauli.r[4], PauliAxis::I);
        assert!(f.alpha.is_some_and(|a| a != PauliAxis::I));
    }
    let f = draw_block_frame(9, 3, 4, SchemeVariant::Randomized, &mut rng);
    assert!(f.alpha.is_none());
}

#[test]
fn zero_coupling_executes_pulses_only() {
    let sys = SpinSystem::new(2).unwrap();
    let s = whh4_schedule(0.3, None).unwrap();
    let u = compile_schedule(&s, &sys).unwrap();
    let mut pulses = Schedule::new();
    for item in s.items() {
        if let ScheduleItem::Pulse(p) = item {
            pulses.push_pulse(p.clone());
        }
    }
    let want = compile_schedule(&pulses, &sys).unwrap();
    assert!((&u - &want).max_abs() < 1e-14);
    // The four pulses compose to the identity up to phase.
    assert!(u.phase_insensitive_distance(&Operator::identity(4)) < 1e-12);
}

#[test]
fn execute_matches_compile() {
    let sys = chain();
    let s = super_whh_schedule(1, 2, 0.03).unwrap();
    let u = compile_schedule(&s, &sys).unwrap();
    for basis in [0, 5, 13] {
        let st = StateVector::basis(4, basis).unwrap();
        let a = execute_schedule(st.clone(), &s, &sys).unwrap();
        let b = crate::qstate::apply_unitary(st, &u).unwrap();
        assert!((state_fidelity(&a, &b).unwrap() - 1.0).abs() < 1e-12);
    }
    let wrong = StateVector::basis(3, 0).unwrap();
    assert!(execute_schedule(wrong, &s, &sys).is_err());
}

#[test]
fn whh4_error_is_second_order() {
    // On a lone pair every toggled term commutes and the cycle is exact, so
    // use three spins. The cycle's deviation from a pure phase is
    // T * O((J tau)^2) and therefore drops at least fourfold per halving.
    let sys = chain();
    let err = |tau: f64| {
        let u = compile_schedule(&whh4_schedule(tau, None).unwrap(), &sys).unwrap();
        u.phase_insensitive_distance(&Operator::identity(16))
    };
    let r = err(0.02) / err(0.01);
    assert!(r > 3.5, "ratio {r}");
}

#[test]
fn long_runs_keep_the_norm() {
    let sys = chain();
    let ev = Evolution::new(&sys);
    let mut s = Schedule::new();
    for _ in 0..10_000 {
        s.push_free(0.01);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let st = ev.execute(StateVector::random(4, &mut rng), &s).unwrap();
    assert!((st.norm() - 1.0).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn seeded_dressing_is_reproducible(seed in any::<u64>()) {
        let b = super_whh_schedule(0, 1, 0.1).unwrap();
        let run = || {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            randomize_blocks(&[b.clone(), b.clone(), b.clone()], 4, 0, 1,
                SchemeVariant::RandomizedSymmetrized, &mut rng).unwrap()
        };
        prop_assert_eq!(run(), run());
    }

    #[test]
    fn super_whh_zeroth_order_on_chain(k in 0usize..4, l in 0usize..4, tau in 0.001f64..0.1) {
        prop_assume!(k != l);
        let sys = chain();
        let h = dipole_hamiltonian(&sys);
        let pw = toggled_sequence(&super_whh_schedule(k, l, tau).unwrap(), &h).unwrap();
        let t = aht_terms(&pw, 0).unwrap();
        let mut want = Operator::zeros(16);
        for a in PauliAxis::NONTRIVIAL {
            want = &want + &pauli_string(4, &[(k, a), (l, a)]).unwrap();
        }
        let want = want.scale_real(2.0 * sys.coupling(k, l) / 9.0);
        prop_assert!((&t.h0 - &want).max_abs() < 1e-12);
    }
}
