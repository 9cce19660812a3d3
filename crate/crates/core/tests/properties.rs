use std::f64::consts::{FRAC_PI_4, PI};

use cuswitch::fidelity::{branch_fidelity, format_g};
use cuswitch::gates::{cu_gate, protocol_gates};
use cuswitch::photonic::{backward_operator, forward_operator, gadget_sequence, GadgetAngles};
use cuswitch::protocol::{
    run_protocol, rzn, AOutcome, BOutcome, BranchOutcome, BranchSource, InputQubit,
};
use cuswitch::qmath::{
    equal_up_to_global_phase, meas_basis_mu_nu, measure, phase, rotation, rotation_z, tensor,
    Basis2, OutcomeSource,
};
use cuswitch::{BranchClass, CUParams, Cplx, Operator, Preset, StateVec, UnitVec3};
use proptest::prelude::*;

fn angle() -> impl Strategy<Value = f64> {
    -2.0 * PI..2.0 * PI
}

fn axis() -> impl Strategy<Value = UnitVec3> {
    (-1.0f64..1.0, 0.0..2.0 * PI).prop_map(|(z, phi)| {
        let r = (1.0 - z * z).sqrt();
        UnitVec3::normalize(r * phi.cos(), r * phi.sin(), z).unwrap()
    })
}

fn params() -> impl Strategy<Value = CUParams> {
    (angle(), angle(), axis()).prop_map(|(a, t, n)| CUParams::new(a, t, n).unwrap())
}

fn unitary2() -> impl Strategy<Value = Operator> {
    (axis(), angle(), angle()).prop_map(|(n, t, g)| rotation(&n, t).scale(phase(g)))
}

fn qubit() -> impl Strategy<Value = InputQubit> {
    (0.0..PI, angle(), angle()).prop_map(|(t, rel, g)| {
        InputQubit::new(phase(g) * (t / 2.0).cos(), phase(g + rel) * (t / 2.0).sin()).unwrap()
    })
}

fn state(max_qubits: usize) -> impl Strategy<Value = StateVec> {
    (1..=max_qubits).prop_flat_map(|n| {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1 << n)
            .prop_filter("nonzero", |v| {
                v.iter().any(|(a, b)| a.abs() + b.abs() > 1e-3)
            })
            .prop_map(|v| {
                StateVec::unnormalized(v.into_iter().map(|(a, b)| Cplx::new(a, b)).collect())
                    .and_then(|s| s.normalized())
                    .ok()
            })
            .prop_filter_map("normalizable", |s| s)
    })
}

fn branch() -> impl Strategy<Value = (AOutcome, BOutcome)> {
    (0..4usize).prop_map(|k| BranchOutcome::ALL_PAIRS[k])
}

/// Operator realized by one forced branch, rebuilt column by column from
/// basis-state runs with the tabulated phase restored.
fn realized_operator(params: &CUParams, a: AOutcome, b: BOutcome) -> Operator {
    let basis = [InputQubit::zero(), InputQubit::one()];
    let mut entries = vec![Cplx::new(0.0, 0.0); 16];
    for (col, (x, y)) in [(0, 0), (0, 1), (1, 0), (1, 1)].into_iter().enumerate() {
        let t = run_protocol(params, &basis[x], &basis[y], BranchSource::Forced(a, b)).unwrap();
        for (row, amp) in t.final_state.amps().iter().enumerate() {
            entries[row * 4 + col] = t.global_phase * amp;
        }
    }
    Operator::new(4, entries).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn tensor_is_associative(a in unitary2(), b in unitary2(), c in unitary2()) {
        let left = tensor(&[tensor(&[a.clone(), b.clone()]).unwrap(), c.clone()]).unwrap();
        let right = tensor(&[a, tensor(&[b, c]).unwrap()]).unwrap();
        prop_assert!(left.max_abs_diff(&right) < 1e-14);
    }

    #[test]
    fn measurement_probabilities_sum_to_one(s in state(4), q in 0usize..4, t in angle(), use_pm in any::<bool>()) {
        let q = q % s.n_qubits();
        let basis = if use_pm { Basis2::plus_minus() } else { meas_basis_mu_nu(t) };
        if s.n_qubits() > 1 {
            let m = measure(&s, q, &basis, OutcomeSource::Forced(0)).or_else(|_| measure(&s, q, &basis, OutcomeSource::Forced(1))).unwrap();
            prop_assert!((m.probabilities[0] + m.probabilities[1] - 1.0).abs() < 1e-12);
            prop_assert!((m.residual.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn global_phase_equivalence(s in state(3), g in angle()) {
        let rotated = s.scale(phase(g));
        let fwd = equal_up_to_global_phase(&s, &rotated, 1e-9).unwrap();
        prop_assert!(fwd.equal);
        prop_assert!((fwd.phase.unwrap() - phase(g)).norm() < 1e-9);
        let back = equal_up_to_global_phase(&rotated, &s, 1e-9).unwrap();
        prop_assert!((back.phase.unwrap() * fwd.phase.unwrap() - Cplx::new(1.0, 0.0)).norm() < 1e-9);
        prop_assert!(equal_up_to_global_phase(&s, &s, 1e-12).unwrap().equal);
    }

    #[test]
    fn unitaries_stay_unitary(u in unitary2(), v in unitary2()) {
        prop_assert!((&u * &v).is_unitary(1e-12));
        prop_assert!(u.kron(&v).is_unitary(1e-12));
    }

    #[test]
    fn branch_probability_is_quarter(p in params(), x in qubit(), y in qubit(), (a, b) in branch()) {
        let t = run_protocol(&p, &x, &y, BranchSource::Forced(a, b)).unwrap();
        prop_assert!((t.branch_probability - 0.25).abs() < 1e-12);
    }

    #[test]
    fn protocol_implements_cu(p in params(), x in qubit(), y in qubit(), (a, b) in branch()) {
        let t = run_protocol(&p, &x, &y, BranchSource::Forced(a, b)).unwrap();
        let input = StateVec::product(&[x.state(), y.state()]).unwrap();
        let target = StateVec::new(cu_gate(&p).apply_to(input.amps())).unwrap();
        let cmp = equal_up_to_global_phase(&t.final_state, &target, 1e-9).unwrap();
        prop_assert!(cmp.equal);
        prop_assert!((cmp.phase.unwrap() - t.global_phase).norm() < 1e-9);
        prop_assert_eq!((t.ledger.ebits, t.ledger.cbits, t.ledger.switches), (1, 2, 2));
    }

    #[test]
    fn sampled_run_matches_forced_run(p in params(), x in qubit(), y in qubit(), seed in any::<u64>()) {
        let sampled = run_protocol(&p, &x, &y, BranchSource::Sampled(seed)).unwrap();
        let forced = run_protocol(&p, &x, &y, BranchSource::Forced(sampled.outcome.a, sampled.outcome.b)).unwrap();
        prop_assert_eq!(sampled.final_state, forced.final_state);
        prop_assert_eq!(sampled.outcome, forced.outcome);
    }

    #[test]
    fn output_is_independent_of_orthogonal_axis(p in params(), spin in angle(), x in qubit(), y in qubit(), (a, b) in branch()) {
        let n = p.n();
        // Spin the default n⊥ about n to get another orthogonal choice.
        let r = rotation(&n, spin);
        let spun = &(&r * &p.n_perp().sigma()) * &r.adjoint();
        let comp = [spun.get(0, 1).re, -spun.get(0, 1).im, spun.get(0, 0).re];
        let alt = CUParams::with_n_perp(p.alpha(), p.theta(), n, UnitVec3::normalize(comp[0], comp[1], comp[2]).unwrap()).unwrap();
        let first = run_protocol(&p, &x, &y, BranchSource::Forced(a, b)).unwrap();
        let second = run_protocol(&alt, &x, &y, BranchSource::Forced(a, b)).unwrap();
        prop_assert!(first.final_state.max_abs_diff(&second.final_state) < 1e-9);
    }

    #[test]
    fn realized_branches_compose(p in params(), q in params(), b1 in branch(), b2 in branch()) {
        let first = realized_operator(&p, b1.0, b1.1);
        let second = realized_operator(&q, b2.0, b2.1);
        let expected = &cu_gate(&q) * &cu_gate(&p);
        prop_assert!((&second * &first).max_abs_diff(&expected) < 1e-9);
    }

    #[test]
    fn mirrored_gadgets_are_reciprocal(t in angle(), phi in angle(), gamma in angle(), odd in any::<bool>()) {
        let shift = if odd { 3.0 * FRAC_PI_4 } else { FRAC_PI_4 };
        let seq = gadget_sequence(&GadgetAngles { theta1: t, phi1: phi + shift, gamma, phi2: phi, theta2: t });
        let cmp = equal_up_to_global_phase(forward_operator(&seq).matrix(), backward_operator(&seq).matrix(), 1e-10).unwrap();
        prop_assert!(cmp.equal, "deviation {}", cmp.deviation);
    }

    #[test]
    fn gadget_operators_are_special_unitary(t1 in angle(), p1 in angle(), g in angle(), p2 in angle(), t2 in angle()) {
        let seq = gadget_sequence(&GadgetAngles { theta1: t1, phi1: p1, gamma: g, phi2: p2, theta2: t2 });
        for op in [forward_operator(&seq), backward_operator(&seq)] {
            prop_assert!(op.matrix().is_unitary(1e-12));
            prop_assert!((op.matrix().det2() - Cplx::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn fidelity_is_bounded(k in 0usize..4, delta in -0.9f64..0.9, t1 in angle(), t2 in angle(), mu in any::<bool>()) {
        let class = if mu { BranchClass::Mu } else { BranchClass::Nu };
        let preset = Preset::ALL[k];
        match branch_fidelity(&preset.params(), delta, class, t1, t2) {
            Ok(f) => {
                prop_assert!((0.0..=1.0 + 1e-9).contains(&f));
                if matches!(preset, Preset::Cy | Preset::Cz) {
                    prop_assert!((f - 1.0).abs() < 1e-12);
                }
            }
            Err(e) => prop_assert!(matches!(e, cuswitch::Error::AnnihilatedBranch(_))),
        }
    }

    #[test]
    fn format_g_round_trips(x in prop::num::f64::NORMAL) {
        let printed = format_g(x, 12);
        let back: f64 = printed.parse().unwrap();
        prop_assert!(((back - x) / x).abs() <= 5e-12, "{} -> {}", x, printed);
        prop_assert!(printed.chars().filter(|c| c.is_ascii_digit()).count() <= 12 + 4);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn cu_factorizes(p in params()) {
        let n = p.n();
        let rebuilt = &rotation_z(p.alpha()).kron(&rotation(&n, -p.theta())).scale(phase(p.alpha() / 2.0)) * &rzn(p.theta(), &n);
        prop_assert!(cu_gate(&p).max_abs_diff(&rebuilt) < 1e-12);
        prop_assert!(protocol_gates(&p).is_unitary(1e-12));
    }
}

#[test]
fn explicit_n_perp_choices_agree_for_cnot() {
    let base = Preset::Cnot.params();
    let alt = CUParams::with_n_perp(base.alpha(), base.theta(), base.n(), UnitVec3::Y).unwrap();
    let x = InputQubit::from_angle(0.3);
    let y = InputQubit::from_angle(1.2);
    for (a, b) in BranchOutcome::ALL_PAIRS {
        let s1 = run_protocol(&base, &x, &y, BranchSource::Forced(a, b)).unwrap();
        let s2 = run_protocol(&alt, &x, &y, BranchSource::Forced(a, b)).unwrap();
        assert!(s1.final_state.max_abs_diff(&s2.final_state) < 1e-12);
    }
}
