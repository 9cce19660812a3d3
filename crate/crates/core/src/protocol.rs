//! End-to-end teleportation of a controlled-unitary gate on the register
//! `(a, b, A, B)`.
//!
//! Alice holds the ancilla `a` and the control `A`; Bob holds `b` and the
//! target `B`. The ancillas start in `(|00⟩ + i|11⟩)/√2`, each party runs a
//! quantum switch on its data qubit controlled by its ancilla, Alice measures
//! `a` in `{|±⟩}` and tells Bob, Bob measures `b` in the adapted `{μ, ν}`
//! basis and tells Alice, and both apply the class-dependent corrections.

use std::f64::consts::PI;

use rand::RngCore;

use crate::error::{Error, Result};
use crate::gates::{cu_gate, feedforward, protocol_gates, BranchClass, CUParams, ProtocolGateSet};
use crate::qmath::{
    apply, equal_up_to_global_phase, meas_basis_mu_nu, measure, pauli_z, phase, rotation,
    rotation_z, tensor, Basis2, Cplx, Operator, OutcomeSource, StateVec, UnitVec3, DEFAULT_TOL, I,
    ONE, ZERO,
};
use crate::report::Check;
use crate::sampling;

/// Register positions.
pub const QUBIT_ANC_A: usize = 0;
pub const QUBIT_ANC_B: usize = 1;
pub const QUBIT_A: usize = 2;
pub const QUBIT_B: usize = 3;

const INPUT_NORM_TOL: f64 = 1e-12;

/// A normalized single-qubit input `amp0|0⟩ + amp1|1⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InputQubit {
    amp0: Cplx,
    amp1: Cplx,
}

impl InputQubit {
    pub fn new(amp0: Cplx, amp1: Cplx) -> Result<Self> {
        let norm = (amp0.norm_sqr() + amp1.norm_sqr()).sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > INPUT_NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(InputQubit { amp0, amp1 })
    }

    pub fn zero() -> Self {
        InputQubit {
            amp0: ONE,
            amp1: ZERO,
        }
    }

    pub fn one() -> Self {
        InputQubit {
            amp0: ZERO,
            amp1: ONE,
        }
    }

    /// `cos(t)|0⟩ + sin(t)|1⟩`, the states a half-wave plate prepares from |H⟩.
    pub fn from_angle(t: f64) -> Self {
        let (s, c) = t.sin_cos();
        InputQubit {
            amp0: Cplx::new(c, 0.0),
            amp1: Cplx::new(s, 0.0),
        }
    }

    pub fn amp0(&self) -> Cplx {
        self.amp0
    }

    pub fn amp1(&self) -> Cplx {
        self.amp1
    }

    pub fn state(&self) -> StateVec {
        StateVec::new(vec![self.amp0, self.amp1]).expect("normalized")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AOutcome {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BOutcome {
    Mu,
    Nu,
}

impl AOutcome {
    fn index(self) -> usize {
        match self {
            AOutcome::Plus => 0,
            AOutcome::Minus => 1,
        }
    }

    fn from_index(k: usize) -> Self {
        if k == 0 {
            AOutcome::Plus
        } else {
            AOutcome::Minus
        }
    }
}

impl BOutcome {
    fn index(self) -> usize {
        match self {
            BOutcome::Mu => 0,
            BOutcome::Nu => 1,
        }
    }

    fn from_index(k: usize) -> Self {
        if k == 0 {
            BOutcome::Mu
        } else {
            BOutcome::Nu
        }
    }
}

/// Measured ancilla pair together with the basis Bob used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchOutcome {
    pub a: AOutcome,
    pub b: BOutcome,
    /// `θ` after `|+⟩`, `π − θ` after `|−⟩`.
    pub b_basis_angle: f64,
    pub class: BranchClass,
}

impl BranchOutcome {
    pub const ALL_PAIRS: [(AOutcome, BOutcome); 4] = [
        (AOutcome::Plus, BOutcome::Mu),
        (AOutcome::Plus, BOutcome::Nu),
        (AOutcome::Minus, BOutcome::Nu),
        (AOutcome::Minus, BOutcome::Mu),
    ];

    pub fn new(a: AOutcome, b: BOutcome, theta: f64) -> Self {
        BranchOutcome {
            a,
            b,
            b_basis_angle: bob_basis_angle(a, theta),
            class: classify(a, b),
        }
    }
}

/// `(+, μ)` and `(−, ν)` are class μ; `(+, ν)` and `(−, μ)` are class ν.
pub fn classify(a: AOutcome, b: BOutcome) -> BranchClass {
    match (a, b) {
        (AOutcome::Plus, BOutcome::Mu) | (AOutcome::Minus, BOutcome::Nu) => BranchClass::Mu,
        (AOutcome::Plus, BOutcome::Nu) | (AOutcome::Minus, BOutcome::Mu) => BranchClass::Nu,
    }
}

fn bob_basis_angle(a: AOutcome, theta: f64) -> f64 {
    match a {
        AOutcome::Plus => theta,
        AOutcome::Minus => PI - theta,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ResourceLedger {
    pub ebits: u32,
    pub cbits: u32,
    pub switches: u32,
}

/// How the two ancilla outcomes are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchSource {
    /// Both outcomes sampled from a ChaCha8 stream seeded with the value.
    Sampled(u64),
    Forced(AOutcome, BOutcome),
}

impl BranchSource {
    fn split(self) -> (OutcomeSource, OutcomeSource) {
        match self {
            BranchSource::Sampled(seed) => {
                let mut rng = sampling::rng(seed);
                (
                    OutcomeSource::Sampled(rng.next_u64()),
                    OutcomeSource::Sampled(rng.next_u64()),
                )
            }
            BranchSource::Forced(a, b) => (
                OutcomeSource::Forced(a.index()),
                OutcomeSource::Forced(b.index()),
            ),
        }
    }
}

/// `(|00⟩_ab + i|11⟩_ab)/√2 ⊗ |φ⟩_A ⊗ |φ⟩_B`.
pub fn prepare_initial(in_a: &InputQubit, in_b: &InputQubit) -> StateVec {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let pair =
        StateVec::new(vec![Cplx::new(h, 0.0), ZERO, ZERO, Cplx::new(0.0, h)]).expect("normalized");
    StateVec::product(&[pair, in_a.state(), in_b.state()]).expect("four qubits")
}

/// `V_A` on `A`, `V_B` on `B`.
pub fn apply_local_v(state: &StateVec, gates: &ProtocolGateSet) -> Result<StateVec> {
    let s = apply(state, &gates.v_a, &[QUBIT_A])?;
    apply(&s, &gates.v_b, &[QUBIT_B])
}

fn projector(bit: usize) -> Operator {
    let d = if bit == 0 { [ONE, ZERO] } else { [ZERO, ONE] };
    Operator::diagonal(&d).expect("2x2")
}

/// Joint action of both switches: `|00⟩⟨00|_ab ⊗ M₀ + |11⟩⟨11|_ab ⊗ M₁`,
/// identity on the `|01⟩`, `|10⟩` ancilla components.
pub fn apply_switches(state: &StateVec, gates: &ProtocolGateSet) -> Result<StateVec> {
    let id4 = Operator::identity(4);
    let blocks = [
        (0, 0, gates.order_first()),
        (0, 1, id4.clone()),
        (1, 0, id4),
        (1, 1, gates.order_second()),
    ];
    let mut controlled = Operator::zeros(16);
    for (a, b, m) in blocks {
        let term = tensor(&[projector(a), projector(b), m])?;
        controlled = &controlled + &term;
    }
    apply(
        state,
        &controlled,
        &[QUBIT_ANC_A, QUBIT_ANC_B, QUBIT_A, QUBIT_B],
    )
}

/// One party's switch: order `second·first` when the control is |0⟩ and
/// `first·second` when it is |1⟩.
fn local_switch(
    state: &StateVec,
    control: usize,
    target: usize,
    first: &Operator,
    second: &Operator,
) -> Result<StateVec> {
    let op = &projector(0).kron(&(second * first)) + &projector(1).kron(&(first * second));
    apply(state, &op, &[control, target])
}

/// `S_μ = cos(θ/2)M₀ + i sin(θ/2)M₁`, `S_ν = sin(θ/2)M₀ − i cos(θ/2)M₁`.
pub fn switch_superposition(class: BranchClass, theta: f64, gates: &ProtocolGateSet) -> Operator {
    let (s, c) = (theta / 2.0).sin_cos();
    let (m0, m1) = (gates.order_first(), gates.order_second());
    let (k0, k1) = match class {
        BranchClass::Mu => (Cplx::new(c, 0.0), Cplx::new(0.0, s)),
        BranchClass::Nu => (Cplx::new(s, 0.0), Cplx::new(0.0, -c)),
    };
    &m0.scale(k0) + &m1.scale(k1)
}

/// Ancilla readout and the normalized `(A, B)` residual it leaves.
#[derive(Debug, Clone, PartialEq)]
pub struct AncillaMeasurement {
    pub outcome: BranchOutcome,
    /// Probability of the observed `(a, b)` pair.
    pub probability: f64,
    pub residual: StateVec,
}

struct AliceReadout {
    outcome: AOutcome,
    probability: f64,
    rest: StateVec,
}

/// Alice measures `a` (qubit 0) in `{|±⟩}`; the returned state is `(b, A, B)`.
fn alice_measure(state: &StateVec, source: OutcomeSource) -> Result<AliceReadout> {
    let m = measure(state, QUBIT_ANC_A, &Basis2::plus_minus(), source)?;
    Ok(AliceReadout {
        outcome: AOutcome::from_index(m.outcome),
        probability: m.probability,
        rest: m.residual,
    })
}

/// Bob measures `b` (qubit 0 of `(b, A, B)`) in the basis adapted to Alice's report.
fn bob_measure(
    rest: &StateVec,
    alice: AOutcome,
    theta: f64,
    source: OutcomeSource,
) -> Result<(BOutcome, f64, StateVec)> {
    let basis = meas_basis_mu_nu(bob_basis_angle(alice, theta));
    let m = measure(rest, 0, &basis, source)?;
    Ok((BOutcome::from_index(m.outcome), m.probability, m.residual))
}

/// Measures `a` in `{|±⟩}` then `b` in `{μ(θ), ν(θ)}` or `{μ(π−θ), ν(π−θ)}`.
///
/// Works on unnormalized post-switch states as well; probabilities are
/// relative to the input norm and the residual is always renormalized.
pub fn measure_ancillas(
    state: &StateVec,
    theta: f64,
    source: BranchSource,
) -> Result<AncillaMeasurement> {
    if state.n_qubits() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 16,
            actual: state.amps().len(),
        });
    }
    let (src_a, src_b) = source.split();
    let alice = alice_measure(state, src_a)?;
    let (b, p_b, residual) = bob_measure(&alice.rest, alice.outcome, theta, src_b)?;
    Ok(AncillaMeasurement {
        outcome: BranchOutcome::new(alice.outcome, b, theta),
        probability: alice.probability * p_b,
        residual,
    })
}

/// Applies the class correction `W_A ⊗ W_B` to an `(A, B)` residual.
pub fn apply_feedforward(
    residual: &StateVec,
    class: BranchClass,
    params: &CUParams,
) -> Result<StateVec> {
    let ff = feedforward(class, params);
    let s = apply(residual, &ff.w_a, &[0])?;
    apply(&s, &ff.w_b, &[1])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Party {
    Alice,
    Bob,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassicalMessage {
    AliceToBob(AOutcome),
    BobToAlice(BOutcome),
}

/// In-process classical link; every message costs one cbit.
#[derive(Debug, Default)]
struct ClassicalChannel {
    log: Vec<ClassicalMessage>,
}

impl ClassicalChannel {
    fn send(&mut self, msg: ClassicalMessage, ledger: &mut ResourceLedger) -> ClassicalMessage {
        ledger.cbits += 1;
        self.log.push(msg);
        msg
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolTranscript {
    pub outcome: BranchOutcome,
    /// Probability of the observed `(a, b)` pair.
    pub branch_probability: f64,
    pub feedforward_applied: (Operator, Operator),
    /// Phase `φ` with `CU·|φ_A φ_B⟩ = φ·final_state`.
    pub global_phase: Cplx,
    /// Normalized two-qubit state on `(A, B)`.
    pub final_state: StateVec,
    pub ledger: ResourceLedger,
    pub messages: Vec<ClassicalMessage>,
}

/// Runs the full protocol for ideal gates.
pub fn run_protocol(
    params: &CUParams,
    in_a: &InputQubit,
    in_b: &InputQubit,
    source: BranchSource,
) -> Result<ProtocolTranscript> {
    run_with_gates(params, &protocol_gates(params), in_a, in_b, source)
}

/// Runs the protocol with an arbitrary switch-gate set; corrections are
/// always the ideal ones for `params`.
pub fn run_with_gates(
    params: &CUParams,
    gates: &ProtocolGateSet,
    in_a: &InputQubit,
    in_b: &InputQubit,
    source: BranchSource,
) -> Result<ProtocolTranscript> {
    let mut ledger = ResourceLedger::default();
    let mut channel = ClassicalChannel::default();
    let (src_a, src_b) = source.split();

    // Shared pair distributed: a to Alice, b to Bob.
    let mut state = prepare_initial(in_a, in_b);
    ledger.ebits += 1;

    // Local pre-rotations.
    state = apply(&state, &gates.v_a, &[QUBIT_A])?;
    state = apply(&state, &gates.v_b, &[QUBIT_B])?;

    // Each party's quantum switch.
    state = local_switch(&state, QUBIT_ANC_A, QUBIT_A, &gates.u_a1, &gates.u_a2)?;
    ledger.switches += 1;
    state = local_switch(&state, QUBIT_ANC_B, QUBIT_B, &gates.u_b1, &gates.u_b2)?;
    ledger.switches += 1;

    // Alice measures and reports; Bob adapts his basis to the report.
    let alice = alice_measure(&state, src_a)?;
    let ClassicalMessage::AliceToBob(seen_by_bob) =
        channel.send(ClassicalMessage::AliceToBob(alice.outcome), &mut ledger)
    else {
        unreachable!()
    };
    let (b, p_b, residual) = bob_measure(&alice.rest, seen_by_bob, params.theta(), src_b)?;
    let ClassicalMessage::BobToAlice(seen_by_alice) =
        channel.send(ClassicalMessage::BobToAlice(b), &mut ledger)
    else {
        unreachable!()
    };

    // Both now know the class; each corrects its own qubit.
    let alice_class = classify(alice.outcome, seen_by_alice);
    let bob_class = classify(seen_by_bob, b);
    debug_assert_eq!(alice_class, bob_class);
    let ff_a = feedforward(alice_class, params);
    let ff_b = feedforward(bob_class, params);
    let corrected = apply(&residual, &ff_a.w_a, &[0])?;
    let final_state = apply(&corrected, &ff_b.w_b, &[1])?;

    Ok(ProtocolTranscript {
        outcome: BranchOutcome::new(alice.outcome, b, params.theta()),
        branch_probability: alice.probability * p_b,
        feedforward_applied: (ff_a.w_a, ff_b.w_b),
        global_phase: ff_a.phase,
        final_state,
        ledger,
        messages: channel.log,
    })
}

/// `CU·(|φ_A⟩ ⊗ |φ_B⟩)`.
pub fn ideal_output(params: &CUParams, in_a: &InputQubit, in_b: &InputQubit) -> StateVec {
    let input = StateVec::product(&[in_a.state(), in_b.state()]).expect("two qubits");
    StateVec::new(cu_gate(params).apply_to(input.amps())).expect("unitary preserves norm")
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceReport {
    pub trials: usize,
    pub runs: usize,
    /// Largest `max |CU·ψ − φ·final|` over all runs.
    pub max_state_deviation: f64,
    /// Largest distance between the extracted phase and the tabulated one.
    pub max_phase_error: f64,
    pub tolerance: f64,
    pub failures: Vec<String>,
}

impl EquivalenceReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Random inputs per trial, every forced branch; compares the final state
/// with `CU·input` up to global phase and the phase with the tabulated one.
pub fn verify_equivalence(
    params: &CUParams,
    trials: usize,
    seed: u64,
) -> Result<EquivalenceReport> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let mut rng = sampling::rng(seed);
    let mut report = EquivalenceReport {
        trials,
        runs: 0,
        max_state_deviation: 0.0,
        max_phase_error: 0.0,
        tolerance: DEFAULT_TOL,
        failures: Vec::new(),
    };
    for trial in 0..trials {
        let in_a = sampling::input_qubit(&mut rng);
        let in_b = sampling::input_qubit(&mut rng);
        let target = ideal_output(params, &in_a, &in_b);
        for (a, b) in BranchOutcome::ALL_PAIRS {
            let t = run_protocol(params, &in_a, &in_b, BranchSource::Forced(a, b))?;
            report.runs += 1;
            let cmp = equal_up_to_global_phase(&t.final_state, &target, DEFAULT_TOL)?;
            let phase_err = cmp
                .phase
                .map_or(f64::INFINITY, |p| (p - t.global_phase).norm());
            report.max_state_deviation = report.max_state_deviation.max(cmp.deviation);
            report.max_phase_error = report.max_phase_error.max(phase_err);
            if !cmp.equal || phase_err > DEFAULT_TOL {
                report.failures.push(format!(
                    "trial {trial} branch ({a:?}, {b:?}): deviation {:.3e}, phase error {:.3e}",
                    cmp.deviation, phase_err
                ));
            }
        }
    }
    Ok(report)
}

/// `cos(θ/2)·I⊗I − i sin(θ/2)·Z⊗(n·σ)`.
pub fn rzn(theta: f64, n: &UnitVec3) -> Operator {
    let (s, c) = (theta / 2.0).sin_cos();
    let zn = pauli_z().kron(&n.sigma());
    &Operator::identity(4).scale(Cplx::new(c, 0.0)) + &zn.scale(Cplx::new(0.0, -s))
}

/// Executable form of the operator identities behind the protocol.
pub fn verify_appendix(params: &CUParams, tol: f64) -> Vec<Check> {
    use std::f64::consts::FRAC_PI_2;
    let g = protocol_gates(params);
    let (theta, n) = (params.theta(), params.n());
    let mut checks = Vec::new();

    let a9 = [
        (
            "U_A2 U_A1 V_A = R_z(-pi/2)",
            &(&g.u_a2 * &g.u_a1) * &g.v_a,
            rotation_z(-FRAC_PI_2),
        ),
        (
            "U_A1 U_A2 V_A = R_z(pi/2)",
            &(&g.u_a1 * &g.u_a2) * &g.v_a,
            rotation_z(FRAC_PI_2),
        ),
        (
            "U_B2 U_B1 V_B = R_n(-pi/2)",
            &(&g.u_b2 * &g.u_b1) * &g.v_b,
            rotation(&n, -FRAC_PI_2),
        ),
        (
            "U_B1 U_B2 V_B = R_n(pi/2)",
            &(&g.u_b1 * &g.u_b2) * &g.v_b,
            rotation(&n, FRAC_PI_2),
        ),
    ];
    for (name, lhs, rhs) in a9 {
        checks.push(Check::new(name, lhs.max_abs_diff(&rhs), tol));
    }

    let cu = cu_gate(params);
    let a6 = rotation_z(params.alpha())
        .kron(&rotation(&n, -theta))
        .scale(phase(params.alpha() / 2.0));
    checks.push(Check::new(
        "CU = e^{ia/2}(R_z(a) x R_n(-t)) R_zn(t)",
        cu.max_abs_diff(&(&a6 * &rzn(theta, &n))),
        tol,
    ));

    let vv = g.local_v();
    let target = rzn(theta, &n);
    let tilde = [
        (
            BranchClass::Mu,
            rotation_z(FRAC_PI_2),
            rotation(&n, FRAC_PI_2),
        ),
        (
            BranchClass::Nu,
            rotation_z(-FRAC_PI_2).scale(I),
            rotation(&n, -FRAC_PI_2),
        ),
    ];
    for (class, wa, wb) in tilde {
        let s = switch_superposition(class, theta, &g);
        let rebuilt = &(&wa.kron(&wb) * &s) * &vv;
        checks.push(Check::new(
            format!("R_zn from {} switch", class.name()),
            target.max_abs_diff(&rebuilt),
            tol,
        ));
    }

    for class in BranchClass::ALL {
        let ff = feedforward(class, params);
        let s = switch_superposition(class, theta, &g);
        let rebuilt = (&(&ff.w_a.kron(&ff.w_b) * &s) * &vv).scale(ff.phase);
        checks.push(Check::new(
            format!("CU from {} switch", class.name()),
            cu.max_abs_diff(&rebuilt),
            tol,
        ));
    }
    checks
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::Preset;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn inputs() -> (InputQubit, InputQubit) {
        let mut rng = sampling::rng(11);
        (
            sampling::input_qubit(&mut rng),
            sampling::input_qubit(&mut rng),
        )
    }

    #[test]
    fn initial_state_amplitudes() {
        let (a, b) = inputs();
        let s = prepare_initial(&a, &b);
        let h = FRAC_1_SQRT_2;
        assert!((s.amplitude(0) - a.amp0() * b.amp0() * h).norm() < 1e-15);
        // |1 1 1 0⟩ carries i/√2 · β₁α₂
        let expected = Cplx::new(0.0, h) * a.amp1() * b.amp0();
        assert!((s.amplitude(0b1110) - expected).norm() < 1e-15);
        assert!((s.norm() - 1.0).abs() < 1e-14);
        for idx in [0b0100, 0b1000, 0b0111, 0b1011] {
            assert_eq!(s.amplitude(idx), ZERO);
        }
    }

    #[test]
    fn input_validation() {
        assert!(InputQubit::new(ONE, ONE).is_err());
        assert!(InputQubit::new(Cplx::new(0.6, 0.0), Cplx::new(0.0, 0.8)).is_ok());
    }

    #[test]
    fn local_v_flips_alice_input() {
        let (a, b) = inputs();
        let g = protocol_gates(&Preset::Cnot.params());
        let s = apply_local_v(&prepare_initial(&a, &b), &g).unwrap();
        let expected = prepare_initial(&InputQubit::new(a.amp1(), a.amp0()).unwrap(), &b);
        // V_B = Z for CNOT's n⊥
        let expected = apply(&expected, &pauli_z(), &[QUBIT_B]).unwrap();
        assert!(s.max_abs_diff(&expected) < 1e-15);
        let same = apply_local_v(&s, &ProtocolGateSet::identity()).unwrap();
        assert_eq!(same, s);
    }

    #[test]
    fn switches_match_literal_expansion() {
        let mut rng = sampling::rng(5);
        for _ in 0..10 {
            let p = sampling::cu_params(&mut rng);
            let (a, b) = (
                sampling::input_qubit(&mut rng),
                sampling::input_qubit(&mut rng),
            );
            let g = protocol_gates(&p);
            let s1 = apply_local_v(&prepare_initial(&a, &b), &g).unwrap();
            let s2 = apply_switches(&s1, &g).unwrap();
            let phi = StateVec::product(&[a.state(), b.state()]).unwrap();
            let phi1 = g.local_v().apply_to(phi.amps());
            let branch0 = g.order_first().apply_to(&phi1);
            let branch1 = g.order_second().apply_to(&phi1);
            let h = FRAC_1_SQRT_2;
            for k in 0..4 {
                assert!((s2.amplitude(k) - branch0[k] * h).norm() < 1e-14);
                assert!((s2.amplitude(12 + k) - branch1[k] * Cplx::new(0.0, h)).norm() < 1e-14);
                assert_eq!(s2.amplitude(4 + k), ZERO);
                assert_eq!(s2.amplitude(8 + k), ZERO);
            }
            assert!((s2.norm() - 1.0).abs() < 1e-14);

            let local = local_switch(&s1, QUBIT_ANC_A, QUBIT_A, &g.u_a1, &g.u_a2).unwrap();
            let local = local_switch(&local, QUBIT_ANC_B, QUBIT_B, &g.u_b1, &g.u_b2).unwrap();
            assert!(local.max_abs_diff(&s2) < 1e-15);
        }
        let (a, b) = inputs();
        let s = prepare_initial(&a, &b);
        assert_eq!(apply_switches(&s, &ProtocolGateSet::identity()).unwrap(), s);
    }

    #[test]
    fn superposition_special_angles() {
        let g = protocol_gates(&Preset::Ch.params());
        let s0 = switch_superposition(BranchClass::Mu, 0.0, &g);
        assert!(s0.max_abs_diff(&g.order_first()) < 1e-15);
        let spi = switch_superposition(BranchClass::Mu, PI, &g);
        assert!(spi.max_abs_diff(&g.order_second().scale(I)) < 1e-15);
    }

    #[test]
    fn rzn_special_values() {
        let n = UnitVec3::normalize(1.0, -2.0, 0.5).unwrap();
        assert!(rzn(0.0, &n).max_abs_diff(&Operator::identity(4)) < 1e-15);
        let zz = pauli_z().kron(&pauli_z()).scale(-I);
        assert!(rzn(PI, &UnitVec3::Z).max_abs_diff(&zz) < 1e-15);
        assert!(rzn(0.4, &n).is_unitary(1e-14));
    }

    #[test]
    fn cnot_on_one_zero_gives_one_one() {
        let p = Preset::Cnot.params();
        let ket11 = StateVec::basis_state(2, 0b11).unwrap();
        for (a, b) in BranchOutcome::ALL_PAIRS {
            let t = run_protocol(
                &p,
                &InputQubit::one(),
                &InputQubit::zero(),
                BranchSource::Forced(a, b),
            )
            .unwrap();
            let expected = ket11.scale(t.global_phase.conj());
            assert!(t.final_state.max_abs_diff(&expected) < 1e-12, "{a:?} {b:?}");
            let class_phase = match t.outcome.class {
                BranchClass::Mu => phase(-PI / 4.0),
                BranchClass::Nu => I * phase(-PI / 4.0),
            };
            assert!((t.global_phase - class_phase).norm() < 1e-15);
        }
    }

    #[test]
    fn transcript_records_two_messages() {
        let (a, b) = inputs();
        let t = run_protocol(&Preset::Cz.params(), &a, &b, BranchSource::Sampled(3)).unwrap();
        assert_eq!(
            t.ledger,
            ResourceLedger {
                ebits: 1,
                cbits: 2,
                switches: 2
            }
        );
        assert_eq!(t.messages.len(), 2);
        assert!(matches!(t.messages[0], ClassicalMessage::AliceToBob(x) if x == t.outcome.a));
        assert!(matches!(t.messages[1], ClassicalMessage::BobToAlice(x) if x == t.outcome.b));
    }

    #[test]
    fn minus_outcome_uses_complementary_angle() {
        let p = CUParams::new(0.2, 0.9, UnitVec3::Y).unwrap();
        let (a, b) = inputs();
        let t = run_protocol(
            &p,
            &a,
            &b,
            BranchSource::Forced(AOutcome::Minus, BOutcome::Mu),
        )
        .unwrap();
        assert!((t.outcome.b_basis_angle - (PI - 0.9)).abs() < 1e-15);
        assert_eq!(t.outcome.class, BranchClass::Nu);
    }

    #[test]
    fn identity_target_returns_input() {
        let p = CUParams::new(0.0, 0.0, UnitVec3::X).unwrap();
        let (a, b) = inputs();
        let input = StateVec::product(&[a.state(), b.state()]).unwrap();
        for (x, y) in BranchOutcome::ALL_PAIRS {
            let t = run_protocol(&p, &a, &b, BranchSource::Forced(x, y)).unwrap();
            let cmp = equal_up_to_global_phase(&t.final_state, &input, 1e-12).unwrap();
            assert!(cmp.equal);
        }
        assert!(verify_equivalence(&p, 5, 1).unwrap().passed());
    }

    #[test]
    fn equivalence_rejects_zero_trials() {
        assert!(verify_equivalence(&Preset::Cnot.params(), 0, 1).is_err());
    }

    #[test]
    fn appendix_checks_all_pass_for_presets() {
        for p in Preset::ALL {
            let checks = verify_appendix(&p.params(), 1e-12);
            assert_eq!(checks.len(), 9);
            assert!(checks.iter().all(|c| c.passed), "{p}: {checks:?}");
        }
    }

    #[test]
    fn forced_impossible_branch_is_an_error() {
        // a in |+⟩ or |−⟩ with equal weight, b fixed to |0⟩.
        let h = FRAC_1_SQRT_2;
        let mut amps = vec![ZERO; 16];
        amps[0] = Cplx::new(h, 0.0);
        amps[8] = Cplx::new(h, 0.0);
        let s = StateVec::new(amps).unwrap();
        // b = |0⟩ and θ = 0: μ(0) = |0⟩ certain, ν impossible.
        let r = measure_ancillas(&s, 0.0, BranchSource::Forced(AOutcome::Plus, BOutcome::Nu));
        assert!(matches!(r, Err(Error::ImpossibleBranch(_))));
    }
}
