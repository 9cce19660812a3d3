//! Jones-calculus model of the optical construction.
//!
//! Each photon carries a path qubit (`0`, `1`) and a polarization qubit
//! (`H` = 0, `V` = 1). A two-photon state is a four-qubit register ordered
//! `(path₁, pol₁, path₂, pol₂)`.
//!
//! Waveplates use the SU(2) convention `HWP(θ) = R_y(2θ)·R_z(π)·R_y(−2θ)`,
//! `QWP(θ) = R_y(2θ)·R_z(π/2)·R_y(−2θ)`; Faraday rotators are `R_y(χ)`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use crate::error::{Error, Result};
use crate::gates::{feedforward, protocol_gates, BranchClass, CUParams, ProtocolGateSet};
use crate::protocol::{
    apply_feedforward, apply_local_v, apply_switches, ideal_output, measure_ancillas,
    prepare_initial, AOutcome, BOutcome, BranchSource, InputQubit,
};
use crate::qmath::{
    apply, contract, equal_up_to_global_phase, hadamard, identity2, pauli_x, rotation_y,
    rotation_z, Cplx, Operator, StateVec, ONE, ZERO,
};

pub const PATH_1: usize = 0;
pub const POL_1: usize = 1;
pub const PATH_2: usize = 2;
pub const POL_2: usize = 3;

/// Polarization transformation in the `(H, V)` basis.
#[derive(Debug, Clone, PartialEq)]
pub struct JonesOp(Operator);

impl JonesOp {
    pub fn new(op: Operator) -> Result<Self> {
        if op.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                actual: op.dim(),
            });
        }
        Ok(JonesOp(op))
    }

    pub fn identity() -> Self {
        JonesOp(identity2())
    }

    pub fn matrix(&self) -> &Operator {
        &self.0
    }

    pub fn into_matrix(self) -> Operator {
        self.0
    }

    /// `next · self`: light meets `self` first.
    pub fn then(&self, next: &JonesOp) -> JonesOp {
        JonesOp(&next.0 * &self.0)
    }
}

pub fn hwp(theta: f64) -> JonesOp {
    JonesOp(&(&rotation_y(2.0 * theta) * &rotation_z(PI)) * &rotation_y(-2.0 * theta))
}

pub fn qwp(theta: f64) -> JonesOp {
    JonesOp(&(&rotation_y(2.0 * theta) * &rotation_z(FRAC_PI_2)) * &rotation_y(-2.0 * theta))
}

/// Faraday rotator with circular retardance `chi`.
pub fn faraday(chi: f64) -> JonesOp {
    JonesOp(rotation_y(chi))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OpticalElement {
    Hwp(f64),
    Qwp(f64),
    Faraday(f64),
}

impl OpticalElement {
    pub fn forward(&self) -> JonesOp {
        match *self {
            OpticalElement::Hwp(t) => hwp(t),
            OpticalElement::Qwp(t) => qwp(t),
            OpticalElement::Faraday(chi) => faraday(chi),
        }
    }

    /// Faraday rotators are the only non-reciprocal elements.
    pub fn is_reciprocal(&self) -> bool {
        !matches!(self, OpticalElement::Faraday(_))
    }

    /// Transpose of the forward matrix for reciprocal elements, the forward
    /// matrix itself for Faraday rotators.
    pub fn backward(&self) -> JonesOp {
        let fwd = self.forward();
        if self.is_reciprocal() {
            JonesOp(fwd.0.transpose())
        } else {
            fwd
        }
    }
}

/// Operator seen by light traversing `sequence` front to back.
pub fn forward_operator(sequence: &[OpticalElement]) -> JonesOp {
    sequence
        .iter()
        .fold(JonesOp::identity(), |acc, e| acc.then(&e.forward()))
}

/// Operator seen by light traversing `sequence` back to front.
pub fn backward_operator(sequence: &[OpticalElement]) -> JonesOp {
    sequence
        .iter()
        .rev()
        .fold(JonesOp::identity(), |acc, e| acc.then(&e.backward()))
}

/// Waveplate orientations of the nine-element Faraday gadget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GadgetAngles {
    pub theta1: f64,
    pub phi1: f64,
    pub gamma: f64,
    pub phi2: f64,
    pub theta2: f64,
}

impl GadgetAngles {
    /// Angles realizing `X` (the `U_A2` switch gate).
    pub const PAULI_X: GadgetAngles = GadgetAngles {
        theta1: 3.0 * FRAC_PI_4,
        phi1: 7.0 * PI / 8.0,
        gamma: 3.0 * FRAC_PI_4,
        phi2: 3.0 * PI / 8.0,
        theta2: FRAC_PI_4,
    };
}

/// Elements in propagation order for
/// `QWP(θ₁)·HWP(φ₁)·R_y(−π/2)·QWP(π/2)·HWP(γ)·QWP(π/2)·R_y(π/2)·HWP(φ₂)·QWP(θ₂)`.
pub fn gadget_sequence(a: &GadgetAngles) -> Vec<OpticalElement> {
    use OpticalElement::*;
    vec![
        Qwp(a.theta2),
        Hwp(a.phi2),
        Faraday(FRAC_PI_2),
        Qwp(FRAC_PI_2),
        Hwp(a.gamma),
        Qwp(FRAC_PI_2),
        Faraday(-FRAC_PI_2),
        Hwp(a.phi1),
        Qwp(a.theta1),
    ]
}

pub fn reciprocal_gadget(angles: &GadgetAngles) -> JonesOp {
    forward_operator(&gadget_sequence(angles))
}

/// `QWP(π/4)·HWP(3π/8)·QWP(π/4)` in propagation order; equals `R_z(π/2)` up to phase.
pub fn rz_half_pi_sequence() -> Vec<OpticalElement> {
    use OpticalElement::*;
    vec![Qwp(FRAC_PI_4), Hwp(3.0 * PI / 8.0), Qwp(FRAC_PI_4)]
}

/// Two-photon amplitudes over `(path₁, pol₁, path₂, pol₂)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonicState(StateVec);

impl PhotonicState {
    pub fn new(state: StateVec) -> Result<Self> {
        if state.n_qubits() != 4 {
            return Err(Error::DimensionMismatch {
                expected: 16,
                actual: state.amps().len(),
            });
        }
        Ok(PhotonicState(state))
    }

    pub fn state(&self) -> &StateVec {
        &self.0
    }

    pub fn amplitude(&self, path1: usize, pol1: usize, path2: usize, pol2: usize) -> Cplx {
        self.0.amplitude(path1 << 3 | pol1 << 2 | path2 << 1 | pol2)
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    fn map(&self, f: impl FnOnce(&StateVec) -> Result<StateVec>) -> Result<PhotonicState> {
        Ok(PhotonicState(f(&self.0)?))
    }
}

/// `(|H⟩₁|H⟩₂ + i|V⟩₁|V⟩₂)/√2` with both photons in path 0.
pub fn spdc_state() -> PhotonicState {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut amps = vec![ZERO; 16];
    amps[0b0000] = Cplx::new(h, 0.0);
    amps[0b0101] = Cplx::new(0.0, h);
    PhotonicState(StateVec::new(amps).expect("normalized"))
}

/// `|path, pol⟩ → |path ⊕ pol, pol⟩`: H keeps its path, V is routed to the other one.
fn pbs_operator() -> Operator {
    let mut e = vec![ZERO; 16];
    // local index = path·2 + pol
    for (r, c) in [(0, 0), (3, 1), (2, 2), (1, 3)] {
        e[r * 4 + c] = ONE;
    }
    Operator::new(4, e).expect("4x4")
}

/// Polarizing beam splitters on both photons: H stays in path 0, V goes to path 1.
pub fn pbs_encode(state: &PhotonicState) -> Result<PhotonicState> {
    let pbs = pbs_operator();
    state.map(|s| {
        let s = apply(s, &pbs, &[PATH_1, POL_1])?;
        apply(&s, &pbs, &[PATH_2, POL_2])
    })
}

/// `op` on the polarization of a photon whose path is `path`; identity otherwise.
fn on_path(op: &Operator, path: usize) -> Operator {
    let (hit, miss) = if path == 0 {
        ([ONE, ZERO], [ZERO, ONE])
    } else {
        ([ZERO, ONE], [ONE, ZERO])
    };
    let p_hit = Operator::diagonal(&hit).expect("2x2");
    let p_miss = Operator::diagonal(&miss).expect("2x2");
    &p_hit.kron(op) + &p_miss.kron(&identity2())
}

/// Rotation taking |H⟩ to `cos θ|H⟩ + sin θ|V⟩`.
pub fn preparation_rotation(theta: f64) -> JonesOp {
    JonesOp(rotation_y(2.0 * theta))
}

/// Turns the PBS output into `(|00⟩ + i|11⟩)/√2 ⊗ V_A|ψ₁⟩ ⊗ V_B|ψ₂⟩`:
/// flips V→H in each path-1 arm, prepares `cos θᵢ|H⟩ + sin θᵢ|V⟩` in both
/// arms, then applies the local gates.
pub fn prepare_inputs(
    state: &PhotonicState,
    theta1: f64,
    theta2: f64,
    v_a: &JonesOp,
    v_b: &JonesOp,
) -> Result<PhotonicState> {
    let flip = on_path(&pauli_x(), 1);
    let photon1 = preparation_rotation(theta1).then(v_a);
    let photon2 = preparation_rotation(theta2).then(v_b);
    state.map(|s| {
        let s = apply(s, &flip, &[PATH_1, POL_1])?;
        let s = apply(&s, &flip, &[PATH_2, POL_2])?;
        let s = apply(&s, photon1.matrix(), &[POL_1])?;
        apply(&s, photon2.matrix(), &[POL_2])
    })
}

/// Variable beam splitter on a path qubit:
/// `|0⟩ → cos(θ/2)|0⟩ + sin(θ/2)|1⟩`, `|1⟩ → sin(θ/2)|0⟩ − cos(θ/2)|1⟩`.
pub fn vbs(theta: f64) -> Operator {
    let (s, c) = (theta / 2.0).sin_cos();
    Operator::from_rows2([
        [Cplx::new(c, 0.0), Cplx::new(s, 0.0)],
        [Cplx::new(s, 0.0), Cplx::new(-c, 0.0)],
    ])
}

/// Balanced splitter on photon 1's path, real Hadamard convention.
pub fn beam_splitter() -> Operator {
    hadamard()
}

/// Sagnac switches: path 0 circulates counterclockwise (`U₂·U₁`), path 1
/// clockwise (`U₁·U₂`), independently for each photon.
pub fn sagnac_switch(state: &PhotonicState, gates: &ProtocolGateSet) -> Result<PhotonicState> {
    let loop_a =
        &on_path(&(&gates.u_a2 * &gates.u_a1), 0) * &on_path(&(&gates.u_a1 * &gates.u_a2), 1);
    let loop_b =
        &on_path(&(&gates.u_b2 * &gates.u_b1), 0) * &on_path(&(&gates.u_b1 * &gates.u_b2), 1);
    state.map(|s| {
        let s = apply(s, &loop_a, &[PATH_1, POL_1])?;
        apply(&s, &loop_b, &[PATH_2, POL_2])
    })
}

/// Full optical pipeline for an arbitrary gate set.
///
/// With `adaptive`, components where photon 1 exits in path 1 are taken
/// from a second pass with the VBS at `π − θ`; photon 1's path statistics do
/// not depend on the VBS, so the combined state stays normalized.
pub fn sagnac_output(
    gates: &ProtocolGateSet,
    theta1: f64,
    theta2: f64,
    theta: f64,
    adaptive: bool,
) -> Result<PhotonicState> {
    let v_a = JonesOp::new(gates.v_a.clone())?;
    let v_b = JonesOp::new(gates.v_b.clone())?;
    let encoded = pbs_encode(&spdc_state())?;
    let prepared = prepare_inputs(&encoded, theta1, theta2, &v_a, &v_b)?;
    let switched = sagnac_switch(&prepared, gates)?;
    let split = switched.map(|s| apply(s, &beam_splitter(), &[PATH_1]))?;
    let fixed = split.map(|s| apply(s, &vbs(theta), &[PATH_2]))?;
    if !adaptive {
        return Ok(fixed);
    }
    let alternate = split.map(|s| apply(s, &vbs(PI - theta), &[PATH_2]))?;
    let amps = fixed
        .0
        .amps()
        .iter()
        .zip(alternate.0.amps())
        .enumerate()
        .map(|(idx, (f, a))| if idx & 0b1000 == 0 { *f } else { *a })
        .collect();
    Ok(PhotonicState(StateVec::new(amps)?))
}

/// [`sagnac_output`] with the ideal gates for `params`.
pub fn sagnac_run(
    params: &CUParams,
    theta1: f64,
    theta2: f64,
    theta: f64,
    adaptive: bool,
) -> Result<PhotonicState> {
    sagnac_output(&protocol_gates(params), theta1, theta2, theta, adaptive)
}

/// Two-fold coincidence events. `M1`/`M2` watch photon 1's paths 0/1,
/// `M3`/`M4` photon 2's paths 0/1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DetectorPair {
    M1M3,
    M2M4,
    M1M4,
    M2M3,
}

impl DetectorPair {
    pub const ALL: [DetectorPair; 4] = [
        DetectorPair::M1M3,
        DetectorPair::M2M4,
        DetectorPair::M1M4,
        DetectorPair::M2M3,
    ];

    /// `(path₁, path₂)` selected by the pair.
    pub fn paths(&self) -> (usize, usize) {
        match self {
            DetectorPair::M1M3 => (0, 0),
            DetectorPair::M2M4 => (1, 1),
            DetectorPair::M1M4 => (0, 1),
            DetectorPair::M2M3 => (1, 0),
        }
    }

    /// Ancilla outcomes the pair stands for: M1 ≡ |+⟩, M2 ≡ |−⟩, M3 ≡ μ, M4 ≡ ν.
    pub fn ancilla_outcomes(&self) -> (AOutcome, BOutcome) {
        let (p1, p2) = self.paths();
        let a = if p1 == 0 {
            AOutcome::Plus
        } else {
            AOutcome::Minus
        };
        let b = if p2 == 0 { BOutcome::Mu } else { BOutcome::Nu };
        (a, b)
    }

    /// Branch class under the adaptive VBS setting.
    pub fn class(&self) -> BranchClass {
        match self {
            DetectorPair::M1M3 | DetectorPair::M2M4 => BranchClass::Mu,
            DetectorPair::M1M4 | DetectorPair::M2M3 => BranchClass::Nu,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            DetectorPair::M1M3 => "M1M3",
            DetectorPair::M2M4 => "M2M4",
            DetectorPair::M1M4 => "M1M4",
            DetectorPair::M2M3 => "M2M3",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Coincidence {
    pub probability: f64,
    /// Normalized `(pol₁, pol₂)` state conditioned on the event.
    pub polarization: StateVec,
}

pub fn coincidence(state: &PhotonicState, pair: DetectorPair) -> Result<Coincidence> {
    let (p1, p2) = pair.paths();
    let ket = |bit: usize| if bit == 0 { [ONE, ZERO] } else { [ZERO, ONE] };
    let after1 = contract(&state.0, PATH_1, ket(p1))?;
    // pol₁ is now qubit 0 and path₂ qubit 1.
    let residual = contract(&after1, 1, ket(p2))?;
    let probability = residual.norm_sqr() / state.0.norm_sqr();
    if probability < 1e-14 {
        return Err(Error::ZeroProbabilityPair);
    }
    Ok(Coincidence {
        probability,
        polarization: residual.normalized()?,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairComparison {
    pub pair: DetectorPair,
    pub probability: f64,
    /// Distance between the conditioned polarization state and the abstract
    /// branch state, up to global phase.
    pub residual_deviation: f64,
    /// Distance between the corrected state and `CU·input`, up to global phase.
    pub output_deviation: f64,
    /// Distance between the extracted phase and the tabulated one.
    pub phase_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerReport {
    pub pairs: Vec<PairComparison>,
    pub tolerance: f64,
}

impl LayerReport {
    pub fn max_deviation(&self) -> f64 {
        self.pairs
            .iter()
            .map(|p| {
                p.residual_deviation
                    .max(p.output_deviation)
                    .max(p.phase_error)
            })
            .fold(0.0, f64::max)
    }

    pub fn max_probability_error(&self) -> f64 {
        self.pairs
            .iter()
            .map(|p| (p.probability - 0.25).abs())
            .fold(0.0, f64::max)
    }

    pub fn passed(&self) -> bool {
        self.max_deviation() <= self.tolerance
    }
}

/// Compares each adaptive coincidence event with the abstract protocol run
/// on the inputs `cos θᵢ|0⟩ + sin θᵢ|1⟩`.
pub fn photonic_vs_abstract(
    params: &CUParams,
    theta1: f64,
    theta2: f64,
    tol: f64,
) -> Result<LayerReport> {
    let gates = protocol_gates(params);
    let optical = sagnac_output(&gates, theta1, theta2, params.theta(), true)?;
    let (in_a, in_b) = (
        InputQubit::from_angle(theta1),
        InputQubit::from_angle(theta2),
    );
    let switched = apply_switches(
        &apply_local_v(&prepare_initial(&in_a, &in_b), &gates)?,
        &gates,
    )?;
    let target = ideal_output(params, &in_a, &in_b);

    let mut pairs = Vec::with_capacity(4);
    for pair in DetectorPair::ALL {
        let event = coincidence(&optical, pair)?;
        let (a, b) = pair.ancilla_outcomes();
        let branch = measure_ancillas(&switched, params.theta(), BranchSource::Forced(a, b))?;
        debug_assert_eq!(branch.outcome.class, pair.class());
        let residual = equal_up_to_global_phase(&event.polarization, &branch.residual, tol)?;
        let corrected = apply_feedforward(&event.polarization, pair.class(), params)?;
        let output = equal_up_to_global_phase(&corrected, &target, tol)?;
        let expected_phase = feedforward(pair.class(), params).phase;
        pairs.push(PairComparison {
            pair,
            probability: event.probability,
            residual_deviation: residual.deviation,
            output_deviation: output.deviation,
            phase_error: output
                .phase
                .map_or(f64::INFINITY, |p| (p - expected_phase).norm()),
        });
    }
    Ok(LayerReport {
        pairs,
        tolerance: tol,
    })
}
