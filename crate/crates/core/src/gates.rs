//! Gate constructors: the controlled-unitary target, the switch gates, the
//! outcome-dependent feed-forward corrections, named presets and the
//! imperfect-reciprocity variants.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::qmath::{
    identity2, pauli_x, phase, rotation, rotation_z, Cplx, Operator, UnitVec3, I, ONE, ZERO,
};

const ORTHO_TOL: f64 = 1e-9;

/// Parameters of `U = exp[i(α·I + θ·(n·σ))]` plus the auxiliary axis `n⊥`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CUParams {
    alpha: f64,
    theta: f64,
    n: UnitVec3,
    n_perp: UnitVec3,
}

impl CUParams {
    /// Uses [`orthogonal_axis`] for `n⊥`.
    pub fn new(alpha: f64, theta: f64, n: UnitVec3) -> Result<Self> {
        Self::with_n_perp(alpha, theta, n, orthogonal_axis(&n))
    }

    pub fn with_n_perp(alpha: f64, theta: f64, n: UnitVec3, n_perp: UnitVec3) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::NonFinite("alpha"));
        }
        if !theta.is_finite() {
            return Err(Error::NonFinite("theta"));
        }
        let dot = n.dot(&n_perp);
        if dot.abs() > ORTHO_TOL {
            return Err(Error::NotOrthogonal(dot));
        }
        Ok(CUParams {
            alpha,
            theta,
            n,
            n_perp,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn n(&self) -> UnitVec3 {
        self.n
    }

    pub fn n_perp(&self) -> UnitVec3 {
        self.n_perp
    }
}

/// `e^{iα}(cos θ·I + i sin θ·(n·σ))`, the single-qubit gate applied to the target.
pub fn u_target(params: &CUParams) -> Operator {
    let (s, c) = params.theta.sin_cos();
    let [x, y, z] = params.n.components();
    let g = phase(params.alpha);
    Operator::from_rows2([
        [g * Cplx::new(c, s * z), g * Cplx::new(s * y, s * x)],
        [g * Cplx::new(-s * y, s * x), g * Cplx::new(c, -s * z)],
    ])
}

/// `|0⟩⟨0| ⊗ I + |1⟩⟨1| ⊗ U`, control on the first register slot.
pub fn cu_gate(params: &CUParams) -> Operator {
    let u = u_target(params);
    let mut entries = vec![ZERO; 16];
    entries[0] = ONE;
    entries[5] = ONE;
    for r in 0..2 {
        for c in 0..2 {
            entries[(2 + r) * 4 + 2 + c] = u.get(r, c);
        }
    }
    Operator::new(4, entries).expect("4x4 literal")
}

/// Deterministic unit vector orthogonal to `n`: `normalize(ẑ × n)`, or `x̂`
/// when `n` is (anti)parallel to `ẑ`.
pub fn orthogonal_axis(n: &UnitVec3) -> UnitVec3 {
    let [x, y, z] = UnitVec3::Z.cross(n);
    if (x * x + y * y + z * z).sqrt() > 1e-8 {
        UnitVec3::normalize(x, y, z).expect("nonzero cross product")
    } else {
        UnitVec3::X
    }
}

/// The four switch gates and the two local pre-rotations.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolGateSet {
    pub u_a1: Operator,
    pub u_a2: Operator,
    pub u_b1: Operator,
    pub u_b2: Operator,
    pub v_a: Operator,
    pub v_b: Operator,
}

impl ProtocolGateSet {
    /// All six gates equal to the identity.
    pub fn identity() -> Self {
        ProtocolGateSet {
            u_a1: identity2(),
            u_a2: identity2(),
            u_b1: identity2(),
            u_b2: identity2(),
            v_a: identity2(),
            v_b: identity2(),
        }
    }

    /// Gate order taken when both switch controls are |0⟩: `U_A2·U_A1 ⊗ U_B2·U_B1`.
    pub fn order_first(&self) -> Operator {
        (&self.u_a2 * &self.u_a1).kron(&(&self.u_b2 * &self.u_b1))
    }

    /// Gate order taken when both switch controls are |1⟩: `U_A1·U_A2 ⊗ U_B1·U_B2`.
    pub fn order_second(&self) -> Operator {
        (&self.u_a1 * &self.u_a2).kron(&(&self.u_b1 * &self.u_b2))
    }

    pub fn local_v(&self) -> Operator {
        self.v_a.kron(&self.v_b)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        [
            &self.u_a1, &self.u_a2, &self.u_b1, &self.u_b2, &self.v_a, &self.v_b,
        ]
        .iter()
        .all(|g| g.is_unitary(tol))
    }
}

fn n_dot_sigma(x: f64, y: f64, z: f64) -> Operator {
    Operator::from_rows2([
        [Cplx::new(z, 0.0), Cplx::new(x, -y)],
        [Cplx::new(x, y), Cplx::new(-z, 0.0)],
    ])
}

/// The literal matrices of the switch gates with the x-components of both
/// Bob axes and the whole of `U_A2` scaled by `scale`.
fn switch_gates(params: &CUParams, scale: f64) -> ProtocolGateSet {
    let [nx, ny, nz] = params.n.components();
    let [px, py, pz] = params.n_perp.components();
    let h = FRAC_1_SQRT_2;
    let u_a1 = Operator::diagonal(&[phase(-FRAC_PI_4), phase(FRAC_PI_4)]).expect("2x2 diagonal");
    let u_a2 = pauli_x().scale(Cplx::new(scale, 0.0));
    let sx = scale * nx;
    let u_b1 = Operator::from_rows2([
        [Cplx::new(h, -h * nz), Cplx::new(-h * ny, -h * sx)],
        [Cplx::new(h * ny, -h * sx), Cplx::new(h, h * nz)],
    ]);
    let u_b2 = n_dot_sigma(scale * px, py, pz);
    ProtocolGateSet {
        u_a1,
        u_a2,
        u_b1,
        u_b2,
        v_a: pauli_x(),
        v_b: n_dot_sigma(px, py, pz),
    }
}

/// `U_A1 = R_z(π/2)`, `U_A2 = X`, `U_B1 = R_n(π/2)`, `U_B2 = n⊥·σ`,
/// `V_A = X`, `V_B = n⊥·σ`.
pub fn protocol_gates(params: &CUParams) -> ProtocolGateSet {
    switch_gates(params, 1.0)
}

/// Switch gates under imperfect reciprocity: `n_x ↦ (1+δ)n_x` in every
/// gate's axis, which turns `X` into `(1+δ)X`. `V_A`, `V_B` stay ideal.
/// The result is generally not unitary.
pub fn imperfect_gates(params: &CUParams, delta: f64) -> ProtocolGateSet {
    switch_gates(params, 1.0 + delta)
}

/// Equivalence class of an ancilla outcome pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BranchClass {
    /// `|+⟩|μ(θ)⟩` or `|−⟩|ν(π−θ)⟩`.
    Mu,
    /// `|+⟩|ν(θ)⟩` or `|−⟩|μ(π−θ)⟩`.
    Nu,
}

impl BranchClass {
    pub const ALL: [BranchClass; 2] = [BranchClass::Mu, BranchClass::Nu];

    pub fn name(&self) -> &'static str {
        match self {
            BranchClass::Mu => "class_mu",
            BranchClass::Nu => "class_nu",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Feedforward {
    pub w_a: Operator,
    pub w_b: Operator,
    /// Phase `φ` with `CU·ψ = φ·(final state)`.
    pub phase: Cplx,
}

/// Corrections and residual global phase for a branch class:
/// μ → `R_z(α+π/2)`, `R_n(π/2−θ)`, `e^{iα/2}`;
/// ν → `R_z(α−π/2)`, `R_n(−π/2−θ)`, `i·e^{iα/2}`.
pub fn feedforward(branch: BranchClass, params: &CUParams) -> Feedforward {
    let (alpha, theta) = (params.alpha, params.theta);
    let half = phase(alpha / 2.0);
    match branch {
        BranchClass::Mu => Feedforward {
            w_a: rotation_z(alpha + FRAC_PI_2),
            w_b: rotation(&params.n, FRAC_PI_2 - theta),
            phase: half,
        },
        BranchClass::Nu => Feedforward {
            w_a: rotation_z(alpha - FRAC_PI_2),
            w_b: rotation(&params.n, -FRAC_PI_2 - theta),
            phase: I * half,
        },
    }
}

/// Named controlled gates reachable with `α = −π/2`, `θ = π/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Preset {
    Cnot,
    Cy,
    Cz,
    Ch,
}

impl Preset {
    pub const ALL: [Preset; 4] = [Preset::Cnot, Preset::Cy, Preset::Cz, Preset::Ch];

    pub fn name(&self) -> &'static str {
        match self {
            Preset::Cnot => "cnot",
            Preset::Cy => "cy",
            Preset::Cz => "cz",
            Preset::Ch => "ch",
        }
    }

    /// The parameters with the explicitly paired `n⊥`.
    pub fn params(&self) -> CUParams {
        let h = FRAC_1_SQRT_2;
        let (n, n_perp) = match self {
            Preset::Cnot => (UnitVec3::X, UnitVec3::Z),
            Preset::Cz => (UnitVec3::Z, UnitVec3::X),
            Preset::Cy => (UnitVec3::Y, UnitVec3::X),
            Preset::Ch => (UnitVec3::new(h, 0.0, h).expect("unit"), UnitVec3::Y),
        };
        CUParams::with_n_perp(-FRAC_PI_2, FRAC_PI_2, n, n_perp).expect("preset is valid")
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cnot" | "cx" => Ok(Preset::Cnot),
            "cy" => Ok(Preset::Cy),
            "cz" => Ok(Preset::Cz),
            "ch" => Ok(Preset::Ch),
            _ => Err(Error::UnknownPreset(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GatePreset {
    pub preset: Preset,
    pub params: CUParams,
}

pub fn preset(name: &str) -> Result<GatePreset> {
    let preset: Preset = name.parse()?;
    Ok(GatePreset {
        preset,
        params: preset.params(),
    })
}
