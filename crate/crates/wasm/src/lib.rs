//! Browser bindings: fidelity curves, coincidence probabilities and single
//! protocol runs. The `*_values` functions hold the logic and run natively;
//! the exported wrappers only convert errors.

use cuswitch::fidelity::{sweep, BranchPolicy, IntegratorConfig};
use cuswitch::photonic::{coincidence, sagnac_run, DetectorPair};
use cuswitch::protocol::{
    ideal_output, run_protocol, AOutcome, BOutcome, BranchSource, InputQubit,
};
use cuswitch::qmath::equal_up_to_global_phase;
use cuswitch::{BranchClass, Preset};
use wasm_bindgen::prelude::*;

fn preset(name: &str) -> Result<Preset, String> {
    name.parse().map_err(|e: cuswitch::Error| e.to_string())
}

fn policy(name: &str) -> Result<BranchPolicy, String> {
    name.parse().map_err(|e: cuswitch::Error| e.to_string())
}

/// `δ` grid followed by one fidelity per grid point.
pub fn fidelity_curve_values(
    gate: &str,
    delta_min: f64,
    delta_max: f64,
    steps: usize,
    grid_n: usize,
    branch_policy: &str,
) -> Result<Vec<f64>, String> {
    let integrator = IntegratorConfig::new(grid_n).map_err(|e| e.to_string())?;
    let curve = sweep(
        &[preset(gate)?],
        delta_min,
        delta_max,
        steps,
        policy(branch_policy)?,
        integrator,
    )
    .map_err(|e| e.to_string())?;
    let mut out = curve.deltas;
    out.extend_from_slice(&curve.fidelities[0]);
    Ok(out)
}

/// Probabilities of M1M3, M2M4, M1M4, M2M3.
pub fn coincidence_values(
    gate: &str,
    theta1: f64,
    theta2: f64,
    vbs_theta: f64,
    adaptive: bool,
) -> Result<Vec<f64>, String> {
    let p = preset(gate)?.params();
    let out = sagnac_run(&p, theta1, theta2, vbs_theta, adaptive).map_err(|e| e.to_string())?;
    Ok(DetectorPair::ALL
        .iter()
        .map(|&pair| coincidence(&out, pair).map_or(0.0, |c| c.probability))
        .collect())
}

/// One sampled protocol run on `cos θᵢ|0⟩ + sin θᵢ|1⟩` inputs.
#[wasm_bindgen]
#[derive(Debug, Clone, PartialEq)]
pub struct TeleportRun {
    a_plus: bool,
    b_mu: bool,
    class_mu: bool,
    probability: f64,
    deviation: f64,
    phase_re: f64,
    phase_im: f64,
    output: Vec<f64>,
}

#[wasm_bindgen]
impl TeleportRun {
    #[wasm_bindgen(getter)]
    pub fn alice(&self) -> String {
        if self.a_plus { "+" } else { "-" }.into()
    }

    #[wasm_bindgen(getter)]
    pub fn bob(&self) -> String {
        if self.b_mu { "mu" } else { "nu" }.into()
    }

    #[wasm_bindgen(getter, js_name = branchClass)]
    pub fn branch_class(&self) -> String {
        if self.class_mu {
            BranchClass::Mu
        } else {
            BranchClass::Nu
        }
        .name()
        .into()
    }

    #[wasm_bindgen(getter)]
    pub fn probability(&self) -> f64 {
        self.probability
    }

    /// Distance from `CU·input` up to global phase.
    #[wasm_bindgen(getter)]
    pub fn deviation(&self) -> f64 {
        self.deviation
    }

    #[wasm_bindgen(getter, js_name = phaseRe)]
    pub fn phase_re(&self) -> f64 {
        self.phase_re
    }

    #[wasm_bindgen(getter, js_name = phaseIm)]
    pub fn phase_im(&self) -> f64 {
        self.phase_im
    }

    /// Output amplitudes as interleaved `(re, im)` pairs over `|00⟩…|11⟩`.
    #[wasm_bindgen(getter)]
    pub fn output(&self) -> Vec<f64> {
        self.output.clone()
    }
}

pub fn teleport_run(
    gate: &str,
    theta1: f64,
    theta2: f64,
    seed: u64,
) -> Result<TeleportRun, String> {
    let p = preset(gate)?.params();
    let (a, b) = (
        InputQubit::from_angle(theta1),
        InputQubit::from_angle(theta2),
    );
    let t = run_protocol(&p, &a, &b, BranchSource::Sampled(seed)).map_err(|e| e.to_string())?;
    let cmp = equal_up_to_global_phase(&t.final_state, &ideal_output(&p, &a, &b), 1e-9)
        .map_err(|e| e.to_string())?;
    Ok(TeleportRun {
        a_plus: t.outcome.a == AOutcome::Plus,
        b_mu: t.outcome.b == BOutcome::Mu,
        class_mu: t.outcome.class == BranchClass::Mu,
        probability: t.branch_probability,
        deviation: cmp.deviation,
        phase_re: t.global_phase.re,
        phase_im: t.global_phase.im,
        output: t
            .final_state
            .amps()
            .iter()
            .flat_map(|z| [z.re, z.im])
            .collect(),
    })
}

#[wasm_bindgen(js_name = fidelityCurve)]
pub fn fidelity_curve(
    gate: &str,
    delta_min: f64,
    delta_max: f64,
    steps: usize,
    grid_n: usize,
    branch_policy: &str,
) -> Result<Vec<f64>, JsError> {
    fidelity_curve_values(gate, delta_min, delta_max, steps, grid_n, branch_policy)
        .map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = coincidenceProbabilities)]
pub fn coincidence_probabilities(
    gate: &str,
    theta1: f64,
    theta2: f64,
    vbs_theta: f64,
    adaptive: bool,
) -> Result<Vec<f64>, JsError> {
    coincidence_values(gate, theta1, theta2, vbs_theta, adaptive).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn teleport(gate: &str, theta1: f64, theta2: f64, seed: u32) -> Result<TeleportRun, JsError> {
    teleport_run(gate, theta1, theta2, u64::from(seed)).map_err(|e| JsError::new(&e))
}
