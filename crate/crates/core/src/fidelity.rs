//! Average gate fidelity under imperfect reciprocity.
//!
//! The practical protocol uses [`imperfect_gates`] for the switch while the
//! local `V` gates and the feed-forward stay ideal. Practical branch states
//! are renormalized before taking the overlap with the ideal output.

use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::gates::{
    feedforward, imperfect_gates, protocol_gates, BranchClass, CUParams, Preset, ProtocolGateSet,
};
use crate::protocol::{
    run_with_gates, switch_superposition, AOutcome, BOutcome, BranchSource, InputQubit,
};
use crate::qmath::{Cplx, Operator};

pub const DEFAULT_GRID_N: usize = 64;
pub const MIN_GRID_N: usize = 8;

/// Which output state enters the overlap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BranchPolicy {
    /// Outcome `|+⟩_a|μ(θ)⟩_b`.
    #[default]
    ClassMu,
    /// Outcome `|+⟩_a|ν(θ)⟩_b`.
    ClassNu,
    /// Class fidelities weighted by the practical class probabilities.
    ProbabilityWeighted,
}

impl BranchPolicy {
    pub fn name(&self) -> &'static str {
        match self {
            BranchPolicy::ClassMu => "class_mu",
            BranchPolicy::ClassNu => "class_nu",
            BranchPolicy::ProbabilityWeighted => "probability_weighted",
        }
    }
}

impl std::str::FromStr for BranchPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "class_mu" | "mu" => Ok(BranchPolicy::ClassMu),
            "class_nu" | "nu" => Ok(BranchPolicy::ClassNu),
            "probability_weighted" | "weighted" => Ok(BranchPolicy::ProbabilityWeighted),
            _ => Err(Error::InvalidArgument(format!(
                "unknown branch policy '{s}'"
            ))),
        }
    }
}

/// Uniform periodic grid of `grid_n × grid_n` points over `[0, 2π)²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntegratorConfig {
    grid_n: usize,
}

impl IntegratorConfig {
    pub fn new(grid_n: usize) -> Result<Self> {
        if grid_n < MIN_GRID_N {
            return Err(Error::InvalidArgument(format!(
                "grid_n must be at least {MIN_GRID_N}, got {grid_n}"
            )));
        }
        Ok(IntegratorConfig { grid_n })
    }

    pub fn grid_n(&self) -> usize {
        self.grid_n
    }

    pub fn nodes(&self) -> Vec<f64> {
        let n = self.grid_n as f64;
        (0..self.grid_n).map(|k| 2.0 * PI * k as f64 / n).collect()
    }
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            grid_n: DEFAULT_GRID_N,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FidelityQuery {
    pub params: CUParams,
    pub delta: f64,
    pub policy: BranchPolicy,
    pub integrator: IntegratorConfig,
}

impl FidelityQuery {
    pub fn new(params: CUParams, delta: f64) -> Self {
        FidelityQuery {
            params,
            delta,
            policy: BranchPolicy::default(),
            integrator: IntegratorConfig::default(),
        }
    }

    pub fn for_preset(preset: Preset, delta: f64) -> Self {
        Self::new(preset.params(), delta)
    }

    pub fn with_policy(mut self, policy: BranchPolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn with_integrator(mut self, integrator: IntegratorConfig) -> Self {
        self.integrator = integrator;
        self
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if delta.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite("delta"))
    }
}

fn annihilated(e: Error) -> Error {
    match e {
        Error::ImpossibleBranch(p) => Error::AnnihilatedBranch(p),
        Error::NotNormalized(n) => Error::AnnihilatedBranch(n * n),
        other => other,
    }
}

fn forced(class: BranchClass) -> BranchSource {
    match class {
        BranchClass::Mu => BranchSource::Forced(AOutcome::Plus, BOutcome::Mu),
        BranchClass::Nu => BranchSource::Forced(AOutcome::Plus, BOutcome::Nu),
    }
}

/// `|⟨Ψ_ideal|Ψ_prac⟩|²` for one class and inputs `cos θᵢ|0⟩ + sin θᵢ|1⟩`,
/// obtained by running the protocol with ideal and with imperfect gates.
pub fn branch_fidelity(
    params: &CUParams,
    delta: f64,
    branch: BranchClass,
    theta1: f64,
    theta2: f64,
) -> Result<f64> {
    check_delta(delta)?;
    let (in_a, in_b) = (
        InputQubit::from_angle(theta1),
        InputQubit::from_angle(theta2),
    );
    let ideal = run_with_gates(
        params,
        &protocol_gates(params),
        &in_a,
        &in_b,
        forced(branch),
    )?;
    let practical = run_with_gates(
        params,
        &imperfect_gates(params, delta),
        &in_a,
        &in_b,
        forced(branch),
    )
    .map_err(annihilated)?;
    Ok(ideal
        .final_state
        .inner(&practical.final_state)
        .norm_sqr()
        .min(1.0))
}

/// [`branch_fidelity`] under a policy; the weighted policy uses the
/// practical class probabilities.
pub fn policy_fidelity(
    params: &CUParams,
    delta: f64,
    policy: BranchPolicy,
    theta1: f64,
    theta2: f64,
) -> Result<f64> {
    match policy {
        BranchPolicy::ClassMu => branch_fidelity(params, delta, BranchClass::Mu, theta1, theta2),
        BranchPolicy::ClassNu => branch_fidelity(params, delta, BranchClass::Nu, theta1, theta2),
        BranchPolicy::ProbabilityWeighted => {
            check_delta(delta)?;
            let (in_a, in_b) = (
                InputQubit::from_angle(theta1),
                InputQubit::from_angle(theta2),
            );
            let gates = imperfect_gates(params, delta);
            let mut total = 0.0;
            let mut weight = 0.0;
            for class in BranchClass::ALL {
                let p = match run_with_gates(params, &gates, &in_a, &in_b, forced(class)) {
                    Ok(t) => t.branch_probability,
                    Err(Error::ImpossibleBranch(_)) => continue,
                    Err(e) => return Err(annihilated(e)),
                };
                total += p * branch_fidelity(params, delta, class, theta1, theta2)?;
                weight += p;
            }
            if weight == 0.0 {
                return Err(Error::AnnihilatedBranch(0.0));
            }
            Ok(total / weight)
        }
    }
}

/// Input-to-output maps `W·S·V` of one class for the ideal and practical gates.
struct ClassMaps {
    ideal: Operator,
    practical: Operator,
}

fn class_maps(
    params: &CUParams,
    ideal: &ProtocolGateSet,
    practical: &ProtocolGateSet,
    class: BranchClass,
) -> ClassMaps {
    let ff = feedforward(class, params);
    let w = ff.w_a.kron(&ff.w_b);
    let build = |g: &ProtocolGateSet| {
        &(&w * &switch_superposition(class, params.theta(), g)) * &ideal.local_v()
    };
    ClassMaps {
        ideal: build(ideal),
        practical: build(practical),
    }
}

fn product_input(theta1: f64, theta2: f64) -> [Cplx; 4] {
    let (s1, c1) = theta1.sin_cos();
    let (s2, c2) = theta2.sin_cos();
    [c1 * c2, c1 * s2, s1 * c2, s1 * s2].map(|x| Cplx::new(x, 0.0))
}

fn norm_sqr(v: &[Cplx]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum()
}

/// Returns `(fidelity, unnormalized practical weight)`.
fn map_fidelity(maps: &ClassMaps, input: &[Cplx; 4]) -> Result<(f64, f64)> {
    let ideal = maps.ideal.apply_to(input);
    let practical = maps.practical.apply_to(input);
    let (ni, np) = (norm_sqr(&ideal), norm_sqr(&practical));
    if np < 1e-28 * ni {
        return Err(Error::AnnihilatedBranch(np / ni));
    }
    let overlap: Cplx = ideal
        .iter()
        .zip(&practical)
        .map(|(a, b)| a.conj() * b)
        .sum();
    Ok(((overlap.norm_sqr() / (ni * np)).min(1.0), np))
}

/// Order-independent summation with bounded rounding growth.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 8;
    if values.len() <= LEAF {
        return values.iter().sum();
    }
    let (lo, hi) = values.split_at(values.len() / 2);
    pairwise_sum(lo) + pairwise_sum(hi)
}

/// Grid average of the policy fidelity over `(θ₁, θ₂) ∈ [0, 2π)²`.
///
/// Evaluates `W·S·V` once per class and reuses it at every node; agrees
/// with [`policy_fidelity`] pointwise.
pub fn average_fidelity(query: &FidelityQuery) -> Result<f64> {
    check_delta(query.delta)?;
    let ideal = protocol_gates(&query.params);
    let practical = imperfect_gates(&query.params, query.delta);
    let classes: Vec<BranchClass> = match query.policy {
        BranchPolicy::ClassMu => vec![BranchClass::Mu],
        BranchPolicy::ClassNu => vec![BranchClass::Nu],
        BranchPolicy::ProbabilityWeighted => BranchClass::ALL.to_vec(),
    };
    let maps: Vec<ClassMaps> = classes
        .iter()
        .map(|&c| class_maps(&query.params, &ideal, &practical, c))
        .collect();
    let nodes = query.integrator.nodes();
    let mut values = Vec::with_capacity(nodes.len() * nodes.len());
    for &t1 in &nodes {
        for &t2 in &nodes {
            values.push(node_fidelity(&maps, &product_input(t1, t2))?);
        }
    }
    Ok(pairwise_sum(&values) / values.len() as f64)
}

fn node_fidelity(maps: &[ClassMaps], input: &[Cplx; 4]) -> Result<f64> {
    if let [only] = maps {
        return map_fidelity(only, input).map(|(f, _)| f);
    }
    let mut total = 0.0;
    let mut weight = 0.0;
    for m in maps {
        match map_fidelity(m, input) {
            Ok((f, w)) => {
                total += w * f;
                weight += w;
            }
            Err(Error::AnnihilatedBranch(_)) => {}
            Err(e) => return Err(e),
        }
    }
    if weight == 0.0 {
        return Err(Error::AnnihilatedBranch(0.0));
    }
    Ok(total / weight)
}

/// Inclusive grid of `steps` values from `min` to `max`.
pub fn delta_grid(min: f64, max: f64, steps: usize) -> Result<Vec<f64>> {
    if steps < 2 {
        return Err(Error::InvalidArgument(format!(
            "steps must be at least 2, got {steps}"
        )));
    }
    if !min.is_finite() || !max.is_finite() {
        return Err(Error::NonFinite("delta range"));
    }
    if min > max {
        return Err(Error::InvalidArgument(format!(
            "delta_min {min} exceeds delta_max {max}"
        )));
    }
    let last = (steps - 1) as f64;
    Ok((0..steps)
        .map(|k| {
            if k == steps - 1 {
                max
            } else {
                min + (max - min) * k as f64 / last
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct FidelityCurve {
    pub deltas: Vec<f64>,
    pub presets: Vec<Preset>,
    /// `fidelities[p][k]` belongs to `presets[p]` at `deltas[k]`.
    pub fidelities: Vec<Vec<f64>>,
}

impl FidelityCurve {
    pub fn header(&self) -> String {
        std::iter::once("delta".to_string())
            .chain(self.presets.iter().map(|p| format!("F_{}", p.name())))
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Header row plus one row per `δ`, `%.12g` fields, `\n` line endings.
    pub fn to_csv(&self) -> String {
        let mut out = self.header();
        out.push('\n');
        for (k, delta) in self.deltas.iter().enumerate() {
            out.push_str(&format_g(*delta, 12));
            for column in &self.fidelities {
                out.push(',');
                out.push_str(&format_g(column[k], 12));
            }
            out.push('\n');
        }
        out
    }

    pub fn column(&self, preset: Preset) -> Option<&[f64]> {
        self.presets
            .iter()
            .position(|&p| p == preset)
            .map(|i| self.fidelities[i].as_slice())
    }
}

/// Fidelity of each preset at every point of the inclusive `δ` grid.
pub fn sweep(
    presets: &[Preset],
    delta_min: f64,
    delta_max: f64,
    steps: usize,
    policy: BranchPolicy,
    integrator: IntegratorConfig,
) -> Result<FidelityCurve> {
    let deltas = delta_grid(delta_min, delta_max, steps)?;
    let fidelities = presets
        .iter()
        .map(|&p| {
            deltas
                .iter()
                .map(|&d| {
                    let q = FidelityQuery::for_preset(p, d)
                        .with_policy(policy)
                        .with_integrator(integrator);
                    average_fidelity(&q)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FidelityCurve {
        deltas,
        presets: presets.to_vec(),
        fidelities,
    })
}

/// C `printf("%.*g", precision, x)`.
pub fn format_g(x: f64, precision: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let p = precision.max(1);
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    let sci = format!("{:.*e}", p - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= p as i32 {
        let mantissa = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        let mut s = String::with_capacity(mantissa.len() + 5);
        let _ = write!(s, "{mantissa}e{sign}{:02}", exp.abs());
        s
    } else {
        let decimals = (p as i32 - 1 - exp).max(0) as usize;
        strip_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn format_g_matches_printf() {
        let cases = [
            (1.0, "1"),
            (0.5, "0.5"),
            (-0.5, "-0.5"),
            (0.98, "0.98"),
            (0.9444444444444761, "0.944444444444"),
            (0.9988662131519117, "0.998866213152"),
            (123456789012.0, "123456789012"),
            (1234567890123.0, "1.23456789012e+12"),
            (0.0001, "0.0001"),
            (0.00001234, "1.234e-05"),
            (1e100, "1e+100"),
            (0.0, "0"),
            (9.9999999999999e-1, "1"),
        ];
        for (x, want) in cases {
            assert_eq!(format_g(x, 12), want, "{x}");
        }
    }

    #[test]
    fn grid_config_validation() {
        assert!(IntegratorConfig::new(7).is_err());
        assert_eq!(IntegratorConfig::new(8).unwrap().nodes().len(), 8);
        assert_eq!(IntegratorConfig::default().grid_n(), 64);
    }

    #[test]
    fn delta_grid_endpoints() {
        let g = delta_grid(-0.5, 0.5, 101).unwrap();
        assert_eq!(g.len(), 101);
        assert_eq!(g[0], -0.5);
        assert_eq!(g[100], 0.5);
        assert!(g[50].abs() < 1e-15);
        assert!(delta_grid(0.0, 1.0, 1).is_err());
        assert!(delta_grid(1.0, 0.0, 3).is_err());
    }

    #[test]
    fn unity_without_imperfection() {
        for preset in Preset::ALL {
            for class in BranchClass::ALL {
                let f = branch_fidelity(&preset.params(), 0.0, class, 0.3, 2.2).unwrap();
                assert!((f - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn cz_is_flat_pointwise() {
        let p = Preset::Cz.params();
        for delta in [-0.5, -0.2, 0.3, 0.5] {
            for class in BranchClass::ALL {
                let f = branch_fidelity(&p, delta, class, 1.1, 0.4).unwrap();
                assert!((f - 1.0).abs() < 1e-12, "{delta} {class:?}: {f}");
            }
        }
    }

    #[test]
    fn cnot_point_value() {
        let f = branch_fidelity(
            &Preset::Cnot.params(),
            0.1,
            BranchClass::Mu,
            FRAC_PI_4,
            FRAC_PI_4,
        )
        .unwrap();
        assert!((f - 0.9977375565610859).abs() < 1e-12, "{f}");
    }

    #[test]
    fn fast_path_matches_protocol_runs() {
        let mut rng = crate::sampling::rng(11);
        for preset in Preset::ALL {
            for policy in [
                BranchPolicy::ClassMu,
                BranchPolicy::ClassNu,
                BranchPolicy::ProbabilityWeighted,
            ] {
                let q = FidelityQuery::for_preset(preset, 0.37).with_policy(policy);
                let ideal = protocol_gates(&q.params);
                let practical = imperfect_gates(&q.params, q.delta);
                let classes: Vec<_> = match policy {
                    BranchPolicy::ClassMu => vec![BranchClass::Mu],
                    BranchPolicy::ClassNu => vec![BranchClass::Nu],
                    BranchPolicy::ProbabilityWeighted => BranchClass::ALL.to_vec(),
                };
                let maps: Vec<_> = classes
                    .iter()
                    .map(|&c| class_maps(&q.params, &ideal, &practical, c))
                    .collect();
                for _ in 0..20 {
                    let t1 = crate::sampling::angle(&mut rng);
                    let t2 = crate::sampling::angle(&mut rng);
                    let fast = node_fidelity(&maps, &product_input(t1, t2)).unwrap();
                    let slow = policy_fidelity(&q.params, q.delta, policy, t1, t2).unwrap();
                    assert!(
                        (fast - slow).abs() < 1e-12,
                        "{preset} {policy:?}: {fast} vs {slow}"
                    );
                }
            }
        }
    }

    #[test]
    fn frozen_average_values() {
        let q = |d| FidelityQuery::for_preset(Preset::Cnot, d);
        assert!((average_fidelity(&q(0.5)).unwrap() - 0.98).abs() < 1e-12);
        assert!((average_fidelity(&q(0.1)).unwrap() - 0.9988662131519117).abs() < 1e-12);
        let ch = average_fidelity(&FidelityQuery::for_preset(Preset::Ch, -0.3)).unwrap();
        assert!((ch - 0.9827677361370921).abs() < 1e-12);
    }

    #[test]
    fn annihilated_branch_is_reported() {
        let err =
            branch_fidelity(&Preset::Cnot.params(), -1.0, BranchClass::Mu, 0.2, 0.9).unwrap_err();
        assert!(matches!(err, Error::AnnihilatedBranch(_)), "{err:?}");
        assert!(
            branch_fidelity(&Preset::Cnot.params(), f64::NAN, BranchClass::Mu, 0.2, 0.9).is_err()
        );
    }

    #[test]
    fn csv_layout() {
        let curve = sweep(
            &Preset::ALL,
            -0.5,
            0.5,
            3,
            BranchPolicy::ClassMu,
            IntegratorConfig::new(8).unwrap(),
        )
        .unwrap();
        let csv = curve.to_csv();
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], "delta,F_cnot,F_cy,F_cz,F_ch");
        assert_eq!(lines.len(), 4);
        assert!(lines[2].starts_with("0,1,1,1,1"));
        assert!(csv.ends_with('\n') && !csv.contains('\r'));
    }
}
