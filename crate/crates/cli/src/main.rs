mod args;
mod report;

use std::path::Path;
use std::process::ExitCode;

use clap::Parser;
use cuswitch::fidelity::{sweep, IntegratorConfig};
use cuswitch::photonic::{
    backward_operator, forward_operator, gadget_sequence, photonic_vs_abstract, reciprocal_gadget,
    rz_half_pi_sequence, DetectorPair, GadgetAngles,
};
use cuswitch::protocol::{verify_appendix, verify_equivalence};
use cuswitch::qmath::{equal_up_to_global_phase, pauli_x, rotation_z, DEFAULT_TOL};
use cuswitch::report::Check;
use cuswitch::sampling;
use cuswitch::{Operator, Preset};

use args::{Cli, Command, DecomposeArgs, Format, OutputArgs, PhotonicArgs, SweepArgs, VerifyArgs};
use report::{CoincidenceRow, Column, Report, SweepReport, SCHEMA};

const IDENTITY_TOL: f64 = 1e-10;
const PROBABILITY_TOL: f64 = 1e-12;

#[derive(Debug)]
pub enum CliError {
    Invalid(String),
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl From<cuswitch::Error> for CliError {
    fn from(e: cuswitch::Error) -> Self {
        CliError::Invalid(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            let (CliError::Invalid(msg) | CliError::Io(msg)) = &e;
            eprintln!("error: {msg}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(command: Command) -> Result<bool, CliError> {
    match command {
        Command::Verify(a) => cmd_verify(&a),
        Command::Sweep(a) => cmd_sweep(&a),
        Command::Photonic(a) => cmd_photonic(&a),
        Command::Decompose(a) => cmd_decompose(&a),
    }
}

fn emit(text: &str, output: Option<&Path>) -> Result<(), CliError> {
    match output {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_report(report: &Report, out: &OutputArgs) -> Result<bool, CliError> {
    let text = match out.format.unwrap_or(Format::Json) {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
    };
    emit(&text, out.output.as_deref())?;
    eprintln!("{}", report.summary());
    Ok(report.passed)
}

fn require_trials(trials: usize) -> Result<(), CliError> {
    if trials == 0 {
        return Err(CliError::Invalid("--trials must be at least 1".into()));
    }
    Ok(())
}

fn cmd_verify(a: &VerifyArgs) -> Result<bool, CliError> {
    require_trials(a.trials)?;
    let mut checks = Vec::new();
    for (label, params) in a.gate.resolve()? {
        let eq = verify_equivalence(&params, a.trials, a.seed.seed)?;
        checks.push(Check::new(
            format!("{label}: output equals CU up to phase"),
            eq.max_state_deviation,
            eq.tolerance,
        ));
        checks.push(Check::new(
            format!("{label}: global phase matches table"),
            eq.max_phase_error,
            eq.tolerance,
        ));
        for c in verify_appendix(&params, IDENTITY_TOL) {
            checks.push(Check::new(
                format!("{label}: {}", c.name),
                c.deviation,
                c.tolerance,
            ));
        }
    }
    emit_report(
        &Report::new("verify", a.seed.seed, a.trials, &checks),
        &a.out,
    )
}

fn cmd_sweep(a: &SweepArgs) -> Result<bool, CliError> {
    let integrator = IntegratorConfig::new(a.grid_n)?;
    let curve = sweep(
        &Preset::ALL,
        a.delta_min,
        a.delta_max,
        a.steps,
        a.policy,
        integrator,
    )?;
    let in_range = curve
        .fidelities
        .iter()
        .flatten()
        .all(|f| (0.0..=1.0 + DEFAULT_TOL).contains(f));
    let text = match a.out.format.unwrap_or(Format::Csv) {
        Format::Csv => curve.to_csv(),
        Format::Json => {
            let mut columns = vec![Column {
                name: "delta".into(),
                values: curve.deltas.clone(),
            }];
            for (p, values) in curve.presets.iter().zip(&curve.fidelities) {
                columns.push(Column {
                    name: format!("F_{}", p.name()),
                    values: values.clone(),
                });
            }
            let report = SweepReport {
                schema: SCHEMA,
                command: "sweep",
                policy: a.policy.name(),
                grid_n: a.grid_n,
                columns,
            };
            let mut s = serde_json::to_string_pretty(&report).expect("sweep serializes");
            s.push('\n');
            s
        }
    };
    emit(&text, a.out.output.as_deref())?;
    eprintln!(
        "sweep: {} delta values, policy {}, grid {}",
        curve.deltas.len(),
        a.policy.name(),
        a.grid_n
    );
    Ok(in_range)
}

fn cmd_photonic(a: &PhotonicArgs) -> Result<bool, CliError> {
    require_trials(a.trials)?;
    let mut rng = sampling::rng(a.seed.seed);
    let mut checks = Vec::new();
    let mut coincidences = Vec::new();
    for (label, params) in a.gate.resolve()? {
        let mut max_dev = 0.0_f64;
        let mut max_prob = 0.0_f64;
        let mut sums = [0.0; 4];
        for _ in 0..a.trials {
            let (t1, t2) = (sampling::angle(&mut rng), sampling::angle(&mut rng));
            let layer = photonic_vs_abstract(&params, t1, t2, DEFAULT_TOL)?;
            max_dev = max_dev.max(layer.max_deviation());
            max_prob = max_prob.max(layer.max_probability_error());
            for (sum, pair) in sums.iter_mut().zip(&layer.pairs) {
                *sum += pair.probability;
            }
        }
        checks.push(Check::new(
            format!("{label}: coincidence states match branches"),
            max_dev,
            DEFAULT_TOL,
        ));
        checks.push(Check::new(
            format!("{label}: coincidence probabilities are 1/4"),
            max_prob,
            PROBABILITY_TOL,
        ));
        for (pair, sum) in DetectorPair::ALL.iter().zip(sums) {
            coincidences.push(CoincidenceRow {
                gate: label.clone(),
                pair: pair.name(),
                class: pair.class().name(),
                mean_probability: sum / a.trials as f64,
            });
        }
    }
    let mut report = Report::new("photonic", a.seed.seed, a.trials, &checks);
    report.coincidences = coincidences;
    emit_report(&report, &a.out)
}

fn phase_deviation(a: &Operator, b: &Operator) -> Result<f64, CliError> {
    Ok(equal_up_to_global_phase(a, b, IDENTITY_TOL)?.deviation)
}

fn cmd_decompose(a: &DecomposeArgs) -> Result<bool, CliError> {
    require_trials(a.trials)?;
    let mut checks = Vec::new();
    let short = rz_half_pi_sequence();
    checks.push(Check::new(
        "R_z(pi/2) = QWP(pi/4) HWP(3pi/8) QWP(pi/4)",
        phase_deviation(
            &rotation_z(std::f64::consts::FRAC_PI_2),
            forward_operator(&short).matrix(),
        )?,
        IDENTITY_TOL,
    ));
    checks.push(Check::new(
        "X = nine-element gadget",
        phase_deviation(
            &pauli_x(),
            reciprocal_gadget(&GadgetAngles::PAULI_X).matrix(),
        )?,
        IDENTITY_TOL,
    ));
    let x_seq = gadget_sequence(&GadgetAngles::PAULI_X);
    let named = phase_deviation(
        forward_operator(&short).matrix(),
        backward_operator(&short).matrix(),
    )?
    .max(phase_deviation(
        forward_operator(&x_seq).matrix(),
        backward_operator(&x_seq).matrix(),
    )?);
    checks.push(Check::new(
        "named gadgets: backward = forward",
        named,
        IDENTITY_TOL,
    ));

    let mut rng = sampling::rng(a.seed.seed);
    let mut worst = 0.0_f64;
    for _ in 0..a.trials {
        let angles = GadgetAngles {
            theta1: sampling::angle(&mut rng),
            phi1: sampling::angle(&mut rng),
            gamma: sampling::angle(&mut rng),
            phi2: sampling::angle(&mut rng),
            theta2: sampling::angle(&mut rng),
        };
        let seq = gadget_sequence(&angles);
        worst = worst.max(phase_deviation(
            forward_operator(&seq).matrix(),
            backward_operator(&seq).matrix(),
        )?);
    }
    checks.push(Check::new(
        "random gadgets: backward = forward",
        worst,
        IDENTITY_TOL,
    ));
    emit_report(
        &Report::new("decompose", a.seed.seed, a.trials, &checks),
        &a.out,
    )
}
