use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cuswitch::fidelity::{BranchPolicy, DEFAULT_GRID_N};
use cuswitch::{CUParams, Preset, UnitVec3};

use crate::CliError;

pub const DEFAULT_SEED: u64 = 1729;

#[derive(Debug, Parser)]
#[command(
    name = "cuswitch",
    version,
    about = "Controlled-unitary teleportation through quantum switches"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the protocol output against the target gate on every branch.
    Verify(VerifyArgs),
    /// Average gate fidelity of the four presets over a range of δ.
    Sweep(SweepArgs),
    /// Compare the optical model with the abstract protocol.
    Photonic(PhotonicArgs),
    /// Check the waveplate gadget identities and their reciprocity.
    Decompose(DecomposeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Comma-separated `x,y,z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vec3(pub [f64; 3]);

impl FromStr for Vec3 {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(format!("expected three comma-separated numbers, got '{s}'"));
        }
        let mut v = [0.0; 3];
        for (slot, part) in v.iter_mut().zip(&parts) {
            *slot = part
                .parse()
                .map_err(|_| format!("'{part}' is not a number"))?;
        }
        Ok(Vec3(v))
    }
}

#[derive(Debug, Clone, Args)]
pub struct GateArgs {
    /// Named gate: cnot, cy, cz or ch. All four when no gate is given.
    #[arg(long, conflicts_with_all = ["alpha", "theta", "n", "n_perp"])]
    pub preset: Option<String>,
    /// Phase α of the target unitary.
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    /// Rotation angle θ of the target unitary.
    #[arg(long, allow_negative_numbers = true)]
    pub theta: Option<f64>,
    /// Unit rotation axis n as x,y,z.
    #[arg(long, allow_hyphen_values = true)]
    pub n: Option<Vec3>,
    /// Unit vector orthogonal to n as x,y,z.
    #[arg(long = "n-perp", allow_hyphen_values = true)]
    pub n_perp: Option<Vec3>,
}

fn unit(v: Vec3) -> Result<UnitVec3, CliError> {
    let [x, y, z] = v.0;
    UnitVec3::new(x, y, z).map_err(CliError::from)
}

impl GateArgs {
    /// Labeled parameter sets selected by the flags.
    pub fn resolve(&self) -> Result<Vec<(String, CUParams)>, CliError> {
        if let Some(name) = &self.preset {
            let preset: Preset = name.parse()?;
            return Ok(vec![(preset.name().to_string(), preset.params())]);
        }
        let explicit = self.alpha.is_some()
            || self.theta.is_some()
            || self.n.is_some()
            || self.n_perp.is_some();
        if !explicit {
            return Ok(Preset::ALL
                .iter()
                .map(|p| (p.name().to_string(), p.params()))
                .collect());
        }
        let (Some(alpha), Some(theta), Some(n)) = (self.alpha, self.theta, self.n) else {
            return Err(CliError::Invalid(
                "explicit gates need --alpha, --theta and --n".into(),
            ));
        };
        let n = unit(n)?;
        let params = match self.n_perp {
            Some(p) => CUParams::with_n_perp(alpha, theta, n, unit(p)?)?,
            None => CUParams::new(alpha, theta, n)?,
        };
        Ok(vec![("custom".to_string(), params)])
    }
}

#[derive(Debug, Clone, Args)]
pub struct SeedArg {
    /// Seed for every random draw.
    #[arg(long, env = "CUSWITCH_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Write the result here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub gate: GateArgs,
    /// Random input pairs per gate; each runs all four branches.
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[command(flatten)]
    pub seed: SeedArg,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, default_value_t = -0.5, allow_negative_numbers = true)]
    pub delta_min: f64,
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub delta_max: f64,
    #[arg(long, default_value_t = 101)]
    pub steps: usize,
    /// Quadrature points per axis.
    #[arg(long, default_value_t = DEFAULT_GRID_N)]
    pub grid_n: usize,
    /// class_mu, class_nu or probability_weighted.
    #[arg(long, default_value = "class_mu", value_parser = parse_policy)]
    pub policy: BranchPolicy,
    #[command(flatten)]
    pub out: OutputArgs,
}

fn parse_policy(s: &str) -> Result<BranchPolicy, String> {
    s.parse().map_err(|e: cuswitch::Error| e.to_string())
}

#[derive(Debug, Args)]
pub struct PhotonicArgs {
    #[command(flatten)]
    pub gate: GateArgs,
    /// Random (θ₁, θ₂) input angles per gate.
    #[arg(long, default_value_t = 50)]
    pub trials: usize,
    #[command(flatten)]
    pub seed: SeedArg,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    /// Random gadgets tested for reciprocity.
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[command(flatten)]
    pub seed: SeedArg,
    #[command(flatten)]
    pub out: OutputArgs,
}
