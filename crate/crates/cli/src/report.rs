use cuswitch::fidelity::format_g;
use cuswitch::report::Check;
use serde::Serialize;

pub const SCHEMA: u32 = 1;

#[derive(Debug, Serialize)]
pub struct CheckRow {
    pub name: String,
    pub status: &'static str,
    pub max_deviation: Option<f64>,
    pub tolerance: f64,
}

impl From<&Check> for CheckRow {
    fn from(c: &Check) -> Self {
        CheckRow {
            name: c.name.clone(),
            status: if c.passed { "pass" } else { "fail" },
            max_deviation: c.deviation.is_finite().then_some(c.deviation),
            tolerance: c.tolerance,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct CoincidenceRow {
    pub gate: String,
    pub pair: &'static str,
    pub class: &'static str,
    pub mean_probability: f64,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub schema: u32,
    pub command: &'static str,
    pub seed: u64,
    pub trials: usize,
    pub passed: bool,
    pub checks: Vec<CheckRow>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub coincidences: Vec<CoincidenceRow>,
}

impl Report {
    pub fn new(command: &'static str, seed: u64, trials: usize, checks: &[Check]) -> Self {
        Report {
            schema: SCHEMA,
            command,
            seed,
            trials,
            passed: cuswitch::report::all_passed(checks),
            checks: checks.iter().map(CheckRow::from).collect(),
            coincidences: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("name,status,max_deviation,tolerance\n");
        for c in &self.checks {
            let dev = c
                .max_deviation
                .map_or("inf".to_string(), |d| format_g(d, 12));
            out.push_str(&format!(
                "{},{},{},{}\n",
                csv_field(&c.name),
                c.status,
                dev,
                format_g(c.tolerance, 12)
            ));
        }
        out
    }

    pub fn summary(&self) -> String {
        let passed = self.checks.iter().filter(|c| c.status == "pass").count();
        format!(
            "{}: {passed}/{} checks passed",
            self.command,
            self.checks.len()
        )
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[derive(Debug, Serialize)]
pub struct Column {
    pub name: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Serialize)]
pub struct SweepReport {
    pub schema: u32,
    pub command: &'static str,
    pub policy: &'static str,
    pub grid_n: usize,
    pub columns: Vec<Column>,
}
