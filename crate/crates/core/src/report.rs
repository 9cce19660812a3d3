//! Named numeric checks shared by the verification routines.

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, deviation: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            deviation,
            tolerance,
            // NaN deviations fail.
            passed: deviation <= tolerance,
        }
    }
}

pub fn all_passed(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.passed)
}

pub fn max_deviation(checks: &[Check]) -> f64 {
    checks.iter().map(|c| c.deviation).fold(0.0, f64::max)
}
