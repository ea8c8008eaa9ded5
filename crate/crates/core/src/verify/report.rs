use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Outcome of one verification check, as written to `verification.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub parameters: Value,
    pub seed: u64,
    pub sample_count: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Value::is_null")]
    pub details: Value,
}

/// All checks of one run.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct VerificationSummary {
    pub pass: bool,
    pub checks: Vec<CheckReport>,
}

impl VerificationSummary {
    pub fn new(checks: Vec<CheckReport>) -> Self {
        VerificationSummary { pass: checks.iter().all(|c| c.pass), checks }
    }
}
