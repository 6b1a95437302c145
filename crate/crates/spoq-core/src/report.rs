//! Structured check results shared by the library checks, the CLI and the
//! acceptance suite.

use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct CheckResult {
    /// Stable identifier of the identity being checked.
    pub anchor: String,
    pub description: String,
    /// "proved (symbolic)" or "evidence (specialized at k points)".
    pub mode: String,
    pub passed: bool,
    /// Extra data: witnesses, dimensions, coefficients.
    pub detail: Value,
}

impl CheckResult {
    pub fn new(anchor: &str, description: impl Into<String>, mode: impl Into<String>, passed: bool, detail: Value) -> Self {
        CheckResult { anchor: anchor.to_string(), description: description.into(), mode: mode.into(), passed, detail }
    }
}

pub const SYMBOLIC: &str = "proved (symbolic)";

pub fn all_passed(rs: &[CheckResult]) -> bool {
    rs.iter().all(|r| r.passed)
}

pub fn to_json(rs: &[CheckResult]) -> Value {
    serde_json::to_value(rs).expect("serializable")
}
