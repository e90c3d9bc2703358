//! Uniform JSON record for a single named check.

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CheckReport {
    pub check: String,
    pub params: Value,
    pub pass: bool,
    pub witness: Value,
}

impl CheckReport {
    pub fn new(check: &str, params: Value, pass: bool, witness: Value) -> Self {
        CheckReport { check: check.to_string(), params, pass, witness }
    }
}
