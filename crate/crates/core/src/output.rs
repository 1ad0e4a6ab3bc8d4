//! The JSON envelope printed by `tribsq --json`.
//!
//! Exact values are always strings (`"149"`, `"-3/4"`), so a record survives
//! any JSON parser unchanged. Key order is preserved, which makes
//! parse-then-render byte-identical.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub command: String,
    pub parameters: Map<String, Value>,
    pub results: Value,
    pub pass: bool,
}

impl OutputRecord {
    pub fn new(command: &str, parameters: Map<String, Value>, results: Value, pass: bool) -> Self {
        Self {
            command: command.to_string(),
            parameters,
            results,
            pass,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("records always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// Parses any JSON text and renders it back in the pretty form used by
/// [`OutputRecord::to_json`].
pub fn rerender(text: &str) -> Result<String, serde_json::Error> {
    let v: Value = serde_json::from_str(text)?;
    serde_json::to_string_pretty(&v)
}
