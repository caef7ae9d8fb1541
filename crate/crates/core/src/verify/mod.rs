//! Runnable checks of the quantitative statements behind existence,
//! uniqueness, interlacing and truncation, each producing a
//! [`CheckReport`].

mod checks;
mod inline;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::engine::SolveProblem;

pub use checks::{
    check_growth_bound, check_hypotheses, check_interlace, check_picard_decay, check_truncation, check_uniqueness,
    is_negative_control, picard_constant, picard_traces, GrowthOptions, TruncationConstants, TruncationOptions, UniquenessOptions,
};
pub use inline::inline_solve;

/// Outcome of one check. `pass` holds exactly when the stated tolerance is
/// met. A negative control is expected to fail.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub id: String,
    /// FNV-1a digest of the check's inputs.
    pub inputs_digest: String,
    pub tolerance: f64,
    pub pass: bool,
    pub negative_control: bool,
    /// Recorded for information only; never counts as a failure.
    pub report_only: bool,
    pub scalars: BTreeMap<String, f64>,
    pub series: BTreeMap<String, Vec<f64>>,
}

impl CheckReport {
    pub fn new(id: &str, inputs: &str, tolerance: f64) -> Self {
        CheckReport {
            id: id.to_string(),
            inputs_digest: fnv1a_hex(inputs.as_bytes()),
            tolerance,
            pass: false,
            negative_control: false,
            report_only: false,
            scalars: BTreeMap::new(),
            series: BTreeMap::new(),
        }
    }

    pub fn scalar(&mut self, name: &str, value: f64) -> &mut Self {
        self.scalars.insert(name.to_string(), value);
        self
    }

    pub fn series(&mut self, name: &str, values: Vec<f64>) -> &mut Self {
        self.series.insert(name.to_string(), values);
        self
    }

    /// True unless this is a failing ordinary check.
    pub fn acceptable(&self) -> bool {
        self.pass || self.negative_control || self.report_only
    }
}

/// 64-bit FNV-1a, as 16 hex digits.
pub fn fnv1a_hex(bytes: &[u8]) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    format!("{h:016x}")
}

/// Canonical text of everything that determines a problem.
pub(crate) fn problem_fingerprint(prob: &SolveProblem) -> String {
    serde_json::json!({
        "source": prob.source(),
        "kappa": prob.kappa(),
        "model": prob.model(),
        "horizon": prob.horizon(),
        "steps": prob.steps(),
        "truncation": prob.truncation(),
    })
    .to_string()
}

#[cfg(test)]
mod tests;
