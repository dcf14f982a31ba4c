//! Named verification suites with pass/fail outcomes.

use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, ExperimentKind};
use super::experiments::run_experiment;
use crate::error::{Error, Result};

pub const SUITES: [&str; 5] = ["consistency", "calibration", "gradient", "cal_failure", "theorem1"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub passed: bool,
    pub detail: serde_json::Value,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub passed: bool,
    pub suites: Vec<SuiteReport>,
}

/// Config a suite runs with: the experiment defaults plus a suite-sized
/// trial count.
pub fn suite_config(suite: &str, seed: u64) -> Result<ExperimentConfig> {
    let (kind, trials) = match suite {
        "consistency" => (ExperimentKind::VerifyConsistency, None),
        "calibration" => (ExperimentKind::VerifyCalibration, Some(10_000)),
        "gradient" => (ExperimentKind::GradientCheck, Some(1_000)),
        "cal_failure" => (ExperimentKind::CalFailure, None),
        "theorem1" => (ExperimentKind::Theorem1, None),
        other => return Err(Error::Config(format!("unknown suite {other:?}; expected one of {}", SUITES.join(", ")))),
    };
    let mut config = ExperimentConfig::for_kind(kind);
    config.experiment.seed = seed;
    if let Some(n) = trials {
        config.experiment.trials = n;
    }
    Ok(config)
}

pub fn run_suite(suite: &str, seed: u64) -> Result<SuiteReport> {
    let out = run_experiment(&suite_config(suite, seed)?)?;
    Ok(SuiteReport { suite: suite.to_string(), passed: out.passed.unwrap_or(false), detail: out.summary })
}

/// Runs `suites` (all of them when empty) in order.
pub fn run_verifications(suites: &[&str], seed: u64) -> Result<VerificationReport> {
    let names: Vec<&str> = if suites.is_empty() { SUITES.to_vec() } else { suites.to_vec() };
    let suites = names.iter().map(|s| run_suite(s, seed)).collect::<Result<Vec<_>>>()?;
    Ok(VerificationReport { passed: suites.iter().all(|s| s.passed), suites })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_is_a_config_error() {
        assert!(matches!(run_suite("nope", 0), Err(Error::Config(_))));
    }

    #[test]
    fn theorem1_suite_passes() {
        let r = run_suite("theorem1", 0).unwrap();
        assert!(r.passed, "{}", r.detail);
    }
}
