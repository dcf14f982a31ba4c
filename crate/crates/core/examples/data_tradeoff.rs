//! Staged vs. joint vs. semi-supervised joint learning as the share of
//! expert-labeled data grows. A small version of the shipped config.

use defer_lab::harness::config::ExperimentConfig;
use defer_lab::harness::experiments::run_experiment;

fn main() -> defer_lab::Result<()> {
    let config = ExperimentConfig::from_toml(
        r#"
[experiment]
kind = "data_tradeoff"
trials = 4
n_total = 1000
fractions = [0.01, 0.05, 0.2, 1.0]

[world]
kind = "mixture"
classes = 10
dim = 20
"#,
    )?;
    let out = run_experiment(&config)?;
    print!("{}", String::from_utf8_lossy(out.file("data_tradeoff.csv").unwrap_or_default()));
    Ok(())
}
