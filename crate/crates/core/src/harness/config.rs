//! TOML experiment configuration. Unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learners::{Activation, Architecture, TrainConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    ModelComplexity,
    DataTradeoff,
    DodCurve,
    CalFailure,
    Theorem1,
    VerifyConsistency,
    VerifyCalibration,
    GradientCheck,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::ModelComplexity => "model_complexity",
            ExperimentKind::DataTradeoff => "data_tradeoff",
            ExperimentKind::DodCurve => "dod_curve",
            ExperimentKind::CalFailure => "cal_failure",
            ExperimentKind::Theorem1 => "theorem1",
            ExperimentKind::VerifyConsistency => "verify_consistency",
            ExperimentKind::VerifyCalibration => "verify_calibration",
            ExperimentKind::GradientCheck => "gradient_check",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    pub kind: ExperimentKind,
    #[serde(default = "defaults::trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "defaults::output_dir")]
    pub output_dir: PathBuf,
    /// Training-set size for the labeled-fraction sweep.
    #[serde(default = "defaults::n_total")]
    pub n_total: usize,
    #[serde(default = "defaults::fractions")]
    pub fractions: Vec<f64>,
    /// Fresh samples used to estimate test risk.
    #[serde(default = "defaults::n_test")]
    pub n_test: usize,
    /// Expert-unlabeled samples given to the staged baseline of the DoD curve.
    #[serde(default = "defaults::staged_unlabeled")]
    pub staged_unlabeled: usize,
    /// Random atomic worlds per verification sweep.
    #[serde(default = "defaults::random_worlds")]
    pub random_worlds: usize,
    #[serde(default = "defaults::max_support")]
    pub max_support: usize,
    /// Negates the analytic gradient (checks that the gradient suite can fail).
    #[serde(default)]
    pub flip_sign: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WorldKind {
    Fig4,
    Mixture,
    Theorem1,
    CalCounterexample,
    RandomAtomic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorldSection {
    #[serde(default = "defaults::world_kind")]
    pub kind: WorldKind,
    #[serde(default = "defaults::epsilon")]
    pub epsilon: f64,
    #[serde(default = "defaults::classes")]
    pub classes: usize,
    #[serde(default = "defaults::dim")]
    pub dim: usize,
    #[serde(default = "defaults::spread")]
    pub spread: f64,
    /// Seed of the mixture means; fixed across trials.
    #[serde(default)]
    pub world_seed: u64,
}

impl Default for WorldSection {
    fn default() -> Self {
        toml::from_str("").expect("defaults")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HypothesesSection {
    /// Members of each threshold class.
    #[serde(default = "defaults::thresholds")]
    pub thresholds: usize,
    /// Classifier capacities swept by the model-complexity experiment.
    #[serde(default = "defaults::d_values")]
    pub d_values: Vec<usize>,
    #[serde(default = "defaults::max_pairs")]
    pub max_pairs: u64,
}

impl Default for HypothesesSection {
    fn default() -> Self {
        toml::from_str("").expect("defaults")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArchitectureKind {
    Linear,
    Mlp,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LearnersSection {
    #[serde(default = "defaults::architecture")]
    pub architecture: ArchitectureKind,
    #[serde(default = "defaults::hidden")]
    pub hidden: usize,
    #[serde(default = "defaults::activation")]
    pub activation: Activation,
    #[serde(default = "defaults::learning_rate")]
    pub learning_rate: f64,
    #[serde(default = "defaults::epochs")]
    pub epochs: usize,
    #[serde(default = "defaults::batch_size")]
    pub batch_size: usize,
    #[serde(default = "defaults::weight_init_scale")]
    pub weight_init_scale: f64,
    #[serde(default)]
    pub validation_fraction: Option<f64>,
}

impl Default for LearnersSection {
    fn default() -> Self {
        toml::from_str("").expect("defaults")
    }
}

impl LearnersSection {
    pub fn arch(&self) -> Architecture {
        match self.architecture {
            ArchitectureKind::Linear => Architecture::Linear,
            ArchitectureKind::Mlp => Architecture::Mlp { hidden: self.hidden, activation: self.activation },
        }
    }

    pub fn train_config(&self, seed: u64) -> TrainConfig {
        TrainConfig {
            learning_rate: self.learning_rate,
            epochs: self.epochs,
            batch_size: self.batch_size,
            seed,
            weight_init_scale: self.weight_init_scale,
            validation_fraction: self.validation_fraction,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActiveSection {
    #[serde(default = "defaults::per_round")]
    pub per_round: usize,
    #[serde(default = "defaults::rounds")]
    pub rounds: usize,
    /// Human-label budgets of the DoD curve.
    #[serde(default = "defaults::budgets")]
    pub budgets: Vec<usize>,
    #[serde(default = "defaults::n_unlabeled")]
    pub n_unlabeled: usize,
    #[serde(default = "defaults::budget_cap")]
    pub budget_cap: usize,
    #[serde(default = "defaults::mc_samples")]
    pub mc_samples: usize,
    #[serde(default = "defaults::pool_size")]
    pub pool_size: usize,
}

impl Default for ActiveSection {
    fn default() -> Self {
        toml::from_str("").expect("defaults")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentSection,
    #[serde(default)]
    pub world: WorldSection,
    #[serde(default)]
    pub hypotheses: HypothesesSection,
    #[serde(default)]
    pub learners: LearnersSection,
    #[serde(default)]
    pub active: ActiveSection,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Defaults for `kind`, as if the config named only the experiment.
    pub fn for_kind(kind: ExperimentKind) -> Self {
        Self::from_toml(&format!("[experiment]\nkind = \"{}\"\n", kind.name())).expect("defaults are valid")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::Config(msg.to_string()));
        let e = &self.experiment;
        if e.trials == 0 {
            return bad("experiment.trials must be at least 1");
        }
        if e.fractions.iter().any(|f| !(*f > 0.0 && *f <= 1.0)) {
            return bad("experiment.fractions must lie in (0, 1]");
        }
        if e.n_total == 0 || e.n_test == 0 {
            return bad("experiment.n_total and experiment.n_test must be positive");
        }
        if !(0.0..1.0).contains(&self.world.epsilon) {
            return bad("world.epsilon must lie in [0, 1)");
        }
        if self.world.classes < 2 || self.world.dim == 0 {
            return bad("world.classes must be at least 2 and world.dim at least 1");
        }
        if self.hypotheses.thresholds == 0 || self.hypotheses.d_values.contains(&0) {
            return bad("hypotheses.thresholds and hypotheses.d_values must be positive");
        }
        if self.active.per_round == 0 {
            return bad("active.per_round must be at least 1");
        }
        if self.active.budgets.is_empty() || self.active.budgets.contains(&0) {
            return bad("active.budgets must be non-empty and positive");
        }
        self.learners.train_config(0).validate()
    }
}

mod defaults {
    use super::*;

    pub fn trials() -> usize {
        20
    }
    pub fn output_dir() -> PathBuf {
        PathBuf::from("out")
    }
    pub fn n_total() -> usize {
        2000
    }
    pub fn fractions() -> Vec<f64> {
        vec![0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0]
    }
    pub fn n_test() -> usize {
        1000
    }
    pub fn staged_unlabeled() -> usize {
        100
    }
    pub fn random_worlds() -> usize {
        200
    }
    pub fn max_support() -> usize {
        6
    }
    pub fn world_kind() -> WorldKind {
        WorldKind::Fig4
    }
    pub fn epsilon() -> f64 {
        0.1
    }
    pub fn classes() -> usize {
        10
    }
    pub fn dim() -> usize {
        20
    }
    pub fn spread() -> f64 {
        1.0
    }
    pub fn thresholds() -> usize {
        100
    }
    pub fn d_values() -> Vec<usize> {
        vec![1, 2, 3, 4]
    }
    pub fn max_pairs() -> u64 {
        10_000_000
    }
    pub fn architecture() -> ArchitectureKind {
        ArchitectureKind::Linear
    }
    pub fn hidden() -> usize {
        32
    }
    pub fn activation() -> Activation {
        Activation::Relu
    }
    pub fn learning_rate() -> f64 {
        0.1
    }
    pub fn epochs() -> usize {
        50
    }
    pub fn batch_size() -> usize {
        32
    }
    pub fn weight_init_scale() -> f64 {
        0.1
    }
    pub fn per_round() -> usize {
        2
    }
    pub fn rounds() -> usize {
        100
    }
    pub fn budgets() -> Vec<usize> {
        vec![2, 4, 6, 8, 10, 15, 20, 30, 40, 50]
    }
    pub fn n_unlabeled() -> usize {
        500
    }
    pub fn budget_cap() -> usize {
        100_000
    }
    pub fn mc_samples() -> usize {
        10_000
    }
    pub fn pool_size() -> usize {
        200
    }
}
