//! Seeded multi-trial experiments. Trials run in parallel and results are
//! gathered in trial order, so outputs match a sequential run byte for byte.

use std::path::PathBuf;

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::config::{ExperimentConfig, ExperimentKind, WorldKind};
use crate::active::{
    dod_stage_one, dod_stage_two, dod_unlabeled, rejector_disagreement_run, write_trace_csv, DisagreementParams,
    DodParams, TraceRow,
};
use crate::deferral::{deferral_loss_01, Sample};
use crate::error::{Error, Result};
use crate::hypotheses::{
    enumerate_lookup_pairs, erm_classifier, erm_joint_with_limits, erm_rejector, exact_joint, exact_staged,
    FiniteClass, Orientation, Role, SearchLimits,
};
use crate::learners::{
    decode_model, train_joint, train_joint_semisupervised, train_staged, Network, ScoreModel,
};
use crate::seeds::{derive_named, derive_seed, rng_from};
use crate::surrogates::{gradient_check, verify_calibration, verify_consistency};
use crate::worlds::{
    make_cal_counterexample_world, make_fig4_world, make_theorem1_world, random_atomic_world, sample_labeled,
    theorem1_support, MixtureWorld, World,
};

/// Mean and standard error of the mean (zero for fewer than two values).
pub fn mean_stderr(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// A CSV table with a fixed header.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.into_inner().map_err(|e| Error::Io(e.into_error()))
    }

    /// Column `name` parsed back to numbers.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[i].parse().unwrap_or(f64::NAN)).collect())
    }
}

fn num(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        v.to_string()
    }
}

/// Per-trial metrics, kept for reproducibility audits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub experiment: String,
    pub trial: usize,
    pub seed: u64,
    pub metrics: Vec<(String, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

/// Everything an experiment produces, before it is written to disk.
#[derive(Clone, Debug)]
pub struct ExperimentOutput {
    pub experiment: ExperimentKind,
    /// `(file name, bytes)` pairs, written under the output directory.
    pub files: Vec<(String, Vec<u8>)>,
    /// `Some` for experiments that check a claim.
    pub passed: Option<bool>,
    pub summary: serde_json::Value,
}

impl ExperimentOutput {
    pub fn write(&self, dir: &std::path::Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        self.files
            .iter()
            .map(|(name, bytes)| {
                let path = dir.join(name);
                std::fs::write(&path, bytes)?;
                Ok(path)
            })
            .collect()
    }

    pub fn file(&self, name: &str) -> Option<&[u8]> {
        self.files.iter().find(|(n, _)| n == name).map(|(_, b)| b.as_slice())
    }
}

fn jsonl(trials: &[TrialResult]) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    for t in trials {
        serde_json::to_writer(&mut out, t)?;
        out.push(b'\n');
    }
    Ok(out)
}

fn pretty(value: &serde_json::Value) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    match config.experiment.kind {
        ExperimentKind::ModelComplexity => run_model_complexity(config),
        ExperimentKind::Theorem1 => run_theorem1(config),
        ExperimentKind::DataTradeoff => run_data_tradeoff(config),
        ExperimentKind::DodCurve => run_dod_curve(config),
        ExperimentKind::CalFailure => run_cal_failure(config),
        ExperimentKind::VerifyConsistency => run_verify_consistency(config),
        ExperimentKind::VerifyCalibration => {
            let e = &config.experiment;
            let report = verify_calibration(e.trials, e.seed);
            let value = serde_json::to_value(&report)?;
            Ok(ExperimentOutput {
                experiment: e.kind,
                files: vec![("verify_calibration.json".into(), pretty(&value)?)],
                passed: Some(report.violations == 0),
                summary: value,
            })
        }
        ExperimentKind::GradientCheck => {
            let e = &config.experiment;
            let report = gradient_check(e.trials, e.seed, 1e-4, e.flip_sign);
            let value = serde_json::to_value(&report)?;
            Ok(ExperimentOutput {
                experiment: e.kind,
                files: vec![("gradient_check.json".into(), pretty(&value)?)],
                passed: Some(report.passed),
                summary: value,
            })
        }
    }
}

/// Exact staged and joint risks on the VC-gap world for classifier capacity
/// `d`, with rejectors allowed to defer on a single point.
pub fn theorem1_lower_bound(d: usize, eps: f64) -> Result<(f64, f64)> {
    let support = theorem1_support(d);
    let h = FiniteClass::support_bounded(d, support.clone(), Role::Classifier);
    let r = FiniteClass::support_bounded(1, support, Role::Binary);
    let world = make_theorem1_world(d, eps, &h)?;
    let staged = exact_staged(&h, &r, &world);
    let joint = exact_joint(&h, &r, &world, SearchLimits::default())?;
    Ok((staged.risk, joint.risk))
}

/// Result of the random-world check of the upper bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UpperBoundRow {
    pub classifier_d: usize,
    pub rejector_d: usize,
    pub cases: usize,
    pub mean_gap: f64,
    pub max_gap: f64,
    pub bound: f64,
    pub violations: usize,
}

/// Exact staged-minus-joint gaps on `worlds` random binary atomic worlds,
/// for every `d(R) <= d(H) <= support`.
pub fn theorem1_upper_bound(worlds: usize, max_support: usize, seed: u64) -> Result<Vec<UpperBoundRow>> {
    if max_support == 0 {
        return Err(Error::Config("max_support must be positive".into()));
    }
    let per_world: Vec<Vec<(usize, usize, f64)>> = (0..worlds)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_from(derive_seed(seed, i as u64));
            let s = rng.random_range(1..=max_support);
            let world = random_atomic_world(s, 2, &mut rng);
            let support = world.support();
            let mut gaps = Vec::new();
            for dh in 1..=s {
                let h = FiniteClass::support_bounded(dh, support.clone(), Role::Classifier);
                for dr in 1..=dh {
                    let r = FiniteClass::support_bounded(dr, support.clone(), Role::Binary);
                    let staged = exact_staged(&h, &r, &world).risk;
                    let joint = exact_joint(&h, &r, &world, SearchLimits::default())?.risk;
                    gaps.push((dh, dr, staged - joint));
                }
            }
            Ok(gaps)
        })
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for dh in 1..=max_support {
        for dr in 1..=dh {
            let gaps: Vec<f64> = per_world
                .iter()
                .flatten()
                .filter(|(a, b, _)| *a == dh && *b == dr)
                .map(|g| g.2)
                .collect();
            if gaps.is_empty() {
                continue;
            }
            let bound = dr as f64 / dh as f64;
            rows.push(UpperBoundRow {
                classifier_d: dh,
                rejector_d: dr,
                cases: gaps.len(),
                mean_gap: mean_stderr(&gaps).0,
                max_gap: gaps.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                bound,
                violations: gaps.iter().filter(|g| **g > bound + 1e-9).count(),
            });
        }
    }
    Ok(rows)
}

fn upper_bound_table(rows: &[UpperBoundRow]) -> Table {
    let mut t = Table::new(&["classifier_d", "rejector_d", "cases", "mean_gap", "max_gap", "bound", "violations"]);
    for r in rows {
        t.push(vec![
            r.classifier_d.to_string(),
            r.rejector_d.to_string(),
            r.cases.to_string(),
            num(r.mean_gap),
            num(r.max_gap),
            num(r.bound),
            r.violations.to_string(),
        ]);
    }
    t
}

/// Gap between joint and staged accuracy as classifier capacity grows.
pub fn run_model_complexity(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let e = &config.experiment;
    let eps = config.world.epsilon;
    let mut table = Table::new(&["classifier_class_size", "joint_minus_staged_accuracy_gap", "stderr"]);
    let mut gaps = Vec::new();
    for &d in &config.hypotheses.d_values {
        let (staged, joint) = theorem1_lower_bound(d, eps)?;
        // One deterministic world per capacity: no sampling error.
        table.push(vec![d.to_string(), num(staged - joint), num(0.0)]);
        gaps.push(json!({ "d": d, "gap": staged - joint, "predicted": (1.0 - eps) / (d as f64 + 1.0) }));
    }
    let rows = theorem1_upper_bound(e.random_worlds, e.max_support, e.seed)?;
    let violations: usize = rows.iter().map(|r| r.violations).sum();
    Ok(ExperimentOutput {
        experiment: e.kind,
        files: vec![
            ("model_complexity.csv".into(), table.to_csv()?),
            ("model_complexity_random.csv".into(), upper_bound_table(&rows).to_csv()?),
        ],
        passed: None,
        summary: json!({ "lower_bound": gaps, "random_worlds": e.random_worlds, "upper_bound_violations": violations }),
    })
}

/// Both halves of the capacity theorem, as a pass/fail check.
pub fn run_theorem1(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let e = &config.experiment;
    let eps = config.world.epsilon;
    let mut lower = Vec::new();
    let mut ok = true;
    for &d in &config.hypotheses.d_values {
        let (staged, joint) = theorem1_lower_bound(d, eps)?;
        let predicted = (1.0 - eps) / (d as f64 + 1.0);
        let pass = (staged - predicted).abs() <= 1e-12 && joint == 0.0;
        ok &= pass;
        lower.push(json!({ "d": d, "staged_risk": staged, "joint_risk": joint, "predicted_gap": predicted, "pass": pass }));
    }
    let rows = theorem1_upper_bound(e.random_worlds, e.max_support, e.seed)?;
    let violations: usize = rows.iter().map(|r| r.violations).sum();
    ok &= violations == 0;
    let summary = json!({
        "lower_bound": lower,
        "upper_bound": { "worlds": e.random_worlds, "violations": violations, "rows": rows },
        "passed": ok,
    });
    Ok(ExperimentOutput {
        experiment: e.kind,
        files: vec![
            ("theorem1.json".into(), pretty(&summary)?),
            ("theorem1_random.csv".into(), upper_bound_table(&rows).to_csv()?),
        ],
        passed: Some(ok),
        summary,
    })
}

/// Worlds that support sampling for the learning experiments.
enum SampledWorld {
    Fig4(crate::worlds::ContinuousWorld),
    Mixture(MixtureWorld),
}

impl SampledWorld {
    fn from_config(config: &ExperimentConfig) -> Result<Self> {
        let w = &config.world;
        match w.kind {
            WorldKind::Fig4 => Ok(Self::Fig4(make_fig4_world())),
            WorldKind::Mixture => Ok(Self::Mixture(MixtureWorld::new(
                w.classes,
                w.dim,
                w.spread,
                MixtureWorld::half_perfect_expert(w.classes),
                w.world_seed,
            )?)),
            other => Err(Error::Config(format!("world {other:?} does not support this experiment"))),
        }
    }

    fn world(&self) -> &dyn World {
        match self {
            Self::Fig4(w) => w,
            Self::Mixture(w) => w,
        }
    }
}

/// Test risks of the three parametric pipelines at every labeled fraction
/// for one trial. All fractions share the trial's training draw.
fn tradeoff_trial(config: &ExperimentConfig, world: &dyn World, seed: u64) -> Result<Vec<[f64; 3]>> {
    let e = &config.experiment;
    let l = &config.learners;
    let (dim, k) = (world.dim(), world.classes());
    let train = sample_labeled(world, e.n_total, derive_named(seed, "train"))?;
    let test = sample_labeled(world, e.n_test, derive_named(seed, "test"))?;
    let all_y: Vec<Sample> = train.iter().map(Sample::without_expert).collect();
    let arch = l.arch();
    e.fractions
        .iter()
        .enumerate()
        .map(|(j, &f)| {
            let n_l = ((f * e.n_total as f64).round() as usize).clamp(1, e.n_total);
            let labeled = &train[..n_l];
            let cfg = l.train_config(derive_seed(seed, j as u64));
            let staged = train_staged(
                Network::new(arch, dim, k, cfg.weight_init_scale, derive_named(cfg.seed, "classifier_init")),
                Network::new(arch, dim, 1, cfg.weight_init_scale, derive_named(cfg.seed, "expert_init")),
                &all_y,
                labeled,
                &cfg,
            )?;
            let joint = train_joint(ScoreModel::new(arch, dim, k, &cfg), labeled, &cfg)?;
            let semi = train_joint_semisupervised(ScoreModel::new(arch, dim, k, &cfg), &all_y, labeled, &cfg)?;
            Ok([
                deferral_loss_01(&staged, &test)?,
                deferral_loss_01(&decode_model(joint), &test)?,
                deferral_loss_01(&decode_model(semi), &test)?,
            ])
        })
        .collect()
}

pub const DATA_TRADEOFF_HEADER: [&str; 8] = [
    "labeled_fraction",
    "staged_risk",
    "joint_risk",
    "joint_semisup_risk",
    "staged_stderr",
    "joint_stderr",
    "joint_semisup_stderr",
    "failed_trials",
];

/// Staged vs. joint vs. semi-supervised joint as the expert-labeled share of
/// the training data grows.
pub fn run_data_tradeoff(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let e = &config.experiment;
    let sampled = SampledWorld::from_config(config)?;
    let world = sampled.world();
    let outcomes: Vec<(u64, Result<Vec<[f64; 3]>>)> = (0..e.trials)
        .into_par_iter()
        .map(|t| {
            let seed = derive_seed(e.seed, t as u64);
            (seed, tradeoff_trial(config, world, seed))
        })
        .collect();
    let mut trials = Vec::new();
    let mut ok: Vec<&Vec<[f64; 3]>> = Vec::new();
    for (t, (seed, outcome)) in outcomes.iter().enumerate() {
        match outcome {
            Ok(risks) => {
                ok.push(risks);
                let metrics = e
                    .fractions
                    .iter()
                    .zip(risks)
                    .flat_map(|(f, r)| {
                        [
                            (format!("staged_risk@{f}"), r[0]),
                            (format!("joint_risk@{f}"), r[1]),
                            (format!("joint_semisup_risk@{f}"), r[2]),
                        ]
                    })
                    .collect();
                trials.push(TrialResult { experiment: "data_tradeoff".into(), trial: t, seed: *seed, metrics, failure: None });
            }
            Err(err) => trials.push(TrialResult {
                experiment: "data_tradeoff".into(),
                trial: t,
                seed: *seed,
                metrics: Vec::new(),
                failure: Some(err.to_string()),
            }),
        }
    }
    let failed = e.trials - ok.len();
    let mut table = Table::new(&DATA_TRADEOFF_HEADER);
    for (j, f) in e.fractions.iter().enumerate() {
        let stats: Vec<(f64, f64)> =
            (0..3).map(|m| mean_stderr(&ok.iter().map(|r| r[j][m]).collect::<Vec<_>>())).collect();
        table.push(vec![
            f.to_string(),
            num(stats[0].0),
            num(stats[1].0),
            num(stats[2].0),
            num(stats[0].1),
            num(stats[1].1),
            num(stats[2].1),
            failed.to_string(),
        ]);
    }
    Ok(ExperimentOutput {
        experiment: e.kind,
        files: vec![
            ("data_tradeoff.csv".into(), table.to_csv()?),
            ("data_tradeoff_trials.jsonl".into(), jsonl(&trials)?),
        ],
        passed: None,
        summary: json!({ "trials": e.trials, "failed_trials": failed }),
    })
}

/// The three threshold classes of the DoD experiments: expert-error
/// predictors and classifiers fire above the cut, rejectors at or below it.
pub fn dod_classes(n: usize) -> (FiniteClass, FiniteClass, FiniteClass) {
    (
        FiniteClass::threshold_grid(n, Orientation::PositiveAbove, Role::Binary),
        FiniteClass::threshold_grid(n, Orientation::PositiveAbove, Role::Classifier),
        FiniteClass::threshold_grid(n, Orientation::PositiveAtOrBelow, Role::Binary),
    )
}

/// `(dod, staged, joint, dod_consistent)` at one budget.
type BudgetRisks = (f64, f64, f64, bool);

/// Per-budget test risks of one trial.
fn dod_trial(config: &ExperimentConfig, world: &dyn World, seed: u64) -> Result<Vec<BudgetRisks>> {
    let e = &config.experiment;
    let a = &config.active;
    let (class_d, class_h, class_r) = dod_classes(config.hypotheses.thresholds);
    let limits = SearchLimits { max_pairs: config.hypotheses.max_pairs as u128, ..Default::default() };
    let max_budget = *a.budgets.iter().max().expect("validated non-empty");
    let params = DodParams {
        rounds: max_budget.div_ceil(a.per_round),
        per_round: a.per_round,
        n_unlabeled: a.n_unlabeled,
        budget_cap: a.budget_cap,
        mc_samples: 0,
    };
    let stage = dod_stage_one(&class_d, world, &params, seed)?;
    let unlabeled = dod_unlabeled(world, a.n_unlabeled, seed)?;
    let passive = sample_labeled(world, max_budget, derive_named(seed, "passive"))?;
    let staged_pool: Vec<Sample> = sample_labeled(world, e.staged_unlabeled.max(1), derive_named(seed, "staged_unlabeled"))?
        .into_iter()
        .map(|s| s.without_expert())
        .collect();
    let test = sample_labeled(world, e.n_test, derive_named(seed, "test"))?;
    a.budgets
        .iter()
        .map(|&b| {
            // Stage one is a prefix of the longest run; reuse the last snapshot
            // within budget.
            let j = stage.labels_used.iter().rposition(|&used| used <= b).unwrap_or(0);
            let choice = dod_stage_two(&class_d, &class_h, &class_r, &stage.snapshots[j], &unlabeled)?;
            let dod = deferral_loss_01(&class_h.pair(&class_r, choice.h, choice.r), &test)?;
            let labeled = &passive[..b];
            let fit = erm_joint_with_limits(&class_h, &class_r, labeled, limits)?;
            let joint = deferral_loss_01(&class_h.pair(&class_r, fit.h, fit.r), &test)?;
            let mut staged_data: Vec<Sample> = staged_pool.clone();
            staged_data.extend(labeled.iter().map(Sample::without_expert));
            let h = erm_classifier(&class_h, &staged_data)?;
            let rule = class_h.member(h);
            let r = erm_rejector(&class_r, |x: &[f64]| rule.eval(x), labeled)?;
            let staged = deferral_loss_01(&class_h.pair(&class_r, h, r), &test)?;
            Ok((dod, staged, joint, choice.consistent))
        })
        .collect()
}

pub const DOD_CURVE_HEADER: [&str; 9] = [
    "human_labels_used",
    "dod_risk",
    "staged_risk",
    "joint_risk",
    "dod_stderr",
    "staged_stderr",
    "joint_stderr",
    "dod_inconsistent_trials",
    "failed_trials",
];

/// DoD against passive staged and joint learning at equal human-label
/// budgets.
pub fn run_dod_curve(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let e = &config.experiment;
    if config.world.kind != WorldKind::Fig4 {
        return Err(Error::Config("dod_curve runs on the fig4 world".into()));
    }
    let world = make_fig4_world();
    let outcomes: Vec<(u64, Result<Vec<BudgetRisks>>)> = (0..e.trials)
        .into_par_iter()
        .map(|t| {
            let seed = derive_seed(e.seed, t as u64);
            (seed, dod_trial(config, &world, seed))
        })
        .collect();
    let mut trials = Vec::new();
    let mut ok = Vec::new();
    for (t, (seed, outcome)) in outcomes.iter().enumerate() {
        let (metrics, failure) = match outcome {
            Ok(rows) => {
                ok.push(rows);
                let metrics = config
                    .active
                    .budgets
                    .iter()
                    .zip(rows)
                    .flat_map(|(b, r)| {
                        [
                            (format!("dod_risk@{b}"), r.0),
                            (format!("staged_risk@{b}"), r.1),
                            (format!("joint_risk@{b}"), r.2),
                        ]
                    })
                    .collect();
                (metrics, None)
            }
            Err(err) => (Vec::new(), Some(err.to_string())),
        };
        trials.push(TrialResult { experiment: "dod_curve".into(), trial: t, seed: *seed, metrics, failure });
    }
    let failed = e.trials - ok.len();
    let mut table = Table::new(&DOD_CURVE_HEADER);
    for (j, b) in config.active.budgets.iter().enumerate() {
        let col = |f: fn(&BudgetRisks) -> f64| mean_stderr(&ok.iter().map(|r| f(&r[j])).collect::<Vec<_>>());
        let (dod, staged, joint) = (col(|r| r.0), col(|r| r.1), col(|r| r.2));
        let inconsistent = ok.iter().filter(|r| !r[j].3).count();
        table.push(vec![
            b.to_string(),
            num(dod.0),
            num(staged.0),
            num(joint.0),
            num(dod.1),
            num(staged.1),
            num(joint.1),
            inconsistent.to_string(),
            failed.to_string(),
        ]);
    }
    Ok(ExperimentOutput {
        experiment: e.kind,
        files: vec![
            ("dod_curve.csv".into(), table.to_csv()?),
            ("dod_curve_trials.jsonl".into(), jsonl(&trials)?),
        ],
        passed: None,
        summary: json!({ "trials": e.trials, "failed_trials": failed }),
    })
}

/// Disagreement-mass band within which the counterexample trace must stay.
pub const CAL_BAND: (f64, f64) = (0.45, 0.55);

/// Rejector disagreement on the two-point counterexample: the disagreement
/// region never shrinks.
pub fn run_cal_failure(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let e = &config.experiment;
    let a = &config.active;
    let cal = make_cal_counterexample_world();
    let params = DisagreementParams {
        pool_size: a.pool_size,
        per_round: a.per_round,
        rounds: a.rounds,
        budget_cap: a.budget_cap,
        mc_samples: a.mc_samples,
    };
    let out = rejector_disagreement_run(&cal.classifiers, &cal.rejectors, &cal.world, &params, e.seed)?;
    let trace: &[TraceRow] = &out.trace;
    let masses: Vec<f64> = trace.iter().map(|r| r.dis_mass_estimate).collect();
    let in_band = masses.iter().all(|m| (CAL_BAND.0..=CAL_BAND.1).contains(m));
    let passed = in_band && trace.len() == a.rounds;
    let mut csv = Vec::new();
    write_trace_csv(trace, &mut csv)?;
    Ok(ExperimentOutput {
        experiment: e.kind,
        files: vec![("cal_failure_trace.csv".into(), csv)],
        passed: Some(passed),
        summary: json!({
            "rounds": trace.len(),
            "min_dis_mass": masses.iter().copied().fold(f64::INFINITY, f64::min),
            "max_dis_mass": masses.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            "final_version_space_size": out.version_space.len(),
            "labels_used": out.labels_used,
            "passed": passed,
        }),
    })
}

/// Cross-entropy consistency on random atomic worlds (support `<= 5`,
/// `K <= 3`) plus the counterexample world.
pub fn run_verify_consistency(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let e = &config.experiment;
    let max_support = e.max_support.min(5);
    let results: Vec<(usize, usize)> = (0..e.random_worlds)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_from(derive_seed(e.seed, i as u64));
            let s = rng.random_range(1..=max_support);
            let k = rng.random_range(2..=3usize);
            let world = random_atomic_world(s, k, &mut rng);
            let report = verify_consistency(&world, 10_000)?;
            Ok((report.points, report.mismatches.len()))
        })
        .collect::<Result<_>>()?;
    let cal = verify_consistency(&make_cal_counterexample_world().world, 10_000)?;
    let points: usize = results.iter().map(|r| r.0).sum::<usize>() + cal.points;
    let mismatches: usize = results.iter().map(|r| r.1).sum::<usize>() + cal.mismatches.len();
    // Full lookup classes attain the Bayes risk; a cheap cross-check of the
    // same per-point rule.
    let mut rng = rng_from(derive_named(e.seed, "lookup"));
    let world = random_atomic_world(3, 2, &mut rng);
    let (h, r) = enumerate_lookup_pairs(&world, 2, SearchLimits::default())?;
    let joint = exact_joint(&h, &r, &world, SearchLimits::default())?.risk;
    let bayes = crate::hypotheses::bayes_deferral_risk(&world);
    let summary = json!({
        "worlds": e.random_worlds + 1,
        "points": points,
        "mismatches": mismatches,
        "lookup_joint_minus_bayes": joint - bayes,
        "seed": e.seed,
    });
    let passed = mismatches == 0 && (joint - bayes).abs() < 1e-12;
    Ok(ExperimentOutput {
        experiment: e.kind,
        files: vec![("verify_consistency.json".into(), pretty(&summary)?)],
        passed: Some(passed),
        summary,
    })
}
