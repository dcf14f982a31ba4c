//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use defer_lab::harness::config::{ExperimentConfig, ExperimentKind};
use defer_lab::harness::experiments::{run_experiment, theorem1_lower_bound, theorem1_upper_bound, Table};
use defer_lab::harness::verify::suite_config;
use defer_lab::surrogates::{gradient_check, verify_calibration};

struct Outcome {
    passed: bool,
    detail: String,
}

fn config_file(name: &str) -> ExperimentConfig {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs").join(name);
    ExperimentConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn table(bytes: &[u8]) -> Table {
    let mut r = csv::Reader::from_reader(bytes);
    let header: Vec<&str> = r.headers().unwrap().iter().collect();
    let mut t = Table::new(&header);
    for rec in r.records() {
        t.push(rec.unwrap().iter().map(String::from).collect());
    }
    t
}

fn lower_bound() -> Outcome {
    let eps = 0.1;
    let mut rows = Vec::new();
    let mut passed = true;
    for d in [1usize, 2, 3] {
        let (staged, joint) = theorem1_lower_bound(d, eps).unwrap();
        // Staged ERM must give up the lightest support point.
        let want = (1.0 - eps) / (d as f64 + 1.0);
        passed &= (staged - want).abs() <= 1e-12 && joint == 0.0;
        rows.push(format!("d={d} staged={staged:.6} joint={joint}"));
    }
    Outcome { passed, detail: rows.join(" ") }
}

fn upper_bound() -> Outcome {
    let worlds = 200;
    let rows = theorem1_upper_bound(worlds, 6, 2024).unwrap();
    let violations: usize = rows.iter().map(|r| r.violations).sum();
    let cases: usize = rows.iter().map(|r| r.cases).sum();
    let tightest = rows.iter().map(|r| r.max_gap / r.bound).fold(0.0, f64::max);
    Outcome {
        passed: violations == 0,
        detail: format!("worlds={worlds} cases={cases} violations={violations} max_gap/bound={tightest:.4}"),
    }
}

fn consistency() -> Outcome {
    let mut config = suite_config("consistency", 5).unwrap();
    config.experiment.random_worlds = 100;
    config.experiment.max_support = 5;
    let out = run_experiment(&config).unwrap();
    Outcome {
        passed: out.passed == Some(true) && out.summary["worlds"].as_u64().unwrap() > 100,
        detail: format!(
            "worlds={} points={} mismatches={}",
            out.summary["worlds"], out.summary["points"], out.summary["mismatches"]
        ),
    }
}

fn calibration() -> Outcome {
    let r = verify_calibration(10_000, 17);
    Outcome {
        passed: r.trials == 10_000 && r.violations == 0,
        detail: format!("trials={} violations={} max_violation={:e}", r.trials, r.violations, r.max_violation),
    }
}

fn gradient() -> Outcome {
    let r = gradient_check(100, 23, 1e-4, false);
    Outcome {
        passed: r.passed && r.max_relative_error < 1e-4,
        detail: format!("trials={} max_relative_error={:e}", r.trials, r.max_relative_error),
    }
}

fn cal_failure() -> Outcome {
    let mut config = ExperimentConfig::for_kind(ExperimentKind::CalFailure);
    config.experiment.seed = 31;
    config.active.rounds = 100;
    config.active.mc_samples = 10_000;
    let out = run_experiment(&config).unwrap();
    let trace = table(out.file("cal_failure_trace.csv").unwrap());
    let masses = trace.column("dis_mass_estimate").unwrap();
    let in_band = masses.iter().all(|m| (0.45..=0.55).contains(m));
    Outcome {
        passed: masses.len() == 100 && in_band,
        detail: format!(
            "rounds={} dis_mass in [{:.4}, {:.4}]",
            masses.len(),
            masses.iter().copied().fold(f64::INFINITY, f64::min),
            masses.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        ),
    }
}

/// First budget whose mean risk is at most `target`.
fn first_reaching(budgets: &[f64], risks: &[f64], target: f64) -> Option<f64> {
    budgets.iter().zip(risks).find(|(_, r)| **r <= target).map(|(b, _)| *b)
}

fn dod_curve() -> Outcome {
    let config = config_file("dod_curve.toml");
    assert!(config.experiment.trials >= 200 && config.hypotheses.thresholds == 100);
    let out = run_experiment(&config).unwrap();
    let t = table(out.file("dod_curve.csv").unwrap());
    let budgets = t.column("human_labels_used").unwrap();
    let dod = t.column("dod_risk").unwrap();
    let joint = t.column("joint_risk").unwrap();
    let dominates = budgets.iter().zip(dod.iter().zip(&joint)).filter(|(b, _)| **b >= 20.0).all(|(_, (d, j))| d <= j);
    let dod_needs = first_reaching(&budgets, &dod, 0.05);
    let joint_needs = first_reaching(&budgets, &joint, 0.05);
    let efficient = matches!((dod_needs, joint_needs), (Some(d), Some(j)) if d <= j / 2.0);
    Outcome {
        passed: dominates && efficient,
        detail: format!(
            "trials={} dod<=joint for budgets>=20: {dominates}; labels to risk<=0.05: dod={dod_needs:?} joint={joint_needs:?}",
            config.experiment.trials
        ),
    }
}

fn data_tradeoff() -> Outcome {
    let config = config_file("data_tradeoff.toml");
    assert!(config.experiment.trials >= 20 && config.experiment.n_total == 2000);
    let out = run_experiment(&config).unwrap();
    let t = table(out.file("data_tradeoff.csv").unwrap());
    let col = |name: &str| t.column(name).unwrap();
    let (fractions, staged, joint, semi, semi_se) =
        (col("labeled_fraction"), col("staged_risk"), col("joint_risk"), col("joint_semisup_risk"), col("joint_semisup_stderr"));
    let mut passed = fractions.iter().any(|f| *f <= 0.1);
    let mut rows = Vec::new();
    for i in (0..fractions.len()).filter(|&i| fractions[i] <= 0.1) {
        let (lo, hi) = (staged[i].min(joint[i]), staged[i].max(joint[i]));
        let ok = staged[i] <= joint[i] && semi[i] >= lo - semi_se[i] && semi[i] <= hi + semi_se[i];
        passed &= ok;
        rows.push(format!("f={}: staged={:.4} semi={:.4} joint={:.4}", fractions[i], staged[i], semi[i], joint[i]));
    }
    Outcome { passed, detail: format!("seeds={} {}", config.experiment.trials, rows.join("; ")) }
}

fn determinism() -> Outcome {
    let small = [
        "[experiment]\nkind = \"model_complexity\"\nrandom_worlds = 20\n",
        "[experiment]\nkind = \"theorem1\"\nrandom_worlds = 20\n",
        "[experiment]\nkind = \"data_tradeoff\"\ntrials = 3\nn_total = 200\nn_test = 200\nfractions = [0.1, 1.0]\n[world]\nkind = \"mixture\"\nclasses = 4\ndim = 5\n[learners]\nepochs = 5\n",
        "[experiment]\nkind = \"data_tradeoff\"\ntrials = 3\nn_total = 100\nn_test = 100\nfractions = [0.5]\n[learners]\narchitecture = \"mlp\"\nhidden = 8\nepochs = 5\n",
        "[experiment]\nkind = \"dod_curve\"\ntrials = 5\nn_test = 200\n[active]\nbudgets = [2, 20]\nn_unlabeled = 100\n",
        "[experiment]\nkind = \"cal_failure\"\n[active]\nrounds = 10\nmc_samples = 1000\n",
        "[experiment]\nkind = \"verify_consistency\"\nrandom_worlds = 10\n",
        "[experiment]\nkind = \"verify_calibration\"\ntrials = 100\n",
        "[experiment]\nkind = \"gradient_check\"\ntrials = 10\n",
    ];
    let mut files = 0;
    let mut differing = Vec::new();
    for text in small {
        let config = ExperimentConfig::from_toml(text).unwrap();
        let a = run_experiment(&config).unwrap();
        let b = run_experiment(&config).unwrap();
        for ((name, x), (_, y)) in a.files.iter().zip(&b.files) {
            files += 1;
            if x != y {
                differing.push(name.clone());
            }
        }
    }
    Outcome { passed: differing.is_empty(), detail: format!("files compared={files} differing={differing:?}") }
}

type Criterion = (&'static str, fn() -> Outcome, Duration);

fn main() {
    let criteria: [Criterion; 9] = [
        ("1 capacity gap lower bound", lower_bound, Duration::from_secs(1)),
        ("2 capacity gap upper bound", upper_bound, Duration::from_secs(60)),
        ("3 surrogate consistency", consistency, Duration::from_secs(30)),
        ("4 surrogate calibration", calibration, Duration::from_secs(60)),
        ("5 gradient correctness", gradient, Duration::from_secs(5)),
        ("6 counterexample disagreement", cal_failure, Duration::from_secs(30)),
        ("7 DoD label efficiency", dod_curve, Duration::from_secs(600)),
        ("8 staged vs joint data tradeoff", data_tradeoff, Duration::from_secs(600)),
        ("9 determinism", determinism, Duration::from_secs(600)),
    ];
    let mut failures = 0;
    for (name, check, limit) in criteria {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let passed = outcome.passed && elapsed <= limit;
        failures += usize::from(!passed);
        println!(
            "{} criterion {name}: {} [{:.2}s / limit {}s]",
            if passed { "PASS" } else { "FAIL" },
            outcome.detail,
            elapsed.as_secs_f64(),
            limit.as_secs()
        );
    }
    println!("N/A  criterion 10 image-benchmark accuracies: not reproduced at desk scale (synthetic trends only)");
    if failures > 0 {
        eprintln!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
}
