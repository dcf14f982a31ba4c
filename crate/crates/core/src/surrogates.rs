//! Cost-sensitive surrogates for the `(K+1)`-action reduction of deferral.
//!
//! Actions are 1-based: `1..=K` predict a class and `K+1` defers. Vectors are
//! stored 0-based, so action `i` lives at index `i - 1`.

use std::fmt;
use std::sync::Arc;

use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::deferral::{AtomicWorld, Label};
use crate::error::{Error, Result};
use crate::seeds::{child_rng, Rng};

/// Per-action costs `c(1..=K+1)`; the last entry is the cost of deferring.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostVector(pub Vec<f64>);

/// Per-action scores `f_1..f_{K+1}` at one input.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoreVector(pub Vec<f64>);

impl CostVector {
    pub fn actions(&self) -> usize {
        self.0.len()
    }
}

impl ScoreVector {
    /// Lowest-index argmax, as a 1-based action.
    pub fn predict(&self) -> usize {
        argmax(&self.0) + 1
    }
}

/// `(u, s, t)` parameterization `ℓ(i, f) = u(f_i) + s(Σ_j t(f_j))`.
pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum SurrogateSpec {
    CrossEntropy,
    WeightedQuadratic,
    /// Caller-supplied triple; its consistency is not checked.
    Ust { u: ScalarFn, s: ScalarFn, t: ScalarFn },
}

impl fmt::Debug for SurrogateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SurrogateSpec::CrossEntropy => f.write_str("CrossEntropy"),
            SurrogateSpec::WeightedQuadratic => f.write_str("WeightedQuadratic"),
            SurrogateSpec::Ust { .. } => f.write_str("Ust"),
        }
    }
}

pub(crate) fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for i in 1..v.len() {
        if v[i] > v[best] {
            best = i;
        }
    }
    best
}

fn argmin(v: &[f64]) -> usize {
    let mut best = 0;
    for i in 1..v.len() {
        if v[i] < v[best] {
            best = i;
        }
    }
    best
}

pub fn log_softmax(f: &[f64]) -> Vec<f64> {
    let max = f.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lse = max + f.iter().map(|v| (v - max).exp()).sum::<f64>().ln();
    f.iter().map(|v| v - lse).collect()
}

pub fn softmax(f: &[f64]) -> Vec<f64> {
    log_softmax(f).into_iter().map(f64::exp).collect()
}

/// `w_i = max_j c(j) - c(i)`.
pub fn cost_weights(c: &CostVector) -> Vec<f64> {
    let max = c.0.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    c.0.iter().map(|ci| max - ci).collect()
}

/// Costs of the 0-1 reduction: `c(i) = I{i != y}`, `c(K+1) = I{m != y}`.
pub fn zero_one_costs(y: Label, expert_correct: bool, classes: usize) -> CostVector {
    let mut c: Vec<f64> = (1..=classes).map(|i| if i == y { 0.0 } else { 1.0 }).collect();
    c.push(if expert_correct { 0.0 } else { 1.0 });
    CostVector(c)
}

fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// `Σ_i w_i ℓ(i, f)` with `w = cost_weights(c)`.
///
/// The weighted quadratic is reported as `W Σ_j (f_j - w_j/W)^2` with
/// `W = Σ w`, which is the `(-2x, x, x^2)` member shifted by the constant
/// `Σ w^2 / W` so that it is nonnegative.
pub fn surrogate_loss(spec: &SurrogateSpec, c: &CostVector, f: &ScoreVector) -> Result<f64> {
    check_dims(c.0.len(), f.0.len())?;
    let w = cost_weights(c);
    Ok(match spec {
        SurrogateSpec::CrossEntropy => {
            let ls = log_softmax(&f.0);
            w.iter().zip(&ls).filter(|(wi, _)| **wi != 0.0).map(|(wi, l)| -wi * l).sum()
        }
        SurrogateSpec::WeightedQuadratic => {
            let total: f64 = w.iter().sum();
            if total == 0.0 {
                0.0
            } else {
                total * f.0.iter().zip(&w).map(|(fj, wj)| (fj - wj / total).powi(2)).sum::<f64>()
            }
        }
        SurrogateSpec::Ust { u, s, t } => {
            let shared = s(f.0.iter().map(|v| t(*v)).sum());
            w.iter().zip(&f.0).map(|(wi, fi)| wi * (u(*fi) + shared)).sum()
        }
    })
}

/// The deferral cross-entropy on one sample; `f` has `K+1` entries.
pub fn lce_loss(y: Label, expert_correct: bool, f: &ScoreVector) -> Result<f64> {
    let classes = f.0.len().saturating_sub(1);
    check_label(y, classes)?;
    surrogate_loss(&SurrogateSpec::CrossEntropy, &zero_one_costs(y, expert_correct, classes), f)
}

fn check_label(y: Label, classes: usize) -> Result<()> {
    if classes < 1 {
        return Err(Error::DimensionMismatch { expected: 2, found: classes + 1 });
    }
    if y == 0 || y > classes {
        return Err(Error::InvalidLabel { label: y, classes });
    }
    Ok(())
}

/// Gradient of [`lce_loss`] in `f`: `W softmax(f) - w`.
pub fn lce_gradient(y: Label, expert_correct: bool, f: &ScoreVector) -> Result<Vec<f64>> {
    let classes = f.0.len().saturating_sub(1);
    check_label(y, classes)?;
    let w = cost_weights(&zero_one_costs(y, expert_correct, classes));
    let total: f64 = w.iter().sum();
    Ok(softmax(&f.0).iter().zip(&w).map(|(p, wi)| total * p - wi).collect())
}

/// `ψ(x) = (C / M^(ε-1)) x^ε`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationSpec {
    pub cost_bound: f64,
    pub classes: usize,
    pub exponent: f64,
    pub constant: f64,
}

impl CalibrationSpec {
    /// The deferral cross-entropy: `ψ(x) = x^2 / (16 M K)`.
    pub fn cross_entropy(cost_bound: f64, classes: usize) -> Self {
        Self { cost_bound, classes, exponent: 2.0, constant: 1.0 / (16.0 * classes as f64) }
    }
}

pub fn calibration_psi(x: f64, spec: &CalibrationSpec) -> Result<f64> {
    if x < 0.0 || x.is_nan() {
        return Err(Error::NegativeInput(x));
    }
    Ok(spec.constant / spec.cost_bound.powf(spec.exponent - 1.0) * x.powf(spec.exponent))
}

/// Lowest-index action minimizing expected cost (1-based; `K+1` defers).
pub fn bayes_action(cost_expectations: &[f64]) -> usize {
    argmin(cost_expectations) + 1
}

/// Log-floor applied to zero entries of `q`.
pub const LOG_FLOOR: f64 = 1e-300;

/// Scores whose softmax is `q`, for the cross-entropy surrogate.
pub fn conditional_surrogate_minimizer(q: &[f64]) -> Result<ScoreVector> {
    if q.is_empty() {
        return Err(Error::InvalidDistribution("empty vector".into()));
    }
    if q.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::InvalidDistribution("entries must be finite and nonnegative".into()));
    }
    let total: f64 = q.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidDistribution(format!("entries sum to {total}")));
    }
    Ok(ScoreVector(q.iter().map(|v| v.max(LOG_FLOOR).ln()).collect()))
}

/// One support point where the decoded surrogate minimizer is not the Bayes
/// action.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mismatch {
    pub point: usize,
    pub decoded: usize,
    pub bayes: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub points: usize,
    pub mismatches: Vec<Mismatch>,
}

/// Expected 0-1 reduction costs and weights at each support point.
fn expected_costs_and_weights(world: &AtomicWorld) -> Vec<(Vec<f64>, Vec<f64>)> {
    let k = world.classes();
    world
        .points()
        .iter()
        .map(|p| {
            let mut ec = vec![0.0; k + 1];
            let mut ew = vec![0.0; k + 1];
            for (y, m, prob) in p.outcomes() {
                let c = zero_one_costs(y, m == y, k);
                for (i, wi) in cost_weights(&c).into_iter().enumerate() {
                    ec[i] += prob * c.0[i];
                    ew[i] += prob * wi;
                }
            }
            (ec, ew)
        })
        .collect()
}

/// Checks, point by point, that the cross-entropy minimizer decodes to the
/// lowest-index Bayes action.
pub fn verify_consistency(world: &AtomicWorld, max_cells: usize) -> Result<ConsistencyReport> {
    let cells = world.len() * (world.classes() + 1);
    if cells > max_cells {
        return Err(Error::SizeLimit { requested: cells as u128, cap: max_cells as u128 });
    }
    let mut mismatches = Vec::new();
    for (point, (ec, ew)) in expected_costs_and_weights(world).into_iter().enumerate() {
        let total: f64 = ew.iter().sum();
        let q: Vec<f64> = ew.iter().map(|v| v / total).collect();
        let decoded = conditional_surrogate_minimizer(&q)?.predict();
        let bayes = bayes_action(&ec);
        if decoded != bayes {
            mismatches.push(Mismatch { point, decoded, bayes });
        }
    }
    Ok(ConsistencyReport { points: world.len(), mismatches })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub trials: usize,
    pub violations: usize,
    pub max_violation: f64,
    pub seed: u64,
}

/// Excess 0-1 and excess surrogate conditional risks of `f` at a single
/// point whose label law is `p_y` and whose expert is right with
/// probability `alpha_y` given `Y = y`.
pub fn conditional_excess(p: &[f64], alpha: &[f64], f: &[f64]) -> (f64, f64) {
    let k = p.len();
    let mut ew: Vec<f64> = p.to_vec();
    ew.push(p.iter().zip(alpha).map(|(py, ay)| py * ay).sum());
    let total: f64 = ew.iter().sum();
    // L(a) = 1 - E[w_a] for every action.
    let best = ew[argmax(&ew)];
    let chosen = ew[argmax(f)];
    let delta_l = best - chosen;
    let ls = log_softmax(f);
    let mut kl = 0.0;
    for i in 0..=k {
        let qi = ew[i] / total;
        if qi > 0.0 {
            kl += qi * (qi.ln() - ls[i]);
        }
    }
    (delta_l, total * kl.max(0.0))
}

fn calibration_trial(index: usize, seed: u64) -> f64 {
    const CLASS_CYCLE: [usize; 3] = [2, 3, 10];
    let k = CLASS_CYCLE[index % CLASS_CYCLE.len()];
    let mut rng: Rng = child_rng(seed, index as u64);
    let p = crate::worlds::random_simplex(k, &mut rng);
    let alpha: Vec<f64> = (0..k).map(|_| rng.random::<f64>()).collect();
    let scale = match index % 10 {
        0 => 1e3,
        1 => 0.0,
        _ => rng.random_range(0.1..5.0),
    };
    let f: Vec<f64> = (0..=k)
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            scale * z
        })
        .collect();
    let (delta_l, delta_s) = conditional_excess(&p, &alpha, &f);
    let psi = calibration_psi(delta_l, &CalibrationSpec::cross_entropy(1.0, k)).expect("excess risk is nonnegative");
    psi - delta_s
}

/// Random single-point trials of `ψ(ΔL) ≤ ΔS` for the deferral
/// cross-entropy with `M = 1` and `K` cycling through `{2, 3, 10}`.
pub fn verify_calibration(n_trials: usize, seed: u64) -> CalibrationReport {
    let gaps: Vec<f64> = (0..n_trials).into_par_iter().map(|i| calibration_trial(i, seed)).collect();
    let violations = gaps.iter().filter(|g| **g > 1e-9).count();
    let max_violation = gaps.iter().copied().fold(0.0, f64::max);
    CalibrationReport { trials: n_trials, violations, max_violation, seed }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GradientReport {
    pub trials: usize,
    pub max_relative_error: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub seed: u64,
}

/// Compares [`lce_gradient`] against central differences with step `1e-5`.
/// With `flip_sign` the analytic gradient is negated first, which the check
/// must catch.
pub fn gradient_check(n_trials: usize, seed: u64, tolerance: f64, flip_sign: bool) -> GradientReport {
    const STEP: f64 = 1e-5;
    let errors: Vec<f64> = (0..n_trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = child_rng(seed, i as u64);
            let k = rng.random_range(2..=10usize);
            let y = rng.random_range(1..=k);
            let correct = rng.random_bool(0.5);
            let f: Vec<f64> = (0..=k)
                .map(|_| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    2.0 * z
                })
                .collect();
            let mut grad = lce_gradient(y, correct, &ScoreVector(f.clone())).expect("valid label");
            if flip_sign {
                grad.iter_mut().for_each(|g| *g = -*g);
            }
            let mut worst: f64 = 0.0;
            for j in 0..=k {
                let mut up = f.clone();
                let mut down = f.clone();
                up[j] += STEP;
                down[j] -= STEP;
                let numeric = (lce_loss(y, correct, &ScoreVector(up)).unwrap()
                    - lce_loss(y, correct, &ScoreVector(down)).unwrap())
                    / (2.0 * STEP);
                worst = worst.max((grad[j] - numeric).abs() / (1.0 + grad[j].abs()));
            }
            worst
        })
        .collect();
    let max_relative_error = errors.iter().copied().fold(0.0, f64::max);
    GradientReport {
        trials: n_trials,
        max_relative_error,
        tolerance,
        passed: max_relative_error < tolerance,
        seed,
    }
}
