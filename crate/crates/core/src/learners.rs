//! Gradient-trained score models and the joint, staged and
//! semi-supervised joint training pipelines.
//!
//! Optimization is plain minibatch gradient descent with a seeded shuffle and
//! a fixed accumulation order, so identical inputs give identical parameters.

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::deferral::{decode_pair, DeferralSystem, Label, Sample};
use crate::error::{Error, Result};
use crate::seeds::{derive_named, derive_seed, rng_from};
use crate::surrogates::{argmax, lce_gradient, lce_loss, log_softmax, softmax, ScoreVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Relu,
    Tanh,
}

impl Activation {
    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Relu => z.max(0.0),
            Activation::Tanh => z.tanh(),
        }
    }

    /// Derivative given the pre-activation `z` and output `a`.
    fn derivative(self, z: f64, a: f64) -> f64 {
        match self {
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Tanh => 1.0 - a * a,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Architecture {
    Linear,
    Mlp { hidden: usize, activation: Activation },
}

/// A dense network with a flat parameter vector.
///
/// Linear layout: `W (outputs x input)` row-major, then `b`. MLP layout:
/// `W1 (hidden x input)`, `b1`, `W2 (outputs x hidden)`, `b2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Network {
    pub arch: Architecture,
    pub input_dim: usize,
    pub outputs: usize,
    pub params: Vec<f64>,
}

/// Intermediate values kept for the backward pass.
struct Cache {
    pre: Vec<f64>,
    hidden: Vec<f64>,
}

impl Network {
    pub fn parameter_count(arch: Architecture, input_dim: usize, outputs: usize) -> usize {
        match arch {
            Architecture::Linear => outputs * (input_dim + 1),
            Architecture::Mlp { hidden, .. } => hidden * (input_dim + 1) + outputs * (hidden + 1),
        }
    }

    /// Parameters uniform in `[-scale, scale]`.
    pub fn new(arch: Architecture, input_dim: usize, outputs: usize, scale: f64, seed: u64) -> Self {
        let mut rng = rng_from(seed);
        let params = (0..Self::parameter_count(arch, input_dim, outputs))
            .map(|_| if scale > 0.0 { rng.random_range(-scale..=scale) } else { 0.0 })
            .collect();
        Self { arch, input_dim, outputs, params }
    }

    pub fn forward(&self, x: &[f64]) -> Vec<f64> {
        self.forward_cached(x).0
    }

    fn forward_cached(&self, x: &[f64]) -> (Vec<f64>, Cache) {
        let d = self.input_dim;
        let dense = |w: &[f64], b: &[f64], input: &[f64], rows: usize| -> Vec<f64> {
            (0..rows)
                .map(|r| {
                    let row = &w[r * input.len()..(r + 1) * input.len()];
                    b[r] + row.iter().zip(input).map(|(a, v)| a * v).sum::<f64>()
                })
                .collect()
        };
        match self.arch {
            Architecture::Linear => {
                let (w, b) = self.params.split_at(self.outputs * d);
                (dense(w, b, x, self.outputs), Cache { pre: Vec::new(), hidden: Vec::new() })
            }
            Architecture::Mlp { hidden, activation } => {
                let (w1, rest) = self.params.split_at(hidden * d);
                let (b1, rest) = rest.split_at(hidden);
                let (w2, b2) = rest.split_at(self.outputs * hidden);
                let pre = dense(w1, b1, x, hidden);
                let h: Vec<f64> = pre.iter().map(|z| activation.apply(*z)).collect();
                (dense(w2, b2, &h, self.outputs), Cache { pre, hidden: h })
            }
        }
    }

    /// Adds `d(grad_out · output)/d params` to `grad`.
    fn backward(&self, x: &[f64], cache: &Cache, grad_out: &[f64], grad: &mut [f64]) {
        let d = self.input_dim;
        match self.arch {
            Architecture::Linear => {
                let (gw, gb) = grad.split_at_mut(self.outputs * d);
                for (o, g) in grad_out.iter().enumerate() {
                    for (i, xi) in x.iter().enumerate() {
                        gw[o * d + i] += g * xi;
                    }
                    gb[o] += g;
                }
            }
            Architecture::Mlp { hidden, activation } => {
                let w2 = &self.params[hidden * (d + 1)..hidden * (d + 1) + self.outputs * hidden];
                let (gw1, rest) = grad.split_at_mut(hidden * d);
                let (gb1, rest) = rest.split_at_mut(hidden);
                let (gw2, gb2) = rest.split_at_mut(self.outputs * hidden);
                let mut dh = vec![0.0; hidden];
                for (o, g) in grad_out.iter().enumerate() {
                    for j in 0..hidden {
                        gw2[o * hidden + j] += g * cache.hidden[j];
                        dh[j] += g * w2[o * hidden + j];
                    }
                    gb2[o] += g;
                }
                for j in 0..hidden {
                    let dz = dh[j] * activation.derivative(cache.pre[j], cache.hidden[j]);
                    for (i, xi) in x.iter().enumerate() {
                        gw1[j * d + i] += dz * xi;
                    }
                    gb1[j] += dz;
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
    #[serde(default = "default_init_scale")]
    pub weight_init_scale: f64,
    /// Fraction of the data held out; when set, the parameters of the epoch
    /// with the lowest held-out loss are returned.
    #[serde(default)]
    pub validation_fraction: Option<f64>,
}

fn default_init_scale() -> f64 {
    0.1
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.1,
            epochs: 100,
            batch_size: 32,
            seed: 0,
            weight_init_scale: default_init_scale(),
            validation_fraction: None,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config(format!("learning_rate must be positive, got {}", self.learning_rate)));
        }
        if self.batch_size == 0 {
            return Err(Error::Config("batch_size must be at least 1".into()));
        }
        if let Some(f) = self.validation_fraction {
            if !(0.0..1.0).contains(&f) {
                return Err(Error::Config(format!("validation_fraction must be in [0, 1), got {f}")));
            }
        }
        Ok(())
    }

    fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..self.clone() }
    }
}

/// Mean minibatch loss per epoch, plus held-out loss when configured.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainHistory {
    pub epoch_losses: Vec<f64>,
    pub validation_losses: Vec<f64>,
}

/// Minibatch gradient descent of `loss(i, scores) -> (value, d value / d scores)`.
fn fit<F>(net: &mut Network, xs: &[&[f64]], cfg: &TrainConfig, loss: F) -> Result<TrainHistory>
where
    F: Fn(usize, &[f64]) -> (f64, Vec<f64>),
{
    cfg.validate()?;
    if xs.is_empty() {
        return Err(Error::EmptyData);
    }
    let mut order: Vec<usize> = (0..xs.len()).collect();
    let held_out = match cfg.validation_fraction {
        Some(f) if f > 0.0 => ((xs.len() as f64 * f).ceil() as usize).min(xs.len() - 1),
        _ => 0,
    };
    let mut rng = rng_from(derive_named(cfg.seed, "shuffle"));
    let validation: Vec<usize> = if held_out > 0 {
        order.shuffle(&mut rng);
        order.split_off(xs.len() - held_out)
    } else {
        Vec::new()
    };
    let mean_loss = |net: &Network, idx: &[usize]| -> f64 {
        idx.iter().map(|&i| loss(i, &net.forward(xs[i])).0).sum::<f64>() / idx.len() as f64
    };

    let mut history = TrainHistory::default();
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut initial: Option<f64> = None;
    let mut grad = vec![0.0; net.params.len()];
    for epoch in 0..cfg.epochs {
        if cfg.batch_size < order.len() {
            order.shuffle(&mut rng);
        }
        let mut batch_losses = Vec::new();
        for batch in order.chunks(cfg.batch_size) {
            grad.iter_mut().for_each(|g| *g = 0.0);
            let mut total = 0.0;
            for &i in batch {
                let (out, cache) = net.forward_cached(xs[i]);
                let (value, g) = loss(i, &out);
                total += value;
                net.backward(xs[i], &cache, &g, &mut grad);
            }
            let batch_loss = total / batch.len() as f64;
            let reference = *initial.get_or_insert(batch_loss);
            if !batch_loss.is_finite() || (reference > 0.0 && batch_loss > 1e3 * reference) {
                return Err(Error::Divergence { epoch, loss: batch_loss });
            }
            batch_losses.push(batch_loss);
            let step = cfg.learning_rate / batch.len() as f64;
            for (p, g) in net.params.iter_mut().zip(&grad) {
                *p -= step * g;
            }
        }
        history.epoch_losses.push(batch_losses.iter().sum::<f64>() / batch_losses.len() as f64);
        if !validation.is_empty() {
            let v = mean_loss(net, &validation);
            history.validation_losses.push(v);
            if best.as_ref().is_none_or(|(b, _)| v < *b) {
                best = Some((v, net.params.clone()));
            }
        }
    }
    if let Some((_, params)) = best {
        net.params = params;
    }
    Ok(history)
}

fn features(data: &[Sample]) -> Vec<&[f64]> {
    data.iter().map(|s| s.x.as_slice()).collect()
}

fn check_labels(data: &[Sample], classes: usize) -> Result<()> {
    for s in data {
        if s.y == 0 || s.y > classes {
            return Err(Error::InvalidLabel { label: s.y, classes });
        }
    }
    Ok(())
}

fn expert_flags(data: &[Sample]) -> Result<Vec<bool>> {
    data.iter()
        .enumerate()
        .map(|(index, s)| s.expert_correct().ok_or(Error::MissingExpertLabel { index }))
        .collect()
}

/// `K+1` scores per input; the last is the defer score.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoreModel {
    pub classes: usize,
    pub network: Network,
}

impl ScoreModel {
    pub fn new(arch: Architecture, input_dim: usize, classes: usize, cfg: &TrainConfig) -> Self {
        Self {
            classes,
            network: Network::new(arch, input_dim, classes + 1, cfg.weight_init_scale, derive_named(cfg.seed, "init")),
        }
    }

    pub fn scores(&self, x: &[f64]) -> ScoreVector {
        ScoreVector(self.network.forward(x))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Mean deferral cross-entropy of the model on labeled data.
pub fn mean_lce(model: &ScoreModel, data: &[Sample]) -> Result<f64> {
    let flags = expert_flags(data)?;
    let mut total = 0.0;
    for (s, correct) in data.iter().zip(flags) {
        total += lce_loss(s.y, correct, &model.scores(&s.x))?;
    }
    Ok(total / data.len() as f64)
}

/// Minimizes the mean deferral cross-entropy on `data_l`.
pub fn train_joint(model: ScoreModel, data_l: &[Sample], cfg: &TrainConfig) -> Result<ScoreModel> {
    train_joint_with_history(model, data_l, cfg).map(|(m, _)| m)
}

pub fn train_joint_with_history(
    mut model: ScoreModel,
    data_l: &[Sample],
    cfg: &TrainConfig,
) -> Result<(ScoreModel, TrainHistory)> {
    if data_l.is_empty() {
        return Err(Error::EmptyData);
    }
    check_labels(data_l, model.classes)?;
    let flags = expert_flags(data_l)?;
    let xs = features(data_l);
    let history = fit(&mut model.network, &xs, cfg, |i, out| {
        let f = ScoreVector(out.to_vec());
        let y = data_l[i].y;
        (
            lce_loss(y, flags[i], &f).expect("labels checked"),
            lce_gradient(y, flags[i], &f).expect("labels checked"),
        )
    })?;
    Ok((model, history))
}

/// Multiclass cross-entropy over the first `K` outputs; other outputs get no
/// gradient.
fn class_cross_entropy(y: Label, classes: usize, out: &[f64]) -> (f64, Vec<f64>) {
    let ls = log_softmax(&out[..classes]);
    let mut g = vec![0.0; out.len()];
    for (i, l) in ls.iter().enumerate() {
        g[i] = l.exp() - if i + 1 == y { 1.0 } else { 0.0 };
    }
    (-ls[y - 1], g)
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Binary cross-entropy of a logit against a 0/1 target.
fn logistic_loss(z: f64, target: bool) -> (f64, f64) {
    // log(1 + e^z) - t z, computed stably.
    let softplus = z.max(0.0) + (-z.abs()).exp().ln_1p();
    let t = if target { 1.0 } else { 0.0 };
    (softplus - t * z, sigmoid(z) - t)
}

/// Classifier plus expert-correctness head: defer iff the estimated
/// probability that the expert is right exceeds the classifier's top softmax
/// probability.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StagedSystem {
    pub classes: usize,
    pub classifier: Network,
    pub expert_head: Network,
}

impl StagedSystem {
    pub fn confidence(&self, x: &[f64]) -> f64 {
        softmax(&self.classifier.forward(x)).into_iter().fold(0.0, f64::max)
    }

    pub fn expert_correct_probability(&self, x: &[f64]) -> f64 {
        sigmoid(self.expert_head.forward(x)[0])
    }
}

impl DeferralSystem for StagedSystem {
    fn classify(&self, x: &[f64]) -> Label {
        argmax(&self.classifier.forward(x)) + 1
    }

    fn defers(&self, x: &[f64]) -> bool {
        self.expert_correct_probability(x) > self.confidence(x)
    }
}

/// Trains a `K`-output classifier on `data_all` by cross-entropy, then a
/// single-logit expert-correctness predictor on `data_l`.
pub fn train_staged(
    mut classifier: Network,
    mut expert_head: Network,
    data_all: &[Sample],
    data_l: &[Sample],
    cfg: &TrainConfig,
) -> Result<StagedSystem> {
    if data_all.is_empty() || data_l.is_empty() {
        return Err(Error::EmptyData);
    }
    if expert_head.outputs != 1 {
        return Err(Error::DimensionMismatch { expected: 1, found: expert_head.outputs });
    }
    let classes = classifier.outputs;
    check_labels(data_all, classes)?;
    let xs = features(data_all);
    fit(&mut classifier, &xs, &cfg.with_seed(derive_named(cfg.seed, "classifier")), |i, out| {
        class_cross_entropy(data_all[i].y, classes, out)
    })?;
    let flags = expert_flags(data_l)?;
    let xs = features(data_l);
    fit(&mut expert_head, &xs, &cfg.with_seed(derive_named(cfg.seed, "expert")), |i, out| {
        let (l, g) = logistic_loss(out[0], flags[i]);
        (l, vec![g])
    })?;
    Ok(StagedSystem { classes, classifier, expert_head })
}

/// Pre-trains the class heads on `data_u` (expert predictions ignored),
/// then fine-tunes every head with the deferral cross-entropy on `data_l`.
pub fn train_joint_semisupervised(
    mut model: ScoreModel,
    data_u: &[Sample],
    data_l: &[Sample],
    cfg: &TrainConfig,
) -> Result<ScoreModel> {
    if data_u.is_empty() || data_l.is_empty() {
        return Err(Error::EmptyData);
    }
    let classes = model.classes;
    check_labels(data_u, classes)?;
    let xs = features(data_u);
    fit(&mut model.network, &xs, &cfg.with_seed(derive_seed(cfg.seed, 1)), |i, out| {
        class_cross_entropy(data_u[i].y, classes, out)
    })?;
    train_joint(model, data_l, &cfg.with_seed(derive_seed(cfg.seed, 2)))
}

/// A score model read through the `(K+1)`-action decoding rule.
#[derive(Clone, Debug, PartialEq)]
pub struct DecodedModel {
    pub model: ScoreModel,
}

impl DecodedModel {
    fn decision(&self, x: &[f64]) -> (Label, bool) {
        let action = self.model.scores(x).predict();
        decode_pair(action, self.model.classes).expect("argmax lies in 1..=K+1")
    }
}

impl DeferralSystem for DecodedModel {
    fn classify(&self, x: &[f64]) -> Label {
        self.decision(x).0
    }

    fn defers(&self, x: &[f64]) -> bool {
        self.decision(x).1
    }
}

pub fn decode_model(model: ScoreModel) -> DecodedModel {
    DecodedModel { model }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deferral::deferral_loss_01;
    use crate::worlds::{make_fig4_world, sample_labeled, World};

    fn fig4_cfg(seed: u64) -> TrainConfig {
        TrainConfig { learning_rate: 1.0, epochs: 300, batch_size: 50, seed, ..Default::default() }
    }

    fn numeric_param_grad(net: &Network, x: &[f64], g_out: &[f64]) -> Vec<f64> {
        let h = 1e-6;
        (0..net.params.len())
            .map(|p| {
                let mut up = net.clone();
                let mut down = net.clone();
                up.params[p] += h;
                down.params[p] -= h;
                let dot = |n: &Network| n.forward(x).iter().zip(g_out).map(|(a, b)| a * b).sum::<f64>();
                (dot(&up) - dot(&down)) / (2.0 * h)
            })
            .collect()
    }

    #[test]
    fn backward_matches_finite_differences() {
        for arch in [
            Architecture::Linear,
            Architecture::Mlp { hidden: 5, activation: Activation::Tanh },
            Architecture::Mlp { hidden: 4, activation: Activation::Relu },
        ] {
            let net = Network::new(arch, 3, 4, 0.8, 11);
            let x = [0.3, -1.2, 0.7];
            let g_out = [0.5, -1.0, 0.25, 2.0];
            let (_, cache) = net.forward_cached(&x);
            let mut grad = vec![0.0; net.params.len()];
            net.backward(&x, &cache, &g_out, &mut grad);
            for (a, b) in grad.iter().zip(numeric_param_grad(&net, &x, &g_out)) {
                assert!((a - b).abs() < 1e-6, "{arch:?}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn zero_epochs_leave_parameters_unchanged() {
        let data = sample_labeled(&make_fig4_world(), 20, 1).unwrap();
        let cfg = TrainConfig { epochs: 0, ..fig4_cfg(1) };
        let model = ScoreModel::new(Architecture::Linear, 1, 2, &cfg);
        let trained = train_joint(model.clone(), &data, &cfg).unwrap();
        assert_eq!(trained, model);
    }

    #[test]
    fn single_sample_is_memorized() {
        let data = vec![Sample::new(vec![0.5], 2, Some(1))];
        let cfg = TrainConfig { learning_rate: 0.5, epochs: 500, batch_size: 1, seed: 3, ..Default::default() };
        let model = train_joint(ScoreModel::new(Architecture::Linear, 1, 2, &cfg), &data, &cfg).unwrap();
        assert!(mean_lce(&model, &data).unwrap() < 1e-2);
    }

    #[test]
    fn errors_on_bad_input() {
        let cfg = fig4_cfg(0);
        let model = ScoreModel::new(Architecture::Linear, 1, 2, &cfg);
        assert!(matches!(train_joint(model.clone(), &[], &cfg), Err(Error::EmptyData)));
        let no_m = vec![Sample::new(vec![0.1], 1, None)];
        assert!(matches!(train_joint(model.clone(), &no_m, &cfg), Err(Error::MissingExpertLabel { index: 0 })));
        let some = vec![Sample::new(vec![0.1], 1, Some(1))];
        assert!(matches!(
            train_joint_semisupervised(model.clone(), &some, &[], &cfg),
            Err(Error::EmptyData)
        ));
        let bad = TrainConfig { learning_rate: -1.0, ..cfg };
        assert!(matches!(train_joint(model, &some, &bad), Err(Error::Config(_))));
    }

    #[test]
    fn divergence_is_reported() {
        let data = sample_labeled(&make_fig4_world(), 50, 2).unwrap();
        let data: Vec<Sample> = data.into_iter().map(|mut s| {
            s.x[0] *= 1e4;
            s
        }).collect();
        let cfg = TrainConfig { learning_rate: 100.0, epochs: 50, batch_size: 50, seed: 0, ..Default::default() };
        let model = ScoreModel::new(Architecture::Linear, 1, 2, &cfg);
        assert!(matches!(train_joint(model, &data, &cfg), Err(Error::Divergence { .. })));
    }

    #[test]
    fn full_batch_losses_do_not_increase() {
        let data = sample_labeled(&make_fig4_world(), 300, 5).unwrap();
        let cfg = TrainConfig { learning_rate: 1e-3, epochs: 200, batch_size: 300, seed: 5, ..Default::default() };
        let model = ScoreModel::new(Architecture::Linear, 1, 2, &cfg);
        let (_, history) = train_joint_with_history(model, &data, &cfg).unwrap();
        for w in history.epoch_losses.windows(2) {
            assert!(w[1] <= w[0] + 1e-9, "{} -> {}", w[0], w[1]);
        }
    }

    #[test]
    fn full_batch_training_is_bit_reproducible() {
        let data = sample_labeled(&make_fig4_world(), 100, 8).unwrap();
        let cfg = TrainConfig { learning_rate: 0.5, epochs: 30, batch_size: 100, seed: 8, ..Default::default() };
        let a = train_joint(ScoreModel::new(Architecture::Linear, 1, 2, &cfg), &data, &cfg).unwrap();
        let b = train_joint(ScoreModel::new(Architecture::Linear, 1, 2, &cfg), &data, &cfg).unwrap();
        assert_eq!(a.network.params, b.network.params);
    }

    #[test]
    fn joint_on_fig4_reaches_low_risk() {
        let w = make_fig4_world();
        let data = sample_labeled(&w, 2000, 21).unwrap();
        let cfg = fig4_cfg(21);
        let model = train_joint(ScoreModel::new(Architecture::Linear, 1, 2, &cfg), &data, &cfg).unwrap();
        let sys = decode_model(model);
        let risk = w.exact_risk(&sys).unwrap();
        assert!(risk <= 0.05, "{risk}");
        let test = sample_labeled(&w, 10_000, 22).unwrap();
        assert!(deferral_loss_01(&sys, &test).unwrap() <= 0.05);
    }

    #[test]
    fn joint_fits_small_training_set_exactly() {
        let w = make_fig4_world();
        let data = sample_labeled(&w, 200, 4).unwrap();
        let cfg = TrainConfig { learning_rate: 10.0, epochs: 20_000, batch_size: 200, seed: 4, ..Default::default() };
        let model = train_joint(ScoreModel::new(Architecture::Linear, 1, 2, &cfg), &data, &cfg).unwrap();
        assert_eq!(deferral_loss_01(&decode_model(model), &data).unwrap(), 0.0);
    }

    #[test]
    fn staged_defers_on_the_noise_region() {
        let w = make_fig4_world();
        let data = sample_labeled(&w, 1000, 6).unwrap();
        let cfg = fig4_cfg(6);
        let sys = train_staged(
            Network::new(Architecture::Linear, 1, 2, 0.1, 1),
            Network::new(Architecture::Linear, 1, 1, 0.1, 2),
            &data,
            &data,
            &cfg,
        )
        .unwrap();
        for x in [0.05, 0.15, 0.2] {
            assert!(sys.defers(&[x]), "should defer at {x}");
        }
        for x in [0.4, 0.6, 0.9] {
            assert!(!sys.defers(&[x]), "should not defer at {x}");
            assert_eq!(sys.classify(&[x]), 2);
        }
    }

    #[test]
    fn staged_never_defers_to_a_wrong_expert() {
        let w = make_fig4_world();
        let data: Vec<Sample> = sample_labeled(&w, 300, 7)
            .unwrap()
            .into_iter()
            .map(|s| {
                let m = 3 - s.y;
                Sample::new(s.x, s.y, Some(m))
            })
            .collect();
        let cfg = fig4_cfg(7);
        let sys = train_staged(
            Network::new(Architecture::Linear, 1, 2, 0.1, 1),
            Network::new(Architecture::Linear, 1, 1, 0.1, 2),
            &data,
            &data,
            &cfg,
        )
        .unwrap();
        assert!((0..=100).all(|i| !sys.defers(&[i as f64 / 100.0])));
    }

    #[test]
    fn decoding_matches_argmax_oracle() {
        let cfg = TrainConfig { weight_init_scale: 2.0, seed: 13, ..Default::default() };
        let model = ScoreModel::new(Architecture::Mlp { hidden: 6, activation: Activation::Tanh }, 2, 3, &cfg);
        let sys = decode_model(model.clone());
        let mut rng = rng_from(1);
        for _ in 0..100 {
            let x = [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)];
            let s = model.network.forward(&x);
            let best = (0..4).fold(0, |b, i| if s[i] > s[b] { i } else { b });
            assert_eq!(sys.defers(&x), best == 3);
            assert_eq!(sys.classify(&x), if best == 3 { 1 } else { best + 1 });
        }
        let always = ScoreModel {
            classes: 2,
            network: Network { arch: Architecture::Linear, input_dim: 1, outputs: 3, params: vec![0.0, 0.0, 0.0, 0.0, 0.0, 1.0] },
        };
        assert!(decode_model(always).defers(&[0.7]));
        let two = ScoreModel {
            classes: 2,
            network: Network { arch: Architecture::Linear, input_dim: 1, outputs: 3, params: vec![0.0, 0.0, 0.0, 0.0, 1.0, 0.0] },
        };
        let sys = decode_model(two);
        assert_eq!((sys.classify(&[0.2]), sys.defers(&[0.2])), (2, false));
    }

    #[test]
    fn model_json_roundtrip() {
        let cfg = TrainConfig::default();
        let model = ScoreModel::new(Architecture::Mlp { hidden: 3, activation: Activation::Relu }, 2, 2, &cfg);
        assert_eq!(ScoreModel::from_json(&model.to_json().unwrap()).unwrap(), model);
    }
}
