//! Synthetic joint distributions of features, targets and expert predictions.
//!
//! Sampling is keyed by `(seed, sample index)`: each sample draws its
//! features, then its target, then the expert prediction from its own
//! substream. Labeled and unlabeled draws with the same seed therefore share
//! features and targets exactly.

use std::sync::Arc;

use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::deferral::{AtomicPoint, AtomicWorld, DeferralSystem, Label, Sample};
use crate::error::{Error, Result};
use crate::hypotheses::FiniteClass;
use crate::seeds::{child_rng, rng_from, Rng};

/// A joint distribution `μ_XYM` that can be sampled.
pub trait World: Send + Sync {
    fn classes(&self) -> usize;

    fn dim(&self) -> usize;

    /// One draw of `(x, y, m)`.
    fn draw(&self, rng: &mut Rng) -> (Vec<f64>, Label, Label);

    /// Exact (or fine-grid) 0-1 deferral risk when the world supports it.
    fn exact_risk(&self, _system: &dyn DeferralSystem) -> Option<f64> {
        None
    }
}

/// Draws the `index`-th sample of the stream keyed by `seed`.
pub fn draw_indexed<W: World + ?Sized>(world: &W, seed: u64, index: u64) -> (Vec<f64>, Label, Label) {
    world.draw(&mut child_rng(seed, index))
}

/// `n` i.i.d. samples with expert predictions.
pub fn sample_labeled<W: World + ?Sized>(world: &W, n: usize, seed: u64) -> Result<Vec<Sample>> {
    if n == 0 {
        return Err(Error::EmptyData);
    }
    Ok((0..n as u64)
        .map(|i| {
            let (x, y, m) = draw_indexed(world, seed, i);
            Sample::new(x, y, Some(m))
        })
        .collect())
}

/// `n` i.i.d. samples without expert predictions; features and targets match
/// [`sample_labeled`] for the same seed.
pub fn sample_unlabeled<W: World + ?Sized>(world: &W, n: usize, seed: u64) -> Result<Vec<Sample>> {
    Ok(sample_labeled(world, n, seed)?
        .into_iter()
        .map(|mut s| {
            s.m = None;
            s
        })
        .collect())
}

fn sample_categorical(p: &[f64], rng: &mut Rng) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last = 0;
    for (i, pi) in p.iter().enumerate() {
        if *pi > 0.0 {
            acc += pi;
            last = i;
            if u < acc {
                return i;
            }
        }
    }
    last
}

impl World for AtomicWorld {
    fn classes(&self) -> usize {
        AtomicWorld::classes(self)
    }

    fn dim(&self) -> usize {
        self.points()[0].x.len()
    }

    fn draw(&self, rng: &mut Rng) -> (Vec<f64>, Label, Label) {
        let masses: Vec<f64> = self.points().iter().map(|p| p.mass).collect();
        let p = &self.points()[sample_categorical(&masses, rng)];
        let y = sample_categorical(&p.labels, rng) + 1;
        let m = sample_categorical(&p.expert[y - 1], rng) + 1;
        (p.x.clone(), y, m)
    }

    fn exact_risk(&self, system: &dyn DeferralSystem) -> Option<f64> {
        Some(crate::deferral::exact_deferral_risk(system, self))
    }
}

/// Subset of the feature/label space on which an expert behaves a given way.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Region {
    Everywhere,
    Nowhere,
    /// `x[feature] <= cut`
    FeatureAtMost { feature: usize, cut: f64 },
    /// `x[feature] > cut`
    FeatureAbove { feature: usize, cut: f64 },
    /// Target is one of the listed classes.
    Labels { labels: Vec<Label> },
}

impl Region {
    pub fn contains(&self, x: &[f64], y: Label) -> bool {
        match self {
            Region::Everywhere => true,
            Region::Nowhere => false,
            Region::FeatureAtMost { feature, cut } => x[*feature] <= *cut,
            Region::FeatureAbove { feature, cut } => x[*feature] > *cut,
            Region::Labels { labels } => labels.contains(&y),
        }
    }
}

/// Simulated human expert.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExpertModel {
    /// Correct inside `region`, uniformly random over all classes outside.
    RegionPerfect { region: Region },
    /// Always predicts `label`.
    AlwaysConstant { label: Label },
    /// Correct with probability `accuracy`, otherwise uniform over the other
    /// classes.
    NoisyOracle { accuracy: f64 },
}

impl ExpertModel {
    pub fn predict(&self, x: &[f64], y: Label, classes: usize, rng: &mut Rng) -> Label {
        match self {
            ExpertModel::RegionPerfect { region } => {
                if region.contains(x, y) {
                    y
                } else {
                    rng.random_range(1..=classes)
                }
            }
            ExpertModel::AlwaysConstant { label } => *label,
            ExpertModel::NoisyOracle { accuracy } => {
                if rng.random_bool(accuracy.clamp(0.0, 1.0)) {
                    y
                } else {
                    let other = rng.random_range(1..classes);
                    if other >= y {
                        other + 1
                    } else {
                        other
                    }
                }
            }
        }
    }

    /// `P(M != Y | x, y)`.
    pub fn error_probability(&self, x: &[f64], y: Label, classes: usize) -> f64 {
        match self {
            ExpertModel::RegionPerfect { region } => {
                if region.contains(x, y) {
                    0.0
                } else {
                    1.0 - 1.0 / classes as f64
                }
            }
            ExpertModel::AlwaysConstant { label } => {
                if *label == y {
                    0.0
                } else {
                    1.0
                }
            }
            ExpertModel::NoisyOracle { accuracy } => 1.0 - accuracy,
        }
    }
}

/// Feature law of a [`ContinuousWorld`].
#[derive(Clone, Debug, PartialEq)]
pub enum FeatureLaw {
    /// Uniform on `[0, 1]`.
    UnitInterval,
    /// Uniform on `[0, 1]^dim`.
    UnitCube { dim: usize },
}

impl FeatureLaw {
    pub fn dim(&self) -> usize {
        match self {
            FeatureLaw::UnitInterval => 1,
            FeatureLaw::UnitCube { dim } => *dim,
        }
    }

    fn sample(&self, rng: &mut Rng) -> Vec<f64> {
        (0..self.dim()).map(|_| rng.random::<f64>()).collect()
    }
}

/// Pointwise conditional law: `p(y | x)` and `P(M != Y | x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PointConditional {
    pub labels: Vec<f64>,
    pub expert_error: f64,
}

type LabelRule = Arc<dyn Fn(&[f64], &mut Rng) -> Label + Send + Sync>;
type ExpertRule = Arc<dyn Fn(&[f64], Label, &mut Rng) -> Label + Send + Sync>;
type ConditionalFn = Arc<dyn Fn(&[f64]) -> PointConditional + Send + Sync>;

/// Sampler-form world: features from a [`FeatureLaw`], then a label rule,
/// then an expert rule.
#[derive(Clone)]
pub struct ContinuousWorld {
    classes: usize,
    features: FeatureLaw,
    label_rule: LabelRule,
    expert_rule: ExpertRule,
    conditional: Option<ConditionalFn>,
}

impl std::fmt::Debug for ContinuousWorld {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ContinuousWorld")
            .field("classes", &self.classes)
            .field("features", &self.features)
            .field("has_conditional", &self.conditional.is_some())
            .finish()
    }
}

impl ContinuousWorld {
    pub fn new<L, E>(classes: usize, features: FeatureLaw, label_rule: L, expert_rule: E) -> Self
    where
        L: Fn(&[f64], &mut Rng) -> Label + Send + Sync + 'static,
        E: Fn(&[f64], Label, &mut Rng) -> Label + Send + Sync + 'static,
    {
        Self {
            classes,
            features,
            label_rule: Arc::new(label_rule),
            expert_rule: Arc::new(expert_rule),
            conditional: None,
        }
    }

    /// Same world with the expert replaced by a simulated [`ExpertModel`].
    pub fn with_expert(mut self, expert: ExpertModel) -> Self {
        let classes = self.classes;
        self.expert_rule = Arc::new(move |x, y, rng| expert.predict(x, y, classes, rng));
        self.conditional = None;
        self
    }

    /// Attach the closed-form conditional law, enabling [`World::exact_risk`]
    /// by quadrature on one-dimensional unit-interval worlds.
    pub fn with_conditional<C>(mut self, conditional: C) -> Self
    where
        C: Fn(&[f64]) -> PointConditional + Send + Sync + 'static,
    {
        self.conditional = Some(Arc::new(conditional));
        self
    }

    pub fn features(&self) -> &FeatureLaw {
        &self.features
    }

    pub fn conditional(&self, x: &[f64]) -> Option<PointConditional> {
        self.conditional.as_ref().map(|c| c(x))
    }

    /// Midpoint-rule risk on `cells` equal cells of `[0, 1]`.
    pub fn grid_risk(&self, system: &dyn DeferralSystem, cells: usize) -> Option<f64> {
        let cond = self.conditional.as_ref()?;
        if self.features != FeatureLaw::UnitInterval || cells == 0 {
            return None;
        }
        let mut total = 0.0;
        for j in 0..cells {
            let x = [(j as f64 + 0.5) / cells as f64];
            let c = cond(&x);
            total += if system.defers(&x) {
                c.expert_error
            } else {
                1.0 - c.labels[system.classify(&x) - 1]
            };
        }
        Some(total / cells as f64)
    }
}

/// Cells used by [`World::exact_risk`] for unit-interval worlds. Cut points
/// on a 1/100 grid fall on cell boundaries, so threshold systems are
/// integrated exactly.
pub const GRID_CELLS: usize = 100_000;

impl World for ContinuousWorld {
    fn classes(&self) -> usize {
        self.classes
    }

    fn dim(&self) -> usize {
        self.features.dim()
    }

    fn draw(&self, rng: &mut Rng) -> (Vec<f64>, Label, Label) {
        let x = self.features.sample(rng);
        let y = (self.label_rule)(&x, rng);
        let m = (self.expert_rule)(&x, y, rng);
        (x, y, m)
    }

    fn exact_risk(&self, system: &dyn DeferralSystem) -> Option<f64> {
        self.grid_risk(system, GRID_CELLS)
    }
}

/// Boundary of the informative region of the threshold world.
pub const FIG4_BOUNDARY: f64 = 0.3;

/// Negative and positive classes of the binary worlds.
pub const NEGATIVE: Label = 1;
pub const POSITIVE: Label = 2;

/// The one-dimensional threshold world.
///
/// `x ~ U[0, 1]`. For `x > 0.3` the target is positive and the expert is
/// always wrong; for `x <= 0.3` the target is a fair coin (redrawn on every
/// sample) and the expert is always right.
pub fn make_fig4_world() -> ContinuousWorld {
    ContinuousWorld::new(
        2,
        FeatureLaw::UnitInterval,
        |x, rng| {
            if x[0] > FIG4_BOUNDARY || rng.random_bool(0.5) {
                POSITIVE
            } else {
                NEGATIVE
            }
        },
        |x, y, _| if x[0] <= FIG4_BOUNDARY { y } else { 3 - y },
    )
    .with_conditional(|x| {
        if x[0] > FIG4_BOUNDARY {
            PointConditional { labels: vec![0.0, 1.0], expert_error: 1.0 }
        } else {
            PointConditional { labels: vec![0.5, 0.5], expert_error: 0.0 }
        }
    })
}

/// Support points `1, 2, ..., d+1` used by the VC-gap construction.
pub fn theorem1_support(d: usize) -> Vec<Vec<f64>> {
    (1..=d + 1).map(|i| vec![i as f64]).collect()
}

/// The VC-gap construction on `d + 1` points.
///
/// Masses are `(1+ε)/(d+1)` on the first point, `1/(d+1)` on the middle
/// points and `(1-ε)/(d+1)` on the last. Targets are the first labeling in
/// lexicographic order over `{1,2}^(d+1)` that no member of `class_h` fits.
/// The expert is right on the first point and wrong everywhere else.
pub fn make_theorem1_world(d: usize, eps: f64, class_h: &FiniteClass) -> Result<AtomicWorld> {
    if d == 0 {
        return Err(Error::ConstructionFailed("d must be positive".into()));
    }
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::ConstructionFailed(format!("eps {eps} outside [0, 1)")));
    }
    let support = theorem1_support(d);
    let n = d + 1;
    let outputs: Vec<Vec<usize>> = class_h
        .members()
        .iter()
        .map(|h| support.iter().map(|x| h.eval(x)).collect())
        .collect();
    let labeling = (0..1u64 << n)
        .map(|code| {
            (0..n)
                .map(|i| if code >> (n - 1 - i) & 1 == 1 { POSITIVE } else { NEGATIVE })
                .collect::<Vec<_>>()
        })
        .find(|labels| !outputs.iter().any(|o| o == labels))
        .ok_or_else(|| {
            Error::ConstructionFailed(format!("every labeling of {n} points is fitted by the class"))
        })?;

    let points = support
        .into_iter()
        .zip(labeling)
        .enumerate()
        .map(|(i, (x, y))| {
            let mass = if i == 0 {
                (1.0 + eps) / n as f64
            } else if i == d {
                (1.0 - eps) / n as f64
            } else {
                1.0 / n as f64
            };
            let mut labels = vec![0.0; 2];
            labels[y - 1] = 1.0;
            let m = if i == 0 { y } else { 3 - y };
            let mut row = vec![0.0; 2];
            row[m - 1] = 1.0;
            // Rows for the impossible label are unused; keep them valid.
            let expert = (1..=2).map(|yy| if yy == y { row.clone() } else { one_hot(yy, 2) }).collect();
            AtomicPoint { x, mass, labels, expert }
        })
        .collect();
    AtomicWorld::new(2, points)
}

fn one_hot(label: Label, classes: usize) -> Vec<f64> {
    let mut v = vec![0.0; classes];
    v[label - 1] = 1.0;
    v
}

/// Two-point world on which rejector disagreement never shrinks, with its
/// two-member classifier and rejector classes.
#[derive(Clone, Debug)]
pub struct CalCounterexample {
    pub world: AtomicWorld,
    /// `[h1(x) = x, h2(x) = 0]`, binary values encoded as classes `{1, 2}`.
    pub classifiers: FiniteClass,
    /// `[r1(x) = x, r2(x) = 0]`.
    pub rejectors: FiniteClass,
}

/// `X` uniform on `{0, 1}`, `Y = X`, expert always correct.
pub fn make_cal_counterexample_world() -> CalCounterexample {
    let points = (0..2)
        .map(|x| {
            let y = x + 1;
            AtomicPoint {
                x: vec![x as f64],
                mass: 0.5,
                labels: one_hot(y, 2),
                expert: vec![one_hot(1, 2), one_hot(2, 2)],
            }
        })
        .collect();
    let world = AtomicWorld::new(2, points).expect("valid construction");
    let support = world.support();
    let classifiers = FiniteClass::lookup_tables(support.clone(), vec![vec![1, 2], vec![1, 1]], 1);
    let rejectors = FiniteClass::lookup_tables(support, vec![vec![0, 1], vec![0, 0]], 0);
    CalCounterexample { world, classifiers, rejectors }
}

/// Uniform draw from the probability simplex (Dirichlet(1)).
pub fn random_simplex(len: usize, rng: &mut Rng) -> Vec<f64> {
    let raw: Vec<f64> = (0..len).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let sum: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / sum).collect()
}

/// Random atomic world on scalar support `0, 1, ..., support-1` with
/// Dirichlet(1) masses, label and expert distributions.
pub fn random_atomic_world(support: usize, classes: usize, rng: &mut Rng) -> AtomicWorld {
    let masses = random_simplex(support, rng);
    let points = masses
        .into_iter()
        .enumerate()
        .map(|(i, mass)| AtomicPoint {
            x: vec![i as f64],
            mass,
            labels: random_simplex(classes, rng),
            expert: (0..classes).map(|_| random_simplex(classes, rng)).collect(),
        })
        .collect();
    AtomicWorld::new(classes, points).expect("normalized construction")
}

/// Gaussian class-conditional world used for the labeled-fraction
/// experiments: `y` uniform over `K` classes, `x = μ_y + N(0, I)` with class
/// means drawn once from `N(0, spread² I)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MixtureWorld {
    classes: usize,
    means: Vec<Vec<f64>>,
    expert: ExpertModel,
}

impl MixtureWorld {
    pub fn new(classes: usize, dim: usize, spread: f64, expert: ExpertModel, seed: u64) -> Result<Self> {
        if classes < 2 || dim == 0 {
            return Err(Error::InvalidWorld("mixture needs K >= 2 and dim >= 1".into()));
        }
        let mut rng = rng_from(seed);
        let means = (0..classes)
            .map(|_| {
                (0..dim)
                    .map(|_| {
                        let z: f64 = StandardNormal.sample(&mut rng);
                        spread * z
                    })
                    .collect()
            })
            .collect();
        Ok(Self { classes, means, expert })
    }

    /// Expert perfect on the first half of the classes and uniformly random
    /// on the rest.
    pub fn half_perfect_expert(classes: usize) -> ExpertModel {
        ExpertModel::RegionPerfect {
            region: Region::Labels { labels: (1..=classes / 2).collect() },
        }
    }

    pub fn means(&self) -> &[Vec<f64>] {
        &self.means
    }

    pub fn expert(&self) -> &ExpertModel {
        &self.expert
    }
}

impl World for MixtureWorld {
    fn classes(&self) -> usize {
        self.classes
    }

    fn dim(&self) -> usize {
        self.means[0].len()
    }

    fn draw(&self, rng: &mut Rng) -> (Vec<f64>, Label, Label) {
        let y = rng.random_range(1..=self.classes);
        let x: Vec<f64> = self.means[y - 1]
            .iter()
            .map(|mu| {
                let z: f64 = StandardNormal.sample(rng);
                mu + z
            })
            .collect();
        let m = self.expert.predict(&x, y, self.classes, rng);
        (x, y, m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deferral::{exact_deferral_risk, FnSystem};
    use crate::hypotheses::{FiniteClass, Role};

    #[test]
    fn fig4_samples_shape_and_expert_pattern() {
        let w = make_fig4_world();
        let s = sample_labeled(&w, 5, 3).unwrap();
        assert_eq!(s.len(), 5);
        for smp in &s {
            assert!((0.0..=1.0).contains(&smp.x[0]));
            assert!(smp.y == 1 || smp.y == 2);
            assert!(smp.m.is_some());
        }
        let big = sample_labeled(&w, 20_000, 11).unwrap();
        let (mut above, mut above_wrong) = (0, 0);
        for smp in &big {
            if smp.x[0] <= 0.3 {
                assert_eq!(smp.m, Some(smp.y));
            } else {
                above += 1;
                above_wrong += usize::from(smp.m != Some(smp.y));
                assert_eq!(smp.y, POSITIVE);
            }
        }
        assert!(above > 0);
        assert_eq!(above_wrong, above);
    }

    #[test]
    fn unlabeled_stream_matches_labeled_features() {
        let w = make_fig4_world();
        assert!(matches!(sample_unlabeled(&w, 0, 1), Err(Error::EmptyData)));
        let l = sample_labeled(&w, 100, 99).unwrap();
        let u = sample_unlabeled(&w, 100, 99).unwrap();
        for (a, b) in l.iter().zip(&u) {
            assert_eq!(a.x, b.x);
            assert_eq!(a.y, b.y);
            assert!(b.m.is_none());
        }
        let mean = sample_unlabeled(&w, 10_000, 5).unwrap().iter().map(|s| s.x[0]).sum::<f64>() / 1e4;
        assert!((0.48..=0.52).contains(&mean), "mean {mean}");
    }

    #[test]
    fn fig4_label_rule() {
        let w = make_fig4_world();
        let mut rng = rng_from(1);
        assert_eq!((w.label_rule)(&[0.5], &mut rng), POSITIVE);
        assert_ne!((w.expert_rule)(&[0.5], POSITIVE, &mut rng), POSITIVE);
        let pos = (0..10_000).filter(|_| (w.label_rule)(&[0.1], &mut rng) == POSITIVE).count();
        let rate = pos as f64 / 1e4;
        assert!((0.47..=0.53).contains(&rate), "rate {rate}");
    }

    #[test]
    fn fig4_is_realizable_by_threshold_pair() {
        let w = make_fig4_world();
        let sys = FnSystem::new(|_: &[f64]| POSITIVE, |x: &[f64]| x[0] <= 0.3);
        assert_eq!(w.exact_risk(&sys), Some(0.0));
        let data = sample_labeled(&w, 100_000, 8).unwrap();
        assert_eq!(crate::deferral::deferral_loss_01(&sys, &data).unwrap(), 0.0);
        // Best pure classifier: positive everywhere, wrong on half the noise region.
        let classify = FnSystem::new(|_: &[f64]| POSITIVE, |_: &[f64]| false);
        assert!((w.exact_risk(&classify).unwrap() - 0.15).abs() < 1e-12);
    }

    #[test]
    fn theorem1_masses() {
        let h = FiniteClass::support_bounded(1, theorem1_support(1), Role::Classifier);
        let w = make_theorem1_world(1, 0.1, &h).unwrap();
        let masses: Vec<f64> = w.points().iter().map(|p| p.mass).collect();
        assert!((masses[0] - 0.55).abs() < 1e-15 && (masses[1] - 0.45).abs() < 1e-15);
        for d in 1..=3 {
            let h = FiniteClass::support_bounded(d, theorem1_support(d), Role::Classifier);
            let w = make_theorem1_world(d, 0.1, &h).unwrap();
            let total: f64 = w.points().iter().map(|p| p.mass).sum();
            assert!((total - 1.0).abs() < 1e-12);
            // Unfittable labeling for support-bounded classes: all positive.
            assert!(w.points().iter().all(|p| p.labels[1] == 1.0));
        }
        let h = FiniteClass::support_bounded(2, theorem1_support(2), Role::Classifier);
        let w = make_theorem1_world(2, 0.0, &h).unwrap();
        for p in w.points() {
            assert!((p.mass - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn theorem1_fails_when_every_labeling_fits() {
        let support = theorem1_support(1);
        let all = FiniteClass::support_bounded(2, support, Role::Classifier);
        assert!(matches!(make_theorem1_world(1, 0.1, &all), Err(Error::ConstructionFailed(_))));
    }

    #[test]
    fn cal_counterexample_risks() {
        let cx = make_cal_counterexample_world();
        let risk = |h: usize, r: usize| {
            let pair = cx.classifiers.pair(&cx.rejectors, h, r);
            exact_deferral_risk(&pair, &cx.world)
        };
        assert_eq!(risk(0, 0), 0.0);
        assert_eq!(risk(0, 1), 0.0);
        assert_eq!(risk(1, 0), 0.0);
        assert_eq!(risk(1, 1), 0.5);
    }

    #[test]
    fn atomic_sampling_matches_exact_risk() {
        let mut rng = rng_from(4);
        let w = random_atomic_world(4, 3, &mut rng);
        let sys = FnSystem::new(|x: &[f64]| (x[0] as usize % 3) + 1, |x: &[f64]| x[0] >= 2.0);
        let exact = w.exact_risk(&sys).unwrap();
        let n = 100_000;
        let data = sample_labeled(&w, n, 17).unwrap();
        let mc = crate::deferral::deferral_loss_01(&sys, &data).unwrap();
        assert!((mc - exact).abs() <= 3.0 * (0.25 / n as f64).sqrt(), "mc {mc} exact {exact}");
    }

    #[test]
    fn expert_models() {
        let mut rng = rng_from(2);
        let all = ExpertModel::RegionPerfect { region: Region::Everywhere };
        assert!((0..100).all(|i| all.predict(&[0.0], i % 3 + 1, 3, &mut rng) == i % 3 + 1));
        assert_eq!(all.error_probability(&[0.0], 1, 3), 0.0);
        let c = ExpertModel::AlwaysConstant { label: 2 };
        assert_eq!(c.predict(&[0.0], 1, 3, &mut rng), 2);
        let noisy = ExpertModel::NoisyOracle { accuracy: 0.8 };
        let hits = (0..20_000).filter(|_| noisy.predict(&[0.0], 2, 4, &mut rng) == 2).count();
        assert!((hits as f64 / 2e4 - 0.8).abs() < 0.015);
        for _ in 0..1000 {
            let m = noisy.predict(&[0.0], 4, 4, &mut rng);
            assert!((1..=4).contains(&m));
        }
    }

    #[test]
    fn mixture_world_is_reproducible() {
        let w = MixtureWorld::new(4, 3, 2.0, MixtureWorld::half_perfect_expert(4), 9).unwrap();
        let a = sample_labeled(&w, 50, 1).unwrap();
        let b = sample_labeled(&w, 50, 1).unwrap();
        assert_eq!(a, b);
        for s in &a {
            if s.y <= 2 {
                assert_eq!(s.m, Some(s.y));
            }
        }
    }
}
