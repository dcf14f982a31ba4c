//! Deferral systems and their losses.
//!
//! Labels are 1-based (`1..=K`). In the `(K+1)`-action view used by the
//! surrogate losses, action `K + 1` means "defer to the expert".

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Class label in `1..=K`.
pub type Label = usize;

/// A feature vector with its target and, when the expert has labeled it,
/// the expert's prediction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub x: Vec<f64>,
    pub y: Label,
    pub m: Option<Label>,
}

impl Sample {
    pub fn new(x: Vec<f64>, y: Label, m: Option<Label>) -> Self {
        Self { x, y, m }
    }

    /// Copy of the sample with the expert prediction removed.
    pub fn without_expert(&self) -> Self {
        Self { x: self.x.clone(), y: self.y, m: None }
    }

    pub fn expert_correct(&self) -> Option<bool> {
        self.m.map(|m| m == self.y)
    }
}

/// Checks the dataset invariants: labels in `[1, K]` and constant feature
/// dimension.
pub fn validate_samples(data: &[Sample], classes: usize) -> Result<()> {
    let Some(first) = data.first() else {
        return Err(Error::EmptyData);
    };
    let dim = first.x.len();
    for s in data {
        if s.x.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: s.x.len() });
        }
        for label in std::iter::once(s.y).chain(s.m) {
            if label == 0 || label > classes {
                return Err(Error::InvalidLabel { label, classes });
            }
        }
    }
    Ok(())
}

/// A classifier paired with a rejector.
///
/// `classify` is only meaningful where `defers` is false; callers must not
/// read it on deferred points.
pub trait DeferralSystem {
    fn classify(&self, x: &[f64]) -> Label;
    fn defers(&self, x: &[f64]) -> bool;
}

impl<T: DeferralSystem + ?Sized> DeferralSystem for &T {
    fn classify(&self, x: &[f64]) -> Label {
        (**self).classify(x)
    }

    fn defers(&self, x: &[f64]) -> bool {
        (**self).defers(x)
    }
}

/// Deferral system built from two closures.
pub struct FnSystem<H, R> {
    pub h: H,
    pub r: R,
}

impl<H, R> FnSystem<H, R>
where
    H: Fn(&[f64]) -> Label,
    R: Fn(&[f64]) -> bool,
{
    pub fn new(h: H, r: R) -> Self {
        Self { h, r }
    }
}

impl<H, R> DeferralSystem for FnSystem<H, R>
where
    H: Fn(&[f64]) -> Label,
    R: Fn(&[f64]) -> bool,
{
    fn classify(&self, x: &[f64]) -> Label {
        (self.h)(x)
    }

    fn defers(&self, x: &[f64]) -> bool {
        (self.r)(x)
    }
}

type PenaltyFn = Box<dyn Fn(&[f64], Label, Label) -> f64 + Send + Sync>;

/// Extra penalties added on top of the 0-1 deferral loss.
///
/// `c_exp(x, y, m)` is charged when deferring, `c_ai(x, y, h(x))` when
/// predicting. With both identically zero the general loss reduces to the
/// 0-1 deferral loss.
pub struct CostSpec {
    c_exp: PenaltyFn,
    c_ai: PenaltyFn,
}

impl CostSpec {
    pub fn new<E, A>(c_exp: E, c_ai: A) -> Self
    where
        E: Fn(&[f64], Label, Label) -> f64 + Send + Sync + 'static,
        A: Fn(&[f64], Label, Label) -> f64 + Send + Sync + 'static,
    {
        Self { c_exp: Box::new(c_exp), c_ai: Box::new(c_ai) }
    }

    pub fn zero() -> Self {
        Self::new(|_, _, _| 0.0, |_, _, _| 0.0)
    }

    pub fn expert_penalty(&self, x: &[f64], y: Label, m: Label) -> Result<f64> {
        check_penalty((self.c_exp)(x, y, m), "c_exp")
    }

    pub fn prediction_penalty(&self, x: &[f64], y: Label, prediction: Label) -> Result<f64> {
        check_penalty((self.c_ai)(x, y, prediction), "c_ai")
    }
}

fn check_penalty(value: f64, name: &str) -> Result<f64> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidCost(format!("{name} returned {value}")))
    }
}

fn indicator(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

/// Empirical 0-1 deferral loss
/// `(1/n) Σ [ I{h(x)≠y} I{r(x)=0} + I{m≠y} I{r(x)=1} ]`.
pub fn deferral_loss_01<S: DeferralSystem + ?Sized>(system: &S, data: &[Sample]) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::EmptyData);
    }
    let mut total = 0.0;
    for (index, s) in data.iter().enumerate() {
        total += if system.defers(&s.x) {
            let m = s.m.ok_or(Error::MissingExpertLabel { index })?;
            indicator(m != s.y)
        } else {
            indicator(system.classify(&s.x) != s.y)
        };
    }
    Ok(total / data.len() as f64)
}

/// Empirical deferral loss with additional penalties.
///
/// Accumulates in the same order as [`deferral_loss_01`], so a zero
/// [`CostSpec`] gives a bitwise identical result.
pub fn deferral_loss_general<S: DeferralSystem + ?Sized>(
    system: &S,
    data: &[Sample],
    costs: &CostSpec,
) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::EmptyData);
    }
    let mut total = 0.0;
    for (index, s) in data.iter().enumerate() {
        total += if system.defers(&s.x) {
            let m = s.m.ok_or(Error::MissingExpertLabel { index })?;
            indicator(m != s.y) + costs.expert_penalty(&s.x, s.y, m)?
        } else {
            let prediction = system.classify(&s.x);
            indicator(prediction != s.y) + costs.prediction_penalty(&s.x, s.y, prediction)?
        };
    }
    Ok(total / data.len() as f64)
}

/// Decodes a `(K+1)`-way prediction into `(h(x), r(x))`.
///
/// `i <= K` predicts class `i`; `K + 1` defers, with the classifier output
/// fixed to the placeholder class 1.
pub fn decode_pair(prediction: usize, classes: usize) -> Result<(Label, bool)> {
    match prediction {
        p if p >= 1 && p <= classes => Ok((p, false)),
        p if p == classes + 1 => Ok((1, true)),
        p => Err(Error::OutOfRange { value: p, min: 1, max: classes + 1 }),
    }
}

/// Inverse of [`decode_pair`] on the prediction side.
pub fn encode_action(label: Label, defer: bool, classes: usize) -> usize {
    if defer {
        classes + 1
    } else {
        label
    }
}

const PROB_TOL: f64 = 1e-12;

/// One support point of an [`AtomicWorld`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtomicPoint {
    pub x: Vec<f64>,
    pub mass: f64,
    /// `p(y | x)` for `y = 1..=K`.
    pub labels: Vec<f64>,
    /// `expert[y-1][m-1] = p(m | x, y)`.
    pub expert: Vec<Vec<f64>>,
}

impl AtomicPoint {
    /// Probability that the expert is wrong at this point.
    pub fn expert_error(&self) -> f64 {
        let mut err = 0.0;
        for (yi, py) in self.labels.iter().enumerate() {
            for (mi, pm) in self.expert[yi].iter().enumerate() {
                if mi != yi {
                    err += py * pm;
                }
            }
        }
        err
    }

    /// Probability that predicting `label` is wrong at this point.
    pub fn classifier_error(&self, label: Label) -> f64 {
        1.0 - self.labels[label - 1]
    }

    /// Joint `p(y, m | x)` as `(y, m, p)` triples in index order.
    pub fn outcomes(&self) -> impl Iterator<Item = (Label, Label, f64)> + '_ {
        self.labels.iter().enumerate().flat_map(move |(yi, py)| {
            self.expert[yi]
                .iter()
                .enumerate()
                .map(move |(mi, pm)| (yi + 1, mi + 1, py * pm))
        })
    }
}

/// Finite-support joint distribution of `(X, Y, M)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AtomicWorld {
    classes: usize,
    points: Vec<AtomicPoint>,
}

#[derive(Deserialize)]
struct RawAtomicWorld {
    classes: usize,
    points: Vec<AtomicPoint>,
}

impl<'de> Deserialize<'de> for AtomicWorld {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawAtomicWorld::deserialize(d)?;
        AtomicWorld::new(raw.classes, raw.points).map_err(serde::de::Error::custom)
    }
}

fn check_distribution(p: &[f64], what: &str) -> Result<()> {
    if p.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::InvalidWorld(format!("{what} has a negative or non-finite entry")));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > PROB_TOL {
        return Err(Error::InvalidWorld(format!("{what} sums to {sum}")));
    }
    Ok(())
}

impl AtomicWorld {
    pub fn new(classes: usize, points: Vec<AtomicPoint>) -> Result<Self> {
        if classes < 2 {
            return Err(Error::InvalidWorld("need at least two classes".into()));
        }
        let Some(first) = points.first() else {
            return Err(Error::InvalidWorld("empty support".into()));
        };
        let dim = first.x.len();
        if dim == 0 {
            return Err(Error::InvalidWorld("feature dimension must be at least 1".into()));
        }
        for (i, p) in points.iter().enumerate() {
            if p.x.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: p.x.len() });
            }
            if !p.mass.is_finite() || p.mass <= 0.0 {
                return Err(Error::InvalidWorld(format!("point {i} has mass {}", p.mass)));
            }
            if p.labels.len() != classes || p.expert.len() != classes {
                return Err(Error::InvalidWorld(format!("point {i} has wrong class count")));
            }
            check_distribution(&p.labels, &format!("label distribution of point {i}"))?;
            for (y, row) in p.expert.iter().enumerate() {
                if row.len() != classes {
                    return Err(Error::InvalidWorld(format!("point {i} expert row {y} has wrong length")));
                }
                check_distribution(row, &format!("expert distribution of point {i}, label {}", y + 1))?;
            }
            if points[..i].iter().any(|q| q.x == p.x) {
                return Err(Error::InvalidWorld(format!("duplicate support point {:?}", p.x)));
            }
        }
        let masses: Vec<f64> = points.iter().map(|p| p.mass).collect();
        check_distribution(&masses, "point masses")?;
        Ok(Self { classes, points })
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn points(&self) -> &[AtomicPoint] {
        &self.points
    }

    pub fn support(&self) -> Vec<Vec<f64>> {
        self.points.iter().map(|p| p.x.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Exact 0-1 deferral risk on a finite-support world.
///
/// Sums in support order with no sampling, so the result is bit-reproducible.
pub fn exact_deferral_risk<S: DeferralSystem + ?Sized>(system: &S, world: &AtomicWorld) -> f64 {
    let mut risk = 0.0;
    for p in world.points() {
        let loss = if system.defers(&p.x) {
            p.expert_error()
        } else {
            p.classifier_error(system.classify(&p.x))
        };
        risk += p.mass * loss;
    }
    risk
}
