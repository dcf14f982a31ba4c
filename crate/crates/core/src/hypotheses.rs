//! Enumerable hypothesis classes and exhaustive ERM.
//!
//! Every scan returns the lowest-index minimizer, so results are
//! deterministic and reproducible across runs and platforms.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::bits::Bits;
use crate::deferral::{AtomicWorld, DeferralSystem, Label, Sample};
use crate::error::{Error, Result};
use crate::seeds::rng_from;

/// Output convention of a class: classifiers emit labels `{1, 2}` on binary
/// problems, binary predictors (rejectors, expert-error predictors) emit
/// `{0, 1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Classifier,
    Binary,
}

impl Role {
    pub fn positive(self) -> usize {
        match self {
            Role::Classifier => 2,
            Role::Binary => 1,
        }
    }

    pub fn negative(self) -> usize {
        match self {
            Role::Classifier => 1,
            Role::Binary => 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// positive iff `x[0] > cut`
    PositiveAbove,
    /// positive iff `x[0] <= cut`
    PositiveAtOrBelow,
}

/// A single deterministic hypothesis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Rule {
    Constant { output: usize },
    /// `above` when `x[feature] > cut`, else `below`.
    Threshold { feature: usize, cut: f64, below: usize, above: usize },
    /// Exact-match lookup over a finite support; `default` elsewhere.
    Table { points: Vec<Vec<f64>>, outputs: Vec<usize>, default: usize },
}

impl Rule {
    pub fn eval(&self, x: &[f64]) -> usize {
        match self {
            Rule::Constant { output } => *output,
            Rule::Threshold { feature, cut, below, above } => {
                if x[*feature] > *cut {
                    *above
                } else {
                    *below
                }
            }
            Rule::Table { points, outputs, default } => points
                .iter()
                .position(|p| p.as_slice() == x)
                .map_or(*default, |i| outputs[i]),
        }
    }
}

/// How a class was built; also its JSON form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClassDescriptor {
    Thresholds { cuts: Vec<f64>, orientation: Orientation, role: Role },
    /// All functions positive on at most `d` of the candidate support points.
    SupportBounded { d: usize, support: Vec<Vec<f64>>, role: Role },
    /// Explicit per-support output tables.
    LookupTables { support: Vec<Vec<f64>>, tables: Vec<Vec<usize>>, default: usize },
}

/// Non-empty, ordered, finite hypothesis class.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ClassDescriptor", into = "ClassDescriptor")]
pub struct FiniteClass {
    descriptor: ClassDescriptor,
    members: Vec<Rule>,
}

impl TryFrom<ClassDescriptor> for FiniteClass {
    type Error = Error;

    fn try_from(d: ClassDescriptor) -> Result<Self> {
        let class = FiniteClass::from_descriptor(d);
        if class.members.is_empty() {
            return Err(Error::Config("hypothesis class has no members".into()));
        }
        Ok(class)
    }
}

impl From<FiniteClass> for ClassDescriptor {
    fn from(c: FiniteClass) -> Self {
        c.descriptor
    }
}

/// Indices of all subsets of `0..n` with at most `d` elements, ordered by size
/// then lexicographically.
fn bounded_subsets(n: usize, d: usize) -> Vec<Vec<usize>> {
    fn extend(start: usize, n: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            extend(i + 1, n, size, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    for size in 0..=d.min(n) {
        extend(0, n, size, &mut Vec::new(), &mut out);
    }
    out
}

impl FiniteClass {
    pub fn from_descriptor(descriptor: ClassDescriptor) -> Self {
        let members = match &descriptor {
            ClassDescriptor::Thresholds { cuts, orientation, role } => cuts
                .iter()
                .map(|&cut| {
                    let (below, above) = match orientation {
                        Orientation::PositiveAbove => (role.negative(), role.positive()),
                        Orientation::PositiveAtOrBelow => (role.positive(), role.negative()),
                    };
                    Rule::Threshold { feature: 0, cut, below, above }
                })
                .collect(),
            ClassDescriptor::SupportBounded { d, support, role } => bounded_subsets(support.len(), *d)
                .into_iter()
                .map(|subset| {
                    let mut outputs = vec![role.negative(); support.len()];
                    for i in subset {
                        outputs[i] = role.positive();
                    }
                    Rule::Table { points: support.clone(), outputs, default: role.negative() }
                })
                .collect(),
            ClassDescriptor::LookupTables { support, tables, default } => tables
                .iter()
                .map(|t| Rule::Table { points: support.clone(), outputs: t.clone(), default: *default })
                .collect(),
        };
        Self { descriptor, members }
    }

    pub fn thresholds(cuts: Vec<f64>, orientation: Orientation, role: Role) -> Self {
        Self::from_descriptor(ClassDescriptor::Thresholds { cuts, orientation, role })
    }

    /// `n` cuts at `0, 1/n, ..., (n-1)/n`.
    pub fn threshold_grid(n: usize, orientation: Orientation, role: Role) -> Self {
        Self::thresholds((0..n).map(|i| i as f64 / n as f64).collect(), orientation, role)
    }

    /// `n` cuts drawn uniformly from `[0, 1]`, sorted ascending.
    pub fn random_thresholds(n: usize, orientation: Orientation, role: Role, seed: u64) -> Self {
        let mut rng = rng_from(seed);
        let mut cuts: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        cuts.sort_by(f64::total_cmp);
        Self::thresholds(cuts, orientation, role)
    }

    /// The class `H_d` restricted to a finite candidate support.
    pub fn support_bounded(d: usize, support: Vec<Vec<f64>>, role: Role) -> Self {
        Self::from_descriptor(ClassDescriptor::SupportBounded { d, support, role })
    }

    pub fn lookup_tables(support: Vec<Vec<f64>>, tables: Vec<Vec<usize>>, default: usize) -> Self {
        Self::from_descriptor(ClassDescriptor::LookupTables { support, tables, default })
    }

    pub fn descriptor(&self) -> &ClassDescriptor {
        &self.descriptor
    }

    pub fn members(&self) -> &[Rule] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn member(&self, index: usize) -> &Rule {
        &self.members[index]
    }

    /// The deferral system `(self[h], rejectors[r])`.
    pub fn pair<'a>(&'a self, rejectors: &'a FiniteClass, h: usize, r: usize) -> RulePair<'a> {
        RulePair { classifier: &self.members[h], rejector: &rejectors.members[r] }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Member-by-sample bitsets of `pred(member output, sample index)`.
    fn member_bits(&self, xs: &[&[f64]], pred: impl Fn(usize, usize) -> bool) -> Vec<Bits> {
        self.members
            .iter()
            .map(|rule| Bits::from_fn(xs.len(), |i| pred(rule.eval(xs[i]), i)))
            .collect()
    }
}

/// Classifier and rejector rules evaluated together.
#[derive(Clone, Copy, Debug)]
pub struct RulePair<'a> {
    pub classifier: &'a Rule,
    pub rejector: &'a Rule,
}

impl DeferralSystem for RulePair<'_> {
    fn classify(&self, x: &[f64]) -> Label {
        self.classifier.eval(x)
    }

    fn defers(&self, x: &[f64]) -> bool {
        self.rejector.eval(x) == 1
    }
}

/// Caps on exhaustive searches.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchLimits {
    /// Maximum `|H| * |R|` for joint scans.
    pub max_pairs: u128,
    /// Maximum size of an enumerated lookup class.
    pub max_class_size: u128,
}

impl Default for SearchLimits {
    fn default() -> Self {
        Self { max_pairs: 10_000_000, max_class_size: 729 }
    }
}

fn require_expert_labels(data: &[Sample]) -> Result<()> {
    match data.iter().position(|s| s.m.is_none()) {
        Some(index) => Err(Error::MissingExpertLabel { index }),
        None => Ok(()),
    }
}

fn features(data: &[Sample]) -> Vec<&[f64]> {
    data.iter().map(|s| s.x.as_slice()).collect()
}

fn expert_error_bits(data: &[Sample]) -> Bits {
    Bits::from_fn(data.len(), |i| data[i].m != Some(data[i].y))
}

/// Lowest index minimizing `(value, index)`.
#[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN never replaces the incumbent
fn argmin_by_key<T: PartialOrd + Copy>(values: impl IntoIterator<Item = T>) -> Option<(usize, T)> {
    let mut best: Option<(usize, T)> = None;
    for (i, v) in values.into_iter().enumerate() {
        match best {
            Some((_, b)) if !(v < b) => {}
            _ => best = Some((i, v)),
        }
    }
    best
}

/// Classifier minimizing the empirical misclassification count.
pub fn erm_classifier(class_h: &FiniteClass, data: &[Sample]) -> Result<usize> {
    if data.is_empty() {
        return Err(Error::EmptyData);
    }
    let xs = features(data);
    let errors = class_h.member_bits(&xs, |out, i| out != data[i].y);
    Ok(argmin_by_key(errors.iter().map(Bits::count)).expect("non-empty class").0)
}

/// Rejector minimizing the empirical 0-1 deferral loss with `h` fixed.
pub fn erm_rejector<H>(class_r: &FiniteClass, h: H, data: &[Sample]) -> Result<usize>
where
    H: Fn(&[f64]) -> Label,
{
    if data.is_empty() {
        return Err(Error::EmptyData);
    }
    require_expert_labels(data)?;
    let xs = features(data);
    let classifier_err = Bits::from_fn(data.len(), |i| h(xs[i]) != data[i].y);
    let expert_err = expert_error_bits(data);
    let defers = class_r.member_bits(&xs, |out, _| out == 1);
    let losses = defers
        .iter()
        .map(|d| classifier_err.and_not_count(d) + expert_err.and_count(d));
    Ok(argmin_by_key(losses).expect("non-empty class").0)
}

/// Result of a joint scan.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JointFit {
    pub h: usize,
    pub r: usize,
    /// Number of misclassified or wrongly deferred samples.
    pub errors: usize,
}

/// Exhaustive joint ERM over `class_h × class_r`; the lexicographically
/// smallest `(h, r)` among minimizers wins.
pub fn erm_joint(class_h: &FiniteClass, class_r: &FiniteClass, data: &[Sample]) -> Result<JointFit> {
    erm_joint_with_limits(class_h, class_r, data, SearchLimits::default())
}

pub fn erm_joint_with_limits(
    class_h: &FiniteClass,
    class_r: &FiniteClass,
    data: &[Sample],
    limits: SearchLimits,
) -> Result<JointFit> {
    let requested = class_h.len() as u128 * class_r.len() as u128;
    if requested > limits.max_pairs {
        return Err(Error::SizeLimit { requested, cap: limits.max_pairs });
    }
    if data.is_empty() {
        return Err(Error::EmptyData);
    }
    require_expert_labels(data)?;
    let xs = features(data);
    let class_err = class_h.member_bits(&xs, |out, i| out != data[i].y);
    let defers = class_r.member_bits(&xs, |out, _| out == 1);
    let expert_err = expert_error_bits(data);
    let deferral_cost: Vec<usize> = defers.iter().map(|d| expert_err.and_count(d)).collect();

    let mut best = JointFit { h: 0, r: 0, errors: usize::MAX };
    for (h, e) in class_err.iter().enumerate() {
        for (r, d) in defers.iter().enumerate() {
            let errors = e.and_not_count(d) + deferral_cost[r];
            if errors < best.errors {
                best = JointFit { h, r, errors };
                if errors == 0 {
                    return Ok(best);
                }
            }
        }
    }
    Ok(best)
}

/// Exact classification and deferral losses of every member on each support
/// point of an atomic world.
struct ExactTables {
    masses: Vec<f64>,
    /// `class_loss[h][p] = P(h(x_p) != Y | x_p)`
    class_loss: Vec<Vec<f64>>,
    /// `defers[r][p] = r(x_p) == 1`
    defers: Vec<Vec<bool>>,
    expert_loss: Vec<f64>,
}

impl ExactTables {
    fn new(class_h: &FiniteClass, class_r: &FiniteClass, world: &AtomicWorld) -> Self {
        let pts = world.points();
        Self {
            masses: pts.iter().map(|p| p.mass).collect(),
            class_loss: class_h
                .members()
                .iter()
                .map(|h| pts.iter().map(|p| p.classifier_error(h.eval(&p.x))).collect())
                .collect(),
            defers: class_r
                .members()
                .iter()
                .map(|r| pts.iter().map(|p| r.eval(&p.x) == 1).collect())
                .collect(),
            expert_loss: pts.iter().map(AtomicPoint::expert_error).collect(),
        }
    }

    /// Same accumulation order as `exact_deferral_risk`.
    fn risk(&self, h: usize, r: usize) -> f64 {
        let mut total = 0.0;
        for p in 0..self.masses.len() {
            let loss = if self.defers[r][p] { self.expert_loss[p] } else { self.class_loss[h][p] };
            total += self.masses[p] * loss;
        }
        total
    }

    fn classification_risk(&self, h: usize) -> f64 {
        let mut total = 0.0;
        for p in 0..self.masses.len() {
            total += self.masses[p] * self.class_loss[h][p];
        }
        total
    }
}

use crate::deferral::AtomicPoint;

/// Result of an exact (population) optimization on an atomic world.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExactFit {
    pub h: usize,
    pub r: usize,
    pub risk: f64,
}

/// Staged learning on the population: the classifier minimizing
/// misclassification risk, then the rejector minimizing deferral risk with
/// that classifier frozen.
pub fn exact_staged(class_h: &FiniteClass, class_r: &FiniteClass, world: &AtomicWorld) -> ExactFit {
    let t = ExactTables::new(class_h, class_r, world);
    let (h, _) = argmin_by_key((0..class_h.len()).map(|h| t.classification_risk(h))).expect("non-empty");
    let (r, risk) = argmin_by_key((0..class_r.len()).map(|r| t.risk(h, r))).expect("non-empty");
    ExactFit { h, r, risk }
}

/// Joint learning on the population: the pair minimizing deferral risk.
pub fn exact_joint(
    class_h: &FiniteClass,
    class_r: &FiniteClass,
    world: &AtomicWorld,
    limits: SearchLimits,
) -> Result<ExactFit> {
    let requested = class_h.len() as u128 * class_r.len() as u128;
    if requested > limits.max_pairs {
        return Err(Error::SizeLimit { requested, cap: limits.max_pairs });
    }
    let t = ExactTables::new(class_h, class_r, world);
    let mut best = ExactFit { h: 0, r: 0, risk: f64::INFINITY };
    for h in 0..class_h.len() {
        for r in 0..class_r.len() {
            let risk = t.risk(h, r);
            if risk < best.risk {
                best = ExactFit { h, r, risk };
            }
        }
    }
    Ok(best)
}

/// Every classifier `support -> [K]` and every rejector `support -> {0,1}`
/// as lookup tables, in odometer order with the first support point most
/// significant.
pub fn enumerate_lookup_pairs(
    world: &AtomicWorld,
    classes: usize,
    limits: SearchLimits,
) -> Result<(FiniteClass, FiniteClass)> {
    let s = world.len() as u32;
    let n_h = (classes as u128)
        .checked_pow(s)
        .unwrap_or(u128::MAX);
    let n_r = 1u128 << s.min(127);
    for requested in [n_h, n_r] {
        if requested > limits.max_class_size {
            return Err(Error::SizeLimit { requested, cap: limits.max_class_size });
        }
    }
    let tables = |base: usize, offset: usize, count: u128| -> Vec<Vec<usize>> {
        (0..count as usize)
            .map(|mut code| {
                let mut digits = vec![0; s as usize];
                for slot in digits.iter_mut().rev() {
                    *slot = code % base + offset;
                    code /= base;
                }
                digits
            })
            .collect()
    };
    let support = world.support();
    Ok((
        FiniteClass::lookup_tables(support.clone(), tables(classes, 1, n_h), 1),
        FiniteClass::lookup_tables(support, tables(2, 0, n_r), 0),
    ))
}

/// Bayes deferral risk `Σ_x p(x) min(min_y P(Y≠y|x), P(M≠Y|x))`.
pub fn bayes_deferral_risk(world: &AtomicWorld) -> f64 {
    let mut total = 0.0;
    for p in world.points() {
        let best_class = (1..=world.classes())
            .map(|y| p.classifier_error(y))
            .fold(f64::INFINITY, f64::min);
        total += p.mass * best_class.min(p.expert_error());
    }
    total
}
