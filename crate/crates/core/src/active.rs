//! Version spaces, rejector disagreement and disagreement-on-disagreements
//! (DoD) active learning.
//!
//! Only expert queries count as human labels. Target labels on the initial
//! pool and on DoD's unlabeled stage are treated as cheap.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::bits::Bits;
use crate::deferral::Sample;
use crate::error::{Error, Result};
use crate::hypotheses::{FiniteClass, RulePair};
use crate::seeds::{derive_named, rng_from, Rng};
use crate::worlds::{sample_labeled, World};

/// Surviving `(h, r)` index pairs, in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairVersionSpace {
    pub alive: Vec<(usize, usize)>,
}

impl PairVersionSpace {
    pub fn len(&self) -> usize {
        self.alive.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alive.is_empty()
    }

    /// Distinct surviving rejector indices, ascending.
    pub fn rejectors(&self) -> Vec<usize> {
        let mut r: Vec<usize> = self.alive.iter().map(|p| p.1).collect();
        r.sort_unstable();
        r.dedup();
        r
    }
}

/// Pairs that classify every pool point they keep correctly.
pub fn init_pair_version_space(
    class_h: &FiniteClass,
    class_r: &FiniteClass,
    pool: &[Sample],
) -> Result<PairVersionSpace> {
    if pool.is_empty() {
        return Err(Error::EmptyPool);
    }
    let errors: Vec<Bits> = class_h
        .members()
        .iter()
        .map(|h| Bits::from_fn(pool.len(), |i| h.eval(&pool[i].x) != pool[i].y))
        .collect();
    let defers: Vec<Bits> = class_r
        .members()
        .iter()
        .map(|r| Bits::from_fn(pool.len(), |i| r.eval(&pool[i].x) == 1))
        .collect();
    let mut alive = Vec::new();
    for (h, e) in errors.iter().enumerate() {
        for (r, d) in defers.iter().enumerate() {
            if e.is_subset(d) {
                alive.push((h, r));
            }
        }
    }
    if alive.is_empty() {
        return Err(Error::EmptyVersionSpace);
    }
    Ok(PairVersionSpace { alive })
}

fn disagree(mut outputs: impl Iterator<Item = usize>) -> bool {
    match outputs.next() {
        Some(first) => outputs.any(|o| o != first),
        None => false,
    }
}

/// Whether two surviving rejectors disagree at `x`.
pub fn dis_rejector(class_r: &FiniteClass, v: &PairVersionSpace, x: &[f64]) -> bool {
    disagree(v.rejectors().into_iter().map(|r| class_r.member(r).eval(x)))
}

/// One row of an active-learning trace.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub round: usize,
    pub labels_used: usize,
    pub version_space_size: usize,
    /// `NaN` when Monte-Carlo estimation is disabled.
    pub dis_mass_estimate: f64,
    pub exact_risk: Option<f64>,
}

pub const TRACE_HEADER: &str = "round,labels_used,version_space_size,dis_mass_estimate,exact_risk";

pub fn write_trace_csv<W: Write>(rows: &[TraceRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRACE_HEADER.split(','))?;
    for row in rows {
        let dis = if row.dis_mass_estimate.is_nan() { String::new() } else { row.dis_mass_estimate.to_string() };
        let risk = row.exact_risk.map(|r| r.to_string()).unwrap_or_default();
        w.write_record([
            row.round.to_string(),
            row.labels_used.to_string(),
            row.version_space_size.to_string(),
            dis,
            risk,
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Draws from `world` until `k` points satisfy `in_dis` or `cap` draws are
/// spent. Returns the hits and whether the cap was hit first.
fn draw_in_region<W, F>(world: &W, rng: &mut Rng, k: usize, cap: usize, in_dis: F) -> (Vec<Sample>, bool)
where
    W: World + ?Sized,
    F: Fn(&[f64]) -> bool,
{
    let mut hits = Vec::with_capacity(k);
    for _ in 0..cap {
        let (x, y, m) = world.draw(rng);
        if in_dis(&x) {
            hits.push(Sample::new(x, y, Some(m)));
            if hits.len() == k {
                return (hits, false);
            }
        }
    }
    (hits, true)
}

/// Fraction of `n` fresh draws inside the region; `NaN` when `n == 0`.
fn mass_estimate<W, F>(world: &W, rng: &mut Rng, n: usize, in_dis: F) -> f64
where
    W: World + ?Sized,
    F: Fn(&[f64]) -> bool,
{
    if n == 0 {
        return f64::NAN;
    }
    let hits = (0..n).filter(|_| in_dis(&world.draw(rng).0)).count();
    hits as f64 / n as f64
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisagreementParams {
    /// Target-labeled samples used to build the initial version space.
    pub pool_size: usize,
    /// Expert queries per round.
    pub per_round: usize,
    pub rounds: usize,
    /// Draws allowed per round while looking for disagreement points.
    pub budget_cap: usize,
    /// Fresh draws per disagreement-mass estimate; 0 disables it.
    pub mc_samples: usize,
}

impl Default for DisagreementParams {
    fn default() -> Self {
        Self { pool_size: 200, per_round: 30, rounds: 10, budget_cap: 100_000, mc_samples: 10_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisagreementOutcome {
    pub h: usize,
    pub r: usize,
    pub labels_used: usize,
    /// The draw cap was exhausted, which is read as a vanishing
    /// disagreement region.
    pub stopped_early: bool,
    pub trace: Vec<TraceRow>,
    pub version_space: PairVersionSpace,
}

/// The rejector-disagreement algorithm started from a target-labeled pool.
///
/// Queried points remove pairs that defer to a wrong expert, and pairs that
/// keep a point they misclassify.
pub fn rejector_disagreement_run<W: World + ?Sized>(
    class_h: &FiniteClass,
    class_r: &FiniteClass,
    world: &W,
    params: &DisagreementParams,
    seed: u64,
) -> Result<DisagreementOutcome> {
    let pool: Vec<Sample> = sample_labeled(world, params.pool_size, derive_named(seed, "pool"))?
        .into_iter()
        .map(|s| s.without_expert())
        .collect();
    let mut v = init_pair_version_space(class_h, class_r, &pool)?;
    let mut rng = rng_from(derive_named(seed, "queries"));
    let mut mc_rng = rng_from(derive_named(seed, "mc"));
    let mut trace = Vec::new();
    let mut labels_used = 0;
    let mut stopped_early = false;
    for round in 1..=params.rounds {
        let before = v.len();
        let (queried, exhausted) = {
            let rejectors = v.rejectors();
            draw_in_region(world, &mut rng, params.per_round, params.budget_cap, |x| {
                disagree(rejectors.iter().map(|&r| class_r.member(r).eval(x)))
            })
        };
        labels_used += queried.len();
        v.alive.retain(|&(h, r)| {
            queried.iter().all(|s| {
                if class_r.member(r).eval(&s.x) == 1 {
                    s.m == Some(s.y)
                } else {
                    class_h.member(h).eval(&s.x) == s.y
                }
            })
        });
        debug_assert!(v.len() <= before);
        if v.is_empty() {
            return Err(Error::EmptyVersionSpace);
        }
        let rejectors = v.rejectors();
        let dis_mass = mass_estimate(world, &mut mc_rng, params.mc_samples, |x| {
            disagree(rejectors.iter().map(|&r| class_r.member(r).eval(x)))
        });
        let (h, r) = v.alive[0];
        trace.push(TraceRow {
            round,
            labels_used,
            version_space_size: v.len(),
            dis_mass_estimate: dis_mass,
            exact_risk: world.exact_risk(&class_h.pair(class_r, h, r)),
        });
        if exhausted {
            stopped_early = true;
            break;
        }
    }
    let (h, r) = v.alive[0];
    Ok(DisagreementOutcome { h, r, labels_used, stopped_early, trace, version_space: v })
}

/// Surviving members of a class of expert-error predictors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictorVersionSpace {
    pub alive: Vec<usize>,
}

impl PredictorVersionSpace {
    pub fn full(class_d: &FiniteClass) -> Self {
        Self { alive: (0..class_d.len()).collect() }
    }

    pub fn len(&self) -> usize {
        self.alive.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alive.is_empty()
    }
}

/// Whether two surviving predictors disagree at `x`.
pub fn dis2(class_d: &FiniteClass, v: &PredictorVersionSpace, x: &[f64]) -> bool {
    disagree(v.alive.iter().map(|&d| class_d.member(d).eval(x)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DodParams {
    pub rounds: usize,
    pub per_round: usize,
    /// Target-labeled, expert-unlabeled samples for the second stage.
    pub n_unlabeled: usize,
    pub budget_cap: usize,
    pub mc_samples: usize,
}

impl Default for DodParams {
    fn default() -> Self {
        Self { rounds: 8, per_round: 10, n_unlabeled: 500, budget_cap: 100_000, mc_samples: 0 }
    }
}

/// The first stage of DoD: CAL on the expert-error predictors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DodStageOne {
    /// Version space after each round; entry 0 is the full class.
    pub snapshots: Vec<PredictorVersionSpace>,
    /// Expert queries made up to each snapshot.
    pub labels_used: Vec<usize>,
    pub trace: Vec<TraceRow>,
    pub stopped_early: bool,
}

pub fn dod_stage_one<W: World + ?Sized>(
    class_d: &FiniteClass,
    world: &W,
    params: &DodParams,
    seed: u64,
) -> Result<DodStageOne> {
    let mut v = PredictorVersionSpace::full(class_d);
    let mut rng = rng_from(derive_named(seed, "queries"));
    let mut mc_rng = rng_from(derive_named(seed, "mc"));
    let mut out = DodStageOne {
        snapshots: vec![v.clone()],
        labels_used: vec![0],
        trace: Vec::new(),
        stopped_early: false,
    };
    let mut labels_used = 0;
    for round in 1..=params.rounds {
        let (queried, exhausted) =
            draw_in_region(world, &mut rng, params.per_round, params.budget_cap, |x| dis2(class_d, &v, x));
        labels_used += queried.len();
        v.alive.retain(|&d| {
            queried.iter().all(|s| (class_d.member(d).eval(&s.x) == 1) == (s.m != Some(s.y)))
        });
        if v.is_empty() {
            return Err(Error::EmptyVersionSpace);
        }
        let dis_mass = mass_estimate(world, &mut mc_rng, params.mc_samples, |x| dis2(class_d, &v, x));
        out.trace.push(TraceRow {
            round,
            labels_used,
            version_space_size: v.len(),
            dis_mass_estimate: dis_mass,
            exact_risk: None,
        });
        out.snapshots.push(v.clone());
        out.labels_used.push(labels_used);
        if exhausted {
            out.stopped_early = true;
            break;
        }
    }
    Ok(out)
}

/// Result of the second DoD stage.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DodChoice {
    pub d: usize,
    pub h: usize,
    pub r: usize,
    /// Pseudo-labeled loss count of the returned triple; zero when consistent.
    pub errors: usize,
    pub consistent: bool,
}

/// Pseudo-labels the expert on `data` with each surviving predictor in turn
/// and returns the first `(d, h, r)` with zero pseudo-labeled deferral loss,
/// or the best triple found when none is consistent.
pub fn dod_stage_two(
    class_d: &FiniteClass,
    class_h: &FiniteClass,
    class_r: &FiniteClass,
    v: &PredictorVersionSpace,
    data: &[Sample],
) -> Result<DodChoice> {
    if data.is_empty() {
        return Err(Error::EmptyData);
    }
    if v.is_empty() {
        return Err(Error::EmptyVersionSpace);
    }
    let n = data.len();
    let errors: Vec<Bits> = class_h
        .members()
        .iter()
        .map(|h| Bits::from_fn(n, |i| h.eval(&data[i].x) != data[i].y))
        .collect();
    let defers: Vec<Bits> = class_r
        .members()
        .iter()
        .map(|r| Bits::from_fn(n, |i| r.eval(&data[i].x) == 1))
        .collect();
    let mut best = DodChoice { d: v.alive[0], h: 0, r: 0, errors: usize::MAX, consistent: false };
    for &d in &v.alive {
        let wrong_expert = Bits::from_fn(n, |i| class_d.member(d).eval(&data[i].x) == 1);
        let deferral_cost: Vec<usize> = defers.iter().map(|dr| wrong_expert.and_count(dr)).collect();
        for (h, e) in errors.iter().enumerate() {
            for (r, dr) in defers.iter().enumerate() {
                if deferral_cost[r] == 0 && e.is_subset(dr) {
                    return Ok(DodChoice { d, h, r, errors: 0, consistent: true });
                }
                let loss = e.and_not_count(dr) + deferral_cost[r];
                if loss < best.errors {
                    best = DodChoice { d, h, r, errors: loss, consistent: false };
                }
            }
        }
    }
    Ok(best)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DodOutcome {
    pub choice: DodChoice,
    pub labels_used: usize,
    pub stopped_early: bool,
    pub trace: Vec<TraceRow>,
    pub version_space: PredictorVersionSpace,
}

impl DodOutcome {
    pub fn system<'a>(&self, class_h: &'a FiniteClass, class_r: &'a FiniteClass) -> RulePair<'a> {
        class_h.pair(class_r, self.choice.h, self.choice.r)
    }
}

/// Disagreement on disagreements: CAL on the expert-error predictors, then
/// a consistent classifier-rejector pair on pseudo-labeled data.
pub fn dod_run<W: World + ?Sized>(
    class_d: &FiniteClass,
    class_h: &FiniteClass,
    class_r: &FiniteClass,
    world: &W,
    params: &DodParams,
    seed: u64,
) -> Result<DodOutcome> {
    let stage = dod_stage_one(class_d, world, params, seed)?;
    let v = stage.snapshots.last().expect("initial snapshot").clone();
    let unlabeled = dod_unlabeled(world, params.n_unlabeled, seed)?;
    let choice = dod_stage_two(class_d, class_h, class_r, &v, &unlabeled)?;
    let mut trace = stage.trace;
    if let Some(last) = trace.last_mut() {
        last.exact_risk = world.exact_risk(&class_h.pair(class_r, choice.h, choice.r));
    }
    Ok(DodOutcome {
        choice,
        labels_used: *stage.labels_used.last().expect("initial count"),
        stopped_early: stage.stopped_early,
        trace,
        version_space: v,
    })
}

/// The expert-unlabeled sample used by DoD's second stage.
pub fn dod_unlabeled<W: World + ?Sized>(world: &W, n: usize, seed: u64) -> Result<Vec<Sample>> {
    Ok(sample_labeled(world, n, derive_named(seed, "unlabeled"))?
        .into_iter()
        .map(|s| s.without_expert())
        .collect())
}

/// Monte-Carlo estimate of the disagreement coefficient of `class_d` around
/// member `f_star`, as the largest `P(DIS₂(B(f*, t))) / t` over `t_grid`.
pub fn estimate_theta2<W: World + ?Sized>(
    class_d: &FiniteClass,
    f_star: usize,
    world: &W,
    t_grid: &[f64],
    n_mc: usize,
    seed: u64,
) -> Result<f64> {
    if f_star >= class_d.len() {
        return Err(Error::OutOfRange { value: f_star, min: 0, max: class_d.len() - 1 });
    }
    if t_grid.is_empty() || t_grid.iter().any(|t| !(*t > 0.0 && *t <= 1.0)) {
        return Err(Error::Config("t_grid must be non-empty with entries in (0, 1]".into()));
    }
    if n_mc == 0 {
        return Err(Error::EmptyData);
    }
    let mut rng = rng_from(seed);
    let xs: Vec<Vec<f64>> = (0..n_mc).map(|_| world.draw(&mut rng).0).collect();
    let star: Vec<usize> = xs.iter().map(|x| class_d.member(f_star).eval(x)).collect();
    let differs: Vec<Bits> = class_d
        .members()
        .iter()
        .map(|d| Bits::from_fn(n_mc, |i| d.eval(&xs[i]) != star[i]))
        .collect();
    let rho: Vec<f64> = differs.iter().map(|b| b.count() as f64 / n_mc as f64).collect();
    // s(x): radius at which x first enters the disagreement region.
    let mut s = vec![f64::INFINITY; n_mc];
    for (j, b) in differs.iter().enumerate() {
        for (i, si) in s.iter_mut().enumerate() {
            if b.get(i) && rho[j] < *si {
                *si = rho[j];
            }
        }
    }
    Ok(t_grid
        .iter()
        .map(|&t| s.iter().filter(|&&si| si <= t).count() as f64 / n_mc as f64 / t)
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deferral::deferral_loss_01;
    use crate::hypotheses::{Orientation, Role};
    use crate::worlds::{make_cal_counterexample_world, make_fig4_world, ContinuousWorld, FeatureLaw};

    fn grid(role: Role, o: Orientation) -> FiniteClass {
        FiniteClass::threshold_grid(100, o, role)
    }

    #[test]
    fn counterexample_initial_version_space() {
        let cal = make_cal_counterexample_world();
        let pool: Vec<Sample> = cal
            .world
            .points()
            .iter()
            .map(|p| {
                let y = if p.labels[0] == 1.0 { 1 } else { 2 };
                Sample::new(p.x.clone(), y, None)
            })
            .collect();
        let v = init_pair_version_space(&cal.classifiers, &cal.rejectors, &pool).unwrap();
        assert_eq!(v.alive, vec![(0, 0), (0, 1), (1, 0)]);
        assert!(dis_rejector(&cal.rejectors, &v, &[1.0]));
        assert!(!dis_rejector(&cal.rejectors, &v, &[0.0]));
        let single = PairVersionSpace { alive: vec![(0, 0)] };
        assert!(!dis_rejector(&cal.rejectors, &single, &[1.0]));
    }

    #[test]
    fn version_space_edge_cases() {
        assert!(matches!(
            init_pair_version_space(&grid(Role::Classifier, Orientation::PositiveAbove), &grid(Role::Binary, Orientation::PositiveAtOrBelow), &[]),
            Err(Error::EmptyPool)
        ));
        let never = FiniteClass::thresholds(vec![2.0], Orientation::PositiveAbove, Role::Binary);
        let h = FiniteClass::thresholds(vec![0.5], Orientation::PositiveAbove, Role::Classifier);
        let contradictory = vec![Sample::new(vec![0.1], 1, None), Sample::new(vec![0.1], 2, None)];
        assert!(matches!(init_pair_version_space(&h, &never, &contradictory), Err(Error::EmptyVersionSpace)));
        // An always-defer rejector pairs with every classifier.
        let always = FiniteClass::thresholds(vec![2.0], Orientation::PositiveAtOrBelow, Role::Binary);
        let hs = grid(Role::Classifier, Orientation::PositiveAbove);
        let v = init_pair_version_space(&hs, &always, &contradictory).unwrap();
        assert_eq!(v.len(), hs.len());
    }

    #[test]
    fn counterexample_disagreement_never_shrinks() {
        let cal = make_cal_counterexample_world();
        let params = DisagreementParams { pool_size: 50, per_round: 5, rounds: 100, budget_cap: 100_000, mc_samples: 10_000 };
        let out = rejector_disagreement_run(&cal.classifiers, &cal.rejectors, &cal.world, &params, 3).unwrap();
        assert_eq!(out.trace.len(), 100);
        for row in &out.trace {
            assert_eq!(row.version_space_size, 3);
            assert!((0.45..=0.55).contains(&row.dis_mass_estimate), "{row:?}");
        }
    }

    #[test]
    fn disagreement_converges_on_fig4() {
        let w = make_fig4_world();
        let h = grid(Role::Classifier, Orientation::PositiveAbove);
        let r = grid(Role::Binary, Orientation::PositiveAtOrBelow);
        let params = DisagreementParams { mc_samples: 2000, ..Default::default() };
        let out = rejector_disagreement_run(&h, &r, &w, &params, 9).unwrap();
        let risk = out.trace.last().unwrap().exact_risk.unwrap();
        assert!(risk <= 0.05, "{risk}");
        for pair in out.trace.windows(2) {
            assert!(pair[1].version_space_size <= pair[0].version_space_size);
        }
        // The zero-error pair (h cut 0, r cut 0.3) survives.
        assert!(out.version_space.alive.contains(&(0, 30)));
        let zero = DisagreementParams { rounds: 0, ..params };
        let out = rejector_disagreement_run(&h, &r, &w, &zero, 9).unwrap();
        assert!(out.trace.is_empty());
        assert_eq!(out.labels_used, 0);
    }

    #[test]
    fn dis2_examples() {
        let d = FiniteClass::thresholds(vec![0.2, 0.4], Orientation::PositiveAbove, Role::Binary);
        let v = PredictorVersionSpace::full(&d);
        assert!(dis2(&d, &v, &[0.3]));
        assert!(!dis2(&d, &v, &[0.5]));
        let same = FiniteClass::thresholds(vec![0.2, 0.2], Orientation::PositiveAbove, Role::Binary);
        let v = PredictorVersionSpace::full(&same);
        assert!((0..=10).all(|i| !dis2(&same, &v, &[i as f64 / 10.0])));
    }

    #[test]
    fn dod_on_fig4() {
        let w = make_fig4_world();
        let d = grid(Role::Binary, Orientation::PositiveAbove);
        let h = grid(Role::Classifier, Orientation::PositiveAbove);
        let r = grid(Role::Binary, Orientation::PositiveAtOrBelow);
        let params = DodParams { rounds: 8, per_round: 10, n_unlabeled: 500, budget_cap: 100_000, mc_samples: 1000 };
        let out = dod_run(&d, &h, &r, &w, &params, 5).unwrap();
        // CAL pins the predictor down early; the disagreement region then
        // vanishes and the remaining rounds are skipped.
        assert!(out.labels_used <= 80);
        assert_eq!(out.labels_used, out.trace.last().unwrap().labels_used);
        if out.stopped_early {
            assert_eq!(out.version_space.len(), 1);
        }
        assert!(out.choice.consistent);
        assert!(out.version_space.alive.contains(&30), "true predictor removed");
        let risk = w.exact_risk(&out.system(&h, &r)).unwrap();
        assert!(risk <= 0.05, "{risk}");
        // Zero pseudo-labeled loss on the second-stage data.
        let unlabeled = dod_unlabeled(&w, 500, 5).unwrap();
        let pseudo: Vec<Sample> = unlabeled
            .iter()
            .map(|s| {
                let wrong = d.member(out.choice.d).eval(&s.x) == 1;
                Sample::new(s.x.clone(), s.y, Some(if wrong { 3 - s.y } else { s.y }))
            })
            .collect();
        assert_eq!(deferral_loss_01(&out.system(&h, &r), &pseudo).unwrap(), 0.0);
        for pair in out.trace.windows(2) {
            assert!(pair[1].version_space_size <= pair[0].version_space_size);
        }
    }

    #[test]
    fn dod_with_always_correct_expert_defers_everywhere() {
        let w = ContinuousWorld::new(
            2,
            FeatureLaw::UnitInterval,
            |x, _| if x[0] > 0.5 { 2 } else { 1 },
            |_, y, _| y,
        );
        let mut cuts = vec![2.0];
        cuts.extend((0..10).map(|i| i as f64 / 10.0));
        let d = FiniteClass::thresholds(cuts, Orientation::PositiveAbove, Role::Binary);
        let h = FiniteClass::thresholds(vec![0.9], Orientation::PositiveAbove, Role::Classifier);
        let r = FiniteClass::thresholds(vec![1.0], Orientation::PositiveAtOrBelow, Role::Binary);
        let params = DodParams { rounds: 5, per_round: 5, n_unlabeled: 200, ..Default::default() };
        let out = dod_run(&d, &h, &r, &w, &params, 1).unwrap();
        assert_eq!(out.version_space.alive, vec![0]);
        assert!(out.choice.consistent);
        let sys = out.system(&h, &r);
        let data = sample_labeled(&w, 500, 2).unwrap();
        assert_eq!(deferral_loss_01(&sys, &data).unwrap(), 0.0);
    }

    #[test]
    fn theta2_of_threshold_class() {
        let w = make_fig4_world();
        let d = grid(Role::Binary, Orientation::PositiveAbove);
        let t_grid: Vec<f64> = (1..=20).map(|i| i as f64 * 0.05).collect();
        let theta = estimate_theta2(&d, 30, &w, &t_grid, 100_000, 4).unwrap();
        assert!((0.9..=2.1).contains(&theta), "{theta}");
        let single = FiniteClass::thresholds(vec![0.3], Orientation::PositiveAbove, Role::Binary);
        assert_eq!(estimate_theta2(&single, 0, &w, &t_grid, 1000, 4).unwrap(), 0.0);
    }

    #[test]
    fn trace_csv_layout() {
        let rows = vec![
            TraceRow { round: 1, labels_used: 2, version_space_size: 10, dis_mass_estimate: 0.5, exact_risk: Some(0.25) },
            TraceRow { round: 2, labels_used: 4, version_space_size: 3, dis_mass_estimate: f64::NAN, exact_risk: None },
        ];
        let mut buf = Vec::new();
        write_trace_csv(&rows, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "round,labels_used,version_space_size,dis_mass_estimate,exact_risk\n1,2,10,0.5,0.25\n2,4,3,,\n"
        );
    }
}
