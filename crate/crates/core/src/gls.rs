//! The guided local search outer loop.

use std::cmp::Ordering;
use std::time::{Duration, Instant};

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::instance::{EdgeKey, Instance};
use crate::local_search::{
    activate_penalized, local_search_2opt_fls, ActivationBits, CandidateLists, Control, GuideFunction, Lambda,
    LsOutcome, MoveMonitor,
};
use crate::penalty::PenaltyStore;
use crate::tour::{nearest_neighbor_tour, random_tour, Tour};

/// Default λ coefficient applied to the first local optimum's mean edge cost.
pub const DEFAULT_LAMBDA_COEFFICIENT: f64 = 0.3;

/// Converts a decimal coefficient to the fraction it denotes (0.3 -> 3/10).
pub fn coefficient_ratio(coeff: f64) -> Result<Ratio<i64>> {
    if !(coeff.is_finite() && coeff > 0.0) {
        return Err(Error::InvalidArgument(format!("coefficient {coeff} must be positive")));
    }
    Ratio::approximate_float(coeff)
        .filter(|r: &Ratio<i64>| *r.numer() > 0)
        .ok_or_else(|| Error::InvalidArgument(format!("coefficient {coeff} has no rational form")))
}

/// `coeff * first_local_opt_cost / n`, reduced.
pub fn compute_lambda(first_local_opt_cost: i64, n: usize, coeff: Ratio<i64>) -> Result<Lambda> {
    if first_local_opt_cost <= 0 || n < 3 || *coeff.numer() <= 0 {
        return Err(Error::InvalidArgument(format!(
            "lambda needs positive inputs (cost {first_local_opt_cost}, n {n}, coefficient {coeff})"
        )));
    }
    let num = (*coeff.numer() as i128) * first_local_opt_cost as i128;
    let den = (*coeff.denom() as i128) * n as i128;
    let r = Ratio::new(num, den);
    let num = i64::try_from(*r.numer()).map_err(|_| Error::InvalidArgument("lambda overflows".into()))?;
    let den = i64::try_from(*r.denom()).map_err(|_| Error::InvalidArgument("lambda overflows".into()))?;
    Lambda::new(num, den)
}

/// A non-negative fraction compared by value without normalization.
#[derive(Debug, Clone, Copy)]
pub struct Utility {
    num: i128,
    den: i128,
}

impl Utility {
    pub const ZERO: Utility = Utility { num: 0, den: 1 };

    /// `num / den` with `den > 0`.
    pub fn new(num: i128, den: i128) -> Self {
        assert!(den > 0, "utility denominator must be positive");
        Utility { num, den }
    }

    pub fn to_ratio(self) -> Ratio<i128> {
        Ratio::new(self.num, self.den)
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl PartialEq for Utility {
    fn eq(&self, other: &Self) -> bool {
        self.num * other.den == other.num * self.den
    }
}

impl Eq for Utility {}

impl PartialOrd for Utility {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Utility {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num * other.den).cmp(&(other.num * self.den))
    }
}

/// `c / (1 + p)` for edges in the solution, 0 otherwise.
pub fn utility(_edge: EdgeKey, in_solution: bool, c: i64, p: u32) -> Utility {
    if in_solution {
        Utility::new(c as i128, 1 + p as i128)
    } else {
        Utility::ZERO
    }
}

/// One penalization candidate: a solution edge with its cost and penalty
/// before the event.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PenaltyCandidate {
    pub edge: EdgeKey,
    pub cost: i64,
    pub p_before: u32,
    pub in_elite: bool,
}

/// Adds 1 to the penalty of every edge of `local_opt` whose utility under
/// `util` is maximal and returns those edges in tour order.
pub fn penalize<F>(penalties: &mut PenaltyStore, inst: &Instance, local_opt: &Tour, util: F) -> Vec<EdgeKey>
where
    F: Fn(EdgeKey, i64, u32) -> Utility,
{
    let mut best: Option<Utility> = None;
    let mut chosen: Vec<EdgeKey> = Vec::new();
    for e in local_opt.edges() {
        let u = util(e, inst.dist(e.lo(), e.hi()), penalties.get_edge(e));
        match best.map_or(Ordering::Greater, |b| u.cmp(&b)) {
            Ordering::Greater => {
                best = Some(u);
                chosen.clear();
                chosen.push(e);
            }
            Ordering::Equal => chosen.push(e),
            Ordering::Less => {}
        }
    }
    for &e in &chosen {
        penalties.increment(e);
    }
    chosen
}

/// Start solution of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StartKind {
    /// Uniform shuffle seeded by the run seed.
    Random,
    /// Nearest-neighbor construction from the given city.
    NearestNeighbor(usize),
}

/// When a run stops. Unset limits do not apply; the first limit hit wins.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StopCriteria {
    pub max_iterations: Option<u64>,
    pub time_limit: Option<Duration>,
    pub target_cost: Option<i64>,
}

impl StopCriteria {
    pub fn iterations(k: u64) -> Self {
        StopCriteria {
            max_iterations: Some(k),
            ..Self::default()
        }
    }

    pub fn time(limit: Duration) -> Self {
        StopCriteria {
            time_limit: Some(limit),
            ..Self::default()
        }
    }

    pub fn with_target(mut self, target: Option<i64>) -> Self {
        self.target_cost = target;
        self
    }

    fn is_bounded(&self) -> bool {
        self.max_iterations.is_some() || self.time_limit.is_some() || self.target_cost.is_some()
    }
}

/// Parameters of a GLS run.
#[derive(Debug, Clone, PartialEq)]
pub struct GlsConfig {
    pub lambda_coefficient: f64,
    pub stop: StopCriteria,
    pub seed: u64,
    pub start: StartKind,
}

impl GlsConfig {
    pub fn new(stop: StopCriteria, seed: u64) -> Self {
        GlsConfig {
            lambda_coefficient: DEFAULT_LAMBDA_COEFFICIENT,
            stop,
            seed,
            start: StartKind::Random,
        }
    }

    pub fn validate(&self) -> Result<Ratio<i64>> {
        if !self.stop.is_bounded() {
            return Err(Error::InvalidArgument("a run needs at least one stop criterion".into()));
        }
        coefficient_ratio(self.lambda_coefficient)
    }

    /// Builds the start tour this config prescribes.
    pub fn start_tour(&self, inst: &Instance) -> Result<Tour> {
        match self.start {
            StartKind::Random => Ok(random_tour(inst, self.seed)),
            StartKind::NearestNeighbor(c) => nearest_neighbor_tour(inst, c),
        }
    }
}

/// Why a run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    TargetReached,
    IterationLimit,
    TimeLimit,
}

/// Mutable state of a run after it stopped.
#[derive(Debug, Clone)]
pub struct SearchState {
    pub current: Tour,
    pub penalties: PenaltyStore,
    pub lambda: Lambda,
    /// Local-search calls started, including an interrupted last one.
    pub iteration: u64,
}

/// Best-so-far improvement observed at the end of an iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrajectoryPoint {
    pub iteration: u64,
    pub cost: i64,
}

/// Result of [`run_gls`] and the elite-biased variant.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub best: Tour,
    pub state: SearchState,
    pub stop: StopReason,
    pub elapsed: Duration,
    pub start_cost: i64,
    /// Cost of the first local optimum; `None` when no local search finished.
    pub first_local_opt_cost: Option<i64>,
    /// One point per iteration that lowered the best cost.
    pub trajectory: Vec<TrajectoryPoint>,
}

/// Snapshot handed to [`SearchObserver::on_iteration`].
#[derive(Debug)]
pub struct IterationView<'a> {
    pub iteration: u64,
    pub best: &'a Tour,
    /// The best cost dropped during this iteration.
    pub improved: bool,
    pub current: &'a Tour,
    pub penalties: &'a PenaltyStore,
    pub lambda: Lambda,
    /// The local search of this iteration was cut short and no penalization
    /// followed.
    pub interrupted: bool,
    pub elapsed: Duration,
}

/// Details of one penalization event.
#[derive(Debug)]
pub struct PenalizeEvent<'a> {
    pub iteration: u64,
    /// Every solution edge before the increment; empty unless the observer
    /// asked for details.
    pub candidates: &'a [PenaltyCandidate],
    pub penalized: &'a [EdgeKey],
    pub elite_active: bool,
}

/// Read-only hooks into a run. All methods default to no-ops.
pub trait SearchObserver {
    /// After each iteration's penalization, or after an interrupted final
    /// local search.
    fn on_iteration(&mut self, _view: &IterationView<'_>) {}

    /// Opt in to [`PenalizeEvent::candidates`]; filling it costs an extra
    /// pass over the tour.
    fn wants_penalize_details(&self) -> bool {
        false
    }

    fn on_penalize(&mut self, _event: &PenalizeEvent<'_>) {}
}

impl SearchObserver for () {}

/// Utility rule used at each penalization; lets the elite-biased variant
/// share the loop.
pub(crate) trait UtilityPolicy {
    /// Called just before the penalization of `iteration`.
    fn prepare(&mut self, _iteration: u64, _best: &Tour, _elapsed: Duration) {}

    fn utility(&self, edge: EdgeKey, c: i64, p: u32) -> Utility;

    fn in_elite(&self, _edge: EdgeKey) -> bool {
        false
    }

    fn elite_active(&self) -> bool {
        false
    }
}

pub(crate) struct StandardUtility;

impl UtilityPolicy for StandardUtility {
    #[inline]
    fn utility(&self, edge: EdgeKey, c: i64, p: u32) -> Utility {
        utility(edge, true, c, p)
    }
}

/// Tracks the best tour per applied move without copying on every
/// improvement: while the current tour is the best one, the copy is deferred
/// until a non-improving move is about to leave it.
struct BestTracker {
    best: Tour,
    best_cost: i64,
    best_is_current: bool,
    target: Option<i64>,
    deadline: Option<Instant>,
    stop: Option<StopReason>,
}

impl BestTracker {
    fn sync(&mut self, current: &Tour) {
        if self.best_is_current {
            self.best.clone_from(current);
            self.best_is_current = false;
        }
    }
}

impl MoveMonitor for BestTracker {
    #[inline]
    fn before_move(&mut self, tour: &Tour, delta_g: i64) {
        if self.best_is_current && delta_g >= 0 {
            self.best.clone_from(tour);
            self.best_is_current = false;
        }
    }

    #[inline]
    fn after_move(&mut self, tour: &Tour) -> Control {
        if tour.cost() < self.best_cost {
            self.best_cost = tour.cost();
            self.best_is_current = true;
            if self.target.is_some_and(|t| self.best_cost <= t) {
                self.stop = Some(StopReason::TargetReached);
                return Control::Stop;
            }
        }
        Control::Continue
    }

    #[inline]
    fn poll(&mut self) -> Control {
        if self.deadline.is_some_and(|d| Instant::now() >= d) {
            self.stop = Some(StopReason::TimeLimit);
            return Control::Stop;
        }
        Control::Continue
    }
}

pub(crate) fn run_engine<P: UtilityPolicy, O: SearchObserver>(
    inst: &Instance,
    cands: &CandidateLists,
    cfg: &GlsConfig,
    start: Tour,
    policy: &mut P,
    observer: &mut O,
) -> Result<RunOutcome> {
    let coeff = cfg.validate()?;
    let n = inst.dimension();
    if start.len() != n {
        return Err(Error::SizeMismatch {
            expected: n,
            found: start.len(),
        });
    }
    if cands.of(0).len() != cands.width() || cands.width() + 1 > n {
        return Err(Error::InvalidArgument(
            "candidate lists do not match the instance".into(),
        ));
    }
    let t0 = Instant::now();
    let stop = cfg.stop;
    let start_cost = start.cost();
    let mut tracker = BestTracker {
        best: start.clone(),
        best_cost: start_cost,
        best_is_current: false,
        target: stop.target_cost,
        deadline: stop.time_limit.map(|d| t0 + d),
        stop: None,
    };
    let mut current = start;
    let mut penalties = PenaltyStore::new(n);
    let mut lambda = Lambda::ZERO;
    let mut bits = ActivationBits::all_set(n);
    let mut cursor = 0usize;
    let mut iteration = 0u64;
    let mut first_local_opt_cost = None;
    let mut trajectory = Vec::new();
    let details = observer.wants_penalize_details();
    let mut cand_buf: Vec<PenaltyCandidate> = Vec::new();

    let reason = loop {
        if stop.target_cost.is_some_and(|t| tracker.best_cost <= t) {
            break StopReason::TargetReached;
        }
        if stop.max_iterations.is_some_and(|k| iteration >= k) {
            break StopReason::IterationLimit;
        }
        if tracker.deadline.is_some_and(|d| Instant::now() >= d) {
            break StopReason::TimeLimit;
        }
        iteration += 1;
        let before = tracker.best_cost;
        let report = {
            let guide = GuideFunction::new(inst, lambda, &penalties);
            local_search_2opt_fls(inst, &mut current, &guide, &mut bits, cands, &mut cursor, &mut tracker)
        };
        tracker.sync(&current);
        let improved = tracker.best_cost < before;
        if improved {
            trajectory.push(TrajectoryPoint {
                iteration,
                cost: tracker.best_cost,
            });
        }
        if report.outcome == LsOutcome::Interrupted {
            observer.on_iteration(&IterationView {
                iteration,
                best: &tracker.best,
                improved,
                current: &current,
                penalties: &penalties,
                lambda,
                interrupted: true,
                elapsed: t0.elapsed(),
            });
            break tracker.stop.expect("interrupted search records its reason");
        }
        if iteration == 1 {
            first_local_opt_cost = Some(current.cost());
            lambda = compute_lambda(current.cost(), n, coeff).unwrap_or(Lambda::ZERO);
        }
        policy.prepare(iteration, &tracker.best, t0.elapsed());
        if details {
            cand_buf.clear();
            cand_buf.extend(current.edges().map(|e| PenaltyCandidate {
                edge: e,
                cost: inst.dist(e.lo(), e.hi()),
                p_before: penalties.get_edge(e),
                in_elite: policy.in_elite(e),
            }));
        }
        let penalized = penalize(&mut penalties, inst, &current, |e, c, p| policy.utility(e, c, p));
        observer.on_penalize(&PenalizeEvent {
            iteration,
            candidates: &cand_buf,
            penalized: &penalized,
            elite_active: policy.elite_active(),
        });
        activate_penalized(&mut bits, &penalized);
        observer.on_iteration(&IterationView {
            iteration,
            best: &tracker.best,
            improved,
            current: &current,
            penalties: &penalties,
            lambda,
            interrupted: false,
            elapsed: t0.elapsed(),
        });
    };
    tracker.sync(&current);
    Ok(RunOutcome {
        best: tracker.best,
        state: SearchState {
            current,
            penalties,
            lambda,
            iteration,
        },
        stop: reason,
        elapsed: t0.elapsed(),
        start_cost,
        first_local_opt_cost,
        trajectory,
    })
}

/// Runs GLS from the start tour `cfg` prescribes, with candidate lists built
/// for the instance.
pub fn run_gls(inst: &Instance, cfg: &GlsConfig) -> Result<RunOutcome> {
    let cands = CandidateLists::build(inst);
    let start = cfg.start_tour(inst)?;
    run_gls_with(inst, &cands, cfg, start, &mut ())
}

/// Runs GLS from an explicit start tour with shared candidate lists.
pub fn run_gls_with<O: SearchObserver>(
    inst: &Instance,
    cands: &CandidateLists,
    cfg: &GlsConfig,
    start: Tour,
    observer: &mut O,
) -> Result<RunOutcome> {
    run_engine(inst, cands, cfg, start, &mut StandardUtility, observer)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::WeightRule;

    #[test]
    fn lambda_from_first_optimum() {
        let c = coefficient_ratio(0.3).unwrap();
        assert_eq!(c, Ratio::new(3, 10));
        let l = compute_lambda(30000, 532, c).unwrap();
        assert_eq!(l.to_ratio(), Ratio::new(9000, 532));
        assert_eq!(compute_lambda(532, 532, c).unwrap().to_ratio(), Ratio::new(3, 10));
        let l2 = compute_lambda(60000, 532, c).unwrap();
        assert_eq!(l2.to_ratio(), l.to_ratio() * 2);
        assert!(compute_lambda(0, 532, c).is_err());
        assert!(compute_lambda(10, 2, c).is_err());
        assert!(coefficient_ratio(0.0).is_err());
        assert!(coefficient_ratio(f64::NAN).is_err());
    }

    #[test]
    fn utility_values() {
        let e = EdgeKey::new(0, 1);
        assert_eq!(utility(e, false, 10, 0), Utility::ZERO);
        assert_eq!(utility(e, true, 10, 0).to_ratio(), Ratio::from_integer(10));
        assert_eq!(utility(e, true, 10, 4).to_ratio(), Ratio::from_integer(2));
        for p in 0..50 {
            assert!(utility(e, true, 10, p) > utility(e, true, 10, p + 1));
        }
    }

    fn line(n: usize) -> Instance {
        let coords = (0..n).map(|i| (i as f64 * 10.0, ((i * i) % 7) as f64)).collect();
        Instance::from_coords("line", WeightRule::Euc2d, coords).unwrap()
    }

    #[test]
    fn penalize_full_tie() {
        let coords = vec![(0.0, 0.0), (10.0, 0.0), (10.0, 10.0), (0.0, 10.0)];
        let inst = Instance::from_coords("sq", WeightRule::Euc2d, coords).unwrap();
        let t = Tour::identity(&inst);
        let mut p = PenaltyStore::new(4);
        let chosen = penalize(&mut p, &inst, &t, |e, c, q| utility(e, true, c, q));
        assert_eq!(chosen.len(), 4);
        assert_eq!(p.total(), 4);
    }

    #[test]
    fn penalize_picks_argmax() {
        // Edges (c, p) = (10, 0), (8, 0), (10, 1) plus a cheap closing edge.
        let inst = Instance::from_matrix(
            "m",
            &[
                vec![0, 10, 3, 1],
                vec![10, 0, 8, 3],
                vec![3, 8, 0, 10],
                vec![1, 3, 10, 0],
            ],
        )
        .unwrap();
        let t = Tour::identity(&inst);
        let mut p = PenaltyStore::new(4);
        p.increment(EdgeKey::new(2, 3));
        let chosen = penalize(&mut p, &inst, &t, |e, c, q| utility(e, true, c, q));
        assert_eq!(chosen, vec![EdgeKey::new(0, 1)]);
        assert_eq!(p.get(0, 1), 1);
        assert_eq!(p.get(2, 3), 1);
    }

    #[test]
    fn zero_budget_returns_start() {
        let inst = line(12);
        let cfg = GlsConfig::new(StopCriteria::iterations(0), 4);
        let out = run_gls(&inst, &cfg).unwrap();
        assert_eq!(out.best, cfg.start_tour(&inst).unwrap());
        assert_eq!(out.state.iteration, 0);
        assert_eq!(out.stop, StopReason::IterationLimit);
    }

    #[test]
    fn unbounded_config_rejected() {
        let inst = line(12);
        let cfg = GlsConfig::new(StopCriteria::default(), 4);
        assert!(run_gls(&inst, &cfg).is_err());
    }

    #[test]
    fn finds_square_perimeter() {
        let coords = vec![(0.0, 0.0), (10.0, 0.0), (10.0, 10.0), (0.0, 10.0)];
        let inst = Instance::from_coords("sq", WeightRule::Euc2d, coords).unwrap();
        for seed in 0..20 {
            let cfg = GlsConfig::new(StopCriteria::iterations(10), seed);
            let out = run_gls(&inst, &cfg).unwrap();
            assert_eq!(out.best.cost(), 40);
        }
    }

    #[test]
    fn deterministic_iteration_budget() {
        let inst = line(40);
        let cfg = GlsConfig::new(StopCriteria::iterations(300), 11);
        let a = run_gls(&inst, &cfg).unwrap();
        let b = run_gls(&inst, &cfg).unwrap();
        assert_eq!(a.best, b.best);
        assert_eq!(a.trajectory, b.trajectory);
        assert_eq!(a.state.iteration, 300);
        a.best.check_invariants(&inst).unwrap();
        a.state.current.check_invariants(&inst).unwrap();
    }
}
