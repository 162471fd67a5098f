//! Elite-biased GLS: after a warm-up, penalization favors edges outside a
//! periodically refreshed elite tour.

use std::collections::HashSet;
use std::time::Duration;

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::gls::{run_engine, utility, GlsConfig, RunOutcome, SearchObserver, Utility, UtilityPolicy};
use crate::instance::{EdgeKey, Instance};
use crate::local_search::CandidateLists;
use crate::tour::Tour;

/// Default weight on non-elite utilities.
pub const DEFAULT_W: i64 = 2;
/// Default number of iterations between elite refreshes.
pub const DEFAULT_ELITE_PERIOD: u64 = 100;
/// Instances below this size use no warm-up under the default schedule.
pub const WARMUP_SIZE_THRESHOLD: usize = 1000;
/// Default warm-up length of iteration-limited runs on large instances.
pub const DEFAULT_WARMUP_ITERATIONS: u64 = 10_000;

/// How long the run behaves exactly like GLS before the elite bias starts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Warmup {
    None,
    /// Iterations `1..=k` penalize with the plain utility.
    Iterations(u64),
    /// This fraction of the run's time limit.
    TimeFraction(f64),
    /// A fixed wall-clock span.
    Duration(Duration),
}

impl Warmup {
    /// No warm-up below [`WARMUP_SIZE_THRESHOLD`] cities. Above it a tenth of
    /// the time limit rounded down to whole seconds, or
    /// [`DEFAULT_WARMUP_ITERATIONS`] when the run has no time limit.
    pub fn default_for(n: usize, time_limit: Option<Duration>) -> Self {
        if n < WARMUP_SIZE_THRESHOLD {
            return Warmup::None;
        }
        match time_limit {
            Some(t) => Warmup::Duration(Duration::from_secs(t.as_secs() / 10)),
            None => Warmup::Iterations(DEFAULT_WARMUP_ITERATIONS),
        }
    }
}

/// Parameters of an EB-GLS run.
#[derive(Debug, Clone, PartialEq)]
pub struct EbglsConfig {
    pub base: GlsConfig,
    /// Non-elite multiplier, `> 1`.
    pub w: Ratio<i64>,
    pub warmup: Warmup,
    pub elite_update_period: u64,
}

impl EbglsConfig {
    pub fn new(base: GlsConfig, warmup: Warmup) -> Self {
        EbglsConfig {
            base,
            w: Ratio::from_integer(DEFAULT_W),
            warmup,
            elite_update_period: DEFAULT_ELITE_PERIOD,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if *self.w.denom() <= 0 || self.w <= Ratio::from_integer(1) {
            return Err(Error::InvalidArgument(format!("w = {} must exceed 1", self.w)));
        }
        self.validate_common()
    }

    fn validate_common(&self) -> Result<()> {
        if self.elite_update_period == 0 {
            return Err(Error::InvalidArgument("elite update period must be at least 1".into()));
        }
        match self.warmup {
            Warmup::TimeFraction(f) if !(0.0..=1.0).contains(&f) => Err(Error::InvalidArgument(format!(
                "warm-up fraction {f} must lie in [0, 1]"
            ))),
            Warmup::TimeFraction(_) if self.base.stop.time_limit.is_none() => Err(Error::InvalidArgument(
                "a time-fraction warm-up needs a time limit".into(),
            )),
            _ => Ok(()),
        }
    }

    fn warmup_span(&self) -> Option<Duration> {
        match self.warmup {
            Warmup::TimeFraction(f) => self.base.stop.time_limit.map(|t| t.mul_f64(f)),
            Warmup::Duration(d) => Some(d),
            _ => None,
        }
    }
}

/// `c / (1 + p)` for elite edges, `w` times that otherwise; 0 for edges not
/// in the solution.
pub fn utility_eb(edge: EdgeKey, in_solution: bool, c: i64, p: u32, in_elite: bool, w: Ratio<i64>) -> Utility {
    if !in_solution {
        return Utility::ZERO;
    }
    if in_elite {
        utility(edge, true, c, p)
    } else {
        Utility::new(c as i128 * *w.numer() as i128, (1 + p as i128) * *w.denom() as i128)
    }
}

/// The elite tour as neighbor arrays, so edge membership is O(1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EliteState {
    next: Vec<u32>,
    prev: Vec<u32>,
    cost: i64,
    last_refresh_iteration: u64,
}

impl EliteState {
    pub fn from_tour(tour: &Tour, iteration: u64) -> Self {
        let n = tour.len();
        let mut next = vec![0u32; n];
        let mut prev = vec![0u32; n];
        for c in 0..n {
            next[c] = tour.next(c) as u32;
            prev[c] = tour.prev(c) as u32;
        }
        EliteState {
            next,
            prev,
            cost: tour.cost(),
            last_refresh_iteration: iteration,
        }
    }

    #[inline]
    pub fn contains(&self, e: EdgeKey) -> bool {
        let (a, b) = e.endpoints();
        self.next[a] as usize == b || self.prev[a] as usize == b
    }

    pub fn cost(&self) -> i64 {
        self.cost
    }

    pub fn last_refresh_iteration(&self) -> u64 {
        self.last_refresh_iteration
    }

    pub fn edges(&self) -> HashSet<EdgeKey> {
        (0..self.next.len())
            .map(|a| EdgeKey::new(a, self.next[a] as usize))
            .collect()
    }
}

/// Refreshes `elite` from `best` once `period` iterations have passed since
/// the last refresh. The elite tour is only replaced by a strictly cheaper
/// one; the refresh clock restarts either way. Returns whether the tour was
/// replaced.
pub fn refresh_elite(elite: &mut EliteState, best: &Tour, iteration: u64, period: u64) -> bool {
    if iteration.saturating_sub(elite.last_refresh_iteration) < period {
        return false;
    }
    elite.last_refresh_iteration = iteration;
    if best.cost() < elite.cost {
        *elite = EliteState::from_tour(best, iteration);
        true
    } else {
        false
    }
}

struct ElitePolicy {
    w: Ratio<i64>,
    warmup: Warmup,
    warmup_span: Option<Duration>,
    period: u64,
    elite: Option<EliteState>,
    refreshes: Vec<(u64, i64)>,
}

impl ElitePolicy {
    fn in_warmup(&self, iteration: u64, elapsed: Duration) -> bool {
        match self.warmup {
            Warmup::None => false,
            Warmup::Iterations(k) => iteration <= k,
            Warmup::TimeFraction(_) | Warmup::Duration(_) => self.warmup_span.is_some_and(|s| elapsed < s),
        }
    }
}

impl UtilityPolicy for ElitePolicy {
    fn prepare(&mut self, iteration: u64, best: &Tour, elapsed: Duration) {
        let warm = self.in_warmup(iteration, elapsed);
        match &mut self.elite {
            Some(elite) => {
                if refresh_elite(elite, best, iteration, self.period) {
                    self.refreshes.push((iteration, elite.cost));
                }
            }
            None if !warm => {
                let elite = EliteState::from_tour(best, iteration);
                self.refreshes.push((iteration, elite.cost));
                self.elite = Some(elite);
            }
            None => {}
        }
    }

    #[inline]
    fn utility(&self, edge: EdgeKey, c: i64, p: u32) -> Utility {
        match &self.elite {
            Some(elite) => utility_eb(edge, true, c, p, elite.contains(edge), self.w),
            None => utility(edge, true, c, p),
        }
    }

    fn in_elite(&self, edge: EdgeKey) -> bool {
        self.elite.as_ref().is_some_and(|e| e.contains(edge))
    }

    fn elite_active(&self) -> bool {
        self.elite.is_some()
    }
}

/// Result of [`run_ebgls`].
#[derive(Debug, Clone)]
pub struct EbglsOutcome {
    pub run: RunOutcome,
    /// `None` when the run ended inside the warm-up.
    pub elite: Option<EliteState>,
    /// `(iteration, elite cost)` at initialization and each replacement.
    pub elite_history: Vec<(u64, i64)>,
}

/// Runs EB-GLS from the start tour the base config prescribes.
pub fn run_ebgls(inst: &Instance, cfg: &EbglsConfig) -> Result<EbglsOutcome> {
    let cands = CandidateLists::build(inst);
    let start = cfg.base.start_tour(inst)?;
    run_ebgls_with(inst, &cands, cfg, start, &mut ())
}

/// Runs EB-GLS from an explicit start tour with shared candidate lists.
pub fn run_ebgls_with<O: SearchObserver>(
    inst: &Instance,
    cands: &CandidateLists,
    cfg: &EbglsConfig,
    start: Tour,
    observer: &mut O,
) -> Result<EbglsOutcome> {
    cfg.validate()?;
    run_unchecked(inst, cands, cfg, start, observer)
}

/// Like [`run_ebgls_with`] but accepts any `w > 0`, including the degenerate
/// `w = 1`. Meant for equivalence experiments.
pub fn run_ebgls_any_w<O: SearchObserver>(
    inst: &Instance,
    cands: &CandidateLists,
    cfg: &EbglsConfig,
    start: Tour,
    observer: &mut O,
) -> Result<EbglsOutcome> {
    if *cfg.w.denom() <= 0 || *cfg.w.numer() <= 0 {
        return Err(Error::InvalidArgument(format!("w = {} must be positive", cfg.w)));
    }
    cfg.validate_common()?;
    run_unchecked(inst, cands, cfg, start, observer)
}

fn run_unchecked<O: SearchObserver>(
    inst: &Instance,
    cands: &CandidateLists,
    cfg: &EbglsConfig,
    start: Tour,
    observer: &mut O,
) -> Result<EbglsOutcome> {
    let mut policy = ElitePolicy {
        w: cfg.w,
        warmup: cfg.warmup,
        warmup_span: cfg.warmup_span(),
        period: cfg.elite_update_period,
        elite: None,
        refreshes: Vec::new(),
    };
    let run = run_engine(inst, cands, &cfg.base, start, &mut policy, observer)?;
    Ok(EbglsOutcome {
        run,
        elite: policy.elite,
        elite_history: policy.refreshes,
    })
}
