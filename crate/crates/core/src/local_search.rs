//! 2-opt local search on the augmented objective with per-city activation
//! bits and first-improvement pivoting.

use num_integer::Integer;
use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::instance::{EdgeKey, Instance};
use crate::penalty::PenaltyStore;
use crate::tour::Tour;

/// Instances up to this size scan every other city as a 2-opt partner.
pub const FULL_NEIGHBORHOOD_THRESHOLD: usize = 1000;
/// Candidate list length above [`FULL_NEIGHBORHOOD_THRESHOLD`].
pub const DEFAULT_NEIGHBORS: usize = 20;

/// Non-negative penalty weight kept as a reduced fraction `num / den`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Lambda {
    num: i64,
    den: i64,
}

impl Lambda {
    pub const ZERO: Lambda = Lambda { num: 0, den: 1 };

    pub fn new(num: i64, den: i64) -> Result<Self> {
        if den <= 0 || num < 0 {
            return Err(Error::InvalidArgument(format!(
                "lambda {num}/{den} must be non-negative"
            )));
        }
        let g = num.gcd(&den);
        Ok(Lambda {
            num: num / g,
            den: den / g,
        })
    }

    pub fn numer(self) -> i64 {
        self.num
    }

    pub fn denom(self) -> i64 {
        self.den
    }

    pub fn to_ratio(self) -> Ratio<i64> {
        Ratio::new_raw(self.num, self.den)
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `den * dg + num * dp`, which has the sign of `dg + lambda * dp`.
    #[inline]
    pub fn scaled(self, dg: i64, dp: i64) -> i64 {
        self.den * dg + self.num * dp
    }
}

/// h = g + λ Σ p_e over the tour's edges.
#[derive(Debug, Clone, Copy)]
pub struct GuideFunction<'a> {
    pub inst: &'a Instance,
    pub lambda: Lambda,
    pub penalties: &'a PenaltyStore,
}

impl<'a> GuideFunction<'a> {
    pub fn new(inst: &'a Instance, lambda: Lambda, penalties: &'a PenaltyStore) -> Self {
        GuideFunction {
            inst,
            lambda,
            penalties,
        }
    }

    /// h(tour) as an exact fraction.
    pub fn evaluate(&self, tour: &Tour) -> Ratio<i128> {
        let g = tour.cost() as i128;
        let p = self.penalties.tour_penalty(tour) as i128;
        Ratio::from_integer(g) + Ratio::new(self.lambda.num as i128, self.lambda.den as i128) * p
    }
}

/// One bit per city; a set bit means the city's sub-neighborhood must be
/// scanned again.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActivationBits {
    bits: Vec<bool>,
    active: usize,
}

impl ActivationBits {
    pub fn all_set(n: usize) -> Self {
        ActivationBits {
            bits: vec![true; n],
            active: n,
        }
    }

    pub fn all_clear(n: usize) -> Self {
        ActivationBits {
            bits: vec![false; n],
            active: 0,
        }
    }

    #[inline]
    pub fn is_set(&self, c: usize) -> bool {
        self.bits[c]
    }

    #[inline]
    pub fn set(&mut self, c: usize) {
        if !self.bits[c] {
            self.bits[c] = true;
            self.active += 1;
        }
    }

    #[inline]
    pub fn clear(&mut self, c: usize) {
        if self.bits[c] {
            self.bits[c] = false;
            self.active -= 1;
        }
    }

    pub fn set_all(&mut self) {
        self.bits.iter_mut().for_each(|b| *b = true);
        self.active = self.bits.len();
    }

    pub fn count(&self) -> usize {
        self.active
    }

    pub fn none_set(&self) -> bool {
        self.active == 0
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
}

/// Sets the bits of both endpoints of every edge in `edges`.
pub fn activate_penalized<'e>(bits: &mut ActivationBits, edges: impl IntoIterator<Item = &'e EdgeKey>) {
    for e in edges {
        bits.set(e.lo());
        bits.set(e.hi());
    }
}

/// Per-city partner lists sorted by `(distance, index)`.
#[derive(Debug, Clone)]
pub struct CandidateLists {
    width: usize,
    flat: Vec<u32>,
}

impl CandidateLists {
    /// Full neighborhood up to [`FULL_NEIGHBORHOOD_THRESHOLD`] cities, the
    /// [`DEFAULT_NEIGHBORS`] nearest above.
    pub fn build(inst: &Instance) -> Self {
        let n = inst.dimension();
        let k = if n <= FULL_NEIGHBORHOOD_THRESHOLD {
            n - 1
        } else {
            DEFAULT_NEIGHBORS
        };
        Self::nearest(inst, k)
    }

    /// The `k` nearest cities of each city (capped at `N - 1`).
    pub fn nearest(inst: &Instance, k: usize) -> Self {
        let n = inst.dimension();
        let k = k.clamp(1, n - 1);
        let mut flat = Vec::with_capacity(n * k);
        let mut row: Vec<(i64, u32)> = Vec::with_capacity(n - 1);
        for a in 0..n {
            row.clear();
            row.extend((0..n).filter(|&b| b != a).map(|b| (inst.dist(a, b), b as u32)));
            if k < row.len() {
                row.select_nth_unstable(k - 1);
                row.truncate(k);
            }
            row.sort_unstable();
            flat.extend(row.iter().map(|&(_, b)| b));
        }
        CandidateLists { width: k, flat }
    }

    /// List length per city.
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn of(&self, city: usize) -> &[u32] {
        &self.flat[city * self.width..(city + 1) * self.width]
    }
}

/// A 2-opt move given by two edge positions `i < j`: it removes
/// `(o[i], o[i+1])` and `(o[j], o[j+1 mod N])` and reverses positions
/// `i+1..=j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TwoOptMove {
    pub i: usize,
    pub j: usize,
}

impl TwoOptMove {
    /// Rejects out-of-range positions and moves whose two edges share a city.
    pub fn new(i: usize, j: usize, n: usize) -> Result<Self> {
        if i >= j || j >= n || j == i + 1 || (i == 0 && j == n - 1) {
            return Err(Error::InvalidMove { i, j });
        }
        Ok(TwoOptMove { i, j })
    }

    /// Cities `(a, b, c, d)` with removed edges `a-b`, `c-d`.
    pub fn endpoints(self, tour: &Tour) -> (usize, usize, usize, usize) {
        let n = tour.len();
        (
            tour.city_at(self.i),
            tour.city_at(self.i + 1),
            tour.city_at(self.j),
            tour.city_at((self.j + 1) % n),
        )
    }
}

/// `(delta_g, delta_h)` of applying `mv`, from the four touched edges.
pub fn move_delta(
    inst: &Instance,
    tour: &Tour,
    mv: TwoOptMove,
    guide: &GuideFunction<'_>,
) -> Result<(i64, Ratio<i64>)> {
    let n = tour.len();
    TwoOptMove::new(mv.i, mv.j, n)?;
    let (a, b, c, d) = mv.endpoints(tour);
    let dg = inst.dist(a, c) + inst.dist(b, d) - inst.dist(a, b) - inst.dist(c, d);
    let p = guide.penalties;
    let dp = p.get(a, c) as i64 + p.get(b, d) as i64 - p.get(a, b) as i64 - p.get(c, d) as i64;
    let dh = Ratio::from_integer(dg) + guide.lambda.to_ratio() * dp;
    Ok((dg, dh))
}

/// Applies `mv` in place and returns its `delta_g`.
pub fn apply_move(inst: &Instance, tour: &mut Tour, mv: TwoOptMove) -> Result<i64> {
    TwoOptMove::new(mv.i, mv.j, tour.len())?;
    let (a, b, c, d) = mv.endpoints(tour);
    let dg = inst.dist(a, c) + inst.dist(b, d) - inst.dist(a, b) - inst.dist(c, d);
    tour.reverse(mv.i + 1, mv.j);
    tour.add_cost(dg);
    Ok(dg)
}

/// Whether a search keeps going after a hook fires.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

/// Hooks called from inside the local search.
pub trait MoveMonitor {
    /// Before an improving move with `delta_g` is applied to `tour`.
    #[inline]
    fn before_move(&mut self, _tour: &Tour, _delta_g: i64) {}

    /// After the move has been applied.
    #[inline]
    fn after_move(&mut self, _tour: &Tour) -> Control {
        Control::Continue
    }

    /// Once per scanned city.
    #[inline]
    fn poll(&mut self) -> Control {
        Control::Continue
    }
}

/// A monitor that never interrupts.
#[derive(Debug, Default, Clone, Copy)]
pub struct NoMonitor;

impl MoveMonitor for NoMonitor {}

/// How a local-search call ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LsOutcome {
    /// No city is active: the tour is 2-opt optimal under the guide.
    Converged,
    /// A monitor hook returned [`Control::Stop`].
    Interrupted,
}

/// Summary counters of one local-search call.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LsReport {
    pub outcome: LsOutcome,
    pub moves: u64,
}

/// First-improvement 2-opt under `guide`, restricted to moves that connect a
/// scanned city to one of its candidates.
///
/// Active cities are visited in circular order starting at `*cursor`. A city
/// with an improving move applies it, activates the four endpoints and is
/// scanned again; otherwise its bit is cleared. On return `*cursor` holds the
/// last city scanned, so consecutive calls resume where the previous one
/// stopped. When the outcome is [`LsOutcome::Converged`] every bit is clear.
#[allow(clippy::too_many_arguments)]
pub fn local_search_2opt_fls<M: MoveMonitor>(
    inst: &Instance,
    tour: &mut Tour,
    guide: &GuideFunction<'_>,
    bits: &mut ActivationBits,
    cands: &CandidateLists,
    cursor: &mut usize,
    monitor: &mut M,
) -> LsReport {
    let n = tour.len();
    let lambda = guide.lambda;
    let pen = guide.penalties;
    let mut moves = 0u64;
    let mut a = *cursor % n;
    while !bits.none_set() {
        if !bits.is_set(a) {
            a = if a + 1 == n { 0 } else { a + 1 };
            continue;
        }
        *cursor = a;
        if monitor.poll() == Control::Stop {
            return LsReport {
                outcome: LsOutcome::Interrupted,
                moves,
            };
        }
        match find_improving(inst, tour, pen, lambda, cands, a) {
            Some((forward, c, dg)) => {
                let (b, d) = if forward {
                    (tour.next(a), tour.next(c))
                } else {
                    (tour.prev(a), tour.prev(c))
                };
                monitor.before_move(tour, dg);
                if forward {
                    tour.reverse(tour.position(b), tour.position(c));
                } else {
                    tour.reverse(tour.position(a), tour.position(d));
                }
                tour.add_cost(dg);
                moves += 1;
                for x in [a, b, c, d] {
                    bits.set(x);
                }
                if monitor.after_move(tour) == Control::Stop {
                    return LsReport {
                        outcome: LsOutcome::Interrupted,
                        moves,
                    };
                }
            }
            None => {
                bits.clear(a);
                a = if a + 1 == n { 0 } else { a + 1 };
            }
        }
    }
    LsReport {
        outcome: LsOutcome::Converged,
        moves,
    }
}

/// First move in `a`'s sub-neighborhood that lowers h, as
/// `(forward, c, delta_g)`. Forward moves replace `a-next(a)`, `c-next(c)`;
/// backward moves replace `prev(a)-a`, `prev(c)-c`. Both add `a-c`.
#[inline]
fn find_improving(
    inst: &Instance,
    tour: &Tour,
    pen: &PenaltyStore,
    lambda: Lambda,
    cands: &CandidateLists,
    a: usize,
) -> Option<(bool, usize, i64)> {
    for forward in [true, false] {
        let b = if forward { tour.next(a) } else { tour.prev(a) };
        let d_ab = inst.dist(a, b);
        let p_ab = pen.get(a, b) as i64;
        for &c in cands.of(a) {
            let c = c as usize;
            let d = if forward { tour.next(c) } else { tour.prev(c) };
            if c == b || d == a {
                continue;
            }
            let dg = inst.dist(a, c) + inst.dist(b, d) - d_ab - inst.dist(c, d);
            let dp = pen.get(a, c) as i64 + pen.get(b, d) as i64 - p_ab - pen.get(c, d) as i64;
            if lambda.scaled(dg, dp) < 0 {
                return Some((forward, c, dg));
            }
        }
    }
    None
}

/// Convenience wrapper: full activation, no monitor, cursor at city 0.
pub fn local_search(inst: &Instance, tour: &mut Tour, guide: &GuideFunction<'_>, cands: &CandidateLists) -> LsReport {
    let mut bits = ActivationBits::all_set(tour.len());
    let mut cursor = 0;
    local_search_2opt_fls(inst, tour, guide, &mut bits, cands, &mut cursor, &mut NoMonitor)
}
