//! Run metrics and the two-sample rank test used to compare algorithms.

use std::collections::HashSet;

use num_rational::Ratio;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::gls::{IterationView, PenalizeEvent, SearchObserver};
use crate::instance::EdgeKey;
use crate::landscape::nearest_optimum_distance;
use crate::penalty::PenaltyStore;
use crate::tour::Tour;

/// Samples smaller than this (on the smaller side) get the exact null
/// distribution.
pub const EXACT_THRESHOLD: usize = 8;
/// Default checkpoint stride in iterations.
pub const DEFAULT_STRIDE: u64 = 1000;

/// Relative gap of `best_cost` over `optimal_cost`, in percent.
pub fn excess(best_cost: i64, optimal_cost: i64) -> Result<f64> {
    if optimal_cost <= 0 {
        return Err(Error::InvalidArgument(format!(
            "optimal cost {optimal_cost} must be positive"
        )));
    }
    if best_cost < optimal_cost {
        return Err(Error::BrokenOptimum {
            best: best_cost,
            optimal: optimal_cost,
        });
    }
    Ok((best_cost - optimal_cost) as f64 / optimal_cost as f64 * 100.0)
}

fn check_rectangular<T>(values: &[Vec<T>]) -> Result<usize> {
    let first = values.first().ok_or(Error::EmptySample)?;
    let k = first.len();
    if let Some(row) = values.iter().find(|r| r.len() != k) {
        return Err(Error::SizeMismatch {
            expected: k,
            found: row.len(),
        });
    }
    Ok(k)
}

/// Per-checkpoint mean over runs; `values[run][checkpoint]`.
pub fn average_series(values: &[Vec<f64>]) -> Result<Vec<f64>> {
    let k = check_rectangular(values)?;
    let m = values.len() as f64;
    Ok((0..k).map(|j| values.iter().map(|r| r[j]).sum::<f64>() / m).collect())
}

/// [`average_series`] over integer data with exact fractions.
pub fn average_series_exact(values: &[Vec<i64>]) -> Result<Vec<Ratio<i128>>> {
    let k = check_rectangular(values)?;
    let m = values.len() as i128;
    Ok((0..k)
        .map(|j| Ratio::new(values.iter().map(|r| r[j] as i128).sum(), m))
        .collect())
}

/// Share of the total penalty mass sitting on `good_edges`.
pub fn undesirable_ratio(penalties: &PenaltyStore, good_edges: &HashSet<EdgeKey>) -> Result<f64> {
    let total = penalties.total();
    if total == 0 {
        return Err(Error::Degenerate("no penalty has been placed"));
    }
    let good: u64 = good_edges.iter().map(|&e| penalties.get_edge(e) as u64).sum();
    Ok(good as f64 / total as f64)
}

/// Result of [`mann_whitney_u`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UTest {
    /// U statistic of the first sample.
    pub u: f64,
    /// Two-sided p-value.
    pub p: f64,
    pub exact: bool,
}

/// Midranks (1-based) of the pooled sample and the tie-group sizes.
fn midranks(pooled: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut idx: Vec<usize> = (0..pooled.len()).collect();
    idx.sort_by(|&x, &y| pooled[x].total_cmp(&pooled[y]));
    let mut ranks = vec![0.0; pooled.len()];
    let mut ties = Vec::new();
    let mut i = 0;
    while i < idx.len() {
        let mut j = i + 1;
        while j < idx.len() && pooled[idx[j]] == pooled[idx[i]] {
            j += 1;
        }
        let r = (i + 1 + j) as f64 / 2.0;
        for &k in &idx[i..j] {
            ranks[k] = r;
        }
        ties.push(j - i);
        i = j;
    }
    (ranks, ties)
}

/// Mann-Whitney U test with midranks for ties.
///
/// When the smaller sample has fewer than [`EXACT_THRESHOLD`] values the
/// p-value comes from the exact permutation distribution of the rank sum
/// (ties included). Otherwise the tie-corrected normal approximation with
/// continuity correction is used; zero variance gives p = 1.
pub fn mann_whitney_u(a: &[f64], b: &[f64]) -> Result<UTest> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySample);
    }
    if a.iter().chain(b).any(|v| v.is_nan()) {
        return Err(Error::InvalidArgument("samples contain NaN".into()));
    }
    let (na, nb) = (a.len(), b.len());
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let (ranks, ties) = midranks(&pooled);
    let ra: f64 = ranks[..na].iter().sum();
    let u = ra - (na * (na + 1)) as f64 / 2.0;
    if na.min(nb) < EXACT_THRESHOLD {
        let (small, offset) = if na <= nb { (na, 0) } else { (nb, na) };
        let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r) as usize).collect();
        let observed: usize = doubled[offset..offset + small].iter().sum();
        let p = exact_two_sided(&doubled, small, observed);
        return Ok(UTest { u, p, exact: true });
    }
    let n = (na + nb) as f64;
    let mu = (na * nb) as f64 / 2.0;
    let tie_term: f64 = ties.iter().map(|&t| (t * t * t - t) as f64).sum();
    let var = (na * nb) as f64 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if var <= 0.0 {
        return Ok(UTest {
            u,
            p: 1.0,
            exact: false,
        });
    }
    let z = ((u - mu).abs() - 0.5).max(0.0) / var.sqrt();
    let normal = Normal::standard();
    let p = (2.0 * normal.sf(z)).min(1.0);
    Ok(UTest { u, p, exact: false })
}

/// P(|S - E S| >= |observed - E S|) for the sum S of `k` values drawn
/// without replacement from `doubled`, counting every subset once.
fn exact_two_sided(doubled: &[usize], k: usize, observed: usize) -> f64 {
    let max_sum: usize = doubled.iter().sum();
    let mut ways = vec![vec![0u128; max_sum + 1]; k + 1];
    ways[0][0] = 1;
    for &r in doubled {
        for j in (1..=k).rev() {
            let (lo, hi) = ways.split_at_mut(j);
            let (prev, cur) = (&lo[j - 1], &mut hi[0]);
            for s in (r..=max_sum).rev() {
                if prev[s - r] != 0 {
                    cur[s] += prev[s - r];
                }
            }
        }
    }
    let n = doubled.len();
    // Twice the mean doubled rank is 2 * (n + 1) / 2 per draw.
    let center2 = (k * (n + 1)) as i128;
    let obs_dev = (observed as i128 - center2).abs();
    let mut hit = 0u128;
    let mut total = 0u128;
    for (s, &w) in ways[k].iter().enumerate() {
        total += w;
        if (s as i128 - center2).abs() >= obs_dev {
            hit += w;
        }
    }
    (hit as f64 / total as f64).min(1.0)
}

/// Comparison of one lower-is-better metric between algorithms A and B.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricComparison {
    pub mean_a: f64,
    pub mean_b: f64,
    /// `None` when the test is not applicable.
    pub p: Option<f64>,
}

impl MetricComparison {
    fn a_significantly_better(&self, alpha: f64) -> bool {
        self.p.is_some_and(|p| p < alpha) && self.mean_a < self.mean_b
    }

    fn b_significantly_better(&self, alpha: f64) -> bool {
        self.p.is_some_and(|p| p < alpha) && self.mean_b < self.mean_a
    }
}

/// Outcome of a pairwise dominance comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    AWins,
    BWins,
    Incomparable,
}

impl Verdict {
    pub fn label(self, a: &str, b: &str) -> String {
        match self {
            Verdict::AWins => a.to_string(),
            Verdict::BWins => b.to_string(),
            Verdict::Incomparable => "incomparable".to_string(),
        }
    }
}

/// A wins iff it is not worse than B on success count, excess and runtime
/// and strictly better on at least one. Success counts compare by value;
/// excess and runtime need `p < alpha` in the direction of the lower mean.
pub fn dominance_verdict(
    success: (u32, u32),
    excess: &MetricComparison,
    runtime: &MetricComparison,
    alpha: f64,
) -> Verdict {
    let (sa, sb) = success;
    let a_worse = sa < sb || excess.b_significantly_better(alpha) || runtime.b_significantly_better(alpha);
    let b_worse = sb < sa || excess.a_significantly_better(alpha) || runtime.a_significantly_better(alpha);
    match (a_worse, b_worse) {
        (false, true) => Verdict::AWins,
        (true, false) => Verdict::BWins,
        _ => Verdict::Incomparable,
    }
}

/// State of one run at a checkpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Checkpoint {
    pub iteration: u64,
    pub best_cost: i64,
    /// Bond distance from the best tour to the nearest optimum.
    pub distance: usize,
    /// Penalty mass on good edges since the run started.
    pub good_mass: u64,
    pub total_mass: u64,
    /// The same two counters restricted to the window since the previous
    /// checkpoint.
    pub window_good: u64,
    pub window_total: u64,
}

/// Observer recording a [`Checkpoint`] every `stride` completed iterations.
/// Penalty masses are accumulated from the penalization events.
#[derive(Debug)]
pub struct CheckpointRecorder<'a> {
    stride: u64,
    optimal_cost: i64,
    optima: &'a [Tour],
    good: &'a HashSet<EdgeKey>,
    good_mass: u64,
    total_mass: u64,
    window_good: u64,
    window_total: u64,
    pub checkpoints: Vec<Checkpoint>,
    /// First iteration whose best cost reached the optimum.
    pub finished_at: Option<u64>,
}

impl<'a> CheckpointRecorder<'a> {
    pub fn new(stride: u64, optimal_cost: i64, optima: &'a [Tour], good: &'a HashSet<EdgeKey>) -> Self {
        assert!(stride > 0, "checkpoint stride must be positive");
        CheckpointRecorder {
            stride,
            optimal_cost,
            optima,
            good,
            good_mass: 0,
            total_mass: 0,
            window_good: 0,
            window_total: 0,
            checkpoints: Vec::new(),
            finished_at: None,
        }
    }

    pub fn into_record(self) -> RunCheckpoints {
        RunCheckpoints {
            checkpoints: self.checkpoints,
            finished_at: self.finished_at,
        }
    }
}

impl SearchObserver for CheckpointRecorder<'_> {
    fn on_penalize(&mut self, event: &PenalizeEvent<'_>) {
        for e in event.penalized {
            self.total_mass += 1;
            self.window_total += 1;
            if self.good.contains(e) {
                self.good_mass += 1;
                self.window_good += 1;
            }
        }
    }

    fn on_iteration(&mut self, view: &IterationView<'_>) {
        if self.finished_at.is_none() && view.best.cost() <= self.optimal_cost {
            self.finished_at = Some(view.iteration);
        }
        if view.interrupted || !view.iteration.is_multiple_of(self.stride) {
            return;
        }
        let distance = nearest_optimum_distance(view.best, self.optima).unwrap_or(0);
        self.checkpoints.push(Checkpoint {
            iteration: view.iteration,
            best_cost: view.best.cost(),
            distance,
            good_mass: self.good_mass,
            total_mass: self.total_mass,
            window_good: self.window_good,
            window_total: self.window_total,
        });
        self.window_good = 0;
        self.window_total = 0;
    }
}

/// Checkpoints of one run plus the iteration it reached the optimum.
#[derive(Debug, Clone, PartialEq)]
pub struct RunCheckpoints {
    pub checkpoints: Vec<Checkpoint>,
    pub finished_at: Option<u64>,
}

/// Averaged behavior curves over a set of runs.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSeries {
    pub stride: u64,
    pub iterations: Vec<u64>,
    /// Mean excess in percent; finished runs count as 0.
    pub excess: Vec<f64>,
    /// Mean nearest-optimum distance; finished runs count as 0.
    pub distance: Vec<f64>,
    /// Mean cumulative undesirable-penalty ratio over unfinished runs.
    pub ratio: Vec<Option<f64>>,
    /// Mean per-window undesirable-penalty ratio over unfinished runs.
    pub ratio_delta: Vec<Option<f64>>,
}

impl MetricSeries {
    /// Aggregates `checkpoints` checkpoint positions. A run that finished at
    /// or before a checkpoint contributes zeros to excess and distance and is
    /// left out of both ratios there; an unfinished run must have a sample at
    /// every position.
    pub fn aggregate(runs: &[RunCheckpoints], stride: u64, checkpoints: usize, optimal_cost: i64) -> Result<Self> {
        if runs.is_empty() {
            return Err(Error::EmptySample);
        }
        let m = runs.len() as f64;
        let mut s = MetricSeries {
            stride,
            iterations: Vec::with_capacity(checkpoints),
            excess: Vec::with_capacity(checkpoints),
            distance: Vec::with_capacity(checkpoints),
            ratio: Vec::with_capacity(checkpoints),
            ratio_delta: Vec::with_capacity(checkpoints),
        };
        for j in 0..checkpoints {
            let it = (j as u64 + 1) * stride;
            let (mut eps, mut dist) = (0.0, 0.0);
            let (mut r_sum, mut rd_sum, mut live) = (0.0, 0.0, 0usize);
            for run in runs {
                if run.finished_at.is_some_and(|f| f <= it) {
                    continue;
                }
                let c = run
                    .checkpoints
                    .iter()
                    .find(|c| c.iteration == it)
                    .ok_or_else(|| Error::InvalidArgument(format!("unfinished run lacks checkpoint {it}")))?;
                eps += excess(c.best_cost, optimal_cost)?;
                dist += c.distance as f64;
                if c.total_mass == 0 || c.window_total == 0 {
                    return Err(Error::Degenerate("checkpoint without penalty mass"));
                }
                r_sum += c.good_mass as f64 / c.total_mass as f64;
                rd_sum += c.window_good as f64 / c.window_total as f64;
                live += 1;
            }
            s.iterations.push(it);
            s.excess.push(eps / m);
            s.distance.push(dist / m);
            s.ratio.push((live > 0).then(|| r_sum / live as f64));
            s.ratio_delta.push((live > 0).then(|| rd_sum / live as f64));
        }
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn excess_values() {
        assert_eq!(excess(100, 100).unwrap(), 0.0);
        assert_eq!(excess(110, 100).unwrap(), 10.0);
        assert_eq!(
            excess(99, 100).unwrap_err(),
            Error::BrokenOptimum { best: 99, optimal: 100 }
        );
    }

    #[test]
    fn averages() {
        assert_eq!(average_series(&[vec![1.0, 2.0]]).unwrap(), vec![1.0, 2.0]);
        assert_eq!(average_series(&[vec![0.0], vec![3.0]]).unwrap(), vec![1.5]);
        assert!(average_series(&[vec![0.0], vec![]]).is_err());
        assert_eq!(
            average_series_exact(&[vec![1], vec![2], vec![2]]).unwrap(),
            vec![Ratio::new(5, 3)]
        );
    }

    #[test]
    fn ratio_extremes() {
        let mut p = PenaltyStore::new(5);
        assert!(undesirable_ratio(&p, &HashSet::new()).is_err());
        let e1 = EdgeKey::new(0, 1);
        let e2 = EdgeKey::new(2, 3);
        p.increment(e1);
        p.increment(e2);
        p.increment(e2);
        assert_eq!(undesirable_ratio(&p, &[e1, e2].into_iter().collect()).unwrap(), 1.0);
        assert_eq!(
            undesirable_ratio(&p, &[EdgeKey::new(3, 4)].into_iter().collect()).unwrap(),
            0.0
        );
        assert!((undesirable_ratio(&p, &[e1].into_iter().collect()).unwrap() - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn u_test_small_exact() {
        let t = mann_whitney_u(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]).unwrap();
        assert_eq!(t.u, 0.0);
        assert!(t.exact);
        assert!((t.p - 0.1).abs() < 1e-15);
        let same = mann_whitney_u(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(same.p, 1.0);
        assert!(mann_whitney_u(&[], &[1.0]).is_err());
    }

    #[test]
    fn u_test_all_ties() {
        let a = vec![5.0; 12];
        let t = mann_whitney_u(&a, &a).unwrap();
        assert_eq!(t.p, 1.0);
        assert_eq!(t.u, 72.0);
    }

    #[test]
    fn verdicts() {
        let better = MetricComparison {
            mean_a: 1.0,
            mean_b: 2.0,
            p: Some(0.01),
        };
        let worse = MetricComparison {
            mean_a: 2.0,
            mean_b: 1.0,
            p: Some(0.01),
        };
        assert_eq!(dominance_verdict((10, 5), &better, &better, 0.05), Verdict::AWins);
        assert_eq!(dominance_verdict((5, 5), &better, &worse, 0.05), Verdict::Incomparable);
        let untestable = MetricComparison {
            mean_a: 0.0,
            mean_b: 0.0,
            p: None,
        };
        assert_eq!(
            dominance_verdict((5, 5), &untestable, &untestable, 0.05),
            Verdict::Incomparable
        );
        assert_eq!(
            dominance_verdict((0, 5), &untestable, &untestable, 0.05),
            Verdict::BWins
        );
    }
}
