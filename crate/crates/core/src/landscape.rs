//! Fitness-landscape measures: bond distance, fitness-distance correlation
//! and the clustering of global optima.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::tour::Tour;

/// Number of edges of `t1` that are not edges of `t2`.
pub fn bond_distance(t1: &Tour, t2: &Tour) -> Result<usize> {
    let n = t1.len();
    if t2.len() != n {
        return Err(Error::SizeMismatch {
            expected: n,
            found: t2.len(),
        });
    }
    Ok((0..n).filter(|&c| !t2.contains_edge(c, t1.next(c))).count())
}

/// Pearson correlation of `costs` and `dists` with population moments.
pub fn fdc(costs: &[f64], dists: &[f64]) -> Result<f64> {
    if costs.len() != dists.len() {
        return Err(Error::SizeMismatch {
            expected: costs.len(),
            found: dists.len(),
        });
    }
    if costs.len() < 2 {
        return Err(Error::Degenerate("correlation needs at least two points"));
    }
    let m = costs.len() as f64;
    let mc = costs.iter().sum::<f64>() / m;
    let md = dists.iter().sum::<f64>() / m;
    let (mut cov, mut vc, mut vd) = (0.0, 0.0, 0.0);
    for (&c, &d) in costs.iter().zip(dists) {
        let (x, y) = (c - mc, d - md);
        cov += x * y;
        vc += x * x;
        vd += y * y;
    }
    if vc == 0.0 || vd == 0.0 {
        return Err(Error::Degenerate("correlation of a constant series"));
    }
    Ok((cov / (vc.sqrt() * vd.sqrt())).clamp(-1.0, 1.0))
}

/// Distinct tours sharing one cost, deduplicated modulo rotation and
/// direction.
#[derive(Debug, Clone, Default)]
pub struct OptimaPool {
    cost: Option<i64>,
    tours: Vec<Tour>,
    seen: HashSet<Vec<u32>>,
}

impl OptimaPool {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `tour` unless an equivalent one is present. Returns whether it
    /// was new. A tour whose cost differs from the pool's is rejected.
    pub fn insert(&mut self, tour: Tour) -> Result<bool> {
        if let Some(first) = self.tours.first() {
            if tour.len() != first.len() {
                return Err(Error::SizeMismatch {
                    expected: first.len(),
                    found: tour.len(),
                });
            }
        }
        match self.cost {
            Some(c) if c != tour.cost() => {
                return Err(Error::InvalidArgument(format!(
                    "tour cost {} differs from pool cost {c}",
                    tour.cost()
                )))
            }
            _ => {}
        }
        if !self.seen.insert(tour.canonical_order()) {
            return Ok(false);
        }
        self.cost = Some(tour.cost());
        self.tours.push(tour);
        Ok(true)
    }

    pub fn len(&self) -> usize {
        self.tours.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tours.is_empty()
    }

    pub fn cost(&self) -> Option<i64> {
        self.cost
    }

    pub fn tours(&self) -> &[Tour] {
        &self.tours
    }
}

/// Smallest bond distance from `t` to a pool member.
pub fn nearest_optimum_distance(t: &Tour, pool: &[Tour]) -> Result<usize> {
    let mut best: Option<usize> = None;
    for o in pool {
        let d = bond_distance(t, o)?;
        best = Some(best.map_or(d, |b| b.min(d)));
    }
    best.ok_or(Error::EmptyPool)
}

/// Pairwise bond-distance summary of a set of tours. The distance fields are
/// `None` for a single tour.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoolStats {
    pub count: usize,
    pub min: Option<usize>,
    pub mean: Option<f64>,
    pub max: Option<usize>,
}

pub fn optima_pool_stats(tours: &[Tour]) -> Result<PoolStats> {
    if tours.is_empty() {
        return Err(Error::EmptyPool);
    }
    let mut min = usize::MAX;
    let mut max = 0;
    let mut sum = 0u64;
    let mut pairs = 0u64;
    for i in 0..tours.len() {
        for j in (i + 1)..tours.len() {
            let d = bond_distance(&tours[i], &tours[j])?;
            min = min.min(d);
            max = max.max(d);
            sum += d as u64;
            pairs += 1;
        }
    }
    Ok(if pairs == 0 {
        PoolStats {
            count: tours.len(),
            min: None,
            mean: None,
            max: None,
        }
    } else {
        PoolStats {
            count: tours.len(),
            min: Some(min),
            mean: Some(sum as f64 / pairs as f64),
            max: Some(max),
        }
    })
}

/// Thresholds of the two big-valley requirements.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BigValleyThresholds {
    /// Optima must lie closer than `rho * N / 2` on average.
    pub rho: f64,
    /// The fitness-distance correlation must reach `theta`.
    pub theta: f64,
}

impl Default for BigValleyThresholds {
    fn default() -> Self {
        BigValleyThresholds { rho: 0.5, theta: 0.5 }
    }
}

/// Outcome of [`big_valley_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BigValleyReport {
    pub req1: bool,
    pub req2: bool,
    pub fdc: f64,
    /// Mean pairwise optimum distance; `None` for a single optimum.
    pub mean_opt_dist: Option<f64>,
}

impl BigValleyReport {
    pub fn is_big_valley(&self) -> bool {
        self.req1 && self.req2
    }
}

/// A sampled solution reduced to its cost and nearest-optimum distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitnessDistance {
    pub cost: i64,
    pub distance: usize,
}

/// Fitness-distance correlation of a corpus.
pub fn corpus_fdc(corpus: &[FitnessDistance]) -> Result<f64> {
    let costs: Vec<f64> = corpus.iter().map(|s| s.cost as f64).collect();
    let dists: Vec<f64> = corpus.iter().map(|s| s.distance as f64).collect();
    fdc(&costs, &dists)
}

/// Tests the two requirements on an `n`-city instance: optima clustered
/// (mean pairwise distance below `rho * n / 2`, vacuous for one optimum) and
/// cost correlated with distance to the nearest optimum (FDC at least
/// `theta`).
pub fn big_valley_check(
    pool: &PoolStats,
    corpus: &[FitnessDistance],
    n: usize,
    th: BigValleyThresholds,
) -> Result<BigValleyReport> {
    if pool.count == 0 {
        return Err(Error::EmptyPool);
    }
    let f = corpus_fdc(corpus)?;
    let req1 = pool.mean.is_none_or(|m| m < th.rho * n as f64 / 2.0);
    Ok(BigValleyReport {
        req1,
        req2: f >= th.theta,
        fdc: f,
        mean_opt_dist: pool.mean,
    })
}

/// `(nearest-optimum distance, cost excess in percent)` rows.
pub fn scatter(corpus: &[FitnessDistance], optimal_cost: i64) -> Vec<(usize, f64)> {
    corpus
        .iter()
        .map(|s| (s.distance, (s.cost - optimal_cost) as f64 / optimal_cost as f64 * 100.0))
        .collect()
}
