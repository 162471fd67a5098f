//! Landscape sampling: repeated runs toward the optimum, collecting the
//! optima found and every best-so-far improvement on the way.

use anyhow::{bail, Result};
use gls_core::gls::StopCriteria;
use gls_core::landscape::{
    big_valley_check, nearest_optimum_distance, optima_pool_stats, BigValleyReport, BigValleyThresholds,
    FitnessDistance, OptimaPool, PoolStats,
};
use gls_core::{CandidateLists, Instance, Tour};
use rayon::prelude::*;

use crate::runner::{run_one, AlgoParams, Algorithm};
use crate::seeds::derive_seed;
use crate::trace::{TraceRecorder, TraceSample};

/// What to run on one instance.
#[derive(Debug, Clone)]
pub struct SamplingPlan {
    pub algorithms: Vec<Algorithm>,
    /// Runs per algorithm.
    pub runs: u32,
    pub master_seed: u64,
    pub params: AlgoParams,
    /// Budget of each run; the optimum is added as a target.
    pub stop: StopCriteria,
}

/// Everything a sampling campaign on one instance produced.
#[derive(Debug)]
pub struct LandscapeResult {
    pub pool: OptimaPool,
    /// Runs that reached the optimum.
    pub hits: usize,
    pub runs: usize,
    pub samples: Vec<TraceSample>,
    pub corpus: Vec<FitnessDistance>,
    pub pool_stats: Option<PoolStats>,
    /// `None` when no optimum is known or the corpus is degenerate.
    pub report: Option<BigValleyReport>,
}

/// Runs the plan, pools the optimal tours (plus `known` ones) and evaluates
/// the big-valley requirements on the pooled trajectories. Run `k` of the
/// `a`-th algorithm gets run id `a * runs + k`.
pub fn sample_landscape(
    inst: &Instance,
    optimum: i64,
    plan: &SamplingPlan,
    known: Vec<Tour>,
    thresholds: BigValleyThresholds,
) -> Result<LandscapeResult> {
    if plan.runs == 0 || plan.algorithms.is_empty() {
        bail!("landscape sampling needs at least one run");
    }
    let cands = CandidateLists::build(inst);
    let stop = plan.stop.with_target(Some(optimum));
    let cells: Vec<(u64, Algorithm, u32)> = plan
        .algorithms
        .iter()
        .enumerate()
        .flat_map(|(ai, &algo)| (0..plan.runs).map(move |k| ((ai as u64) * plan.runs as u64 + k as u64, algo, k)))
        .collect();
    let traces: Vec<Vec<TraceSample>> = cells
        .par_iter()
        .map(|&(run_id, algo, k)| {
            let seed = derive_seed(plan.master_seed, inst.name(), k);
            let mut rec = TraceRecorder::new(run_id);
            let out = run_one(inst, &cands, algo, &plan.params, stop, seed, &mut rec)?;
            if out.best.cost() < optimum {
                bail!(
                    "{}: found cost {} below the known optimum {optimum}",
                    inst.name(),
                    out.best.cost()
                );
            }
            Ok(rec.samples)
        })
        .collect::<Result<_>>()?;
    let mut pool = OptimaPool::new();
    for t in known {
        if t.cost() != optimum {
            bail!("supplied optimum costs {} but the optimum is {optimum}", t.cost());
        }
        pool.insert(t)?;
    }
    let mut hits = 0;
    for run in &traces {
        if let Some(last) = run.last().filter(|s| s.cost == optimum) {
            hits += 1;
            pool.insert(last.tour.clone())?;
        }
    }
    let samples: Vec<TraceSample> = traces.into_iter().flatten().collect();
    let (corpus, pool_stats, report) = if pool.is_empty() {
        (Vec::new(), None, None)
    } else {
        let corpus: Vec<FitnessDistance> = samples
            .par_iter()
            .map(|s| {
                Ok(FitnessDistance {
                    cost: s.cost,
                    distance: nearest_optimum_distance(&s.tour, pool.tours())?,
                })
            })
            .collect::<Result<_>>()?;
        let stats = optima_pool_stats(pool.tours())?;
        let report = big_valley_check(&stats, &corpus, inst.dimension(), thresholds).ok();
        (corpus, Some(stats), report)
    };
    Ok(LandscapeResult {
        pool,
        hits,
        runs: cells.len(),
        samples,
        corpus,
        pool_stats,
        report,
    })
}
