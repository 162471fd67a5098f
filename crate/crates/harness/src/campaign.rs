//! Campaign files: which instances and algorithms to run, how often and
//! under which budget.

use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use gls_core::generate::generate_random_instance;
use gls_core::gls::StopCriteria;
use gls_core::{parse_tsplib, CandidateLists, Instance};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::records::RunRecord;
use crate::registry::Registry;
use crate::runner::{default_time_limit, run_one, AlgoParams, Algorithm, WarmupSpec};
use crate::seeds::{derive_seed, sha256_hex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum BudgetMode {
    /// Wall-clock limit; runtimes are reported in seconds.
    #[default]
    Time,
    /// Iteration limit; runtimes are reported in iterations.
    Iterations,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct Budget {
    #[serde(default)]
    pub mode: BudgetMode,
    /// Seconds; defaults to ⌈N/10⌉ per instance.
    pub time_limit: Option<f64>,
    pub max_iterations: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(default = "default_lambda")]
    pub lambda_coefficient: f64,
    #[serde(default = "default_w")]
    pub w: f64,
    #[serde(default = "default_period")]
    pub elite_update_period: u64,
    #[serde(default = "default_warmup")]
    pub warmup: String,
}

fn default_lambda() -> f64 {
    AlgoParams::default().lambda_coefficient
}
fn default_w() -> f64 {
    AlgoParams::default().w
}
fn default_period() -> u64 {
    AlgoParams::default().elite_update_period
}
fn default_warmup() -> String {
    "auto".into()
}
fn default_algorithms() -> Vec<Algorithm> {
    vec![Algorithm::Gls, Algorithm::Ebgls]
}

impl Default for Params {
    fn default() -> Self {
        Params {
            lambda_coefficient: default_lambda(),
            w: default_w(),
            elite_update_period: default_period(),
            warmup: default_warmup(),
        }
    }
}

impl Params {
    pub fn to_algo_params(&self) -> Result<AlgoParams> {
        let warmup: WarmupSpec = self.warmup.parse()?;
        if self.w.is_nan() || self.w <= 1.0 {
            bail!("w = {} must exceed 1", self.w);
        }
        if self.lambda_coefficient.is_nan() || self.lambda_coefficient <= 0.0 {
            bail!("lambda_coefficient must be positive");
        }
        if self.elite_update_period == 0 {
            bail!("elite_update_period must be at least 1");
        }
        Ok(AlgoParams {
            lambda_coefficient: self.lambda_coefficient,
            w: self.w,
            warmup,
            elite_update_period: self.elite_update_period,
        })
    }
}

/// A TSPLIB file or a generated random instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InstanceSpec {
    File { path: PathBuf },
    Generated { generate_n: usize, generate_seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    #[serde(default)]
    pub name: String,
    pub master_seed: u64,
    /// Paired runs per algorithm and instance.
    pub runs: u32,
    #[serde(default = "default_algorithms")]
    pub algorithms: Vec<Algorithm>,
    #[serde(default)]
    pub budget: Budget,
    #[serde(default)]
    pub params: Params,
    pub instances: Vec<InstanceSpec>,
}

impl CampaignConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: CampaignConfig = toml::from_str(text).context("invalid campaign file")?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            bail!("runs must be at least 1");
        }
        if self.instances.is_empty() {
            bail!("a campaign needs at least one instance");
        }
        if self.algorithms.is_empty() {
            bail!("a campaign needs at least one algorithm");
        }
        let mut algos = self.algorithms.clone();
        algos.sort();
        algos.dedup();
        if algos.len() != self.algorithms.len() {
            bail!("algorithms are listed twice");
        }
        match self.budget.mode {
            BudgetMode::Iterations if self.budget.max_iterations.is_none() => {
                bail!("iteration budgets need max_iterations")
            }
            BudgetMode::Time if self.budget.time_limit.is_some_and(|t| !(t > 0.0 && t.is_finite())) => {
                bail!("time_limit must be a positive number of seconds")
            }
            _ => {}
        }
        self.params.to_algo_params()?;
        Ok(())
    }

    /// SHA-256 over the crate version and the normalized configuration.
    pub fn fingerprint(&self) -> String {
        let canonical = toml::to_string(self).expect("campaign serializes");
        sha256_hex(format!("gls-harness {}\n{canonical}", env!("CARGO_PKG_VERSION")).as_bytes())
    }
}

/// A loaded instance with what every run on it shares.
pub struct Prepared {
    pub instance: Arc<Instance>,
    pub cands: Arc<CandidateLists>,
    pub optimum: Option<i64>,
}

pub fn load_instance(path: &Path) -> Result<Instance> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_tsplib(&text).with_context(|| format!("cannot parse {}", path.display()))
}

impl InstanceSpec {
    /// Loads the instance; relative paths are taken from `base`.
    pub fn load(&self, base: &Path) -> Result<Instance> {
        match self {
            InstanceSpec::File { path } => load_instance(&base.join(path)),
            InstanceSpec::Generated {
                generate_n,
                generate_seed,
            } => Ok(generate_random_instance(*generate_n, *generate_seed)?.instance),
        }
    }
}

/// Stop criteria and reported runtime of a run on an `n`-city instance.
pub fn stop_for(budget: &Budget, n: usize, optimum: Option<i64>) -> (StopCriteria, f64) {
    match budget.mode {
        BudgetMode::Time => {
            let limit = budget
                .time_limit
                .map(Duration::from_secs_f64)
                .unwrap_or_else(|| default_time_limit(n));
            (StopCriteria::time(limit).with_target(optimum), limit.as_secs_f64())
        }
        BudgetMode::Iterations => {
            let k = budget.max_iterations.expect("validated");
            (StopCriteria::iterations(k).with_target(optimum), k as f64)
        }
    }
}

/// Runs every (instance, algorithm, pair) cell. Records come back ordered by
/// instance, pair and algorithm whatever the number of workers.
pub fn run_campaign(cfg: &CampaignConfig, base: &Path, registry: &Registry) -> Result<Vec<RunRecord>> {
    cfg.validate()?;
    let params = cfg.params.to_algo_params()?;
    let prepared: Vec<Prepared> = cfg
        .instances
        .iter()
        .map(|spec| {
            let inst = spec.load(base)?;
            let optimum = registry.get(inst.name());
            let cands = CandidateLists::build(&inst);
            Ok(Prepared {
                instance: Arc::new(inst),
                cands: Arc::new(cands),
                optimum,
            })
        })
        .collect::<Result<_>>()?;
    let mut cells = Vec::new();
    for (ii, _) in prepared.iter().enumerate() {
        for pair in 0..cfg.runs {
            for &algo in &cfg.algorithms {
                cells.push((ii, pair, algo));
            }
        }
    }
    cells
        .par_iter()
        .map(|&(ii, pair, algo)| {
            let p = &prepared[ii];
            run_cell(p, &cfg.budget, &params, cfg.master_seed, pair, algo)
        })
        .collect()
}

fn run_cell(
    p: &Prepared,
    budget: &Budget,
    params: &AlgoParams,
    master_seed: u64,
    pair: u32,
    algo: Algorithm,
) -> Result<RunRecord> {
    let inst = &p.instance;
    let seed = derive_seed(master_seed, inst.name(), pair);
    let (stop, limit) = stop_for(budget, inst.dimension(), p.optimum);
    let out = run_one(inst, &p.cands, algo, params, stop, seed, &mut ())?;
    let success = p.optimum.map(|o| out.best.cost() <= o);
    if let Some(o) = p.optimum {
        if out.best.cost() < o {
            bail!(
                "{}: found cost {} below the registered optimum {o}",
                inst.name(),
                out.best.cost()
            );
        }
    }
    let runtime = match (budget.mode, success) {
        (_, Some(false)) => limit,
        (BudgetMode::Time, _) => round4(out.elapsed.as_secs_f64()),
        (BudgetMode::Iterations, _) => out.state.iteration as f64,
    };
    Ok(RunRecord {
        instance: inst.name().to_string(),
        algorithm: algo,
        pair,
        seed,
        start_cost: out.start_cost,
        best_cost: out.best.cost(),
        optimum: p.optimum,
        success,
        iterations: out.state.iteration,
        runtime,
        budget: limit,
        unit: budget.mode,
    })
}

fn round4(x: f64) -> f64 {
    (x * 1e4).round() / 1e4
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
name = "smoke"
master_seed = 7
runs = 3
algorithms = ["gls", "ebgls"]

[budget]
mode = "iterations"
max_iterations = 200

[params]
warmup = "iters:50"

[[instances]]
path = "eil51.tsp"

[[instances]]
generate_n = 30
generate_seed = 2
"#;

    #[test]
    fn parses_and_fingerprints() {
        let cfg = CampaignConfig::parse(SAMPLE).unwrap();
        assert_eq!(cfg.instances.len(), 2);
        assert_eq!(cfg.params.w, 2.0);
        assert_eq!(cfg.fingerprint(), CampaignConfig::parse(SAMPLE).unwrap().fingerprint());
        let changed = CampaignConfig::parse(&SAMPLE.replace("runs = 3", "runs = 4")).unwrap();
        assert_ne!(cfg.fingerprint(), changed.fingerprint());
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(CampaignConfig::parse(&SAMPLE.replace("max_iterations = 200", "")).is_err());
        assert!(CampaignConfig::parse(&SAMPLE.replace("runs = 3", "runs = 0")).is_err());
        assert!(CampaignConfig::parse(&SAMPLE.replace("\"ebgls\"", "\"gls\"")).is_err());
        assert!(CampaignConfig::parse(&SAMPLE.replace("iters:50", "later")).is_err());
        assert!(CampaignConfig::parse(&format!("unknown = 1\n{SAMPLE}")).is_err());
    }

    #[test]
    fn generated_cells_are_paired() {
        let text = SAMPLE.replace("[[instances]]\npath = \"eil51.tsp\"\n", "");
        let cfg = CampaignConfig::parse(&text).unwrap();
        let recs = run_campaign(&cfg, Path::new("."), &Registry::default()).unwrap();
        assert_eq!(recs.len(), 6);
        for pair in recs.chunks(2) {
            assert_eq!(pair[0].seed, pair[1].seed);
            assert_eq!(pair[0].start_cost, pair[1].start_cost);
            assert_eq!(pair[0].algorithm, Algorithm::Gls);
            assert_eq!(pair[1].algorithm, Algorithm::Ebgls);
            assert_eq!(pair[0].success, None);
        }
    }
}
