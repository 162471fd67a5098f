//! Single-run plumbing shared by the subcommands.

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use anyhow::{anyhow, bail, Result};
use gls_core::ebgls::{run_ebgls_with, EbglsConfig, Warmup};
use gls_core::gls::{coefficient_ratio, run_gls_with, GlsConfig, RunOutcome, SearchObserver, StartKind, StopCriteria};
use gls_core::{random_tour, CandidateLists, Instance};
use serde::{Deserialize, Serialize};

/// Algorithm of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Gls,
    Ebgls,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Gls => "gls",
            Algorithm::Ebgls => "ebgls",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gls" => Ok(Algorithm::Gls),
            "ebgls" | "eb-gls" => Ok(Algorithm::Ebgls),
            _ => bail!("unknown algorithm `{s}` (expected gls or ebgls)"),
        }
    }
}

/// Warm-up as written on the command line or in a campaign file:
/// `auto`, `none`, `iters:K`, `frac:F` or `secs:S`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WarmupSpec {
    Auto,
    Fixed(Warmup),
}

impl WarmupSpec {
    /// The schedule for an `n`-city run with the given time limit.
    pub fn resolve(self, n: usize, time_limit: Option<Duration>) -> Warmup {
        match self {
            WarmupSpec::Auto => Warmup::default_for(n, time_limit),
            WarmupSpec::Fixed(w) => w,
        }
    }
}

impl FromStr for WarmupSpec {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "auto" => return Ok(WarmupSpec::Auto),
            "none" | "0" => return Ok(WarmupSpec::Fixed(Warmup::None)),
            _ => {}
        }
        let (kind, value) = s
            .split_once(':')
            .ok_or_else(|| anyhow!("warm-up `{s}` must be auto, none, iters:K, frac:F or secs:S"))?;
        let w = match kind {
            "iters" => Warmup::Iterations(value.parse()?),
            "frac" => {
                let f: f64 = value.parse()?;
                if !(0.0..=1.0).contains(&f) {
                    bail!("warm-up fraction {f} must lie in [0, 1]");
                }
                Warmup::TimeFraction(f)
            }
            "secs" => {
                let v: f64 = value.parse()?;
                Duration::try_from_secs_f64(v)
                    .map(Warmup::Duration)
                    .map_err(|e| anyhow!("warm-up `{s}`: {e}"))?
            }
            _ => bail!("unknown warm-up kind `{kind}`"),
        };
        Ok(WarmupSpec::Fixed(w))
    }
}

impl fmt::Display for WarmupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WarmupSpec::Auto => f.write_str("auto"),
            WarmupSpec::Fixed(Warmup::None) => f.write_str("none"),
            WarmupSpec::Fixed(Warmup::Iterations(k)) => write!(f, "iters:{k}"),
            WarmupSpec::Fixed(Warmup::TimeFraction(x)) => write!(f, "frac:{x}"),
            WarmupSpec::Fixed(Warmup::Duration(d)) => write!(f, "secs:{}", d.as_secs_f64()),
        }
    }
}

/// Tunable parameters of both algorithms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlgoParams {
    pub lambda_coefficient: f64,
    pub w: f64,
    pub warmup: WarmupSpec,
    pub elite_update_period: u64,
}

impl Default for AlgoParams {
    fn default() -> Self {
        AlgoParams {
            lambda_coefficient: gls_core::gls::DEFAULT_LAMBDA_COEFFICIENT,
            w: gls_core::ebgls::DEFAULT_W as f64,
            warmup: WarmupSpec::Auto,
            elite_update_period: gls_core::ebgls::DEFAULT_ELITE_PERIOD,
        }
    }
}

/// Default time budget: ⌈N/10⌉ seconds.
pub fn default_time_limit(n: usize) -> Duration {
    Duration::from_secs(n.div_ceil(10) as u64)
}

/// One run from the random start tour of `seed`.
pub fn run_one<O: SearchObserver>(
    inst: &Instance,
    cands: &CandidateLists,
    algo: Algorithm,
    params: &AlgoParams,
    stop: StopCriteria,
    seed: u64,
    observer: &mut O,
) -> Result<RunOutcome> {
    let base = GlsConfig {
        lambda_coefficient: params.lambda_coefficient,
        stop,
        seed,
        start: StartKind::Random,
    };
    let start = random_tour(inst, seed);
    Ok(match algo {
        Algorithm::Gls => run_gls_with(inst, cands, &base, start, observer)?,
        Algorithm::Ebgls => {
            let mut cfg = EbglsConfig::new(base, params.warmup.resolve(inst.dimension(), stop.time_limit));
            cfg.w = coefficient_ratio(params.w)?;
            cfg.elite_update_period = params.elite_update_period;
            run_ebgls_with(inst, cands, &cfg, start, observer)?.run
        }
    })
}
