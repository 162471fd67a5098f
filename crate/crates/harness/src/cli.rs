//! Command-line front end.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use gls_core::generate::generate_random_instance;
use gls_core::gls::{StopCriteria, StopReason};
use gls_core::landscape::{scatter, BigValleyThresholds};
use gls_core::stats::excess;
use gls_core::{write_tour, write_tsplib, CandidateLists};

use crate::campaign::{load_instance, run_campaign, CampaignConfig};
use crate::records::write_records;
use crate::registry::Registry;
use crate::report::{build_table, write_table};
use crate::runner::{default_time_limit, run_one, AlgoParams, Algorithm, WarmupSpec};
use crate::sampling::{sample_landscape, SamplingPlan};
use crate::trace::{format_pool_line, format_trace_line, parse_pool, TraceRecorder};

/// Exit status of `solve` when the target cost was reached.
pub const EXIT_OPTIMUM: i32 = 0;
/// Exit status of `solve` when the budget ran out first.
pub const EXIT_BUDGET: i32 = 3;
/// Exit status for runtime errors; usage errors exit with 2.
pub const EXIT_ERROR: i32 = 1;

/// Guided Local Search and EB-GLS for the symmetric TSP.
#[derive(Debug, Parser)]
#[command(name = "ebgls", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one instance and print the result.
    Solve(SolveArgs),
    /// Run a campaign file and write per-run records and the comparison table.
    Bench(BenchArgs),
    /// Sample runs to the optimum and analyze the fitness landscape.
    Landscape(LandscapeArgs),
    /// Generate a random uniform EUC_2D instance.
    Gen(GenArgs),
}

#[derive(Debug, Args, Clone)]
pub struct ParamArgs {
    /// Non-elite utility weight of EB-GLS.
    #[arg(long, default_value_t = 2.0)]
    pub w: f64,
    /// λ = coefficient × (first local optimum cost) / N.
    #[arg(long = "lambda-coeff", default_value_t = 0.3)]
    pub lambda_coeff: f64,
    /// EB-GLS warm-up: auto, none, iters:K, frac:F or secs:S.
    #[arg(long, default_value = "auto")]
    pub warmup: WarmupSpec,
    /// Iterations between elite refreshes.
    #[arg(long = "elite-period", default_value_t = 100)]
    pub elite_period: u64,
}

impl ParamArgs {
    fn to_params(&self) -> Result<AlgoParams> {
        if self.w.is_nan() || self.w <= 1.0 {
            bail!("--w must exceed 1");
        }
        if self.lambda_coeff.is_nan() || self.lambda_coeff <= 0.0 {
            bail!("--lambda-coeff must be positive");
        }
        if self.elite_period == 0 {
            bail!("--elite-period must be at least 1");
        }
        Ok(AlgoParams {
            lambda_coefficient: self.lambda_coeff,
            w: self.w,
            warmup: self.warmup,
            elite_update_period: self.elite_period,
        })
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// TSPLIB problem file.
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long, default_value = "gls")]
    pub algo: Algorithm,
    /// Seed of the random start tour.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Wall-clock budget in seconds; defaults to ⌈N/10⌉ when no budget is given.
    #[arg(long = "time-limit")]
    pub time_limit: Option<f64>,
    /// Iteration budget (local-search calls).
    #[arg(long = "max-iters")]
    pub max_iters: Option<u64>,
    /// Stop at this cost; defaults to the known optimum.
    #[arg(long = "target-cost")]
    pub target_cost: Option<i64>,
    /// Ignore the known optimum as a stopping target.
    #[arg(long = "no-target", conflicts_with = "target_cost")]
    pub no_target: bool,
    #[command(flatten)]
    pub params: ParamArgs,
    /// Write best-so-far improvements as `run_id,iteration,cost,tour` lines.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Write the best tour as a TSPLIB tour file.
    #[arg(long = "tour-out")]
    pub tour_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Campaign file (TOML).
    #[arg(long)]
    pub campaign: PathBuf,
    /// Output directory; defaults to `<campaign name or file stem>-out` next
    /// to the campaign file.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads; the EBGLS_WORKERS variable is used when absent.
    #[arg(long, env = "EBGLS_WORKERS")]
    pub workers: Option<usize>,
}

#[derive(Debug, Args)]
pub struct LandscapeArgs {
    /// TSPLIB problem files with a known optimum.
    #[arg(long, num_args = 1.., required = true)]
    pub instances: Vec<PathBuf>,
    /// Runs per algorithm and instance.
    #[arg(long, default_value_t = 40)]
    pub runs: u32,
    /// Output file for the optima pool (`instance,cost,tour` lines).
    #[arg(long)]
    pub pool: PathBuf,
    /// Output CSV with `instance,distance,excess_percent` rows.
    #[arg(long)]
    pub scatter: PathBuf,
    /// Output file for the trajectory corpus.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Pool files with known optimal tours to include.
    #[arg(long = "known-optima")]
    pub known_optima: Vec<PathBuf>,
    /// Algorithms to sample with, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "gls,ebgls")]
    pub algos: Vec<Algorithm>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Per-run wall-clock budget in seconds; defaults to ⌈N/10⌉.
    #[arg(long = "time-limit")]
    pub time_limit: Option<f64>,
    /// Per-run iteration budget.
    #[arg(long = "max-iters")]
    pub max_iters: Option<u64>,
    /// Requirement 1 threshold: mean optimum distance below rho × N/2.
    #[arg(long, default_value_t = 0.5)]
    pub rho: f64,
    /// Requirement 2 threshold: FDC at least theta.
    #[arg(long, default_value_t = 0.5)]
    pub theta: f64,
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, env = "EBGLS_WORKERS")]
    pub workers: Option<usize>,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Instance name; defaults to `rand<N>s<SEED>`.
    #[arg(long)]
    pub name: Option<String>,
}

fn duration(secs: f64, flag: &str) -> Result<Duration> {
    Duration::try_from_secs_f64(secs).with_context(|| format!("{flag} must be a non-negative number of seconds"))
}

fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(k) = workers {
        if k == 0 {
            bail!("worker count must be at least 1");
        }
        b = b.num_threads(k);
    }
    b.build()?.install(f)
}

/// Output of `solve`: deterministic report lines and the exit status.
pub struct SolveReport {
    pub stdout: String,
    pub seconds: f64,
    pub exit: i32,
}

pub fn solve(args: &SolveArgs, registry: &Registry) -> Result<SolveReport> {
    let inst = load_instance(&args.instance)?;
    let params = args.params.to_params()?;
    let optimum = registry.get(inst.name());
    let target = if args.no_target {
        None
    } else {
        args.target_cost.or(optimum)
    };
    let mut stop = StopCriteria {
        max_iterations: args.max_iters,
        time_limit: args.time_limit.map(|t| duration(t, "--time-limit")).transpose()?,
        target_cost: target,
    };
    if stop.max_iterations.is_none() && stop.time_limit.is_none() {
        stop.time_limit = Some(default_time_limit(inst.dimension()));
    }
    let cands = CandidateLists::build(&inst);
    let mut rec = TraceRecorder::new(0);
    let out = run_one(&inst, &cands, args.algo, &params, stop, args.seed, &mut rec)?;
    let mut s = String::new();
    writeln!(s, "instance: {}", inst.name())?;
    writeln!(s, "algorithm: {}", args.algo)?;
    writeln!(s, "seed: {}", args.seed)?;
    writeln!(s, "start_cost: {}", out.start_cost)?;
    writeln!(s, "cost: {}", out.best.cost())?;
    match optimum {
        Some(o) => {
            writeln!(s, "optimum: {o}")?;
            writeln!(s, "excess: {:.4}", excess(out.best.cost(), o)?)?;
        }
        None => {
            writeln!(s, "optimum: unknown")?;
            writeln!(s, "excess: NA")?;
        }
    }
    writeln!(s, "iterations: {}", out.state.iteration)?;
    let reached = out.stop == StopReason::TargetReached;
    writeln!(
        s,
        "status: {}",
        if reached { "target-reached" } else { "budget-exhausted" }
    )?;
    if let Some(path) = &args.trace {
        let mut text = String::new();
        for sample in &rec.samples {
            text.push_str(&format_trace_line(sample));
            text.push('\n');
        }
        fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?;
    }
    if let Some(path) = &args.tour_out {
        let comment = format!("length {}", out.best.cost());
        fs::write(path, write_tour(inst.name(), &out.best.order(), Some(&comment)))
            .with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(SolveReport {
        stdout: s,
        seconds: out.elapsed.as_secs_f64(),
        exit: if reached { EXIT_OPTIMUM } else { EXIT_BUDGET },
    })
}

/// Runs a campaign and writes `runs.csv` and `table.csv` into the output
/// directory, which is returned.
pub fn bench(args: &BenchArgs, registry: &Registry) -> Result<PathBuf> {
    let text =
        fs::read_to_string(&args.campaign).with_context(|| format!("cannot read {}", args.campaign.display()))?;
    let cfg = CampaignConfig::parse(&text)?;
    let base = args.campaign.parent().unwrap_or(Path::new(".")).to_path_buf();
    let out_dir = match &args.out {
        Some(d) => d.clone(),
        None => {
            let stem = if cfg.name.is_empty() {
                args.campaign
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_default()
            } else {
                cfg.name.clone()
            };
            base.join(format!("{stem}-out"))
        }
    };
    let records = with_workers(args.workers, || run_campaign(&cfg, &base, registry))?;
    for r in records.iter().filter(|r| r.optimum.is_none()).take(1) {
        eprintln!(
            "warning: no known optimum for {}; success and excess columns are NA",
            r.instance
        );
    }
    fs::create_dir_all(&out_dir).with_context(|| format!("cannot create {}", out_dir.display()))?;
    let fp = cfg.fingerprint();
    let runs_path = out_dir.join("runs.csv");
    write_records(fs::File::create(&runs_path)?, &fp, &records)?;
    let rows = build_table(&records)?;
    write_table(fs::File::create(out_dir.join("table.csv"))?, &fp, &rows)?;
    Ok(out_dir)
}

pub fn landscape(args: &LandscapeArgs, registry: &Registry) -> Result<String> {
    let params = args.params.to_params()?;
    let thresholds = BigValleyThresholds {
        rho: args.rho,
        theta: args.theta,
    };
    let mut pool_out = String::new();
    let mut scatter_out = String::from("instance,distance,excess_percent\n");
    let mut trace_out = String::new();
    let mut report = String::new();
    for path in &args.instances {
        let inst = load_instance(path)?;
        let Some(optimum) = registry.get(inst.name()) else {
            bail!("{}: landscape analysis needs a known optimum", inst.name());
        };
        let mut known = Vec::new();
        for f in &args.known_optima {
            let text = fs::read_to_string(f).with_context(|| format!("cannot read {}", f.display()))?;
            known.extend(parse_pool(&inst, &text)?);
        }
        let mut stop = StopCriteria {
            max_iterations: args.max_iters,
            time_limit: args.time_limit.map(|t| duration(t, "--time-limit")).transpose()?,
            target_cost: None,
        };
        if stop.max_iterations.is_none() && stop.time_limit.is_none() {
            stop.time_limit = Some(default_time_limit(inst.dimension()));
        }
        let plan = SamplingPlan {
            algorithms: args.algos.clone(),
            runs: args.runs,
            master_seed: args.seed,
            params,
            stop,
        };
        let res = with_workers(args.workers, || {
            sample_landscape(&inst, optimum, &plan, known, thresholds)
        })?;
        for t in res.pool.tours() {
            pool_out.push_str(&format_pool_line(inst.name(), t));
            pool_out.push('\n');
        }
        for (d, e) in scatter(&res.corpus, optimum) {
            writeln!(scatter_out, "{},{d},{e:.6}", inst.name())?;
        }
        for s in &res.samples {
            trace_out.push_str(&format_trace_line(s));
            trace_out.push('\n');
        }
        writeln!(report, "instance: {}", inst.name())?;
        writeln!(report, "runs: {}", res.runs)?;
        writeln!(report, "optimum_hits: {}", res.hits)?;
        writeln!(report, "pool_size: {}", res.pool.len())?;
        writeln!(report, "corpus_size: {}", res.corpus.len())?;
        match res.pool_stats {
            Some(st) => {
                let o = |v: Option<String>| v.unwrap_or_else(|| "-".into());
                writeln!(report, "optima_distance_min: {}", o(st.min.map(|v| v.to_string())))?;
                writeln!(
                    report,
                    "optima_distance_mean: {}",
                    o(st.mean.map(|v| format!("{v:.2}")))
                )?;
                writeln!(report, "optima_distance_max: {}", o(st.max.map(|v| v.to_string())))?;
            }
            None => writeln!(report, "optima_distance: not-evaluable")?,
        }
        match res.report {
            Some(r) => {
                writeln!(report, "fdc: {:.4}", r.fdc)?;
                writeln!(report, "req1: {}", r.req1)?;
                writeln!(report, "req2: {}", r.req2)?;
                writeln!(report, "big_valley: {}", r.is_big_valley())?;
            }
            None => writeln!(report, "big_valley: not-evaluable")?,
        }
    }
    fs::write(&args.pool, pool_out).with_context(|| format!("cannot write {}", args.pool.display()))?;
    fs::write(&args.scatter, scatter_out).with_context(|| format!("cannot write {}", args.scatter.display()))?;
    if let Some(p) = &args.trace {
        fs::write(p, trace_out).with_context(|| format!("cannot write {}", p.display()))?;
    }
    Ok(report)
}

pub fn gen(args: &GenArgs) -> Result<()> {
    let g = generate_random_instance(args.n, args.seed)?;
    let mut inst = g.instance;
    if let Some(name) = &args.name {
        let coords = inst.coords().expect("generated instances have coordinates").to_vec();
        inst = gls_core::Instance::from_coords(name.clone(), inst.weight_rule(), coords)?;
    }
    let comment = format!(
        "uniform random cities, map {} x {}, seed {}",
        g.map.width, g.map.height, args.seed
    );
    fs::write(&args.out, write_tsplib(&inst, Some(&comment)))
        .with_context(|| format!("cannot write {}", args.out.display()))?;
    Ok(())
}

/// Parses arguments, runs the subcommand and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let registry = Registry::bundled();
    let result = match &cli.command {
        Command::Solve(a) => solve(a, &registry).map(|r| {
            print!("{}", r.stdout);
            eprintln!("seconds: {:.4}", r.seconds);
            r.exit
        }),
        Command::Bench(a) => bench(a, &registry).map(|dir| {
            println!("wrote {}", dir.join("runs.csv").display());
            println!("wrote {}", dir.join("table.csv").display());
            EXIT_OPTIMUM
        }),
        Command::Landscape(a) => landscape(a, &registry).map(|r| {
            print!("{r}");
            EXIT_OPTIMUM
        }),
        Command::Gen(a) => gen(a).map(|()| EXIT_OPTIMUM),
    };
    let _ = std::io::stdout().flush();
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_ERROR
        }
    }
}
