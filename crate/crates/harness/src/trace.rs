//! Best-so-far trajectories and tour lists in line formats.
//!
//! Tours are written as space-separated 1-based city ids.

use std::fmt::Write as _;

use anyhow::{bail, Context, Result};
use gls_core::gls::{IterationView, SearchObserver};
use gls_core::{Instance, Tour};

/// One improvement of the best-so-far tour.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceSample {
    pub run_id: u64,
    pub iteration: u64,
    pub cost: i64,
    pub tour: Tour,
}

/// Observer keeping the best tour after every iteration that improved it.
#[derive(Debug, Default)]
pub struct TraceRecorder {
    pub run_id: u64,
    pub samples: Vec<TraceSample>,
}

impl TraceRecorder {
    pub fn new(run_id: u64) -> Self {
        TraceRecorder {
            run_id,
            samples: Vec::new(),
        }
    }
}

impl SearchObserver for TraceRecorder {
    fn on_iteration(&mut self, view: &IterationView<'_>) {
        if view.improved {
            self.samples.push(TraceSample {
                run_id: self.run_id,
                iteration: view.iteration,
                cost: view.best.cost(),
                tour: view.best.clone(),
            });
        }
    }
}

/// Space-separated 1-based city ids.
pub fn format_tour(tour: &Tour) -> String {
    let mut s = String::with_capacity(tour.len() * 5);
    for (k, &c) in tour.as_slice().iter().enumerate() {
        if k > 0 {
            s.push(' ');
        }
        let _ = write!(s, "{}", c + 1);
    }
    s
}

/// Inverse of [`format_tour`].
pub fn parse_tour_field(inst: &Instance, field: &str) -> Result<Tour> {
    let order = field
        .split_whitespace()
        .map(|t| {
            let id: usize = t.parse().with_context(|| format!("bad city id `{t}`"))?;
            if id == 0 {
                bail!("city ids are 1-based");
            }
            Ok(id - 1)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Tour::new(inst, order)?)
}

/// `run_id,iteration,cost,tour` lines.
pub fn format_trace_line(s: &TraceSample) -> String {
    format!("{},{},{},{}", s.run_id, s.iteration, s.cost, format_tour(&s.tour))
}

/// Parses trace lines; blank lines and `#` comments are skipped. Costs are
/// checked against the instance.
pub fn parse_trace(inst: &Instance, text: &str) -> Result<Vec<TraceSample>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.splitn(4, ',').collect();
        let [run_id, iteration, cost, tour] = fields[..] else {
            bail!("trace line {}: expected 4 fields", i + 1);
        };
        let tour = parse_tour_field(inst, tour).with_context(|| format!("trace line {}", i + 1))?;
        let cost: i64 = cost.parse().with_context(|| format!("trace line {}", i + 1))?;
        if cost != tour.cost() {
            bail!(
                "trace line {}: recorded cost {cost} but tour costs {}",
                i + 1,
                tour.cost()
            );
        }
        out.push(TraceSample {
            run_id: run_id.parse().with_context(|| format!("trace line {}", i + 1))?,
            iteration: iteration.parse().with_context(|| format!("trace line {}", i + 1))?,
            cost,
            tour,
        });
    }
    Ok(out)
}

/// `instance,cost,tour` lines of an optima pool file.
pub fn format_pool_line(instance: &str, tour: &Tour) -> String {
    format!("{},{},{}", instance, tour.cost(), format_tour(tour))
}

/// Reads the tours of `inst` from a pool file; lines of other instances are
/// ignored.
pub fn parse_pool(inst: &Instance, text: &str) -> Result<Vec<Tour>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.splitn(3, ',').collect();
        let [name, cost, tour] = fields[..] else {
            bail!("pool line {}: expected 3 fields", i + 1);
        };
        if !name.eq_ignore_ascii_case(inst.name()) {
            continue;
        }
        let tour = parse_tour_field(inst, tour).with_context(|| format!("pool line {}", i + 1))?;
        let cost: i64 = cost.parse().with_context(|| format!("pool line {}", i + 1))?;
        if cost != tour.cost() {
            bail!(
                "pool line {}: recorded cost {cost} but tour costs {}",
                i + 1,
                tour.cost()
            );
        }
        out.push(tour);
    }
    Ok(out)
}
