//! Per-instance comparison table derived from run records.

use std::io::Write;

use anyhow::Result;
use gls_core::stats::{dominance_verdict, excess, mann_whitney_u, MetricComparison, Verdict};

use crate::records::RunRecord;
use crate::runner::Algorithm;

/// Significance level of the rank tests.
pub const ALPHA: f64 = 0.05;

/// Marker for cells that cannot be computed.
pub const NA: &str = "NA";

/// One table row comparing GLS (A) with EB-GLS (B) on an instance.
#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub instance: String,
    pub max_runtime: f64,
    pub runs: (usize, usize),
    pub success: Option<(u32, u32)>,
    pub avg_excess: Option<(f64, f64)>,
    pub excess_p: Option<f64>,
    pub avg_runtime: Option<(f64, f64)>,
    pub runtime_p: Option<f64>,
    pub verdict: Option<Verdict>,
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// p-value of the rank test, or `None` when a side is empty or every value
/// in both samples is the same.
fn rank_p(a: &[f64], b: &[f64]) -> Result<Option<f64>> {
    if a.is_empty() || b.is_empty() {
        return Ok(None);
    }
    let first = a[0];
    if a.iter().chain(b).all(|&v| v == first) {
        return Ok(None);
    }
    Ok(Some(mann_whitney_u(a, b)?.p))
}

/// Groups records by instance (first-appearance order) and compares the two
/// algorithms on each.
pub fn build_table(records: &[RunRecord]) -> Result<Vec<TableRow>> {
    let mut names: Vec<&str> = Vec::new();
    for r in records {
        if !names.contains(&r.instance.as_str()) {
            names.push(&r.instance);
        }
    }
    let mut rows = Vec::new();
    for name in names {
        let of = |algo: Algorithm| {
            let mut v: Vec<&RunRecord> = records
                .iter()
                .filter(|r| r.instance == name && r.algorithm == algo)
                .collect();
            v.sort_by_key(|r| r.pair);
            v
        };
        let (a, b) = (of(Algorithm::Gls), of(Algorithm::Ebgls));
        let any = a.first().or(b.first()).expect("instance has records");
        let optimum = any.optimum;
        let costs = |v: &[&RunRecord]| v.iter().map(|r| r.best_cost as f64).collect::<Vec<_>>();
        let excess_p = rank_p(&costs(&a), &costs(&b))?;
        let both = !a.is_empty() && !b.is_empty();
        let (success, avg_excess, avg_runtime, runtime_p) = match optimum {
            Some(opt) => {
                let succ = |v: &[&RunRecord]| v.iter().filter(|r| r.success == Some(true)).count() as u32;
                let exc = |v: &[&RunRecord]| -> Result<Vec<f64>> {
                    v.iter().map(|r| Ok(excess(r.best_cost, opt)?)).collect()
                };
                let rt = |v: &[&RunRecord]| v.iter().map(|r| r.runtime).collect::<Vec<_>>();
                let (ea, eb) = (exc(&a)?, exc(&b)?);
                let (ra, rb) = (rt(&a), rt(&b));
                (
                    Some((succ(&a), succ(&b))),
                    both.then(|| (mean(&ea), mean(&eb))),
                    both.then(|| (mean(&ra), mean(&rb))),
                    rank_p(&ra, &rb)?,
                )
            }
            None => (None, None, None, None),
        };
        let verdict = both.then(|| {
            let cost_mean = |v: &[&RunRecord]| mean(&costs(v));
            let ex = MetricComparison {
                mean_a: cost_mean(&a),
                mean_b: cost_mean(&b),
                p: excess_p,
            };
            let rt = match avg_runtime {
                Some((ma, mb)) => MetricComparison {
                    mean_a: ma,
                    mean_b: mb,
                    p: runtime_p,
                },
                None => MetricComparison {
                    mean_a: 0.0,
                    mean_b: 0.0,
                    p: None,
                },
            };
            dominance_verdict(success.unwrap_or((0, 0)), &ex, &rt, ALPHA)
        });
        rows.push(TableRow {
            instance: name.to_string(),
            max_runtime: any.budget,
            runs: (a.len(), b.len()),
            success,
            avg_excess,
            excess_p,
            avg_runtime,
            runtime_p,
            verdict,
        });
    }
    Ok(rows)
}

pub const TABLE_HEADER: [&str; 11] = [
    "instance",
    "max_runtime",
    "success_gls",
    "success_ebgls",
    "avg_excess_gls",
    "avg_excess_ebgls",
    "excess_p",
    "avg_runtime_gls",
    "avg_runtime_ebgls",
    "runtime_p",
    "verdict",
];

fn opt_cell<T>(v: Option<T>, f: impl Fn(T) -> String) -> String {
    v.map(f).unwrap_or_else(|| NA.to_string())
}

impl TableRow {
    pub fn cells(&self) -> Vec<String> {
        let p = |x: f64| format!("{x:.4e}");
        let fx = |x: f64| format!("{x:.4}");
        vec![
            self.instance.clone(),
            format!("{}", self.max_runtime),
            opt_cell(self.success, |s| s.0.to_string()),
            opt_cell(self.success, |s| s.1.to_string()),
            opt_cell(self.avg_excess, |e| fx(e.0)),
            opt_cell(self.avg_excess, |e| fx(e.1)),
            opt_cell(self.excess_p, p),
            opt_cell(self.avg_runtime, |r| fx(r.0)),
            opt_cell(self.avg_runtime, |r| fx(r.1)),
            opt_cell(self.runtime_p, p),
            opt_cell(self.verdict, |v| v.label("gls", "ebgls")),
        ]
    }
}

/// Writes `# fingerprint: <hex>` followed by the table.
pub fn write_table<W: Write>(mut out: W, fingerprint: &str, rows: &[TableRow]) -> Result<()> {
    writeln!(out, "# fingerprint: {fingerprint}")?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TABLE_HEADER)?;
    for r in rows {
        w.write_record(r.cells())?;
    }
    w.flush()?;
    Ok(())
}
