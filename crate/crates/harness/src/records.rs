//! Per-run records and their CSV form.

use std::io::{Read, Write};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use crate::campaign::BudgetMode;
use crate::runner::Algorithm;

/// Outcome of one run. `runtime` is in the campaign's budget unit: seconds to
/// the optimum, or iterations to the optimum; unsuccessful runs carry the
/// full budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub instance: String,
    pub algorithm: Algorithm,
    pub pair: u32,
    pub seed: u64,
    pub start_cost: i64,
    pub best_cost: i64,
    pub optimum: Option<i64>,
    pub success: Option<bool>,
    pub iterations: u64,
    pub runtime: f64,
    pub budget: f64,
    pub unit: BudgetMode,
}

/// Writes `# fingerprint: <hex>` followed by the CSV rows.
pub fn write_records<W: Write>(mut out: W, fingerprint: &str, records: &[RunRecord]) -> Result<()> {
    writeln!(out, "# fingerprint: {fingerprint}")?;
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads records written by [`write_records`], returning the fingerprint too.
pub fn read_records<R: Read>(mut input: R) -> Result<(Option<String>, Vec<RunRecord>)> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;
    let fingerprint = text
        .lines()
        .find_map(|l| l.strip_prefix("# fingerprint: "))
        .map(str::to_string);
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let records = rdr
        .deserialize()
        .collect::<std::result::Result<Vec<RunRecord>, _>>()
        .context("malformed run records")?;
    Ok((fingerprint, records))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let recs = vec![
            RunRecord {
                instance: "eil51".into(),
                algorithm: Algorithm::Gls,
                pair: 0,
                seed: 42,
                start_cost: 1600,
                best_cost: 426,
                optimum: Some(426),
                success: Some(true),
                iterations: 900,
                runtime: 0.0061,
                budget: 6.0,
                unit: BudgetMode::Time,
            },
            RunRecord {
                instance: "rand30s2".into(),
                algorithm: Algorithm::Ebgls,
                pair: 1,
                seed: 43,
                start_cost: 1,
                best_cost: 1,
                optimum: None,
                success: None,
                iterations: 200,
                runtime: 200.0,
                budget: 200.0,
                unit: BudgetMode::Iterations,
            },
        ];
        let mut buf = Vec::new();
        write_records(&mut buf, "abc", &recs).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# fingerprint: abc\ninstance,algorithm,pair,seed,"));
        let (fp, back) = read_records(&buf[..]).unwrap();
        assert_eq!(fp.as_deref(), Some("abc"));
        assert_eq!(back, recs);
    }
}
