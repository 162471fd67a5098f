//! Reading and writing TSPLIB `.tsp` and `.tour` files.
//!
//! Supported: `TYPE: TSP` with `EDGE_WEIGHT_TYPE` one of `EUC_2D`, `CEIL_2D`,
//! `ATT`, `GEO` or `EXPLICIT` (every triangular/full `EDGE_WEIGHT_FORMAT`),
//! and `TYPE: TOUR` files with a `TOUR_SECTION`.

use std::fmt::Write as _;

use crate::error::TsplibError;
use crate::instance::{Instance, WeightRule};

#[derive(Debug, Default)]
struct Header {
    name: Option<String>,
    kind: Option<String>,
    dimension: Option<usize>,
    weight_type: Option<String>,
    weight_format: Option<String>,
}

#[derive(Debug, Default)]
struct Parsed {
    header: Header,
    coords: Option<Vec<(usize, (f64, f64))>>,
    display: Option<Vec<(usize, (f64, f64))>>,
    weights: Option<Vec<i64>>,
    tour: Option<Vec<i64>>,
}

fn is_keyword_line(line: &str) -> bool {
    line.trim_start()
        .chars()
        .next()
        .is_some_and(|c| c.is_ascii_alphabetic())
}

fn parse_f64(tok: &str, line: usize) -> Result<f64, TsplibError> {
    tok.parse::<f64>().map_err(|_| TsplibError::BadNumber {
        line,
        text: tok.to_string(),
    })
}

fn parse_i64(tok: &str, line: usize) -> Result<i64, TsplibError> {
    if let Ok(v) = tok.parse::<i64>() {
        return Ok(v);
    }
    // Some explicit matrices are written as floats with integral values.
    match tok.parse::<f64>() {
        Ok(v) if v.fract() == 0.0 && v.abs() < 9.0e15 => Ok(v as i64),
        _ => Err(TsplibError::BadNumber {
            line,
            text: tok.to_string(),
        }),
    }
}

fn parse_document(text: &str) -> Result<Parsed, TsplibError> {
    let mut out = Parsed::default();
    let lines: Vec<&str> = text.lines().collect();
    let mut i = 0;
    while i < lines.len() {
        let lineno = i + 1;
        let line = lines[i].trim();
        i += 1;
        if line.is_empty() {
            continue;
        }
        let keyword = line.split(|c: char| c == ':' || c.is_whitespace()).next().unwrap_or("");
        match keyword {
            "EOF" => break,
            "NODE_COORD_SECTION" | "DISPLAY_DATA_SECTION" => {
                let mut pts = Vec::new();
                while i < lines.len() && !is_keyword_line(lines[i]) {
                    let row = lines[i];
                    i += 1;
                    let toks: Vec<&str> = row.split_whitespace().collect();
                    if toks.is_empty() {
                        continue;
                    }
                    if toks.len() < 3 {
                        return Err(TsplibError::MalformedHeader {
                            line: i,
                            text: row.to_string(),
                        });
                    }
                    let id = parse_i64(toks[0], i)?;
                    let x = parse_f64(toks[1], i)?;
                    let y = parse_f64(toks[2], i)?;
                    if id < 1 {
                        return Err(TsplibError::NodeOutOfRange {
                            id,
                            dimension: out.header.dimension.unwrap_or(0),
                        });
                    }
                    pts.push((id as usize - 1, (x, y)));
                }
                if keyword == "NODE_COORD_SECTION" {
                    out.coords = Some(pts);
                } else {
                    out.display = Some(pts);
                }
            }
            "EDGE_WEIGHT_SECTION" | "TOUR_SECTION" => {
                let mut vals = Vec::new();
                'section: while i < lines.len() && !is_keyword_line(lines[i]) {
                    for tok in lines[i].split_whitespace() {
                        let v = parse_i64(tok, i + 1)?;
                        if keyword == "TOUR_SECTION" && v == -1 {
                            i += 1;
                            break 'section;
                        }
                        vals.push(v);
                    }
                    i += 1;
                }
                if keyword == "TOUR_SECTION" {
                    // Only the first tour of a file is read.
                    if out.tour.is_none() {
                        out.tour = Some(vals);
                    }
                } else {
                    out.weights = Some(vals);
                }
            }
            "FIXED_EDGES_SECTION" => return Err(TsplibError::UnsupportedType("TSP with FIXED_EDGES_SECTION".into())),
            _ => {
                let Some((key, value)) = line.split_once(':') else {
                    return Err(TsplibError::MalformedHeader {
                        line: lineno,
                        text: line.to_string(),
                    });
                };
                let key = key.trim();
                let value = value.trim().to_string();
                match key {
                    "NAME" => out.header.name = Some(value),
                    "TYPE" => out.header.kind = Some(value),
                    "DIMENSION" => {
                        let d = value.parse::<usize>().map_err(|_| TsplibError::MalformedHeader {
                            line: lineno,
                            text: line.to_string(),
                        })?;
                        out.header.dimension = Some(d);
                    }
                    "EDGE_WEIGHT_TYPE" => out.header.weight_type = Some(value),
                    "EDGE_WEIGHT_FORMAT" => out.header.weight_format = Some(value),
                    _ => {}
                }
            }
        }
    }
    Ok(out)
}

fn place_points(pts: Vec<(usize, (f64, f64))>, n: usize) -> Result<Vec<(f64, f64)>, TsplibError> {
    if pts.len() != n {
        return Err(TsplibError::CountMismatch {
            what: "coordinates",
            expected: n,
            found: pts.len(),
        });
    }
    let mut out = vec![None; n];
    for (idx, p) in pts {
        if idx >= n || out[idx].is_some() {
            return Err(TsplibError::NodeOutOfRange {
                id: idx as i64 + 1,
                dimension: n,
            });
        }
        out[idx] = Some(p);
    }
    Ok(out.into_iter().map(|p| p.expect("all slots filled")).collect())
}

fn expand_matrix(format: &str, vals: &[i64], n: usize) -> Result<Vec<Vec<i64>>, TsplibError> {
    // Column-major triangular layouts are the mirror image of a row-major
    // layout of the opposite triangle.
    let format = match format {
        "UPPER_COL" => "LOWER_ROW",
        "LOWER_COL" => "UPPER_ROW",
        "UPPER_DIAG_COL" => "LOWER_DIAG_ROW",
        "LOWER_DIAG_COL" => "UPPER_DIAG_ROW",
        other => other,
    };
    let expected = match format {
        "FULL_MATRIX" => n * n,
        "UPPER_ROW" | "LOWER_ROW" => n * (n - 1) / 2,
        "UPPER_DIAG_ROW" | "LOWER_DIAG_ROW" => n * (n + 1) / 2,
        other => return Err(TsplibError::UnsupportedWeightFormat(other.to_string())),
    };
    if vals.len() != expected {
        return Err(TsplibError::CountMismatch {
            what: "edge weights",
            expected,
            found: vals.len(),
        });
    }
    if format == "FULL_MATRIX" {
        // Read verbatim; the instance constructor rejects asymmetry.
        return Ok(vals.chunks(n).map(|row| row.to_vec()).collect());
    }
    let mut m = vec![vec![0i64; n]; n];
    let mut it = vals.iter().copied();
    let mut set = |a: usize, b: usize, v: i64| {
        m[a][b] = v;
        m[b][a] = v;
    };
    match format {
        "UPPER_ROW" => {
            for a in 0..n {
                for b in (a + 1)..n {
                    set(a, b, it.next().expect("length checked"));
                }
            }
        }
        "LOWER_ROW" => {
            for a in 0..n {
                for b in 0..a {
                    set(a, b, it.next().expect("length checked"));
                }
            }
        }
        "UPPER_DIAG_ROW" => {
            for a in 0..n {
                for b in a..n {
                    let v = it.next().expect("length checked");
                    if a != b {
                        set(a, b, v);
                    }
                }
            }
        }
        "LOWER_DIAG_ROW" => {
            for a in 0..n {
                for b in 0..=a {
                    let v = it.next().expect("length checked");
                    if a != b {
                        set(a, b, v);
                    }
                }
            }
        }
        _ => unreachable!(),
    }
    Ok(m)
}

/// Parses a symmetric TSPLIB problem file.
pub fn parse_tsplib(text: &str) -> Result<Instance, TsplibError> {
    let doc = parse_document(text)?;
    let h = &doc.header;
    let kind = h.kind.as_deref().ok_or(TsplibError::MissingField("TYPE"))?;
    if !kind.split_whitespace().next().is_some_and(|k| k == "TSP") {
        return Err(TsplibError::UnsupportedType(kind.to_string()));
    }
    let n = h.dimension.ok_or(TsplibError::MissingField("DIMENSION"))?;
    let name = h
        .name
        .as_deref()
        .map(|s| s.trim_end_matches(".tsp").to_string())
        .unwrap_or_else(|| "unnamed".to_string());
    let wt = h
        .weight_type
        .as_deref()
        .ok_or(TsplibError::MissingField("EDGE_WEIGHT_TYPE"))?;
    let rule = WeightRule::from_tsplib(wt).ok_or_else(|| TsplibError::UnsupportedWeightType(wt.to_string()))?;
    match rule {
        WeightRule::Explicit => {
            let format = h
                .weight_format
                .as_deref()
                .ok_or(TsplibError::MissingField("EDGE_WEIGHT_FORMAT"))?;
            let vals = doc
                .weights
                .as_deref()
                .ok_or(TsplibError::MissingField("EDGE_WEIGHT_SECTION"))?;
            let rows = expand_matrix(format, vals, n)?;
            let mut inst = Instance::from_matrix(name, &rows)?;
            if let Some(disp) = doc.display {
                inst = inst.with_display_coords(place_points(disp, n)?);
            }
            Ok(inst)
        }
        _ => {
            let pts = doc.coords.ok_or(TsplibError::MissingField("NODE_COORD_SECTION"))?;
            let coords = place_points(pts, n)?;
            Ok(Instance::from_coords(name, rule, coords)?)
        }
    }
}

/// Parses the first tour of a TSPLIB `.tour` file into 0-based city indices.
///
/// When `dimension` is given the tour must be a permutation of `1..=dimension`.
pub fn parse_tour(text: &str, dimension: Option<usize>) -> Result<Vec<usize>, TsplibError> {
    let doc = parse_document(text)?;
    let ids = doc.tour.ok_or(TsplibError::MissingField("TOUR_SECTION"))?;
    let n = dimension.or(doc.header.dimension).unwrap_or(ids.len());
    if ids.len() != n {
        return Err(TsplibError::CountMismatch {
            what: "tour nodes",
            expected: n,
            found: ids.len(),
        });
    }
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for id in ids {
        if id < 1 || id as usize > n || seen[id as usize - 1] {
            return Err(TsplibError::NodeOutOfRange { id, dimension: n });
        }
        seen[id as usize - 1] = true;
        order.push(id as usize - 1);
    }
    Ok(order)
}

/// Serializes a coordinate instance as a TSPLIB problem file.
///
/// Coordinates use Rust's shortest round-trip float formatting, so parsing the
/// output reproduces the instance exactly. Explicit instances are written as a
/// `FULL_MATRIX`.
pub fn write_tsplib(inst: &Instance, comment: Option<&str>) -> String {
    let n = inst.dimension();
    let mut s = String::new();
    let _ = writeln!(s, "NAME : {}", inst.name());
    let _ = writeln!(s, "TYPE : TSP");
    if let Some(c) = comment {
        let _ = writeln!(s, "COMMENT : {c}");
    }
    let _ = writeln!(s, "DIMENSION : {n}");
    let _ = writeln!(s, "EDGE_WEIGHT_TYPE : {}", inst.weight_rule());
    match (inst.weight_rule(), inst.coords()) {
        (WeightRule::Explicit, _) | (_, None) => {
            let _ = writeln!(s, "EDGE_WEIGHT_FORMAT : FULL_MATRIX");
            let _ = writeln!(s, "EDGE_WEIGHT_SECTION");
            for a in 0..n {
                let row: Vec<String> = (0..n).map(|b| inst.dist(a, b).to_string()).collect();
                let _ = writeln!(s, "{}", row.join(" "));
            }
        }
        (_, Some(coords)) => {
            let _ = writeln!(s, "NODE_COORD_SECTION");
            for (i, (x, y)) in coords.iter().enumerate() {
                let _ = writeln!(s, "{} {} {}", i + 1, x, y);
            }
        }
    }
    s.push_str("EOF\n");
    s
}

/// Serializes a tour (0-based cities) as a TSPLIB `.tour` file.
pub fn write_tour(name: &str, order: &[usize], comment: Option<&str>) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "NAME : {name}");
    if let Some(c) = comment {
        let _ = writeln!(s, "COMMENT : {c}");
    }
    let _ = writeln!(s, "TYPE : TOUR");
    let _ = writeln!(s, "DIMENSION : {}", order.len());
    let _ = writeln!(s, "TOUR_SECTION");
    for &c in order {
        let _ = writeln!(s, "{}", c + 1);
    }
    s.push_str("-1\nEOF\n");
    s
}
