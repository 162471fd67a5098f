//! Symmetric TSP instances and the TSPLIB distance rules.

use std::fmt;

use crate::error::{Error, Result};

/// Instances up to this many cities keep a full integer distance matrix.
pub const DEFAULT_CACHE_THRESHOLD: usize = 5000;

/// How edge weights are derived for an instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WeightRule {
    Euc2d,
    Ceil2d,
    Att,
    Geo,
    Explicit,
}

impl WeightRule {
    pub fn tsplib_name(self) -> &'static str {
        match self {
            WeightRule::Euc2d => "EUC_2D",
            WeightRule::Ceil2d => "CEIL_2D",
            WeightRule::Att => "ATT",
            WeightRule::Geo => "GEO",
            WeightRule::Explicit => "EXPLICIT",
        }
    }

    pub fn from_tsplib(name: &str) -> Option<Self> {
        Some(match name {
            "EUC_2D" => WeightRule::Euc2d,
            "CEIL_2D" => WeightRule::Ceil2d,
            "ATT" => WeightRule::Att,
            "GEO" => WeightRule::Geo,
            "EXPLICIT" => WeightRule::Explicit,
            _ => return None,
        })
    }
}

impl fmt::Display for WeightRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tsplib_name())
    }
}

/// TSPLIB `nint`: round half up, then truncate toward zero.
#[inline]
fn nint(x: f64) -> i64 {
    (x + 0.5) as i64
}

#[inline]
pub fn euc_2d(p: (f64, f64), q: (f64, f64)) -> i64 {
    let (dx, dy) = (p.0 - q.0, p.1 - q.1);
    nint((dx * dx + dy * dy).sqrt())
}

#[inline]
pub fn ceil_2d(p: (f64, f64), q: (f64, f64)) -> i64 {
    let (dx, dy) = (p.0 - q.0, p.1 - q.1);
    (dx * dx + dy * dy).sqrt().ceil() as i64
}

/// Pseudo-Euclidean distance used by att48 and att532.
#[inline]
pub fn att(p: (f64, f64), q: (f64, f64)) -> i64 {
    let (dx, dy) = (p.0 - q.0, p.1 - q.1);
    let r = ((dx * dx + dy * dy) / 10.0).sqrt();
    let t = nint(r);
    if (t as f64) < r {
        t + 1
    } else {
        t
    }
}

// TSPLIB fixes pi at six decimals for GEO distances.
#[allow(clippy::approx_constant)]
const GEO_PI: f64 = 3.141592;
const GEO_RADIUS: f64 = 6378.388;

/// Converts a TSPLIB `DDD.MM` coordinate to radians.
#[inline]
pub fn geo_radians(x: f64) -> f64 {
    let deg = x.trunc();
    let min = x - deg;
    GEO_PI * (deg + 5.0 * min / 3.0) / 180.0
}

/// Great-circle distance on the idealized sphere; arguments are already in
/// radians (latitude, longitude).
#[inline]
pub fn geo_from_radians(p: (f64, f64), q: (f64, f64)) -> i64 {
    let q1 = (p.1 - q.1).cos();
    let q2 = (p.0 - q.0).cos();
    let q3 = (p.0 + q.0).cos();
    (GEO_RADIUS * (0.5 * ((1.0 + q1) * q2 - (1.0 - q1) * q3)).acos() + 1.0) as i64
}

pub fn geo(p: (f64, f64), q: (f64, f64)) -> i64 {
    geo_from_radians(
        (geo_radians(p.0), geo_radians(p.1)),
        (geo_radians(q.0), geo_radians(q.1)),
    )
}

/// An undirected edge in canonical `lo < hi` form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeKey {
    lo: u32,
    hi: u32,
}

impl EdgeKey {
    /// Panics when `a == b`.
    #[inline]
    pub fn new(a: usize, b: usize) -> Self {
        assert_ne!(a, b, "an edge needs two distinct endpoints");
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        EdgeKey {
            lo: lo as u32,
            hi: hi as u32,
        }
    }

    #[inline]
    pub fn lo(self) -> usize {
        self.lo as usize
    }

    #[inline]
    pub fn hi(self) -> usize {
        self.hi as usize
    }

    pub fn endpoints(self) -> (usize, usize) {
        (self.lo(), self.hi())
    }
}

impl fmt::Display for EdgeKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.lo, self.hi)
    }
}

#[derive(Debug, Clone)]
enum Source {
    Coords(Vec<(f64, f64)>),
    /// Coordinates pre-converted to radians.
    Geo(Vec<(f64, f64)>),
    Matrix,
}

/// An immutable symmetric TSP instance.
///
/// Distances are integers. Instances with at most
/// [`DEFAULT_CACHE_THRESHOLD`] cities (and every explicit-matrix instance)
/// answer [`Instance::dist`] from a full row-major matrix; larger coordinate
/// instances compute distances on demand.
#[derive(Debug, Clone)]
pub struct Instance {
    name: String,
    rule: WeightRule,
    n: usize,
    coords: Option<Vec<(f64, f64)>>,
    source: Source,
    matrix: Option<Vec<i32>>,
}

impl Instance {
    /// Builds a coordinate-based instance with the default cache policy.
    pub fn from_coords(name: impl Into<String>, rule: WeightRule, coords: Vec<(f64, f64)>) -> Result<Self> {
        Self::from_coords_with_cache(name, rule, coords, DEFAULT_CACHE_THRESHOLD)
    }

    pub fn from_coords_with_cache(
        name: impl Into<String>,
        rule: WeightRule,
        coords: Vec<(f64, f64)>,
        cache_threshold: usize,
    ) -> Result<Self> {
        let n = coords.len();
        if n < 3 {
            return Err(Error::TooFewCities(n));
        }
        if rule == WeightRule::Explicit {
            return Err(Error::InvalidArgument(
                "EXPLICIT instances are built from a matrix".into(),
            ));
        }
        let source = match rule {
            WeightRule::Geo => Source::Geo(coords.iter().map(|&(x, y)| (geo_radians(x), geo_radians(y))).collect()),
            _ => Source::Coords(coords.clone()),
        };
        let mut inst = Instance {
            name: name.into(),
            rule,
            n,
            coords: Some(coords),
            source,
            matrix: None,
        };
        if n <= cache_threshold {
            let mut m = vec![0i32; n * n];
            for a in 0..n {
                for b in (a + 1)..n {
                    let d = inst.compute(a, b);
                    let d = i32::try_from(d)
                        .map_err(|_| Error::InvalidArgument(format!("distance {d} does not fit the matrix cache")))?;
                    m[a * n + b] = d;
                    m[b * n + a] = d;
                }
            }
            inst.matrix = Some(m);
        }
        Ok(inst)
    }

    /// Builds an explicit instance from a full square matrix. The diagonal is
    /// ignored; the matrix must be symmetric with non-negative entries.
    pub fn from_matrix(name: impl Into<String>, rows: &[Vec<i64>]) -> Result<Self> {
        let n = rows.len();
        if n < 3 {
            return Err(Error::TooFewCities(n));
        }
        let mut m = vec![0i32; n * n];
        for (a, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::MatrixShape {
                    row: a,
                    expected: n,
                    found: row.len(),
                });
            }
            for (b, &d) in row.iter().enumerate() {
                if a == b {
                    continue;
                }
                if d < 0 {
                    return Err(Error::NegativeDistance(a, b));
                }
                if rows[b][a] != d {
                    return Err(Error::AsymmetricMatrix(a, b));
                }
                m[a * n + b] = i32::try_from(d)
                    .map_err(|_| Error::InvalidArgument(format!("distance {d} does not fit the matrix cache")))?;
            }
        }
        Ok(Instance {
            name: name.into(),
            rule: WeightRule::Explicit,
            n,
            coords: None,
            source: Source::Matrix,
            matrix: Some(m),
        })
    }

    /// Attaches display coordinates (TSPLIB `DISPLAY_DATA_SECTION`) to an
    /// explicit instance. They play no part in distances.
    pub fn with_display_coords(mut self, coords: Vec<(f64, f64)>) -> Self {
        if coords.len() == self.n {
            self.coords = Some(coords);
        }
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn weight_rule(&self) -> WeightRule {
        self.rule
    }

    pub fn coords(&self) -> Option<&[(f64, f64)]> {
        self.coords.as_deref()
    }

    pub fn is_cached(&self) -> bool {
        self.matrix.is_some()
    }

    /// Distance between cities `a` and `b`.
    #[inline]
    pub fn dist(&self, a: usize, b: usize) -> i64 {
        match &self.matrix {
            Some(m) => m[a * self.n + b] as i64,
            None => self.compute(a, b),
        }
    }

    #[inline]
    fn compute(&self, a: usize, b: usize) -> i64 {
        if a == b {
            return 0;
        }
        match &self.source {
            Source::Coords(c) => match self.rule {
                WeightRule::Euc2d => euc_2d(c[a], c[b]),
                WeightRule::Ceil2d => ceil_2d(c[a], c[b]),
                WeightRule::Att => att(c[a], c[b]),
                WeightRule::Geo | WeightRule::Explicit => unreachable!("rule/source mismatch"),
            },
            Source::Geo(r) => geo_from_radians(r[a], r[b]),
            Source::Matrix => unreachable!("explicit instances are always cached"),
        }
    }

    /// Iterates all unordered city pairs with a zero distance.
    pub fn zero_distance_pairs(&self) -> impl Iterator<Item = EdgeKey> + '_ {
        (0..self.n).flat_map(move |a| {
            ((a + 1)..self.n)
                .filter(move |&b| self.dist(a, b) == 0)
                .map(move |b| EdgeKey::new(a, b))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_four_five() {
        let inst = Instance::from_coords("t", WeightRule::Euc2d, vec![(0.0, 0.0), (3.0, 4.0), (10.0, 10.0)]).unwrap();
        assert_eq!(inst.dist(0, 1), 5);
        assert_eq!(inst.dist(1, 0), 5);
    }

    #[test]
    fn rounding_rules() {
        // |(0,0)-(1,1)| = 1.414..
        let p = (0.0, 0.0);
        let q = (1.0, 1.0);
        assert_eq!(euc_2d(p, q), 1);
        assert_eq!(ceil_2d(p, q), 2);
        // sqrt(200/10) = 4.47 -> nint 4 < 4.47 -> 5
        assert_eq!(att(p, (10.0, 10.0)), 5);
        // sqrt(1000/10) = 10 exactly
        assert_eq!(att(p, (10.0, 30.0)), 10);
    }

    #[test]
    fn rejects_tiny_instances() {
        let err = Instance::from_coords("t", WeightRule::Euc2d, vec![(0.0, 0.0), (1.0, 0.0)]);
        assert_eq!(err.unwrap_err(), Error::TooFewCities(2));
    }

    #[test]
    fn matrix_must_be_symmetric() {
        let rows = vec![vec![0, 1, 2], vec![1, 0, 3], vec![2, 4, 0]];
        assert_eq!(
            Instance::from_matrix("m", &rows).unwrap_err(),
            Error::AsymmetricMatrix(1, 2)
        );
    }

    #[test]
    fn cached_and_on_demand_agree() {
        let coords: Vec<_> = (0..40)
            .map(|i| ((i * 37 % 101) as f64 * 1.7, (i * 53 % 97) as f64 * 2.3))
            .collect();
        for rule in [WeightRule::Euc2d, WeightRule::Ceil2d, WeightRule::Att, WeightRule::Geo] {
            let cached = Instance::from_coords_with_cache("c", rule, coords.clone(), 100).unwrap();
            let lazy = Instance::from_coords_with_cache("c", rule, coords.clone(), 10).unwrap();
            assert!(cached.is_cached() && !lazy.is_cached());
            for a in 0..40 {
                for b in 0..40 {
                    assert_eq!(cached.dist(a, b), lazy.dist(a, b), "{rule} {a} {b}");
                }
            }
        }
    }

    #[test]
    fn edge_key_is_canonical() {
        let e = EdgeKey::new(7, 3);
        assert_eq!(e.endpoints(), (3, 7));
        assert_eq!(e, EdgeKey::new(3, 7));
    }
}
