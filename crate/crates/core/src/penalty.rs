//! Edge penalty counters for the augmented objective.

use rustc_hash::{FxHashMap, FxHashSet};

use crate::instance::EdgeKey;
use crate::tour::Tour;

/// Instances up to this many cities keep penalties in a dense matrix.
pub const DENSE_PENALTY_THRESHOLD: usize = 5000;

#[derive(Debug, Clone)]
enum Repr {
    /// Symmetric row-major `n x n` counters.
    Dense(Vec<u32>),
    /// Only non-zero counters are stored.
    Sparse(FxHashMap<EdgeKey, u32>),
}

/// Non-negative integer penalty per undirected edge.
///
/// Counters only ever grow, one unit per [`PenaltyStore::increment`]. The
/// store keeps the total mass and, when a tracked edge set is installed, the
/// mass on that set.
#[derive(Debug, Clone)]
pub struct PenaltyStore {
    n: usize,
    repr: Repr,
    total: u64,
    tracked: Option<FxHashSet<EdgeKey>>,
    tracked_mass: u64,
}

impl PenaltyStore {
    pub fn new(n: usize) -> Self {
        Self::with_dense_threshold(n, DENSE_PENALTY_THRESHOLD)
    }

    pub fn with_dense_threshold(n: usize, threshold: usize) -> Self {
        let repr = if n <= threshold {
            Repr::Dense(vec![0; n * n])
        } else {
            Repr::Sparse(FxHashMap::default())
        };
        PenaltyStore {
            n,
            repr,
            total: 0,
            tracked: None,
            tracked_mass: 0,
        }
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.repr, Repr::Dense(_))
    }

    /// Penalty of edge `a-b`; 0 when `a == b`.
    #[inline]
    pub fn get(&self, a: usize, b: usize) -> u32 {
        match &self.repr {
            Repr::Dense(m) => m[a * self.n + b],
            Repr::Sparse(map) => {
                if a == b {
                    0
                } else {
                    map.get(&EdgeKey::new(a, b)).copied().unwrap_or(0)
                }
            }
        }
    }

    #[inline]
    pub fn get_edge(&self, e: EdgeKey) -> u32 {
        self.get(e.lo(), e.hi())
    }

    /// Adds one to the penalty of `e` and returns the new value.
    pub fn increment(&mut self, e: EdgeKey) -> u32 {
        let (a, b) = e.endpoints();
        let v = match &mut self.repr {
            Repr::Dense(m) => {
                m[a * self.n + b] += 1;
                m[b * self.n + a] += 1;
                m[a * self.n + b]
            }
            Repr::Sparse(map) => {
                let slot = map.entry(e).or_insert(0);
                *slot += 1;
                *slot
            }
        };
        self.total += 1;
        if self.tracked.as_ref().is_some_and(|t| t.contains(&e)) {
            self.tracked_mass += 1;
        }
        v
    }

    /// Sum of all penalties.
    pub fn total(&self) -> u64 {
        self.total
    }

    /// Non-zero entries, in no particular order.
    pub fn nonzero(&self) -> Vec<(EdgeKey, u32)> {
        match &self.repr {
            Repr::Dense(m) => {
                let n = self.n;
                let mut out = Vec::new();
                for a in 0..n {
                    for b in (a + 1)..n {
                        let v = m[a * n + b];
                        if v > 0 {
                            out.push((EdgeKey::new(a, b), v));
                        }
                    }
                }
                out
            }
            Repr::Sparse(map) => map.iter().map(|(&e, &v)| (e, v)).collect(),
        }
    }

    /// Σ p_e over the edges of `tour`.
    pub fn tour_penalty(&self, tour: &Tour) -> u64 {
        tour.edges().map(|e| self.get_edge(e) as u64).sum()
    }

    /// Installs the edge set whose penalty mass is maintained incrementally.
    /// The mass already on the set is counted immediately.
    pub fn track(&mut self, edges: impl IntoIterator<Item = EdgeKey>) {
        let set: FxHashSet<EdgeKey> = edges.into_iter().collect();
        self.tracked_mass = set.iter().map(|&e| self.get_edge(e) as u64).sum();
        self.tracked = Some(set);
    }

    /// Penalty mass on the tracked set, if one is installed.
    pub fn tracked_mass(&self) -> Option<u64> {
        self.tracked.as_ref().map(|_| self.tracked_mass)
    }
}
