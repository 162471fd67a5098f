//! Hamiltonian cycles over an [`Instance`].

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::instance::{EdgeKey, Instance};

/// Sum of the `N` cyclic edge lengths of `order`.
pub fn tour_cost(inst: &Instance, order: &[usize]) -> i64 {
    let n = order.len();
    (0..n).map(|k| inst.dist(order[k], order[(k + 1) % n])).sum()
}

/// A tour stored as a city sequence plus its inverse and cached cost.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tour {
    order: Vec<u32>,
    pos: Vec<u32>,
    cost: i64,
}

impl Tour {
    /// Validates `order` as a permutation of the instance's cities.
    pub fn new(inst: &Instance, order: Vec<usize>) -> Result<Self> {
        let n = inst.dimension();
        if order.len() != n {
            return Err(Error::SizeMismatch {
                expected: n,
                found: order.len(),
            });
        }
        let mut pos = vec![u32::MAX; n];
        for (k, &c) in order.iter().enumerate() {
            if c >= n || pos[c] != u32::MAX {
                return Err(Error::NotAPermutation(n));
            }
            pos[c] = k as u32;
        }
        let cost = tour_cost(inst, &order);
        Ok(Tour {
            order: order.into_iter().map(|c| c as u32).collect(),
            pos,
            cost,
        })
    }

    /// The identity order `0, 1, .., N-1`.
    pub fn identity(inst: &Instance) -> Self {
        Tour::new(inst, (0..inst.dimension()).collect()).expect("identity is a permutation")
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.order.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Cached objective value g.
    #[inline]
    pub fn cost(&self) -> i64 {
        self.cost
    }

    #[inline]
    pub fn city_at(&self, k: usize) -> usize {
        self.order[k] as usize
    }

    #[inline]
    pub fn position(&self, city: usize) -> usize {
        self.pos[city] as usize
    }

    #[inline]
    pub fn next(&self, city: usize) -> usize {
        let k = self.pos[city] as usize + 1;
        self.order[if k == self.order.len() { 0 } else { k }] as usize
    }

    #[inline]
    pub fn prev(&self, city: usize) -> usize {
        let k = self.pos[city] as usize;
        self.order[if k == 0 { self.order.len() - 1 } else { k - 1 }] as usize
    }

    pub fn order(&self) -> Vec<usize> {
        self.order.iter().map(|&c| c as usize).collect()
    }

    /// Raw sequence view.
    pub fn as_slice(&self) -> &[u32] {
        &self.order
    }

    /// The `N` undirected edges in tour order.
    pub fn edges(&self) -> impl Iterator<Item = EdgeKey> + '_ {
        let n = self.order.len();
        (0..n).map(move |k| EdgeKey::new(self.order[k] as usize, self.order[(k + 1) % n] as usize))
    }

    /// Whether the undirected edge `a-b` is part of the cycle.
    #[inline]
    pub fn contains_edge(&self, a: usize, b: usize) -> bool {
        self.next(a) == b || self.prev(a) == b
    }

    /// Reverses the cyclic run of positions `i..=j` (walking forward from
    /// `i`). When that run is longer than half the tour the complementary run
    /// is reversed instead; both give the same undirected cycle.
    pub(crate) fn reverse(&mut self, i: usize, j: usize) {
        let n = self.order.len();
        let len = (j + n - i) % n + 1;
        let (mut a, mut b, len) = if 2 * len > n {
            ((j + 1) % n, (i + n - 1) % n, n - len)
        } else {
            (i, j, len)
        };
        for _ in 0..len / 2 {
            let (ca, cb) = (self.order[a], self.order[b]);
            self.order[a] = cb;
            self.order[b] = ca;
            self.pos[cb as usize] = a as u32;
            self.pos[ca as usize] = b as u32;
            a = if a + 1 == n { 0 } else { a + 1 };
            b = if b == 0 { n - 1 } else { b - 1 };
        }
    }

    #[inline]
    pub(crate) fn add_cost(&mut self, delta: i64) {
        self.cost += delta;
    }

    /// Rotation starting at city 0, oriented so the second entry is the
    /// smaller of city 0's two neighbors. Two tours describe the same cycle
    /// iff their canonical orders are equal.
    pub fn canonical_order(&self) -> Vec<u32> {
        let n = self.order.len();
        let start = self.pos[0] as usize;
        let forward = self.next(0) < self.prev(0);
        (0..n)
            .map(|k| {
                let idx = if forward { (start + k) % n } else { (start + n - k) % n };
                self.order[idx]
            })
            .collect()
    }

    /// Checks the permutation/inverse invariants and the cached cost.
    pub fn check_invariants(&self, inst: &Instance) -> Result<()> {
        let n = self.order.len();
        if n != inst.dimension() {
            return Err(Error::SizeMismatch {
                expected: inst.dimension(),
                found: n,
            });
        }
        for (k, &c) in self.order.iter().enumerate() {
            if c as usize >= n || self.pos[c as usize] as usize != k {
                return Err(Error::NotAPermutation(n));
            }
        }
        let recomputed = tour_cost(inst, &self.order());
        if recomputed != self.cost {
            return Err(Error::InvalidArgument(format!(
                "cached cost {} differs from recomputed {}",
                self.cost, recomputed
            )));
        }
        Ok(())
    }
}

/// The set of undirected edges of a tour; always `N` elements.
pub fn edges_of(tour: &Tour) -> HashSet<EdgeKey> {
    tour.edges().collect()
}

/// Uniformly shuffled tour, deterministic in `seed`.
pub fn random_tour(inst: &Instance, seed: u64) -> Tour {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..inst.dimension()).collect();
    order.shuffle(&mut rng);
    Tour::new(inst, order).expect("shuffle is a permutation")
}

/// Greedy nearest-neighbor construction from `start`; ties go to the lowest
/// city index.
pub fn nearest_neighbor_tour(inst: &Instance, start: usize) -> Result<Tour> {
    let n = inst.dimension();
    if start >= n {
        return Err(Error::InvalidArgument(format!("start city {start} out of range")));
    }
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut cur = start;
    visited[cur] = true;
    order.push(cur);
    for _ in 1..n {
        let mut best = usize::MAX;
        let mut best_d = i64::MAX;
        for (c, &seen) in visited.iter().enumerate() {
            if !seen {
                let d = inst.dist(cur, c);
                if d < best_d {
                    best_d = d;
                    best = c;
                }
            }
        }
        visited[best] = true;
        order.push(best);
        cur = best;
    }
    Tour::new(inst, order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::WeightRule;

    fn square() -> Instance {
        Instance::from_coords(
            "sq",
            WeightRule::Euc2d,
            vec![(0.0, 0.0), (10.0, 0.0), (10.0, 10.0), (0.0, 10.0)],
        )
        .unwrap()
    }

    #[test]
    fn unit_triangle_cost() {
        let inst = Instance::from_matrix("t", &[vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]]).unwrap();
        for order in [[0, 1, 2], [2, 1, 0], [1, 0, 2]] {
            assert_eq!(tour_cost(&inst, &order), 3);
        }
    }

    #[test]
    fn reversal_keeps_cost() {
        let inst = square();
        let t = Tour::new(&inst, vec![0, 2, 1, 3]).unwrap();
        let r = Tour::new(&inst, vec![3, 1, 2, 0]).unwrap();
        assert_eq!(t.cost(), r.cost());
        assert_eq!(edges_of(&t), edges_of(&r));
    }

    #[test]
    fn four_city_edges() {
        let inst = square();
        let t = Tour::new(&inst, vec![0, 1, 2, 3]).unwrap();
        let expected: HashSet<_> = [(0, 1), (1, 2), (2, 3), (0, 3)]
            .iter()
            .map(|&(a, b)| EdgeKey::new(a, b))
            .collect();
        assert_eq!(edges_of(&t), expected);
    }

    #[test]
    fn rejects_non_permutations() {
        let inst = square();
        assert_eq!(
            Tour::new(&inst, vec![0, 1, 1, 3]).unwrap_err(),
            Error::NotAPermutation(4)
        );
        assert!(matches!(
            Tour::new(&inst, vec![0, 1, 2]),
            Err(Error::SizeMismatch { .. })
        ));
    }

    #[test]
    fn nearest_neighbor_collinear() {
        let inst = Instance::from_coords("line", WeightRule::Euc2d, vec![(0.0, 0.0), (1.0, 0.0), (3.0, 0.0)]).unwrap();
        assert_eq!(nearest_neighbor_tour(&inst, 0).unwrap().order(), vec![0, 1, 2]);
    }

    #[test]
    fn nearest_neighbor_ties_take_lowest_index() {
        // Cities 1 and 2 are both at distance 1 from city 0.
        let inst = Instance::from_coords(
            "tie",
            WeightRule::Euc2d,
            vec![(0.0, 0.0), (1.0, 0.0), (-1.0, 0.0), (0.0, 5.0)],
        )
        .unwrap();
        assert_eq!(nearest_neighbor_tour(&inst, 0).unwrap().order()[1], 1);
    }

    #[test]
    fn canonical_form_ignores_rotation_and_direction() {
        let inst = square();
        let a = Tour::new(&inst, vec![2, 3, 0, 1]).unwrap();
        let b = Tour::new(&inst, vec![1, 0, 3, 2]).unwrap();
        assert_eq!(a.canonical_order(), b.canonical_order());
        assert_eq!(a.canonical_order(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn reverse_both_sides() {
        let coords: Vec<_> = (0..9).map(|i| (i as f64, (i * i) as f64)).collect();
        let inst = Instance::from_coords("r", WeightRule::Euc2d, coords).unwrap();
        for i in 0..9 {
            for j in 0..9 {
                let mut t = Tour::identity(&inst);
                t.reverse(i, j);
                t.cost = tour_cost(&inst, &t.order());
                t.check_invariants(&inst).unwrap();
            }
        }
    }

    #[test]
    fn random_tours_are_permutations() {
        let coords: Vec<_> = (0..25).map(|i| (i as f64, (i % 7) as f64)).collect();
        let inst = Instance::from_coords("r", WeightRule::Euc2d, coords).unwrap();
        for seed in 0..1000 {
            random_tour(&inst, seed).check_invariants(&inst).unwrap();
        }
        assert_eq!(random_tour(&inst, 5), random_tour(&inst, 5));
    }
}
