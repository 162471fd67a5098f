//! Random uniform Euclidean instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::instance::{euc_2d, Instance, WeightRule};

/// Map side lengths are drawn from the open interval `(SIDE_MIN, SIDE_MAX)`.
pub const SIDE_MIN: f64 = 1.0e5;
pub const SIDE_MAX: f64 = 1.1e6;

/// Rectangle sampled for a generated instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapSize {
    pub width: f64,
    pub height: f64,
}

/// A random instance together with the map it was drawn in.
#[derive(Debug, Clone)]
pub struct Generated {
    pub instance: Instance,
    pub map: MapSize,
}

fn open_side(rng: &mut ChaCha8Rng) -> f64 {
    loop {
        let s = rng.random_range(SIDE_MIN..SIDE_MAX);
        if s > SIDE_MIN {
            return s;
        }
    }
}

/// Draws map width and height, then `n` uniform cities in `[0, width) x
/// [0, height)` with EUC_2D distances. A city whose rounded distance to an
/// already placed city would be 0 is redrawn, so every pair has a positive
/// distance. Deterministic in `(n, seed)`.
pub fn generate_random_instance(n: usize, seed: u64) -> Result<Generated> {
    if n < 3 {
        return Err(Error::TooFewCities(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let map = MapSize {
        width: open_side(&mut rng),
        height: open_side(&mut rng),
    };
    // Cells of side 1 hold every point closer than 0.5 to a query within the
    // query's 3x3 block.
    let mut grid: FxHashMap<(i64, i64), Vec<usize>> = FxHashMap::default();
    let mut coords: Vec<(f64, f64)> = Vec::with_capacity(n);
    while coords.len() < n {
        let p = (rng.random_range(0.0..map.width), rng.random_range(0.0..map.height));
        let cell = (p.0.floor() as i64, p.1.floor() as i64);
        let clash = (-1..=1).any(|dx| {
            (-1..=1).any(|dy| {
                grid.get(&(cell.0 + dx, cell.1 + dy))
                    .is_some_and(|v| v.iter().any(|&k| euc_2d(coords[k], p) == 0))
            })
        });
        if clash {
            continue;
        }
        grid.entry(cell).or_default().push(coords.len());
        coords.push(p);
    }
    let name = format!("rand{n}s{seed}");
    let instance = Instance::from_coords(name, WeightRule::Euc2d, coords)?;
    Ok(Generated { instance, map })
}
