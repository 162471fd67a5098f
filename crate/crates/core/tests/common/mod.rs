#![allow(dead_code)]

use std::collections::HashMap;
use std::path::PathBuf;

use gls_core::{parse_tsplib, Instance, WeightRule};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

pub fn load(name: &str) -> Instance {
    let path = data_dir().join("tsplib").join(format!("{name}.tsp"));
    parse_tsplib(&std::fs::read_to_string(&path).unwrap()).unwrap()
}

pub fn optima() -> HashMap<String, i64> {
    let text = std::fs::read_to_string(data_dir().join("optima.txt")).unwrap();
    text.lines()
        .filter_map(|l| {
            let l = l.split('#').next()?.trim();
            let mut it = l.split_whitespace();
            Some((it.next()?.to_ascii_lowercase(), it.next()?.parse().ok()?))
        })
        .collect()
}

/// Uniform random EUC_2D instance on a small grid, so ties occur.
pub fn random_instance(n: usize, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coords = (0..n)
        .map(|_| (rng.random_range(0..200) as f64, rng.random_range(0..200) as f64))
        .collect();
    Instance::from_coords(format!("r{n}s{seed}"), WeightRule::Euc2d, coords).unwrap()
}
