mod common;

use std::fs;

use gls_core::{parse_tour, parse_tsplib, tour_cost, Instance, WeightRule};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn every_bundled_instance_parses() {
    let dir = common::data_dir().join("tsplib");
    let mut count = 0;
    for entry in fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("tsp") {
            continue;
        }
        let parsed = parse_tsplib(&fs::read_to_string(&path).unwrap());
        // Fixed-edge variants are out of scope and must be refused, not misread.
        if path.file_stem().unwrap() == "linhp318" {
            assert!(parsed.is_err());
            continue;
        }
        let inst = parsed.unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert!(inst.dimension() >= 3);
        count += 1;
    }
    assert!(count >= 100, "only {count} instances found");
}

#[test]
fn optimal_tours_sum_to_registered_optima() {
    let optima = common::optima();
    let dir = common::data_dir().join("tsplib");
    let mut checked = 0;
    for entry in fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        let fname = path.file_name().unwrap().to_string_lossy().into_owned();
        let Some(stem) = fname.strip_suffix(".opt.tour") else {
            continue;
        };
        let inst = common::load(stem);
        let order = parse_tour(&fs::read_to_string(&path).unwrap(), Some(inst.dimension())).unwrap();
        let expected = optima[&stem.to_ascii_lowercase()];
        assert_eq!(tour_cost(&inst, &order), expected, "{stem}");
        checked += 1;
    }
    assert!(checked >= 30, "only {checked} optimal tours checked");
}

#[test]
fn att532_header() {
    let inst = common::load("att532");
    assert_eq!(inst.dimension(), 532);
    assert_eq!(inst.weight_rule(), WeightRule::Att);
}

#[test]
fn berlin52_optimum() {
    let inst = common::load("berlin52");
    let text = fs::read_to_string(common::data_dir().join("tsplib/berlin52.opt.tour")).unwrap();
    let order = parse_tour(&text, Some(52)).unwrap();
    assert_eq!(tour_cost(&inst, &order), 7542);
}

fn symmetric_positive(inst: &Instance, samples: usize) {
    let n = inst.dimension();
    let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
    for _ in 0..samples {
        let a = rng.random_range(0..n);
        let b = rng.random_range(0..n);
        assert_eq!(inst.dist(a, b), inst.dist(b, a));
        if a != b {
            assert!(inst.dist(a, b) >= 0);
        }
    }
}

#[test]
fn distances_are_symmetric() {
    for name in ["att532", "gr666", "pr1002", "u2319", "bayg29", "fri26", "a280"] {
        let inst = common::load(name);
        symmetric_positive(&inst, 10_000);
    }
}

#[test]
fn positive_distances_in_the_comparison_instances() {
    for name in ["eil51", "berlin52", "st70", "att532", "rd400"] {
        assert_eq!(common::load(name).zero_distance_pairs().count(), 0, "{name}");
    }
}
