use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use gls_harness::records::read_records;
use gls_harness::runner::Algorithm;

fn data(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(rel)
}

fn ebgls(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ebgls"))
        .args(args)
        .env_remove("EBGLS_WORKERS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn field<'a>(report: &'a str, key: &str) -> &'a str {
    report
        .lines()
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix(": ")))
        .unwrap_or_else(|| panic!("no {key} in\n{report}"))
}

#[test]
fn solve_is_deterministic_under_an_iteration_budget() {
    let inst = data("tsplib/st70.tsp");
    let dir = tempfile::tempdir().unwrap();
    let mut outs = Vec::new();
    for k in 0..2 {
        let trace = dir.path().join(format!("t{k}.txt"));
        let tour = dir.path().join(format!("o{k}.tour"));
        let o = ebgls(&[
            "solve",
            "--instance",
            inst.to_str().unwrap(),
            "--algo",
            "ebgls",
            "--seed",
            "11",
            "--max-iters",
            "300",
            "--no-target",
            "--trace",
            trace.to_str().unwrap(),
            "--tour-out",
            tour.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
        outs.push((stdout(&o), fs::read(&trace).unwrap(), fs::read(&tour).unwrap()));
    }
    assert_eq!(outs[0], outs[1]);
    let report = &outs[0].0;
    assert_eq!(field(report, "instance"), "st70");
    assert_eq!(field(report, "iterations"), "300");
    assert_eq!(field(report, "status"), "budget-exhausted");
    let cost: i64 = field(report, "cost").parse().unwrap();
    let trace = String::from_utf8(outs[0].1.clone()).unwrap();
    let last = trace.lines().last().unwrap();
    assert_eq!(last.split(',').nth(2).unwrap().parse::<i64>().unwrap(), cost);
}

#[test]
fn solve_reports_target_and_zero_budget() {
    let inst = data("tsplib/eil51.tsp");
    let o = ebgls(&[
        "solve",
        "--instance",
        inst.to_str().unwrap(),
        "--seed",
        "5",
        "--max-iters",
        "100000",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let report = stdout(&o);
    assert_eq!(field(&report, "cost"), "426");
    assert_eq!(field(&report, "excess"), "0.0000");
    assert_eq!(field(&report, "status"), "target-reached");
    assert!(String::from_utf8_lossy(&o.stderr).contains("seconds: "));

    let o = ebgls(&[
        "solve",
        "--instance",
        inst.to_str().unwrap(),
        "--seed",
        "5",
        "--max-iters",
        "0",
    ]);
    assert_eq!(o.status.code(), Some(3));
    let report = stdout(&o);
    assert_eq!(field(&report, "iterations"), "0");
    assert_eq!(field(&report, "cost"), field(&report, "start_cost"));
}

#[test]
fn bad_input_exit_codes() {
    assert_eq!(ebgls(&["solve"]).status.code(), Some(2));
    assert_eq!(ebgls(&["frobnicate"]).status.code(), Some(2));
    let o = ebgls(&["solve", "--instance", "/nonexistent.tsp"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
    let inst = data("tsplib/eil51.tsp");
    let o = ebgls(&[
        "solve",
        "--instance",
        inst.to_str().unwrap(),
        "--w",
        "1",
        "--max-iters",
        "5",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

fn campaign(dir: &Path, runs: u32) -> PathBuf {
    let text = format!(
        r#"name = "smoke"
master_seed = 99
runs = {runs}

[budget]
mode = "iterations"
max_iterations = 400

[[instances]]
path = "{}"

[[instances]]
generate_n = 60
generate_seed = 4
"#,
        data("tsplib/eil51.tsp").display()
    );
    let path = dir.join("smoke.toml");
    fs::write(&path, text).unwrap();
    path
}

#[test]
fn bench_writes_paired_records_independent_of_workers() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = campaign(dir.path(), 5);
    let mut files = Vec::new();
    for workers in ["1", "3"] {
        let out = dir.path().join(format!("out{workers}"));
        let o = ebgls(&[
            "bench",
            "--campaign",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--workers",
            workers,
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        files.push((
            fs::read(out.join("runs.csv")).unwrap(),
            fs::read(out.join("table.csv")).unwrap(),
        ));
    }
    assert_eq!(files[0], files[1]);
    let (fp, records) = read_records(&files[0].0[..]).unwrap();
    assert_eq!(fp.unwrap().len(), 64);
    assert_eq!(records.len(), 2 * 5 * 2);
    for r in &records {
        let twin = records
            .iter()
            .find(|o| o.instance == r.instance && o.pair == r.pair && o.algorithm != r.algorithm)
            .unwrap();
        assert_eq!(twin.seed, r.seed);
        assert_eq!(twin.start_cost, r.start_cost);
        assert!(r.iterations <= 400);
        if r.success == Some(false) {
            assert_eq!(r.runtime, 400.0);
        }
        if let Some(opt) = r.optimum {
            assert!(r.best_cost >= opt);
        }
    }
    let seeds: std::collections::HashSet<_> = records.iter().map(|r| (r.instance.clone(), r.seed)).collect();
    assert_eq!(seeds.len(), 10);
    assert!(records.iter().any(|r| r.algorithm == Algorithm::Gls));
    let random = records.iter().find(|r| r.instance == "rand60s4").unwrap();
    assert_eq!(random.optimum, None);
    let table = String::from_utf8(files[0].1.clone()).unwrap();
    let lines: Vec<&str> = table.lines().collect();
    assert!(lines[0].starts_with("# fingerprint: "));
    assert!(lines[1].starts_with("instance,max_runtime,success_gls"));
    assert_eq!(lines.len(), 4);
    assert!(lines[3].starts_with("rand60s4,") && lines[3].contains("NA"));
}

#[test]
fn bench_default_output_directory() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = campaign(dir.path(), 1);
    let o = ebgls(&["bench", "--campaign", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(dir.path().join("smoke-out/runs.csv").exists());
    assert!(dir.path().join("smoke-out/table.csv").exists());
}

#[test]
fn gen_is_reproducible_and_parses_back() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.tsp"), dir.path().join("b.tsp"));
    for p in [&a, &b] {
        let o = ebgls(&["gen", "--n", "150", "--seed", "8", "--out", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let inst = gls_core::parse_tsplib(&fs::read_to_string(&a).unwrap()).unwrap();
    assert_eq!(inst.name(), "rand150s8");
    assert_eq!(inst.dimension(), 150);
    let o = ebgls(&["solve", "--instance", a.to_str().unwrap(), "--max-iters", "20"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(field(&stdout(&o), "optimum"), "unknown");
}

#[test]
fn landscape_pool_and_scatter() {
    let dir = tempfile::tempdir().unwrap();
    let pool = dir.path().join("pool.txt");
    let scatter = dir.path().join("scatter.csv");
    let trace = dir.path().join("trace.txt");
    let o = ebgls(&[
        "landscape",
        "--instances",
        data("tsplib/eil51.tsp").to_str().unwrap(),
        "--runs",
        "4",
        "--max-iters",
        "20000",
        "--pool",
        pool.to_str().unwrap(),
        "--scatter",
        scatter.to_str().unwrap(),
        "--trace",
        trace.to_str().unwrap(),
        "--seed",
        "3",
        "--workers",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report = stdout(&o);
    assert_eq!(field(&report, "runs"), "8");
    assert_eq!(field(&report, "optimum_hits"), "8");
    let pool_text = fs::read_to_string(&pool).unwrap();
    let pool_size: usize = field(&report, "pool_size").parse().unwrap();
    assert_eq!(pool_text.lines().count(), pool_size);
    assert!(pool_size >= 1);
    assert!(pool_text.lines().all(|l| l.starts_with("eil51,426,")));
    let corpus: usize = field(&report, "corpus_size").parse().unwrap();
    let rows: Vec<String> = fs::read_to_string(&scatter)
        .unwrap()
        .lines()
        .map(String::from)
        .collect();
    assert_eq!(rows[0], "instance,distance,excess_percent");
    assert_eq!(rows.len() - 1, corpus);
    assert!(fs::read_to_string(&trace).unwrap().lines().count() >= corpus);

    // Feeding the pool back in as known optima must not grow it.
    let pool2 = dir.path().join("pool2.txt");
    let o = ebgls(&[
        "landscape",
        "--instances",
        data("tsplib/eil51.tsp").to_str().unwrap(),
        "--runs",
        "1",
        "--algos",
        "gls",
        "--max-iters",
        "20000",
        "--pool",
        pool2.to_str().unwrap(),
        "--scatter",
        scatter.to_str().unwrap(),
        "--known-optima",
        pool.to_str().unwrap(),
        "--known-optima",
        pool.to_str().unwrap(),
        "--seed",
        "3",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let again: usize = field(&stdout(&o), "pool_size").parse().unwrap();
    assert!(again >= pool_size && again <= pool_size + 1);
    assert_eq!(fs::read_to_string(&pool2).unwrap().lines().count(), again);
}
