mod common;

use std::collections::HashMap;

use gls_core::gls::{coefficient_ratio, IterationView, PenalizeEvent, Utility};
use gls_core::{
    compute_lambda, penalize, random_tour, run_gls, run_gls_with, utility, CandidateLists, EdgeKey, GlsConfig,
    PenaltyStore, SearchObserver, StopCriteria, StopReason,
};
use num_rational::Ratio;
use proptest::prelude::*;

#[test]
fn lambda_of_a_known_local_optimum() {
    let coeff = coefficient_ratio(0.3).unwrap();
    assert_eq!(coeff, Ratio::new(3, 10));
    let lambda = compute_lambda(30_000, 532, coeff).unwrap();
    assert_eq!((lambda.numer(), lambda.denom()), (2250, 133));
    assert!((lambda.to_f64() - 0.3 * 30_000.0 / 532.0).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn utility_matches_division(c in 0i64..10_000_000, p in 0u32..100_000, inside in any::<bool>()) {
        let u = utility(EdgeKey::new(0, 1), inside, c, p);
        let expected = if inside { c as f64 / (1.0 + p as f64) } else { 0.0 };
        prop_assert!((u.to_f64() - expected).abs() <= 1e-12 * expected.max(1.0));
        if inside {
            prop_assert_eq!(u.to_ratio(), Ratio::new(c as i128, 1 + p as i128));
        }
    }

    #[test]
    fn utility_order_agrees_with_ratio(
        a in 0i128..1_000_000, b in 1i128..1_000, c in 0i128..1_000_000, d in 1i128..1_000,
    ) {
        let (x, y) = (Utility::new(a, b), Utility::new(c, d));
        prop_assert_eq!(x.cmp(&y), Ratio::new(a, b).cmp(&Ratio::new(c, d)));
    }

    #[test]
    fn penalize_hits_exactly_the_argmax(n in 4usize..50, seed in any::<u64>(), rounds in 1usize..30) {
        let inst = common::random_instance(n, seed);
        let tour = random_tour(&inst, seed);
        let mut pen = PenaltyStore::new(n);
        for _ in 0..rounds {
            let before: HashMap<EdgeKey, u32> = tour.edges().map(|e| (e, pen.get_edge(e))).collect();
            let total = pen.total();
            let chosen = penalize(&mut pen, &inst, &tour, |e, c, p| utility(e, true, c, p));
            let mut expected: Vec<EdgeKey> = before
                .iter()
                .filter(|(e, &p)| {
                    let u = Ratio::new(inst.dist(e.lo(), e.hi()) as i128, 1 + p as i128);
                    before.iter().all(|(f, &q)| u >= Ratio::new(inst.dist(f.lo(), f.hi()) as i128, 1 + q as i128))
                })
                .map(|(e, _)| *e)
                .collect();
            let mut got = chosen.clone();
            expected.sort();
            got.sort();
            prop_assert_eq!(&got, &expected);
            prop_assert!(!got.is_empty());
            prop_assert_eq!(pen.total(), total + got.len() as u64);
            for (e, p) in before {
                let bump = u32::from(got.contains(&e));
                prop_assert_eq!(pen.get_edge(e), p + bump);
            }
        }
    }
}

#[derive(Default)]
struct Log {
    best: Vec<i64>,
    iterations: Vec<u64>,
    penalized: u64,
    events: u64,
    totals: Vec<u64>,
}

impl SearchObserver for Log {
    fn on_iteration(&mut self, view: &IterationView<'_>) {
        self.best.push(view.best.cost());
        self.iterations.push(view.iteration);
        self.totals.push(view.penalties.total());
        assert!(view.best.cost() <= view.current.cost());
    }

    fn on_penalize(&mut self, event: &PenalizeEvent<'_>) {
        assert!(!event.penalized.is_empty());
        assert!(!event.elite_active);
        self.penalized += event.penalized.len() as u64;
        self.events += 1;
    }
}

#[test]
fn run_invariants_hold() {
    for seed in 0..6 {
        let inst = common::random_instance(60 + 10 * seed as usize, seed);
        let cands = CandidateLists::build(&inst);
        let cfg = GlsConfig::new(StopCriteria::iterations(300), seed);
        let start = random_tour(&inst, seed);
        let start_cost = start.cost();
        let mut log = Log::default();
        let out = run_gls_with(&inst, &cands, &cfg, start, &mut log).unwrap();
        assert_eq!(out.stop, StopReason::IterationLimit);
        assert_eq!(out.state.iteration, 300);
        assert_eq!(log.iterations, (1..=300).collect::<Vec<_>>());
        assert!(log.best.windows(2).all(|w| w[1] <= w[0]), "best must not increase");
        assert_eq!(out.best.cost(), *log.best.last().unwrap());
        assert_eq!(out.best.cost(), gls_core::tour_cost(&inst, &out.best.order()));
        assert!(out.best.cost() <= start_cost);
        // Every penalization adds at least one unit and nothing else does.
        assert_eq!(log.events, 300);
        assert_eq!(out.state.penalties.total(), log.penalized);
        assert!(log.totals.windows(2).all(|w| w[1] > w[0]));
        let traj = &out.trajectory;
        assert!(traj
            .windows(2)
            .all(|w| w[1].cost < w[0].cost && w[1].iteration >= w[0].iteration));
        assert_eq!(traj.last().unwrap().cost, out.best.cost());
        let first = out.first_local_opt_cost.unwrap();
        let lambda = compute_lambda(first, inst.dimension(), Ratio::new(3, 10)).unwrap();
        assert_eq!(out.state.lambda, lambda);
    }
}

#[test]
fn runs_are_reproducible() {
    let inst = common::load("eil51");
    let cfg = GlsConfig::new(StopCriteria::iterations(500), 42);
    let a = run_gls(&inst, &cfg).unwrap();
    let b = run_gls(&inst, &cfg).unwrap();
    assert_eq!(a.best.order(), b.best.order());
    assert_eq!(a.state.penalties.nonzero(), b.state.penalties.nonzero());
    assert_eq!(a.trajectory, b.trajectory);
}

#[test]
fn target_stops_the_run() {
    let inst = common::load("eil51");
    let cfg = GlsConfig::new(StopCriteria::iterations(1_000_000).with_target(Some(426)), 3);
    let out = run_gls(&inst, &cfg).unwrap();
    assert_eq!(out.stop, StopReason::TargetReached);
    assert_eq!(out.best.cost(), 426);
}

#[test]
fn zero_iterations_return_the_start() {
    let inst = common::random_instance(20, 1);
    let cfg = GlsConfig::new(StopCriteria::iterations(0), 9);
    let out = run_gls(&inst, &cfg).unwrap();
    assert_eq!(out.best.order(), cfg.start_tour(&inst).unwrap().order());
    assert_eq!(out.state.penalties.total(), 0);
}
