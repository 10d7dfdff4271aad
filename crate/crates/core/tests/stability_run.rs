//! Full-run properties of the outer loop: stability endpoints and
//! scheduling-independent determinism.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use specsearch::graph::ConstraintSet;
use specsearch::moea::SearchParams;
use specsearch::sem::Dataset;
use specsearch::stability::{run_search, RunParams, SearchOutcome};
use specsearch::synth::{generate_data, TruthSpec};

fn small_params() -> RunParams {
    RunParams {
        subsets: 12,
        search: SearchParams {
            generations: 4,
            population: 24,
            ..SearchParams::default()
        },
    }
}

fn collider_data(seed: u64) -> Dataset {
    let spec = TruthSpec {
        names: vec!["a".into(), "b".into(), "c".into()],
        arcs: vec![("a".into(), "c".into()), ("b".into(), "c".into())],
        coefficients: Some(vec![1.1, -1.2]),
        noise_variances: Some(vec![1.0; 3]),
        constraints: vec![],
    };
    let truth = spec
        .instantiate(&mut ChaCha8Rng::seed_from_u64(seed))
        .unwrap();
    generate_data(&truth, 240, &mut ChaCha8Rng::seed_from_u64(seed + 1)).unwrap()
}

fn outcome_fingerprint(o: &SearchOutcome) -> Vec<u64> {
    let mut out = Vec::new();
    for graph in [&o.edge, &o.path] {
        for c in 0..=graph.c_max() {
            if let Some(level) = graph.level(c) {
                out.push(level.n_models as u64);
                for &(a, b) in &graph.pairs() {
                    out.push(graph.prob(c, a, b).unwrap().to_bits());
                }
            }
        }
    }
    for c in 0..=o.bic.c_max() {
        if let Some(m) = o.bic.mean(c) {
            out.push(m.to_bits());
            out.push(o.bic.count(c) as u64);
        }
    }
    out
}

#[test]
fn edge_stability_endpoints_are_exact() {
    let data = collider_data(40);
    let outcome = run_search(&data, &ConstraintSet::new(3), &small_params(), 1).unwrap();
    let edge = &outcome.edge;
    let c_max = edge.c_max();
    for &(a, b) in &edge.pairs() {
        assert_eq!(edge.prob(0, a, b), Some(0.0));
        assert_eq!(edge.prob(c_max, a, b), Some(1.0));
    }
    assert_eq!(
        edge.level(0).unwrap().n_models as usize,
        outcome.subsets_total - outcome.subsets_failed
    );
}

#[test]
fn path_stability_vanishes_at_max_complexity_without_constraints() {
    let data = collider_data(41);
    let outcome = run_search(&data, &ConstraintSet::new(3), &small_params(), 2).unwrap();
    let path = &outcome.path;
    let c_max = path.c_max();
    for &(a, b) in &path.pairs() {
        assert_eq!(path.prob(c_max, a, b), Some(0.0));
        assert_eq!(path.prob(0, a, b), Some(0.0));
    }
}

#[test]
fn constraint_forces_path_probability_one_at_max_complexity() {
    let data = collider_data(42);
    let mut constraints = ConstraintSet::new(3);
    constraints.forbid(0, 1).unwrap();
    let outcome = run_search(&data, &constraints, &small_params(), 3).unwrap();
    let c_max = outcome.path.c_max();
    // at max complexity the pair is still joined, but only as b -> a
    assert_eq!(outcome.path.prob(c_max, 1, 0), Some(1.0));
    assert_eq!(outcome.path.prob(c_max, 0, 1), Some(0.0));
    assert_eq!(outcome.edge.prob(c_max, 0, 1), Some(1.0));
}

#[test]
fn run_is_identical_across_worker_counts() {
    let data = collider_data(43);
    let constraints = ConstraintSet::new(3);
    let params = small_params();
    let run_with = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        pool.install(|| run_search(&data, &constraints, &params, 4).unwrap())
    };
    let one = run_with(1);
    let eight = run_with(8);
    assert_eq!(outcome_fingerprint(&one), outcome_fingerprint(&eight));
}
