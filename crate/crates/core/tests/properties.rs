//! Property tests over randomized genotypes and score maps.

mod common;

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use specsearch::graph::{is_acyclic, repair, ConstraintSet};
use specsearch::moea::fast_non_dominated_sort;
use specsearch::synth::roc;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn repair_always_yields_valid_constraint_consistent_subgraph(
        bits in prop::collection::vec(any::<bool>(), 30),
        seed in any::<u64>(),
        forbidden in prop::collection::vec((0usize..6, 0usize..6), 0..4),
    ) {
        let n = 6;
        let mut constraints = ConstraintSet::new(n);
        for (a, b) in forbidden {
            if a != b {
                constraints.forbid(a, b).unwrap();
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = repair(&bits, n, &constraints, &mut rng).unwrap();
        prop_assert!(is_acyclic(g.bits(), n).unwrap());
        for (idx, &b) in g.bits().iter().enumerate() {
            prop_assert!(!b || bits[idx], "repair must only clear bits");
        }
        for (a, b) in g.arcs() {
            prop_assert!(!constraints.is_forbidden(a, b));
        }
        // repairing an already valid genotype changes nothing
        let again = repair(g.bits(), n, &constraints, &mut rng).unwrap();
        prop_assert_eq!(again, g);
    }

    #[test]
    fn front_partition_matches_naive_oracle(
        objs in prop::collection::vec((0u8..12, 0u8..12), 1..60),
    ) {
        let objectives: Vec<(f64, f64)> =
            objs.iter().map(|&(a, b)| (a as f64, b as f64)).collect();
        prop_assert_eq!(
            fast_non_dominated_sort(&objectives),
            common::naive_front_partition(&objectives)
        );
    }

    #[test]
    fn auc_agrees_with_pairwise_statistic(
        raw in prop::collection::vec((0u8..8, any::<bool>()), 4..40),
    ) {
        let mut scores = BTreeMap::new();
        let mut positives = BTreeSet::new();
        for (i, &(s, pos)) in raw.iter().enumerate() {
            scores.insert((i, i + 1), s as f64 / 7.0);
            if pos {
                positives.insert((i, i + 1));
            }
        }
        prop_assume!(!positives.is_empty() && positives.len() < scores.len());
        let curve = roc(&scores, &positives).unwrap();
        let pos: Vec<f64> = scores
            .iter()
            .filter(|(k, _)| positives.contains(*k))
            .map(|(_, &v)| v)
            .collect();
        let neg: Vec<f64> = scores
            .iter()
            .filter(|(k, _)| !positives.contains(*k))
            .map(|(_, &v)| v)
            .collect();
        let u = common::mann_whitney_auc(&pos, &neg);
        prop_assert!((curve.auc - u).abs() < 1e-12);
        // the curve itself is monotone
        for w in curve.points.windows(2) {
            prop_assert!(w[1].0 >= w[0].0 && w[1].1 >= w[0].1);
        }
    }
}
