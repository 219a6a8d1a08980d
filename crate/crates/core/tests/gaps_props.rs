mod common;

use common::system;
use gdfractal_core::gaps::{gap_lengths_truncated, gaps_bruteforce, level_approx};
use proptest::prelude::*;

const BUDGET: u128 = 20_000;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn oracle_matches_truncated_catalog(s in system(3), m in 1usize..=3) {
        let f = s.build();
        for u in 0..f.graph.vertex_count() {
            let mut brute = gaps_bruteforce(&f, u, m, BUDGET).unwrap().lengths();
            brute.sort();
            let cat = gap_lengths_truncated(&f, u, m, BUDGET).unwrap();
            prop_assert_eq!(brute, cat.slice_below(m));
        }
    }

    #[test]
    fn levels_are_nested(s in system(3), m in 0usize..3) {
        let f = s.build();
        for u in 0..f.graph.vertex_count() {
            let outer = level_approx(&f, u, m, BUDGET).unwrap();
            let inner = level_approx(&f, u, m + 1, BUDGET).unwrap();
            prop_assert!(inner.is_subset_of(&outer, &f.numeric).unwrap());
        }
    }

    #[test]
    fn cylinders_are_disjoint(s in system(3), m in 0usize..=3) {
        let f = s.build();
        let counts = f.graph.path_counts(m);
        for u in 0..f.graph.vertex_count() {
            prop_assert_eq!(level_approx(&f, u, m, BUDGET).unwrap().len() as u128, counts[u]);
        }
    }

    #[test]
    fn catalog_entries_replay(s in system(3)) {
        let f = s.build();
        let cat = gap_lengths_truncated(&f, 0, 3, BUDGET).unwrap();
        for e in &cat.entries {
            prop_assert_eq!(cat.replay(&f, e), Some(e.length.clone()));
        }
    }
}
