//! Randomised checks at levels beyond the exhaustive ranges.

use proptest::prelude::*;

use cblocks::enumerate::generators;
use cblocks::factorize::{classify, factor_full, Shape};
use cblocks::graph::{build_gamma, MarkedGraph};
use cblocks::weighting::{is_member, vertex_ok, Weighting};

fn graphs() -> Vec<MarkedGraph> {
    [(1, 1), (2, 1), (3, 1), (1, 2), (2, 2), (2, 3), (2, 0), (3, 0), (0, 5)]
        .into_iter()
        .map(|(g, n)| build_gamma(g, n).unwrap())
        .collect()
}

/// A member built as a sum of generators picked by index.
fn product(graph: &MarkedGraph, picks: &[usize]) -> Weighting {
    let gens = generators(graph).unwrap().all();
    let chosen: Vec<&Weighting> = picks.iter().map(|&i| &gens[i % gens.len()]).collect();
    Weighting::sum(chosen).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn constructive_factorization_at_high_level(
        which in 0usize..9,
        picks in prop::collection::vec(any::<usize>(), 1..12),
    ) {
        let g = &graphs()[which];
        let w = product(g, &picks);
        prop_assert!(is_member(g, &w).unwrap());
        let f = factor_full(g, &w).unwrap();
        prop_assert!(f.validate(g).is_ok());
        let cap = if classify(g) == Shape::Tree { 1 } else { 2 };
        prop_assert!(f.max_part_level() <= cap);
    }

    #[test]
    fn vertex_condition_is_symmetric(a in 0u32..20, b in 0u32..20, c in 0u32..20, l in 0u32..15) {
        let v = vertex_ok(a, b, c, l);
        prop_assert_eq!(v, vertex_ok(b, c, a, l));
        prop_assert_eq!(v, vertex_ok(c, b, a, l));
    }

    #[test]
    fn raising_the_level_keeps_membership(
        which in 0usize..9,
        picks in prop::collection::vec(any::<usize>(), 1..8),
        extra in 0u32..4,
    ) {
        let g = &graphs()[which];
        let w = product(g, &picks);
        let up = Weighting::new(w.weights().to_vec(), w.level() + extra);
        prop_assert!(is_member(g, &up).unwrap());
    }
}
