use super::*;
use crate::enumerate::{enumerate_level, generators};
use crate::graph::{build_b1, build_b2, build_gamma, build_theta_leaf};

fn w(v: &[u32], level: u32) -> Weighting {
    Weighting::new(v.to_vec(), level)
}

#[test]
fn b1_closed_form() {
    let g = build_b1();
    let f = factor_b1(&g, &w(&[1, 2], 2)).unwrap();
    assert_eq!(f.parts, vec![w(&[1, 2], 2)]);
    let f = factor_b1(&g, &w(&[2, 2], 3)).unwrap();
    assert_eq!(f.parts, vec![w(&[1, 0], 1), w(&[1, 2], 2)]);
    let f = factor_b1(&g, &w(&[0, 0], 3)).unwrap();
    assert_eq!(f.parts, vec![w(&[0, 0], 1); 3]);
}

#[test]
fn b2_binomial_target() {
    let g = build_b2();
    let f = factor_b2(&g, &w(&[2, 2, 2, 2], 4)).unwrap();
    assert_eq!(
        f.parts,
        vec![w(&[0, 0, 0, 0], 1), w(&[0, 1, 1, 0], 1), w(&[2, 1, 1, 2], 2)]
    );
}

#[test]
fn b2_skew_strips_first() {
    let g = build_b2();
    let f = factor_b2(&g, &w(&[2, 2, 0, 2], 2)).unwrap();
    assert_eq!(f.parts, vec![w(&[2, 2, 0, 2], 2)]);
    let f = factor_b2(&g, &w(&[4, 3, 1, 2], 4)).unwrap();
    assert!(f.parts.contains(&w(&[2, 2, 0, 2], 2)));
    assert!(f.parts.contains(&w(&[2, 1, 1, 0], 2)));
}

#[test]
fn b2_every_point_to_level_six() {
    let g = build_b2();
    for level in 1..=6 {
        for p in enumerate_level(&g, level).unwrap() {
            let f = factor_b2(&g, &p).unwrap();
            assert!(f.max_part_level() <= 2, "{p}");
        }
    }
}

#[test]
fn non_member_rejected() {
    let g = build_b2();
    assert!(matches!(
        factor_b2(&g, &w(&[1, 1, 0, 0], 1)),
        Err(Error::NotMember(_))
    ));
    assert!(matches!(
        factor_full(&build_b1(), &w(&[0, 2], 1)),
        Err(Error::NotMember(_))
    ));
}

#[test]
fn odd_extraction_on_genus_two() {
    let g = build_gamma(2, 1).unwrap();
    // edges: loop 0, horizontal 1, bigon 2 and 3, leaf 4
    let target = w(&[1, 0, 1, 1, 0], 1);
    assert!(crate::weighting::is_member(&g, &target).unwrap());
    let odd = extract_odd(&g, &target).unwrap();
    assert_eq!(odd.loops.len(), 2);
    assert_eq!(odd.rest.level(), 0);
    assert!(odd.rest.is_zero());

    let target = w(&[1, 0, 0, 0, 0], 3);
    let odd = extract_odd(&g, &target).unwrap();
    assert!(odd.loops.is_empty());
    assert_eq!(odd.rest, w(&[1, 0, 0, 0, 0], 2));
}

#[test]
fn even_level_gives_level_two_parts() {
    let g = build_gamma(3, 1).unwrap();
    for p in enumerate_level(&g, 4).unwrap() {
        let f = factor_even(&g, &p).unwrap();
        assert_eq!(f.parts.len(), 2);
        assert!(f.parts.iter().all(|q| q.level() == 2), "{p}");
    }
}

#[test]
fn tree_parts_are_level_one() {
    let g = build_gamma(0, 5).unwrap();
    for p in enumerate_level(&g, 3).unwrap() {
        let f = factor_tree_degree1(&g, &p).unwrap();
        assert_eq!(f.max_part_level(), 1);
        assert_eq!(f.parts.len(), 3);
    }
}

#[test]
fn shapes() {
    assert_eq!(classify(&build_b1()), Shape::B1);
    assert_eq!(classify(&build_b2()), Shape::B2);
    assert_eq!(classify(&build_gamma(0, 4).unwrap()), Shape::Tree);
    assert_eq!(classify(&build_gamma(3, 1).unwrap()), Shape::Chain);
    assert_eq!(classify(&build_gamma(2, 3).unwrap()), Shape::Glued);
    assert_eq!(classify(&build_gamma(1, 2).unwrap()), Shape::Glued);
    assert_eq!(classify(&build_gamma(3, 0).unwrap()), Shape::Capped);
    assert_eq!(classify(&build_theta_leaf()), Shape::Other);
}

#[test]
fn full_dispatch_over_small_gamma() {
    for (g, n, lmax) in [(1, 2, 4), (2, 1, 5), (2, 2, 4), (1, 3, 3), (2, 0, 4), (3, 0, 3), (3, 1, 3)] {
        let graph = build_gamma(g, n).unwrap();
        for level in 1..=lmax {
            for p in enumerate_level(&graph, level).unwrap() {
                let f = factor_full(&graph, &p)
                    .unwrap_or_else(|e| panic!("gamma({g},{n}) {p}: {e}"));
                assert!(f.max_part_level() <= 2);
            }
        }
    }
}

#[test]
fn theta_is_unsupported_but_searchable() {
    let g = build_theta_leaf();
    let target = enumerate_level(&g, 2).unwrap().pop().unwrap();
    assert!(matches!(factor_full(&g, &target), Err(Error::Unsupported(_))));
    let gens = generators(&g).unwrap().all();
    let f = factor_search(&g, &target, &gens, 2, 10_000).unwrap().unwrap();
    assert_eq!(f.method, Method::Search);
}

#[test]
fn file_round_trip() {
    let g = build_b2();
    let f = factor_b2(&g, &w(&[2, 2, 2, 2], 4)).unwrap();
    let file = FactorizationFile::new(&g, &f);
    assert!(file.validated);
    let text = serde_json::to_string(&file).unwrap();
    let back: FactorizationFile = serde_json::from_str(&text).unwrap();
    assert_eq!(back.parts.len(), 3);
    assert_eq!(back.method, Method::B2);
}
