mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use partref::wtree::{
    audit_tree, choose_heavy, corollary_check, general_edge_sum, hopcroft_bound_check, light_child_sum, lpath_length_bound_check,
    lpath_weighted_leaf_sum, tighten, validate_weight, BoundMethod, HeavyChoice,
};

fn tree_case(seed: u64, nodes: usize, max_weight: u64) -> (partref::wtree::WeightedTree, partref::Weights) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    common::random_weighted_tree(&mut rng, nodes, max_weight)
}

proptest! {
    #[test]
    fn light_sums_and_tightening(seed in any::<u64>(), nodes in 1usize..120, max_weight in 1u64..2_000) {
        let (tree, w) = tree_case(seed, nodes, max_weight);
        let h = choose_heavy(&tree, &w).unwrap();
        prop_assert!(h.is_hcc_for(&tree, &w));
        prop_assert!(light_child_sum(&tree, &w, &h) >= lpath_weighted_leaf_sum(&tree, &w, &h));

        let t = tighten(&tree, &w, &h).unwrap();
        prop_assert!(validate_weight(&tree, &t).unwrap().tight);
        prop_assert_eq!(light_child_sum(&tree, &t, &h), lpath_weighted_leaf_sum(&tree, &t, &h));
        // Light children keep their weight.
        for v in 0..nodes {
            for u in h.light_children(&tree, v) {
                prop_assert_eq!(t.get(u), w.get(u));
            }
        }
        // Tightening a tight assignment changes nothing.
        prop_assert_eq!(tighten(&tree, &t, &h).unwrap(), t);
    }

    #[test]
    fn heavy_edge_sums_match(seed in any::<u64>(), nodes in 1usize..80) {
        let (tree, w) = tree_case(seed, nodes, 500);
        let h = choose_heavy(&tree, &w).unwrap();
        let heavy: Vec<(usize, usize)> = h.heavy_edges().collect();
        let sums = general_edge_sum(&tree, &w, &heavy).unwrap();
        prop_assert_eq!(sums.lhs, light_child_sum(&tree, &w, &h));
        prop_assert_eq!(sums.rhs, lpath_weighted_leaf_sum(&tree, &w, &h));
        let empty = general_edge_sum(&tree, &w, &[]).unwrap();
        prop_assert!(empty.lhs >= empty.rhs);
    }

    #[test]
    fn bound_and_corollary(seed in any::<u64>(), nodes in 1usize..150, max_weight in 1u64..1_000) {
        let (tree, w) = tree_case(seed, nodes, max_weight);
        let h = choose_heavy(&tree, &w).unwrap();
        prop_assert!(lpath_length_bound_check(&tree, &w, &h));
        let b = hopcroft_bound_check(&tree, &w, &h);
        prop_assert!(b.ok && b.float_ok);
        prop_assert_eq!(b.method, BoundMethod::BigInt);
        let cost: Vec<u128> = (0..nodes).map(|v| h.light_children(&tree, v).map(|u| u128::from(w.get(u))).sum()).collect();
        prop_assert_eq!(corollary_check(&tree, &w, &h, &cost, 1), Some(true));
        prop_assert!(audit_tree(&tree, &w).unwrap().all_ok());
    }

    #[test]
    fn large_weights_are_decided_exactly(seed in any::<u64>(), nodes in 1usize..200) {
        let (tree, w) = tree_case(seed, nodes, 1_000_000);
        let h = choose_heavy(&tree, &w).unwrap();
        let b = hopcroft_bound_check(&tree, &w, &h);
        prop_assert!(b.ok);
        prop_assert!(b.float_ok);
    }
}

#[test]
fn light_heavy_choice_breaks_length_bound() {
    // Root 10 with children 9 and 1; calling the 1 heavy makes 9 light.
    let tree = partref::wtree::WeightedTree::from_parents(&[0, 0, 0]).unwrap();
    let w = partref::Weights::new(vec![10, 9, 1]);
    let h = HeavyChoice::from_map(&tree, vec![Some(2), None, None]).unwrap();
    assert!(!h.is_hcc_for(&tree, &w));
    assert!(!lpath_length_bound_check(&tree, &w, &h));
}
