use std::collections::HashSet;

use serde::Serialize;

use super::bound::{log_sum_le, xlog2x, BoundCheck, EXACT_NODE_LIMIT, EXACT_ROOT_LIMIT, FLOAT_REL_TOL};
use super::{HeavyChoice, NodeId, WeightAssignment, WeightedTree, WtreeError};
use crate::scalar::Weight;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct WeightValidity {
    pub valid: bool,
    pub tight: bool,
}

/// Checks `Σ_{u ∈ ch(v)} w(u) ≤ w(v)` everywhere, and equality at internal nodes.
pub fn validate_weight<W: Weight>(
    tree: &WeightedTree,
    w: &WeightAssignment<W>,
) -> Result<WeightValidity, WtreeError> {
    w.check_covers(tree)?;
    let mut valid = true;
    let mut tight = true;
    for v in 0..tree.node_count() {
        if tree.is_leaf(v) {
            continue;
        }
        let below: u128 = tree.children(v).iter().map(|&u| w.get(u).widen()).sum();
        let own = w.get(v).widen();
        valid &= below <= own;
        tight &= below == own;
    }
    Ok(WeightValidity { valid, tight: valid && tight })
}

/// The heavy child choice that takes the first maximum-weight child.
pub fn choose_heavy<W: Weight>(
    tree: &WeightedTree,
    w: &WeightAssignment<W>,
) -> Result<HeavyChoice, WtreeError> {
    w.check_covers(tree)?;
    let heavy = (0..tree.node_count())
        .map(|v| {
            let mut best: Option<NodeId> = None;
            for &u in tree.children(v) {
                if best.is_none_or(|b| w.get(u) > w.get(b)) {
                    best = Some(u);
                }
            }
            best
        })
        .collect();
    Ok(HeavyChoice { heavy })
}

/// Tightening of `w` along `h`: the root and every light child keep their
/// weight, and each heavy child absorbs whatever its parent does not hand to
/// the light siblings.
pub fn tighten<W: Weight>(
    tree: &WeightedTree,
    w: &WeightAssignment<W>,
    h: &HeavyChoice,
) -> Result<WeightAssignment<W>, WtreeError> {
    if !validate_weight(tree, w)?.valid {
        let bad = (0..tree.node_count())
            .find(|&v| tree.children(v).iter().map(|&u| w.get(u).widen()).sum::<u128>() > w.get(v).widen())
            .unwrap_or(tree.root());
        return Err(WtreeError::NotAWeightFunction(bad));
    }
    let mut out = w.as_slice().to_vec();
    for &v in tree.preorder() {
        let Some(hv) = h.heavy(v) else { continue };
        let light = h
            .light_children(tree, v)
            .try_fold(W::zero(), |acc, u| acc.checked_add(&w.get(u)))
            .ok_or(WtreeError::NotAWeightFunction(v))?;
        out[hv] = out[v].checked_sub(&light).ok_or(WtreeError::NotAWeightFunction(v))?;
    }
    Ok(WeightAssignment::new(out))
}

/// `Σ_v Σ_{u ∈ lch(v)} w(u)`.
pub fn light_child_sum<W: Weight>(tree: &WeightedTree, w: &WeightAssignment<W>, h: &HeavyChoice) -> u128 {
    (0..tree.node_count())
        .flat_map(|v| h.light_children(tree, v))
        .map(|u| w.get(u).widen())
        .sum()
}

/// `|lpath(r, v)|` for every node.
pub fn light_path_counts(tree: &WeightedTree, h: &HeavyChoice) -> Vec<usize> {
    let mut count = vec![0usize; tree.node_count()];
    for &v in tree.preorder() {
        for &u in tree.children(v) {
            count[u] = count[v] + usize::from(!h.is_heavy_edge(v, u));
        }
    }
    count
}

/// `Σ_{l leaf} |lpath(r, l)| · w(l)`.
pub fn lpath_weighted_leaf_sum<W: Weight>(tree: &WeightedTree, w: &WeightAssignment<W>, h: &HeavyChoice) -> u128 {
    let lp = light_path_counts(tree, h);
    tree.leaves().map(|l| lp[l] as u128 * w.get(l).widen()).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EdgeSums {
    /// Weights of children reached by an edge outside `S`.
    pub lhs: u128,
    /// `Σ_l |path(r, l) \ S| · w(l)`.
    pub rhs: u128,
}

/// Both sides of the edge-set lemma for an arbitrary edge set `S`.
pub fn general_edge_sum<W: Weight>(
    tree: &WeightedTree,
    w: &WeightAssignment<W>,
    s: &[(NodeId, NodeId)],
) -> Result<EdgeSums, WtreeError> {
    w.check_covers(tree)?;
    let mut excluded = HashSet::with_capacity(s.len());
    for &(parent, child) in s {
        if !tree.has_edge(parent, child) {
            return Err(WtreeError::NotAnEdge { parent, child });
        }
        excluded.insert(child);
    }
    let mut lhs = 0u128;
    let mut outside = vec![0u128; tree.node_count()];
    for &v in tree.preorder() {
        for &u in tree.children(v) {
            let counted = !excluded.contains(&u);
            if counted {
                lhs += w.get(u).widen();
            }
            outside[u] = outside[v] + u128::from(counted);
        }
    }
    let rhs = tree.leaves().map(|l| outside[l] * w.get(l).widen()).sum();
    Ok(EdgeSums { lhs, rhs })
}

/// `2^{|lpath(r, v)|} · w(v) ≤ w(r)` for every `v` with `w(v) ≠ 0`.
///
/// `h` is not required to be a heavy child choice, so this also detects
/// choices that pick a light child heavier than half its parent.
pub fn lpath_length_bound_check<W: Weight>(tree: &WeightedTree, w: &WeightAssignment<W>, h: &HeavyChoice) -> bool {
    let root = w.get(tree.root()).widen();
    let lp = light_path_counts(tree, h);
    (0..tree.node_count()).all(|v| {
        let wv = w.get(v).widen();
        if wv == 0 {
            return true;
        }
        match u32::try_from(lp[v]).ok().and_then(|k| 1u128.checked_shl(k)).filter(|_| lp[v] < 128) {
            Some(scale) => scale.checked_mul(wv).is_some_and(|x| x <= root),
            None => false,
        }
    })
}

/// Hopcroft's inequality for `(tree, w, h)`.
pub fn hopcroft_bound_check<W: Weight>(tree: &WeightedTree, w: &WeightAssignment<W>, h: &HeavyChoice) -> BoundCheck {
    let lhs = light_child_sum(tree, w, h);
    let root = w.get(tree.root()).widen();
    let leaves: Vec<(u128, u128)> = tree
        .leaves()
        .map(|l| w.get(l).widen())
        .filter(|&x| x != 0)
        .map(|x| (x, x))
        .collect();
    let root_term = xlog2x(root);
    let bound_float = root_term - leaves.iter().map(|&(x, _)| xlog2x(x)).sum::<f64>();
    let float_ok = (lhs as f64) <= bound_float + FLOAT_REL_TOL * root_term.max(1.0);
    let small = root <= EXACT_ROOT_LIMIT && tree.node_count() <= EXACT_NODE_LIMIT;
    let (ok, method) = log_sum_le(lhs, &leaves, &[(root, root)], small);
    BoundCheck { ok, lhs, bound_float, float_ok, method }
}

/// The time-estimation corollary: if `t(v) ≤ K · Σ_{u ∈ lch(v)} w(u)` at every
/// node then `Σ_v t(v) ≤ K · w(r) · log2 w(r)`.
///
/// Returns `None` when the premise fails at some node.
pub fn corollary_check<W: Weight>(
    tree: &WeightedTree,
    w: &WeightAssignment<W>,
    h: &HeavyChoice,
    cost: &[u128],
    k: u128,
) -> Option<bool> {
    if cost.len() != tree.node_count() {
        return None;
    }
    for v in 0..tree.node_count() {
        let light: u128 = h.light_children(tree, v).map(|u| w.get(u).widen()).sum();
        if cost[v] > k.checked_mul(light)? {
            return None;
        }
    }
    let total: u128 = cost.iter().sum();
    let root = w.get(tree.root()).widen();
    let small = root <= EXACT_ROOT_LIMIT && tree.node_count() <= EXACT_NODE_LIMIT;
    Some(log_sum_le(total, &[], &[(root, k * root)], small).0)
}

#[cfg(test)]
mod tests {
    use super::super::fixtures;
    use super::*;

    fn path(weights: Vec<u64>) -> (WeightedTree, WeightAssignment<u64>) {
        let parents: Vec<usize> = (0..weights.len()).map(|i| i.saturating_sub(1)).collect();
        (WeightedTree::from_parents(&parents).unwrap(), WeightAssignment::new(weights))
    }

    #[test]
    fn figure_trees_validity() {
        let t = fixtures::tree();
        assert_eq!(validate_weight(&t, &fixtures::left()).unwrap(), WeightValidity { valid: true, tight: false });
        assert_eq!(validate_weight(&t, &fixtures::right()).unwrap(), WeightValidity { valid: true, tight: true });
        let single = WeightedTree::from_parents(&[0]).unwrap();
        assert_eq!(
            validate_weight(&single, &WeightAssignment::new(vec![0u64])).unwrap(),
            WeightValidity { valid: true, tight: true }
        );
        assert!(matches!(
            validate_weight(&t, &WeightAssignment::new(vec![1u64; 3])),
            Err(WtreeError::WeightLength { expected: 12, got: 3 })
        ));
    }

    #[test]
    fn heavy_choice_matches_figure() {
        let t = fixtures::tree();
        let h = choose_heavy(&t, &fixtures::left()).unwrap();
        assert_eq!(h.heavy(0), Some(1), "first of the two weight-14 children");
        assert_eq!(h.heavy(1), Some(5));
        assert_eq!(h.heavy(2), Some(6));
        assert_eq!(h.heavy(3), Some(9));
        assert_eq!(h.heavy(9), Some(11));
        assert!(h.heavy(4).is_none());
        assert!(h.is_hcc_for(&t, &fixtures::left()));
    }

    #[test]
    fn ties_and_paths() {
        let star = WeightedTree::from_parents(&[0, 0, 0, 0]).unwrap();
        let h = choose_heavy(&star, &WeightAssignment::new(vec![9u64, 3, 3, 3])).unwrap();
        assert_eq!(h.heavy(0), Some(1));

        let (t, w) = path(vec![5, 4, 4, 1]);
        let h = choose_heavy(&t, &w).unwrap();
        assert_eq!(h.heavy_edges().count(), 3);
        assert_eq!(light_child_sum(&t, &w, &h), 0);
        assert_eq!(lpath_weighted_leaf_sum(&t, &w, &h), 0);
    }

    #[test]
    fn tightening_reproduces_right_tree() {
        let t = fixtures::tree();
        let h = choose_heavy(&t, &fixtures::left()).unwrap();
        assert_eq!(tighten(&t, &fixtures::left(), &h).unwrap(), fixtures::right());
        assert_eq!(tighten(&t, &fixtures::right(), &h).unwrap(), fixtures::right());

        let single = WeightedTree::from_parents(&[0]).unwrap();
        let w = WeightAssignment::new(vec![7u64]);
        let h = choose_heavy(&single, &w).unwrap();
        assert_eq!(tighten(&single, &w, &h).unwrap(), w);
    }

    #[test]
    fn tightening_rejects_non_weight_functions() {
        let t = WeightedTree::from_parents(&[0, 0, 0]).unwrap();
        let w = WeightAssignment::new(vec![3u64, 2, 2]);
        let h = choose_heavy(&t, &w).unwrap();
        assert_eq!(tighten(&t, &w, &h), Err(WtreeError::NotAWeightFunction(0)));
    }

    #[test]
    fn light_sums_on_figure() {
        let t = fixtures::tree();
        let h = choose_heavy(&t, &fixtures::left()).unwrap();
        assert_eq!(light_child_sum(&t, &fixtures::right(), &h), 33);
        assert_eq!(lpath_weighted_leaf_sum(&t, &fixtures::right(), &h), 33);
        assert_eq!(light_child_sum(&t, &fixtures::left(), &h), 33);
        assert_eq!(lpath_weighted_leaf_sum(&t, &fixtures::left(), &h), 28);
    }

    /// Brute force: walk every root-to-leaf path explicitly.
    fn edge_sums_by_paths(t: &WeightedTree, w: &[u64], s: &[(usize, usize)]) -> (u128, u128) {
        let lhs = t.edges().filter(|e| !s.contains(e)).map(|(_, u)| w[u] as u128).sum();
        let rhs = t
            .leaves()
            .map(|l| {
                let mut count = 0u128;
                let mut u = l;
                while let Some(p) = t.parent(u) {
                    count += u128::from(!s.contains(&(p, u)));
                    u = p;
                }
                count * w[l] as u128
            })
            .sum();
        (lhs, rhs)
    }

    #[test]
    fn general_edge_sum_cases() {
        let t = fixtures::tree();
        let right = fixtures::right();
        let all: Vec<_> = t.edges().collect();
        assert_eq!(general_edge_sum(&t, &right, &all).unwrap(), EdgeSums { lhs: 0, rhs: 0 });

        let h = choose_heavy(&t, &right).unwrap();
        let heavy: Vec<_> = h.heavy_edges().collect();
        assert_eq!(general_edge_sum(&t, &right, &heavy).unwrap(), EdgeSums { lhs: 33, rhs: 33 });

        let (lhs, rhs) = edge_sums_by_paths(&t, &fixtures::RIGHT, &[]);
        assert_eq!((lhs, rhs), (79, 79));
        assert_eq!(general_edge_sum(&t, &right, &[]).unwrap(), EdgeSums { lhs: 79, rhs: 79 });

        let (lhs, rhs) = edge_sums_by_paths(&t, &fixtures::LEFT, &heavy);
        assert_eq!(general_edge_sum(&t, &fixtures::left(), &heavy).unwrap(), EdgeSums { lhs, rhs });

        assert_eq!(general_edge_sum(&t, &right, &[(4, 0)]), Err(WtreeError::NotAnEdge { parent: 4, child: 0 }));
    }

    #[test]
    fn light_path_length_bound() {
        let t = fixtures::tree();
        let right = fixtures::right();
        let h = choose_heavy(&t, &right).unwrap();
        let lp = light_path_counts(&t, &h);
        // n11 has weight 2 and two light edges above it: 2^2 · 2 = 8 ≤ 36.
        assert_eq!((lp[7], right.get(7)), (2, 2));
        assert!(lpath_length_bound_check(&t, &right, &h));

        // Picking the lighter child as heavy makes the 6 light: 2·6 > 10.
        let t3 = WeightedTree::from_parents(&[0, 0, 0]).unwrap();
        let w3 = WeightAssignment::new(vec![10u64, 6, 4]);
        let bad = HeavyChoice::from_map(&t3, vec![Some(2), None, None]).unwrap();
        assert!(!lpath_length_bound_check(&t3, &w3, &bad));
        assert!(lpath_length_bound_check(&t3, &w3, &choose_heavy(&t3, &w3).unwrap()));
    }

    #[test]
    fn hopcroft_bound_on_figure() {
        let t = fixtures::tree();
        let right = fixtures::right();
        let h = choose_heavy(&t, &right).unwrap();
        let check = hopcroft_bound_check(&t, &right, &h);
        assert!(check.ok && check.float_ok);
        assert_eq!(check.lhs, 33);
        // 36·log2 36 − (2·5·log2 5 + 10·log2 10 + 9·log2 9 + 2·2·log2 2 + 3·log2 3)
        let expected = 36.0 * 36f64.log2()
            - (10.0 * 5f64.log2() + 10.0 * 10f64.log2() + 9.0 * 9f64.log2() + 4.0 + 3.0 * 3f64.log2());
        assert!((check.bound_float - expected).abs() < 1e-9);
        assert!((check.bound_float - 92.39).abs() < 0.01);

        let single = WeightedTree::from_parents(&[0]).unwrap();
        let w = WeightAssignment::new(vec![12u64]);
        let check = hopcroft_bound_check(&single, &w, &choose_heavy(&single, &w).unwrap());
        assert!(check.ok);
        assert_eq!((check.lhs, check.bound_float), (0, 0.0));
    }

    #[test]
    fn zero_weight_leaves_are_skipped() {
        let t = WeightedTree::from_parents(&[0, 0, 0]).unwrap();
        let w = WeightAssignment::new(vec![4u64, 4, 0]);
        let h = choose_heavy(&t, &w).unwrap();
        let check = hopcroft_bound_check(&t, &w, &h);
        assert!(check.ok);
        assert_eq!(check.lhs, 0);
        assert_eq!(check.bound_float, 0.0);
    }

    #[test]
    fn corollary_with_light_sums_as_cost() {
        let t = fixtures::tree();
        let right = fixtures::right();
        let h = choose_heavy(&t, &right).unwrap();
        let cost: Vec<u128> = (0..t.node_count())
            .map(|v| h.light_children(&t, v).map(|u| right.get(u) as u128).sum())
            .collect();
        assert_eq!(corollary_check(&t, &right, &h, &cost, 1), Some(true));
        let mut over = cost.clone();
        over[0] += 1;
        assert_eq!(corollary_check(&t, &right, &h, &over, 1), None);
    }

    #[test]
    fn generic_over_weight_width() {
        let t = fixtures::tree();
        let w32 = WeightAssignment::new(fixtures::LEFT.iter().map(|&x| x as u32).collect());
        let h = choose_heavy(&t, &w32).unwrap();
        let tight = tighten(&t, &w32, &h).unwrap();
        assert_eq!(tight.as_slice().iter().map(|&x| x as u64).collect::<Vec<_>>(), fixtures::RIGHT.to_vec());
    }
}
