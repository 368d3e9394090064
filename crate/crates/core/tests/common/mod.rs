#![allow(dead_code)]

use partref::wtree::{WeightAssignment, WeightedTree};
use rand::Rng;

/// A random rooted tree on `nodes` nodes (node 0 is the root, every other
/// node picks an earlier parent) with a valid weight function whose root
/// weight is at most `max_weight`. About half the internal nodes are tight.
pub fn random_weighted_tree(rng: &mut impl Rng, nodes: usize, max_weight: u64) -> (WeightedTree, WeightAssignment<u64>) {
    let mut parents = vec![0usize; nodes];
    for (v, p) in parents.iter_mut().enumerate().skip(1) {
        // Bias towards recent nodes for deeper trees now and then.
        *p = if rng.gen_bool(0.5) { rng.gen_range(0..v) } else { rng.gen_range(v.saturating_sub(3)..v) };
    }
    let tree = WeightedTree::from_parents(&parents).unwrap();
    let mut w = vec![0u64; nodes];
    w[0] = rng.gen_range(1..=max_weight);
    for &v in tree.preorder() {
        let ch = tree.children(v);
        if ch.is_empty() {
            continue;
        }
        let tight = rng.gen_bool(0.5);
        let cuts = if tight { ch.len() - 1 } else { ch.len() };
        let mut points: Vec<u64> = (0..cuts).map(|_| rng.gen_range(0..=w[v])).collect();
        points.sort_unstable();
        if tight {
            points.push(w[v]);
        }
        let mut prev = 0;
        for (&u, &p) in ch.iter().zip(&points) {
            w[u] = p - prev;
            prev = p;
        }
    }
    (tree, WeightAssignment::new(w))
}
