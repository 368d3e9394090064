//! Rooted finite trees with natural-number weights.
//!
//! This module carries the combinatorial half of the crate: weight functions,
//! heavy child choices, tightening, and executable forms of the light-edge
//! lemmas culminating in Hopcroft's inequality
//!
//! ```text
//! Σ_v Σ_{u ∈ lch(v)} w(u)  ≤  w(r)·log2 w(r) − Σ_{l leaf, w(l) ≠ 0} w(l)·log2 w(l)
//! ```
//!
//! The refinement engine emits its split history in this shape so every run
//! can be audited against the bound.

mod audit;
mod bound;
mod lemmas;

pub use audit::{audit_tree, audit_tree_with_choice, AuditReport};
pub use bound::{BoundCheck, BoundMethod, EXACT_NODE_LIMIT, EXACT_ROOT_LIMIT};
pub use lemmas::{
    choose_heavy, corollary_check, general_edge_sum, hopcroft_bound_check, light_child_sum,
    light_path_counts, lpath_length_bound_check, lpath_weighted_leaf_sum, tighten,
    validate_weight, EdgeSums, WeightValidity,
};

use std::collections::VecDeque;

use thiserror::Error;

use crate::scalar::Weight;

pub type NodeId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WtreeError {
    #[error("tree has no nodes")]
    Empty,
    #[error("parent index {parent} of node {node} is out of range")]
    ParentOutOfRange { node: NodeId, parent: usize },
    #[error("tree has {0} roots, expected exactly one")]
    RootCount(usize),
    #[error("node {0} does not reach the root")]
    Disconnected(NodeId),
    #[error("weight assignment covers {got} nodes, tree has {expected}")]
    WeightLength { expected: usize, got: usize },
    #[error("({parent}, {child}) is not an edge of the tree")]
    NotAnEdge { parent: NodeId, child: NodeId },
    #[error("not a weight function: children of node {0} outweigh it")]
    NotAWeightFunction(NodeId),
    #[error("invalid heavy child choice at node {0}")]
    InvalidHeavyChoice(NodeId),
}

/// An immutable rooted tree. Children are kept in ascending node-id order,
/// which is also the "child position" used for tie-breaking.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedTree {
    parent: Vec<Option<NodeId>>,
    children: Vec<Vec<NodeId>>,
    root: NodeId,
    preorder: Vec<NodeId>,
}

impl WeightedTree {
    /// Builds a tree from a parent array in which the root is its own parent.
    pub fn from_parents(parents: &[usize]) -> Result<Self, WtreeError> {
        let n = parents.len();
        if n == 0 {
            return Err(WtreeError::Empty);
        }
        let mut roots = Vec::new();
        let mut parent = vec![None; n];
        let mut children = vec![Vec::new(); n];
        for (node, &p) in parents.iter().enumerate() {
            if p >= n {
                return Err(WtreeError::ParentOutOfRange { node, parent: p });
            }
            if p == node {
                roots.push(node);
            } else {
                parent[node] = Some(p);
                children[p].push(node);
            }
        }
        if roots.len() != 1 {
            return Err(WtreeError::RootCount(roots.len()));
        }
        let root = roots[0];

        let mut preorder = Vec::with_capacity(n);
        let mut seen = vec![false; n];
        let mut stack = vec![root];
        seen[root] = true;
        while let Some(v) = stack.pop() {
            preorder.push(v);
            for &u in children[v].iter().rev() {
                if !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        if let Some(node) = seen.iter().position(|s| !s) {
            return Err(WtreeError::Disconnected(node));
        }
        Ok(Self { parent, children, root, preorder })
    }

    pub fn node_count(&self) -> usize {
        self.parent.len()
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn parent(&self, v: NodeId) -> Option<NodeId> {
        self.parent[v]
    }

    pub fn children(&self, v: NodeId) -> &[NodeId] {
        &self.children[v]
    }

    pub fn is_leaf(&self, v: NodeId) -> bool {
        self.children[v].is_empty()
    }

    pub fn leaves(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.node_count()).filter(|&v| self.is_leaf(v))
    }

    /// Nodes in an order where every parent precedes its children.
    pub fn preorder(&self) -> &[NodeId] {
        &self.preorder
    }

    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.preorder
            .iter()
            .flat_map(move |&v| self.children[v].iter().map(move |&u| (v, u)))
    }

    pub fn has_edge(&self, parent: NodeId, child: NodeId) -> bool {
        child < self.node_count() && self.parent[child] == Some(parent)
    }

    /// The parent array this tree was built from.
    pub fn to_parents(&self) -> Vec<usize> {
        (0..self.node_count())
            .map(|v| self.parent[v].unwrap_or(v))
            .collect()
    }

    /// Number of edges on the root path of every node.
    pub fn depths(&self) -> Vec<usize> {
        let mut depth = vec![0; self.node_count()];
        let mut queue = VecDeque::from([self.root]);
        while let Some(v) = queue.pop_front() {
            for &u in &self.children[v] {
                depth[u] = depth[v] + 1;
                queue.push_back(u);
            }
        }
        depth
    }
}

/// Node weights `w: V(T) → ℕ`, indexed by node id.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeightAssignment<W> {
    weights: Vec<W>,
}

impl<W: Weight> WeightAssignment<W> {
    pub fn new(weights: Vec<W>) -> Self {
        Self { weights }
    }

    pub fn get(&self, v: NodeId) -> W {
        self.weights[v]
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn as_slice(&self) -> &[W] {
        &self.weights
    }

    pub(crate) fn check_covers(&self, tree: &WeightedTree) -> Result<(), WtreeError> {
        if self.weights.len() != tree.node_count() {
            return Err(WtreeError::WeightLength {
                expected: tree.node_count(),
                got: self.weights.len(),
            });
        }
        Ok(())
    }
}

impl<W> From<Vec<W>> for WeightAssignment<W> {
    fn from(weights: Vec<W>) -> Self {
        Self { weights }
    }
}

/// A map from internal nodes to one of their children.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeavyChoice {
    heavy: Vec<Option<NodeId>>,
}

impl HeavyChoice {
    /// Takes the heavy child of every internal node; leaves map to `None`.
    pub fn from_map(tree: &WeightedTree, heavy: Vec<Option<NodeId>>) -> Result<Self, WtreeError> {
        if heavy.len() != tree.node_count() {
            return Err(WtreeError::WeightLength { expected: tree.node_count(), got: heavy.len() });
        }
        for (v, h) in heavy.iter().enumerate() {
            match h {
                None if tree.is_leaf(v) => {}
                Some(u) if tree.has_edge(v, *u) => {}
                _ => return Err(WtreeError::InvalidHeavyChoice(v)),
            }
        }
        Ok(Self { heavy })
    }

    /// Builds a choice from per-node heavy marks: every internal node must
    /// have exactly one marked child. The root's mark is ignored.
    pub fn from_marks(tree: &WeightedTree, marks: &[bool]) -> Result<Self, WtreeError> {
        if marks.len() != tree.node_count() {
            return Err(WtreeError::WeightLength { expected: tree.node_count(), got: marks.len() });
        }
        let mut heavy = vec![None; tree.node_count()];
        for v in 0..tree.node_count() {
            let mut marked = tree.children(v).iter().filter(|&&u| marks[u]);
            match (marked.next(), marked.next()) {
                (Some(&u), None) => heavy[v] = Some(u),
                (None, None) if tree.is_leaf(v) => {}
                _ => return Err(WtreeError::InvalidHeavyChoice(v)),
            }
        }
        Ok(Self { heavy })
    }

    pub fn heavy(&self, v: NodeId) -> Option<NodeId> {
        self.heavy[v]
    }

    pub fn is_heavy_edge(&self, parent: NodeId, child: NodeId) -> bool {
        self.heavy[parent] == Some(child)
    }

    /// Light children of `v`.
    pub fn light_children<'a>(
        &'a self,
        tree: &'a WeightedTree,
        v: NodeId,
    ) -> impl Iterator<Item = NodeId> + 'a {
        tree.children(v).iter().copied().filter(move |&u| self.heavy[v] != Some(u))
    }

    pub fn heavy_edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.heavy.iter().enumerate().filter_map(|(v, h)| h.map(|u| (v, u)))
    }

    /// Whether this choice picks a maximum-weight child everywhere under `w`.
    pub fn is_hcc_for<W: Weight>(&self, tree: &WeightedTree, w: &WeightAssignment<W>) -> bool {
        (0..tree.node_count()).all(|v| match self.heavy[v] {
            None => tree.is_leaf(v),
            Some(h) => tree.children(v).iter().all(|&u| w.get(u) <= w.get(h)),
        })
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    //! The two weighted trees from the worked figure, with node ids
    //! `0=root, 1=n0, 2=n1, 3=n2, 4=n00, 5=n01, 6=n10, 7=n11, 8=n12, 9=n20,
    //! 10=n200, 11=n201`.
    use super::*;

    pub const PARENTS: [usize; 12] = [0, 0, 0, 0, 1, 1, 2, 2, 2, 3, 9, 9];
    pub const LEFT: [u64; 12] = [36, 14, 14, 7, 5, 7, 5, 2, 3, 7, 2, 4];
    pub const RIGHT: [u64; 12] = [36, 15, 14, 7, 5, 10, 9, 2, 3, 7, 2, 5];

    pub fn tree() -> WeightedTree {
        WeightedTree::from_parents(&PARENTS).unwrap()
    }

    pub fn left() -> WeightAssignment<u64> {
        WeightAssignment::new(LEFT.to_vec())
    }

    pub fn right() -> WeightAssignment<u64> {
        WeightAssignment::new(RIGHT.to_vec())
    }
}
