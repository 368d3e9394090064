use crate::sysmodel::StateId;
use crate::wtree::{audit_tree_with_choice, AuditReport, HeavyChoice, NodeId, WeightAssignment, WeightedTree, WtreeError};

use super::WeightKind;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeNode {
    pub parent: Option<NodeId>,
    pub children: Vec<NodeId>,
    /// Weight under each [`WeightKind`], in `WeightKind::ALL` order.
    pub weights: [u64; 3],
    pub heavy: bool,
    pub(crate) start: usize,
    pub(crate) end: usize,
}

/// The history of splits of one Hopcroft run. Node 0 is the root (all
/// states); the leaves are the final blocks.
///
/// Every node's state set is stored as a range of one shared permutation of
/// the states, which stays valid because later splits only permute inside a
/// leaf's range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefinementTree {
    pub(crate) nodes: Vec<TreeNode>,
    pub(crate) order: Vec<StateId>,
    pub(crate) kind: WeightKind,
}

impl RefinementTree {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// The weight that chose heavy children in this run.
    pub fn kind(&self) -> WeightKind {
        self.kind
    }

    pub fn node(&self, v: NodeId) -> &TreeNode {
        &self.nodes[v]
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    /// The states of `v`, unordered.
    pub fn members(&self, v: NodeId) -> &[StateId] {
        let n = &self.nodes[v];
        &self.order[n.start..n.end]
    }

    /// The states of `v`, ascending.
    pub fn states(&self, v: NodeId) -> Vec<StateId> {
        let mut s = self.members(v).to_vec();
        s.sort_unstable();
        s
    }

    pub fn leaves(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.nodes.len()).filter(|&v| self.nodes[v].children.is_empty())
    }

    pub fn weight(&self, v: NodeId, kind: WeightKind) -> u64 {
        self.nodes[v].weights[kind.index()]
    }

    pub fn parents(&self) -> Vec<usize> {
        self.nodes.iter().enumerate().map(|(v, n)| n.parent.unwrap_or(v)).collect()
    }

    pub fn to_weighted_tree(&self) -> WeightedTree {
        WeightedTree::from_parents(&self.parents()).expect("refinement trees are rooted trees")
    }

    pub fn weights(&self, kind: WeightKind) -> WeightAssignment<u64> {
        WeightAssignment::new(self.nodes.iter().map(|n| n.weights[kind.index()]).collect())
    }

    pub fn heavy_marks(&self) -> Vec<bool> {
        self.nodes.iter().map(|n| n.heavy).collect()
    }

    pub fn heavy_choice(&self) -> HeavyChoice {
        let heavy = self.nodes.iter().map(|n| n.children.iter().copied().find(|&c| self.nodes[c].heavy)).collect();
        HeavyChoice::from_map(&self.to_weighted_tree(), heavy).expect("every split marks one heavy child")
    }

    /// Runs the weighted-tree audit with the recorded heavy marks and the
    /// weights of `kind`.
    pub fn audit(&self, kind: WeightKind) -> Result<AuditReport, WtreeError> {
        audit_tree_with_choice(&self.to_weighted_tree(), &self.weights(kind), &self.heavy_choice())
    }

    /// Structural checks: children partition their parent, every weight is
    /// additive, and the heavy mark sits on a maximum of the run's weight.
    pub fn check_structure(&self) -> Result<(), String> {
        let n_states = self.order.len();
        let root = &self.nodes[0];
        if root.start != 0 || root.end != n_states {
            return Err("root does not hold every state".into());
        }
        for (v, node) in self.nodes.iter().enumerate() {
            if node.start >= node.end {
                return Err(format!("node {v} is empty"));
            }
            if node.children.is_empty() {
                continue;
            }
            if node.children.len() < 2 {
                return Err(format!("node {v} has a single child"));
            }
            let mut covered = vec![false; node.end - node.start];
            for &c in &node.children {
                let ch = &self.nodes[c];
                if ch.parent != Some(v) || ch.start < node.start || ch.end > node.end {
                    return Err(format!("child {c} is not inside node {v}"));
                }
                for slot in &mut covered[ch.start - node.start..ch.end - node.start] {
                    if *slot {
                        return Err(format!("children of node {v} overlap"));
                    }
                    *slot = true;
                }
            }
            if covered.contains(&false) {
                return Err(format!("children of node {v} do not cover it"));
            }
            for k in 0..3 {
                let sum: u64 = node.children.iter().map(|&c| self.nodes[c].weights[k]).sum();
                if sum != node.weights[k] {
                    return Err(format!("weight {} is not tight at node {v}", WeightKind::ALL[k]));
                }
            }
            let heavy: Vec<NodeId> = node.children.iter().copied().filter(|&c| self.nodes[c].heavy).collect();
            let max = node.children.iter().map(|&c| self.weight(c, self.kind)).max().unwrap_or(0);
            match heavy.as_slice() {
                [h] if self.weight(*h, self.kind) == max => {}
                _ => return Err(format!("node {v} has no valid heavy child")),
            }
        }
        Ok(())
    }
}
