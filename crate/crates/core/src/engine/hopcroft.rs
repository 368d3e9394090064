use std::collections::{HashSet, VecDeque};
use std::time::Instant;

use crate::scalar::Probability;
use crate::sysmodel::{build_pred_index, signature_of, Coalgebra, PredIndex, Signature, StateId};
use crate::wtree::NodeId;

use super::{unit_weights, Partition, RefinementTree, RunStats, TreeNode, WeightKind};

#[derive(Debug, Clone)]
pub struct HopcroftRun {
    pub partition: Partition,
    pub tree: RefinementTree,
    pub stats: RunStats,
}

/// Result of partitioning one leaf by signature.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitOutcome {
    /// Sub-blocks ordered by smallest member, each ascending. One group means
    /// the partitioning is trivial.
    pub groups: Vec<Vec<StateId>>,
    pub signatures_computed: usize,
}

/// Splits `leaf` by signature under `current`, computing signatures only for
/// the dirty states and at most one clean representative. All clean states
/// are assumed to share a signature.
pub fn split_leaf<P: Probability>(leaf: &[StateId], clean: &[StateId], coalg: &Coalgebra<P>, current: &Partition) -> SplitOutcome {
    let clean_set: HashSet<StateId> = clean.iter().copied().collect();
    let mut dirty: Vec<(Signature, StateId)> = leaf
        .iter()
        .filter(|s| !clean_set.contains(s))
        .map(|&s| (signature_of(coalg.value(s), current), s))
        .collect();
    let mut computed = dirty.len();
    let mut groups: Vec<(Option<Signature>, Vec<StateId>)> = Vec::new();
    if let Some(&rep) = clean.first() {
        computed += 1;
        groups.push((Some(signature_of(coalg.value(rep), current)), clean.to_vec()));
    }
    dirty.sort();
    for (sig, s) in dirty {
        match groups.iter_mut().find(|(g, _)| g.as_ref() == Some(&sig)) {
            Some((_, members)) => members.push(s),
            None => groups.push((Some(sig), vec![s])),
        }
    }
    let mut groups: Vec<Vec<StateId>> = groups
        .into_iter()
        .map(|(_, mut g)| {
            g.sort_unstable();
            g
        })
        .collect();
    groups.sort_by_key(|g| g[0]);
    SplitOutcome { groups, signatures_computed: computed }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MarkDirtyOutcome {
    /// `(leaf, state)` for every state moved from clean to dirty, in visiting
    /// order.
    pub markings: Vec<(usize, StateId)>,
    /// Number of `(y, x)` predecessor pairs visited.
    pub touches: usize,
}

/// Marks dirty every clean predecessor of a state in a light child, i.e. a
/// child other than `k0`. `leaf_of` locates each state's leaf and `clean`
/// holds the per-state clean flag, which is cleared for marked states.
pub fn mark_dirty(
    children: &[Vec<StateId>],
    k0: usize,
    preds: &PredIndex,
    leaf_of: &[usize],
    clean: &mut [bool],
) -> MarkDirtyOutcome {
    let mut out = MarkDirtyOutcome::default();
    for (k, child) in children.iter().enumerate() {
        if k == k0 {
            continue;
        }
        for &y in child {
            for &x in preds.preds(y) {
                out.touches += 1;
                if clean[x] {
                    clean[x] = false;
                    out.markings.push((leaf_of[x], x));
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy)]
struct Leaf {
    start: usize,
    end: usize,
    /// `[start, first_dirty)` is clean, `[first_dirty, end)` dirty.
    first_dirty: usize,
    node: NodeId,
    weights: [u64; 3],
    queued: bool,
}

/// Read-only view of the refiner between two main-loop iterations.
pub struct LoopView<'a> {
    elems: &'a [StateId],
    leaves: &'a [Leaf],
    label: &'a [usize],
    iteration: u64,
}

impl LoopView<'_> {
    /// Iterations completed so far.
    pub fn iteration(&self) -> u64 {
        self.iteration
    }

    pub fn n_leaves(&self) -> usize {
        self.leaves.len()
    }

    pub fn leaf_states(&self, leaf: usize) -> &[StateId] {
        let l = &self.leaves[leaf];
        &self.elems[l.start..l.end]
    }

    pub fn clean_states(&self, leaf: usize) -> &[StateId] {
        let l = &self.leaves[leaf];
        &self.elems[l.start..l.first_dirty]
    }

    /// Leaf id of every state; usable directly as a block labelling.
    pub fn leaf_labels(&self) -> &[usize] {
        self.label
    }

    pub fn leaf_partition(&self) -> Partition {
        Partition::from_labels(self.label)
    }
}

struct Refiner<'a, P> {
    coalg: &'a Coalgebra<P>,
    preds: &'a PredIndex,
    unit: [Vec<u64>; 3],
    kind: WeightKind,
    elems: Vec<StateId>,
    pos: Vec<usize>,
    label: Vec<usize>,
    leaves: Vec<Leaf>,
    nodes: Vec<TreeNode>,
    queue: VecDeque<usize>,
    stats: RunStats,
}

impl<'a, P: Probability> Refiner<'a, P> {
    fn new(coalg: &'a Coalgebra<P>, preds: &'a PredIndex, kind: WeightKind) -> Self {
        let n = coalg.n_states();
        let unit = unit_weights(preds);
        let weights = [0, 1, 2].map(|k| unit[k].iter().sum());
        let root = TreeNode { parent: None, children: Vec::new(), weights, heavy: false, start: 0, end: n };
        let leaf = Leaf { start: 0, end: n, first_dirty: 0, node: 0, weights, queued: true };
        Self {
            coalg,
            preds,
            unit,
            kind,
            elems: (0..n).collect(),
            pos: (0..n).collect(),
            label: vec![0; n],
            leaves: vec![leaf],
            nodes: vec![root],
            queue: VecDeque::from([0]),
            stats: RunStats::default(),
        }
    }

    fn view(&self) -> LoopView<'_> {
        LoopView { elems: &self.elems, leaves: &self.leaves, label: &self.label, iteration: self.stats.iterations }
    }

    fn signature(&mut self, s: StateId) -> Signature {
        self.stats.signatures_computed += 1;
        signature_of(self.coalg.value(s), self.label.as_slice())
    }

    fn step(&mut self, l: usize) {
        let Leaf { start, end, first_dirty, .. } = self.leaves[l];
        if first_dirty == end {
            self.stats.trivial_iterations += 1;
            return;
        }
        let rep = (first_dirty > start).then(|| self.signature(self.elems[start]));
        let mut dirty: Vec<(Signature, StateId)> = Vec::with_capacity(end - first_dirty);
        for i in first_dirty..end {
            let s = self.elems[i];
            dirty.push((self.signature(s), s));
        }
        dirty.sort_unstable();

        // Runs of equal signatures, as (range in `dirty`, smallest member).
        let mut runs: Vec<(usize, usize, StateId)> = Vec::new();
        let mut i = 0;
        while i < dirty.len() {
            let mut j = i + 1;
            while j < dirty.len() && dirty[j].0 == dirty[i].0 {
                j += 1;
            }
            let min = dirty[i..j].iter().map(|d| d.1).min().expect("nonempty run");
            runs.push((i, j, min));
            i = j;
        }
        let matched = rep.as_ref().and_then(|r| runs.iter().position(|&(a, _, _)| dirty[a].0 == *r));
        let n_groups = runs.len() + usize::from(rep.is_some() && matched.is_none());
        if n_groups == 1 {
            self.leaves[l].first_dirty = end;
            self.stats.trivial_iterations += 1;
            return;
        }

        let mut rest: Vec<(usize, usize, StateId)> =
            runs.iter().enumerate().filter(|&(k, _)| Some(k) != matched).map(|(_, &r)| r).collect();
        rest.sort_unstable_by_key(|r| r.2);

        // Lay out the dirty region: the clean group's dirty members first,
        // then every other group contiguously.
        let mut ranges: Vec<(usize, usize)> = Vec::with_capacity(n_groups);
        let mut cursor = first_dirty;
        let mut place = |range: (usize, usize), elems: &mut [StateId], pos: &mut [usize]| {
            for d in &dirty[range.0..range.1] {
                elems[cursor] = d.1;
                pos[d.1] = cursor;
                cursor += 1;
            }
        };
        if rep.is_some() {
            if let Some(k) = matched {
                place((runs[k].0, runs[k].1), &mut self.elems, &mut self.pos);
            }
            ranges.push((start, first_dirty + matched.map_or(0, |k| runs[k].1 - runs[k].0)));
        }
        for r in &rest {
            let from = ranges.last().map_or(first_dirty, |x| x.1);
            place((r.0, r.1), &mut self.elems, &mut self.pos);
            ranges.push((from, from + r.1 - r.0));
        }

        let mut weights: Vec<[u64; 3]> = vec![[0; 3]; ranges.len()];
        let skip = usize::from(rep.is_some());
        for (w, &(a, b)) in weights.iter_mut().zip(&ranges).skip(skip) {
            for &s in &self.elems[a..b] {
                for k in 0..3 {
                    w[k] += self.unit[k][s];
                }
            }
        }
        if rep.is_some() {
            let parent = self.leaves[l].weights;
            let others: [u64; 3] = [0, 1, 2].map(|k| weights[1..].iter().map(|w| w[k]).sum());
            weights[0] = [0, 1, 2].map(|k| parent[k] - others[k]);
        }
        let kw = self.kind.index();
        let mut k0 = 0;
        for (k, w) in weights.iter().enumerate() {
            if w[kw] > weights[k0][kw] {
                k0 = k;
            }
        }

        let parent_node = self.leaves[l].node;
        let mut light_states: Vec<StateId> = Vec::new();
        for (k, (&(a, b), &w)) in ranges.iter().zip(&weights).enumerate() {
            let node = self.nodes.len();
            self.nodes.push(TreeNode { parent: Some(parent_node), children: Vec::new(), weights: w, heavy: k == k0, start: a, end: b });
            self.nodes[parent_node].children.push(node);
            let leaf = Leaf { start: a, end: b, first_dirty: b, node, weights: w, queued: false };
            if k == k0 {
                self.leaves[l] = leaf;
            } else {
                let id = self.leaves.len();
                self.leaves.push(leaf);
                for &s in &self.elems[a..b] {
                    self.label[s] = id;
                    light_states.push(s);
                }
            }
        }
        self.stats.splits += 1;

        for y in light_states {
            for &x in self.preds.preds(y) {
                self.stats.markdirty_touches += 1;
                let t = self.label[x];
                let leaf = &mut self.leaves[t];
                let p = self.pos[x];
                if p < leaf.first_dirty {
                    let j = leaf.first_dirty - 1;
                    let other = self.elems[j];
                    self.elems.swap(p, j);
                    self.pos[other] = p;
                    self.pos[x] = j;
                    leaf.first_dirty = j;
                    self.stats.dirty_markings += 1;
                    if !leaf.queued {
                        leaf.queued = true;
                        self.queue.push_back(t);
                    }
                }
            }
        }
    }

    fn run(mut self, observer: &mut dyn FnMut(&LoopView<'_>)) -> HopcroftRun {
        let start = Instant::now();
        observer(&self.view());
        while let Some(l) = self.queue.pop_front() {
            self.leaves[l].queued = false;
            self.stats.iterations += 1;
            self.step(l);
            observer(&self.view());
        }
        self.stats.wall_time = start.elapsed();
        HopcroftRun {
            partition: Partition::from_labels(&self.label),
            tree: RefinementTree { nodes: self.nodes, order: self.elems, kind: self.kind },
            stats: self.stats,
        }
    }
}

/// Hopcroft-style refinement with clean/dirty bookkeeping; `kind` selects
/// the weight that picks each split's heavy child.
pub fn refine_hopcroft<P: Probability>(coalg: &Coalgebra<P>, kind: WeightKind) -> HopcroftRun {
    let preds = build_pred_index(coalg);
    Refiner::new(coalg, &preds, kind).run(&mut |_| {})
}

/// As [`refine_hopcroft`], with a precomputed predecessor index and a
/// callback invoked before the first iteration and after every iteration.
pub fn refine_hopcroft_observed<P: Probability>(
    coalg: &Coalgebra<P>,
    preds: &PredIndex,
    kind: WeightKind,
    observer: &mut dyn FnMut(&LoopView<'_>),
) -> HopcroftRun {
    Refiner::new(coalg, preds, kind).run(observer)
}
