use super::value::StateId;
use super::Coalgebra;
use crate::scalar::Probability;

/// Predecessor lists in compressed form: `x ∈ preds(y)` iff `y` occurs in `c(x)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredIndex {
    offsets: Vec<usize>,
    flat: Vec<StateId>,
    max_indegree: usize,
}

impl PredIndex {
    /// Ascending, duplicate-free predecessors of `y`.
    pub fn preds(&self, y: StateId) -> &[StateId] {
        &self.flat[self.offsets[y]..self.offsets[y + 1]]
    }

    pub fn in_degree(&self, y: StateId) -> usize {
        self.offsets[y + 1] - self.offsets[y]
    }

    /// `m = Σ_y |preds(y)|`.
    pub fn total_size(&self) -> usize {
        self.flat.len()
    }

    /// `M = max_y |preds(y)|`.
    pub fn max_indegree(&self) -> usize {
        self.max_indegree
    }

    pub fn n_states(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Whether `y` is a successor of some state.
    pub fn is_target(&self, y: StateId) -> bool {
        self.in_degree(y) > 0
    }
}

pub fn build_pred_index<P: Probability>(coalg: &Coalgebra<P>) -> PredIndex {
    let n = coalg.n_states();
    let succs: Vec<Vec<StateId>> = coalg.values().iter().map(|v| v.occurring_states()).collect();
    let mut counts = vec![0usize; n + 1];
    for list in &succs {
        for &y in list {
            counts[y + 1] += 1;
        }
    }
    for i in 0..n {
        counts[i + 1] += counts[i];
    }
    let offsets = counts.clone();
    let mut cursor = counts;
    let mut flat = vec![0; offsets[n]];
    // Sources are visited in ascending order, so every list comes out sorted.
    for (x, list) in succs.iter().enumerate() {
        for &y in list {
            flat[cursor[y]] = x;
            cursor[y] += 1;
        }
    }
    let max_indegree = (0..n).map(|y| offsets[y + 1] - offsets[y]).max().unwrap_or(0);
    PredIndex { offsets, flat, max_indegree }
}

/// `C' = { y | y is a successor of some state }`, ascending.
pub fn reachable_targets<P: Probability>(coalg: &Coalgebra<P>) -> Vec<StateId> {
    let mut hit = vec![false; coalg.n_states()];
    for v in coalg.values() {
        v.for_each_state(&mut |s| hit[s] = true);
    }
    (0..coalg.n_states()).filter(|&s| hit[s]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sysmodel::{FValue, FunctorExpr};
    use crate::Prob;

    fn powerset(succ: Vec<Vec<StateId>>) -> Coalgebra<Prob> {
        let values = succ
            .into_iter()
            .map(|list| FValue::set(list.into_iter().map(FValue::State).collect()))
            .collect();
        Coalgebra::new(FunctorExpr::parse("P X").unwrap(), values).unwrap()
    }

    #[test]
    fn two_state_index() {
        let c = powerset(vec![vec![1], vec![]]);
        let idx = build_pred_index(&c);
        assert_eq!(idx.preds(1), &[0]);
        assert!(idx.preds(0).is_empty());
        assert_eq!((idx.total_size(), idx.max_indegree()), (1, 1));
        assert_eq!(reachable_targets(&c), vec![1]);
    }

    #[test]
    fn self_loops() {
        let c = powerset(vec![vec![0]]);
        assert_eq!(build_pred_index(&c).preds(0), &[0]);
        let c = powerset(vec![vec![0], vec![1], vec![2]]);
        assert_eq!(reachable_targets(&c), vec![0, 1, 2]);
    }

    #[test]
    fn complete_graph() {
        let n = 4;
        let c = powerset((0..n).map(|_| (0..n).collect()).collect());
        let idx = build_pred_index(&c);
        // Brute force over ordered pairs.
        let m: usize = (0..n).map(|x| (0..n).filter(|y| c.value(x).occurring_states().contains(y)).count()).sum();
        assert_eq!((idx.total_size(), idx.max_indegree()), (m, n));
        assert_eq!(m, 16);
    }
}
