use crate::sysmodel::{BlockLabeling, StateId};

use super::EngineError;

/// A partition of `0..n` in canonical form: states ascending inside each
/// block, blocks ordered by smallest member, block ids equal to positions.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    block_of: Vec<usize>,
    blocks: Vec<Vec<StateId>>,
}

impl Partition {
    /// The one-block partition.
    pub fn trivial(n: usize) -> Self {
        Self::from_labels(&vec![0; n])
    }

    /// All singletons.
    pub fn discrete(n: usize) -> Self {
        Self { block_of: (0..n).collect(), blocks: (0..n).map(|s| vec![s]).collect() }
    }

    /// Groups states by equal label.
    pub fn from_labels<L: Eq + std::hash::Hash + Clone>(labels: &[L]) -> Self {
        let mut ids = std::collections::HashMap::new();
        let mut block_of = Vec::with_capacity(labels.len());
        let mut blocks: Vec<Vec<StateId>> = Vec::new();
        for (s, l) in labels.iter().enumerate() {
            let b = *ids.entry(l.clone()).or_insert_with(|| {
                blocks.push(Vec::new());
                blocks.len() - 1
            });
            blocks[b].push(s);
            block_of.push(b);
        }
        Self { block_of, blocks }
    }

    /// Validates that `blocks` are nonempty, disjoint and cover `0..n`.
    pub fn from_blocks(n: usize, blocks: Vec<Vec<StateId>>) -> Result<Self, EngineError> {
        let mut label = vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(EngineError::InvalidPartition(format!("block {b} is empty")));
            }
            for &s in block {
                if s >= n {
                    return Err(EngineError::InvalidPartition(format!("state {s} is out of range for {n} states")));
                }
                if label[s] != usize::MAX {
                    return Err(EngineError::InvalidPartition(format!("state {s} occurs twice")));
                }
                label[s] = b;
            }
        }
        if let Some(s) = label.iter().position(|&b| b == usize::MAX) {
            return Err(EngineError::InvalidPartition(format!("state {s} is not covered")));
        }
        Ok(Self::from_labels(&label))
    }

    pub fn n_states(&self) -> usize {
        self.block_of.len()
    }

    pub fn n_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_of(&self, s: StateId) -> usize {
        self.block_of[s]
    }

    /// Block id of every state.
    pub fn labels(&self) -> &[usize] {
        &self.block_of
    }

    pub fn blocks(&self) -> &[Vec<StateId>] {
        &self.blocks
    }

    pub fn same_block(&self, x: StateId, y: StateId) -> bool {
        self.block_of[x] == self.block_of[y]
    }

    /// Whether every block of `self` lies inside a block of `coarser`.
    pub fn refines(&self, coarser: &Partition) -> bool {
        self.n_states() == coarser.n_states()
            && self.blocks.iter().all(|b| b.iter().all(|&s| coarser.same_block(s, b[0])))
    }
}

impl BlockLabeling for Partition {
    fn block_label(&self, state: StateId) -> u64 {
        self.block_of[state] as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_order() {
        let p = Partition::from_labels(&[7, 3, 7, 1, 3]);
        assert_eq!(p.blocks(), &[vec![0, 2], vec![1, 4], vec![3]]);
        assert_eq!(p.labels(), &[0, 1, 0, 2, 1]);
        let q = Partition::from_blocks(5, vec![vec![3], vec![4, 1], vec![2, 0]]).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn invalid_blocks() {
        assert!(Partition::from_blocks(3, vec![vec![0, 1]]).is_err());
        assert!(Partition::from_blocks(2, vec![vec![0, 1], vec![1]]).is_err());
        assert!(Partition::from_blocks(2, vec![vec![0, 1], vec![]]).is_err());
        assert!(Partition::from_blocks(2, vec![vec![0, 2]]).is_err());
    }

    #[test]
    fn refinement_order() {
        let fine = Partition::from_labels(&[0, 1, 2, 2]);
        let coarse = Partition::from_labels(&[0, 0, 1, 1]);
        assert!(fine.refines(&coarse));
        assert!(!coarse.refines(&fine));
        assert!(fine.refines(&Partition::trivial(4)));
        assert!(Partition::discrete(4).refines(&fine));
    }
}
