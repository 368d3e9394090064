//! Partition refinement: the naive fixpoint and the Hopcroft-style refiner.

mod hopcroft;
mod naive;
mod partition;
mod tree;

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use serde::Serialize;
use thiserror::Error;

use crate::scalar::Probability;
use crate::sysmodel::{signature_of, Coalgebra, PredIndex, StateId};

pub use hopcroft::{mark_dirty, refine_hopcroft, refine_hopcroft_observed, split_leaf, HopcroftRun, LoopView, MarkDirtyOutcome, SplitOutcome};
pub use naive::{refine_naive, NaiveRun};
pub use partition::Partition;
pub use tree::{RefinementTree, TreeNode};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("weight `{0}` needs predecessor information")]
    MissingContext(WeightKind),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("partitions cover {left} and {right} states")]
    StateCountMismatch { left: usize, right: usize },
    #[error("block {block} mixes states with different signatures")]
    NotSignatureConsistent { block: usize },
    #[error("unknown weight `{0}` (expected card, pred or reach)")]
    UnknownWeight(String),
}

/// Which block weight drives the heavy-child choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightKind {
    Card,
    Pred,
    Reach,
}

impl WeightKind {
    pub const ALL: [WeightKind; 3] = [WeightKind::Card, WeightKind::Pred, WeightKind::Reach];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Card => "card",
            Self::Pred => "pred",
            Self::Reach => "reach",
        }
    }

    pub(crate) fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for WeightKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for WeightKind {
    type Err = EngineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "card" => Ok(Self::Card),
            "pred" => Ok(Self::Pred),
            "reach" => Ok(Self::Reach),
            _ => Err(EngineError::UnknownWeight(s.to_string())),
        }
    }
}

/// `w_card(A) = |A|`, `w_pred(A) = Σ_{x∈A} |preds(x)|`, `w_reach(A) = |A ∩ C'|`.
///
/// `preds` may be omitted for the cardinality weight only.
pub fn block_weight(kind: WeightKind, states: &[StateId], preds: Option<&PredIndex>) -> Result<u64, EngineError> {
    match (kind, preds) {
        (WeightKind::Card, _) => Ok(states.len() as u64),
        (_, None) => Err(EngineError::MissingContext(kind)),
        (WeightKind::Pred, Some(p)) => Ok(states.iter().map(|&x| p.in_degree(x) as u64).sum()),
        (WeightKind::Reach, Some(p)) => Ok(states.iter().filter(|&&x| p.is_target(x)).count() as u64),
    }
}

/// Per-state contributions for all three weights, indexed by [`WeightKind`].
pub(crate) fn unit_weights(preds: &PredIndex) -> [Vec<u64>; 3] {
    let n = preds.n_states();
    [
        vec![1; n],
        (0..n).map(|x| preds.in_degree(x) as u64).collect(),
        (0..n).map(|x| u64::from(preds.is_target(x))).collect(),
    ]
}

/// Counters reported by every refinement run.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct RunStats {
    pub iterations: u64,
    /// Non-trivial splits, one per refined block.
    pub splits: u64,
    pub dirty_markings: u64,
    pub markdirty_touches: u64,
    pub signatures_computed: u64,
    /// Iterations whose partitioning was trivial.
    pub trivial_iterations: u64,
    #[serde(skip)]
    pub wall_time: Duration,
}

/// The coalgebra on blocks: each block's representative observation with
/// states replaced by block ids.
pub fn quotient<P: Probability>(coalg: &Coalgebra<P>, partition: &Partition) -> Result<Coalgebra<P>, EngineError> {
    if partition.n_states() != coalg.n_states() {
        return Err(EngineError::StateCountMismatch { left: coalg.n_states(), right: partition.n_states() });
    }
    let labels = partition.labels();
    let mut values = Vec::with_capacity(partition.n_blocks());
    for (b, block) in partition.blocks().iter().enumerate() {
        let rep = signature_of(coalg.value(block[0]), labels);
        if block[1..].iter().any(|&s| signature_of(coalg.value(s), labels) != rep) {
            return Err(EngineError::NotSignatureConsistent { block: b });
        }
        let v = coalg
            .value(block[0])
            .map_states(&|s| labels[s])
            .map_err(|_| EngineError::NotSignatureConsistent { block: b })?;
        values.push(v);
    }
    Coalgebra::new(coalg.functor().clone(), values).map_err(|e| EngineError::InvalidPartition(e.to_string()))
}
