//! System types and observations.
//!
//! A [`FunctorExpr`] fixes the kind of system (DFA, NFA, LTS, Markov chain,
//! MDP, …); a [`Coalgebra`] assigns each state an [`FValue`] of that shape.

mod functor;
mod pred;
mod signature;
mod value;

pub use functor::{alphabet_labels, FunctorError, FunctorExpr, LabelSet};
pub use pred::{build_pred_index, reachable_targets, PredIndex};
pub use signature::{signature_of, BlockLabeling, Signature};
pub use value::{validate_value, FValue, StateId, ValueError};

use thiserror::Error;

use crate::scalar::Probability;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoalgebraError {
    #[error("a coalgebra needs at least one state")]
    NoStates,
    #[error("state {state}: {source}")]
    InvalidState { state: StateId, source: ValueError },
}

/// A finite state space with one observation per state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coalgebra<P> {
    functor: FunctorExpr,
    values: Vec<FValue<P>>,
}

impl<P: Probability> Coalgebra<P> {
    /// Validates every value against `functor` with `values.len()` states.
    pub fn new(functor: FunctorExpr, values: Vec<FValue<P>>) -> Result<Self, CoalgebraError> {
        if values.is_empty() {
            return Err(CoalgebraError::NoStates);
        }
        let n = values.len();
        for (state, v) in values.iter().enumerate() {
            validate_value(&functor, v, n).map_err(|source| CoalgebraError::InvalidState { state, source })?;
        }
        Ok(Self { functor, values })
    }

    pub fn functor(&self) -> &FunctorExpr {
        &self.functor
    }

    pub fn n_states(&self) -> usize {
        self.values.len()
    }

    pub fn value(&self, state: StateId) -> &FValue<P> {
        &self.values[state]
    }

    pub fn values(&self) -> &[FValue<P>] {
        &self.values
    }

    pub fn signature<L: BlockLabeling + ?Sized>(&self, state: StateId, labels: &L) -> Signature {
        signature_of(&self.values[state], labels)
    }
}
