use thiserror::Error;

use super::functor::FunctorExpr;
use crate::scalar::Probability;

pub type StateId = usize;

/// One state's observation: labels, structure, and successor references.
///
/// `Set` members are kept sorted and duplicate-free, and `Dist` entries are
/// sorted by value with strictly positive probabilities; build them through
/// [`FValue::set`] and [`FValue::dist`] to get that normal form.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FValue<P> {
    State(StateId),
    Label(String),
    Tuple(Vec<FValue<P>>),
    Inj(usize, Box<FValue<P>>),
    /// Values of an exponent, positionally aligned with its label set.
    Fun(Vec<FValue<P>>),
    Set(Vec<FValue<P>>),
    Dist(Vec<(FValue<P>, P)>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValueError {
    #[error("value does not match functor `{functor}`")]
    ShapeMismatch { functor: String },
    #[error("unknown label {0:?}")]
    UnknownLabel(String),
    #[error("probabilities sum to {sum}, expected 1")]
    ProbabilitySum { sum: String },
    #[error("probability {0} is not in (0, 1]")]
    ProbabilityRange(String),
    #[error("probability arithmetic overflowed")]
    ProbabilityOverflow,
    #[error("state {state} is out of range for {n_states} states")]
    StateOutOfRange { state: StateId, n_states: usize },
    #[error("duplicate member in a set or distribution")]
    DuplicateMember,
}

impl<P: Probability> FValue<P> {
    pub fn label(l: impl Into<String>) -> Self {
        Self::Label(l.into())
    }

    pub fn inj(k: usize, v: Self) -> Self {
        Self::Inj(k, Box::new(v))
    }

    /// A set in normal form.
    pub fn set(mut members: Vec<Self>) -> Self {
        members.sort();
        members.dedup();
        Self::Set(members)
    }

    /// A distribution in normal form: repeated values are merged by summing
    /// and zero entries are dropped. Validity of the total is checked by
    /// [`validate_value`].
    pub fn dist(mut entries: Vec<(Self, P)>) -> Result<Self, ValueError> {
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        let mut merged: Vec<(Self, P)> = Vec::with_capacity(entries.len());
        for (v, p) in entries {
            match merged.last_mut() {
                Some((last, q)) if *last == v => {
                    *q = q.checked_sum(&p).ok_or(ValueError::ProbabilityOverflow)?;
                }
                _ => merged.push((v, p)),
            }
        }
        merged.retain(|(_, p)| !p.is_zero());
        Ok(Self::Dist(merged))
    }

    /// Calls `f` for every state reference, in value order, with repeats.
    pub fn for_each_state(&self, f: &mut impl FnMut(StateId)) {
        match self {
            Self::State(s) => f(*s),
            Self::Label(_) => {}
            Self::Tuple(vs) | Self::Fun(vs) | Self::Set(vs) => vs.iter().for_each(|v| v.for_each_state(f)),
            Self::Inj(_, v) => v.for_each_state(f),
            Self::Dist(es) => es.iter().for_each(|(v, _)| v.for_each_state(f)),
        }
    }

    /// Sorted, duplicate-free list of the states this value mentions.
    pub fn occurring_states(&self) -> Vec<StateId> {
        let mut out = Vec::new();
        self.for_each_state(&mut |s| out.push(s));
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Replaces every state reference through `f` and restores normal form.
    pub fn map_states(&self, f: &impl Fn(StateId) -> StateId) -> Result<Self, ValueError> {
        Ok(match self {
            Self::State(s) => Self::State(f(*s)),
            Self::Label(l) => Self::Label(l.clone()),
            Self::Tuple(vs) => Self::Tuple(vs.iter().map(|v| v.map_states(f)).collect::<Result<_, _>>()?),
            Self::Fun(vs) => Self::Fun(vs.iter().map(|v| v.map_states(f)).collect::<Result<_, _>>()?),
            Self::Inj(k, v) => Self::inj(*k, v.map_states(f)?),
            Self::Set(vs) => Self::set(vs.iter().map(|v| v.map_states(f)).collect::<Result<_, _>>()?),
            Self::Dist(es) => Self::dist(
                es.iter()
                    .map(|(v, p)| Ok((v.map_states(f)?, p.clone())))
                    .collect::<Result<_, ValueError>>()?,
            )?,
        })
    }
}

/// Checks that `v` has the shape of `functor`, uses declared labels only,
/// carries distributions that sum to exactly one, and refers to states below
/// `n_states`.
pub fn validate_value<P: Probability>(
    functor: &FunctorExpr,
    v: &FValue<P>,
    n_states: usize,
) -> Result<(), ValueError> {
    let mismatch = || ValueError::ShapeMismatch { functor: functor.to_string() };
    match (functor, v) {
        (FunctorExpr::Identity, FValue::State(s)) => {
            if *s >= n_states {
                return Err(ValueError::StateOutOfRange { state: *s, n_states });
            }
        }
        (FunctorExpr::Const(labels), FValue::Label(l)) => {
            if !labels.contains(l) {
                return Err(ValueError::UnknownLabel(l.clone()));
            }
        }
        (FunctorExpr::Product(fs), FValue::Tuple(vs)) => {
            if fs.len() != vs.len() {
                return Err(mismatch());
            }
            for (f, v) in fs.iter().zip(vs) {
                validate_value(f, v, n_states)?;
            }
        }
        (FunctorExpr::Exponent { base, index }, FValue::Fun(vs)) => {
            if index.len() != vs.len() {
                return Err(mismatch());
            }
            for v in vs {
                validate_value(base, v, n_states)?;
            }
        }
        (FunctorExpr::Coproduct(fs), FValue::Inj(k, v)) => match fs.get(*k) {
            Some(f) => validate_value(f, v, n_states)?,
            None => return Err(mismatch()),
        },
        (FunctorExpr::Powerset(inner), FValue::Set(vs)) => {
            for v in vs {
                validate_value(inner, v, n_states)?;
            }
            let mut sorted: Vec<&FValue<P>> = vs.iter().collect();
            sorted.sort();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(ValueError::DuplicateMember);
            }
        }
        (FunctorExpr::Distribution(inner), FValue::Dist(es)) => {
            let mut total = P::zero();
            for (v, p) in es {
                validate_value(inner, v, n_states)?;
                if p.is_zero() || *p > P::one() || *p < P::zero() {
                    return Err(ValueError::ProbabilityRange(p.to_fraction_string()));
                }
                total = total.checked_sum(p).ok_or(ValueError::ProbabilityOverflow)?;
            }
            if total != P::one() {
                return Err(ValueError::ProbabilitySum { sum: total.to_fraction_string() });
            }
            let mut sorted: Vec<&FValue<P>> = es.iter().map(|(v, _)| v).collect();
            sorted.sort();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(ValueError::DuplicateMember);
            }
        }
        _ => return Err(mismatch()),
    }
    Ok(())
}
