//! Seeded instance generators.
//!
//! Random families are built in two stages. A random *core* system on `k`
//! states is drawn first; the `n` output states are then mapped onto the core
//! by a random surjection and every successor reference is redirected to a
//! random preimage (set members may be duplicated across preimages and
//! probability mass split between them). The surjection is a homomorphism
//! onto the core, so instances carry non-trivial bisimilarity classes while
//! staying otherwise random. Setting `core_states = n` gives a plain random
//! instance.
//!
//! Randomness comes from ChaCha8 seeded with `seed_from_u64`; bounded draws
//! use rejection sampling on `next_u64`, so corpora are reproducible from the
//! seed alone.

use std::fmt;
use std::str::FromStr;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::scalar::Probability;
use crate::sysmodel::{alphabet_labels, Coalgebra, FValue, FunctorExpr, LabelSet, StateId};

/// Common denominator of generated probabilities.
pub const DENOMINATOR: u64 = 1 << 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Dfa,
    Nfa,
    Lts,
    Mc,
    Mdp,
    Chain,
}

impl Family {
    pub const RANDOM: [Family; 5] = [Family::Dfa, Family::Nfa, Family::Lts, Family::Mc, Family::Mdp];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Dfa => "dfa",
            Self::Nfa => "nfa",
            Self::Lts => "lts",
            Self::Mc => "mc",
            Self::Mdp => "mdp",
            Self::Chain => "chain",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = GenError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dfa" => Ok(Self::Dfa),
            "nfa" => Ok(Self::Nfa),
            "lts" => Ok(Self::Lts),
            "mc" => Ok(Self::Mc),
            "mdp" => Ok(Self::Mdp),
            "chain" => Ok(Self::Chain),
            _ => Err(GenError::UnknownFamily(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("unknown family `{0}`")]
    UnknownFamily(String),
    #[error("invalid parameter: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GenSpec {
    pub family: Family,
    pub n_states: usize,
    /// Letters (dfa, nfa, chain) or actions (lts).
    pub alphabet: usize,
    /// Upper bound on successor sets and distribution supports.
    pub out_degree: usize,
    /// Number of output labels for mc and mdp; 0 gives the unlabelled functor.
    pub labels: usize,
    /// Size of the random core; drawn uniformly from `1..=n_states` when unset.
    pub core_states: Option<usize>,
    pub seed: u64,
}

impl GenSpec {
    pub fn new(family: Family, n_states: usize, seed: u64) -> Self {
        Self { family, n_states, alphabet: 2, out_degree: 3, labels: 2, core_states: None, seed }
    }

    pub fn functor(&self) -> FunctorExpr {
        let letters = || LabelSet::new(alphabet_labels(self.alphabet)).expect("alphabet is nonempty");
        let labelled = |inner| if self.labels == 0 { inner } else { FunctorExpr::labelled(self.labels, inner) };
        match self.family {
            Family::Dfa | Family::Chain => FunctorExpr::dfa(letters()),
            Family::Nfa => FunctorExpr::nfa(letters()),
            Family::Lts => FunctorExpr::lts(letters()),
            Family::Mc => labelled(FunctorExpr::markov_chain()),
            Family::Mdp => labelled(FunctorExpr::mdp()),
        }
    }

    fn validate(&self) -> Result<(), GenError> {
        let bad = |m: &str| Err(GenError::Invalid(m.to_string()));
        if self.n_states == 0 {
            return bad("n_states must be at least 1");
        }
        let needs_letters = matches!(self.family, Family::Dfa | Family::Nfa | Family::Lts | Family::Chain);
        if needs_letters && self.alphabet == 0 {
            return bad("alphabet must be at least 1");
        }
        if matches!(self.family, Family::Mc | Family::Mdp) && self.out_degree == 0 {
            return bad("out_degree must be at least 1 for distributions");
        }
        if let Some(k) = self.core_states {
            if k == 0 || k > self.n_states {
                return bad("core_states must lie in 1..=n_states");
            }
        }
        Ok(())
    }
}

/// Deterministic bounded draws.
struct Draw(ChaCha8Rng);

impl Draw {
    /// Uniform in `0..n`, `n > 0`.
    fn below(&mut self, n: usize) -> usize {
        let n = n as u64;
        let zone = u64::MAX - u64::MAX % n;
        loop {
            let v = self.0.next_u64();
            if v < zone {
                return (v % n) as usize;
            }
        }
    }

    /// Uniform in `lo..=hi`.
    fn between(&mut self, lo: usize, hi: usize) -> usize {
        lo + self.below(hi - lo + 1)
    }

    fn chance(&mut self, num: usize, den: usize) -> bool {
        self.below(den) < num
    }

    /// `size` distinct values from `0..n`, ascending.
    fn distinct(&mut self, n: usize, size: usize) -> Vec<usize> {
        if size * 4 <= n {
            let mut out: Vec<usize> = Vec::with_capacity(size);
            while out.len() < size {
                let v = self.below(n);
                if !out.contains(&v) {
                    out.push(v);
                }
            }
            out.sort_unstable();
            return out;
        }
        let mut pool: Vec<usize> = (0..n).collect();
        for i in 0..size.min(n) {
            let j = i + self.below(n - i);
            pool.swap(i, j);
        }
        pool.truncate(size.min(n));
        pool.sort_unstable();
        pool
    }

    /// A composition of `total` into `parts` positive integers.
    fn composition(&mut self, total: u64, parts: usize) -> Vec<u64> {
        let mut cuts: Vec<u64> = self.distinct(total as usize - 1, parts - 1).into_iter().map(|c| c as u64 + 1).collect();
        cuts.push(total);
        let mut prev = 0;
        cuts.into_iter()
            .map(|c| {
                let part = c - prev;
                prev = c;
                part
            })
            .collect()
    }
}

/// Core observations before lifting; distribution masses are numerators over
/// [`DENOMINATOR`].
#[derive(Debug, Clone)]
enum Shape {
    State(StateId),
    Label(String),
    Tuple(Vec<Shape>),
    Fun(Vec<Shape>),
    Set(Vec<Shape>),
    Dist(Vec<(Shape, u64)>),
}

fn random_dist(d: &mut Draw, k: usize, out_degree: usize) -> Shape {
    let size = d.between(1, out_degree);
    let support = d.distinct(k, size);
    let masses = d.composition(DENOMINATOR, support.len());
    Shape::Dist(support.into_iter().map(Shape::State).zip(masses).collect())
}

fn core_value(spec: &GenSpec, d: &mut Draw, k: usize) -> Shape {
    let bit = |d: &mut Draw| Shape::Label(d.below(2).to_string());
    let with_label = |d: &mut Draw, inner: Shape| {
        if spec.labels == 0 {
            inner
        } else {
            Shape::Tuple(vec![Shape::Label(d.below(spec.labels).to_string()), inner])
        }
    };
    match spec.family {
        Family::Dfa => {
            let acc = bit(d);
            Shape::Tuple(vec![acc, Shape::Fun((0..spec.alphabet).map(|_| Shape::State(d.below(k))).collect())])
        }
        Family::Nfa => {
            let acc = bit(d);
            let succ = (0..spec.alphabet)
                .map(|_| {
                    let size = d.between(0, spec.out_degree);
                    Shape::Set(d.distinct(k, size).into_iter().map(Shape::State).collect())
                })
                .collect();
            Shape::Tuple(vec![acc, Shape::Fun(succ)])
        }
        Family::Lts => {
            let letters = alphabet_labels(spec.alphabet);
            let size = d.between(0, spec.out_degree);
            let pairs = (0..size)
                .map(|_| Shape::Tuple(vec![Shape::Label(letters[d.below(letters.len())].clone()), Shape::State(d.below(k))]))
                .collect();
            Shape::Set(pairs)
        }
        Family::Mc => {
            let dist = random_dist(d, k, spec.out_degree);
            with_label(d, dist)
        }
        Family::Mdp => {
            let size = d.between(0, spec.out_degree);
            let dists = (0..size).map(|_| random_dist(d, k, spec.out_degree)).collect();
            with_label(d, Shape::Set(dists))
        }
        Family::Chain => unreachable!("chains are not random"),
    }
}

/// Redirects each core reference to a random preimage, occasionally
/// duplicating a set member or splitting a probability mass.
fn lift<P: Probability>(v: &Shape, d: &mut Draw, preimages: &[Vec<StateId>]) -> FValue<P> {
    let pick = |d: &mut Draw, b: StateId| preimages[b][d.below(preimages[b].len())];
    match v {
        Shape::State(b) => FValue::State(pick(d, *b)),
        Shape::Label(l) => FValue::label(l.clone()),
        Shape::Tuple(vs) => FValue::Tuple(vs.iter().map(|v| lift(v, d, preimages)).collect()),
        Shape::Fun(vs) => FValue::Fun(vs.iter().map(|v| lift(v, d, preimages)).collect()),
        Shape::Set(vs) => {
            let mut out = Vec::with_capacity(vs.len());
            for v in vs {
                out.push(lift(v, d, preimages));
                if d.chance(1, 4) {
                    out.push(lift(v, d, preimages));
                }
            }
            FValue::set(out)
        }
        Shape::Dist(es) => {
            let mut out = Vec::with_capacity(es.len());
            let prob = |num| P::from_parts(num, DENOMINATOR).expect("generated probabilities fit");
            for (v, mass) in es {
                let target = lift(v, d, preimages);
                if *mass >= 2 && d.chance(1, 3) {
                    let first = 1 + d.below(*mass as usize - 1) as u64;
                    out.push((target, prob(first)));
                    out.push((lift(v, d, preimages), prob(mass - first)));
                } else {
                    out.push((target, prob(*mass)));
                }
            }
            FValue::dist(out).expect("generated probabilities fit")
        }
    }
}

fn chain<P: Probability>(spec: &GenSpec) -> Vec<FValue<P>> {
    let n = spec.n_states;
    (0..n)
        .map(|i| {
            let next = (i + 1).min(n - 1);
            let acc = if i == n - 1 { "1" } else { "0" };
            FValue::Tuple(vec![FValue::label(acc), FValue::Fun(vec![FValue::State(next); spec.alphabet])])
        })
        .collect()
}

/// Builds the instance described by `spec`; equal specs give equal instances.
pub fn generate<P: Probability>(spec: &GenSpec) -> Result<Coalgebra<P>, GenError> {
    spec.validate()?;
    let values = if spec.family == Family::Chain {
        chain(spec)
    } else {
        let n = spec.n_states;
        let mut d = Draw(ChaCha8Rng::seed_from_u64(spec.seed));
        let k = spec.core_states.unwrap_or_else(|| d.between(1, n));
        let core: Vec<Shape> = (0..k).map(|_| core_value(spec, &mut d, k)).collect();
        // Surjection onto the core: the first k states hit every core state,
        // the rest land anywhere; then shuffle.
        let mut image: Vec<usize> = (0..n).map(|i| if i < k { i } else { d.below(k) }).collect();
        for i in (1..n).rev() {
            image.swap(i, d.below(i + 1));
        }
        let mut preimages = vec![Vec::new(); k];
        for (s, &b) in image.iter().enumerate() {
            preimages[b].push(s);
        }
        image.iter().map(|&b| lift(&core[b], &mut d, &preimages)).collect()
    };
    Coalgebra::new(spec.functor(), values).map_err(|e| GenError::Invalid(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Prob;

    #[test]
    fn deterministic() {
        let spec = GenSpec::new(Family::Dfa, 5, 1);
        let a: Coalgebra<Prob> = generate(&spec).unwrap();
        let b: Coalgebra<Prob> = generate(&spec).unwrap();
        assert_eq!(a, b);
        let other: Coalgebra<Prob> = generate(&GenSpec { seed: 2, ..spec }).unwrap();
        assert_eq!(other.n_states(), 5);
    }

    #[test]
    fn every_family_validates() {
        for family in Family::RANDOM {
            for seed in 0..50 {
                let spec = GenSpec::new(family, 1 + seed as usize % 20, seed);
                let c: Coalgebra<Prob> = generate(&spec).unwrap();
                assert_eq!(c.n_states(), spec.n_states);
            }
        }
    }

    #[test]
    fn markov_denominators_bounded() {
        for seed in 0..20 {
            let spec = GenSpec { labels: 0, ..GenSpec::new(Family::Mc, 15, seed) };
            let c: Coalgebra<Prob> = generate(&spec).unwrap();
            for v in c.values() {
                let FValue::Dist(es) = v else { panic!("unlabelled chain") };
                let total: Prob = es.iter().map(|(_, p)| p.clone()).sum();
                assert_eq!(total, Prob::from_integer(1.into()));
                assert!(es.iter().all(|(_, p)| *p.denom() <= (1u32 << 16).into()));
            }
        }
    }

    #[test]
    fn chain_shape() {
        let c: Coalgebra<Prob> = generate(&GenSpec::new(Family::Chain, 4, 0)).unwrap();
        assert_eq!(c.value(1), &FValue::Tuple(vec![FValue::label("0"), FValue::Fun(vec![FValue::State(2); 2])]));
        assert_eq!(c.value(3), &FValue::Tuple(vec![FValue::label("1"), FValue::Fun(vec![FValue::State(3); 2])]));
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(generate::<Prob>(&GenSpec::new(Family::Dfa, 0, 0)).is_err());
        assert!(generate::<Prob>(&GenSpec { alphabet: 0, ..GenSpec::new(Family::Nfa, 3, 0) }).is_err());
        assert!(generate::<Prob>(&GenSpec { core_states: Some(4), ..GenSpec::new(Family::Lts, 3, 0) }).is_err());
        assert!("pda".parse::<Family>().is_err());
    }

    #[test]
    fn bounded_draws_cover_range() {
        let mut d = Draw(ChaCha8Rng::seed_from_u64(7));
        let mut hit = [false; 5];
        for _ in 0..200 {
            hit[d.below(5)] = true;
        }
        assert!(hit.iter().all(|&h| h));
        let parts = d.composition(10, 4);
        assert_eq!(parts.iter().sum::<u64>(), 10);
        assert!(parts.iter().all(|&p| p > 0));
    }
}
