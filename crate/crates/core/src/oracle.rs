//! Brute-force bisimilarity and partition checks, sharing no code path with
//! the refiners.
//!
//! The relation is kept as a pairwise bit matrix and each sweep tests pairs
//! by the relation lifting itself (componentwise, Egli-Milner, equal mass
//! per class) rather than by signatures.

use thiserror::Error;

use crate::engine::Partition;
use crate::scalar::Probability;
use crate::sysmodel::{Coalgebra, FValue, StateId};

/// Largest state count [`bisim_bruteforce`] accepts.
pub const MAX_ORACLE_STATES: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{n} states exceeds the oracle limit of {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("partitions cover {left} and {right} states")]
    StateCountMismatch { left: usize, right: usize },
    #[error("relation is not an equivalence")]
    NotEquivalence,
}

/// A binary relation on `0..n` as a dense bit matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairRelation {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl PairRelation {
    pub fn empty(n: usize) -> Self {
        let words = n.div_ceil(64);
        Self { n, words, bits: vec![0; n * words] }
    }

    pub fn total(n: usize) -> Self {
        let mut r = Self::empty(n);
        for x in 0..n {
            for y in 0..n {
                r.set(x, y, true);
            }
        }
        r
    }

    pub fn identity(n: usize) -> Self {
        let mut r = Self::empty(n);
        for x in 0..n {
            r.set(x, x, true);
        }
        r
    }

    /// The equivalence whose classes are the blocks of `p`.
    pub fn from_partition(p: &Partition) -> Self {
        let mut r = Self::empty(p.n_states());
        for block in p.blocks() {
            for &x in block {
                for &y in block {
                    r.set(x, y, true);
                }
            }
        }
        r
    }

    pub fn n_states(&self) -> usize {
        self.n
    }

    pub fn contains(&self, x: StateId, y: StateId) -> bool {
        self.bits[x * self.words + y / 64] >> (y % 64) & 1 == 1
    }

    /// Sets or clears the single ordered pair `(x, y)`.
    pub fn set(&mut self, x: StateId, y: StateId, value: bool) {
        let w = &mut self.bits[x * self.words + y / 64];
        if value {
            *w |= 1 << (y % 64);
        } else {
            *w &= !(1 << (y % 64));
        }
    }

    pub fn pair_count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn row(&self, x: StateId) -> &[u64] {
        &self.bits[x * self.words..(x + 1) * self.words]
    }

    fn members(&self, x: StateId) -> impl Iterator<Item = StateId> + '_ {
        self.row(x).iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                (w != 0).then(|| {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    i * 64 + b
                })
            })
        })
    }

    pub fn is_equivalence(&self) -> bool {
        for x in 0..self.n {
            if !self.contains(x, x) {
                return false;
            }
            for y in self.members(x) {
                if !self.contains(y, x) {
                    return false;
                }
                // Transitivity: row(y) ⊆ row(x).
                if self.row(y).iter().zip(self.row(x)).any(|(a, b)| a & !b != 0) {
                    return false;
                }
            }
        }
        true
    }

    /// Class label of every state under the equivalence closure.
    pub fn closure_labels(&self) -> Vec<usize> {
        let mut uf = UnionFind::new(self.n);
        for x in 0..self.n {
            for y in self.members(x) {
                uf.union(x, y);
            }
        }
        (0..self.n).map(|x| uf.find(x)).collect()
    }

    pub fn closure_partition(&self) -> Partition {
        Partition::from_labels(&self.closure_labels())
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.parent[a.max(b)] = a.min(b);
        }
    }
}

/// Whether `u` and `v` are related by the lifting of the equivalence with
/// class labels `cls`.
fn lifted<P: Probability>(u: &FValue<P>, v: &FValue<P>, cls: &[usize]) -> bool {
    match (u, v) {
        (FValue::State(a), FValue::State(b)) => cls[*a] == cls[*b],
        (FValue::Label(a), FValue::Label(b)) => a == b,
        (FValue::Tuple(a), FValue::Tuple(b)) | (FValue::Fun(a), FValue::Fun(b)) => {
            a.len() == b.len() && a.iter().zip(b).all(|(x, y)| lifted(x, y, cls))
        }
        (FValue::Inj(i, a), FValue::Inj(j, b)) => i == j && lifted(a, b, cls),
        (FValue::Set(a), FValue::Set(b)) => {
            a.iter().all(|x| b.iter().any(|y| lifted(x, y, cls))) && b.iter().all(|y| a.iter().any(|x| lifted(x, y, cls)))
        }
        (FValue::Dist(a), FValue::Dist(b)) => {
            let support: Vec<&FValue<P>> = a.iter().chain(b).map(|(x, _)| x).collect();
            let mut uf = UnionFind::new(support.len());
            for i in 0..support.len() {
                for j in i + 1..support.len() {
                    if lifted(support[i], support[j], cls) {
                        uf.union(i, j);
                    }
                }
            }
            let mut mass: Vec<(P, P)> = vec![(P::zero(), P::zero()); support.len()];
            for (i, (_, p)) in a.iter().enumerate() {
                let r = uf.find(i);
                mass[r].0 = mass[r].0.clone() + p.clone();
            }
            for (i, (_, p)) in b.iter().enumerate() {
                let r = uf.find(a.len() + i);
                mass[r].1 = mass[r].1.clone() + p.clone();
            }
            mass.iter().all(|(x, y)| x == y)
        }
        _ => false,
    }
}

/// The bisimilarity partition by pairwise fixpoint iteration from the total
/// relation.
pub fn bisim_bruteforce<P: Probability>(coalg: &Coalgebra<P>) -> Result<Partition, OracleError> {
    let n = coalg.n_states();
    if n > MAX_ORACLE_STATES {
        return Err(OracleError::TooLarge { n, limit: MAX_ORACLE_STATES });
    }
    let mut rel = PairRelation::total(n);
    loop {
        let cls = rel.closure_labels();
        let mut next = PairRelation::empty(n);
        let mut removed = false;
        for x in 0..n {
            for y in x..n {
                if cls[x] != cls[y] {
                    continue;
                }
                if lifted(coalg.value(x), coalg.value(y), &cls) {
                    next.set(x, y, true);
                    next.set(y, x, true);
                } else {
                    removed = true;
                }
            }
        }
        if !removed {
            return Ok(Partition::from_labels(&cls));
        }
        rel = next;
    }
}

/// Whether `p` and `q` have the same kernel.
pub fn partitions_equal(p: &Partition, q: &Partition) -> Result<bool, OracleError> {
    if p.n_states() != q.n_states() {
        return Err(OracleError::StateCountMismatch { left: p.n_states(), right: q.n_states() });
    }
    let mut fwd = vec![usize::MAX; p.n_blocks()];
    let mut back = vec![usize::MAX; q.n_blocks()];
    for s in 0..p.n_states() {
        let (a, b) = (p.block_of(s), q.block_of(s));
        if fwd[a] == usize::MAX && back[b] == usize::MAX {
            fwd[a] = b;
            back[b] = a;
        } else if fwd[a] != b || back[b] != a {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Checks that `blocks` realise `relation`: every block lies in one class,
/// the blocks are not finer than the classes, and they are nonempty and
/// pairwise disjoint.
pub fn check_r_partitioning_blocks(blocks: &[Vec<StateId>], relation: &PairRelation) -> Result<bool, OracleError> {
    if !relation.is_equivalence() {
        return Err(OracleError::NotEquivalence);
    }
    let n = relation.n_states();
    let mut seen = vec![false; n];
    for block in blocks {
        if block.is_empty() {
            return Ok(false);
        }
        for &s in block {
            if s >= n || seen[s] {
                return Ok(false);
            }
            seen[s] = true;
        }
    }
    let within_one_class = blocks.iter().all(|b| b.iter().all(|&x| b.iter().all(|&y| relation.contains(x, y))));
    if !within_one_class {
        return Ok(false);
    }
    let mut uf = UnionFind::new(n);
    for b in blocks {
        for &x in &b[1..] {
            uf.union(b[0], x);
        }
    }
    let closure: Vec<usize> = (0..n).map(|x| uf.find(x)).collect();
    for x in 0..n {
        for y in 0..n {
            if (closure[x] == closure[y]) != relation.contains(x, y) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

pub fn check_r_partitioning(partition: &Partition, relation: &PairRelation) -> Result<bool, OracleError> {
    check_r_partitioning_blocks(partition.blocks(), relation)
}
