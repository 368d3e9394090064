//! Canonical signatures of observations under a block labelling.
//!
//! Replacing every successor by the label of its block and normalising sets
//! and distributions gives a byte string; two states are related by the
//! lifted equivalence exactly when their byte strings coincide.

use std::fmt;

use super::value::{FValue, StateId};
use crate::scalar::Probability;

/// Anything that assigns a block label to each state.
pub trait BlockLabeling {
    fn block_label(&self, state: StateId) -> u64;
}

impl BlockLabeling for [u32] {
    fn block_label(&self, state: StateId) -> u64 {
        u64::from(self[state])
    }
}

impl BlockLabeling for [usize] {
    fn block_label(&self, state: StateId) -> u64 {
        self[state] as u64
    }
}

impl BlockLabeling for Vec<usize> {
    fn block_label(&self, state: StateId) -> u64 {
        self[state] as u64
    }
}

impl BlockLabeling for Vec<u32> {
    fn block_label(&self, state: StateId) -> u64 {
        u64::from(self[state])
    }
}

impl<F: Fn(StateId) -> u64> BlockLabeling for F {
    fn block_label(&self, state: StateId) -> u64 {
        self(state)
    }
}

/// A canonical, totally ordered encoding of an observation modulo a block
/// labelling.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Signature(Vec<u8>);

impl Signature {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

impl fmt::Debug for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Signature(")?;
        for b in &self.0 {
            write!(f, "{b:02x}")?;
        }
        write!(f, ")")
    }
}

const TAG_STATE: u8 = b'S';
const TAG_LABEL: u8 = b'L';
const TAG_TUPLE: u8 = b'T';
const TAG_INJ: u8 = b'I';
const TAG_SET: u8 = b'P';
const TAG_DIST: u8 = b'D';

fn put_u32(out: &mut Vec<u8>, n: usize) {
    out.extend_from_slice(&(n as u32).to_be_bytes());
}

fn encode<P: Probability, L: BlockLabeling + ?Sized>(v: &FValue<P>, labels: &L, out: &mut Vec<u8>) {
    match v {
        FValue::State(s) => {
            out.push(TAG_STATE);
            out.extend_from_slice(&labels.block_label(*s).to_be_bytes());
        }
        FValue::Label(l) => {
            out.push(TAG_LABEL);
            put_u32(out, l.len());
            out.extend_from_slice(l.as_bytes());
        }
        FValue::Tuple(vs) | FValue::Fun(vs) => {
            out.push(TAG_TUPLE);
            put_u32(out, vs.len());
            for v in vs {
                encode(v, labels, out);
            }
        }
        FValue::Inj(k, v) => {
            out.push(TAG_INJ);
            put_u32(out, *k);
            encode(v, labels, out);
        }
        FValue::Set(vs) => {
            let mut members: Vec<Vec<u8>> = vs
                .iter()
                .map(|v| {
                    let mut buf = Vec::new();
                    encode(v, labels, &mut buf);
                    buf
                })
                .collect();
            members.sort_unstable();
            members.dedup();
            out.push(TAG_SET);
            put_u32(out, members.len());
            members.iter().for_each(|m| out.extend_from_slice(m));
        }
        FValue::Dist(es) => {
            let mut entries: Vec<(Vec<u8>, P)> = es
                .iter()
                .map(|(v, p)| {
                    let mut buf = Vec::new();
                    encode(v, labels, &mut buf);
                    (buf, p.clone())
                })
                .collect();
            entries.sort_unstable_by(|a, b| a.0.cmp(&b.0));
            let mut merged: Vec<(Vec<u8>, P)> = Vec::with_capacity(entries.len());
            for (m, p) in entries {
                match merged.last_mut() {
                    Some((last, q)) if *last == m => *q = q.clone() + p,
                    _ => merged.push((m, p)),
                }
            }
            out.push(TAG_DIST);
            put_u32(out, merged.len());
            for (m, p) in &merged {
                out.extend_from_slice(m);
                p.encode(out);
            }
        }
    }
}

/// The signature of `v` with every state replaced by its block label.
pub fn signature_of<P: Probability, L: BlockLabeling + ?Sized>(v: &FValue<P>, labels: &L) -> Signature {
    let mut out = Vec::with_capacity(32);
    encode(v, labels, &mut out);
    Signature(out)
}
