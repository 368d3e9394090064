use std::collections::HashMap;
use std::time::Instant;

use crate::scalar::Probability;
use crate::sysmodel::{signature_of, Coalgebra};

use super::{Partition, RunStats};

#[derive(Debug, Clone)]
pub struct NaiveRun {
    pub partition: Partition,
    pub stats: RunStats,
}

/// Repeats a full round (re-signature every state, split every block by
/// signature) from the one-block partition until no block splits.
pub fn refine_naive<P: Probability>(coalg: &Coalgebra<P>) -> NaiveRun {
    let start = Instant::now();
    let n = coalg.n_states();
    let mut stats = RunStats::default();
    let mut partition = Partition::trivial(n);
    loop {
        stats.iterations += 1;
        let labels = partition.labels();
        let mut keys: Vec<(usize, usize)> = Vec::with_capacity(n);
        let mut ids = HashMap::new();
        for s in 0..n {
            let sig = signature_of(coalg.value(s), labels);
            let next = ids.len();
            let id = *ids.entry((labels[s], sig)).or_insert(next);
            keys.push((labels[s], id));
        }
        stats.signatures_computed += n as u64;
        let next = Partition::from_labels(&keys);
        if next.n_blocks() == partition.n_blocks() {
            break;
        }
        let mut parts = vec![0usize; partition.n_blocks()];
        for b in next.blocks() {
            parts[partition.block_of(b[0])] += 1;
        }
        stats.splits += parts.iter().filter(|&&k| k > 1).count() as u64;
        partition = next;
    }
    stats.wall_time = start.elapsed();
    NaiveRun { partition, stats }
}
