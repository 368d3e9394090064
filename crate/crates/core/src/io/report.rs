use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::engine::{Partition, RefinementTree, RunStats, WeightKind};
use crate::wtree::{HeavyChoice, WeightAssignment, WeightedTree};

use super::IoError;

pub fn partition_json(p: &Partition) -> Value {
    json!({ "blocks": p.blocks() })
}

/// RunStats as JSON; the wall-clock time is included only on request so
/// that default output stays reproducible.
pub fn stats_json(stats: &RunStats, with_time: bool) -> Value {
    let mut v = serde_json::to_value(stats).expect("stats serialize");
    if with_time {
        v["wall_ms"] = json!(stats.wall_time.as_secs_f64() * 1e3);
    }
    v
}

/// The weighted-tree file for a refinement tree: `parent` and `w` (the run's
/// weight), plus `states`, `heavy` and every weight under `weights`.
pub fn tree_json(tree: &RefinementTree) -> Value {
    let kind = tree.kind();
    let states: Vec<Vec<usize>> = (0..tree.len()).map(|v| tree.states(v)).collect();
    let weights: Map<String, Value> =
        WeightKind::ALL.iter().map(|&k| (k.to_string(), json!(tree.weights(k).as_slice()))).collect();
    json!({
        "parent": tree.parents(),
        "w": tree.weights(kind).as_slice(),
        "states": states,
        "heavy": tree.heavy_marks(),
        "weight": kind.as_str(),
        "weights": weights,
    })
}

#[derive(Deserialize)]
struct RawTree {
    parent: Vec<usize>,
    w: Vec<u64>,
    #[serde(default)]
    heavy: Option<Vec<bool>>,
}

/// A parsed tree file; `heavy` is present when the file records its choice.
#[derive(Debug, Clone)]
pub struct TreeFile {
    pub tree: WeightedTree,
    pub weights: WeightAssignment<u64>,
    pub heavy: Option<HeavyChoice>,
}

pub fn tree_from_json(text: &str) -> Result<TreeFile, IoError> {
    let raw: RawTree = serde_json::from_str(text).map_err(|e| IoError::Json(e.to_string()))?;
    let tree = WeightedTree::from_parents(&raw.parent).map_err(|e| IoError::Invalid(e.to_string()))?;
    if raw.w.len() != tree.node_count() {
        return Err(IoError::Invalid(format!("{} weights for {} nodes", raw.w.len(), tree.node_count())));
    }
    let heavy = match raw.heavy {
        Some(marks) if marks.len() != tree.node_count() => {
            return Err(IoError::Invalid(format!("{} heavy marks for {} nodes", marks.len(), tree.node_count())));
        }
        Some(marks) => Some(HeavyChoice::from_marks(&tree, &marks).map_err(|e| IoError::Invalid(e.to_string()))?),
        None => None,
    };
    Ok(TreeFile { tree, weights: WeightAssignment::new(raw.w), heavy })
}
