use serde::Serialize;

use super::bound::BoundMethod;
use super::lemmas::*;
use super::{HeavyChoice, WeightAssignment, WeightedTree, WtreeError};
use crate::scalar::Weight;

/// Result of running every tree check on one weighted tree.
///
/// * `lemma1_ok`: the edge-set inequality for `S = ∅` and `S = heavy edges`,
///   with equality once the weights are tight.
/// * `lemma2_ok`: light-child sum ≥ light-path weighted leaf sum, with equality
///   on the tightened weights.
/// * `lemma3_ok`: the tightened weights are tight, keep the root, dominate `w`
///   pointwise, and the heavy choice is still one for them.
/// * `lemma4_ok`: `2^{|lpath(r,v)|} · w(v) ≤ w(r)` wherever `w(v) ≠ 0`.
/// * `theorem1_ok`: Hopcroft's inequality, decided exactly.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub valid: bool,
    pub tight: bool,
    pub hcc_ok: bool,
    pub lemma1_ok: bool,
    pub lemma2_ok: bool,
    pub lemma3_ok: bool,
    pub lemma4_ok: bool,
    pub theorem1_ok: bool,
    pub corollary_ok: bool,
    pub light_sum: u128,
    pub lpath_sum: u128,
    pub tightened_light_sum: u128,
    pub tightened_lpath_sum: u128,
    pub bound_exact_ok: bool,
    pub bound_float_ok: bool,
    pub bound_float: f64,
    pub bound_method: Option<BoundMethod>,
}

impl AuditReport {
    pub fn all_ok(&self) -> bool {
        self.valid
            && self.hcc_ok
            && self.lemma1_ok
            && self.lemma2_ok
            && self.lemma3_ok
            && self.lemma4_ok
            && self.theorem1_ok
            && self.corollary_ok
    }

    fn invalid(tight: bool) -> Self {
        Self {
            valid: false,
            tight,
            hcc_ok: false,
            lemma1_ok: false,
            lemma2_ok: false,
            lemma3_ok: false,
            lemma4_ok: false,
            theorem1_ok: false,
            corollary_ok: false,
            light_sum: 0,
            lpath_sum: 0,
            tightened_light_sum: 0,
            tightened_lpath_sum: 0,
            bound_exact_ok: false,
            bound_float_ok: false,
            bound_float: 0.0,
            bound_method: None,
        }
    }
}

/// Audits `w` with the first-maximum heavy child choice.
pub fn audit_tree<W: Weight>(tree: &WeightedTree, w: &WeightAssignment<W>) -> Result<AuditReport, WtreeError> {
    let h = choose_heavy(tree, w)?;
    audit_tree_with_choice(tree, w, &h)
}

/// Audits `w` with a caller-supplied heavy choice, which is itself checked.
pub fn audit_tree_with_choice<W: Weight>(
    tree: &WeightedTree,
    w: &WeightAssignment<W>,
    h: &HeavyChoice,
) -> Result<AuditReport, WtreeError> {
    let validity = validate_weight(tree, w)?;
    if !validity.valid {
        return Ok(AuditReport::invalid(false));
    }
    let hcc_ok = h.is_hcc_for(tree, w);
    let tightened = tighten(tree, w, h)?;

    let light_sum = light_child_sum(tree, w, h);
    let lpath_sum = lpath_weighted_leaf_sum(tree, w, h);
    let tightened_light_sum = light_child_sum(tree, &tightened, h);
    let tightened_lpath_sum = lpath_weighted_leaf_sum(tree, &tightened, h);
    let lemma2_ok = light_sum >= lpath_sum
        && tightened_light_sum == tightened_lpath_sum
        && (!validity.tight || light_sum == lpath_sum);

    let heavy_edges: Vec<_> = h.heavy_edges().collect();
    let mut lemma1_ok = true;
    for s in [&[][..], &heavy_edges[..]] {
        let raw = general_edge_sum(tree, w, s)?;
        let tight = general_edge_sum(tree, &tightened, s)?;
        lemma1_ok &= raw.lhs >= raw.rhs && tight.lhs == tight.rhs && (!validity.tight || raw.lhs == raw.rhs);
    }
    if let Ok(heavy) = general_edge_sum(tree, w, &heavy_edges) {
        lemma1_ok &= heavy.lhs == light_sum && heavy.rhs == lpath_sum;
    }

    let tightened_validity = validate_weight(tree, &tightened)?;
    let root = tree.root();
    let lemma3_ok = tightened_validity.tight
        && h.is_hcc_for(tree, &tightened)
        && tightened.get(root) == w.get(root)
        && (0..tree.node_count()).all(|v| w.get(v) <= tightened.get(v));

    let lemma4_ok = lpath_length_bound_check(tree, w, h);
    let bound = hopcroft_bound_check(tree, w, h);

    let cost: Vec<u128> = (0..tree.node_count())
        .map(|v| h.light_children(tree, v).map(|u| w.get(u).widen()).sum())
        .collect();
    let corollary_ok = corollary_check(tree, w, h, &cost, 1) == Some(true);

    Ok(AuditReport {
        valid: true,
        tight: validity.tight,
        hcc_ok,
        lemma1_ok,
        lemma2_ok,
        lemma3_ok,
        lemma4_ok,
        theorem1_ok: bound.ok && hcc_ok,
        corollary_ok,
        light_sum,
        lpath_sum,
        tightened_light_sum,
        tightened_lpath_sum,
        bound_exact_ok: bound.ok,
        bound_float_ok: bound.float_ok,
        bound_float: bound.bound_float,
        bound_method: Some(bound.method),
    })
}
