//! Deciding inequalities between sums of `w·log2 w` terms.
//!
//! `a + Σ e_i·log2 b_i ≤ Σ f_j·log2 c_j` is equivalent to the integer
//! inequality `2^a · Π b_i^e_i ≤ Π c_j^f_j`, which is decided with big
//! integers for small instances. Larger instances use a floating-point margin
//! with a rigorous error band and only drop to big integers when the margin
//! falls inside the band, so the verdict is exact either way.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::One;
use serde::Serialize;

/// Root weights up to this value are always decided with big integers.
pub const EXACT_ROOT_LIMIT: u128 = 1_000;
/// Trees up to this many nodes are always decided with big integers.
pub const EXACT_NODE_LIMIT: usize = 1_000;

/// Relative slack granted to the plain floating-point verdict.
pub(crate) const FLOAT_REL_TOL: f64 = 1e-9;
/// Relative half-width of the error band around an `f64` margin. `log2` is
/// accurate to a few ulp and sums of a few thousand terms add `n·eps`, both
/// orders of magnitude below this.
const CERTIFIED_REL_BAND: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundMethod {
    BigInt,
    CertifiedFloat,
}

/// Outcome of checking Hopcroft's inequality on one tree.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCheck {
    /// Exact verdict; this is the authoritative result.
    pub ok: bool,
    /// Sum of light-children weights.
    pub lhs: u128,
    /// `w(r)·log2 w(r) − Σ w(l)·log2 w(l)` in floating point.
    pub bound_float: f64,
    /// Verdict of the plain floating-point comparison at `1e-9` relative slack.
    pub float_ok: bool,
    pub method: BoundMethod,
}

pub(crate) fn xlog2x(x: u128) -> f64 {
    if x <= 1 {
        0.0
    } else {
        let xf = x as f64;
        xf * xf.log2()
    }
}

/// `2^pow2 · Π b^e ≤ Π c^f` with big integers. `None` when an exponent is too
/// large to materialise.
fn bigint_le(pow2: u128, left: &[(u128, u128)], right: &[(u128, u128)]) -> Option<bool> {
    let product = |init: BigUint, terms: &[(u128, u128)]| -> Option<BigUint> {
        terms.iter().try_fold(init, |acc, &(base, exp)| {
            let exp = u32::try_from(exp).ok()?;
            Some(acc * BigUint::from(base).pow(exp))
        })
    };
    let shift = usize::try_from(pow2).ok()?;
    let lhs = product(BigUint::one() << shift, left)?;
    let rhs = product(BigUint::one(), right)?;
    Some(lhs <= rhs)
}

/// `(base, exponent)` factors of one side of a product comparison.
type Factors = Vec<(u128, u128)>;

/// Nets out equal bases across the two sides (base 2 folds into `pow2`), so
/// equal terms never reach the big-integer route.
fn cancel(pow2: u128, left: &[(u128, u128)], right: &[(u128, u128)]) -> (i128, Factors, Factors) {
    let mut net: BTreeMap<u128, i128> = BTreeMap::new();
    for &(b, e) in left.iter().filter(|t| t.0 > 1) {
        *net.entry(b).or_default() -= e as i128;
    }
    for &(b, e) in right.iter().filter(|t| t.0 > 1) {
        *net.entry(b).or_default() += e as i128;
    }
    let mut pow2 = pow2 as i128;
    if let Some(e) = net.remove(&2) {
        pow2 -= e;
    }
    let left = net.iter().filter(|(_, &e)| e < 0).map(|(&b, &e)| (b, (-e) as u128)).collect();
    let right = net.iter().filter(|(_, &e)| e > 0).map(|(&b, &e)| (b, e as u128)).collect();
    (pow2, left, right)
}

/// Decides `pow2 + Σ e·log2 b ≤ Σ f·log2 c` exactly.
pub(crate) fn log_sum_le(
    pow2: u128,
    left: &[(u128, u128)],
    right: &[(u128, u128)],
    force_bigint: bool,
) -> (bool, BoundMethod) {
    let (pow2, left, mut right) = cancel(pow2, left, right);
    // A negative power of two moves to the other side.
    let pow2 = if pow2 < 0 {
        right.push((2, (-pow2) as u128));
        0
    } else {
        pow2 as u128
    };
    let (left, right) = (&left[..], &right[..]);
    if force_bigint {
        if let Some(v) = bigint_le(pow2, left, right) {
            return (v, BoundMethod::BigInt);
        }
    }
    let term = |&(b, e): &(u128, u128)| if b <= 1 { 0.0 } else { e as f64 * (b as f64).log2() };
    let lhs = pow2 as f64 + left.iter().map(term).sum::<f64>();
    let rhs: f64 = right.iter().map(term).sum();
    let band = CERTIFIED_REL_BAND * (lhs.abs() + rhs.abs() + 1.0);
    let margin = rhs - lhs;
    if margin > band {
        (true, BoundMethod::CertifiedFloat)
    } else if margin < -band {
        (false, BoundMethod::CertifiedFloat)
    } else {
        match bigint_le(pow2, left, right) {
            Some(v) => (v, BoundMethod::BigInt),
            // Unreachable for weights that fit in u32 exponents.
            None => (margin >= 0.0, BoundMethod::CertifiedFloat),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bigint_and_certified_routes_agree_on_small_cases() {
        type Case<'a> = (u128, &'a [(u128, u128)], &'a [(u128, u128)]);
        let cases: &[Case] = &[
            (0, &[(4, 4)], &[(4, 4)]),
            (1, &[(4, 4)], &[(4, 4)]),
            (33, &[(5, 5), (10, 10), (9, 9), (2, 2), (3, 3), (2, 2), (5, 5)], &[(36, 36)]),
            (93, &[(5, 5), (10, 10), (9, 9), (2, 2), (3, 3), (2, 2), (5, 5)], &[(36, 36)]),
            (8, &[], &[(2, 4)]),
            (9, &[], &[(2, 4)]),
        ];
        for &(pow2, left, right) in cases {
            let exact = bigint_le(pow2, left, right).unwrap();
            assert_eq!(log_sum_le(pow2, left, right, true), (exact, BoundMethod::BigInt));
            assert_eq!(log_sum_le(pow2, left, right, false).0, exact);
        }
    }

    #[test]
    fn exact_equality_in_the_band_falls_back_to_bigint() {
        let w = 50_021u128;
        assert_eq!(log_sum_le(0, &[(w, w)], &[(w, w)], false), (true, BoundMethod::BigInt));
    }

    #[test]
    fn equal_terms_cancel_before_bigint() {
        let w = 1_000_000u128;
        assert_eq!(log_sum_le(0, &[(w, w)], &[(w, w)], false), (true, BoundMethod::BigInt));
        assert_eq!(log_sum_le(1, &[(w, w)], &[(w, w)], false), (false, BoundMethod::CertifiedFloat));
        // 2^3 · 3^2 = 72 ≤ 2^2 · 3^2 · 2 = 72
        assert!(log_sum_le(3, &[(3, 2)], &[(2, 3), (3, 2)], false).0);
        assert!(!log_sum_le(4, &[(3, 2)], &[(2, 3), (3, 2)], false).0);
    }

    #[test]
    fn xlog2x_treats_zero_and_one_as_zero() {
        assert_eq!(xlog2x(0), 0.0);
        assert_eq!(xlog2x(1), 0.0);
        assert_eq!(xlog2x(8), 24.0);
    }
}
