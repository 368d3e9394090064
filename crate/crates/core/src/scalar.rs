//! Numeric traits the rest of the crate is generic over.
//!
//! Tree weights are unsigned machine integers ([`Weight`]); probabilities are
//! exact rationals ([`Probability`]). Floating point never enters a signature.

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedMul, One, PrimInt, ToPrimitive, Unsigned, Zero};

/// Natural-number weights on tree nodes.
pub trait Weight: PrimInt + Unsigned + Hash + Debug + Display + Send + Sync + 'static {
    /// Widening conversion used by every summation in the tree checks.
    fn widen(self) -> u128 {
        self.to_u128().expect("unsigned weight fits in u128")
    }

    fn to_biguint(self) -> BigUint {
        BigUint::from(self.widen())
    }
}

impl<T> Weight for T where T: PrimInt + Unsigned + Hash + Debug + Display + Send + Sync + 'static {}

/// Exact probability values carried by distribution observations.
///
/// Implementations must be canonical: equal values compare equal and encode to
/// identical bytes.
pub trait Probability:
    Clone + Ord + Hash + Debug + Display + Zero + One + Send + Sync + 'static
{
    /// Builds `num/den`; `None` when `den == 0` or the value does not fit.
    fn from_parts(num: u64, den: u64) -> Option<Self>;

    /// Parses `"num/den"` or a bare integer.
    fn parse(text: &str) -> Option<Self>;

    fn checked_sum(&self, other: &Self) -> Option<Self>;

    /// Halves the value; used by the generator to split mass.
    fn halve(&self) -> Self;

    /// Appends a canonical, self-delimiting byte encoding.
    fn encode(&self, out: &mut Vec<u8>);

    /// Renders as `"num/den"` with a positive denominator.
    fn to_fraction_string(&self) -> String;

    fn to_f64(&self) -> f64;
}

/// Integer types usable as the numerator/denominator type of a [`Ratio`].
pub trait RatioInt:
    Integer + Clone + CheckedAdd + CheckedMul + Hash + Debug + Display + FromStr + ToPrimitive + Send + Sync + 'static
{
    fn from_u64(v: u64) -> Option<Self>;
    fn two() -> Self {
        Self::one() + Self::one()
    }
}

impl RatioInt for i64 {
    fn from_u64(v: u64) -> Option<Self> {
        i64::try_from(v).ok()
    }
}

impl RatioInt for i128 {
    fn from_u64(v: u64) -> Option<Self> {
        Some(v as i128)
    }
}

impl RatioInt for BigInt {
    fn from_u64(v: u64) -> Option<Self> {
        Some(BigInt::from(v))
    }
}

impl<T: RatioInt> Probability for Ratio<T> {
    fn from_parts(num: u64, den: u64) -> Option<Self> {
        if den == 0 {
            return None;
        }
        Some(Ratio::new(T::from_u64(num)?, T::from_u64(den)?))
    }

    fn parse(text: &str) -> Option<Self> {
        let text = text.trim();
        let (num, den) = match text.split_once('/') {
            Some((n, d)) => (n.trim().parse::<T>().ok()?, d.trim().parse::<T>().ok()?),
            None => (text.parse::<T>().ok()?, T::one()),
        };
        if den.is_zero() {
            return None;
        }
        Some(Ratio::new(num, den))
    }

    fn checked_sum(&self, other: &Self) -> Option<Self> {
        CheckedAdd::checked_add(self, other)
    }

    fn halve(&self) -> Self {
        self / Ratio::from_integer(T::two())
    }

    fn encode(&self, out: &mut Vec<u8>) {
        let text = self.to_fraction_string();
        out.extend_from_slice(&(text.len() as u32).to_be_bytes());
        out.extend_from_slice(text.as_bytes());
    }

    fn to_fraction_string(&self) -> String {
        format!("{}/{}", self.numer(), self.denom())
    }

    fn to_f64(&self) -> f64 {
        match (self.numer().to_f64(), self.denom().to_f64()) {
            (Some(n), Some(d)) => n / d,
            _ => f64::NAN,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    #[test]
    fn parse_reduces_and_rejects_zero_denominator() {
        let half = <Ratio<i64> as Probability>::parse("2/4").unwrap();
        assert_eq!(half.to_fraction_string(), "1/2");
        assert!(<Ratio<i64> as Probability>::parse("1/0").is_none());
        assert_eq!(<BigRational as Probability>::parse("3").unwrap().to_fraction_string(), "3/1");
    }

    #[test]
    fn checked_sum_detects_overflow() {
        let big = Ratio::new(i64::MAX, 1);
        assert!(big.checked_sum(&Ratio::new(1, 1)).is_none());
    }

    #[test]
    fn encoding_is_canonical() {
        let a = <BigRational as Probability>::parse("6/8").unwrap();
        let b = <BigRational as Probability>::parse("3/4").unwrap();
        let (mut ea, mut eb) = (Vec::new(), Vec::new());
        a.encode(&mut ea);
        b.encode(&mut eb);
        assert_eq!(ea, eb);
    }
}
