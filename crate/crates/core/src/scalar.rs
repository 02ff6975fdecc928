//! Exact ordered-field scalars.
//!
//! Every coordinate in this crate is an exact rational. The algorithms are
//! written against [`Scalar`] so the integer width can be chosen per use:
//! [`BigRational`](num_rational::BigRational) never overflows and is the
//! default, while `Ratio<i64>`/`Ratio<i128>` are faster for small inputs.
//! Floating point types are deliberately not `Scalar`: equality tests such
//! as `f == t ∘ s` must be decidable.

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{FromPrimitive, Signed, ToPrimitive};

/// An exact ordered field element.
pub trait Scalar:
    Clone + Ord + Hash + Debug + Display + Signed + Send + Sync + 'static
{
    /// `num / den`, reduced. Panics when `den == 0`.
    fn frac(num: i64, den: i64) -> Self;

    /// Numerator and (positive) denominator of the reduced form, as decimal strings.
    fn parts(&self) -> (String, String);

    /// Parses `n/d` or `n`. Returns `None` for malformed input or a zero denominator.
    fn parse_frac(s: &str) -> Option<Self>;

    /// Nearest `f64`, for rendering only.
    fn approx(&self) -> f64;

    fn int(n: i64) -> Self {
        Self::frac(n, 1)
    }

    fn half(&self) -> Self {
        self.clone() / Self::int(2)
    }

    /// Midpoint of `a` and `b`.
    fn mid(a: &Self, b: &Self) -> Self {
        (a.clone() + b.clone()) / Self::int(2)
    }

    /// `n/d` text form with an explicit denominator (`1/1`, `-3/4`).
    fn to_frac_string(&self) -> String {
        let (n, d) = self.parts();
        format!("{n}/{d}")
    }
}

impl<I> Scalar for Ratio<I>
where
    I: Integer
        + Signed
        + Clone
        + Hash
        + Debug
        + Display
        + FromStr
        + FromPrimitive
        + ToPrimitive
        + Send
        + Sync
        + 'static,
{
    fn frac(num: i64, den: i64) -> Self {
        let n = I::from_i64(num).expect("numerator fits");
        let d = I::from_i64(den).expect("denominator fits");
        Ratio::new(n, d)
    }

    fn parts(&self) -> (String, String) {
        (self.numer().to_string(), self.denom().to_string())
    }

    fn parse_frac(s: &str) -> Option<Self> {
        let s = s.trim();
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let n = I::from_str(n).ok()?;
        let d = I::from_str(d).ok()?;
        if d.is_zero() {
            return None;
        }
        Some(Ratio::new(n, d))
    }

    fn approx(&self) -> f64 {
        let n = self.numer().to_f64().unwrap_or(f64::NAN);
        let d = self.denom().to_f64().unwrap_or(f64::NAN);
        if n.is_finite() && d.is_finite() {
            return n / d;
        }
        // Huge numerators and denominators: scale both down by their shared magnitude.
        let ns = self.numer().to_string();
        let ds = self.denom().to_string();
        let digits = ns.trim_start_matches('-').len().max(ds.len()).saturating_sub(300);
        let cut = |s: &str| -> f64 {
            let neg = s.starts_with('-');
            let body = s.trim_start_matches('-');
            let keep = body.len().saturating_sub(digits);
            let v: f64 = if keep == 0 { 0.0 } else { body[..keep].parse().unwrap_or(0.0) };
            if neg {
                -v
            } else {
                v
            }
        };
        cut(&ns) / cut(&ds)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::{BigRational, Rational64};

    #[test]
    fn frac_is_reduced() {
        let q = BigRational::frac(6, -8);
        assert_eq!(q.parts(), ("-3".to_string(), "4".to_string()));
        assert_eq!(q.to_frac_string(), "-3/4");
        assert_eq!(BigRational::int(1).to_frac_string(), "1/1");
    }

    #[test]
    fn parse_rejects_zero_denominator() {
        assert!(BigRational::parse_frac("1/0").is_none());
        assert!(BigRational::parse_frac("x/2").is_none());
        assert_eq!(BigRational::parse_frac(" 2/4 "), Some(BigRational::frac(1, 2)));
        assert_eq!(Rational64::parse_frac("-5"), Some(Rational64::int(-5)));
    }

    #[test]
    fn approx_handles_large_values() {
        let q = BigRational::parse_frac(&format!("{}/{}", "3".repeat(400), "1".repeat(400))).unwrap();
        assert!((q.approx() - 3.0).abs() < 1e-9);
        assert_eq!(Rational64::frac(1, 4).approx(), 0.25);
    }
}
