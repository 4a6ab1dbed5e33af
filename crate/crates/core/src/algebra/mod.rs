//! Exact arithmetic substrate: rationals, multi-indices, sparse linear solving
//! over the rationals and truncated multivariate power series.

pub mod linear;
pub mod multi_index;
pub mod truncated;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

pub use linear::{solve_linear, LinearEquation, LinearForm, RationalLinearSystem, Solution};
pub use multi_index::{multi_binomial, MultiIndex};
pub use truncated::{SeriesCaps, TruncatedSeries};

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("multi-index {alpha:?} is not dominated by {lambda:?}")]
    NotDominated { lambda: Vec<u32>, alpha: Vec<u32> },
    #[error("multi-index lengths differ ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error("equation {equation} references a key outside the unknown set: {key}")]
    UnknownKey { equation: usize, key: String },
    #[error("inconsistent system: equation {equation} reduces to {residual} = 0")]
    Inconsistent { equation: usize, residual: Rational },
    #[error("series variables differ: {left:?} vs {right:?}")]
    VariableMismatch { left: Vec<String>, right: Vec<String> },
    #[error("series truncations use different total-degree groups")]
    IncompatibleCaps,
    #[error("unknown series variable `{0}`")]
    UnknownVariable(String),
    #[error("product of two unknowns in a linear form")]
    Nonlinear,
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn big(n: impl Into<BigInt>) -> Rational {
    Rational::from_integer(n.into())
}

/// Binomial coefficient, zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

pub fn pow2(exp: i64) -> Rational {
    let p = BigInt::one() << exp.unsigned_abs();
    if exp >= 0 {
        big(p)
    } else {
        Rational::new(BigInt::one(), p)
    }
}

/// Formats a rational as an integer when possible and as `p/q` otherwise.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Inverse of [`format_rational`]; accepts optional surrounding whitespace and
/// a leading `+`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    let s = s.strip_prefix('+').unwrap_or(s);
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            if q.is_zero() {
                return None;
            }
            Some(Rational::new(p, q))
        }
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(binomial(0, 0), BigInt::from(1));
        assert_eq!(binomial(3, 4), BigInt::from(0));
        assert_eq!(factorial(6), BigInt::from(720));
    }

    #[test]
    fn rationals_normalize() {
        let r = Rational::new(BigInt::from(4), BigInt::from(-6));
        assert_eq!(r.numer(), &BigInt::from(-2));
        assert_eq!(r.denom(), &BigInt::from(3));
        assert_eq!(format_rational(&r), "-2/3");
        assert_eq!(parse_rational("-2/3"), Some(r));
        assert_eq!(parse_rational("+17"), Some(int(17)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(pow2(-2), Rational::new(BigInt::from(1), BigInt::from(4)));
    }
}
