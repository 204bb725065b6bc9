//! Exact rational and parametric linear algebra.
//!
//! Everything downstream (Jordan realization, the D-family solver, the
//! classifier and the integrability builder) computes on the types defined
//! here. No floating point is involved: scalars are [`Rational`]s backed by
//! arbitrary-precision integers, and rank/kernel/solve use fraction-free
//! (Bareiss) elimination over the integers.

mod elim;
mod linform;
mod matrix;
mod param;

use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

pub use linform::LinForm;
pub use matrix::RatMatrix;
pub use param::{Assignment, ParamMatrix};

/// Arbitrary-precision exact scalar. Always stored reduced with a positive
/// denominator.
pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("shape mismatch in {op}: left is {left_rows}x{left_cols}, right is {right_rows}x{right_cols}")]
    Shape {
        op: &'static str,
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },
    #[error("ragged matrix: row {row} has {found} entries, expected {expected}")]
    Ragged {
        row: usize,
        found: usize,
        expected: usize,
    },
    #[error("unknown parameter `{0}`")]
    UnknownParameter(String),
    #[error("parameter `{0}` has no value")]
    UnassignedParameter(String),
    #[error("parameter list does not match the parameters used by the entries")]
    ParameterMismatch,
    #[error("invalid rational `{0}` (expected \"p\" or \"p/q\")")]
    ParseRational(String),
    #[error("matrix is singular")]
    Singular,
}

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `n/d` reduced. Panics if `d == 0`.
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Parses `"p"` or `"p/q"` (optional sign on `p`, `q != 0`).
pub fn parse_rational(text: &str) -> Result<Rational, ExactError> {
    let trimmed = text.trim();
    let err = || ExactError::ParseRational(text.to_string());
    if trimmed.is_empty() {
        return Err(err());
    }
    match trimmed.split_once('/') {
        None => BigInt::from_str(trimmed)
            .map(Rational::from_integer)
            .map_err(|_| err()),
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| err())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| err())?;
            if d.is_zero() {
                return Err(err());
            }
            Ok(Rational::new(n, d))
        }
    }
}

/// Canonical text form: `"p"` for integers, `"p/q"` otherwise.
pub fn format_rational(value: &Rational) -> String {
    value.to_string()
}

pub fn rational_to_f64(value: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    value.to_f64().unwrap_or(f64::NAN)
}

/// Serde adapter serializing a [`Rational`] as its canonical string.
pub mod serde_rational {
    use serde::{Deserialize, Deserializer, Serializer};

    use super::Rational;

    pub fn serialize<S: Serializer>(value: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::format_rational(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        super::parse_rational(&text).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for a list of rationals (column vectors, linear integrals).
pub mod serde_rational_vec {
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};

    use super::Rational;

    pub fn serialize<S: Serializer>(values: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(values.len()))?;
        for v in values {
            seq.serialize_element(&super::format_rational(v))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let texts = Vec::<String>::deserialize(d)?;
        texts
            .iter()
            .map(|t| super::parse_rational(t).map_err(serde::de::Error::custom))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_integers_and_fractions() {
        assert_eq!(parse_rational("3/2").unwrap(), ratio(3, 2));
        assert_eq!(parse_rational("-4").unwrap(), rat(-4));
        assert_eq!(parse_rational(" 6/-4 ").unwrap(), ratio(-3, 2));
        assert_eq!(format_rational(&ratio(6, 4)), "3/2");
        assert_eq!(format_rational(&rat(-7)), "-7");
    }

    #[test]
    fn rejects_malformed_rationals() {
        for bad in ["", "1/0", "x", "1.5", "1/2/3", "/3"] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn arithmetic_is_exact() {
        let a = ratio(1, 3);
        let b = ratio(2, 7);
        assert_eq!((&a + &b) - &b, a);
        assert_eq!(ratio(2, 4).denom(), &BigInt::from(2));
    }
}
