//! Text encodings for exact scalars.
//!
//! Integers render as plain decimal strings and rationals as `p/q` (or just
//! `p` when the denominator is one). JSON output uses the same strings so no
//! value ever passes through a float.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::{ExactInt, ExactRational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseRationalError {
    #[error("invalid integer {0:?}")]
    Integer(String),
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
}

pub fn parse_int(s: &str) -> Result<ExactInt, ParseRationalError> {
    BigInt::from_str(s.trim()).map_err(|_| ParseRationalError::Integer(s.to_string()))
}

/// Parses `p`, `p/q` or `-p/q`.
pub fn parse_rational(s: &str) -> Result<ExactRational, ParseRationalError> {
    match s.split_once('/') {
        None => Ok(BigRational::from_integer(parse_int(s)?)),
        Some((num, den)) => {
            let num = parse_int(num)?;
            let den = parse_int(den)?;
            if den.is_zero() {
                return Err(ParseRationalError::ZeroDenominator(s.to_string()));
            }
            Ok(BigRational::new(num, den))
        }
    }
}

pub fn format_rational(q: &ExactRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn int(v: i64) -> ExactRational {
    BigRational::from_integer(BigInt::from(v))
}

/// `base^exp` for a possibly negative exponent. Panics on `0^negative`.
pub fn pow_i(base: &ExactRational, exp: i64) -> ExactRational {
    if exp >= 0 {
        num_traits::pow(base.clone(), exp as usize)
    } else {
        assert!(!base.is_zero(), "zero raised to a negative power");
        num_traits::pow(base.recip(), exp.unsigned_abs() as usize)
    }
}

/// Serde adapter: `BigInt` as a decimal string.
pub mod int_string {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        parse_int(&s).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter: `BigRational` as `p/q`.
pub mod rational_string {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter: `Vec<BigRational>` as a list of `p/q` strings.
pub mod rational_vec_string {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(format_rational))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigRational>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|s| parse_rational(s).map_err(serde::de::Error::custom))
            .collect()
    }
}
