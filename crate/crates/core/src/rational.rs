//! Exact rational helpers.
//!
//! Every distance in a finite space is a [`Rational`]; the contraction
//! predicates use strict inequalities, so nothing on the finite path ever
//! touches floating point.

use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serializer};

pub type Rational = num_rational::BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn ratio(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn half() -> Rational {
    ratio(1, 2)
}

/// `base^exp` for a non-negative exponent.
pub fn pow(base: &Rational, exp: u32) -> Rational {
    let mut acc = Rational::one();
    for _ in 0..exp {
        acc *= base;
    }
    acc
}

pub fn midpoint(a: &Rational, b: &Rational) -> Rational {
    (a + b) * half()
}

pub fn to_f64(q: &Rational) -> f64 {
    let (numer, denom) = (q.numer(), q.denom());
    // keep both sides inside the f64 exponent range before dividing
    let excess = numer.bits().max(denom.bits()).saturating_sub(1000);
    let n = (numer >> excess).to_f64().unwrap_or(f64::NAN);
    let d = (denom >> excess).to_f64().unwrap_or(f64::NAN);
    if d == 0.0 {
        // denominator shifted away: the value underflows
        return if numer.is_zero() { 0.0 } else { f64::INFINITY.copysign(n) };
    }
    n / d
}

/// Exact conversion of a finite `f64` into a rational.
pub fn from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal `{0}`")]
pub struct ParseRationalError(pub String);

/// Parses `p/q`, a plain integer, or a finite decimal such as `0.25`.
pub fn parse(text: &str) -> Result<Rational, ParseRationalError> {
    let t = text.trim();
    if t.is_empty() {
        return Err(ParseRationalError(text.to_string()));
    }
    if let Some((whole, frac)) = t.split_once('.') {
        if t.contains('/') || frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(ParseRationalError(text.to_string()));
        }
        let negative = whole.starts_with('-');
        let digits = format!("{}{}", whole.trim_start_matches(['-', '+']), frac);
        let numer = BigInt::from_str(&digits).map_err(|_| ParseRationalError(text.to_string()))?;
        let denom = num_traits::pow(BigInt::from(10), frac.len());
        let q = Rational::new(numer, denom);
        return Ok(if negative { -q } else { q });
    }
    match Rational::from_str(t) {
        Ok(q) => Ok(q),
        Err(_) => Err(ParseRationalError(text.to_string())),
    }
}

pub fn format(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn is_nonnegative(q: &Rational) -> bool {
    !q.is_negative()
}

pub fn is_positive(q: &Rational) -> bool {
    q.is_positive()
}

pub fn is_zero(q: &Rational) -> bool {
    q.is_zero()
}

/// Serde adapter writing rationals as `"p/q"` strings.
pub mod serde_str {
    use super::*;

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse(&text).map_err(serde::de::Error::custom)
    }
}

pub mod serde_str_opt {
    use super::*;

    pub fn serialize<S: Serializer>(q: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        match q {
            Some(q) => s.serialize_some(&format(q)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
        let text = Option::<String>::deserialize(d)?;
        text.map(|t| parse(&t).map_err(serde::de::Error::custom)).transpose()
    }
}

pub mod serde_str_vec {
    use super::*;

    pub fn serialize<S: Serializer>(values: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(values.iter().map(format))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        Vec::<String>::deserialize(d)?.iter().map(|t| parse(t).map_err(serde::de::Error::custom)).collect()
    }
}

pub mod serde_str_table {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(rows: &[Vec<Rational>], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(rows.len()))?;
        for row in rows {
            let cells: Vec<String> = row.iter().map(format).collect();
            seq.serialize_element(&cells)?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<Rational>>, D::Error> {
        let rows = Vec::<Vec<String>>::deserialize(d)?;
        rows.iter().map(|row| row.iter().map(|t| parse(t).map_err(serde::de::Error::custom)).collect()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fraction_integer_and_decimal() {
        assert_eq!(parse("3/6").unwrap(), ratio(1, 2));
        assert_eq!(parse(" 7 ").unwrap(), int(7));
        assert_eq!(parse("0.25").unwrap(), ratio(1, 4));
        assert_eq!(parse("-1.5").unwrap(), ratio(-3, 2));
        assert!(parse("1/0").is_err());
        assert!(parse("abc").is_err());
        assert!(parse("").is_err());
        assert!(parse("1.").is_err());
    }

    #[test]
    fn format_is_canonical() {
        assert_eq!(format(&ratio(4, 8)), "1/2");
        assert_eq!(format(&int(5)), "5");
    }

    #[test]
    fn f64_conversion_handles_large_denominators() {
        let tiny = pow(&ratio(1, 4), 600);
        assert_eq!(to_f64(&tiny), 0.0);
        assert!((to_f64(&ratio(1, 3)) - 1.0 / 3.0).abs() < 1e-16);
        assert_eq!(from_f64(0.25).unwrap(), ratio(1, 4));
    }
}
