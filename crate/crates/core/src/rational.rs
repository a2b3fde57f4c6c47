//! Exact rationals and their `"p/q"` text form.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::str::FromStr;

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn int(p: i64) -> Rational {
    Rational::from_integer(BigInt::from(p))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Parses `"p/q"`, `"p"` or a finite decimal such as `"0.125"`, exactly.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::input(format!("not a rational: {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
        let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
        if q.is_zero() {
            return Err(Error::input(format!("zero denominator in {s:?}")));
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = whole.trim_start().starts_with('-');
        let whole = if whole.is_empty() || whole == "-" || whole == "+" {
            BigInt::zero()
        } else {
            BigInt::from_str(whole).map_err(|_| bad())?
        };
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let frac = Rational::new(BigInt::from_str(frac).map_err(|_| bad())?, scale);
        let whole = Rational::from_integer(whole.abs());
        let magnitude = whole + frac;
        return Ok(if negative { -magnitude } else { magnitude });
    }
    Ok(Rational::from_integer(
        BigInt::from_str(s).map_err(|_| bad())?,
    ))
}

/// Canonical text form: reduced `"p/q"`, always with a denominator.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn parse_list(s: &str) -> Result<Vec<Rational>> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(parse_rational)
        .collect()
}

/// Serde adapter storing a rational as its canonical string.
pub mod as_string {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for a vector of rationals stored as strings.
pub mod vec_as_string {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(format_rational))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Vec<Rational>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| parse_rational(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_forms() {
        assert_eq!(parse_rational("1/4").unwrap(), ratio(1, 4));
        assert_eq!(parse_rational("2/8").unwrap(), ratio(1, 4));
        assert_eq!(parse_rational("3").unwrap(), int(3));
        assert_eq!(parse_rational("0.125").unwrap(), ratio(1, 8));
        assert_eq!(parse_rational("-1.5").unwrap(), ratio(-3, 2));
        assert_eq!(parse_rational("-0.5").unwrap(), ratio(-1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert!(parse_rational("1.").is_err());
    }

    #[test]
    fn formats_canonically() {
        assert_eq!(format_rational(&ratio(2, 8)), "1/4");
        assert_eq!(format_rational(&int(1)), "1/1");
        assert_eq!(format_rational(&zero()), "0/1");
    }
}
