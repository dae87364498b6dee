//! Exact rational quantities for capacities, sizes, and costs.
//!
//! All flow values and cut capacities are exact, so min-cut equalities can be
//! asserted without tolerances. Scenario files carry decimal numbers; a decimal
//! literal converts to a rational without loss.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer, Visitor};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

/// Exact rational, the scalar type for every capacity/size/cost in the crate.
#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rat(Ratio<i64>);

impl Rat {
    pub const fn zero() -> Self {
        Rat(Ratio::new_raw(0, 1))
    }

    pub fn new(numer: i64, denom: i64) -> Self {
        Rat(Ratio::new(numer, denom))
    }

    pub fn int(v: i64) -> Self {
        Rat(Ratio::from_integer(v))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn numer(&self) -> i64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i64 {
        *self.0.denom()
    }

    /// Parses a decimal literal ("12", "-3.5", "1e-3") or a fraction ("7/2").
    pub fn parse(text: &str) -> Result<Self, RatParseError> {
        let text = text.trim();
        if let Some((n, d)) = text.split_once('/') {
            let numer: i64 = n.trim().parse().map_err(|_| RatParseError(text.into()))?;
            let denom: i64 = d.trim().parse().map_err(|_| RatParseError(text.into()))?;
            if denom == 0 {
                return Err(RatParseError(text.into()));
            }
            return Ok(Rat(Ratio::new(numer, denom)));
        }
        parse_decimal(text).ok_or_else(|| RatParseError(text.into()))
    }

    /// Exact conversion from a finite f64 via its shortest decimal form.
    ///
    /// JSON numbers arrive as f64; the shortest round-trip representation
    /// recovers the decimal the file author wrote for any realistic input.
    pub fn from_f64_decimal(v: f64) -> Result<Self, RatParseError> {
        if !v.is_finite() {
            return Err(RatParseError(v.to_string()));
        }
        parse_decimal(&format!("{v}")).ok_or_else(|| RatParseError(v.to_string()))
    }
}

fn parse_decimal(text: &str) -> Option<Rat> {
    let (mantissa, exp) = match text.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (sign, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (-1i64, rest),
        None => (1i64, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((i, f)) => (i, f),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    let mut numer: i64 = 0;
    for c in int_part.chars().chain(frac_part.chars()) {
        let d = c.to_digit(10)? as i64;
        numer = numer.checked_mul(10)?.checked_add(d)?;
    }
    let scale = frac_part.len() as i32 - exp;
    let mut ratio = Ratio::from_integer(sign * numer);
    if scale > 0 {
        ratio /= Ratio::from_integer(10i64.checked_pow(scale as u32)?);
    } else if scale < 0 {
        ratio *= Ratio::from_integer(10i64.checked_pow((-scale) as u32)?);
    }
    Some(Rat(ratio))
}

#[derive(Debug, Clone, thiserror::Error)]
#[error("invalid rational literal: {0:?}")]
pub struct RatParseError(String);

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self.0.denom() == 1 {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Rat {
    type Err = RatParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Rat::parse(s)
    }
}

impl From<i64> for Rat {
    fn from(v: i64) -> Self {
        Rat::int(v)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                Rat(self.0.$method(rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0)
    }
}

impl AddAssign for Rat {
    fn add_assign(&mut self, rhs: Rat) {
        self.0 += rhs.0;
    }
}

impl SubAssign for Rat {
    fn sub_assign(&mut self, rhs: Rat) {
        self.0 -= rhs.0;
    }
}

impl Sum for Rat {
    fn sum<I: Iterator<Item = Rat>>(iter: I) -> Rat {
        iter.fold(Rat::zero(), |a, b| a + b)
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let d = *self.0.denom();
        if d == 1 {
            serializer.serialize_i64(*self.0.numer())
        } else if only_2_5(d) {
            serializer.serialize_f64(self.to_f64())
        } else {
            serializer.serialize_str(&self.to_string())
        }
    }
}

fn only_2_5(mut d: i64) -> bool {
    while d % 2 == 0 {
        d /= 2;
    }
    while d % 5 == 0 {
        d /= 5;
    }
    d == 1
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct RatVisitor;
        impl Visitor<'_> for RatVisitor {
            type Value = Rat;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a decimal number or a \"p/q\" string")
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Rat, E> {
                Ok(Rat::int(v))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Rat, E> {
                i64::try_from(v)
                    .map(Rat::int)
                    .map_err(|_| E::custom("integer out of range"))
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Rat, E> {
                Rat::from_f64_decimal(v).map_err(E::custom)
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Rat, E> {
                Rat::parse(v).map_err(E::custom)
            }
        }
        deserializer.deserialize_any(RatVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_parse_is_exact() {
        assert_eq!(Rat::parse("0.1").unwrap(), Rat::new(1, 10));
        assert_eq!(Rat::parse("-3.25").unwrap(), Rat::new(-13, 4));
        assert_eq!(Rat::parse("1e-3").unwrap(), Rat::new(1, 1000));
        assert_eq!(Rat::parse("7/2").unwrap(), Rat::new(7, 2));
        assert!(Rat::parse("abc").is_err());
        assert!(Rat::parse("1/0").is_err());
    }

    #[test]
    fn f64_decimal_round_trip() {
        for text in ["0.1", "40", "12.5", "0.04", "123.456"] {
            let r = Rat::parse(text).unwrap();
            assert_eq!(Rat::from_f64_decimal(r.to_f64()).unwrap(), r);
        }
    }

    #[test]
    fn json_round_trip() {
        for r in [Rat::int(40), Rat::new(1, 10), Rat::new(1, 3)] {
            let json = serde_json::to_string(&r).unwrap();
            let back: Rat = serde_json::from_str(&json).unwrap();
            assert_eq!(back, r);
        }
    }

    #[test]
    fn ordering_and_arithmetic() {
        let a = Rat::new(1, 3);
        let b = Rat::new(1, 2);
        assert!(a < b);
        assert_eq!(a + b, Rat::new(5, 6));
        assert_eq!(b - a, Rat::new(1, 6));
        assert_eq!(a.min(b), a);
        assert_eq!([a, b].into_iter().sum::<Rat>(), Rat::new(5, 6));
    }
}
