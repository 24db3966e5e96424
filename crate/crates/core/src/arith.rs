//! Exact rationals and the extended line `Q ∪ {∞}`.

use crate::error::{degenerate, invalid, Result};
use num::{BigInt, BigRational, One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::str::FromStr;

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Formats a rational as `p/q`, or `p` when the denominator is one.
pub fn fmt_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let parsed = match s.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim());
            let d = BigInt::from_str(d.trim());
            match (n, d) {
                (Ok(n), Ok(d)) if !d.is_zero() => Some(Q::new(n, d)),
                _ => None,
            }
        }
        None => BigInt::from_str(s).ok().map(Q::from_integer),
    };
    match parsed {
        Some(x) => Ok(x),
        None => invalid(format!("not a rational: {s:?}")),
    }
}

/// A point of the projective line in its affine chart: a rational or the single point `∞`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ExtRational {
    Finite(Q),
    Infinity,
}

impl ExtRational {
    pub fn int(n: i64) -> Self {
        ExtRational::Finite(qi(n))
    }

    pub fn frac(n: i64, d: i64) -> Self {
        ExtRational::Finite(q(n, d))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtRational::Infinity)
    }

    pub fn finite(&self) -> Option<&Q> {
        match self {
            ExtRational::Finite(x) => Some(x),
            ExtRational::Infinity => None,
        }
    }

    /// Builds `num/den`, mapping `x/0` to `∞` and rejecting `0/0`.
    pub fn from_ratio(num: BigInt, den: BigInt) -> Result<Self> {
        match (num.is_zero(), den.is_zero()) {
            (true, true) => degenerate("0/0 in ratio"),
            (false, true) => Ok(ExtRational::Infinity),
            _ => Ok(ExtRational::Finite(Q::new(num, den))),
        }
    }

    /// Homogeneous coordinates `(x : 1)` or `(1 : 0)`.
    pub fn homogeneous(&self) -> [Q; 2] {
        match self {
            ExtRational::Finite(x) => [x.clone(), Q::one()],
            ExtRational::Infinity => [Q::one(), Q::zero()],
        }
    }

    pub fn neg(&self) -> Self {
        match self {
            ExtRational::Finite(x) => ExtRational::Finite(-x),
            ExtRational::Infinity => ExtRational::Infinity,
        }
    }

    pub fn recip(&self) -> Self {
        match self {
            ExtRational::Finite(x) if x.is_zero() => ExtRational::Infinity,
            ExtRational::Finite(x) => ExtRational::Finite(x.recip()),
            ExtRational::Infinity => ExtRational::Finite(Q::zero()),
        }
    }
}

impl From<Q> for ExtRational {
    fn from(x: Q) -> Self {
        ExtRational::Finite(x)
    }
}

impl fmt::Display for ExtRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtRational::Finite(x) => write!(f, "{}", fmt_q(x)),
            ExtRational::Infinity => write!(f, "inf"),
        }
    }
}

impl FromStr for ExtRational {
    type Err = crate::error::Error;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") || t == "∞" {
            Ok(ExtRational::Infinity)
        } else {
            parse_q(t).map(ExtRational::Finite)
        }
    }
}

impl Serialize for ExtRational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ExtRational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Serde adapter storing a rational as a `"p/q"` string.
pub mod q_string {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_q(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Q, D::Error> {
        let s = String::deserialize(d)?;
        parse_q(&s).map_err(serde::de::Error::custom)
    }
}

/// Greatest common divisor of a slice, always non-negative.
pub fn gcd_all(xs: &[BigInt]) -> BigInt {
    use num::Integer;
    xs.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
}

pub fn gcd_i64(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Scales an integer vector so its entries are coprime and its first nonzero entry is positive.
pub fn primitive(v: &mut [BigInt]) {
    let g = gcd_all(v);
    if g.is_zero() {
        return;
    }
    let flip = v.iter().find(|x| !x.is_zero()).map(|x| x.is_negative()).unwrap_or(false);
    for x in v.iter_mut() {
        *x = &*x / &g;
        if flip {
            *x = -&*x;
        }
    }
}

/// Multiplies a rational vector by the lcm of its denominators.
pub fn clear_denominators(v: &[Q]) -> Vec<BigInt> {
    use num::Integer;
    let l = v.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
    v.iter().map(|x| (x * Q::from_integer(l.clone())).to_integer()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["3/4", "-7", "0", "inf", "-12/5"] {
            let x: ExtRational = s.parse().unwrap();
            assert_eq!(x.to_string(), s);
        }
        assert_eq!("6/8".parse::<ExtRational>().unwrap().to_string(), "3/4");
        assert!("1/0".parse::<ExtRational>().is_err());
        assert!("abc".parse::<ExtRational>().is_err());
    }

    #[test]
    fn ratio_conventions() {
        assert_eq!(ExtRational::from_ratio(3.into(), 0.into()).unwrap(), ExtRational::Infinity);
        assert!(ExtRational::from_ratio(0.into(), 0.into()).is_err());
        assert_eq!(ExtRational::int(0).recip(), ExtRational::Infinity);
    }

    #[test]
    fn primitive_normalizes_sign_and_content() {
        let mut v: Vec<BigInt> = [0, -4, 6, 2].iter().map(|&x| BigInt::from(x)).collect();
        primitive(&mut v);
        let want: Vec<BigInt> = [0, 2, -3, -1].iter().map(|&x| BigInt::from(x)).collect();
        assert_eq!(v, want);
    }
}
