//! Exact rationals: 64-bit fast path, arbitrary width on overflow.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A reduced fraction with positive denominator.
///
/// Values that fit are always kept in the `Small` form, so derived equality
/// and hashing agree with numeric equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Rational {
    Small { num: i64, den: i64 },
    Big(BigRational),
}

impl Rational {
    pub const ZERO: Rational = Rational::Small { num: 0, den: 1 };

    pub fn integer(n: i64) -> Self {
        Rational::Small { num: n, den: 1 }
    }

    /// Builds `num/den`, reducing and normalizing the sign. Panics on a zero denominator.
    pub fn new(num: i128, den: i128) -> Self {
        assert!(den != 0, "zero denominator");
        let g = num.gcd(&den);
        let (mut n, mut d) = (num / g, den / g);
        if d < 0 {
            n = -n;
            d = -d;
        }
        match (i64::try_from(n), i64::try_from(d)) {
            (Ok(num), Ok(den)) => Rational::Small { num, den },
            _ => Rational::Big(BigRational::new(BigInt::from(n), BigInt::from(d))),
        }
    }

    fn from_big(r: BigRational) -> Self {
        match (r.numer().to_i64(), r.denom().to_i64()) {
            (Some(num), Some(den)) => Rational::Small { num, den },
            _ => Rational::Big(r),
        }
    }

    fn to_big(&self) -> BigRational {
        match self {
            Rational::Small { num, den } => {
                BigRational::new_raw(BigInt::from(*num), BigInt::from(*den))
            }
            Rational::Big(r) => r.clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match self {
            Rational::Small { num, .. } => BigInt::from(*num),
            Rational::Big(r) => r.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match self {
            Rational::Small { den, .. } => BigInt::from(*den),
            Rational::Big(r) => r.denom().clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Rational::Small { num: 0, .. })
    }

    pub fn is_integer(&self) -> bool {
        match self {
            Rational::Small { den, .. } => *den == 1,
            Rational::Big(r) => r.is_integer(),
        }
    }

    pub fn abs(&self) -> Self {
        match self {
            Rational::Small { num, den } => Rational::new((*num as i128).abs(), *den as i128),
            Rational::Big(r) => Rational::Big(r.abs()),
        }
    }

    /// `self * k` for an integer `k`.
    pub fn scale(&self, k: i64) -> Self {
        match self {
            Rational::Small { num, den } => Rational::new(*num as i128 * k as i128, *den as i128),
            Rational::Big(r) => Rational::from_big(r * BigRational::from_integer(BigInt::from(k))),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Rational::Small { num, den } => *num as f64 / *den as f64,
            Rational::Big(r) => r.to_f64().unwrap_or(f64::NAN),
        }
    }
}

impl Default for Rational {
    fn default() -> Self {
        Rational::ZERO
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::integer(n)
    }
}

impl Add for &Rational {
    type Output = Rational;

    fn add(self, rhs: &Rational) -> Rational {
        if let (Rational::Small { num: a, den: b }, Rational::Small { num: c, den: d }) = (self, rhs) {
            let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
            // i64 operands keep every product below 2^126.
            return Rational::new(a * d + c * b, b * d);
        }
        Rational::from_big(self.to_big() + rhs.to_big())
    }
}

impl Add for Rational {
    type Output = Rational;

    fn add(self, rhs: Rational) -> Rational {
        &self + &rhs
    }
}

impl Neg for &Rational {
    type Output = Rational;

    fn neg(self) -> Rational {
        match self {
            Rational::Small { num, den } => Rational::new(-(*num as i128), *den as i128),
            Rational::Big(r) => Rational::from_big(-r.clone()),
        }
    }
}

impl Neg for Rational {
    type Output = Rational;

    fn neg(self) -> Rational {
        -&self
    }
}

impl Sub for &Rational {
    type Output = Rational;

    fn sub(self, rhs: &Rational) -> Rational {
        self + &(-rhs)
    }
}

impl Sub for Rational {
    type Output = Rational;

    fn sub(self, rhs: Rational) -> Rational {
        &self - &rhs
    }
}

impl std::iter::Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::ZERO, |acc, x| &acc + &x)
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        if let (Rational::Small { num: a, den: b }, Rational::Small { num: c, den: d }) = (self, other) {
            return (*a as i128 * *d as i128).cmp(&(*c as i128 * *b as i128));
        }
        self.to_big().cmp(&other.to_big())
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Rational {
    /// Integers print bare, everything else as `num/den`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rational::Small { num, den: 1 } => write!(f, "{num}"),
            Rational::Small { num, den } => write!(f, "{num}/{den}"),
            Rational::Big(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Rational::Big(r) => write!(f, "{}/{}", r.numer(), r.denom()),
        }
    }
}

impl Rational {
    /// Always `num/den`, the machine-readable form used in JSON.
    pub fn to_fraction_string(&self) -> String {
        format!("{}/{}", self.numer(), self.denom())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseRationalError(String);

impl fmt::Display for ParseRationalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid rational `{}`", self.0)
    }
}

impl std::error::Error for ParseRationalError {}

impl FromStr for Rational {
    type Err = ParseRationalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseRationalError(s.to_string());
        let (n, d) = match s.trim().split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s.trim(), "1"),
        };
        let n: BigInt = n.parse().map_err(|_| err())?;
        let d: BigInt = d.parse().map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        Ok(Rational::from_big(BigRational::new(n, d)))
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_fraction_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
