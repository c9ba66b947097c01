//! Integer Laurent polynomials, used as Alexander polynomial carriers.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// `Σ coeffs[i] · t^(offset + i)` with no trailing or leading zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    offset: i64,
    coeffs: Vec<BigInt>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly { offset: 0, coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        LaurentPoly { offset: 0, coeffs: vec![BigInt::one()] }
    }

    /// Builds a polynomial from `(exponent, coefficient)` terms; repeated exponents add up.
    pub fn from_terms(terms: impl IntoIterator<Item = (i64, i64)>) -> Self {
        let terms: Vec<(i64, i64)> = terms.into_iter().collect();
        let Some(lo) = terms.iter().map(|t| t.0).min() else {
            return Self::zero();
        };
        let hi = terms.iter().map(|t| t.0).max().unwrap();
        let mut coeffs = vec![BigInt::zero(); (hi - lo + 1) as usize];
        for (e, c) in terms {
            coeffs[(e - lo) as usize] += c;
        }
        let mut p = LaurentPoly { offset: lo, coeffs };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead == self.coeffs.len() {
            self.coeffs.clear();
            self.offset = 0;
            return;
        }
        self.coeffs.drain(..lead);
        self.offset += lead as i64;
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn min_exponent(&self) -> i64 {
        self.offset
    }

    pub fn max_exponent(&self) -> i64 {
        self.offset + self.coeffs.len() as i64 - 1
    }

    /// Difference between the highest and lowest exponent.
    pub fn span(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coefficient(&self, exponent: i64) -> BigInt {
        let i = exponent - self.offset;
        if i < 0 || i as usize >= self.coeffs.len() {
            BigInt::zero()
        } else {
            self.coeffs[i as usize].clone()
        }
    }

    /// Iterates the nonzero terms in ascending exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigInt)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, c)| (self.offset + i as i64, c))
    }

    pub fn mul(&self, other: &LaurentPoly) -> LaurentPoly {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        let mut p = LaurentPoly { offset: self.offset + other.offset, coeffs };
        p.trim();
        p
    }

    /// `p(t) ↦ p(t^k)` for `k ≥ 1`.
    pub fn substitute_power(&self, k: u32) -> LaurentPoly {
        assert!(k >= 1);
        if self.is_zero() {
            return Self::zero();
        }
        let k = k as usize;
        let mut coeffs = vec![BigInt::zero(); (self.coeffs.len() - 1) * k + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i * k] = c.clone();
        }
        LaurentPoly { offset: self.offset * k as i64, coeffs }
    }

    /// Shifts so the lowest exponent is 0 and makes the lowest coefficient positive.
    pub fn normalized(&self) -> LaurentPoly {
        if self.is_zero() {
            return Self::zero();
        }
        let negate = self.coeffs[0].is_negative();
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| if negate { -c } else { c.clone() })
            .collect();
        LaurentPoly { offset: 0, coeffs }
    }

    pub fn is_palindromic(&self) -> bool {
        let n = self.coeffs.len();
        (0..n / 2).all(|i| self.coeffs[i] == self.coeffs[n - 1 - i])
    }

    pub fn eval_i64(&self, t: i64) -> BigInt {
        // Laurent evaluation only makes sense for nonnegative offsets or units.
        assert!(self.offset >= 0 || t.abs() == 1);
        let t = BigInt::from(t);
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * &t + c;
        }
        if self.offset >= 0 {
            acc * num_traits::pow(t, self.offset as usize)
        } else if t == BigInt::from(-1) && self.offset % 2 != 0 {
            -acc
        } else {
            acc
        }
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms().collect::<Vec<_>>().into_iter().rev() {
            let mag = c.abs();
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let show_coeff = !mag.is_one() || e == 0;
            match (show_coeff, e) {
                (true, 0) => write!(f, "{mag}")?,
                (true, 1) => write!(f, "{mag}t")?,
                (true, _) => write!(f, "{mag}t^{e}")?,
                (false, 1) => write!(f, "t")?,
                (false, _) => write!(f, "t^{e}")?,
            }
        }
        Ok(())
    }
}
