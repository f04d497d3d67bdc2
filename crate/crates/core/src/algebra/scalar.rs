use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

/// Field element usable by the dual-path formulas.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// True when arithmetic is exact.
    const EXACT: bool;

    fn from_ratio(num: i64, den: i64) -> Self;

    fn to_f64(&self) -> f64;

    fn from_int(n: i64) -> Self {
        Self::from_ratio(n, 1)
    }

    fn powi(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = acc * self.clone();
        }
        acc
    }

    /// Equality up to `rel_tol` relative to `max(1, |self|, |other|)`;
    /// exact comparison for exact scalars.
    fn approx_eq(&self, other: &Self, rel_tol: f64) -> bool {
        if Self::EXACT {
            return self == other;
        }
        let (x, y) = (self.to_f64(), other.to_f64());
        (x - y).abs() <= rel_tol * x.abs().max(y.abs()).max(1.0)
    }

    fn is_negative(&self) -> bool {
        self.to_f64() < 0.0
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn powi(&self, n: u32) -> Self {
        f64::powi(*self, n as i32)
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or_else(|| {
            // numerator/denominator overflow f64 individually
            let n = self.numer().bits() as i64;
            let d = self.denom().bits() as i64;
            let shift = (n - d).clamp(-1000, 1000);
            let scaled = if shift >= 0 {
                self / BigRational::from_integer(BigInt::one() << shift as usize)
            } else {
                self * BigRational::from_integer(BigInt::one() << (-shift) as usize)
            };
            ToPrimitive::to_f64(&scaled).unwrap_or(f64::NAN) * 2f64.powi(shift as i32)
        })
    }

    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
}

/// `num/den` as an exact rational.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::from_ratio(num, den)
}
