use std::fmt::Debug;
use std::ops::Neg;

use num_traits::{Num, ToPrimitive};

use crate::Rational;

/// Field element the closed-form and enumeration routines are generic over.
///
/// Implemented for `f32`, `f64` and [`Rational`]; the rational instance makes
/// martingale and identity checks exact.
pub trait Scalar: Num + Neg<Output = Self> + Clone + PartialOrd + Debug + Send + Sync {
    fn from_rational(r: &Rational) -> Self;
    fn from_count(n: u128) -> Self;
    fn as_f64(&self) -> f64;

    fn half() -> Self {
        Self::one() / (Self::one() + Self::one())
    }

    fn abs_val(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }
}

impl Scalar for f64 {
    fn from_rational(r: &Rational) -> Self {
        r.to_f64().unwrap_or(f64::NAN)
    }
    fn from_count(n: u128) -> Self {
        n as f64
    }
    fn as_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for f32 {
    fn from_rational(r: &Rational) -> Self {
        r.to_f64().map(|v| v as f32).unwrap_or(f32::NAN)
    }
    fn from_count(n: u128) -> Self {
        n as f32
    }
    fn as_f64(&self) -> f64 {
        *self as f64
    }
}

impl Scalar for Rational {
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn from_count(n: u128) -> Self {
        Rational::from_integer(n.into())
    }
    fn as_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_is_exact_in_every_instance() {
        assert_eq!(<f64 as Scalar>::half(), 0.5);
        assert_eq!(<f32 as Scalar>::half(), 0.5);
        assert_eq!(
            <Rational as Scalar>::half(),
            Rational::new(1.into(), 2.into())
        );
    }

    #[test]
    fn counts_convert_losslessly_to_rationals() {
        let big = u128::MAX;
        let r = Rational::from_count(big);
        assert_eq!(r.numer().to_string(), big.to_string());
    }
}
