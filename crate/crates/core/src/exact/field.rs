use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

use super::qi::QI;
use super::ratfunc::RatFunc;

/// Scalars usable by the generic matrix layer.
pub trait Field:
    Clone
    + PartialEq
    + Debug
    + Display
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn conj(&self) -> Self;
    fn from_qi(q: &QI) -> Self;

    fn from_int(n: i64) -> Self {
        Self::from_qi(&QI::int(n))
    }

    fn is_one(&self) -> bool {
        *self == Self::one()
    }
}

impl Field for QI {
    fn zero() -> Self {
        QI::zero()
    }
    fn one() -> Self {
        QI::one()
    }
    fn is_zero(&self) -> bool {
        QI::is_zero(self)
    }
    fn conj(&self) -> Self {
        QI::conj(self)
    }
    fn from_qi(q: &QI) -> Self {
        q.clone()
    }
}

impl Field for RatFunc {
    fn zero() -> Self {
        RatFunc::zero()
    }
    fn one() -> Self {
        RatFunc::one()
    }
    fn is_zero(&self) -> bool {
        RatFunc::is_zero(self)
    }
    fn conj(&self) -> Self {
        RatFunc::conj(self)
    }
    fn from_qi(q: &QI) -> Self {
        RatFunc::constant(q.clone())
    }
}

/// Floating complex numbers; only products and exponentials are used on this backend.
impl Field for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn from_qi(q: &QI) -> Self {
        let (re, im) = q.to_f64_pair();
        Complex64::new(re, im)
    }
}
