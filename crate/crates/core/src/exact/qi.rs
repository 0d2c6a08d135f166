use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// A Gaussian rational `re + im·i`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct QI {
    pub re: BigRational,
    pub im: BigRational,
}

impl QI {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        QI { re, im }
    }

    pub fn zero() -> Self {
        QI::new(BigRational::zero(), BigRational::zero())
    }

    pub fn one() -> Self {
        QI::int(1)
    }

    pub fn i() -> Self {
        QI::new(BigRational::zero(), BigRational::one())
    }

    pub fn int(n: i64) -> Self {
        QI::new(BigRational::from_integer(BigInt::from(n)), BigRational::zero())
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        QI::new(BigRational::new(n.into(), d.into()), BigRational::zero())
    }

    pub fn from_rational(r: BigRational) -> Self {
        QI::new(r, BigRational::zero())
    }

    pub fn gaussian(re: i64, im: i64) -> Self {
        QI::new(
            BigRational::from_integer(re.into()),
            BigRational::from_integer(im.into()),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        QI::new(self.re.clone(), -self.im.clone())
    }

    /// `|z|²`, always rational.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Self {
        assert!(!self.is_zero(), "division by zero in QI");
        let n = self.norm_sqr();
        QI::new(&self.re / &n, -&self.im / &n)
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = QI::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Powers of `i` with integer exponent.
    pub fn i_pow(e: i64) -> Self {
        match e.rem_euclid(4) {
            0 => QI::int(1),
            1 => QI::i(),
            2 => QI::int(-1),
            _ => -QI::i(),
        }
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }

    /// Least common multiple of the denominators of both parts.
    pub fn denom_lcm(&self) -> BigInt {
        use num_integer::Integer;
        self.re.denom().lcm(self.im.denom())
    }

    /// Total order used only for deterministic tie breaking.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.re.cmp(&other.re).then_with(|| self.im.cmp(&other.im))
    }
}

impl Default for QI {
    fn default() -> Self {
        QI::zero()
    }
}

fn fmt_rat(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for QI {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let im_part = |r: &BigRational| -> String {
            if r.is_one() {
                "i".to_string()
            } else if (-r).is_one() {
                "-i".to_string()
            } else {
                format!("{}*i", fmt_rat(r))
            }
        };
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", fmt_rat(&self.re)),
            (true, false) => write!(f, "{}", im_part(&self.im)),
            (false, false) => {
                let im = im_part(&self.im.abs());
                let sign = if self.im.is_negative() { '-' } else { '+' };
                write!(f, "{}{}{}", fmt_rat(&self.re), sign, im)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseQiError(pub String);

impl fmt::Display for ParseQiError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cannot parse Gaussian rational: {}", self.0)
    }
}

impl std::error::Error for ParseQiError {}

impl FromStr for QI {
    type Err = ParseQiError;

    /// Accepts `a/b`, `c/d*i`, `a/b+c/d*i`, `i`, `-i` and similar forms.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t.is_empty() {
            return Err(ParseQiError(s.to_string()));
        }
        let mut acc = QI::zero();
        let mut start = 0;
        let bytes = t.as_bytes();
        let mut idx = 1;
        let mut terms = Vec::new();
        while idx <= bytes.len() {
            if idx == bytes.len() || ((bytes[idx] == b'+' || bytes[idx] == b'-') && bytes[idx - 1] != b'/') {
                terms.push(&t[start..idx]);
                start = idx;
            }
            idx += 1;
        }
        for term in terms {
            let (neg, body) = match term.strip_prefix('-') {
                Some(b) => (true, b),
                None => (false, term.strip_prefix('+').unwrap_or(term)),
            };
            let (is_im, coef) = if let Some(c) = body.strip_suffix("*i") {
                (true, c)
            } else if let Some(c) = body.strip_suffix('i') {
                (true, if c.is_empty() { "1" } else { c })
            } else {
                (false, body)
            };
            let r = BigRational::from_str(coef).map_err(|_| ParseQiError(s.to_string()))?;
            let r = if neg { -r } else { r };
            if is_im {
                acc.im += r;
            } else {
                acc.re += r;
            }
        }
        Ok(acc)
    }
}

impl<'a> Add<&'a QI> for &'a QI {
    type Output = QI;
    fn add(self, o: &QI) -> QI {
        QI::new(&self.re + &o.re, &self.im + &o.im)
    }
}

impl<'a> Sub<&'a QI> for &'a QI {
    type Output = QI;
    fn sub(self, o: &QI) -> QI {
        QI::new(&self.re - &o.re, &self.im - &o.im)
    }
}

impl<'a> Mul<&'a QI> for &'a QI {
    type Output = QI;
    fn mul(self, o: &QI) -> QI {
        QI::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }
}

impl<'a> Div<&'a QI> for &'a QI {
    type Output = QI;
    fn div(self, o: &QI) -> QI {
        self * &o.inv()
    }
}

impl Neg for &QI {
    type Output = QI;
    fn neg(self) -> QI {
        QI::new(-self.re.clone(), -self.im.clone())
    }
}

macro_rules! owned_ops {
    ($t:ty) => {
        impl Add for $t {
            type Output = $t;
            fn add(self, o: $t) -> $t {
                &self + &o
            }
        }
        impl Sub for $t {
            type Output = $t;
            fn sub(self, o: $t) -> $t {
                &self - &o
            }
        }
        impl Mul for $t {
            type Output = $t;
            fn mul(self, o: $t) -> $t {
                &self * &o
            }
        }
        impl Div for $t {
            type Output = $t;
            fn div(self, o: $t) -> $t {
                &self / &o
            }
        }
        impl Neg for $t {
            type Output = $t;
            fn neg(self) -> $t {
                -&self
            }
        }
    };
}
pub(crate) use owned_ops;

owned_ops!(QI);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print_roundtrip() {
        for s in ["0", "3/4", "-i", "2/3-5*i", "1+i", "-7/2*i"] {
            let q: QI = s.parse().unwrap();
            let back: QI = q.to_string().parse().unwrap();
            assert_eq!(q, back);
        }
        assert_eq!("1/2+3/4*i".parse::<QI>().unwrap(), QI::new(BigRational::new(1.into(), 2.into()), BigRational::new(3.into(), 4.into())));
    }

    #[test]
    fn field_axioms_on_samples() {
        let a = QI::gaussian(2, -3);
        let b = QI::ratio(5, 7) + QI::i();
        assert_eq!(&(&a + &b) - &b, a);
        assert_eq!(&(&a * &b) / &b, a);
        assert_eq!(a.conj().conj(), a);
        assert_eq!(QI::ratio(3, 8).conj(), QI::ratio(3, 8));
        assert_eq!(QI::i_pow(-1), -QI::i());
    }
}
