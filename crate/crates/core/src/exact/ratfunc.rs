use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use super::poly::{Poly, Var};
use super::qi::QI;

/// Quotient of polynomials in lowest terms with normalized denominator.
#[derive(Clone, Debug, Eq, Hash)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub fn from_parts(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return RatFunc::zero();
        }
        if let Some(c) = den.as_constant() {
            return RatFunc { num: num.scale(&c.inv()), den: Poly::one() };
        }
        let g = Poly::gcd(&num, &den);
        let (n, d) = if g.is_constant() {
            (num, den)
        } else {
            (num.div_exact(&g).unwrap(), den.div_exact(&g).unwrap())
        };
        let lc = d.leading_coeff().inv();
        RatFunc { num: n.scale(&lc), den: d.scale(&lc) }
    }

    pub fn zero() -> Self {
        RatFunc { num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> Self {
        RatFunc::constant(QI::one())
    }

    pub fn constant(c: QI) -> Self {
        RatFunc { num: Poly::constant(c), den: Poly::one() }
    }

    pub fn int(n: i64) -> Self {
        RatFunc::constant(QI::int(n))
    }

    pub fn var(v: Var) -> Self {
        RatFunc { num: Poly::var(v), den: Poly::one() }
    }

    pub fn omega() -> Self {
        RatFunc::var(Var::Omega)
    }

    pub fn poly(p: Poly) -> Self {
        RatFunc { num: p, den: Poly::one() }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    pub fn as_constant(&self) -> Option<QI> {
        if self.den.is_constant() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn as_poly(&self) -> Option<Poly> {
        if self.den.is_constant() {
            Some(self.num.clone())
        } else {
            None
        }
    }

    pub fn conj(&self) -> Self {
        RatFunc::from_parts(self.num.conj(), self.den.conj())
    }

    pub fn inv(&self) -> Self {
        assert!(!self.is_zero(), "division by zero in RatFunc");
        RatFunc::from_parts(self.den.clone(), self.num.clone())
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = RatFunc::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn vars(&self) -> std::collections::BTreeSet<Var> {
        let mut s = self.num.vars();
        s.extend(self.den.vars());
        s
    }

    pub fn involves(&self, pred: impl Fn(Var) -> bool) -> bool {
        self.vars().into_iter().any(pred)
    }

    /// Substitutes variables by rational functions; unmapped variables stay.
    pub fn substitute(&self, f: &dyn Fn(Var) -> Option<RatFunc>) -> RatFunc {
        let sub = |p: &Poly| -> RatFunc {
            let mut acc = RatFunc::zero();
            for (m, c) in p.terms() {
                let mut t = RatFunc::constant(c.clone());
                for (v, e) in &m.0 {
                    let x = f(*v).unwrap_or_else(|| RatFunc::var(*v));
                    t = &t * &x.pow(*e);
                }
                acc = &acc + &t;
            }
            acc
        };
        let n = sub(&self.num);
        let d = sub(&self.den);
        &n / &d
    }

    /// Evaluates to a Gaussian rational when every variable is assigned.
    pub fn eval_qi(&self, f: &dyn Fn(Var) -> Option<QI>) -> Option<QI> {
        let n = self.num.eval_qi(f)?;
        let d = self.den.eval_qi(f)?;
        if d.is_zero() {
            None
        } else {
            Some(&n / &d)
        }
    }

    pub fn derivative(&self, v: Var) -> RatFunc {
        let dn = self.num.derivative(v);
        let dd = self.den.derivative(v);
        let top = &(&dn * &self.den) - &(&self.num * &dd);
        RatFunc::from_parts(top, &self.den * &self.den)
    }
}

impl PartialEq for RatFunc {
    fn eq(&self, o: &Self) -> bool {
        if self.den == o.den {
            return self.num == o.num;
        }
        &self.num * &o.den == &o.num * &self.den
    }
}

impl<'a> Add<&'a RatFunc> for &'a RatFunc {
    type Output = RatFunc;
    fn add(self, o: &RatFunc) -> RatFunc {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.den == o.den {
            if self.den.is_constant() {
                return RatFunc { num: &self.num + &o.num, den: self.den.clone() };
            }
            return RatFunc::from_parts(&self.num + &o.num, self.den.clone());
        }
        RatFunc::from_parts(
            &(&self.num * &o.den) + &(&o.num * &self.den),
            &self.den * &o.den,
        )
    }
}

impl<'a> Sub<&'a RatFunc> for &'a RatFunc {
    type Output = RatFunc;
    fn sub(self, o: &RatFunc) -> RatFunc {
        self + &(-o)
    }
}

impl<'a> Mul<&'a RatFunc> for &'a RatFunc {
    type Output = RatFunc;
    fn mul(self, o: &RatFunc) -> RatFunc {
        if self.is_zero() || o.is_zero() {
            return RatFunc::zero();
        }
        if self.den.is_constant() && o.den.is_constant() {
            return RatFunc { num: &self.num * &o.num, den: Poly::one() };
        }
        RatFunc::from_parts(&self.num * &o.num, &self.den * &o.den)
    }
}

impl<'a> Div<&'a RatFunc> for &'a RatFunc {
    type Output = RatFunc;
    fn div(self, o: &RatFunc) -> RatFunc {
        assert!(!o.is_zero(), "division by zero in RatFunc");
        if let Some(c) = o.as_constant() {
            let ci = c.inv();
            return RatFunc { num: self.num.scale(&ci), den: self.den.clone() };
        }
        RatFunc::from_parts(&self.num * &o.den, &self.den * &o.num)
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc { num: -&self.num, den: self.den.clone() }
    }
}

super::qi::owned_ops!(RatFunc);

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_constant() {
            return write!(f, "{}", self.num);
        }
        let n = if self.num.num_terms() > 1 { format!("({})", self.num) } else { self.num.to_string() };
        let d = if self.den.num_terms() > 1 { format!("({})", self.den) } else { self.den.to_string() };
        write!(f, "{n}/{d}")
    }
}

impl From<QI> for RatFunc {
    fn from(q: QI) -> Self {
        RatFunc::constant(q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduces_to_lowest_terms() {
        let w = RatFunc::omega();
        let wb = RatFunc::var(Var::OmegaBar);
        let a = &(&w - &wb) / &(&w - &wb);
        assert_eq!(a, RatFunc::one());
        assert!(a.as_constant().is_some());
        let b = &(&w * &w) / &w;
        assert_eq!(b.as_poly(), Some(Poly::var(Var::Omega)));
    }

    #[test]
    fn sums_cancel() {
        let w = RatFunc::omega();
        let x = &RatFunc::one() / &(&w + &RatFunc::int(1));
        let y = &(&x + &w) - &w;
        assert_eq!(y, x);
        let c = &w.conj().conj() - &w;
        assert!(c.is_zero());
    }
}
