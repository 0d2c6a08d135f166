use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{Signed, Zero};

use super::qi::QI;

/// Symbols that may appear in exact expressions.
///
/// Every variable has a conjugate partner; `H` and `Y` are real.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Var {
    Omega,
    OmegaBar,
    Z(u8),
    ZBar(u8),
    S(u8),
    SBar(u8),
    H(u8),
    Y(u8),
}

impl Var {
    pub fn conj(self) -> Var {
        match self {
            Var::Omega => Var::OmegaBar,
            Var::OmegaBar => Var::Omega,
            Var::Z(j) => Var::ZBar(j),
            Var::ZBar(j) => Var::Z(j),
            Var::S(j) => Var::SBar(j),
            Var::SBar(j) => Var::S(j),
            v => v,
        }
    }

    pub fn is_omega(self) -> bool {
        matches!(self, Var::Omega | Var::OmegaBar)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::Omega => write!(f, "w"),
            Var::OmegaBar => write!(f, "wb"),
            Var::Z(j) => write!(f, "z{}", *j as u32 + 1),
            Var::ZBar(j) => write!(f, "zb{}", *j as u32 + 1),
            Var::S(j) => write!(f, "s{}", *j as u32 + 1),
            Var::SBar(j) => write!(f, "sb{}", *j as u32 + 1),
            Var::H(j) => write!(f, "h{}", *j as u32 + 1),
            Var::Y(j) => write!(f, "y{}", *j as u32 + 1),
        }
    }
}

/// A monomial: variables in increasing order with positive exponents.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Mono(pub Vec<(Var, u32)>);

impl Mono {
    pub fn one() -> Self {
        Mono(Vec::new())
    }

    pub fn var(v: Var, e: u32) -> Self {
        if e == 0 {
            Mono::one()
        } else {
            Mono(vec![(v, e)])
        }
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        self.0.iter().find(|(w, _)| *w == v).map_or(0, |(_, e)| *e)
    }

    pub fn mul(&self, o: &Mono) -> Mono {
        let mut out = Vec::with_capacity(self.0.len() + o.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() || j < o.0.len() {
            if j == o.0.len() || (i < self.0.len() && self.0[i].0 < o.0[j].0) {
                out.push(self.0[i]);
                i += 1;
            } else if i == self.0.len() || o.0[j].0 < self.0[i].0 {
                out.push(o.0[j]);
                j += 1;
            } else {
                out.push((self.0[i].0, self.0[i].1 + o.0[j].1));
                i += 1;
                j += 1;
            }
        }
        Mono(out)
    }

    /// Drops `v` from the monomial, returning the exponent it had.
    pub fn without(&self, v: Var) -> (Mono, u32) {
        let mut e = 0;
        let rest = self
            .0
            .iter()
            .filter(|(w, k)| {
                if *w == v {
                    e = *k;
                    false
                } else {
                    true
                }
            })
            .copied()
            .collect();
        (Mono(rest), e)
    }

    pub fn conj(&self) -> Mono {
        let mut v: Vec<(Var, u32)> = self.0.iter().map(|(w, e)| (w.conj(), *e)).collect();
        v.sort();
        Mono(v)
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }
}

impl fmt::Display for Mono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(v, e)| if *e == 1 { v.to_string() } else { format!("{v}^{e}") })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// Multivariate polynomial with Gaussian-rational coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Poly {
    terms: BTreeMap<Mono, QI>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Poly::constant(QI::one())
    }

    pub fn constant(c: QI) -> Self {
        let mut p = Poly::zero();
        if !c.is_zero() {
            p.terms.insert(Mono::one(), c);
        }
        p
    }

    pub fn var(v: Var) -> Self {
        Poly::monomial(QI::one(), Mono::var(v, 1))
    }

    pub fn monomial(c: QI, m: Mono) -> Self {
        let mut p = Poly::zero();
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &QI)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_constant(&self) -> Option<QI> {
        match self.terms.len() {
            0 => Some(QI::zero()),
            1 => self.terms.get(&Mono::one()).cloned(),
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.as_constant().is_some()
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.terms.keys().flat_map(|m| m.0.iter().map(|(v, _)| *v)).collect()
    }

    pub fn max_var(&self) -> Option<Var> {
        self.vars().into_iter().next_back()
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms.keys().map(|m| m.degree_in(v)).max().unwrap_or(0)
    }

    fn insert_add(&mut self, m: Mono, c: QI) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(e) => {
                *e = &*e + &c;
                if e.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn scale(&self, c: &QI) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn mul_mono(&self, m: &Mono) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(k, a)| (k.mul(m), a.clone())).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn conj(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.conj(), c.conj())).collect(),
        }
    }

    /// Coefficient of the largest monomial in map order.
    pub fn leading_coeff(&self) -> QI {
        self.terms.values().next_back().cloned().unwrap_or_else(QI::zero)
    }

    /// Scales so the leading coefficient is one.
    pub fn normalized(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        self.scale(&self.leading_coeff().inv())
    }

    /// Coefficients as a polynomial in `v`, indexed by degree.
    pub fn coeffs_in(&self, v: Var) -> Vec<Poly> {
        let d = self.degree_in(v) as usize;
        let mut out = vec![Poly::zero(); d + 1];
        for (m, c) in &self.terms {
            let (rest, e) = m.without(v);
            out[e as usize].insert_add(rest, c.clone());
        }
        out
    }

    pub fn from_coeffs(v: Var, coeffs: &[Poly]) -> Poly {
        let mut out = Poly::zero();
        for (k, c) in coeffs.iter().enumerate() {
            let m = Mono::var(v, k as u32);
            for (cm, cc) in &c.terms {
                out.insert_add(cm.mul(&m), cc.clone());
            }
        }
        out
    }

    /// Exact quotient `self / d`, or `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        assert!(!d.is_zero(), "polynomial division by zero");
        if self.is_zero() {
            return Some(Poly::zero());
        }
        if let Some(c) = d.as_constant() {
            return Some(self.scale(&c.inv()));
        }
        let x = self.max_var().max(d.max_var()).expect("nonconstant divisor");
        let db = d.degree_in(x);
        if db == 0 {
            let coeffs = self.coeffs_in(x);
            let mut q = Vec::with_capacity(coeffs.len());
            for c in &coeffs {
                q.push(c.div_exact(d)?);
            }
            return Some(Poly::from_coeffs(x, &q));
        }
        let dc = d.coeffs_in(x);
        let lc_d = &dc[db as usize];
        let mut rem = self.clone();
        let mut quot = Poly::zero();
        while !rem.is_zero() {
            let da = rem.degree_in(x);
            if da < db {
                return None;
            }
            let lc_r = rem.coeffs_in(x).pop().unwrap();
            let t = lc_r.div_exact(lc_d)?.mul_mono(&Mono::var(x, da - db));
            rem = &rem - &(&t * d);
            quot = &quot + &t;
        }
        Some(quot)
    }

    fn prem(a: &Poly, b: &Poly, x: Var) -> Poly {
        let db = b.degree_in(x);
        let lc_b = b.coeffs_in(x).pop().unwrap();
        let mut r = a.clone();
        while !r.is_zero() && r.degree_in(x) >= db {
            let dr = r.degree_in(x);
            let lc_r = r.coeffs_in(x).pop().unwrap();
            r = &(&r * &lc_b) - &(&(&lc_r * b).mul_mono(&Mono::var(x, dr - db)));
        }
        r
    }

    /// Gcd of the coefficients of `self` viewed as a polynomial in `x`.
    pub fn content_in(&self, x: Var) -> Poly {
        let mut g = Poly::zero();
        for c in self.coeffs_in(x) {
            g = Poly::gcd(&g, &c);
            if g.is_constant() && !g.is_zero() {
                return Poly::one();
            }
        }
        g
    }

    /// Normalized greatest common divisor (leading coefficient one).
    pub fn gcd(a: &Poly, b: &Poly) -> Poly {
        if a.is_zero() {
            return b.normalized();
        }
        if b.is_zero() {
            return a.normalized();
        }
        if a.is_constant() || b.is_constant() {
            return Poly::one();
        }
        let x = a.max_var().max(b.max_var()).unwrap();
        if a.degree_in(x) == 0 {
            return Poly::gcd(a, &b.content_in(x));
        }
        if b.degree_in(x) == 0 {
            return Poly::gcd(&a.content_in(x), b);
        }
        let ca = a.content_in(x);
        let cb = b.content_in(x);
        let c = Poly::gcd(&ca, &cb);
        let mut f = a.div_exact(&ca).expect("content divides");
        let mut g = b.div_exact(&cb).expect("content divides");
        if f.degree_in(x) < g.degree_in(x) {
            std::mem::swap(&mut f, &mut g);
        }
        loop {
            let r = Poly::prem(&f, &g, x);
            if r.is_zero() {
                break;
            }
            if r.degree_in(x) == 0 {
                g = Poly::one();
                break;
            }
            f = g;
            let cr = r.content_in(x);
            g = r.div_exact(&cr).expect("content divides");
        }
        let gp = if g.is_constant() {
            Poly::one()
        } else {
            let cg = g.content_in(x);
            g.div_exact(&cg).expect("content divides")
        };
        (&c * &gp).normalized()
    }

    /// Evaluates with every variable mapped to a Gaussian rational.
    pub fn eval_qi(&self, f: &dyn Fn(Var) -> Option<QI>) -> Option<QI> {
        let mut acc = QI::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, e) in &m.0 {
                t = &t * &f(*v)?.pow(*e);
            }
            acc = &acc + &t;
        }
        Some(acc)
    }

    /// Partial substitution: variables mapped to polynomials, others kept.
    pub fn substitute(&self, f: &dyn Fn(Var) -> Option<Poly>) -> Poly {
        let mut acc = Poly::zero();
        for (m, c) in &self.terms {
            let mut t = Poly::constant(c.clone());
            for (v, e) in &m.0 {
                let p = f(*v).unwrap_or_else(|| Poly::var(*v));
                t = &t * &p.pow(*e);
            }
            acc = &acc + &t;
        }
        acc
    }

    pub fn derivative(&self, v: Var) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let (rest, e) = m.without(v);
            if e > 0 {
                out.insert_add(rest.mul(&Mono::var(v, e - 1)), c * &QI::int(e as i64));
            }
        }
        out
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.insert_add(m.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.insert_add(m.clone(), -c);
        }
        out
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                out.insert_add(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&QI::int(-1))
    }
}

fn fmt_coeff(c: &QI) -> String {
    if !c.re.is_zero() && !c.im.is_zero() {
        format!("({c})")
    } else {
        c.to_string()
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            let neg_real = c.im.is_zero() && c.re.is_negative();
            let shown = if neg_real { -c } else { c.clone() };
            let body = if m.is_one() {
                fmt_coeff(&shown)
            } else if shown.is_one() {
                m.to_string()
            } else {
                format!("{}*{}", fmt_coeff(&shown), m)
            };
            match (first, neg_real) {
                (true, true) => write!(f, "-{body}")?,
                (true, false) => write!(f, "{body}")?,
                (false, true) => write!(f, " - {body}")?,
                (false, false) => write!(f, " + {body}")?,
            }
            first = false;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w() -> Poly {
        Poly::var(Var::Omega)
    }
    fn wb() -> Poly {
        Poly::var(Var::OmegaBar)
    }

    #[test]
    fn gcd_of_products() {
        let a = &(&w() - &wb()) * &(&w() + &Poly::one());
        let b = &(&w() - &wb()) * &(&wb() + &Poly::constant(QI::i()));
        let g = Poly::gcd(&a, &b);
        assert_eq!(g, (&w() - &wb()).normalized());
    }

    #[test]
    fn exact_division() {
        let x = Poly::var(Var::Z(0));
        let y = Poly::var(Var::Z(1));
        let p = &(&x + &y) * &(&x - &y);
        let q = p.div_exact(&(&x - &y)).unwrap();
        assert_eq!(q, &x + &y);
        assert!(p.div_exact(&(&x + &Poly::one())).is_none());
    }

    #[test]
    fn derivative_and_substitute() {
        let x = Poly::var(Var::S(0));
        let p = &x.pow(3) + &x;
        assert_eq!(p.derivative(Var::S(0)), &x.pow(2).scale(&QI::int(3)) + &Poly::one());
        let at2 = p.eval_qi(&|_| Some(QI::int(2))).unwrap();
        assert_eq!(at2, QI::int(10));
    }
}
