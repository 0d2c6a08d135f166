//! sl₂-triples attached to a splitting, the constants `R` and `C`, primitive
//! decompositions and the triangular system for the `w`-components.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{vecops, Field, Matrix, QI};
use crate::hodge::Splitting;

/// `(N, Y, N⁺)` with `[Y,N] = −2N`, `[Y,N⁺] = 2N⁺`, `N⁺N − NN⁺ = Y`.
#[derive(Clone, Debug, PartialEq)]
pub struct Sl2Triple<F> {
    pub n: Matrix<F>,
    pub y: Matrix<F>,
    pub nplus: Matrix<F>,
}

impl<F: Field> Sl2Triple<F> {
    pub fn is_valid(&self) -> bool {
        let two = F::from_int(2);
        self.y.commutator(&self.n) == self.n.scale(&-two.clone())
            && self.y.commutator(&self.nplus) == self.nplus.scale(&two)
            && self.nplus.commutator(&self.n) == self.y
    }
}

/// `Y` acting by `p+q−m` on `I^{p,q}`.
pub fn grading_y<F: Field>(s: &Splitting<F>, m: i32) -> Result<Matrix<F>> {
    s.grading(|p, q| F::from_int((p + q - m) as i64))
}

/// The unique `N⁺` completing `(N, Y)` to a triple.
pub fn complete_sl2<F: Field>(n: &Matrix<F>, y: &Matrix<F>) -> Result<Matrix<F>> {
    let d = n.rows();
    let two = F::from_int(2);
    if y.commutator(n) != n.scale(&-two.clone()) {
        return Err(Error::NoTriple("[Y,N] differs from -2N".into()));
    }
    // unknown X = N⁺, vectorized row-major: [Y,X] − 2X = 0 and XN − NX = Y
    let k = d * d;
    let mut a: Matrix<F> = Matrix::zeros(2 * k, k);
    let mut rhs = vec![F::zero(); 2 * k];
    for i in 0..d {
        for j in 0..d {
            let r = i * d + j;
            for t in 0..d {
                // (YX)_{ij} = Σ_t Y_it X_tj ; (XY)_{ij} = Σ_t X_it Y_tj
                let c1 = a.get(r, t * d + j).clone() + y.get(i, t).clone();
                a.set(r, t * d + j, c1);
                let c2 = a.get(r, i * d + t).clone() - y.get(t, j).clone();
                a.set(r, i * d + t, c2);
                let c3 = a.get(k + r, i * d + t).clone() + n.get(t, j).clone();
                a.set(k + r, i * d + t, c3);
                let c4 = a.get(k + r, t * d + j).clone() - n.get(i, t).clone();
                a.set(k + r, t * d + j, c4);
            }
            let c = a.get(r, r).clone() - two.clone();
            a.set(r, r, c);
            rhs[k + r] = y.get(i, j).clone();
        }
    }
    let x = a.solve(&rhs).map_err(|_| Error::NoTriple("Y is not a weight grading for N".into()))?;
    let nplus = Matrix::new(d, d, x);
    let t = Sl2Triple { n: n.clone(), y: y.clone(), nplus: nplus.clone() };
    if !t.is_valid() {
        return Err(Error::NoTriple("triple relations fail".into()));
    }
    Ok(nplus)
}

pub fn sl2_triple<F: Field>(n: &Matrix<F>, s: &Splitting<F>, m: i32) -> Result<Sl2Triple<F>> {
    let y = grading_y(s, m)?;
    let nplus = complete_sl2(n, &y)?;
    Ok(Sl2Triple { n: n.clone(), y, nplus })
}

fn factorial(n: i64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// `R(a,b,ℓ) = b!(ℓ+a−b)!/((ℓ−b)!(b−a)!)` for `0 ≤ a ≤ b ≤ ℓ`, else `0`.
pub fn r_const(a: i64, b: i64, l: i64) -> BigRational {
    if !(0 <= a && a <= b && b <= l) {
        return BigRational::zero();
    }
    BigRational::new(factorial(b) * factorial(l + a - b), factorial(l - b) * factorial(b - a))
}

/// `C` for a primitive block with `ℓ₀ = m−p−q`: the coefficient of `(N⁺)^t N^{b+t} h^{p+b,q+b}`.
pub fn c_const(l0: i64, b: i64, t: i64) -> BigRational {
    let mut memo = HashMap::new();
    c_rec(l0, b, t, &mut memo)
}

fn c_rec(l0: i64, b: i64, t: i64, memo: &mut HashMap<(i64, i64, i64), BigRational>) -> BigRational {
    if let Some(v) = memo.get(&(l0, b, t)) {
        return v.clone();
    }
    let rbb = r_const(b, b, l0);
    let v = if rbb.is_zero() {
        BigRational::zero()
    } else if t == 0 {
        rbb.recip()
    } else {
        let mut s = BigRational::zero();
        for j in 1..=t {
            s += r_const(b, b + j, l0 + 2 * j) * c_rec(l0 + 2 * j, b + j, t - j, memo);
        }
        -s / rbb
    };
    memo.insert((l0, b, t), v.clone());
    v
}

/// Hodge numbers `dim I^{p,q}` as a cache key.
pub type HodgeSignature = BTreeMap<(i32, i32), usize>;

/// All constants `C(p,q,b,j)` for one Hodge signature and center `m`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstantTable {
    pub m: i32,
    #[serde(skip)]
    pub c: BTreeMap<(i32, i32, usize, usize), BigRational>,
}

impl ConstantTable {
    fn build(sig: &HodgeSignature, m: i32) -> Self {
        let depth = sig.values().sum::<usize>() as i64;
        let mut memo = HashMap::new();
        let mut c = BTreeMap::new();
        for &(p, q) in sig.keys() {
            let l0 = (m - p - q) as i64;
            for b in 0..=l0.max(-1) {
                for j in 0..=depth {
                    let v = c_rec(l0, b, j, &mut memo);
                    c.insert((p, q, b as usize, j as usize), v);
                }
            }
        }
        ConstantTable { m, c }
    }

    pub fn get(&self, p: i32, q: i32, b: usize, j: usize) -> BigRational {
        self.c.get(&(p, q, b, j)).cloned().unwrap_or_else(BigRational::zero)
    }
}

type CacheMap = HashMap<(HodgeSignature, i32), Arc<ConstantTable>>;

fn cache() -> &'static RwLock<CacheMap> {
    static CACHE: OnceLock<RwLock<CacheMap>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Cached constant table; entries are written once and shared afterwards.
pub fn constants_for(sig: &HodgeSignature, m: i32) -> Arc<ConstantTable> {
    let key = (sig.clone(), m);
    if let Some(t) = cache().read().expect("constant cache").get(&key) {
        return t.clone();
    }
    let table = Arc::new(ConstantTable::build(sig, m));
    cache().write().expect("constant cache").entry(key).or_insert(table).clone()
}

pub fn cached_signatures() -> usize {
    cache().read().expect("constant cache").len()
}

/// `h = Σ (N⁺)^b h^{p,q}(b)` with `h^{p,q}(b) ∈ I^{p,q} ∩ ker N`.
#[derive(Clone, Debug, PartialEq)]
pub struct PrimitiveDecomposition<F> {
    pub components: BTreeMap<(i32, i32, usize), Vec<F>>,
}

impl<F: Field> PrimitiveDecomposition<F> {
    pub fn recompose(&self, nplus: &Matrix<F>, dim: usize) -> Vec<F> {
        let mut out = vecops::zeros(dim);
        for ((_, _, b), v) in &self.components {
            out = vecops::add(&out, &nplus.pow(*b).mul_vec(v));
        }
        out
    }
}

pub fn primitive_decompose<F: Field>(
    h: &[F],
    triple: &Sl2Triple<F>,
    s: &Splitting<F>,
    m: i32,
) -> Result<PrimitiveDecomposition<F>> {
    let dim = h.len();
    let comps = s.components(h)?;
    let table = constants_for(&s.hodge_numbers(), m);
    let mut components = BTreeMap::new();
    let npow: Vec<Matrix<F>> = (0..=2 * dim).map(|k| triple.n.pow(k)).collect();
    let ppow: Vec<Matrix<F>> = (0..=dim).map(|k| triple.nplus.pow(k)).collect();
    for &(p, q) in s.pieces().keys() {
        let l0 = m - p - q;
        if l0 < 0 {
            continue;
        }
        for b in 0..=l0 as usize {
            let Some(top) = comps.get(&(p + b as i32, q + b as i32)) else { continue };
            let mut acc = vecops::zeros(dim);
            for j in 0..=dim {
                let c = table.get(p, q, b, j);
                if c.is_zero() {
                    continue;
                }
                let v = ppow[j].mul_vec(&npow[b + j].mul_vec(top));
                acc = vecops::add(&acc, &vecops::scale(&v, &F::from_qi(&QI::from_rational(c))));
            }
            if !vecops::is_zero(&acc) {
                components.insert((p, q, b), acc);
            }
        }
    }
    let dec = PrimitiveDecomposition { components };
    for ((p, q, _), v) in &dec.components {
        if !vecops::is_zero(&triple.n.mul_vec(v)) || !s.get(*p, *q).contains(v) {
            return Err(Error::InconsistentTriple(format!("component at ({p},{q}) is not primitive")));
        }
    }
    if dec.recompose(&triple.nplus, dim) != h {
        return Err(Error::InconsistentTriple("recomposition differs from the input".into()));
    }
    Ok(dec)
}

/// Coefficient of `w^{p,q}(b')` in the equation for `g^{p,q}(b)`:
/// `(−2i)^{b'−b}/(b'−b)! · R(b'−b, b', −1−p−q)`.
pub fn w_coefficient(p: i32, q: i32, b: usize, bp: usize) -> QI {
    if bp < b {
        return QI::zero();
    }
    let k = (bp - b) as i64;
    let l = (-1 - p - q) as i64;
    let r = r_const(k, bp as i64, l);
    let c = QI::gaussian(0, -2).pow(k as u32);
    &c * &QI::from_rational(r / BigRational::from_integer(factorial(k)))
}

/// Equation indices `b` (with `p+b ≤ −1`) and unknown indices `b'` (with `q+b' ≥ 0`) of one block.
pub fn block_indices(p: i32, q: i32) -> (Vec<usize>, Vec<usize>) {
    let l = -1 - p - q;
    if l < 0 {
        return (vec![], vec![]);
    }
    let eqs = (0..=l).filter(|b| p + b <= -1).map(|b| b as usize).collect();
    let unk = (0..=l).filter(|b| q + b >= 0).map(|b| b as usize).collect();
    (eqs, unk)
}

/// Unknowns in the order `(p+q, p, −b)`.
pub fn unknown_order(sig: &HodgeSignature) -> Vec<(i32, i32, usize)> {
    let mut out: Vec<(i32, i32, usize)> =
        sig.keys().flat_map(|&(p, q)| block_indices(p, q).1.into_iter().map(move |b| (p, q, b))).collect();
    out.sort_by_key(|&(p, q, b)| (p + q, p, -(b as i64)));
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct WSolution {
    pub w: BTreeMap<(i32, i32, usize), Vec<QI>>,
    pub determinant: QI,
    pub order: Vec<(i32, i32, usize)>,
}

/// The block coefficient matrix, rows in equation order and columns in unknown order `(−b)`.
pub fn block_matrix(p: i32, q: i32) -> Matrix<QI> {
    let (eqs, mut unk) = block_indices(p, q);
    unk.sort_by_key(|b| std::cmp::Reverse(*b));
    let mut eqs = eqs;
    eqs.sort_by_key(|b| std::cmp::Reverse(*b));
    let mut m = Matrix::zeros(eqs.len(), unk.len());
    for (i, &b) in eqs.iter().enumerate() {
        for (j, &bp) in unk.iter().enumerate() {
            m.set(i, j, w_coefficient(p, q, b, bp));
        }
    }
    m
}

/// `g^{p,q}(b) = Σ_k ((−2i)^k/k!) R(k,k+b,−1−p−q) w^{p,q}(k+b)`.
pub fn w_forward(sig: &HodgeSignature, w: &BTreeMap<(i32, i32, usize), Vec<QI>>) -> BTreeMap<(i32, i32, usize), Vec<QI>> {
    let mut g = BTreeMap::new();
    for &(p, q) in sig.keys() {
        let (eqs, unk) = block_indices(p, q);
        for b in eqs {
            let mut acc: Option<Vec<QI>> = None;
            for &bp in &unk {
                if let Some(v) = w.get(&(p, q, bp)) {
                    let t = vecops::scale(v, &w_coefficient(p, q, b, bp));
                    acc = Some(match acc {
                        Some(a) => vecops::add(&a, &t),
                        None => t,
                    });
                }
            }
            if let Some(a) = acc {
                g.insert((p, q, b), a);
            }
        }
    }
    g
}

pub fn solve_w_system(sig: &HodgeSignature, g: &BTreeMap<(i32, i32, usize), Vec<QI>>) -> Result<WSolution> {
    let dim = g.values().next().map(|v| v.len()).unwrap_or(0);
    for (&(p, q, b), v) in g {
        let l = -1 - p - q;
        if !sig.contains_key(&(p, q)) || p + b as i32 > -1 || b as i32 > l || v.len() != dim {
            return Err(Error::IndexMismatch(format!("g^{{{p},{q}}}({b}) lies outside the equation range")));
        }
    }
    let mut w = BTreeMap::new();
    let mut det = QI::one();
    for &(p, q) in sig.keys() {
        let (mut eqs, mut unk) = block_indices(p, q);
        if eqs.len() != unk.len() {
            return Err(Error::IndexMismatch(format!("block ({p},{q}) is not square")));
        }
        if eqs.is_empty() {
            continue;
        }
        eqs.sort_by_key(|b| std::cmp::Reverse(*b));
        unk.sort_by_key(|b| std::cmp::Reverse(*b));
        let a = block_matrix(p, q);
        det = &det * &a.det();
        let inv = a.inverse().ok_or_else(|| Error::IndexMismatch(format!("block ({p},{q}) is singular")))?;
        let gv: Vec<Vec<QI>> =
            eqs.iter().map(|b| g.get(&(p, q, *b)).cloned().unwrap_or_else(|| vecops::zeros(dim))).collect();
        for (j, bp) in unk.iter().enumerate() {
            let mut acc = vecops::zeros(dim);
            for (i, gi) in gv.iter().enumerate() {
                acc = vecops::add(&acc, &vecops::scale(gi, inv.get(j, i)));
            }
            w.insert((p, q, *bp), acc);
        }
    }
    Ok(WSolution { w, determinant: det, order: unknown_order(sig) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn r_values() {
        for l in 0..6 {
            for b in 0..=l {
                assert_eq!(r_const(0, b, l), r(1));
            }
        }
        assert_eq!(r_const(1, 1, 2), r(2));
        assert_eq!(r_const(2, 1, 5), r(0));
    }

    #[test]
    fn two_dim_triple() {
        let n: Matrix<QI> = Matrix::from_int_rows(&[&[0, 1], &[0, 0]]);
        // N lowers the Y-eigenvalue by 2, so e₁ = N e₂ has eigenvalue −1
        let y: Matrix<QI> = Matrix::from_int_rows(&[&[-1, 0], &[0, 1]]);
        let np = complete_sl2(&n, &y).unwrap();
        assert_eq!(np, Matrix::from_int_rows(&[&[0, 0], &[1, 0]]));
        let z: Matrix<QI> = Matrix::zeros(2, 2);
        assert_eq!(complete_sl2(&z, &z).unwrap(), z);
    }

    #[test]
    fn wrong_grading_has_no_triple() {
        let n: Matrix<QI> = Matrix::from_int_rows(&[&[0, 1], &[0, 0]]);
        let y: Matrix<QI> = Matrix::from_int_rows(&[&[3, 0], &[0, 1]]);
        assert!(matches!(complete_sl2(&n, &y), Err(Error::NoTriple(_))));
        let flipped: Matrix<QI> = Matrix::from_int_rows(&[&[1, 0], &[0, -1]]);
        assert!(matches!(complete_sl2(&n, &flipped), Err(Error::NoTriple(_))));
    }

    #[test]
    fn one_by_one_block_copies() {
        // p+q = −2 with q ≥ 0: I^{−2,0}, ℓ = 1
        let sig: HodgeSignature = [((-2, 0), 1)].into_iter().collect();
        let a = block_matrix(-2, 0);
        assert_eq!(a.rows(), 2);
        assert!(a.det().is_one());
        let w: BTreeMap<_, _> = [((-2, 0, 0), vec![QI::int(3)]), ((-2, 0, 1), vec![QI::int(5)])].into_iter().collect();
        let g = w_forward(&sig, &w);
        assert_eq!(solve_w_system(&sig, &g).unwrap().w, w);
    }
}
