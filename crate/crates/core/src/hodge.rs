//! Hodge structures, Deligne splittings and polarization checks.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{
    instantiate_matrix, instantiate_vec, matrix_to_qi, vec_to_qi, vecops, ExactMatrix, Field, Matrix, Scalar,
    Subspace, QI,
};
use crate::filtration::{Direction, Filtration};

pub mod jacobian;

/// `Q(x, y) = xᵀ S y`.
pub fn pairing<F: Field>(s: &Matrix<F>, x: &[F], y: &[F]) -> F {
    vecops::dot(x, &s.mul_vec(y))
}

/// A bigrading `V = ⊕ I^{p,q}`.
#[derive(Clone, PartialEq, Debug)]
pub struct Splitting<F> {
    ambient: usize,
    pieces: BTreeMap<(i32, i32), Subspace<F>>,
}

impl<F: Field> Splitting<F> {
    pub fn new(ambient: usize, pieces: BTreeMap<(i32, i32), Subspace<F>>) -> Self {
        let pieces = pieces.into_iter().filter(|(_, s)| !s.is_zero()).collect();
        Splitting { ambient, pieces }
    }

    pub fn from_vectors(ambient: usize, items: &[((i32, i32), Vec<Vec<F>>)]) -> Self {
        let mut pieces: BTreeMap<(i32, i32), Subspace<F>> = BTreeMap::new();
        for (pq, vecs) in items {
            let s = Subspace::span(ambient, vecs);
            let e = pieces.entry(*pq).or_insert_with(|| Subspace::zero(ambient));
            *e = e.sum(&s);
        }
        Splitting::new(ambient, pieces)
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn pieces(&self) -> &BTreeMap<(i32, i32), Subspace<F>> {
        &self.pieces
    }

    pub fn get(&self, p: i32, q: i32) -> Subspace<F> {
        self.pieces.get(&(p, q)).cloned().unwrap_or_else(|| Subspace::zero(self.ambient))
    }

    pub fn hodge_numbers(&self) -> BTreeMap<(i32, i32), usize> {
        self.pieces.iter().map(|(k, s)| (*k, s.dim())).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.pieces.values().map(|s| s.dim()).sum()
    }

    pub fn is_direct_sum(&self) -> bool {
        let all: Vec<Vec<F>> = self.pieces.values().flat_map(|s| s.basis().iter().cloned()).collect();
        self.total_dim() == self.ambient && Subspace::span(self.ambient, &all).is_full()
    }

    /// `W_k = ⊕_{p+q ≤ k} I^{p,q}`.
    pub fn weight_filtration(&self) -> Filtration<F> {
        let items: Vec<(Vec<F>, i32)> = self
            .pieces
            .iter()
            .flat_map(|((p, q), s)| s.basis().iter().map(move |v| (v.clone(), p + q)))
            .collect();
        Filtration::from_weighted(self.ambient, &items)
    }

    /// `F^p = ⊕_{a ≥ p} I^{a,b}`.
    pub fn hodge_filtration(&self) -> Filtration<F> {
        let mut by_p: BTreeMap<i32, Vec<Vec<F>>> = BTreeMap::new();
        for ((p, _), s) in &self.pieces {
            by_p.entry(*p).or_default().extend(s.basis().iter().cloned());
        }
        let pieces: Vec<(i32, Vec<Vec<F>>)> = by_p.into_iter().collect();
        Filtration::from_graded_decreasing(self.ambient, &pieces)
    }

    /// `conj(I^{p,q}) = I^{q,p}` for all `(p,q)`.
    pub fn is_real_split(&self) -> bool {
        self.pieces.iter().all(|((p, q), s)| s.conj() == self.get(*q, *p))
    }

    /// Adapted basis: columns grouped by `(p,q)` in map order.
    pub fn frame(&self) -> (Matrix<F>, Vec<(i32, i32)>) {
        let mut cols = Vec::new();
        let mut labels = Vec::new();
        for (pq, s) in &self.pieces {
            for v in s.basis() {
                cols.push(v.clone());
                labels.push(*pq);
            }
        }
        (Matrix::from_cols(self.ambient, &cols), labels)
    }

    /// Components of `x` in each `I^{p,q}`.
    pub fn components(&self, x: &[F]) -> Result<BTreeMap<(i32, i32), Vec<F>>> {
        let (frame, labels) = self.frame();
        let c = frame.solve(x).map_err(|_| Error::NotMhs("splitting does not span".into()))?;
        let mut out: BTreeMap<(i32, i32), Vec<F>> = BTreeMap::new();
        for (k, pq) in labels.iter().enumerate() {
            let e = out.entry(*pq).or_insert_with(|| vecops::zeros(self.ambient));
            *e = vecops::add(e, &vecops::scale(&frame.col(k), &c[k]));
        }
        Ok(out)
    }

    /// Operator acting by `f(p,q)` on `I^{p,q}`.
    pub fn grading(&self, f: impl Fn(i32, i32) -> F) -> Result<Matrix<F>> {
        let (frame, labels) = self.frame();
        let inv = frame.inverse().ok_or_else(|| Error::NotMhs("splitting is not a direct sum".into()))?;
        let mut d = Matrix::zeros(frame.cols(), frame.cols());
        for (k, (p, q)) in labels.iter().enumerate() {
            d.set(k, k, f(*p, *q));
        }
        Ok(frame.mul(&d).mul(&inv))
    }

    /// Whether `t` maps each `I^{p,q}` into `⊕_{a ≤ p+dp, b ≤ q+dq} I^{a,b}`.
    pub fn lowers(&self, t: &Matrix<F>, dp: i32, dq: i32) -> bool {
        for ((p, q), s) in &self.pieces {
            let target: Vec<Vec<F>> = self
                .pieces
                .iter()
                .filter(|((a, b), _)| *a <= p + dp && *b <= q + dq)
                .flat_map(|(_, x)| x.basis().iter().cloned())
                .collect();
            let target = Subspace::span(self.ambient, &target);
            if !target.contains_space(&s.apply(t)) {
                return false;
            }
        }
        true
    }

    pub fn map_field<G: Field>(&self, f: impl Fn(&F) -> G + Copy) -> Splitting<G> {
        Splitting {
            ambient: self.ambient,
            pieces: self.pieces.iter().map(|(k, s)| (*k, s.map_field(f))).collect(),
        }
    }
}

impl<F: Field> fmt::Display for Splitting<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for ((p, q), s) in self.pieces.iter().rev() {
            if !first {
                writeln!(f)?;
            }
            first = false;
            write!(f, "I^{{{p},{q}}} = {s}")?;
        }
        Ok(())
    }
}

/// A mixed Hodge structure on `V_ℂ` given by `(W, F)` and optional data.
#[derive(Clone, Debug)]
pub struct MixedHodgeData<F> {
    pub w: Filtration<F>,
    pub f: Filtration<F>,
    pub splitting: Option<Splitting<F>>,
    pub delta: Option<Matrix<F>>,
}

impl<F: Field> MixedHodgeData<F> {
    pub fn new(w: Filtration<F>, f: Filtration<F>) -> Self {
        assert_eq!(w.direction(), Direction::Increasing);
        assert_eq!(f.direction(), Direction::Decreasing);
        MixedHodgeData { w, f, splitting: None, delta: None }
    }

    pub fn from_splitting(s: Splitting<F>) -> Self {
        MixedHodgeData { w: s.weight_filtration(), f: s.hodge_filtration(), splitting: Some(s), delta: None }
    }

    pub fn ambient(&self) -> usize {
        self.w.ambient()
    }
}

/// Deligne's bigrading of `(W, F)`:
/// `I^{p,q} = F^p ∩ W_{p+q} ∩ (F̄^q ∩ W_{p+q} + Σ_{j≥1} F̄^{q−j} ∩ W_{p+q−j−1})`.
pub fn deligne_splitting<F: Field>(w: &Filtration<F>, f: &Filtration<F>) -> Result<Splitting<F>> {
    let n = w.ambient();
    let fbar = f.conj();
    let (fa, fb) = f.range();
    let (wa, wb) = w.range();
    let mut pieces = BTreeMap::new();
    for p in fa - 1..=fb + 1 {
        for q in fa - 1..=fb + 1 {
            let k = p + q;
            if k < wa - 1 || k > wb + 1 {
                continue;
            }
            let wk = w.get(k);
            let mut inner = fbar.get(q).intersect(&wk);
            let mut j = 1;
            while k - j - 1 >= wa - 1 {
                inner = inner.sum(&fbar.get(q - j).intersect(&w.get(k - j - 1)));
                j += 1;
            }
            let i = f.get(p).intersect(&wk).intersect(&inner);
            if !i.is_zero() {
                pieces.insert((p, q), i);
            }
        }
    }
    let s = Splitting::new(n, pieces);
    for k in wa - 1..=wb + 1 {
        let sum: usize = s.pieces.iter().filter(|((p, q), _)| p + q == k).map(|(_, x)| x.dim()).sum();
        if sum != w.gr_dim(k) {
            return Err(Error::NotMhs(format!(
                "dim Gr^W_{k} = {} but the I^{{p,q}} with p+q = {k} have total dimension {sum}",
                w.gr_dim(k)
            )));
        }
    }
    if !s.is_direct_sum() {
        return Err(Error::NotMhs("the I^{p,q} do not form a direct sum".into()));
    }
    Ok(s)
}

/// Outcome of a δ verification.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeltaCheck {
    pub real: bool,
    pub nilpotent: bool,
    pub lowers_both_indices: bool,
    pub real_split: bool,
}

impl DeltaCheck {
    pub fn ok(&self) -> bool {
        self.real && self.nilpotent && self.lowers_both_indices && self.real_split
    }
}

/// Verifies that `δ` is real, lies in `L^{−1,−1}` for `(W, e^{−iδ}F)` and that this pair is ℝ-split.
pub fn check_delta_detailed<F: Field>(w: &Filtration<F>, f: &Filtration<F>, delta: &Matrix<F>) -> DeltaCheck {
    let real = delta.conj() == *delta;
    let i = F::from_qi(&QI::i());
    let Ok(e) = delta.scale(&-i).nilpotent_exp() else {
        return DeltaCheck { real, nilpotent: false, lowers_both_indices: false, real_split: false };
    };
    let f2 = f.apply(&e);
    match deligne_splitting(w, &f2) {
        Ok(s) => DeltaCheck {
            real,
            nilpotent: true,
            lowers_both_indices: s.lowers(delta, -1, -1),
            real_split: s.is_real_split(),
        },
        Err(_) => DeltaCheck { real, nilpotent: true, lowers_both_indices: false, real_split: false },
    }
}

pub fn check_delta<F: Field>(w: &Filtration<F>, f: &Filtration<F>, delta: &Matrix<F>) -> bool {
    check_delta_detailed(w, f, delta).ok()
}

/// A pure polarized Hodge structure of a given weight.
#[derive(Clone, Debug)]
pub struct PureHodgeData {
    pub q: ExactMatrix,
    pub f: Filtration<Scalar>,
    pub weight: i32,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PolarizationReport {
    pub alternating: bool,
    pub nondegenerate: bool,
    pub determinant: String,
    pub isotropic: bool,
    pub positive: Option<bool>,
    pub positivity_samples: Vec<String>,
}

impl PolarizationReport {
    pub fn ok(&self) -> bool {
        self.alternating && self.nondegenerate && self.isotropic && self.positive != Some(false)
    }
}

/// Leading principal minors test for a Hermitian matrix over ℚ(i).
pub fn is_positive_definite(h: &Matrix<QI>) -> bool {
    let n = h.rows();
    if h.conj().transpose() != *h {
        return false;
    }
    for k in 1..=n {
        let mut sub = Matrix::zeros(k, k);
        for i in 0..k {
            for j in 0..k {
                sub.set(i, j, h.get(i, j).clone());
            }
        }
        let d = sub.det();
        if !d.is_real() || d.re <= num_rational::BigRational::from_integer(0.into()) {
            return false;
        }
    }
    true
}

/// Hodge decomposition `H^{p,q} = F^p ∩ conj(F^q)` with `p+q = weight`.
pub fn hodge_decomposition<F: Field>(f: &Filtration<F>, weight: i32) -> Option<BTreeMap<(i32, i32), Subspace<F>>> {
    let n = f.ambient();
    let fbar = f.conj();
    let (a, b) = f.range();
    let mut out = BTreeMap::new();
    let mut total = 0;
    for p in a - 1..=b + 1 {
        let q = weight - p;
        let s = f.get(p).intersect(&fbar.get(q));
        if !s.is_zero() {
            total += s.dim();
            out.insert((p, q), s);
        }
    }
    (total == n).then_some(out)
}

/// Positivity `i^{p−q} Q(conj h, h) > 0` on every Hodge component, exactly over ℚ(i).
pub fn positivity_exact(q: &Matrix<QI>, f: &Filtration<QI>, weight: i32) -> bool {
    let Some(dec) = hodge_decomposition(f, weight) else { return false };
    for ((p, qq), s) in &dec {
        let b = s.basis();
        let c = QI::i_pow((p - qq) as i64);
        let mut h = Matrix::zeros(b.len(), b.len());
        for (k, x) in b.iter().enumerate() {
            for (l, y) in b.iter().enumerate() {
                h.set(k, l, &c * &pairing(q, &vecops::conj(x), y));
            }
        }
        if !is_positive_definite(&h) {
            return false;
        }
    }
    true
}

/// Checks alternation, nondegeneracy, isotropy of `F` and positivity at sample values of ω.
pub fn check_polarization(h: &PureHodgeData, samples: &[QI]) -> PolarizationReport {
    let q = &h.q;
    let n = q.rows();
    let sign = if h.weight.rem_euclid(2) == 1 { -1 } else { 1 };
    let alternating = q.transpose() == q.scale(&Scalar::int(sign));
    let det = q.det();
    let nondegenerate = !det.is_zero();
    let (a, b) = h.f.range();
    let mut isotropic = true;
    for p1 in a - 1..=b + 1 {
        for p2 in a - 1..=b + 1 {
            if p1 + p2 <= h.weight {
                continue;
            }
            for x in h.f.get(p1).basis() {
                for y in h.f.get(p2).basis() {
                    if !pairing(q, x, y).is_zero() {
                        isotropic = false;
                    }
                }
            }
        }
    }
    let symbolic = h.f.get(a).basis().iter().flatten().any(|x| x.involves(|v| v.is_omega()))
        || (a..=b).any(|p| h.f.get(p).basis().iter().flatten().any(|x| x.involves(|v| v.is_omega())));
    let points: Vec<QI> = if symbolic { samples.to_vec() } else { vec![QI::zero()] };
    let mut positive = None;
    for w in &points {
        let qi = matrix_to_qi(&instantiate_matrix(q, w));
        let fi = inst_filtration(&h.f, w);
        let ok = match (qi, fi) {
            (Some(qm), Some(fm)) => positivity_exact(&qm, &fm, h.weight),
            _ => false,
        };
        positive = Some(positive.unwrap_or(true) && ok);
    }
    let _ = n;
    PolarizationReport {
        alternating,
        nondegenerate,
        determinant: det.to_string(),
        isotropic,
        positive,
        positivity_samples: if symbolic { samples.iter().map(|x| x.to_string()).collect() } else { vec![] },
    }
}

/// Instantiates ω in a filtration and converts it to ℚ(i).
pub fn inst_filtration(f: &Filtration<Scalar>, w: &QI) -> Option<Filtration<QI>> {
    let (a, b) = f.range();
    let mut steps = Vec::new();
    for p in a..=b {
        let v: Option<Vec<Vec<QI>>> = f.get(p).basis().iter().map(|x| vec_to_qi(&instantiate_vec(x, w))).collect();
        steps.push(Subspace::span(f.ambient(), &v?));
    }
    Some(match f.direction() {
        Direction::Increasing => Filtration::increasing(f.ambient(), a, steps),
        Direction::Decreasing => Filtration::decreasing(f.ambient(), a, steps),
    })
}

pub fn inst_splitting(s: &Splitting<Scalar>, w: &QI) -> Option<Splitting<QI>> {
    let mut pieces = BTreeMap::new();
    for (k, sub) in s.pieces() {
        let v: Option<Vec<Vec<QI>>> = sub.basis().iter().map(|x| vec_to_qi(&instantiate_vec(x, w))).collect();
        pieces.insert(*k, Subspace::span(s.ambient(), &v?));
    }
    Some(Splitting::new(s.ambient(), pieces))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::RatFunc;

    fn r(n: i64) -> Scalar {
        RatFunc::int(n)
    }

    #[test]
    fn elliptic_curve_is_polarized() {
        let tau = QI::gaussian(1, 2);
        let q: ExactMatrix = Matrix::from_int_rows(&[&[0, 1], &[-1, 0]]);
        let f = Filtration::decreasing(2, 0, vec![Subspace::span(2, &[vec![RatFunc::constant(tau), r(1)]])]);
        let h = PureHodgeData { q, f, weight: -1 };
        let rep = check_polarization(&h, &[]);
        assert!(rep.alternating && rep.nondegenerate && rep.isotropic);
        assert_eq!(rep.positive, Some(true));
    }

    #[test]
    fn symmetric_form_is_not_alternating() {
        let q: ExactMatrix = Matrix::from_int_rows(&[&[0, 1], &[1, 0]]);
        let f = Filtration::decreasing(2, 0, vec![Subspace::span(2, &[vec![RatFunc::constant(QI::i()), r(1)]])]);
        let rep = check_polarization(&PureHodgeData { q, f, weight: -1 }, &[]);
        assert!(!rep.alternating);
    }

    #[test]
    fn pure_structure_as_mixed() {
        let i = RatFunc::constant(QI::i());
        let v = vec![i.clone(), r(1)];
        let f = Filtration::decreasing(2, 0, vec![Subspace::span(2, &[v.clone()])]);
        let w = Filtration::increasing(2, -1, vec![Subspace::full(2)]);
        let s = deligne_splitting(&w, &f).unwrap();
        assert_eq!(s.get(0, -1), Subspace::span(2, &[v.clone()]));
        assert_eq!(s.get(-1, 0), Subspace::span(2, &[vecops::conj(&v)]));
        assert!(s.is_real_split());
        assert!(check_delta(&w, &f, &Matrix::zeros(2, 2)));
    }
}
