//! Increasing and decreasing filtrations, monodromy weight filtrations and relative filtrations.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{vecops, Field, Matrix, Subspace};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum Direction {
    Increasing,
    Decreasing,
}

/// A finite filtration with integer labels.
///
/// Increasing: `W_k = 0` below the stored range and `W_k = V` above it.
/// Decreasing: `F^p = V` below the stored range and `F^p = 0` above it.
#[derive(Clone, PartialEq, Debug)]
pub struct Filtration<F> {
    direction: Direction,
    ambient: usize,
    lo: i32,
    steps: Vec<Subspace<F>>,
}

impl<F: Field> Filtration<F> {
    /// Builds an increasing filtration from `W_lo ⊆ W_{lo+1} ⊆ …`.
    pub fn increasing(ambient: usize, lo: i32, steps: Vec<Subspace<F>>) -> Self {
        Filtration { direction: Direction::Increasing, ambient, lo, steps }.normalized()
    }

    /// Builds a decreasing filtration from `F^lo ⊇ F^{lo+1} ⊇ …`.
    pub fn decreasing(ambient: usize, lo: i32, steps: Vec<Subspace<F>>) -> Self {
        Filtration { direction: Direction::Decreasing, ambient, lo, steps }.normalized()
    }

    /// Increasing filtration spanned by vectors carrying weights.
    pub fn from_weighted(ambient: usize, items: &[(Vec<F>, i32)]) -> Self {
        if items.is_empty() {
            return Filtration::increasing(ambient, 0, vec![Subspace::full(ambient)]);
        }
        let lo = items.iter().map(|x| x.1).min().unwrap();
        let hi = items.iter().map(|x| x.1).max().unwrap();
        let steps = (lo..=hi)
            .map(|k| {
                let v: Vec<Vec<F>> = items.iter().filter(|x| x.1 <= k).map(|x| x.0.clone()).collect();
                Subspace::span(ambient, &v)
            })
            .collect();
        Filtration::increasing(ambient, lo, steps)
    }

    /// Decreasing filtration `F^p = ⊕_{a ≥ p} pieces[a]`.
    pub fn from_graded_decreasing(ambient: usize, pieces: &[(i32, Vec<Vec<F>>)]) -> Self {
        if pieces.is_empty() {
            return Filtration::decreasing(ambient, 0, vec![]);
        }
        let lo = pieces.iter().map(|x| x.0).min().unwrap();
        let hi = pieces.iter().map(|x| x.0).max().unwrap();
        let steps = (lo..=hi)
            .map(|p| {
                let v: Vec<Vec<F>> =
                    pieces.iter().filter(|x| x.0 >= p).flat_map(|x| x.1.iter().cloned()).collect();
                Subspace::span(ambient, &v)
            })
            .collect();
        Filtration::decreasing(ambient, lo, steps)
    }

    fn normalized(mut self) -> Self {
        let inc = self.direction == Direction::Increasing;
        let bottom = |s: &Subspace<F>| if inc { s.is_zero() } else { s.is_full() };
        let top = |s: &Subspace<F>| if inc { s.is_full() } else { s.is_zero() };
        let skip = self.steps.iter().take_while(|s| bottom(s)).count();
        self.steps.drain(..skip);
        self.lo += skip as i32;
        while self.steps.last().is_some_and(|s| top(s)) {
            self.steps.pop();
        }
        if inc && self.ambient > 0 {
            self.steps.push(Subspace::full(self.ambient));
        }
        self
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    /// Labels of the stored steps.
    pub fn range(&self) -> (i32, i32) {
        (self.lo, self.lo + self.steps.len() as i32 - 1)
    }

    pub fn get(&self, k: i32) -> Subspace<F> {
        let idx = k - self.lo;
        if idx >= 0 && (idx as usize) < self.steps.len() {
            return self.steps[idx as usize].clone();
        }
        match (self.direction, idx < 0) {
            (Direction::Increasing, true) => Subspace::zero(self.ambient),
            (Direction::Increasing, false) => Subspace::full(self.ambient),
            (Direction::Decreasing, true) => Subspace::full(self.ambient),
            (Direction::Decreasing, false) => Subspace::zero(self.ambient),
        }
    }

    /// `dim Gr_k`: `dim W_k − dim W_{k−1}` or `dim F^p − dim F^{p+1}`.
    pub fn gr_dim(&self, k: i32) -> usize {
        match self.direction {
            Direction::Increasing => self.get(k).dim() - self.get(k - 1).dim(),
            Direction::Decreasing => self.get(k).dim() - self.get(k + 1).dim(),
        }
    }

    /// Labels with nonzero graded pieces, in increasing order.
    pub fn jumps(&self) -> Vec<i32> {
        let (a, b) = self.range();
        (a - 1..=b + 1).filter(|&k| self.gr_dim(k) > 0).collect()
    }

    /// Reindexing `F⟦s⟧_k = F_{k−s}` for increasing and `F⟦s⟧^p = F^{p+s}` for decreasing filtrations.
    pub fn shift(&self, s: i32) -> Self {
        let mut out = self.clone();
        match self.direction {
            Direction::Increasing => out.lo += s,
            Direction::Decreasing => out.lo -= s,
        }
        out
    }

    /// The increasing filtration `F_p = F^{−p}`.
    pub fn to_increasing(&self) -> Self {
        match self.direction {
            Direction::Increasing => self.clone(),
            Direction::Decreasing => {
                let (a, b) = self.range();
                let steps = (-b - 1..=-a).map(|p| self.get(-p)).collect();
                Filtration::increasing(self.ambient, -b - 1, steps)
            }
        }
    }

    pub fn apply(&self, m: &Matrix<F>) -> Self {
        let steps = self.steps.iter().map(|s| s.apply(m)).collect();
        Filtration { direction: self.direction, ambient: m.rows(), lo: self.lo, steps }.normalized()
    }

    pub fn conj(&self) -> Self {
        let steps = self.steps.iter().map(|s| s.conj()).collect();
        Filtration { direction: self.direction, ambient: self.ambient, lo: self.lo, steps }.normalized()
    }

    pub fn is_nested(&self) -> bool {
        self.steps.windows(2).all(|w| match self.direction {
            Direction::Increasing => w[1].contains_space(&w[0]),
            Direction::Decreasing => w[0].contains_space(&w[1]),
        })
    }

    pub fn map_field<G: Field>(&self, f: impl Fn(&F) -> G + Copy) -> Filtration<G> {
        Filtration {
            direction: self.direction,
            ambient: self.ambient,
            lo: self.lo,
            steps: self.steps.iter().map(|s| s.map_field(f)).collect(),
        }
    }
}

impl<F: Field> fmt::Display for Filtration<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sym = match self.direction {
            Direction::Increasing => "W_",
            Direction::Decreasing => "F^",
        };
        let (a, b) = self.range();
        let mut first = true;
        for k in a..=b {
            if !first {
                writeln!(f)?;
            }
            first = false;
            write!(f, "{sym}{k} = {}", self.get(k))?;
        }
        Ok(())
    }
}

/// Jordan strings of a nilpotent operator: `(head, length)` with `N^length head = 0`.
pub fn jordan_strings<F: Field>(n: &Matrix<F>) -> Result<Vec<(Vec<F>, usize)>> {
    let dim = n.rows();
    let k = n.nilpotency_index().ok_or(Error::NotNilpotent)?;
    let kernels: Vec<Subspace<F>> = (0..=k).map(|j| Subspace::kernel(&n.pow(j))).collect();
    let mut heads: Vec<(Vec<F>, usize)> = Vec::new();
    for j in (1..=k).rev() {
        let mut s = kernels[j - 1].clone();
        let mut extra = Vec::new();
        for (h, l) in &heads {
            extra.push(n.pow(l - j).mul_vec(h));
        }
        s = s.sum(&Subspace::span(dim, &extra));
        for v in kernels[j].complement_basis(&s) {
            heads.push((v, j));
        }
    }
    Ok(heads)
}

/// Weighted basis `(vector, weight)` of the weight filtration of `n` centered at `center`.
pub fn weight_basis<F: Field>(n: &Matrix<F>, center: i32) -> Result<Vec<(Vec<F>, i32)>> {
    let mut out = Vec::new();
    for (h, l) in jordan_strings(n)? {
        let mut v = h;
        for i in 0..l {
            out.push((v.clone(), center + l as i32 - 1 - 2 * i as i32));
            v = n.mul_vec(&v);
        }
    }
    Ok(out)
}

/// The monodromy weight filtration `W(N)` centered at `center`.
pub fn weight_filtration<F: Field>(n: &Matrix<F>, center: i32) -> Result<Filtration<F>> {
    let items = weight_basis(n, center)?;
    if items.is_empty() {
        return Ok(Filtration::increasing(n.rows(), center, vec![Subspace::full(n.rows())]));
    }
    Ok(Filtration::from_weighted(n.rows(), &items))
}

/// Checks both weight filtration axioms exactly.
pub fn is_weight_filtration<F: Field>(n: &Matrix<F>, w: &Filtration<F>, center: i32) -> bool {
    if w.direction() != Direction::Increasing || !w.is_nested() {
        return false;
    }
    let (a, b) = w.range();
    for k in a - 1..=b + 2 {
        if !w.get(k - 2).contains_space(&w.get(k).apply(n)) {
            return false;
        }
    }
    let span = (b - center).max(center - a) + 1;
    for l in 0..=span.max(0) {
        let up = w.gr_dim(center + l);
        let down = w.gr_dim(center - l);
        if up != down {
            return false;
        }
        if l == 0 {
            continue;
        }
        let below = w.get(center - l - 1);
        let img = w.get(center + l).apply(&n.pow(l as usize)).sum(&below);
        if img.dim() - below.dim() != down {
            return false;
        }
    }
    // every graded piece must lie within the symmetric range
    w.jumps().iter().all(|k| (k - center).abs() <= span)
}

/// Coordinates on `W_k / W_{k−1}` through a fixed complement.
struct Quotient<F> {
    comp: Vec<Vec<F>>,
    frame: Matrix<F>,
}

impl<F: Field> Quotient<F> {
    fn new(big: &Subspace<F>, small: &Subspace<F>) -> Self {
        let comp = big.complement_basis(small);
        let mut cols = comp.clone();
        cols.extend(small.basis().iter().cloned());
        let frame = Matrix::from_cols(big.ambient(), &cols);
        Quotient { comp, frame }
    }

    fn dim(&self) -> usize {
        self.comp.len()
    }

    fn project(&self, x: &[F]) -> Option<Vec<F>> {
        let c = self.frame.solve(x).ok()?;
        Some(c[..self.comp.len()].to_vec())
    }

    fn lift(&self, c: &[F]) -> Vec<F> {
        vecops::combine(self.frame.rows(), c, &self.comp)
    }

    fn induced(&self, n: &Matrix<F>) -> Option<Matrix<F>> {
        let cols: Option<Vec<Vec<F>>> = self.comp.iter().map(|c| self.project(&n.mul_vec(c))).collect();
        Some(Matrix::from_cols(self.dim(), &cols?))
    }

    fn image(&self, s: &Subspace<F>) -> Option<Subspace<F>> {
        let v: Option<Vec<Vec<F>>> = s.basis().iter().map(|x| self.project(x)).collect();
        Some(Subspace::span(self.dim(), &v?))
    }
}

/// Checks the relative weight filtration axioms of `m` for `n` relative to `w`.
pub fn is_relative_weight_filtration<F: Field>(n: &Matrix<F>, w: &Filtration<F>, m: &Filtration<F>) -> bool {
    if m.direction() != Direction::Increasing || !m.is_nested() {
        return false;
    }
    let (a, b) = m.range();
    for k in a - 1..=b + 2 {
        if !m.get(k - 2).contains_space(&m.get(k).apply(n)) {
            return false;
        }
    }
    for k in w.jumps() {
        let wk = w.get(k);
        let q = Quotient::new(&wk, &w.get(k - 1));
        let Some(nbar) = q.induced(n) else { return false };
        let mut steps = Vec::new();
        for j in a - 1..=b + 1 {
            let Some(img) = q.image(&m.get(j).intersect(&wk)) else { return false };
            steps.push(img);
        }
        let induced = Filtration::increasing(q.dim(), a - 1, steps);
        if !is_weight_filtration(&nbar, &induced, k) {
            return false;
        }
    }
    true
}

/// The relative monodromy weight filtration `M(N; W)`, verified before returning.
pub fn relative_weight_filtration<F: Field>(n: &Matrix<F>, w: &Filtration<F>) -> Result<Filtration<F>> {
    let dim = n.rows();
    if !n.is_nilpotent() {
        return Err(Error::NotNilpotent);
    }
    let (a, b) = w.range();
    for k in a..=b {
        let wk = w.get(k);
        if !wk.contains_space(&wk.apply(n)) {
            return Err(Error::PreconditionViolated(format!("N does not preserve W_{k}")));
        }
    }
    let mut items: Vec<(Vec<F>, i32)> = Vec::new();
    for k in w.jumps() {
        let wk = w.get(k);
        let wprev = w.get(k - 1);
        let q = Quotient::new(&wk, &wprev);
        let nbar = q.induced(n).ok_or_else(|| Error::NotExists("induced operator".into()))?;
        let strings = jordan_strings(&nbar)?;
        let lower_items = items.clone();
        let m_prev = |j: i32| -> Subspace<F> {
            let v: Vec<Vec<F>> = lower_items.iter().filter(|x| x.1 <= j).map(|x| x.0.clone()).collect();
            Subspace::span(dim, &v)
        };
        for (head, len) in strings {
            let u = q.lift(&head);
            let nl = n.pow(len);
            let target = m_prev(k - len as i32 - 1);
            let rhs = vecops::scale(&nl.mul_vec(&u), &F::from_int(-1));
            let mut cols: Vec<Vec<F>> = wprev.basis().iter().map(|x| nl.mul_vec(x)).collect();
            cols.extend(target.basis().iter().cloned());
            let corr = if vecops::is_zero(&rhs) {
                vecops::zeros(dim)
            } else if cols.is_empty() {
                return Err(Error::NotExists(format!("no lift for a string of length {len} in Gr_{k}")));
            } else {
                let x = Matrix::from_cols(dim, &cols)
                    .solve(&rhs)
                    .map_err(|_| Error::NotExists(format!("no lift for a string of length {len} in Gr_{k}")))?;
                vecops::combine(dim, &x[..wprev.dim()], wprev.basis())
            };
            let mut v = vecops::add(&u, &corr);
            for i in 0..len {
                items.push((v.clone(), k + len as i32 - 1 - 2 * i as i32));
                v = n.mul_vec(&v);
            }
        }
    }
    let m = Filtration::from_weighted(dim, &items);
    if !is_relative_weight_filtration(n, w, &m) {
        return Err(Error::NotExists("constructed filtration fails the axioms".into()));
    }
    Ok(m)
}

/// Positive rational coefficient vectors drawn from a fixed seed.
pub fn sample_cone_points<F: Field>(n: usize, trials: usize, seed: u64) -> Vec<Vec<F>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![vec![F::one(); n]];
    for _ in 0..trials {
        out.push(
            (0..n)
                .map(|_| {
                    let p: i64 = rng.gen_range(1..=9);
                    let q: i64 = rng.gen_range(1..=4);
                    F::from_int(p) / F::from_int(q)
                })
                .collect(),
        );
    }
    out
}

pub const DEFAULT_CONE_TRIALS: usize = 8;
pub const CONE_SEED: u64 = 0x5eed;

/// Whether the (relative) weight filtration of `Σ a_j N_j` is the same for sampled `a` in the open cone.
pub fn cone_constancy<F: Field>(ns: &[Matrix<F>], w: Option<&Filtration<F>>, trials: usize) -> bool {
    if ns.is_empty() {
        return true;
    }
    let dim = ns[0].rows();
    let mut reference: Option<Filtration<F>> = None;
    for a in sample_cone_points::<F>(ns.len(), trials, CONE_SEED) {
        let mut n = Matrix::zeros(dim, dim);
        for (c, nj) in a.iter().zip(ns) {
            n = n.add(&nj.scale(c));
        }
        let f = match w {
            None => weight_filtration(&n, 0),
            Some(w) => relative_weight_filtration(&n, w),
        };
        let Ok(f) = f else { return false };
        match &reference {
            None => reference = Some(f),
            Some(r) if *r != f => return false,
            _ => {}
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::QI;

    fn m(rows: &[&[i64]]) -> Matrix<QI> {
        Matrix::from_int_rows(rows)
    }

    #[test]
    fn zero_operator() {
        let w = weight_filtration(&m(&[&[0, 0], &[0, 0]]), 0).unwrap();
        assert_eq!(w.get(-1).dim(), 0);
        assert!(w.get(0).is_full());
        assert!(is_weight_filtration(&m(&[&[0, 0], &[0, 0]]), &w, 0));
    }

    #[test]
    fn jordan_block_two() {
        let n = m(&[&[0, 1], &[0, 0]]);
        let w = weight_filtration(&n, 0).unwrap();
        assert_eq!((w.gr_dim(1), w.gr_dim(-1), w.gr_dim(0)), (1, 1, 0));
        assert!(is_weight_filtration(&n, &w, 0));
        let bad = Filtration::increasing(2, -1, vec![Subspace::span(2, &[vec![QI::int(0), QI::int(1)]])]);
        assert!(!is_weight_filtration(&n, &bad, 0));
    }

    #[test]
    fn shift_is_involutive() {
        let n = m(&[&[0, 1], &[0, 0]]);
        let w = weight_filtration(&n, 0).unwrap();
        assert_eq!(w.shift(1).shift(-1), w);
        assert_eq!(w.shift(-1), weight_filtration(&n, -1).unwrap());
    }

    #[test]
    fn decreasing_to_increasing() {
        let e = |i: usize| vecops::unit::<QI>(2, i);
        let f = Filtration::from_graded_decreasing(2, &[(0, vec![e(1)]), (-1, vec![e(0)])]);
        let inc = f.to_increasing();
        assert_eq!(inc.get(0), Subspace::span(2, &[e(1)]));
        assert!(inc.get(1).is_full());
    }
}
