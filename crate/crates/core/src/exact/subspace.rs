use std::fmt;

use super::field::Field;
use super::matrix::{vecops, Matrix};

/// A linear subspace stored by its reduced row echelon basis.
#[derive(Clone, PartialEq, Debug)]
pub struct Subspace<F> {
    ambient: usize,
    basis: Vec<Vec<F>>,
}

impl<F: Field> Subspace<F> {
    pub fn span(ambient: usize, vecs: &[Vec<F>]) -> Self {
        let vecs: Vec<Vec<F>> = vecs.iter().filter(|v| !vecops::is_zero(v)).cloned().collect();
        if vecs.is_empty() {
            return Subspace::zero(ambient);
        }
        let (r, pivots) = Matrix::from_rows(vecs).rref();
        let basis = (0..pivots.len()).map(|i| r.row(i)).collect();
        Subspace { ambient, basis }
    }

    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, basis: Vec::new() }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace { ambient, basis: (0..ambient).map(|i| vecops::unit(ambient, i)).collect() }
    }

    pub fn kernel(a: &Matrix<F>) -> Self {
        Subspace::span(a.cols(), &a.kernel_vectors())
    }

    pub fn image(a: &Matrix<F>) -> Self {
        Subspace::span(a.rows(), &a.col_vecs())
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.basis.len() == self.ambient
    }

    pub fn basis(&self) -> &[Vec<F>] {
        &self.basis
    }

    /// Basis vectors as the columns of an `ambient × dim` matrix.
    pub fn as_columns(&self) -> Matrix<F> {
        Matrix::from_cols(self.ambient, &self.basis)
    }

    pub fn contains(&self, v: &[F]) -> bool {
        if vecops::is_zero(v) {
            return true;
        }
        if self.basis.is_empty() {
            return false;
        }
        self.as_columns().solve(v).is_ok()
    }

    pub fn contains_space(&self, o: &Self) -> bool {
        o.basis.iter().all(|v| self.contains(v))
    }

    pub fn sum(&self, o: &Self) -> Self {
        let mut v = self.basis.clone();
        v.extend(o.basis.iter().cloned());
        Subspace::span(self.ambient, &v)
    }

    /// Annihilator under the standard bilinear pairing.
    pub fn annihilator(&self) -> Self {
        if self.basis.is_empty() {
            return Subspace::full(self.ambient);
        }
        Subspace::kernel(&Matrix::from_rows(self.basis.clone()))
    }

    pub fn intersect(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Subspace::zero(self.ambient);
        }
        if self.is_full() {
            return o.clone();
        }
        if o.is_full() {
            return self.clone();
        }
        self.annihilator().sum(&o.annihilator()).annihilator()
    }

    pub fn conj(&self) -> Self {
        let v: Vec<Vec<F>> = self.basis.iter().map(|b| vecops::conj(b)).collect();
        Subspace::span(self.ambient, &v)
    }

    pub fn apply(&self, a: &Matrix<F>) -> Self {
        let v: Vec<Vec<F>> = self.basis.iter().map(|b| a.mul_vec(b)).collect();
        Subspace::span(a.rows(), &v)
    }

    /// `{x : A x ∈ self}`.
    pub fn preimage(&self, a: &Matrix<F>) -> Self {
        let ann = self.annihilator();
        if ann.is_zero() {
            return Subspace::full(a.cols());
        }
        Subspace::kernel(&Matrix::from_rows(ann.basis.clone()).mul(a))
    }

    /// Vectors from `self` extending a basis of `sub` to a basis of `self`.
    pub fn complement_basis(&self, sub: &Self) -> Vec<Vec<F>> {
        let mut acc = sub.clone();
        let mut out = Vec::new();
        for v in &self.basis {
            if !acc.contains(v) {
                acc = acc.sum(&Subspace::span(self.ambient, &[v.clone()]));
                out.push(v.clone());
            }
        }
        out
    }

    /// Coordinates of `v` in the echelon basis.
    pub fn coordinates(&self, v: &[F]) -> Option<Vec<F>> {
        if self.basis.is_empty() {
            return if vecops::is_zero(v) { Some(Vec::new()) } else { None };
        }
        self.as_columns().solve(v).ok()
    }

    pub fn map_field<G: Field>(&self, f: impl Fn(&F) -> G) -> Subspace<G> {
        let v: Vec<Vec<G>> = self.basis.iter().map(|b| b.iter().map(&f).collect()).collect();
        Subspace::span(self.ambient, &v)
    }
}

impl<F: Field> fmt::Display for Subspace<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .basis
            .iter()
            .map(|v| {
                let e: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                format!("({})", e.join(", "))
            })
            .collect();
        write!(f, "span{{{}}}", parts.join(", "))
    }
}
