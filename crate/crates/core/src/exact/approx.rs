use num_complex::Complex64;

use super::field::Field;
use super::matrix::Matrix;
use super::qi::QI;

/// Floating complex vector measured in the max-modulus norm.
#[derive(Clone, Debug, PartialEq)]
pub struct ApproxVector(pub Vec<Complex64>);

impl ApproxVector {
    pub fn from_exact(v: &[QI]) -> Self {
        ApproxVector(v.iter().map(Complex64::from_qi).collect())
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

pub fn c64_matrix(m: &Matrix<QI>) -> Matrix<Complex64> {
    m.map(Complex64::from_qi)
}
