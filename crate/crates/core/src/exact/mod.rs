//! Exact scalars, matrices and subspaces over ℚ(i) and ℚ(i)(ω).

mod approx;
mod field;
pub mod lattice;
pub mod lp;
mod matrix;
mod poly;
mod qi;
mod ratfunc;
mod subspace;

pub use approx::{c64_matrix, ApproxVector};
pub use field::Field;
pub use matrix::{vecops, Matrix};
pub use poly::{Mono, Poly, Var};
pub use qi::{ParseQiError, QI};
pub use ratfunc::RatFunc;
pub use subspace::Subspace;

/// Exact scalar: a rational function in ω (and auxiliary symbols) over ℚ(i).
pub type Scalar = RatFunc;
pub type ExactMatrix = Matrix<Scalar>;

/// How the formal parameter ω is treated.
#[derive(Clone, Debug, PartialEq)]
pub enum OmegaMode {
    Formal,
    Instantiated(QI),
}

impl OmegaMode {
    pub fn value(&self) -> Option<&QI> {
        match self {
            OmegaMode::Formal => None,
            OmegaMode::Instantiated(c) => Some(c),
        }
    }
}

/// Replaces ω by `c` and ω̄ by `conj(c)`.
pub fn instantiate(x: &Scalar, c: &QI) -> Scalar {
    if !x.involves(Var::is_omega) {
        return x.clone();
    }
    let cc = c.conj();
    x.substitute(&|v| match v {
        Var::Omega => Some(RatFunc::constant(c.clone())),
        Var::OmegaBar => Some(RatFunc::constant(cc.clone())),
        _ => None,
    })
}

pub fn instantiate_matrix(m: &ExactMatrix, c: &QI) -> ExactMatrix {
    m.map(|x| instantiate(x, c))
}

pub fn instantiate_vec(v: &[Scalar], c: &QI) -> Vec<Scalar> {
    v.iter().map(|x| instantiate(x, c)).collect()
}

/// The constant value of a symbol-free scalar.
pub fn to_qi(x: &Scalar) -> Option<QI> {
    x.as_constant()
}

pub fn matrix_to_qi(m: &ExactMatrix) -> Option<Matrix<QI>> {
    m.try_map(to_qi)
}

pub fn matrix_from_qi(m: &Matrix<QI>) -> ExactMatrix {
    m.map(|x| RatFunc::constant(x.clone()))
}

pub fn vec_to_qi(v: &[Scalar]) -> Option<Vec<QI>> {
    v.iter().map(to_qi).collect()
}

pub fn vec_from_qi(v: &[QI]) -> Vec<Scalar> {
    v.iter().map(|x| RatFunc::constant(x.clone())).collect()
}

/// Whether a scalar is fixed by conjugation.
pub fn is_real(x: &Scalar) -> bool {
    x.conj() == *x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instantiation_commutes_with_arithmetic() {
        let w = RatFunc::omega();
        let a = &(&w * &w) + &RatFunc::int(1);
        let b = &w.conj() - &RatFunc::constant(QI::i());
        let c = QI::gaussian(1, 1);
        assert_eq!(instantiate(&(&a * &b), &c), &instantiate(&a, &c) * &instantiate(&b, &c));
        assert_eq!(instantiate(&(&a / &b), &c), &instantiate(&a, &c) / &instantiate(&b, &c));
    }
}
