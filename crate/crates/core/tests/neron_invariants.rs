use proptest::prelude::*;

use hodge_neron_core::exact::{vecops, Matrix, OmegaMode, RatFunc, Scalar, Var, QI};
use hodge_neron_core::hodge::Splitting;
use hodge_neron_core::neron::{f0m_presentation, fiber, Locus};
use hodge_neron_core::normal_function::{singularity_class, MixedOrbitData, SingularityKind};
use hodge_neron_core::orbit::NilpotentOrbitData;

fn c(n: i64) -> Scalar {
    RatFunc::int(n)
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn example2() -> NilpotentOrbitData {
    let w = RatFunc::omega();
    let wb = RatFunc::var(Var::OmegaBar);
    let n: Matrix<Scalar> = Matrix::from_int_rows(&[&[0, 0, 1, 0], &[0, 0, 0, 1], &[0, 0, 0, 0], &[0, 0, 0, 0]]);
    NilpotentOrbitData {
        omega: OmegaMode::Instantiated(QI::i()),
        q: Matrix::from_int_rows(&[&[0, 0, -1, 0], &[0, 0, 0, -1], &[1, 0, 0, 0], &[0, 1, 0, 0]]),
        ns: vec![n.clone(), n],
        splitting: Splitting::from_vectors(
            4,
            &[
                ((1, -1), vec![vec![c(0), c(0), c(1), w.clone()]]),
                ((-1, 1), vec![vec![c(0), c(0), c(1), wb.clone()]]),
                ((0, -2), vec![vec![c(1), w, c(0), c(0)]]),
                ((-2, 0), vec![vec![c(1), wb, c(0), c(0)]]),
            ],
        ),
        delta: Matrix::zeros(4, 4),
        gamma: vec![],
        weight: -1,
    }
}

/// Rank-2 `H` with `N₁ = N₂ = k·E₁₂` and `N′_j` sending the unit vector to `a_j e₁`.
fn rank_two_mixed(k: i64, a1: i64, a2: i64) -> MixedOrbitData {
    let n: Matrix<Scalar> = Matrix::from_int_rows(&[&[0, k], &[0, 0]]);
    let base = NilpotentOrbitData {
        omega: OmegaMode::Formal,
        q: Matrix::from_int_rows(&[&[0, 1], &[-1, 0]]),
        ns: vec![n.clone(), n],
        splitting: Splitting::from_vectors(2, &[((0, 0), vec![vec![c(0), c(1)]]), ((-1, -1), vec![vec![c(1), c(0)]])]),
        delta: Matrix::zeros(2, 2),
        gamma: vec![],
        weight: -1,
    };
    MixedOrbitData {
        base,
        n_prime: vec![
            Matrix::from_int_rows(&[&[0, k, a1], &[0, 0, 0], &[0, 0, 0]]),
            Matrix::from_int_rows(&[&[0, k, a2], &[0, 0, 0], &[0, 0, 0]]),
        ],
        splitting: Splitting::from_vectors(
            3,
            &[((0, 0), vec![vec![c(0), c(1), c(0)], vec![c(0), c(0), c(1)]]), ((-1, -1), vec![vec![c(1), c(0), c(0)]])],
        ),
        delta_prime: Matrix::zeros(3, 3),
        gamma_prime: vec![],
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn fiber_dimension_jumps_only_at_origin(a in -6i64..=6, b in -6i64..=6, d in 1i64..=5) {
        let p = f0m_presentation(&example2(), 2).unwrap();
        let at = Locus::Point(vec![QI::ratio(a, d), QI::ratio(b, d)]);
        let f = fiber(&p, &at);
        prop_assert_eq!(f.generic_dim, 2);
        prop_assert_eq!(f.singular, a == 0 && b == 0);
        prop_assert_eq!(f.vector_dim, if f.singular { 3 } else { 2 });
    }

    #[test]
    fn singularity_class_is_invariant(
        k in 1i64..=3,
        a1 in -3i64..=3,
        a2 in -3i64..=3,
        h in prop::collection::vec(-4i64..=4, 2),
        j in 0usize..2,
    ) {
        let x = rank_two_mixed(k, a1, a2);
        let v = vec![QI::int(h[0]), QI::int(h[1]), QI::one()];
        let kind = singularity_class(&x, &v).unwrap().kind;
        let moved = vecops::add(&v, &vecops::unit(3, j));
        prop_assert_eq!(singularity_class(&x, &moved).unwrap().kind, kind.clone());
        // the cocycle (a₁ + k h₂, a₂ + k h₂) is a rational coboundary iff a₁ = a₂, of order k/gcd(k, a₁)
        let order = k / gcd(k, a1.abs());
        let expected = match (a1 == a2, order) {
            (false, _) => SingularityKind::Nontorsion,
            (true, 1) => SingularityKind::Zero,
            (true, m) => SingularityKind::Torsion(m.to_string()),
        };
        prop_assert_eq!(kind, expected);
    }
}
