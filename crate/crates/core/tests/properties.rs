use std::collections::BTreeMap;

use num_rational::BigRational;
use proptest::prelude::*;

use hodge_neron_core::exact::{vecops, Matrix, Subspace, QI};
use hodge_neron_core::filtration::{is_weight_filtration, weight_filtration, Filtration};
use hodge_neron_core::hodge::jacobian::{aj_points, aj_points_with, random_extension};
use hodge_neron_core::sl2::{r_const, solve_w_system, unknown_order, w_forward, HodgeSignature};

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

fn unitriangular(k: usize, entries: &[i64], upper: bool) -> Matrix<QI> {
    let mut m = Matrix::identity(k);
    let mut it = entries.iter().cycle();
    for i in 0..k {
        for j in 0..k {
            if (upper && j > i) || (!upper && j < i) {
                m.set(i, j, QI::int(*it.next().unwrap()));
            }
        }
    }
    m
}

fn nilpotent() -> impl Strategy<Value = Matrix<QI>> {
    (1usize..=5, prop::collection::vec(-2i64..=2, 15), prop::collection::vec(-1i64..=1, 15)).prop_map(
        |(k, upper, conj)| {
            let mut u = Matrix::zeros(k, k);
            let mut it = upper.iter().cycle();
            for i in 0..k {
                for j in i + 1..k {
                    u.set(i, j, QI::int(*it.next().unwrap()));
                }
            }
            let p = unitriangular(k, &conj, false).mul(&unitriangular(k, &conj[3..], true));
            p.mul(&u).mul(&p.inverse().unwrap())
        },
    )
}

fn signature() -> impl Strategy<Value = HodgeSignature> {
    prop::collection::btree_map((0i32..=3, 0i32..=3), 1usize..=2, 1..=3).prop_map(|m| {
        // p ≥ 0 with ℓ = −1−p−q fixed by the second key
        m.into_iter().map(|((p, l), d)| ((p, -1 - l - p), d)).collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn weight_filtration_axioms(n in nilpotent(), center in -2i32..=2) {
        let w = weight_filtration(&n, center).unwrap();
        prop_assert!(is_weight_filtration(&n, &w, center));
        let (a, b) = w.range();
        for k in a - 1..=b + 2 {
            prop_assert!(w.get(k - 2).contains_space(&w.get(k).apply(&n)));
        }
        for l in 1..=b - center + 1 {
            prop_assert_eq!(w.gr_dim(center + l), w.gr_dim(center - l));
            let low = w.get(center - l - 1);
            let img = w.get(center + l).apply(&n.pow(l as usize)).sum(&low);
            prop_assert_eq!(img.dim() - low.dim(), w.gr_dim(center + l));
        }
        if !n.is_zero() {
            prop_assert!(!is_weight_filtration(&n, &w.shift(1), center));
        }
    }

    #[test]
    fn r_recursions(l in 0i64..=12, b in 0i64..=12, a in 0i64..=12) {
        prop_assume!(a <= b && b <= l);
        if a < b {
            prop_assert_eq!(r_const(a + 1, b, l), r_const(a, b, l) * r_const(1, b - a, l));
        }
        if b < l {
            prop_assert_eq!(r_const(1, b + 1, l), r_const(1, b, l) + rat(l - 2 * b));
        }
        prop_assert_eq!(r_const(0, b, l), rat(1));
    }

    #[test]
    fn w_system_roundtrip(sig in signature(), seed in prop::collection::vec(-4i64..=4, 8)) {
        let mut it = seed.iter().cycle();
        let w: BTreeMap<_, Vec<QI>> = unknown_order(&sig)
            .into_iter()
            .map(|k| (k, (0..2).map(|_| QI::gaussian(*it.next().unwrap(), *it.next().unwrap())).collect()))
            .collect();
        let sol = solve_w_system(&sig, &w_forward(&sig, &w)).unwrap();
        prop_assert_eq!(sol.w, w);
        prop_assert_eq!(sol.determinant.norm_sqr(), rat(1));
    }

    #[test]
    fn abel_jacobi_agreement(g in 1usize..=2, seed in 0u64..1000, c in -3i64..=3, k in 0usize..4) {
        let e = random_extension(g, seed);
        let p = aj_points(&e).unwrap();
        prop_assert!(p.agree);
        let vf = e.canonical_vf().unwrap();
        let f = e.f0_h()[0].clone();
        let moved = vecops::add(&vf, &vecops::scale(&[f, vec![QI::zero()]].concat(), &QI::gaussian(c, 1)));
        prop_assert_eq!(aj_points_with(&e, &moved).unwrap().j1.reduced_exact, p.j1.reduced_exact.clone());
        let mut shifted = e.clone();
        let k = k % e.rank_h();
        shifted.v_z = vecops::add(&e.v_z, &vecops::scale(&vecops::unit(e.rank_h() + 1, k), &QI::int(c)));
        prop_assert_eq!(aj_points(&shifted).unwrap().j2.reduced_exact, p.j2.reduced_exact);
    }
}

#[test]
fn trivial_filtration_is_weight_of_zero_only() {
    let n: Matrix<QI> = Matrix::from_int_rows(&[&[0, 1], &[0, 0]]);
    let trivial = Filtration::increasing(2, 0, vec![Subspace::full(2)]);
    assert!(!is_weight_filtration(&n, &trivial, 0));
    assert!(is_weight_filtration(&Matrix::zeros(2, 2), &trivial, 0));
}
