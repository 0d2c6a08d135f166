//! Integer lattices inside rational vector spaces.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::matrix::Matrix;
use super::qi::QI;

fn lcm_denoms(v: &[BigRational]) -> BigInt {
    v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

/// Scales a rational vector by the lcm of its denominators.
pub fn clear_denominators(v: &[BigRational]) -> Vec<BigInt> {
    let d = lcm_denoms(v);
    v.iter().map(|x| (x * BigRational::from_integer(d.clone())).to_integer()).collect()
}

/// Basis of `ℤⁿ ∩ ker A` for a rational matrix `A`, via unimodular column reduction.
pub fn integer_kernel(a: &[Vec<BigRational>], n: usize) -> Vec<Vec<BigInt>> {
    let rows: Vec<Vec<BigInt>> = a.iter().map(|r| clear_denominators(r)).collect();
    let mut m = rows;
    let mut u: Vec<Vec<BigInt>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();
    // Column operations on m are mirrored on u (stored column-major as u[col]).
    let col_op = |m: &mut Vec<Vec<BigInt>>, u: &mut Vec<Vec<BigInt>>, c1: usize, c2: usize, a11: &BigInt, a12: &BigInt, a21: &BigInt, a22: &BigInt| {
        for row in m.iter_mut() {
            let x = row[c1].clone();
            let y = row[c2].clone();
            row[c1] = a11 * &x + a21 * &y;
            row[c2] = a12 * &x + a22 * &y;
        }
        let x = u[c1].clone();
        let y = u[c2].clone();
        u[c1] = x.iter().zip(&y).map(|(p, q)| a11 * p + a21 * q).collect();
        u[c2] = x.iter().zip(&y).map(|(p, q)| a12 * p + a22 * q).collect();
    };
    let mut r = 0;
    for i in 0..m.len() {
        if r == n {
            break;
        }
        for c in r + 1..n {
            if m[i][c].is_zero() {
                continue;
            }
            let a = m[i][r].clone();
            let b = m[i][c].clone();
            let g = a.extended_gcd(&b);
            // [a b] · [[x, -b/g],[y, a/g]] = [g, 0]
            let bg = &b / &g.gcd;
            let ag = &a / &g.gcd;
            col_op(&mut m, &mut u, r, c, &g.x, &(-bg), &g.y, &ag);
        }
        if !m[i][r].is_zero() {
            r += 1;
        }
    }
    (r..n).map(|c| u[c].clone()).collect()
}

/// A ℤ-basis (Hermite rows) of the lattice generated by rational vectors.
pub fn lattice_basis(gens: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    if gens.is_empty() {
        return Vec::new();
    }
    let n = gens[0].len();
    let d = gens.iter().fold(BigInt::one(), |acc, g| acc.lcm(&lcm_denoms(g)));
    let dq = BigRational::from_integer(d.clone());
    let mut rows: Vec<Vec<BigInt>> = gens
        .iter()
        .map(|g| g.iter().map(|x| (x * &dq).to_integer()).collect())
        .collect();
    let mut out = Vec::new();
    let mut top = 0;
    for c in 0..n {
        loop {
            let nz: Vec<usize> = (top..rows.len()).filter(|&i| !rows[i][c].is_zero()).collect();
            if nz.len() <= 1 {
                break;
            }
            let piv = *nz.iter().min_by_key(|&&i| rows[i][c].abs()).unwrap();
            for &i in &nz {
                if i == piv {
                    continue;
                }
                let q = rows[i][c].div_floor(&rows[piv][c]);
                let p = rows[piv].clone();
                for (x, y) in rows[i].iter_mut().zip(&p) {
                    *x -= &q * y;
                }
            }
        }
        if let Some(i) = (top..rows.len()).find(|&i| !rows[i][c].is_zero()) {
            rows.swap(top, i);
            if rows[top][c].is_negative() {
                for x in rows[top].iter_mut() {
                    *x = -x.clone();
                }
            }
            top += 1;
        }
    }
    for row in rows.iter().take(top) {
        out.push(row.iter().map(|x| BigRational::new(x.clone(), d.clone())).collect());
    }
    out
}

/// Splits a Gaussian vector into real and imaginary rational parts.
pub fn realify(v: &[QI]) -> Vec<BigRational> {
    let mut out: Vec<BigRational> = v.iter().map(|x| x.re.clone()).collect();
    out.extend(v.iter().map(|x| x.im.clone()));
    out
}

pub fn rational_rank(vecs: &[Vec<BigRational>]) -> usize {
    if vecs.is_empty() {
        return 0;
    }
    let m: Matrix<QI> = Matrix::from_rows(
        vecs.iter().map(|v| v.iter().map(|x| QI::from_rational(x.clone())).collect()).collect(),
    );
    m.rank()
}

/// Rank over ℝ of the ℤ-span of Gaussian vectors.
pub fn real_rank(vecs: &[Vec<QI>]) -> usize {
    let r: Vec<Vec<BigRational>> = vecs.iter().map(|v| realify(v)).collect();
    rational_rank(&r)
}

/// Rank over ℂ of the span of Gaussian vectors.
pub fn complex_rank(vecs: &[Vec<QI>]) -> usize {
    if vecs.is_empty() {
        return 0;
    }
    Matrix::from_rows(vecs.to_vec()).rank()
}

pub fn to_rational_vec(v: &[BigInt]) -> Vec<BigRational> {
    v.iter().map(|x| BigRational::from_integer(x.clone())).collect()
}

/// Smallest `k ≥ 1` with `k·x` having integral coordinates.
pub fn denominator_order(coords: &[BigRational]) -> BigInt {
    lcm_denoms(coords)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn kernel_of_single_row() {
        let a = vec![vec![r(2), r(4), r(0)]];
        let k = integer_kernel(&a, 3);
        assert_eq!(k.len(), 2);
        for v in &k {
            let s: BigInt = v[0].clone() * 2 + v[1].clone() * 4;
            assert!(s.is_zero());
        }
        // saturation: (−2, 1, 0) must be reachable with unit coefficients
        let m: Matrix<QI> = Matrix::from_rows(k.iter().map(|v| v.iter().map(|x| QI::from_rational(BigRational::from_integer(x.clone()))).collect()).collect());
        let target = vec![QI::int(-2), QI::int(1), QI::int(0)];
        let c = m.transpose().solve(&target).unwrap();
        assert!(c.iter().all(|x| x.re.is_integer() && x.is_real()));
    }

    #[test]
    fn basis_of_redundant_generators() {
        let g = vec![vec![r(2), r(0)], vec![r(3), r(0)], vec![r(0), BigRational::new(1.into(), 2.into())]];
        let b = lattice_basis(&g);
        assert_eq!(b.len(), 2);
        assert_eq!(b[0], vec![r(1), r(0)]);
    }
}
