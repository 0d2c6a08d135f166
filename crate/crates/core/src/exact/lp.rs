//! Exact feasibility of small systems of linear inequalities over ℚ.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::matrix::Matrix;
use super::qi::QI;

/// One constraint `coeffs · x ≥ rhs`.
#[derive(Clone, Debug)]
struct Ineq {
    coeffs: Vec<BigRational>,
    rhs: BigRational,
}

/// Finds `x` with `A x ≥ b` by Fourier–Motzkin elimination, or `None` if infeasible.
pub fn feasible_point(a: &[Vec<BigRational>], b: &[BigRational], nvars: usize) -> Option<Vec<BigRational>> {
    let mut stages: Vec<Vec<Ineq>> = Vec::with_capacity(nvars + 1);
    let mut cur: Vec<Ineq> = a
        .iter()
        .zip(b)
        .map(|(c, r)| Ineq { coeffs: c.clone(), rhs: r.clone() })
        .collect();
    for k in (0..nvars).rev() {
        stages.push(cur.clone());
        let (mut pos, mut neg, mut rest) = (Vec::new(), Vec::new(), Vec::new());
        for ineq in cur {
            if ineq.coeffs[k].is_positive() {
                pos.push(ineq);
            } else if ineq.coeffs[k].is_negative() {
                neg.push(ineq);
            } else {
                rest.push(ineq);
            }
        }
        for p in &pos {
            for n in &neg {
                let sp = -n.coeffs[k].clone();
                let sn = p.coeffs[k].clone();
                let coeffs: Vec<BigRational> =
                    p.coeffs.iter().zip(&n.coeffs).map(|(x, y)| x * &sp + y * &sn).collect();
                rest.push(Ineq { coeffs, rhs: &p.rhs * &sp + &n.rhs * &sn });
            }
        }
        cur = dedup(rest);
    }
    if cur.iter().any(|c| c.rhs.is_positive()) {
        return None;
    }
    stages.reverse();
    let mut x = vec![BigRational::zero(); nvars];
    for (k, stage) in stages.iter().enumerate() {
        let mut lo: Option<BigRational> = None;
        let mut hi: Option<BigRational> = None;
        for c in stage {
            let a = &c.coeffs[k];
            if a.is_zero() {
                continue;
            }
            let known: BigRational = (0..k).map(|j| &c.coeffs[j] * &x[j]).sum();
            let bound = (&c.rhs - known) / a;
            if a.is_positive() {
                lo = Some(match lo {
                    Some(l) if l >= bound => l,
                    _ => bound,
                });
            } else {
                hi = Some(match hi {
                    Some(h) if h <= bound => h,
                    _ => bound,
                });
            }
        }
        x[k] = match (lo, hi) {
            (Some(l), Some(h)) => {
                if l > h {
                    return None;
                }
                l
            }
            (Some(l), None) => l,
            (None, Some(h)) => h,
            (None, None) => BigRational::zero(),
        };
    }
    Some(x)
}

fn dedup(v: Vec<Ineq>) -> Vec<Ineq> {
    let mut out: Vec<Ineq> = Vec::new();
    for c in v {
        if c.coeffs.iter().all(|x| x.is_zero()) {
            if c.rhs.is_positive() {
                out.push(c);
            }
            continue;
        }
        let scale = c.coeffs.iter().find(|x| !x.is_zero()).unwrap().abs();
        let n = Ineq {
            coeffs: c.coeffs.iter().map(|x| x / &scale).collect(),
            rhs: &c.rhs / &scale,
        };
        if let Some(e) = out.iter_mut().find(|e| e.coeffs == n.coeffs) {
            if n.rhs > e.rhs {
                e.rhs = n.rhs;
            }
        } else {
            out.push(n);
        }
    }
    out
}

/// A vector with all coordinates ≥ 1 in the null space of a rational matrix, if one exists.
///
/// Since the null space is a cone-invariant subspace, this decides whether it meets the open
/// positive orthant.
pub fn positive_kernel_vector(a: &[Vec<BigRational>], n: usize) -> Option<Vec<BigRational>> {
    if n == 0 {
        return None;
    }
    let basis: Vec<Vec<QI>> = if a.is_empty() {
        (0..n)
            .map(|i| (0..n).map(|j| if i == j { QI::one() } else { QI::zero() }).collect())
            .collect()
    } else {
        let m: Matrix<QI> = Matrix::from_rows(
            a.iter().map(|r| r.iter().map(|x| QI::from_rational(x.clone())).collect()).collect(),
        );
        m.kernel_vectors()
    };
    if basis.is_empty() {
        return None;
    }
    let d = basis.len();
    let rows: Vec<Vec<BigRational>> = (0..n).map(|i| basis.iter().map(|v| v[i].re.clone()).collect()).collect();
    let rhs = vec![BigRational::one(); n];
    let c = feasible_point(&rows, &rhs, d)?;
    Some(rows.iter().map(|r| r.iter().zip(&c).map(|(x, y)| x * y).sum()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn simple_box() {
        let a = vec![vec![r(1), r(0)], vec![r(-1), r(0)], vec![r(0), r(1)]];
        let b = vec![r(1), r(-3), r(2)];
        let x = feasible_point(&a, &b, 2).unwrap();
        assert!(x[0] >= r(1) && x[0] <= r(3) && x[1] >= r(2));
        let bad = vec![vec![r(1)], vec![r(-1)]];
        assert!(feasible_point(&bad, &[r(2), r(-1)], 1).is_none());
    }

    #[test]
    fn positive_relations() {
        // a1 − a2 = 0 has the positive solution (1,1)
        let v = positive_kernel_vector(&[vec![r(1), r(-1)]], 2).unwrap();
        assert_eq!(v[0], v[1]);
        // a1 + a2 = 0 has none
        assert!(positive_kernel_vector(&[vec![r(1), r(1)]], 2).is_none());
    }
}
