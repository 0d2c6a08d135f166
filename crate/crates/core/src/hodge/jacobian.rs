//! Intermediate Jacobians and the two constructions of the extension class.

use num_rational::BigRational;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{pairing, MixedHodgeData};
use crate::error::{Error, Result};
use crate::exact::lattice::{complex_rank, real_rank, realify};
use crate::exact::{vecops, Matrix, Subspace, QI};

/// An extension `0 → H → V → ℤ(0) → 0` with `V = H ⊕ ℤ`, last coordinate the quotient.
#[derive(Clone, Debug)]
pub struct ExtensionData {
    /// Polarization of `H`, `Q(x,y) = xᵀ S y`.
    pub q: Matrix<QI>,
    /// `F⁰V_ℂ` inside `ℂ^{n+1}`.
    pub f0: Subspace<QI>,
    /// Integral lift of `1`.
    pub v_z: Vec<QI>,
}

/// A point of `J(H)` as values on a basis of `F⁰H_ℂ`, with its reduction mod the lattice.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AjPoint {
    pub functional: Vec<String>,
    /// Real coordinates in the basis `e_1..e_n` of `H_ℤ`, reduced into `[0,1)`.
    pub reduced: Vec<String>,
    #[serde(skip)]
    pub reduced_exact: Vec<BigRational>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AjPoints {
    pub j1: AjPoint,
    pub j2: AjPoint,
    pub agree: bool,
}

fn frac(x: &BigRational) -> BigRational {
    x - x.floor()
}

impl ExtensionData {
    pub fn rank_h(&self) -> usize {
        self.q.rows()
    }

    /// `F⁰H_ℂ = F⁰V ∩ H_ℂ`, as vectors in `ℂⁿ`.
    pub fn f0_h(&self) -> Vec<Vec<QI>> {
        let n = self.rank_h();
        let h = Subspace::span(n + 1, &(0..n).map(|i| vecops::unit(n + 1, i)).collect::<Vec<_>>());
        self.f0.intersect(&h).basis().iter().map(|v| v[..n].to_vec()).collect()
    }

    /// The element of `F⁰V` with last coordinate `1`, normalized against `F⁰H`.
    pub fn canonical_vf(&self) -> Result<Vec<QI>> {
        let n = self.rank_h();
        self.f0
            .basis()
            .iter()
            .find(|v| !v[n].is_zero())
            .map(|v| vecops::scale(v, &v[n].inv()))
            .ok_or_else(|| Error::NoLift("F^0 V lies inside H".into()))
    }

    fn check_lift(&self) -> Result<()> {
        let n = self.rank_h();
        if self.v_z.len() != n + 1 || !self.v_z[n].is_one() {
            return Err(Error::NoIntegralLift);
        }
        if !self.v_z.iter().all(|x| x.is_real() && x.re.is_integer()) {
            return Err(Error::NoIntegralLift);
        }
        Ok(())
    }
}

/// `J1`: the class of `v_F − v_ℤ` in `H_ℂ/(F⁰H + H_ℤ)`, reduced through `H_ℝ ≅ H_ℂ/F⁰H`.
fn j1_point(e: &ExtensionData, vf: &[QI]) -> Result<AjPoint> {
    let n = e.rank_h();
    let x: Vec<QI> = (0..n).map(|i| &vf[i] - &e.v_z[i]).collect();
    let f0 = e.f0_h();
    let g = f0.len();
    // x = Σ c_k f_k + r with c complex and r real; unknowns (Re c, Im c, r)
    let mut cols: Vec<Vec<QI>> = Vec::new();
    for f in &f0 {
        cols.push(realify(f).into_iter().map(QI::from_rational).collect());
        let jf: Vec<QI> = f.iter().map(|z| z * &QI::i()).collect();
        cols.push(realify(&jf).into_iter().map(QI::from_rational).collect());
    }
    for i in 0..n {
        cols.push(realify(&vecops::unit::<QI>(n, i)).into_iter().map(QI::from_rational).collect());
    }
    let m = Matrix::from_cols(2 * n, &cols);
    let rhs: Vec<QI> = realify(&x).into_iter().map(QI::from_rational).collect();
    let sol = m.solve(&rhs).map_err(|_| Error::NotMhs("H_R does not complement F^0 H".into()))?;
    let r: Vec<BigRational> = sol[2 * g..].iter().map(|z| z.re.clone()).collect();
    let functional: Vec<QI> = f0.iter().map(|f| pairing(&e.q, &x, f)).collect();
    Ok(point(functional, r))
}

/// `J2`: for each `h ∈ F⁰H`, extend `Q(h,·)` to `φ_h` on `V` killing `F⁰V`, evaluate at `v_ℤ`,
/// and reduce against the lattice functionals `Q(e_i, ·)`.
fn j2_point(e: &ExtensionData) -> Result<AjPoint> {
    let n = e.rank_h();
    let f0 = e.f0_h();
    let mut functional = Vec::new();
    for h in &f0 {
        let mut a = e.q.transpose().mul_vec(h);
        a.push(QI::zero());
        // φ_h = a + t e*_n, with φ_h(u) = 0 on F⁰V
        let mut t: Option<QI> = None;
        for u in e.f0.basis() {
            let base = vecops::dot(&a[..n], &u[..n]);
            if u[n].is_zero() {
                if !base.is_zero() {
                    return Err(Error::NotMhs("F^0 H is not isotropic".into()));
                }
                continue;
            }
            let val = -(&base / &u[n]);
            match &t {
                Some(t0) if *t0 != val => return Err(Error::NotMhs("no functional kills F^0 V".into())),
                _ => t = Some(val),
            }
        }
        a[n] = t.unwrap_or_else(QI::zero);
        // φ_h(v_ℤ) = Q(h, v_ℤ − v_F) = Q(v_F − v_ℤ, h)
        functional.push(vecops::dot(&a, &e.v_z));
    }
    // Σ c_i Q(e_i, f_k) = functional_k with c real
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for (k, h) in f0.iter().enumerate() {
        let lam: Vec<QI> = (0..n).map(|i| pairing(&e.q, &vecops::unit(n, i), h)).collect();
        rows.push(lam.iter().map(|z| QI::from_rational(z.re.clone())).collect::<Vec<_>>());
        rows.push(lam.iter().map(|z| QI::from_rational(z.im.clone())).collect::<Vec<_>>());
        rhs.push(QI::from_rational(functional[k].re.clone()));
        rhs.push(QI::from_rational(functional[k].im.clone()));
    }
    let m = Matrix::from_rows(rows);
    let c = m.solve(&rhs).map_err(|_| Error::NotMhs("lattice functionals do not span".into()))?;
    let r: Vec<BigRational> = c.iter().map(|z| z.re.clone()).collect();
    Ok(point(functional, r))
}

fn point(functional: Vec<QI>, r: Vec<BigRational>) -> AjPoint {
    let reduced_exact: Vec<BigRational> = r.iter().map(frac).collect();
    AjPoint {
        functional: functional.iter().map(|z| z.to_string()).collect(),
        reduced: reduced_exact.iter().map(|z| z.to_string()).collect(),
        reduced_exact,
    }
}

/// Both constructions of the extension class, with an explicit lift `v_F ∈ F⁰V`.
pub fn aj_points_with(e: &ExtensionData, vf: &[QI]) -> Result<AjPoints> {
    e.check_lift()?;
    let n = e.rank_h();
    if !e.f0.contains(vf) || !vf[n].is_one() {
        return Err(Error::PreconditionViolated("v_F must lie in F^0 V and map to 1".into()));
    }
    let j1 = j1_point(e, vf)?;
    let j2 = j2_point(e)?;
    let agree = j1.reduced_exact == j2.reduced_exact;
    Ok(AjPoints { j1, j2, agree })
}

pub fn aj_points(e: &ExtensionData) -> Result<AjPoints> {
    e.check_lift()?;
    let vf = e.canonical_vf()?;
    aj_points_with(e, &vf)
}

/// Shape of `J(H) = H_ℂ/(F⁰H_ℂ + H_ℤ)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JacobianShape {
    /// Complex dimension of `(F₀P_ℂ)^∨ ≅ H_ℂ/F⁰H_ℂ`.
    pub dim: usize,
    /// Real rank of the image of `H_ℤ`.
    pub torus_rank: usize,
    /// Directions not reached by the complex span of the lattice.
    pub vector_dim: usize,
}

/// Images of the standard basis of `H_ℤ` in coordinates on `H_ℂ/F⁰H_ℂ`.
pub fn lattice_image(f0: &Subspace<QI>) -> (usize, Vec<Vec<QI>>) {
    let n = f0.ambient();
    let comp = Subspace::full(n).complement_basis(f0);
    let d = comp.len();
    let mut cols: Vec<Vec<QI>> = f0.basis().to_vec();
    cols.extend(comp.iter().cloned());
    let frame = Matrix::from_cols(n, &cols);
    let imgs = (0..n)
        .map(|i| {
            let c = frame.solve(&vecops::unit(n, i)).expect("frame spans");
            c[f0.dim()..].to_vec()
        })
        .collect();
    (d, imgs)
}

pub fn generalized_jacobian_shape(h: &MixedHodgeData<QI>) -> JacobianShape {
    let n = h.ambient();
    if n == 0 {
        return JacobianShape { dim: 0, torus_rank: 0, vector_dim: 0 };
    }
    let (d, imgs) = lattice_image(&h.f.get(0));
    let torus_rank = real_rank(&imgs);
    let vector_dim = d - complex_rank(&imgs);
    JacobianShape { dim: d, torus_rank, vector_dim }
}

/// `{h ∈ H_ℤ : h ∈ F⁰H_ℂ}`, the kernel of `H_ℤ → (F₀P_ℂ)^∨`, as integer vectors.
pub fn jacobian_lattice_kernel(h: &MixedHodgeData<QI>) -> Vec<Vec<num_bigint::BigInt>> {
    let n = h.ambient();
    let (_, imgs) = lattice_image(&h.f.get(0));
    let d = imgs.first().map(|v| v.len()).unwrap_or(0);
    let mut rows = Vec::new();
    for k in 0..d {
        rows.push((0..n).map(|i| imgs[i][k].re.clone()).collect::<Vec<_>>());
        rows.push((0..n).map(|i| imgs[i][k].im.clone()).collect::<Vec<_>>());
    }
    crate::exact::lattice::integer_kernel(&rows, n)
}

/// A seeded extension of a rank-`2g` principally polarized `H` with period matrix `Z = X + iY`.
pub fn random_extension(g: usize, seed: u64) -> ExtensionData {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 2 * g;
    let mut a = Matrix::<QI>::zeros(g, g);
    let mut x = Matrix::<QI>::zeros(g, g);
    for i in 0..g {
        for j in 0..g {
            a.set(i, j, QI::int(rng.gen_range(-2..=2)));
            if j >= i {
                let v = QI::ratio(rng.gen_range(-6..=6), rng.gen_range(1..=4));
                x.set(i, j, v.clone());
                x.set(j, i, v);
            }
        }
    }
    let y = a.transpose().mul(&a).add(&Matrix::identity(g));
    let z = x.add(&y.scale(&QI::i()));
    let mut q = Matrix::zeros(n, n);
    for i in 0..g {
        q.set(i, g + i, QI::one());
        q.set(g + i, i, -QI::one());
    }
    let mut basis: Vec<Vec<QI>> = (0..g)
        .map(|k| {
            let mut v: Vec<QI> = (0..g).map(|i| z.get(i, k).clone()).collect();
            v.extend((0..g).map(|i| if i == k { QI::one() } else { QI::zero() }));
            v.push(QI::zero());
            v
        })
        .collect();
    let mut ext: Vec<QI> = (0..n)
        .map(|_| QI::new(
            BigRational::new(rng.gen_range(-9..=9i64).into(), rng.gen_range(1..=5i64).into()),
            BigRational::new(rng.gen_range(-9..=9i64).into(), rng.gen_range(1..=5i64).into()),
        ))
        .collect();
    ext.push(QI::one());
    basis.push(ext);
    let mut v_z: Vec<QI> = (0..n).map(|_| QI::int(rng.gen_range(-3..=3))).collect();
    v_z.push(QI::one());
    ExtensionData { q, f0: Subspace::span(n + 1, &basis), v_z }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_extension_is_zero() {
        let q = Matrix::from_rows(vec![vec![QI::zero(), QI::one()], vec![-QI::one(), QI::zero()]]);
        let f0 = Subspace::span(3, &[vec![QI::gaussian(0, 1), QI::one(), QI::zero()], vecops::unit(3, 2)]);
        let e = ExtensionData { q, f0, v_z: vecops::unit(3, 2) };
        let p = aj_points(&e).unwrap();
        assert!(p.agree);
        assert!(p.j1.reduced_exact.iter().all(|x| *x == BigRational::from_integer(0.into())));
    }

    #[test]
    fn elliptic_class_mod_lattice() {
        // τ = i, extension class g = 1/2 + i/3 ↦ v_F = (g, 0, 1) − (0, 0, 0)
        let q = Matrix::from_rows(vec![vec![QI::zero(), QI::one()], vec![-QI::one(), QI::zero()]]);
        let g = QI::new(BigRational::new(1.into(), 2.into()), BigRational::new(1.into(), 3.into()));
        let f0 = Subspace::span(
            3,
            &[vec![QI::i(), QI::one(), QI::zero()], vec![g.clone(), QI::zero(), QI::one()]],
        );
        let e = ExtensionData { q, f0, v_z: vecops::unit(3, 2) };
        let p = aj_points(&e).unwrap();
        assert!(p.agree);
        // g = a + b τ mod F⁰ means g·e1 ≡ (a − b·i·... ) : x = (g,0) = c(i,1) + r, r real
        // ⇒ c = −r₂, g = −r₂ i + r₁ ⇒ r₁ = 1/2, r₂ = −1/3 ≡ 2/3
        assert_eq!(p.j1.reduced, vec!["1/2".to_string(), "2/3".to_string()]);
    }

    #[test]
    fn classical_jacobian_shape() {
        let f = crate::filtration::Filtration::decreasing(
            2,
            0,
            vec![Subspace::span(2, &[vec![QI::i(), QI::one()]])],
        );
        let w = crate::filtration::Filtration::increasing(2, -1, vec![Subspace::full(2)]);
        let s = generalized_jacobian_shape(&MixedHodgeData::new(w, f));
        assert_eq!(s, JacobianShape { dim: 1, torus_rank: 2, vector_dim: 0 });
    }
}
