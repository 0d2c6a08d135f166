//! Nilpotent orbits in normal form, the sections `σ_{I,v}`, the norms `Z` and `B`, and
//! finite-grid scans of the main estimate.

use num_complex::Complex64;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{
    c64_matrix, instantiate_matrix, matrix_to_qi, vecops, ExactMatrix, Field, Matrix, OmegaMode, RatFunc, Scalar,
    Var, QI,
};
use crate::filtration::Filtration;
use crate::hodge::{inst_filtration, inst_splitting, pairing, positivity_exact, Splitting};
use crate::sl2::complete_sl2;

/// One term `s^α · G_α` of the truncated `Γ(s)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaTerm {
    pub exponents: Vec<u32>,
    pub matrix: ExactMatrix,
}

#[derive(Clone, Debug)]
pub struct NilpotentOrbitData {
    pub omega: OmegaMode,
    pub q: ExactMatrix,
    pub ns: Vec<ExactMatrix>,
    /// Limit splitting `I^{p,q}` of `(W, F)`.
    pub splitting: Splitting<Scalar>,
    pub delta: ExactMatrix,
    pub gamma: Vec<GammaTerm>,
    pub weight: i32,
}

/// ω used for floating scans when the scenario leaves it formal.
pub fn default_numeric_omega() -> QI {
    QI::gaussian(1, 1)
}

pub fn z_var(j: usize) -> Scalar {
    RatFunc::var(Var::Z(j as u8))
}

pub fn s_var(j: usize) -> Scalar {
    RatFunc::var(Var::S(j as u8))
}

/// Subsets of `{0..n}` in order of size, then lexicographically.
pub fn subsets(n: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = (0u32..1 << n)
        .map(|mask| (0..n).filter(|j| mask & (1 << j) != 0).collect())
        .collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    out
}

impl NilpotentOrbitData {
    pub fn rank(&self) -> usize {
        self.q.rows()
    }

    pub fn n_vars(&self) -> usize {
        self.ns.len()
    }

    pub fn f(&self) -> Filtration<Scalar> {
        self.splitting.hodge_filtration()
    }

    pub fn w(&self) -> Filtration<Scalar> {
        self.splitting.weight_filtration()
    }

    /// The data with ω replaced by its pinned value, if any.
    pub fn resolved(&self) -> NilpotentOrbitData {
        let Some(c) = self.omega.value() else { return self.clone() };
        let m = |x: &ExactMatrix| instantiate_matrix(x, c);
        NilpotentOrbitData {
            omega: self.omega.clone(),
            q: m(&self.q),
            ns: self.ns.iter().map(m).collect(),
            splitting: inst_splitting(&self.splitting, c)
                .map(|s| s.map_field(|x| RatFunc::constant(x.clone())))
                .unwrap_or_else(|| self.splitting.clone()),
            delta: m(&self.delta),
            gamma: self.gamma.iter().map(|g| GammaTerm { exponents: g.exponents.clone(), matrix: m(&g.matrix) }).collect(),
            weight: self.weight,
        }
    }

    pub fn numeric_omega(&self) -> QI {
        self.omega.value().cloned().unwrap_or_else(default_numeric_omega)
    }

    /// `Σ c_j N_j`.
    pub fn n_combination(&self, c: &[Scalar]) -> ExactMatrix {
        let d = self.rank();
        self.ns.iter().zip(c).fold(Matrix::zeros(d, d), |acc, (n, x)| acc.add(&n.scale(x)))
    }

    /// `Γ(s)` with symbolic `s_j`.
    pub fn gamma_symbolic(&self) -> ExactMatrix {
        let d = self.rank();
        let mut acc = Matrix::zeros(d, d);
        for g in &self.gamma {
            let mut mono = RatFunc::one();
            for (j, e) in g.exponents.iter().enumerate() {
                mono = &mono * &s_var(j).pow(*e);
            }
            acc = acc.add(&g.matrix.scale(&mono));
        }
        acc
    }

    /// `e^{X(z)} = e^{iδ} e^{Σ z_j N_j} e^{Γ(s)}` with symbolic `z`, `s`.
    pub fn exp_x_symbolic(&self) -> Result<ExactMatrix> {
        let i = RatFunc::constant(QI::i());
        let z: Vec<Scalar> = (0..self.n_vars()).map(z_var).collect();
        let a = self.delta.scale(&i).nilpotent_exp()?;
        let b = self.n_combination(&z).nilpotent_exp()?;
        let c = self.gamma_symbolic().nilpotent_exp()?;
        Ok(a.mul(&b).mul(&c))
    }

    /// `e^{−X(z)}`.
    pub fn exp_minus_x_symbolic(&self) -> Result<ExactMatrix> {
        let i = RatFunc::constant(QI::i());
        let z: Vec<Scalar> = (0..self.n_vars()).map(|j| -z_var(j)).collect();
        let a = self.delta.scale(&-i).nilpotent_exp()?;
        let b = self.n_combination(&z).nilpotent_exp()?;
        let c = self.gamma_symbolic().neg().nilpotent_exp()?;
        Ok(c.mul(&b).mul(&a))
    }

    /// `Φ̃(z) = e^{X(z)} F` with symbolic `z`.
    pub fn eval_period_symbolic(&self) -> Result<Filtration<Scalar>> {
        Ok(self.f().apply(&self.exp_x_symbolic()?))
    }

    /// `Φ̃(z)` at exact `z` with `s` supplied (its value `e^{2πiz}` is transcendental).
    pub fn eval_period_at(&self, z: &[QI], s: &[QI]) -> Result<Filtration<Scalar>> {
        let e = self.exp_x_symbolic()?;
        let sub = e.map(|x| {
            x.substitute(&|v| match v {
                Var::Z(j) => z.get(j as usize).cloned().map(RatFunc::constant),
                Var::S(j) => s.get(j as usize).cloned().map(RatFunc::constant),
                _ => None,
            })
        });
        Ok(self.f().apply(&sub))
    }

    /// `Π_{j∈I} N_j v`.
    pub fn n_product(&self, set: &[usize], v: &[Scalar]) -> Vec<Scalar> {
        set.iter().fold(v.to_vec(), |acc, &j| self.ns[j].mul_vec(&acc))
    }

    /// `σ_{I,v}(z) = e^{X(z)} Π_{j∈I}(N_j/s_j) v`.
    pub fn sigma(&self, set: &[usize], v: &[Scalar]) -> Result<Vec<Scalar>> {
        if !self.f().get(set.len() as i32).contains(v) {
            return Err(Error::PreconditionViolated(format!("v is not in F^{}", set.len())));
        }
        let mut u = self.n_product(set, v);
        for &j in set {
            u = vecops::scale(&u, &s_var(j).inv());
        }
        Ok(self.exp_x_symbolic()?.mul_vec(&u))
    }

    /// `Q(h, σ_{I,v}(z))`, evaluated as `Q(e^{−X}h, Π(N_j/s_j)v)`.
    pub fn section_pairing(&self, set: &[usize], v: &[Scalar], h: &[Scalar]) -> Result<Scalar> {
        if !self.f().get(set.len() as i32).contains(v) {
            return Err(Error::PreconditionViolated(format!("v is not in F^{}", set.len())));
        }
        let g = self.exp_minus_x_symbolic()?.mul_vec(h);
        let mut u = self.n_product(set, v);
        for &j in set {
            u = vecops::scale(&u, &s_var(j).inv());
        }
        Ok(pairing(&self.q, &g, &u))
    }

    /// Pinned generators: for each `I`, the canonical basis of `F^{|I|}`.
    pub fn section_basis(&self) -> Vec<(Vec<usize>, Vec<Scalar>)> {
        let f = self.f();
        let mut out = Vec::new();
        for set in subsets(self.n_vars()) {
            for v in f.get(set.len() as i32).basis() {
                out.push((set.clone(), v.clone()));
            }
        }
        out
    }

    pub fn symbolic_h(&self) -> Vec<Scalar> {
        (0..self.rank()).map(|k| RatFunc::var(Var::H(k as u8))).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrbitReport {
    pub commuting: bool,
    pub infinitesimal_isotropy: bool,
    pub transversality: bool,
    pub gamma_in_q: bool,
    pub horizontality_residue: bool,
    pub positivity: bool,
    pub positivity_sample: String,
}

impl OrbitReport {
    pub fn ok(&self) -> bool {
        self.commuting
            && self.infinitesimal_isotropy
            && self.transversality
            && self.gamma_in_q
            && self.horizontality_residue
            && self.positivity
    }

    pub fn items(&self) -> Vec<(&'static str, bool)> {
        vec![
            ("commuting", self.commuting),
            ("infinitesimal isotropy", self.infinitesimal_isotropy),
            ("transversality", self.transversality),
            ("gamma in q", self.gamma_in_q),
            ("horizontality residue", self.horizontality_residue),
            ("positivity", self.positivity),
        ]
    }
}

/// Imaginary part used for the positivity sample, `z_j = i·y`.
pub const POSITIVITY_Y: i64 = 2;

pub fn validate_orbit(d: &NilpotentOrbitData) -> OrbitReport {
    let r = d.resolved();
    let commuting = r.ns.iter().all(|a| r.ns.iter().all(|b| a.commutator(b).is_zero()));
    let infinitesimal_isotropy = r.ns.iter().all(|n| n.transpose().mul(&r.q).add(&r.q.mul(n)).is_zero());
    let f = r.f();
    let (a, b) = f.range();
    let transversality =
        r.ns.iter().all(|n| (a - 1..=b + 1).all(|p| f.get(p - 1).contains_space(&f.get(p).apply(n))));
    let gamma_in_q = r.gamma.iter().all(|g| r.splitting.lowers(&g.matrix, -1, i32::MAX / 4));
    let horizontality_residue = match r.gamma_symbolic().nilpotent_exp() {
        Ok(e) => (0..r.n_vars()).all(|j| {
            let c = r.ns[j].commutator(&e);
            c.map(|x| x.substitute(&|v| (v == Var::S(j as u8)).then(RatFunc::zero))).is_zero()
        }),
        Err(_) => false,
    };
    let y = QI::int(POSITIVITY_Y);
    let z: Vec<QI> = (0..r.n_vars()).map(|_| &y * &QI::i()).collect();
    // s_j = e^{−2πy}, rounded to a rational
    let sv = (-2.0 * std::f64::consts::PI * POSITIVITY_Y as f64).exp();
    let s: Vec<QI> = (0..r.n_vars())
        .map(|_| QI::from_rational(BigRational::from_float(sv).unwrap_or_default()))
        .collect();
    let positivity = match (r.eval_period_at(&z, &s), matrix_to_qi(&r.q)) {
        (Ok(fz), Some(q)) => match inst_filtration(&fz, &r.numeric_omega()) {
            Some(fq) => positivity_exact(&q, &fq, r.weight),
            None => false,
        },
        _ => false,
    };
    OrbitReport {
        commuting,
        infinitesimal_isotropy,
        transversality,
        gamma_in_q,
        horizontality_residue,
        positivity,
        positivity_sample: format!("z = {}i·(1,…,1)", POSITIVITY_Y),
    }
}

/// Floating-point copy of an orbit with ω instantiated.
#[derive(Clone, Debug)]
pub struct NumericOrbit {
    pub dim: usize,
    pub q: Matrix<Complex64>,
    pub ns: Vec<Matrix<Complex64>>,
    pub delta: Matrix<Complex64>,
    pub gamma: Vec<(Vec<u32>, Matrix<Complex64>)>,
    /// Pinned basis of `F^k` for `k = 0..=n`.
    pub f_bases: Vec<Vec<Vec<Complex64>>>,
}

fn to_c64(m: &ExactMatrix, w: &QI) -> Result<Matrix<Complex64>> {
    matrix_to_qi(&instantiate_matrix(m, w))
        .map(|x| c64_matrix(&x))
        .ok_or_else(|| Error::NotInstantiable("matrix entries are not constants after fixing ω".into()))
}

impl NumericOrbit {
    pub fn new(d: &NilpotentOrbitData) -> Result<Self> {
        let w = d.numeric_omega();
        let f = d.f();
        let f_bases = (0..=d.n_vars())
            .map(|k| {
                f.get(k as i32)
                    .basis()
                    .iter()
                    .map(|v| {
                        v.iter()
                            .map(|x| {
                                crate::exact::to_qi(&crate::exact::instantiate(x, &w))
                                    .map(|c| Complex64::from_qi(&c))
                                    .ok_or_else(|| Error::NotInstantiable("F basis".into()))
                            })
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(NumericOrbit {
            dim: d.rank(),
            q: to_c64(&d.q, &w)?,
            ns: d.ns.iter().map(|n| to_c64(n, &w)).collect::<Result<_>>()?,
            delta: to_c64(&d.delta, &w)?,
            gamma: d
                .gamma
                .iter()
                .map(|g| Ok((g.exponents.clone(), to_c64(&g.matrix, &w)?)))
                .collect::<Result<_>>()?,
            f_bases,
        })
    }

    fn n_combination(&self, c: &[Complex64]) -> Matrix<Complex64> {
        self.ns.iter().zip(c).fold(Matrix::zeros(self.dim, self.dim), |acc, (n, x)| acc.add(&n.scale(x)))
    }

    pub fn s_of(z: &[Complex64]) -> Vec<Complex64> {
        z.iter().map(|z| (Complex64::new(0.0, 2.0 * std::f64::consts::PI) * z).exp()).collect()
    }

    fn gamma_at(&self, s: &[Complex64]) -> Matrix<Complex64> {
        let mut acc = Matrix::zeros(self.dim, self.dim);
        for (e, g) in &self.gamma {
            let mono = e.iter().zip(s).fold(Complex64::new(1.0, 0.0), |a, (k, x)| a * x.powu(*k));
            acc = acc.add(&g.scale(&mono));
        }
        acc
    }

    /// `e^{−X(z)} = e^{−Γ(s)} e^{−Σ z_j N_j} e^{−iδ}`.
    pub fn exp_minus_x(&self, z: &[Complex64]) -> Matrix<Complex64> {
        let d = self.dim;
        let i = Complex64::new(0.0, 1.0);
        let neg: Vec<Complex64> = z.iter().map(|x| -x).collect();
        let a = self.delta.scale(&-i).exp_truncated(d + 1);
        let b = self.n_combination(&neg).exp_truncated(d + 1);
        let c = self.gamma_at(&Self::s_of(z)).neg().exp_truncated(d + 1);
        c.mul(&b).mul(&a)
    }

    /// `Z(y,h) = max_k ‖(Σ y_j N_j)^k h‖`.
    pub fn z_norm(&self, y: &[f64], h: &[Complex64]) -> f64 {
        let n = self.n_combination(&y.iter().map(|x| Complex64::new(*x, 0.0)).collect::<Vec<_>>());
        let mut v = h.to_vec();
        let mut best = max_norm(&v);
        for _ in 0..self.dim {
            v = n.mul_vec(&v);
            best = best.max(max_norm(&v));
        }
        best
    }

    /// `ln B(z,h)`: the log of the max over pinned sections of `|Q(h, σ_{I,v}(z))|`.
    pub fn b_norm_log(&self, z: &[Complex64], h: &[Complex64], with_derivatives: bool) -> f64 {
        let g = self.exp_minus_x(z).mul_vec(h);
        let gq: Vec<Complex64> = {
            // row vector gᵀS
            (0..self.dim).map(|c| (0..self.dim).map(|r| g[r] * self.q.get(r, c)).sum()).collect()
        };
        let mut best = f64::NEG_INFINITY;
        for set in subsets(self.ns.len()) {
            if !with_derivatives && !set.is_empty() {
                continue;
            }
            let lift: f64 = set.iter().map(|&j| 2.0 * std::f64::consts::PI * z[j].im).sum();
            let phase: Complex64 = set.iter().map(|&j| (Complex64::new(0.0, -2.0 * std::f64::consts::PI * z[j].re)).exp()).product();
            let Some(basis) = self.f_bases.get(set.len()) else { continue };
            for v in basis {
                let u = set.iter().fold(v.clone(), |acc, &j| self.ns[j].mul_vec(&acc));
                let val: Complex64 = gq.iter().zip(&u).map(|(a, b)| a * b).sum::<Complex64>() * phase;
                let m = val.norm();
                if m > 0.0 {
                    best = best.max(m.ln() + lift);
                }
            }
        }
        best
    }

    pub fn b_norm(&self, z: &[Complex64], h: &[Complex64], with_derivatives: bool) -> f64 {
        let l = self.b_norm_log(z, h, with_derivatives);
        if l == f64::NEG_INFINITY {
            0.0
        } else {
            l.exp()
        }
    }
}

pub fn max_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn z_norm(d: &NilpotentOrbitData, y: &[f64], h: &[QI]) -> Result<f64> {
    let o = NumericOrbit::new(d)?;
    Ok(o.z_norm(y, &h.iter().map(Complex64::from_qi).collect::<Vec<_>>()))
}

pub fn b_norm(d: &NilpotentOrbitData, z: &[Complex64], h: &[QI], with_derivatives: bool) -> Result<f64> {
    let o = NumericOrbit::new(d)?;
    Ok(o.b_norm(z, &h.iter().map(Complex64::from_qi).collect::<Vec<_>>(), with_derivatives))
}

/// Scan grid: diagonal `y = L·(1,…,1)` for each level, and every tuple of real parts.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanGrid {
    pub levels: Vec<f64>,
    pub xs: Vec<f64>,
}

impl Default for ScanGrid {
    fn default() -> Self {
        ScanGrid { levels: vec![10.0, 20.0, 40.0, 80.0], xs: vec![0.0, 1.0 / 3.0, 2.0 / 3.0] }
    }
}

/// Threshold of the plateau flag between consecutive levels.
pub const PLATEAU_FACTOR: f64 = 1.1;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanRow {
    pub h: usize,
    pub level: f64,
    pub x: Vec<f64>,
    pub z_norm: f64,
    pub log_b: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanTable {
    pub grid: ScanGrid,
    pub with_derivatives: bool,
    pub rows: Vec<ScanRow>,
    /// `(level, max ratio)` in level order.
    pub max_per_level: Vec<(f64, f64)>,
    pub bounded: bool,
    /// Smallest level from which every later level stays within the plateau factor.
    pub plateau_from: Option<f64>,
}

pub fn plateau(maxima: &[(f64, f64)]) -> (bool, Option<f64>) {
    let ok = |a: f64, b: f64| b <= PLATEAU_FACTOR * a || b <= f64::MIN_POSITIVE;
    let bounded = match maxima.len() {
        0 => false,
        1 => maxima[0].1.is_finite(),
        k => maxima[k - 1].1.is_finite() && ok(maxima[k - 2].1, maxima[k - 1].1),
    };
    let mut from = None;
    for start in (0..maxima.len()).rev() {
        let fine = (start + 1..maxima.len()).all(|k| ok(maxima[k - 1].1, maxima[k].1));
        if fine && maxima[start].1.is_finite() {
            from = Some(maxima[start].0);
        } else {
            break;
        }
    }
    (bounded, if bounded { from } else { None })
}

fn x_tuples(xs: &[f64], n: usize) -> Vec<Vec<f64>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|t| {
                xs.iter().map(move |x| {
                    let mut u = t.clone();
                    u.push(*x);
                    u
                })
            })
            .collect();
    }
    out
}

/// `Z(y,h)/B(z,h)` over the grid, computed in log space; points are merged in grid order.
pub fn estimate_scan(
    d: &NilpotentOrbitData,
    h_set: &[Vec<QI>],
    grid: &ScanGrid,
    with_derivatives: bool,
) -> Result<ScanTable> {
    let o = NumericOrbit::new(d)?;
    let n = d.n_vars();
    let hs: Vec<Vec<Complex64>> = h_set.iter().map(|h| h.iter().map(Complex64::from_qi).collect()).collect();
    let mut points = Vec::new();
    for (k, h) in hs.iter().enumerate() {
        for &level in &grid.levels {
            for x in x_tuples(&grid.xs, n) {
                points.push((k, h, level, x));
            }
        }
    }
    let rows: Vec<ScanRow> = points
        .par_iter()
        .map(|(k, h, level, x)| {
            let y = vec![*level; n];
            let z: Vec<Complex64> = x.iter().map(|xr| Complex64::new(*xr, *level)).collect();
            let zn = o.z_norm(&y, h);
            let lb = o.b_norm_log(&z, h, with_derivatives);
            let ratio = if zn == 0.0 {
                0.0
            } else if lb == f64::NEG_INFINITY {
                f64::INFINITY
            } else {
                (zn.ln() - lb).exp()
            };
            ScanRow { h: *k, level: *level, x: x.clone(), z_norm: zn, log_b: lb, ratio }
        })
        .collect();
    let max_per_level: Vec<(f64, f64)> = grid
        .levels
        .iter()
        .map(|l| (*l, rows.iter().filter(|r| r.level == *l).map(|r| r.ratio).fold(0.0, f64::max)))
        .collect();
    let (bounded, plateau_from) = plateau(&max_per_level);
    Ok(ScanTable { grid: grid.clone(), with_derivatives, rows, max_per_level, bounded, plateau_from })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayRow {
    pub y: Vec<String>,
    pub nplus_norm: f64,
    pub product: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayTable {
    pub rows: Vec<DecayRow>,
    pub max_per_level: Vec<(f64, f64)>,
    pub bounded: bool,
    pub plateau_from: Option<f64>,
}

/// Default tuples: `(L,…,L)` and `(4L, L,…,L)` for each level.
pub fn default_decay_grid(n: usize, levels: &[i64]) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    for &l in levels {
        out.push(vec![l; n]);
        if n > 1 {
            let mut v = vec![l; n];
            v[0] = 4 * l;
            out.push(v);
        }
    }
    out
}

/// `‖N⁺(y)‖·y_n` with `N⁺` computed exactly for `N = Σ y_j N_j` and the limit grading.
pub fn nplus_decay(d: &NilpotentOrbitData, grid: &[Vec<i64>]) -> Result<DecayTable> {
    let r = d.resolved();
    let w = r.numeric_omega();
    let s = inst_splitting(&r.splitting, &w).ok_or_else(|| Error::NotInstantiable("splitting".into()))?;
    let y_op = crate::sl2::grading_y(&s, r.weight)?;
    let ns: Vec<Matrix<QI>> = r
        .ns
        .iter()
        .map(|n| matrix_to_qi(&instantiate_matrix(n, &w)).ok_or_else(|| Error::NotInstantiable("N".into())))
        .collect::<Result<_>>()?;
    let rows: Vec<DecayRow> = grid
        .par_iter()
        .map(|y| -> Result<DecayRow> {
            let dim = r.rank();
            let n = ns.iter().zip(y).fold(Matrix::zeros(dim, dim), |acc, (m, c)| acc.add(&m.scale(&QI::int(*c))));
            let np = complete_sl2(&n, &y_op)?;
            let norm = c64_matrix(&np).entries().iter().map(|z| z.norm()).fold(0.0, f64::max);
            let yn = *y.iter().min().unwrap_or(&1) as f64;
            Ok(DecayRow { y: y.iter().map(|v| v.to_string()).collect(), nplus_norm: norm, product: norm * yn })
        })
        .collect::<Result<_>>()?;
    let mut levels: Vec<i64> = grid.iter().map(|y| *y.iter().min().unwrap_or(&1)).collect();
    levels.dedup();
    let max_per_level: Vec<(f64, f64)> = levels
        .iter()
        .map(|l| {
            let m = grid
                .iter()
                .zip(&rows)
                .filter(|(y, _)| y.iter().min() == Some(l))
                .map(|(_, r)| r.product)
                .fold(0.0, f64::max);
            (*l as f64, m)
        })
        .collect();
    let (bounded, plateau_from) = plateau(&max_per_level);
    Ok(DecayTable { rows, max_per_level, bounded, plateau_from })
}

/// `‖(ad N)^k e^{Γ(s)}‖` against `Σ_j y_j^m e^{−2πy_j}` at `z = i·y`.
pub fn adn_decay(d: &NilpotentOrbitData, levels: &[f64], k: usize) -> Result<Vec<(f64, f64, f64)>> {
    let o = NumericOrbit::new(d)?;
    let n = d.n_vars();
    let m = d.rank() as i32;
    Ok(levels
        .iter()
        .map(|&l| {
            let y = vec![l; n];
            let z: Vec<Complex64> = y.iter().map(|v| Complex64::new(0.0, *v)).collect();
            let nn = o.n_combination(&y.iter().map(|v| Complex64::new(*v, 0.0)).collect::<Vec<_>>());
            let mut e = o.gamma_at(&NumericOrbit::s_of(&z)).exp_truncated(o.dim + 1);
            for _ in 0..k {
                e = nn.commutator(&e);
            }
            let norm = e.entries().iter().map(|z| z.norm()).fold(0.0, f64::max);
            let bound: f64 = y.iter().map(|v| v.powi(m) * (-2.0 * std::f64::consts::PI * v).exp()).sum();
            (l, norm, bound)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex3_pure() -> NilpotentOrbitData {
        let n: ExactMatrix = Matrix::from_int_rows(&[&[0, 1], &[0, 0]]);
        let s = Splitting::from_vectors(
            2,
            &[((0, 0), vec![vec![RatFunc::int(0), RatFunc::int(1)]]), ((-1, -1), vec![vec![RatFunc::int(1), RatFunc::int(0)]])],
        );
        NilpotentOrbitData {
            omega: OmegaMode::Formal,
            q: Matrix::from_int_rows(&[&[0, 1], &[-1, 0]]),
            ns: vec![n.clone(), n],
            splitting: s,
            delta: Matrix::zeros(2, 2),
            gamma: vec![],
            weight: -1,
        }
    }

    #[test]
    fn ex3_period_and_validation() {
        let d = ex3_pure();
        let f = d.eval_period_symbolic().unwrap();
        let v = vec![&z_var(0) + &z_var(1), RatFunc::int(1)];
        assert_eq!(f.get(0), crate::exact::Subspace::span(2, &[v]));
        let rep = validate_orbit(&d);
        assert!(rep.ok(), "{rep:?}");
    }

    #[test]
    fn sigma_precondition_and_value() {
        let d = ex3_pure();
        let v = vec![RatFunc::int(0), RatFunc::int(1)];
        assert!(matches!(d.sigma(&[0], &v), Err(Error::PreconditionViolated(_))));
        let s0 = d.sigma(&[], &v).unwrap();
        assert_eq!(s0, vec![&z_var(0) + &z_var(1), RatFunc::int(1)]);
        let h = d.symbolic_h();
        let p = d.section_pairing(&[], &v, &h).unwrap();
        let expect = &h[0] - &(&(&z_var(0) + &z_var(1)) * &h[1]);
        assert_eq!(p, expect);
    }

    #[test]
    fn noncommuting_operators_rejected() {
        let mut d = ex3_pure();
        d.ns[1] = Matrix::from_int_rows(&[&[0, 0], &[1, 0]]);
        let rep = validate_orbit(&d);
        assert!(!rep.commuting);
        assert!(!rep.ok());
    }

    #[test]
    fn plateau_flags() {
        assert_eq!(plateau(&[(1.0, 1.0), (2.0, 1.05), (3.0, 1.06)]), (true, Some(1.0)));
        assert_eq!(plateau(&[(1.0, 1.0), (2.0, 2.0), (3.0, 2.05)]), (true, Some(2.0)));
        assert!(!plateau(&[(1.0, 1.0), (2.0, 2.0)]).0);
    }
}
