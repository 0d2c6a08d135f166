//! Admissible normal functions given as mixed nilpotent orbits: validation, the canonical lift
//! `v₀`, singularity classes, closure conditions and graph-closure fibers.

use std::fmt;

use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::lattice::{complex_rank, denominator_order, lattice_basis};
use crate::exact::lp::positive_kernel_vector;
use crate::exact::{instantiate, instantiate_matrix, matrix_to_qi, to_qi, vecops, ExactMatrix, Matrix, RatFunc, Scalar, Subspace, Var, QI};
use crate::filtration::{cone_constancy, relative_weight_filtration, Filtration, DEFAULT_CONE_TRIALS};
use crate::hodge::{deligne_splitting, inst_splitting, pairing, Splitting};
use crate::neron::{f0m_presentation, growth, Growth, LaurentMono, LinearExpr, ENUMERATION_LIMIT};
use crate::orbit::{plateau, s_var, z_var, GammaTerm, NilpotentOrbitData};

/// A mixed orbit on `V = H ⊕ ℤ`, the last coordinate spanning `Gr^W_0`.
#[derive(Clone, Debug)]
pub struct MixedOrbitData {
    pub base: NilpotentOrbitData,
    pub n_prime: Vec<ExactMatrix>,
    /// Splitting `I^{p,q}(M, F′)` of the limit.
    pub splitting: Splitting<Scalar>,
    pub delta_prime: ExactMatrix,
    pub gamma_prime: Vec<GammaTerm>,
}

impl MixedOrbitData {
    pub fn h_rank(&self) -> usize {
        self.base.rank()
    }

    pub fn dim(&self) -> usize {
        self.base.rank() + 1
    }

    pub fn w(&self) -> Filtration<Scalar> {
        let d = self.dim();
        let items: Vec<(Vec<Scalar>, i32)> =
            (0..d).map(|k| (vecops::unit(d, k), if k + 1 == d { 0 } else { -1 })).collect();
        Filtration::from_weighted(d, &items)
    }

    pub fn m(&self) -> Filtration<Scalar> {
        self.splitting.weight_filtration()
    }

    pub fn f_prime(&self) -> Filtration<Scalar> {
        self.splitting.hodge_filtration()
    }

    fn omega(&self) -> QI {
        self.base.numeric_omega()
    }

    fn qi_matrix(&self, m: &ExactMatrix) -> Result<Matrix<QI>> {
        matrix_to_qi(&instantiate_matrix(m, &self.omega())).ok_or_else(|| Error::NotInstantiable("matrix".into()))
    }

    pub fn n_prime_qi(&self) -> Result<Vec<Matrix<QI>>> {
        self.n_prime.iter().map(|m| self.qi_matrix(m)).collect()
    }

    /// `Σ y_j N′_j`.
    pub fn n_prime_at(&self, y: &[QI]) -> Result<Matrix<QI>> {
        let d = self.dim();
        Ok(self.n_prime_qi()?.iter().zip(y).fold(Matrix::zeros(d, d), |acc, (m, c)| acc.add(&m.scale(c))))
    }

    /// The element of `F′⁰` with last coordinate 1 taken from the pinned basis.
    pub fn hodge_lift(&self) -> Result<Vec<Scalar>> {
        let d = self.dim();
        let f0 = self.f_prime().get(0);
        let v = f0
            .basis()
            .iter()
            .find(|b| !b[d - 1].is_zero())
            .ok_or_else(|| Error::NoLift("F′⁰ does not surject onto Gr^W_0".into()))?;
        Ok(vecops::scale(v, &v[d - 1].inv()))
    }

    /// `e^{−X′(z)} = e^{−Γ′(s)} e^{−Σ z_j N′_j} e^{−iδ′}` with symbolic `z`, `s`.
    pub fn exp_minus_x_symbolic(&self) -> Result<ExactMatrix> {
        let d = self.dim();
        let i = RatFunc::constant(QI::i());
        let zn = self
            .n_prime
            .iter()
            .enumerate()
            .fold(Matrix::zeros(d, d), |acc: ExactMatrix, (j, n)| acc.add(&n.scale(&-z_var(j))));
        let mut g = Matrix::zeros(d, d);
        for t in &self.gamma_prime {
            let mono = t.exponents.iter().enumerate().fold(RatFunc::one(), |a, (j, e)| &a * &s_var(j).pow(*e));
            g = g.add(&t.matrix.scale(&mono));
        }
        let a = self.delta_prime.scale(&-i).nilpotent_exp()?;
        let b = zn.nilpotent_exp()?;
        let c = g.neg().nilpotent_exp()?;
        Ok(c.mul(&b).mul(&a))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MixedReport {
    pub restriction: bool,
    pub image_in_h: bool,
    pub commuting: bool,
    pub relative_weight: bool,
    pub cone_constant: bool,
    pub mhs: bool,
    pub transversality: bool,
}

impl MixedReport {
    pub fn ok(&self) -> bool {
        self.items().iter().all(|(_, b)| *b)
    }

    pub fn items(&self) -> Vec<(&'static str, bool)> {
        vec![
            ("restriction", self.restriction),
            ("image in H", self.image_in_h),
            ("commuting", self.commuting),
            ("relative weight filtration", self.relative_weight),
            ("cone constancy", self.cone_constant),
            ("mixed Hodge structure", self.mhs),
            ("transversality", self.transversality),
        ]
    }
}

pub fn validate_mixed_orbit(x: &MixedOrbitData) -> MixedReport {
    let r = x.h_rank();
    let d = x.dim();
    let ns = &x.base.ns;
    let restriction = x.n_prime.len() == ns.len()
        && x.n_prime.iter().zip(ns).all(|(np, n)| {
            np.rows() == d && (0..r).all(|i| (0..r).all(|j| np.get(i, j) == n.get(i, j)))
        });
    let image_in_h = x.n_prime.iter().all(|np| {
        (0..d).all(|j| np.get(d - 1, j).is_zero())
            && np.entries().iter().all(|e| to_qi(e).is_some_and(|q| q.is_real()))
    });
    let commuting = x.n_prime.iter().all(|a| x.n_prime.iter().all(|b| a.commutator(b).is_zero()));
    let w = x.w();
    let sum = x.n_prime.iter().fold(Matrix::zeros(d, d), |acc: ExactMatrix, n| acc.add(n));
    let relative_weight = matches!(relative_weight_filtration(&sum, &w), Ok(m) if m == x.m());
    let cone_constant = cone_constancy(&x.n_prime, Some(&w), DEFAULT_CONE_TRIALS);
    let f = x.f_prime();
    let mhs = deligne_splitting(&x.m(), &f).is_ok();
    let (a, b) = f.range();
    let transversality =
        x.n_prime.iter().all(|n| (a - 1..=b + 1).all(|p| f.get(p - 1).contains_space(&f.get(p).apply(n))));
    MixedReport { restriction, image_in_h, commuting, relative_weight, cone_constant, mhs, transversality }
}

#[derive(Clone, Debug, PartialEq)]
pub struct V0Lift {
    pub y: Vec<QI>,
    pub v0: Vec<QI>,
    pub unique: bool,
    pub real: bool,
}

/// The element `v₀ ∈ M₀ ∩ F⁰ ∩ V_{ℝ,1}` with `N′v₀ = 0` for `N′ = Σ y_j N′_j`.
pub fn v0_lift(x: &MixedOrbitData, y: &[QI]) -> Result<V0Lift> {
    let d = x.dim();
    let r = x.h_rank();
    let w = x.omega();
    let s = inst_splitting(&x.splitting, &w).ok_or_else(|| Error::NotInstantiable("splitting".into()))?;
    let i00 = s.get(0, 0);
    let v = i00
        .basis()
        .iter()
        .find(|b| !b[d - 1].is_zero())
        .map(|b| vecops::scale(b, &b[d - 1].inv()))
        .ok_or_else(|| Error::NoLift("I^{0,0} does not lift 1".into()))?;
    let np = x.n_prime_at(y)?;
    let u = np.mul_vec(&v);
    if !u[d - 1].is_zero() {
        return Err(Error::NoLift("N′ does not map into H".into()));
    }
    let h_space: Subspace<QI> = Subspace::span(d, &(0..r).map(|k| vecops::unit(d, k)).collect::<Vec<_>>());
    let h00 = i00.intersect(&h_space);
    let cols: Vec<Vec<QI>> = h00.basis().iter().map(|b| np.mul_vec(b)).collect();
    let coeffs = if vecops::is_zero(&u) {
        vec![QI::zero(); cols.len()]
    } else if cols.is_empty() {
        return Err(Error::NoLift("N′v is not in N(I^{0,0} ∩ H)".into()));
    } else {
        Matrix::from_cols(d, &cols)
            .solve(&u)
            .map_err(|_| Error::NoLift("N′v is not in N(I^{0,0} ∩ H)".into()))?
    };
    let h = vecops::combine(d, &coeffs, h00.basis());
    let v0 = vecops::sub(&v, &h);
    let unique = cols.is_empty() || Matrix::from_cols(d, &cols).rank() == cols.len();
    if !vecops::is_zero(&np.mul_vec(&v0)) || !v0[d - 1].is_one() {
        return Err(Error::NoLift("constructed element fails N′v₀ = 0".into()));
    }
    let real = v0.iter().all(|c| c.is_real());
    Ok(V0Lift { y: y.to_vec(), v0, unique, real })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct V0Boundedness {
    pub max_per_level: Vec<(f64, f64)>,
    pub bounded: bool,
    pub plateau_from: Option<f64>,
}

/// `max ‖v₀(y)‖` over `y ∈ {2^a : a ≤ k}ⁿ` for each level `k`.
pub fn v0_boundedness(x: &MixedOrbitData, levels: u32) -> Result<V0Boundedness> {
    let n = x.base.n_vars();
    let mut max_per_level = Vec::new();
    let mut running = 0.0f64;
    for k in 0..=levels {
        let side = k as usize + 1;
        let mut pts = Vec::new();
        for idx in 0..side.pow(n as u32) {
            let mut rest = idx;
            let y: Vec<QI> = (0..n)
                .map(|_| {
                    let a = rest % side;
                    rest /= side;
                    QI::int(1i64 << a)
                })
                .collect();
            pts.push(y);
        }
        let norms: Vec<f64> = pts
            .par_iter()
            .map(|y| v0_lift(x, y).map(|l| l.v0.iter().map(|c| c.to_f64_pair()).map(|(a, b)| a.hypot(b)).fold(0.0, f64::max)))
            .collect::<Result<_>>()?;
        running = norms.into_iter().fold(running, f64::max);
        max_per_level.push(((1u64 << k) as f64, running));
    }
    let (bounded, plateau_from) = plateau(&max_per_level);
    Ok(V0Boundedness { max_per_level, bounded, plateau_from })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum SingularityKind {
    Zero,
    Torsion(String),
    Nontorsion,
}

impl fmt::Display for SingularityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SingularityKind::Zero => write!(f, "zero"),
            SingularityKind::Torsion(k) => write!(f, "torsion({k})"),
            SingularityKind::Nontorsion => write!(f, "nontorsion"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SingularityClass {
    pub kind: SingularityKind,
    /// `(N′_j v)` restricted to `H`, one row per `j`.
    pub cocycle: Vec<Vec<String>>,
    /// Rational `h` with `N_j h = N′_j v`, when one exists.
    pub solution: Option<Vec<String>>,
    /// A functional vanishing on `⊕ N_j(H)`-images of `H` but not on the cocycle.
    pub certificate: Option<Vec<String>>,
}

fn rat_strings(v: &[QI]) -> Vec<String> {
    v.iter().map(|x| x.to_string()).collect()
}

/// Class of `(N′₁v, …, N′ₙv)` modulo `{(N_j h)}`, over ℚ and over ℤ.
pub fn singularity_class(x: &MixedOrbitData, v: &[QI]) -> Result<SingularityClass> {
    let r = x.h_rank();
    let n = x.base.n_vars();
    let nps = x.n_prime_qi()?;
    let w = x.omega();
    let ns: Vec<Matrix<QI>> = x
        .base
        .ns
        .iter()
        .map(|m| matrix_to_qi(&instantiate_matrix(m, &w)).ok_or_else(|| Error::NotInstantiable("N".into())))
        .collect::<Result<_>>()?;
    let cocycle: Vec<Vec<QI>> = nps.iter().map(|m| m.mul_vec(v)[..r].to_vec()).collect();
    let u: Vec<QI> = cocycle.iter().flatten().cloned().collect();
    let rows: Vec<Vec<QI>> = ns.iter().flat_map(|m| m.row_vecs()).collect();
    let a = Matrix::from_rows(rows);
    let shown = cocycle.iter().map(|c| rat_strings(c)).collect();
    if vecops::is_zero(&u) {
        return Ok(SingularityClass { kind: SingularityKind::Zero, cocycle: shown, solution: Some(rat_strings(&vec![QI::zero(); r])), certificate: None });
    }
    match a.solve(&u) {
        Err(_) => {
            let phi = a
                .transpose()
                .kernel_vectors()
                .into_iter()
                .find(|p| !vecops::dot(p, &u).is_zero())
                .ok_or(Error::NoSolution)?;
            Ok(SingularityClass { kind: SingularityKind::Nontorsion, cocycle: shown, solution: None, certificate: Some(rat_strings(&phi)) })
        }
        Ok(h) => {
            let cols: Vec<Vec<BigRational>> = (0..r).map(|k| a.col(k).iter().map(|q| q.re.clone()).collect()).collect();
            let basis = lattice_basis(&cols);
            let bq: Vec<Vec<QI>> = basis.iter().map(|b| b.iter().map(|c| QI::from_rational(c.clone())).collect()).collect();
            let coords = Matrix::from_cols(n * r, &bq).solve(&u)?;
            let order = denominator_order(&coords.iter().map(|c| c.re.clone()).collect::<Vec<_>>());
            let kind = if order.is_one() { SingularityKind::Zero } else { SingularityKind::Torsion(order.to_string()) };
            Ok(SingularityClass { kind, cocycle: shown, solution: Some(rat_strings(&h)), certificate: None })
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VroneCandidate {
    pub h: Vec<i64>,
    /// Positive integers `a` with `Σ a_j N′_j v = 0`.
    pub relation: Option<Vec<String>>,
    pub hodge_type: bool,
    pub w: Option<Vec<String>>,
    pub closure_candidate: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VroneReport {
    pub height_bound: u32,
    pub examined: usize,
    pub with_relation: usize,
    pub candidates: Vec<VroneCandidate>,
}

/// Whether `N′_k v` is of type `(−1,−1)` after `e^{−Σ w_j N_j} e^{−iδ}` for a common `w`.
fn hodge_type_condition(x: &MixedOrbitData, us: &[Vec<QI>]) -> Result<Option<Vec<QI>>> {
    let w = x.omega();
    let base = x.base.resolved();
    let split = inst_splitting(&base.splitting, &w).ok_or_else(|| Error::NotInstantiable("splitting".into()))?;
    let delta = matrix_to_qi(&instantiate_matrix(&base.delta, &w)).ok_or_else(|| Error::NotInstantiable("delta".into()))?;
    let ns: Vec<Matrix<QI>> = base
        .ns
        .iter()
        .map(|m| matrix_to_qi(&instantiate_matrix(m, &w)).ok_or_else(|| Error::NotInstantiable("N".into())))
        .collect::<Result<_>>()?;
    let rot = delta.scale(&-QI::i()).nilpotent_exp()?;
    let n = ns.len();
    let r = x.h_rank();
    // linear equations for w from the (−2,−2) components
    let mut eq_rows: Vec<Vec<QI>> = Vec::new();
    let mut eq_rhs: Vec<QI> = Vec::new();
    let mut tops = Vec::new();
    for u in us {
        let g = rot.mul_vec(u);
        let comps = split.components(&g)?;
        let top = comps.get(&(-1, -1)).cloned().unwrap_or_else(|| vec![QI::zero(); r]);
        let next = comps.get(&(-2, -2)).cloned().unwrap_or_else(|| vec![QI::zero(); r]);
        for i in 0..r {
            eq_rows.push(ns.iter().map(|m| m.mul_vec(&top)[i].clone()).collect());
            eq_rhs.push(next[i].clone());
        }
        tops.push((g, top));
    }
    let wv = if n == 0 || eq_rows.iter().all(|r| vecops::is_zero(r)) {
        if eq_rhs.iter().all(|c| c.is_zero()) {
            vec![QI::zero(); n]
        } else {
            return Ok(None);
        }
    } else {
        match Matrix::from_rows(eq_rows).solve(&eq_rhs) {
            Ok(w) => w,
            Err(_) => return Ok(None),
        }
    };
    let nw = ns.iter().zip(&wv).fold(Matrix::zeros(r, r), |acc, (m, c)| acc.add(&m.scale(&-c)));
    let e = nw.nilpotent_exp()?;
    for (g, top) in &tops {
        if e.mul_vec(g) != *top {
            return Ok(None);
        }
    }
    Ok(Some(wv))
}

pub fn vrone_for(x: &MixedOrbitData, v: &[QI]) -> Result<VroneCandidate> {
    let r = x.h_rank();
    let nps = x.n_prime_qi()?;
    let us: Vec<Vec<QI>> = nps.iter().map(|m| m.mul_vec(v)[..r].to_vec()).collect();
    let rows: Vec<Vec<BigRational>> = (0..r)
        .flat_map(|i| {
            let re: Vec<BigRational> = us.iter().map(|u| u[i].re.clone()).collect();
            let im: Vec<BigRational> = us.iter().map(|u| u[i].im.clone()).collect();
            [re, im]
        })
        .collect();
    let relation = positive_kernel_vector(&rows, us.len()).map(|a| {
        let den = denominator_order(&a);
        a.iter().map(|c| (c * BigRational::from_integer(den.clone())).to_string()).collect::<Vec<_>>()
    });
    let hw = hodge_type_condition(x, &us)?;
    let h: Vec<i64> = v[..r].iter().map(|c| num_traits::ToPrimitive::to_i64(&c.re.to_integer()).unwrap_or(0)).collect();
    Ok(VroneCandidate {
        h,
        closure_candidate: relation.is_some() && hw.is_some(),
        relation,
        hodge_type: hw.is_some(),
        w: hw.map(|w| rat_strings(&w)),
    })
}

fn box_points(r: usize, bound: u32) -> Result<Vec<Vec<i64>>> {
    let side = 2 * bound as usize + 1;
    let total = side
        .checked_pow(r as u32)
        .filter(|t| *t <= ENUMERATION_LIMIT)
        .ok_or_else(|| Error::UnsupportedShape(format!("height box {side}^{r} is too large")))?;
    Ok((0..total)
        .map(|idx| {
            let mut rest = idx;
            (0..r)
                .map(|_| {
                    let c = (rest % side) as i64 - bound as i64;
                    rest /= side;
                    c
                })
                .collect()
        })
        .collect())
}

fn lift_point(h: &[i64]) -> Vec<QI> {
    let mut v: Vec<QI> = h.iter().map(|c| QI::int(*c)).collect();
    v.push(QI::one());
    v
}

/// Conditions (ii) and (iv) of the closure theorem for every `v = (h, 1)` with `‖h‖∞ ≤ height_bound`.
pub fn vrone_conditions(x: &MixedOrbitData, height_bound: u32) -> Result<VroneReport> {
    let pts = box_points(x.h_rank(), height_bound)?;
    let all: Vec<VroneCandidate> = pts.par_iter().map(|h| vrone_for(x, &lift_point(h))).collect::<Result<_>>()?;
    let with_relation = all.iter().filter(|c| c.relation.is_some()).count();
    Ok(VroneReport {
        height_bound,
        examined: all.len(),
        with_relation,
        candidates: all.into_iter().filter(|c| c.closure_candidate).collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum PieceKind {
    Empty,
    Discrete,
    Continuous(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GraphPiece {
    pub h: Vec<i64>,
    pub kind: PieceKind,
    /// Limit of the fiber coordinates; `w_j` are the free parameters of a continuous piece.
    pub limit: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GraphClosure {
    pub stratum: Vec<usize>,
    pub height_bound: u32,
    /// Fiber coordinates of the graph map as functions of `v = (h, 1)`; the last `h` is the unit coordinate.
    pub map: Vec<String>,
    pub examined: usize,
    pub pieces: Vec<GraphPiece>,
}

impl GraphClosure {
    /// Largest dimension among the nonempty pieces.
    pub fn dimension(&self) -> Option<usize> {
        self.pieces
            .iter()
            .filter_map(|p| match p.kind {
                PieceKind::Empty => None,
                PieceKind::Discrete => Some(0),
                PieceKind::Continuous(k) => Some(k),
            })
            .max()
    }

    pub fn is_empty(&self) -> bool {
        self.dimension().is_none()
    }

    pub fn summary(&self) -> String {
        match self.dimension() {
            None => "empty".into(),
            Some(0) => "discrete".into(),
            Some(k) => format!("continuous of dimension {k}"),
        }
    }
}

/// Graph coordinates `Q(π_F e^{−X′}v, Π(N_j/s_j)u)` with `v = (h₁, …, h_r, h_{r+1})`.
pub fn graph_map(x: &MixedOrbitData) -> Result<Vec<LinearExpr>> {
    let r = x.h_rank();
    let d = x.dim();
    let base = &x.base;
    let p = f0m_presentation(base, base.n_vars())?;
    let vf = x.hodge_lift()?;
    let v: Vec<Scalar> = (0..d).map(|k| RatFunc::var(Var::H(k as u8))).collect();
    let g = x.exp_minus_x_symbolic()?.mul_vec(&v);
    let last = g[d - 1].clone();
    let proj: Vec<Scalar> = (0..r).map(|k| &g[k] - &(&last * &vf[k])).collect();
    p.generators
        .iter()
        .map(|gen| {
            let mut u = gen.u.clone();
            for &j in &gen.set {
                u = vecops::scale(&u, &s_var(j).inv());
            }
            LinearExpr::from_scalar(&pairing(&base.q, &proj, &u), d)
        })
        .collect()
}

fn eval_row(row: &[Scalar], v: &[QI], w: &QI) -> Result<QI> {
    row.iter().zip(v).try_fold(QI::zero(), |acc, (c, x)| {
        let c = to_qi(&instantiate(c, w)).ok_or_else(|| Error::NotInstantiable(c.to_string()))?;
        Ok(&acc + &(&c * x))
    })
}

fn classify(exprs: &[LinearExpr], stratum: &[usize], v: &[QI], w: &QI) -> Result<(PieceKind, Vec<String>)> {
    let mut lin: Vec<Vec<QI>> = Vec::new();
    let mut survivors: Vec<Scalar> = Vec::new();
    for e in exprs {
        let mut row = vec![QI::zero(); stratum.len()];
        let mut keep = RatFunc::zero();
        for (m, coeffs) in &e.terms {
            let c = eval_row(coeffs, v, w)?;
            if c.is_zero() {
                continue;
            }
            match growth(m, stratum) {
                Growth::Vanishes => {}
                Growth::Survives => keep = &keep + &(&crate::neron::laurent_to_scalar(m) * &RatFunc::constant(c)),
                Growth::Unbounded => {
                    let linear = stratum.iter().position(|&j| {
                        let mut single = LaurentMono::new();
                        single.insert(Var::Z(j as u8), 1);
                        *m == single
                    });
                    match linear {
                        Some(pos) => row[pos] = &row[pos] + &c,
                        None => return Ok((PieceKind::Empty, vec![])),
                    }
                }
            }
        }
        lin.push(row);
        survivors.push(keep);
    }
    let show = |extra: &dyn Fn(usize) -> String| -> Vec<String> {
        survivors.iter().enumerate().map(|(k, s)| format!("{s}{}", extra(k))).collect()
    };
    if lin.iter().all(|r| r.iter().all(|c| c.is_zero())) {
        return Ok((PieceKind::Discrete, show(&|_| String::new())));
    }
    let rows: Vec<Vec<BigRational>> = lin
        .iter()
        .flat_map(|r| [r.iter().map(|c| c.re.clone()).collect(), r.iter().map(|c| c.im.clone()).collect()])
        .collect();
    if positive_kernel_vector(&rows, stratum.len()).is_none() {
        return Ok((PieceKind::Empty, vec![]));
    }
    let dim = complex_rank(&lin);
    let limit = show(&|k| {
        lin[k]
            .iter()
            .zip(stratum)
            .filter(|(c, _)| !c.is_zero())
            .map(|(c, j)| format!(" + ({c})·w{}", j + 1))
            .collect::<String>()
    });
    Ok((PieceKind::Continuous(dim), limit))
}

/// Limit set of the graph over a stratum, for all `v = (h, 1)` with `‖h‖∞ ≤ height_bound`.
pub fn graph_closure_fiber(x: &MixedOrbitData, stratum: &[usize], height_bound: u32) -> Result<GraphClosure> {
    let exprs = graph_map(x)?;
    let w = x.omega();
    let pts = box_points(x.h_rank(), height_bound)?;
    let pieces: Vec<GraphPiece> = pts
        .par_iter()
        .map(|h| {
            let (kind, limit) = classify(&exprs, stratum, &lift_point(h), &w)?;
            Ok(GraphPiece { h: h.clone(), kind, limit })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GraphClosure {
        stratum: stratum.to_vec(),
        height_bound,
        map: exprs.iter().map(|e| e.to_scalar().to_string()).collect(),
        examined: pieces.len(),
        pieces: pieces.into_iter().filter(|p| p.kind != PieceKind::Empty).collect(),
    })
}

/// Real rational classes of type `(p,p)` in an ℝ-split structure are killed by `δ`.
pub fn delta_kills_hodge_classes(split: &Splitting<QI>, delta: &Matrix<QI>) -> bool {
    split.pieces().iter().filter(|((p, q), _)| p == q).all(|(_, sp)| {
        let real: Vec<Vec<QI>> = sp.basis().iter().filter(|b| b.iter().all(|c| c.is_real())).cloned().collect();
        real.iter().all(|b| vecops::is_zero(&delta.mul_vec(b)))
    })
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::exact::OmegaMode;

    fn c(n: i64) -> Scalar {
        RatFunc::int(n)
    }

    pub(crate) fn example3(lambda: i64) -> MixedOrbitData {
        let n: ExactMatrix = Matrix::from_int_rows(&[&[0, 1], &[0, 0]]);
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
                Matrix::from_int_rows(&[&[0, 1, 1], &[0, 0, 0], &[0, 0, 0]]),
                Matrix::from_int_rows(&[&[0, 1, -1], &[0, 0, 0], &[0, 0, 0]]),
            ],
            splitting: Splitting::from_vectors(
                3,
                &[((0, 0), vec![vec![c(0), c(1), c(0)], vec![c(lambda), c(0), c(1)]]), ((-1, -1), vec![vec![c(1), c(0), c(0)]])],
            ),
            delta_prime: Matrix::zeros(3, 3),
            gamma_prime: vec![],
        }
    }

    #[test]
    fn example3_validates() {
        let x = example3(0);
        let r = validate_mixed_orbit(&x);
        assert!(r.ok(), "{r:?}");
    }

    #[test]
    fn example3_v0() {
        let x = example3(1);
        let l = v0_lift(&x, &[QI::int(3), QI::int(1)]).unwrap();
        assert_eq!(l.v0, vec![QI::int(1), QI::ratio(-1, 2), QI::one()]);
        assert!(l.unique && l.real);
    }

    #[test]
    fn example3_singularity_and_closure() {
        let x = example3(0);
        let v = lift_point(&[0, 0]);
        assert_eq!(singularity_class(&x, &v).unwrap().kind, SingularityKind::Nontorsion);
        let c = vrone_for(&x, &v).unwrap();
        assert!(c.closure_candidate);
        let g = graph_closure_fiber(&x, &[0, 1], 2).unwrap();
        assert_eq!(g.dimension(), Some(1));
        let g = graph_closure_fiber(&x, &[1], 2).unwrap();
        assert_eq!(g.dimension(), Some(0));
        assert!(g.pieces.iter().all(|p| p.h[1] == 1));
    }

    #[test]
    fn graph_map_display() {
        let x = example3(0);
        let m = graph_map(&x).unwrap();
        assert_eq!(m.len(), 1);
        let sub = m[0].to_scalar().substitute(&|v| (v == Var::H(2)).then(|| c(1)));
        let a = RatFunc::var(Var::H(0));
        let b = RatFunc::var(Var::H(1));
        let expect = &(&a - &(&b * &(&z_var(0) + &z_var(1)))) + &(&z_var(1) - &z_var(0));
        assert_eq!(sub, expect);
    }
}
