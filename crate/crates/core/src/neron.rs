//! Presentations of `F₀𝓜`, fibers of `T(F₀𝓜)`, limits of integral classes and the quotient
//! fibers of the Néron model.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::lattice::{clear_denominators, complex_rank, integer_kernel, real_rank};
use crate::exact::{instantiate, instantiate_matrix, matrix_to_qi, to_qi, Matrix, Mono, RatFunc, Scalar, Subspace, Var, QI};
use crate::orbit::{s_var, subsets, NilpotentOrbitData};

/// Exponents of a Laurent monomial; only `s_j` may carry negative powers.
pub type LaurentMono = BTreeMap<Var, i32>;

pub fn laurent_to_scalar(m: &LaurentMono) -> Scalar {
    m.iter().fold(RatFunc::one(), |acc, (v, e)| {
        let x = RatFunc::var(*v);
        let p = if *e >= 0 { x.pow(*e as u32) } else { x.inv().pow((-*e) as u32) };
        &acc * &p
    })
}

/// Terms of a rational function whose denominator is a monomial.
pub fn laurent_terms(x: &RatFunc) -> Result<Vec<(LaurentMono, QI)>> {
    let den: Vec<(&Mono, &QI)> = x.den().terms().collect();
    if den.len() != 1 {
        return Err(Error::UnsupportedShape(format!("denominator of {x} is not a monomial")));
    }
    let (dm, dc) = den[0];
    let inv = dc.inv();
    Ok(x
        .num()
        .terms()
        .map(|(m, c)| {
            let mut e: LaurentMono = m.0.iter().map(|(v, k)| (*v, *k as i32)).collect();
            for (v, k) in &dm.0 {
                *e.entry(*v).or_insert(0) -= *k as i32;
            }
            e.retain(|_, k| *k != 0);
            (e, c * &inv)
        })
        .collect())
}

/// An expression linear in the symbolic class `h`: monomial in `z`, `s` ↦ coefficient row in `h`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearExpr {
    pub rank: usize,
    pub terms: BTreeMap<LaurentMono, Vec<Scalar>>,
}

impl LinearExpr {
    pub fn from_scalar(x: &Scalar, rank: usize) -> Result<Self> {
        let mut terms: BTreeMap<LaurentMono, Vec<Scalar>> = BTreeMap::new();
        for (mut m, c) in laurent_terms(x)? {
            let hs: Vec<(Var, i32)> = m.iter().filter(|(v, _)| matches!(v, Var::H(_))).map(|(v, e)| (*v, *e)).collect();
            let k = match hs.as_slice() {
                [(Var::H(k), 1)] => *k as usize,
                _ => return Err(Error::UnsupportedShape(format!("{x} is not linear in h"))),
            };
            let mut coeff = RatFunc::constant(c);
            for v in [Var::Omega, Var::OmegaBar] {
                if let Some(e) = m.remove(&v) {
                    coeff = &coeff * &laurent_to_scalar(&LaurentMono::from([(v, e)]));
                }
            }
            m.remove(&Var::H(k as u8));
            let row = terms.entry(m).or_insert_with(|| vec![RatFunc::zero(); rank]);
            row[k] = &row[k] + &coeff;
        }
        terms.retain(|_, r| r.iter().any(|x| !x.is_zero()));
        Ok(LinearExpr { rank, terms })
    }

    pub fn to_scalar(&self) -> Scalar {
        let mut acc = RatFunc::zero();
        for (m, row) in &self.terms {
            let lin = row
                .iter()
                .enumerate()
                .fold(RatFunc::zero(), |a, (k, c)| &a + &(c * &RatFunc::var(Var::H(k as u8))));
            acc = &acc + &(&laurent_to_scalar(m) * &lin);
        }
        acc
    }

    /// Coefficient row of `h ↦ expr` once the remaining symbols take the given values.
    pub fn evaluate(&self, vals: &dyn Fn(Var) -> Option<QI>, omega: &QI) -> Option<Vec<QI>> {
        let mut out = vec![QI::zero(); self.rank];
        for (m, row) in &self.terms {
            let mut f = QI::one();
            for (v, e) in m {
                let x = vals(*v)?;
                f = &f * &if *e >= 0 { x.pow(*e as u32) } else { x.inv().pow((-*e) as u32) };
            }
            for (k, c) in row.iter().enumerate() {
                out[k] = &out[k] + &(&to_qi(&instantiate(c, omega))? * &f);
            }
        }
        Some(out)
    }
}

/// Growth of a monomial as the coordinates in `stratum` tend to zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Growth {
    Vanishes,
    Survives,
    Unbounded,
}

pub fn growth(m: &LaurentMono, stratum: &[usize]) -> Growth {
    let mut unbounded = false;
    for &j in stratum {
        let s = m.get(&Var::S(j as u8)).copied().unwrap_or(0);
        let z = m.get(&Var::Z(j as u8)).copied().unwrap_or(0);
        if s > 0 {
            return Growth::Vanishes;
        }
        if s < 0 || z > 0 {
            unbounded = true;
        }
    }
    if unbounded {
        Growth::Unbounded
    } else {
        Growth::Survives
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Generator {
    pub set: Vec<usize>,
    pub v: Vec<Scalar>,
    /// `Π_{j∈I} N_j v`, the value of `s^I · σ_{I,v}` in the untwisted frame.
    pub u: Vec<Scalar>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Relation {
    /// Multidegree in `{−1, 0}ⁿ`.
    pub degree: Vec<i32>,
    /// Polynomial coefficient in `s` for each generator.
    pub coeffs: Vec<Scalar>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Presentation {
    pub n: usize,
    pub depth: usize,
    pub generators: Vec<Generator>,
    pub relations: Vec<Relation>,
    /// The σ-generators are only known to lie in `F₀𝓜` unless the data says otherwise.
    pub containment_only: bool,
}

fn set_label(set: &[usize]) -> String {
    if set.is_empty() {
        "∅".into()
    } else {
        format!("{{{}}}", set.iter().map(|j| (j + 1).to_string()).collect::<Vec<_>>().join(","))
    }
}

fn vec_label(v: &[Scalar]) -> String {
    format!("({})", v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "))
}

impl Presentation {
    pub fn assume_exact(mut self) -> Self {
        self.containment_only = false;
        self
    }

    /// Relation matrix: one row per relation, one column per generator.
    pub fn relation_matrix(&self) -> Matrix<Scalar> {
        Matrix::from_rows(self.relations.iter().map(|r| r.coeffs.clone()).collect())
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "generators: {}", self.generators.len())?;
        for (k, g) in self.generators.iter().enumerate() {
            writeln!(f, "  e{k} = sigma[I={}, v={}]", set_label(&g.set), vec_label(&g.v))?;
        }
        writeln!(f, "relations: {}", self.relations.len())?;
        for r in &self.relations {
            writeln!(f, "  {} in degree {:?}", vec_label(&r.coeffs), r.degree)?;
        }
        write!(f, "generation: {}", if self.containment_only { "containment-only" } else { "exact" })
    }
}

fn span_of(dim: usize, vecs: &[Vec<Scalar>]) -> Subspace<Scalar> {
    Subspace::span(dim, vecs)
}

/// Minimal σ-generators of `F₀𝓜` with `|I| ≤ depth` and their multigraded syzygies.
pub fn f0m_presentation(d: &NilpotentOrbitData, depth: usize) -> Result<Presentation> {
    let n = d.n_vars();
    if depth > n {
        return Err(Error::PreconditionViolated(format!("depth {depth} exceeds {n}")));
    }
    let dim = d.rank();
    let f = d.f();
    let sets: Vec<Vec<usize>> = subsets(n).into_iter().filter(|s| s.len() <= depth).collect();
    // V_J = span of N_I F^{|I|} over I ⊇ J
    let v_space = |j: &[usize]| -> Subspace<Scalar> {
        let mut vecs = Vec::new();
        for i in sets.iter().filter(|i| j.iter().all(|x| i.contains(x))) {
            for v in f.get(i.len() as i32).basis() {
                vecs.push(d.n_product(i, v));
            }
        }
        span_of(dim, &vecs)
    };
    let mut gens: Vec<Generator> = Vec::new();
    for set in sets.iter().rev() {
        let mut lower: Vec<Vec<Scalar>> = Vec::new();
        for j in (0..n).filter(|j| !set.contains(j)) {
            let mut bigger = set.clone();
            bigger.push(j);
            bigger.sort();
            if bigger.len() <= depth {
                lower.extend(v_space(&bigger).basis().iter().cloned());
            }
        }
        let mut cur = span_of(dim, &lower);
        for v in f.get(set.len() as i32).basis() {
            let u = d.n_product(set, v);
            if !cur.contains(&u) {
                lower.push(u.clone());
                cur = span_of(dim, &lower);
                gens.push(Generator { set: set.clone(), v: v.clone(), u });
            }
        }
    }
    gens.sort_by(|a, b| a.set.len().cmp(&b.set.len()).then(a.set.cmp(&b.set)));

    // syzygies in degree −1_J among generators with I ⊇ J
    let active = |j: &[usize]| -> Vec<usize> {
        (0..gens.len()).filter(|&g| j.iter().all(|x| gens[g].set.contains(x))).collect()
    };
    let kernel = |j: &[usize]| -> Vec<Vec<Scalar>> {
        let act = active(j);
        if act.is_empty() {
            return Vec::new();
        }
        let m = Matrix::from_cols(dim, &act.iter().map(|&g| gens[g].u.clone()).collect::<Vec<_>>());
        m.kernel_vectors()
            .into_iter()
            .map(|k| {
                let mut full = vec![RatFunc::zero(); gens.len()];
                for (x, &g) in k.into_iter().zip(&act) {
                    full[g] = x;
                }
                full
            })
            .collect()
    };
    let mut relations = Vec::new();
    for set in subsets(n).iter().rev() {
        let mut lower: Vec<Vec<Scalar>> = Vec::new();
        for j in (0..n).filter(|j| !set.contains(j)) {
            let mut bigger = set.clone();
            bigger.push(j);
            bigger.sort();
            lower.extend(kernel(&bigger));
        }
        let mut cur = span_of(gens.len(), &lower);
        for k in kernel(set) {
            if cur.contains(&k) {
                continue;
            }
            lower.push(k.clone());
            cur = span_of(gens.len(), &lower);
            let last = k.iter().rev().find(|x| !x.is_zero()).cloned().unwrap_or_else(RatFunc::one);
            let coeffs = k
                .iter()
                .zip(&gens)
                .map(|(c, g)| {
                    let mono = g.set.iter().filter(|j| !set.contains(j)).fold(RatFunc::one(), |a, &j| &a * &s_var(j));
                    &(c / &last) * &mono
                })
                .collect();
            let degree = (0..n).map(|j| if set.contains(&j) { -1 } else { 0 }).collect();
            relations.push(Relation { degree, coeffs });
        }
    }
    Ok(Presentation { n, depth, generators: gens, relations, containment_only: true })
}

/// A base point, or the stratum where the listed coordinates vanish.
#[derive(Clone, Debug, PartialEq)]
pub enum Locus {
    Point(Vec<QI>),
    Stratum(Vec<usize>),
}

impl Locus {
    pub fn zero_set(&self) -> Vec<usize> {
        match self {
            Locus::Point(p) => (0..p.len()).filter(|&j| p[j].is_zero()).collect(),
            Locus::Stratum(j) => j.clone(),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Locus::Point(p) => format!("point ({})", p.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")),
            Locus::Stratum(j) if j.is_empty() => "generic stratum".into(),
            Locus::Stratum(j) => format!(
                "stratum {}",
                j.iter().map(|x| format!("s{} = 0", x + 1)).collect::<Vec<_>>().join(", ")
            ),
        }
    }

    /// Substitution for `s`: the point's coordinates, or zero on the stratum.
    pub fn s_value(&self, j: usize) -> Option<QI> {
        match self {
            Locus::Point(p) => p.get(j).cloned(),
            Locus::Stratum(z) => z.contains(&j).then(QI::zero),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FiberDescription {
    pub label: String,
    pub vector_dim: usize,
    pub generic_dim: usize,
    pub singular: bool,
}

fn relation_rank(p: &Presentation, sub: &dyn Fn(Var) -> Option<RatFunc>) -> usize {
    if p.relations.is_empty() {
        return 0;
    }
    p.relation_matrix().map(|x| x.substitute(sub)).rank()
}

pub fn fiber(p: &Presentation, at: &Locus) -> FiberDescription {
    let g = p.generators.len();
    let generic = g - relation_rank(p, &|_| None);
    let here = g - relation_rank(p, &|v| match v {
        Var::S(j) => at.s_value(j as usize).map(RatFunc::constant),
        _ => None,
    });
    FiberDescription { label: at.label(), vector_dim: here, generic_dim: generic, singular: here > generic }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SingularComponent {
    pub stratum: Vec<usize>,
    /// Fiber directions `v` along which `T` is singular over the stratum.
    pub directions: Subspace<Scalar>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SingularLocus {
    pub generators: usize,
    pub components: Vec<SingularComponent>,
}

impl SingularLocus {
    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }
}

impl fmt::Display for SingularLocus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.components.is_empty() {
            return write!(f, "empty");
        }
        let parts: Vec<String> = self.components.iter().map(|c| describe_component(c, self.generators)).collect();
        write!(f, "{}", parts.join("; "))
    }
}

fn describe_component(c: &SingularComponent, g: usize) -> String {
    let s = if c.stratum.is_empty() {
        String::new()
    } else {
        format!("{} = 0", c.stratum.iter().map(|j| format!("s{}", j + 1)).collect::<Vec<_>>().join(" = "))
    };
    let coordinate = c.directions.basis().iter().all(|b| b.iter().filter(|x| !x.is_zero()).count() == 1);
    let v = if coordinate {
        let free: Vec<usize> = (0..g).filter(|&k| c.directions.basis().iter().any(|b| !b[k].is_zero())).collect();
        let zero: Vec<String> = (0..g).filter(|k| !free.contains(k)).map(|k| format!("v{k}")).collect();
        let free: Vec<String> = free.iter().map(|k| format!("v{k}")).collect();
        let mut parts = Vec::new();
        if !zero.is_empty() {
            parts.push(format!("{} = 0", zero.join(" = ")));
        }
        if !free.is_empty() {
            parts.push(format!("{} free", free.join(", ")));
        }
        parts.join(", ")
    } else {
        format!("v in span{{{}}}", c.directions.basis().iter().map(|b| vec_label(b)).collect::<Vec<_>>().join(", "))
    };
    [s, v].into_iter().filter(|x| !x.is_empty()).collect::<Vec<_>>().join(", ")
}

/// Singular points of `T = {Σ_g c_g(s) v_g = 0}` for a presentation with one relation.
pub fn singular_locus(p: &Presentation) -> Result<SingularLocus> {
    let g = p.generators.len();
    match p.relations.len() {
        0 => return Ok(SingularLocus { generators: g, components: vec![] }),
        1 => {}
        k => return Err(Error::UnsupportedShape(format!("{k} relations; only a single relation is supported"))),
    }
    let rel = &p.relations[0];
    let mut components = Vec::new();
    for stratum in subsets(p.n) {
        let on = |x: &Scalar| x.substitute(&|v| match v {
            Var::S(j) if stratum.contains(&(j as usize)) => Some(RatFunc::zero()),
            _ => None,
        });
        if !rel.coeffs.iter().all(|c| on(c).is_zero()) {
            continue;
        }
        if components.iter().any(|c: &SingularComponent| stratum.iter().all(|j| c.stratum.contains(j)) && c.stratum.len() < stratum.len()) {
            continue;
        }
        let rows: Vec<Vec<Scalar>> =
            (0..p.n).map(|j| rel.coeffs.iter().map(|c| on(&c.derivative(Var::S(j as u8)))).collect()).collect();
        let directions = Subspace::kernel(&Matrix::from_rows(rows));
        components.push(SingularComponent { stratum, directions });
    }
    Ok(SingularLocus { generators: g, components })
}

/// Coordinates on `T` or on the Zucker space: the pinned sections paired against `h`.
#[derive(Clone, Debug, PartialEq)]
pub struct Coordinates {
    pub names: Vec<String>,
    pub sections: Vec<(Vec<usize>, Vec<Scalar>)>,
    pub exprs: Vec<LinearExpr>,
}

pub fn pairing_coordinates(d: &NilpotentOrbitData, with_derivatives: bool) -> Result<Coordinates> {
    let sections: Vec<(Vec<usize>, Vec<Scalar>)> = if with_derivatives {
        f0m_presentation(d, d.n_vars())?.generators.into_iter().map(|g| (g.set, g.v)).collect()
    } else {
        d.f().get(0).basis().iter().map(|v| (vec![], v.clone())).collect()
    };
    let h = d.symbolic_h();
    let exprs = sections
        .iter()
        .map(|(i, v)| LinearExpr::from_scalar(&d.section_pairing(i, v, &h)?, d.rank()))
        .collect::<Result<Vec<_>>>()?;
    let names = (0..sections.len()).map(|k| format!("v{k}")).collect();
    Ok(Coordinates { names, sections, exprs })
}

#[derive(Clone, Debug, PartialEq)]
pub struct LimitSet {
    pub stratum: Vec<usize>,
    pub with_derivatives: bool,
    pub height_bound: u32,
    pub coordinates: Coordinates,
    pub admissible_basis: Vec<Vec<BigInt>>,
    /// Admissible classes with `‖h‖∞ ≤ height_bound`, when the box is small enough to list.
    pub admissible_count: Option<usize>,
    pub box_size: Option<usize>,
    /// Limit value of each coordinate as a function of admissible `h`.
    pub limits: Vec<Scalar>,
    /// Coordinates that carry an extra continuous limit parameter.
    pub extra_parameters: Vec<usize>,
    pub invariant_lattice: Vec<Vec<BigInt>>,
}

impl LimitSet {
    pub fn matches_invariant_lattice(&self) -> bool {
        let a: Vec<Vec<BigRational>> = self.admissible_basis.iter().map(|v| to_rat(v)).collect();
        let b: Vec<Vec<BigRational>> = self.invariant_lattice.iter().map(|v| to_rat(v)).collect();
        crate::exact::lattice::lattice_basis(&a) == crate::exact::lattice::lattice_basis(&b)
    }
}

fn to_rat(v: &[BigInt]) -> Vec<BigRational> {
    v.iter().map(|x| BigRational::from_integer(x.clone())).collect()
}

/// Realified functionals `h ↦ Re, Im` of the given coefficient rows.
fn real_rows(rows: &[Vec<Scalar>], omega: &QI) -> Result<Vec<Vec<BigRational>>> {
    let mut out = Vec::new();
    for r in rows {
        let q: Vec<QI> = r
            .iter()
            .map(|x| to_qi(&instantiate(x, omega)).ok_or_else(|| Error::NotInstantiable(x.to_string())))
            .collect::<Result<_>>()?;
        out.push(q.iter().map(|x| x.re.clone()).collect());
        out.push(q.iter().map(|x| x.im.clone()).collect());
    }
    Ok(out)
}

/// Largest box side `(2B+1)^rank` that is enumerated explicitly.
pub const ENUMERATION_LIMIT: usize = 2_000_000;

fn count_in_box(rows: &[Vec<BigRational>], rank: usize, bound: u32) -> Option<(usize, usize)> {
    let side = 2 * bound as usize + 1;
    let total = side.checked_pow(rank as u32)?;
    if total > ENUMERATION_LIMIT {
        return None;
    }
    let ints: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| clear_denominators(r).iter().map(|x| x.to_i128()).collect::<Option<Vec<_>>>())
        .collect::<Option<_>>()?;
    let count = (0..total)
        .into_par_iter()
        .filter(|idx| {
            let mut rest = *idx;
            let h: Vec<i128> = (0..rank)
                .map(|_| {
                    let c = (rest % side) as i128 - bound as i128;
                    rest /= side;
                    c
                })
                .collect();
            ints.iter().all(|r| r.iter().zip(&h).map(|(a, b)| a * b).sum::<i128>() == 0)
        })
        .count();
    Some((count, total))
}

pub fn invariant_lattice(d: &NilpotentOrbitData) -> Result<Vec<Vec<BigInt>>> {
    let w = d.numeric_omega();
    let mut rows = Vec::new();
    for n in &d.ns {
        let m = matrix_to_qi(&instantiate_matrix(n, &w)).ok_or_else(|| Error::NotInstantiable("N".into()))?;
        for r in m.row_vecs() {
            rows.push(r.iter().map(|x| x.re.clone()).collect());
            rows.push(r.iter().map(|x| x.im.clone()).collect());
        }
    }
    Ok(integer_kernel(&rows, d.rank()))
}

/// Bounded-limit classification of `Q(h, σ(z))` as the stratum coordinates tend to zero.
pub fn tz_limit_points(d: &NilpotentOrbitData, stratum: &[usize], with_derivatives: bool, height_bound: u32) -> Result<LimitSet> {
    let coords = pairing_coordinates(d, with_derivatives)?;
    let w = d.numeric_omega();
    let r = d.rank();
    let unbounded: Vec<Vec<Vec<Scalar>>> = coords
        .exprs
        .iter()
        .map(|e| e.terms.iter().filter(|(m, _)| growth(m, stratum) == Growth::Unbounded).map(|(_, row)| row.clone()).collect())
        .collect();
    let all_rows: Vec<Vec<Scalar>> = unbounded.iter().flatten().cloned().collect();
    let real = real_rows(&all_rows, &w)?;
    let admissible_basis = if real.is_empty() {
        (0..r).map(|i| (0..r).map(|j| BigInt::from((i == j) as i32)).collect()).collect()
    } else {
        integer_kernel(&real, r)
    };
    let (admissible_count, box_size) = match count_in_box(&real, r, height_bound) {
        Some((c, t)) => (Some(c), Some(t)),
        None => (None, None),
    };
    let limits: Vec<Scalar> = coords
        .exprs
        .iter()
        .map(|e| {
            let kept = LinearExpr {
                rank: r,
                terms: e.terms.iter().filter(|(m, _)| growth(m, stratum) == Growth::Survives).map(|(m, c)| (m.clone(), c.clone())).collect(),
            };
            kept.to_scalar()
        })
        .collect();

    // an unbounded direction absorbed by a cocompact lattice of constant terms
    let mut extra = Vec::new();
    for k in 0..coords.exprs.len() {
        if unbounded[k].is_empty() {
            continue;
        }
        let own = real_rows(&unbounded[k], &w)?;
        let others: Vec<Vec<Scalar>> = unbounded.iter().enumerate().filter(|(i, _)| *i != k).flat_map(|(_, u)| u.clone()).collect();
        let others = real_rows(&others, &w)?;
        let base = crate::exact::lattice::rational_rank(&others);
        let mut both = others.clone();
        both.extend(own);
        if crate::exact::lattice::rational_rank(&both) == base {
            continue;
        }
        let constant = coords.exprs[k].terms.get(&LaurentMono::new());
        let Some(constant) = constant else { continue };
        let images: Vec<Vec<QI>> = admissible_basis
            .iter()
            .map(|b| {
                let v = constant.iter().zip(b).fold(QI::zero(), |a, (c, x)| {
                    &a + &(&to_qi(&instantiate(c, &w)).unwrap_or_default() * &QI::from_rational(BigRational::from_integer(x.clone())))
                });
                vec![v]
            })
            .collect();
        if real_rank(&images) >= 2 {
            extra.push(k);
        }
    }
    Ok(LimitSet {
        stratum: stratum.to_vec(),
        with_derivatives,
        height_bound,
        coordinates: coords,
        admissible_basis,
        admissible_count,
        box_size,
        limits,
        extra_parameters: extra,
        invariant_lattice: invariant_lattice(d)?,
    })
}

/// Generic sample values for the symbols left free on a stratum.
pub fn generic_value(v: Var) -> Option<QI> {
    match v {
        Var::Z(j) => Some(QI::new(BigRational::new(1.into(), (j as i64 + 3).into()), BigRational::new((j as i64 + 5).into(), 4.into()))),
        Var::S(j) => Some(QI::new(BigRational::new(1.into(), (j as i64 + 2).into()), BigRational::new(1.into(), (j as i64 + 7).into()))),
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuotientFiber {
    pub label: String,
    pub fiber_dim: usize,
    pub lattice_rank: usize,
    pub torus_rank: usize,
    pub vector_dim: usize,
    pub injective: bool,
}

/// Shape of `T/T_ℤ` over a point or stratum: real rank of the limiting lattice and the
/// complementary vector dimension.
pub fn quotient_fiber(d: &NilpotentOrbitData, p: &Presentation, at: &Locus, height_bound: u32) -> Result<QuotientFiber> {
    let stratum = at.zero_set();
    let fib = fiber(p, at);
    let lim = tz_limit_points(d, &stratum, true, height_bound)?;
    let w = d.numeric_omega();
    let vals = |v: Var| match v {
        Var::S(j) => at.s_value(j as usize).filter(|x| !x.is_zero()).or_else(|| generic_value(v)),
        _ => generic_value(v),
    };
    let rows: Vec<Vec<QI>> = lim
        .limits
        .iter()
        .map(|e| {
            LinearExpr::from_scalar(e, d.rank())
                .ok()
                .and_then(|l| l.evaluate(&vals, &w))
                .ok_or_else(|| Error::NotInstantiable(e.to_string()))
        })
        .collect::<Result<_>>()?;
    let images: Vec<Vec<QI>> = lim
        .admissible_basis
        .iter()
        .map(|b| {
            rows.iter()
                .map(|row| {
                    row.iter().zip(b).fold(QI::zero(), |a, (c, x)| &a + &(c * &QI::from_rational(BigRational::from_integer(x.clone()))))
                })
                .collect()
        })
        .collect();
    let torus = real_rank(&images);
    let crank = complex_rank(&images);
    Ok(QuotientFiber {
        label: at.label(),
        fiber_dim: fib.vector_dim,
        lattice_rank: lim.admissible_basis.len(),
        torus_rank: torus,
        vector_dim: fib.vector_dim - crank,
        injective: torus == lim.admissible_basis.len(),
    })
}

/// Polynomials over ℤ, lowest degree first.
type IntPoly = Vec<BigInt>;

fn trim(p: &mut IntPoly) {
    while p.len() > 1 && p.last().is_some_and(|x| x.is_zero()) {
        p.pop();
    }
}

/// Exact division by a monic polynomial, if it divides.
fn div_monic(a: &IntPoly, b: &IntPoly) -> Option<IntPoly> {
    let mut r = a.clone();
    let db = b.len() - 1;
    if r.len() < b.len() {
        return None;
    }
    let mut q = vec![BigInt::zero(); r.len() - db];
    for i in (0..q.len()).rev() {
        let c = r[i + db].clone();
        q[i] = c.clone();
        for (k, bk) in b.iter().enumerate() {
            r[i + k] -= &c * bk;
        }
    }
    r.iter().all(|x| x.is_zero()).then_some(q)
}

fn cyclotomic(m: usize, cache: &mut BTreeMap<usize, IntPoly>) -> IntPoly {
    if let Some(p) = cache.get(&m) {
        return p.clone();
    }
    let mut p: IntPoly = vec![BigInt::zero(); m + 1];
    p[0] = -BigInt::one();
    p[m] = BigInt::one();
    for d in (1..m).filter(|d| m % d == 0) {
        let c = cyclotomic(d, cache);
        p = div_monic(&p, &c).expect("cyclotomic factor");
    }
    trim(&mut p);
    cache.insert(m, p.clone());
    p
}

fn euler_phi(m: usize) -> usize {
    (1..=m).filter(|k| k.gcd(&m) == 1).count()
}

/// Characteristic polynomial `det(x − T)` by Faddeev–LeVerrier.
pub fn char_poly(t: &Matrix<QI>) -> Vec<BigRational> {
    let n = t.rows();
    let mut c = vec![BigRational::zero(); n + 1];
    c[n] = BigRational::one();
    let mut m: Matrix<QI> = Matrix::zeros(n, n);
    for k in 1..=n {
        m = t.mul(&m).add(&Matrix::identity(n).scale(&QI::from_rational(c[n + 1 - k].clone())));
        let tr = t.mul(&m).trace();
        c[n - k] = -tr.re / BigRational::from_integer(BigInt::from(k));
    }
    c
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonodromyReport {
    pub char_poly: Vec<String>,
    /// `(m, multiplicity)` for each cyclotomic factor `Φ_m`.
    pub cyclotomic_factors: Vec<(usize, usize)>,
    /// Eigenvalues `exp(2πi k/m)` as `(k, m)`.
    pub eigenvalues: Vec<(usize, usize)>,
    /// Residues in `(−1, 0]` of the Deligne lattice, one per eigenvalue.
    pub residues: Vec<String>,
    pub order: usize,
    pub unipotent: bool,
    pub invariant_lattice: Vec<Vec<String>>,
    pub det_t_minus_id: String,
    pub fiber: Option<String>,
}

pub fn monodromy_analysis(t: &Matrix<QI>) -> Result<MonodromyReport> {
    if !t.is_square() || !t.is_integral() {
        return Err(Error::PreconditionViolated("monodromy must be a square integral matrix".into()));
    }
    let n = t.rows();
    let det = t.det();
    if !(det.is_one() || (-&det).is_one()) {
        return Err(Error::PreconditionViolated(format!("det T = {det} is not a unit")));
    }
    let cp = char_poly(t);
    let mut rest: IntPoly = cp.iter().map(|x| x.to_integer()).collect();
    let mut cache = BTreeMap::new();
    let mut factors = Vec::new();
    for m in 1..=(2 * n * n + 2) {
        if euler_phi(m) > n {
            continue;
        }
        let phi = cyclotomic(m, &mut cache);
        let mut mult = 0;
        while rest.len() > 1 {
            match div_monic(&rest, &phi) {
                Some(q) => {
                    rest = q;
                    mult += 1;
                }
                None => break,
            }
        }
        if mult > 0 {
            factors.push((m, mult));
        }
    }
    trim(&mut rest);
    if rest.len() > 1 {
        let shown: Vec<String> = rest.iter().map(|x| x.to_string()).collect();
        return Err(Error::NotQuasiUnipotent(format!("non-cyclotomic factor with coefficients [{}]", shown.join(", "))));
    }
    let mut eigenvalues = Vec::new();
    let mut residues = Vec::new();
    for &(m, mult) in &factors {
        for k in (0..m).filter(|k| k.gcd(&m) == 1) {
            for _ in 0..mult {
                eigenvalues.push((k, m));
                let r = BigRational::new(-BigInt::from(k), BigInt::from(m));
                residues.push(r.to_string());
            }
        }
    }
    let order = factors.iter().fold(1usize, |a, (m, _)| a.lcm(m));
    let tm = t.sub(&Matrix::identity(n));
    let rows: Vec<Vec<BigRational>> = tm.row_vecs().iter().map(|r| r.iter().map(|x| x.re.clone()).collect()).collect();
    let inv = integer_kernel(&rows, n);
    let fiber = (n == 2).then(|| {
        match inv.len() {
            0 => "ℂ",
            1 => "ℂ*",
            _ => "elliptic curve",
        }
        .to_string()
    });
    Ok(MonodromyReport {
        char_poly: cp.iter().map(|x| x.to_string()).collect(),
        cyclotomic_factors: factors,
        eigenvalues,
        residues,
        order,
        unipotent: order == 1,
        invariant_lattice: inv.iter().map(|v| v.iter().map(|x| x.to_string()).collect()).collect(),
        det_t_minus_id: {
            let d = tm.det();
            if d.im.is_zero() { d.re.to_string() } else { d.to_string() }
        },
        fiber,
    })
}

pub fn eigenvalue_label(k: usize, m: usize) -> String {
    if k == 0 {
        "1".into()
    } else {
        format!("exp(2πi·{k}/{m})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::OmegaMode;
    use crate::hodge::Splitting;

    fn w() -> Scalar {
        RatFunc::omega()
    }
    fn wb() -> Scalar {
        RatFunc::var(Var::OmegaBar)
    }
    fn c(n: i64) -> Scalar {
        RatFunc::int(n)
    }

    pub(crate) fn example2(omega: OmegaMode) -> NilpotentOrbitData {
        let n: Matrix<Scalar> = Matrix::from_int_rows(&[&[0, 0, 1, 0], &[0, 0, 0, 1], &[0, 0, 0, 0], &[0, 0, 0, 0]]);
        let s = Splitting::from_vectors(
            4,
            &[
                ((1, -1), vec![vec![c(0), c(0), c(1), w()]]),
                ((-1, 1), vec![vec![c(0), c(0), c(1), wb()]]),
                ((0, -2), vec![vec![c(1), w(), c(0), c(0)]]),
                ((-2, 0), vec![vec![c(1), wb(), c(0), c(0)]]),
            ],
        );
        NilpotentOrbitData {
            omega,
            q: Matrix::from_int_rows(&[&[0, 0, -1, 0], &[0, 0, 0, -1], &[1, 0, 0, 0], &[0, 1, 0, 0]]),
            ns: vec![n.clone(), n],
            splitting: s,
            delta: Matrix::zeros(4, 4),
            gamma: vec![],
            weight: -1,
        }
    }

    #[test]
    fn example2_presentation() {
        let d = example2(OmegaMode::Formal);
        let p = f0m_presentation(&d, 2).unwrap();
        assert_eq!(p.generators.len(), 3);
        assert_eq!(p.relations.len(), 1);
        assert_eq!(p.relations[0].coeffs, vec![c(0), -s_var(0), s_var(1)]);
        assert_eq!(fiber(&p, &Locus::Point(vec![QI::zero(), QI::zero()])).vector_dim, 3);
        assert_eq!(fiber(&p, &Locus::Stratum(vec![])).vector_dim, 2);
        let sl = singular_locus(&p).unwrap();
        assert_eq!(sl.to_string(), "s1 = s2 = 0, v1 = v2 = 0, v0 free");
    }

    #[test]
    fn example2_limits() {
        let d = example2(OmegaMode::Instantiated(QI::i()));
        let l = tz_limit_points(&d, &[0, 1], true, 3).unwrap();
        assert!(l.matches_invariant_lattice());
        assert_eq!(l.admissible_count, Some(49));
        assert!(l.extra_parameters.is_empty());
        let z = tz_limit_points(&d, &[0, 1], false, 3).unwrap();
        assert_eq!(z.extra_parameters.len(), 1);
        let k = z.extra_parameters[0];
        assert_eq!(z.coordinates.sections[k].1, vec![c(0), c(0), c(1), w()]);
        let origin = Locus::Point(vec![QI::zero(), QI::zero()]);
        let p = f0m_presentation(&d, 2).unwrap();
        let q = quotient_fiber(&d, &p, &origin, 3).unwrap();
        assert_eq!((q.torus_rank, q.vector_dim), (2, 2));
        let axis = Locus::Point(vec![QI::ratio(1, 3), QI::zero()]);
        let q = quotient_fiber(&d, &p, &axis, 3).unwrap();
        assert_eq!((q.torus_rank, q.vector_dim), (2, 1));
        let q = quotient_fiber(&d, &p, &Locus::Stratum(vec![]), 3).unwrap();
        assert_eq!((q.torus_rank, q.vector_dim), (4, 0));
    }

    #[test]
    fn cyclotomic_values() {
        let mut cache = BTreeMap::new();
        let p6: Vec<i64> = cyclotomic(6, &mut cache).iter().map(|x| x.to_i64().unwrap()).collect();
        assert_eq!(p6, vec![1, -1, 1]);
        let p12: Vec<i64> = cyclotomic(12, &mut cache).iter().map(|x| x.to_i64().unwrap()).collect();
        assert_eq!(p12, vec![1, 0, -1, 0, 1]);
    }

    #[test]
    fn order_six_monodromy() {
        let t: Matrix<QI> = Matrix::from_int_rows(&[&[0, 1], &[-1, 1]]);
        let r = monodromy_analysis(&t).unwrap();
        assert_eq!(r.order, 6);
        assert_eq!(r.eigenvalues, vec![(1, 6), (5, 6)]);
        assert_eq!(r.residues, vec!["-1/6", "-5/6"]);
        assert!(r.invariant_lattice.is_empty());
        assert_eq!(r.det_t_minus_id, "1");
        assert_eq!(r.fiber.as_deref(), Some("ℂ"));
        let h: Matrix<QI> = Matrix::from_int_rows(&[&[2, 1], &[1, 1]]);
        assert!(matches!(monodromy_analysis(&h), Err(Error::NotQuasiUnipotent(_))));
        let id: Matrix<QI> = Matrix::identity(3);
        let r = monodromy_analysis(&id).unwrap();
        assert!(r.unipotent);
        assert_eq!(r.invariant_lattice.len(), 3);
    }
}
