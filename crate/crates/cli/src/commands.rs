//! The command set: each command turns a validated scenario into a report.

use std::fmt;

use serde_json::{json, Value};

use hodge_neron_core::exact::{instantiate_matrix, matrix_to_qi, vecops, Matrix, OmegaMode, Scalar, QI};
use hodge_neron_core::filtration::{
    cone_constancy, relative_weight_filtration, weight_filtration, Filtration, CONE_SEED, DEFAULT_CONE_TRIALS,
};
use hodge_neron_core::hodge::{check_delta, deligne_splitting, inst_splitting};
use hodge_neron_core::neron::{
    eigenvalue_label, f0m_presentation, fiber, monodromy_analysis, quotient_fiber, singular_locus, tz_limit_points,
    Locus, Presentation,
};
use hodge_neron_core::normal_function::{
    delta_kills_hodge_classes, graph_closure_fiber, graph_map, singularity_class, v0_boundedness, v0_lift,
    validate_mixed_orbit, vrone_conditions, MixedOrbitData, PieceKind, SingularityKind,
};
use hodge_neron_core::orbit::{
    default_decay_grid, estimate_scan, nplus_decay, subsets, validate_orbit, NilpotentOrbitData, ScanGrid,
};
use hodge_neron_core::sl2::sl2_triple;
use hodge_neron_core::Error;

use crate::report::{fmt_f, fmt_levels, join, Report};
use crate::scenario::Scenario;

pub const COMMANDS: [&str; 15] = [
    "validate",
    "wfilt",
    "splitting",
    "sl2",
    "estimate-scan",
    "presentation",
    "fiber",
    "tz-closure",
    "quotient-fiber",
    "monodromy",
    "nf-validate",
    "nf-v0",
    "nf-singularity",
    "nf-closure",
    "report-all",
];

/// Levels of the dyadic `y` grid used for the `v₀` plateau check.
pub const V0_LEVELS: u32 = 6;

#[derive(Debug, Clone, Default)]
pub struct Options {
    pub point: Option<Vec<QI>>,
    pub stratum: Option<Vec<usize>>,
    pub grid: Option<Vec<f64>>,
    pub height: Option<u32>,
    pub no_derivative_sections: bool,
}

#[derive(Debug)]
pub enum CommandError {
    Unknown(String),
    Usage(String),
    Core(Error),
}

impl fmt::Display for CommandError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CommandError::Unknown(c) => write!(f, "unknown command '{c}'"),
            CommandError::Usage(m) => write!(f, "usage error: {m}"),
            CommandError::Core(e) => write!(f, "computation failed: {e}"),
        }
    }
}

impl From<Error> for CommandError {
    fn from(e: Error) -> Self {
        CommandError::Core(e)
    }
}

type Out = Result<Vec<Report>, CommandError>;

pub fn run(command: &str, s: &Scenario, o: &Options) -> Out {
    match command {
        "validate" => one(validate(s)),
        "wfilt" => one(wfilt(s)),
        "splitting" => one(splitting(s)),
        "sl2" => one(sl2(s)),
        "estimate-scan" => one(scan(s, o)),
        "presentation" => one(presentation(s)),
        "fiber" => one(fiber_cmd(s, o)),
        "tz-closure" => one(tz_closure(s, o)),
        "quotient-fiber" => one(quotient(s, o)),
        "monodromy" => one(monodromy(s)),
        "nf-validate" => one(nf_validate(s)),
        "nf-v0" => one(nf_v0(s, o)),
        "nf-singularity" => one(nf_singularity(s)),
        "nf-closure" => one(nf_closure(s, o)),
        "report-all" => report_all(s, o),
        c => Err(CommandError::Unknown(c.into())),
    }
}

fn one(r: Result<Report, CommandError>) -> Out {
    r.map(|r| vec![r])
}

/// Commands that apply to the scenario, in report order.
pub fn applicable(s: &Scenario) -> Vec<&'static str> {
    let mut cmds = vec!["validate", "wfilt", "splitting", "sl2"];
    if s.orbit.ns.iter().any(|n| !n.is_zero()) {
        cmds.push("estimate-scan");
    }
    cmds.extend(["presentation", "fiber", "tz-closure", "quotient-fiber"]);
    if s.monodromy.is_some() {
        cmds.push("monodromy");
    }
    if s.mixed.is_some() {
        cmds.extend(["nf-validate", "nf-v0", "nf-singularity", "nf-closure"]);
    }
    cmds
}

fn report_all(s: &Scenario, o: &Options) -> Out {
    let mut out = Vec::new();
    for c in applicable(s) {
        out.extend(run(c, s, o)?);
    }
    Ok(out)
}

fn base(command: &str, s: &Scenario) -> Report {
    let mut r = Report::new(command, &s.name);
    r.prov("tool", concat!("hodge-neron ", env!("CARGO_PKG_VERSION")));
    r.prov("omega", omega_label(&s.orbit.omega));
    r.prov("gamma truncation", format!("{} terms", s.orbit.gamma.len()));
    r
}

fn omega_label(o: &OmegaMode) -> String {
    match o {
        OmegaMode::Formal => "formal".into(),
        OmegaMode::Instantiated(c) => format!("instantiated {c}"),
    }
}

fn mixed(s: &Scenario) -> Result<&MixedOrbitData, CommandError> {
    s.mixed.as_ref().ok_or_else(|| CommandError::Usage("scenario has no mixed block".into()))
}

fn height(s: &Scenario, o: &Options) -> u32 {
    o.height.unwrap_or(s.height_bound)
}

fn n_sum(d: &NilpotentOrbitData) -> Matrix<Scalar> {
    d.n_combination(&vec![Scalar::one(); d.n_vars()])
}

fn indent(s: impl fmt::Display) -> String {
    s.to_string().lines().map(|l| format!("  {l}")).collect::<Vec<_>>().join("\n")
}

fn hodge_numbers(d: &NilpotentOrbitData) -> String {
    d.splitting.hodge_numbers().iter().map(|((p, q), k)| format!("h^{{{p},{q}}}={k}")).collect::<Vec<_>>().join(" ")
}

fn graded_dims(f: &Filtration<Scalar>) -> String {
    let (a, b) = f.range();
    (a..=b).filter(|&k| f.gr_dim(k) > 0).map(|k| format!("Gr_{k}={}", f.gr_dim(k))).collect::<Vec<_>>().join(" ")
}

fn validate(s: &Scenario) -> Result<Report, CommandError> {
    let d = &s.orbit;
    let mut r = base("validate", s);
    r.kv("rank", d.rank());
    r.kv("variables", d.n_vars());
    r.kv("weight", d.weight);
    r.kv("hodge numbers", hodge_numbers(d));
    let q = &d.q;
    r.flag("Q alternating", q.transpose() == q.neg());
    r.flag("Q nondegenerate", !q.det().is_zero());
    let v = validate_orbit(d);
    for (name, ok) in v.items() {
        r.flag(name, ok);
    }
    r.kv("positivity sample", &v.positivity_sample);
    r.value("orbit", serde_json::to_value(&v).unwrap_or(Value::Null));
    Ok(r)
}

fn wfilt(s: &Scenario) -> Result<Report, CommandError> {
    let d = s.orbit.resolved();
    let mut r = base("wfilt", s);
    r.prov("cone seed", format!("{CONE_SEED:#x}"));
    r.prov("cone trials", DEFAULT_CONE_TRIALS);
    for (j, n) in d.ns.iter().enumerate() {
        let w = weight_filtration(n, d.weight)?;
        r.kv(&format!("W(N{}) graded", j + 1), graded_dims(&w));
    }
    let w = weight_filtration(&n_sum(&d), d.weight)?;
    r.kv("W(N) graded", graded_dims(&w));
    r.line(format!("W(N):\n{}", indent(&w)));
    r.flag("W(N) matches splitting weights", w == d.w());
    r.flag("cone constancy", cone_constancy(&d.ns, None, DEFAULT_CONE_TRIALS));
    if let Some(x) = &s.mixed {
        let np = x.n_prime.iter().fold(Matrix::zeros(x.dim(), x.dim()), |a, m| a.add(m));
        let m = relative_weight_filtration(&np, &x.w())?;
        r.kv("M graded", graded_dims(&m));
        r.line(format!("M:\n{}", indent(&m)));
        r.flag("M matches mixed splitting weights", m == x.m());
        r.flag("relative cone constancy", cone_constancy(&x.n_prime, Some(&x.w()), DEFAULT_CONE_TRIALS));
    }
    Ok(r)
}

fn splitting(s: &Scenario) -> Result<Report, CommandError> {
    let d = s.orbit.resolved();
    let mut r = base("splitting", s);
    let computed = deligne_splitting(&d.w(), &d.f())?;
    r.kv("hodge numbers", hodge_numbers(&d));
    r.line(format!("splitting:\n{}", indent(&computed)));
    r.kv("real split", d.splitting.is_real_split());
    r.flag("recomputed splitting matches input", computed == d.splitting);
    r.flag("delta", check_delta(&d.w(), &d.f(), &d.delta));
    let w = d.numeric_omega();
    let split_qi = inst_splitting(&d.splitting, &w).ok_or_else(|| Error::NotInstantiable("splitting".into()))?;
    let delta_qi = matrix_to_qi(&instantiate_matrix(&d.delta, &w)).ok_or_else(|| Error::NotInstantiable("delta".into()))?;
    r.flag("delta kills real Hodge classes", delta_kills_hodge_classes(&split_qi, &delta_qi));
    Ok(r)
}

fn sl2(s: &Scenario) -> Result<Report, CommandError> {
    let d = s.orbit.resolved();
    let mut r = base("sl2", s);
    let mut ops: Vec<(String, Matrix<Scalar>)> =
        d.ns.iter().enumerate().map(|(j, n)| (format!("N{}", j + 1), n.clone())).collect();
    if d.n_vars() > 1 {
        ops.push(("N".into(), n_sum(&d)));
    }
    for (name, n) in ops {
        let t = sl2_triple(&n, &d.splitting, d.weight)?;
        r.line(format!("{name}:\n  Y = {}\n  N+ = {}", t.y, t.nplus));
        r.flag(format!("{name} triple relations"), t.is_valid());
    }
    Ok(r)
}

fn scan(s: &Scenario, o: &Options) -> Result<Report, CommandError> {
    let d = &s.orbit;
    let mut r = base("estimate-scan", s);
    let grid = ScanGrid { levels: o.grid.clone().unwrap_or_else(|| s.scan.levels.clone()), xs: s.scan.xs.clone() };
    let with_derivatives = !o.no_derivative_sections;
    r.input("derivative sections", with_derivatives);
    r.prov("levels", join(&grid.levels.iter().map(|x| fmt_f(*x)).collect::<Vec<_>>()));
    r.prov("real parts", join(&grid.xs.iter().map(|x| fmt_f(*x)).collect::<Vec<_>>()));
    r.prov("decay levels", join(&s.scan.decay_levels));
    let hs: Vec<Vec<QI>> = (0..d.rank()).map(|k| vecops::unit(d.rank(), k)).collect();
    let t = estimate_scan(d, &hs, &grid, with_derivatives)?;
    r.kv("Z/B max per level", fmt_levels(&t.max_per_level));
    r.kv("Z/B plateau from", t.plateau_from.map(fmt_f).unwrap_or_else(|| "none".into()));
    r.flag("Z/B bounded", t.bounded);
    let dec = nplus_decay(d, &default_decay_grid(d.n_vars(), &s.scan.decay_levels))?;
    r.kv("N+ decay max per level", fmt_levels(&dec.max_per_level));
    r.flag("N+ decay bounded", dec.bounded);
    r.value("scan_max", json!(t.max_per_level));
    r.value("decay_max", json!(dec.max_per_level));
    Ok(r)
}

fn presentation_of(s: &Scenario) -> Result<Presentation, CommandError> {
    let p = f0m_presentation(&s.orbit, s.orbit.n_vars())?;
    Ok(if s.presentation_exact { p.assume_exact() } else { p })
}

fn presentation(s: &Scenario) -> Result<Report, CommandError> {
    let d = &s.orbit;
    let mut r = base("presentation", s);
    let p = presentation_of(s)?;
    r.line(p.to_string());
    let h = d.symbolic_h();
    let mut pairings = Vec::new();
    for (k, g) in p.generators.iter().enumerate() {
        let q = d.section_pairing(&g.set, &g.v, &h)?;
        r.line(format!("pairing e{k}: {q}"));
        pairings.push(q.to_string());
    }
    r.value("pairings", json!(pairings));
    r.value("generators", json!(p.generators.len()));
    r.value("relations", json!(p.relations.iter().map(|x| join(&x.coeffs)).collect::<Vec<_>>()));
    Ok(r)
}

fn locus(s: &Scenario, o: &Options) -> Result<Locus, CommandError> {
    let n = s.orbit.n_vars();
    if let Some(p) = &o.point {
        if p.len() != n {
            return Err(CommandError::Usage(format!("--point needs {n} coordinates")));
        }
        return Ok(Locus::Point(p.clone()));
    }
    if let Some(j) = &o.stratum {
        return Ok(Locus::Stratum(j.clone()));
    }
    Ok(Locus::Point(vec![QI::zero(); n]))
}

fn fiber_cmd(s: &Scenario, o: &Options) -> Result<Report, CommandError> {
    let mut r = base("fiber", s);
    let at = locus(s, o)?;
    r.input("locus", at.label());
    let p = presentation_of(s)?;
    let f = fiber(&p, &at);
    r.kv("vector_dim", f.vector_dim);
    r.kv("generic_dim", f.generic_dim);
    r.kv("singular", f.singular);
    match singular_locus(&p) {
        Ok(sl) => r.kv("singular locus", sl),
        Err(e) => r.kv("singular locus", format!("not computed ({e})")),
    }
    r.kv("generation", if p.containment_only { "containment-only" } else { "exact" });
    Ok(r)
}

fn strata_arg(s: &Scenario, o: &Options) -> Vec<usize> {
    o.stratum.clone().unwrap_or_else(|| (0..s.orbit.n_vars()).collect())
}

fn stratum_label(j: &[usize]) -> String {
    if j.is_empty() {
        "interior".into()
    } else {
        j.iter().map(|k| format!("s{}=0", k + 1)).collect::<Vec<_>>().join(",")
    }
}

fn set_label(set: &[usize]) -> String {
    if set.is_empty() {
        "∅".into()
    } else {
        format!("{{{}}}", join(&set.iter().map(|j| j + 1).collect::<Vec<_>>()))
    }
}

/// Scales a vector so that its last nonzero entry is 1.
fn last_one(v: &[Scalar]) -> Vec<Scalar> {
    match v.iter().rev().find(|x| !x.is_zero()) {
        Some(c) => {
            let inv = c.inv();
            v.iter().map(|x| x * &inv).collect()
        }
        None => v.to_vec(),
    }
}

fn tz_closure(s: &Scenario, o: &Options) -> Result<Report, CommandError> {
    let mut r = base("tz-closure", s);
    let stratum = strata_arg(s, o);
    let with_derivatives = !o.no_derivative_sections;
    let hb = height(s, o);
    r.input("stratum", stratum_label(&stratum));
    r.input("derivative sections", with_derivatives);
    r.prov("height bound", hb);
    let l = tz_limit_points(&s.orbit, &stratum, with_derivatives, hb)?;
    let vec_str = |v: &[Scalar]| format!("({})", join(v));
    for (name, (set, v)) in l.coordinates.names.iter().zip(&l.coordinates.sections) {
        r.line(format!("coordinate {name}: sigma[I={}, v={}]", set_label(set), vec_str(v)));
    }
    let lat = |b: &[Vec<_>]| b.iter().map(|v: &Vec<_>| format!("({})", join(v))).collect::<Vec<_>>().join(" ");
    r.kv("admissible lattice", lat(&l.admissible_basis));
    r.kv("invariant lattice", lat(&l.invariant_lattice));
    r.kv("admissible count", l.admissible_count.map(|c| c.to_string()).unwrap_or_else(|| "not enumerated".into()));
    r.kv("box size", l.box_size.map(|c| c.to_string()).unwrap_or_else(|| "not enumerated".into()));
    for (name, lim) in l.coordinates.names.iter().zip(&l.limits) {
        r.line(format!("limit {name}: {lim}"));
    }
    let extra: Vec<&String> = l.extra_parameters.iter().map(|&k| &l.coordinates.names[k]).collect();
    r.kv("extra parameters", if extra.is_empty() { "none".into() } else { join(&extra) });
    if with_derivatives {
        r.flag("admissible lattice equals invariant lattice", l.matches_invariant_lattice());
    }
    Ok(r)
}

fn quotient(s: &Scenario, o: &Options) -> Result<Report, CommandError> {
    let mut r = base("quotient-fiber", s);
    let at = locus(s, o)?;
    let hb = height(s, o);
    r.input("locus", at.label());
    r.prov("height bound", hb);
    let p = presentation_of(s)?;
    let q = quotient_fiber(&s.orbit, &p, &at, hb)?;
    r.kv("fiber_dim", q.fiber_dim);
    r.kv("lattice_rank", q.lattice_rank);
    r.kv("torus_rank", q.torus_rank);
    r.kv("vector_dim", q.vector_dim);
    r.kv("injective", q.injective);
    let c = q.fiber_dim - q.vector_dim;
    let mut shape = format!("C^{c}/Z^{}", q.torus_rank);
    if q.vector_dim > 0 {
        shape.push_str(&format!(" x C^{}", q.vector_dim));
    }
    r.kv("shape", shape);
    Ok(r)
}

fn monodromy(s: &Scenario) -> Result<Report, CommandError> {
    let t = s.monodromy.as_ref().ok_or_else(|| CommandError::Usage("scenario has no monodromy block".into()))?;
    let mut r = base("monodromy", s);
    let m = monodromy_analysis(t)?;
    r.kv("characteristic polynomial", join(&m.char_poly));
    r.kv("cyclotomic factors", m.cyclotomic_factors.iter().map(|(k, e)| format!("Phi_{k}^{e}")).collect::<Vec<_>>().join(" "));
    r.kv("eigenvalues", m.eigenvalues.iter().map(|(k, n)| eigenvalue_label(*k, *n)).collect::<Vec<_>>().join(", "));
    r.kv("residues", join(&m.residues));
    r.kv("order", m.order);
    r.kv("unipotent", m.unipotent);
    r.kv("invariant lattice", if m.invariant_lattice.is_empty() { "0".into() } else { format!("{:?}", m.invariant_lattice) });
    r.kv("det(T-id)", &m.det_t_minus_id);
    r.kv("fiber", m.fiber.clone().unwrap_or_else(|| "not determined".into()));
    r.value("monodromy", serde_json::to_value(&m).unwrap_or(Value::Null));
    Ok(r)
}

fn nf_validate(s: &Scenario) -> Result<Report, CommandError> {
    let x = mixed(s)?;
    let mut r = base("nf-validate", s);
    if let Some(l) = &s.lambda {
        r.input("lambda", l);
    }
    let f = s.orbit.eval_period_symbolic()?;
    let f0: Vec<String> = f.get(0).basis().iter().map(|b| format!("({})", join(&last_one(b)))).collect();
    r.kv("period F^0", format!("span{{{}}}", f0.join(", ")));
    r.line(format!("W:\n{}", indent(x.w())));
    r.line(format!("M:\n{}", indent(x.m())));
    for (name, ok) in validate_mixed_orbit(x).items() {
        r.flag(name, ok);
    }
    Ok(r)
}

fn nf_v0(s: &Scenario, o: &Options) -> Result<Report, CommandError> {
    let x = mixed(s)?;
    let mut r = base("nf-v0", s);
    let n = s.orbit.n_vars();
    let y = o.point.clone().unwrap_or_else(|| vec![QI::one(); n]);
    if y.len() != n {
        return Err(CommandError::Usage(format!("--point needs {n} coordinates")));
    }
    r.input("y", join(&y));
    r.prov("v0 levels", V0_LEVELS);
    let l = v0_lift(x, &y)?;
    r.kv("v0", format!("({})", join(&l.v0)));
    let np = x.n_prime_at(&y)?;
    r.flag("N'v0 = 0", vecops::is_zero(&np.mul_vec(&l.v0)));
    r.flag("last coordinate 1", l.v0.last().is_some_and(|c| c.is_one()));
    r.flag("unique", l.unique);
    r.flag("real", l.real);
    let b = v0_boundedness(x, V0_LEVELS)?;
    r.kv("max |v0| per level", fmt_levels(&b.max_per_level));
    r.flag("v0 bounded", b.bounded);
    Ok(r)
}

fn candidate(s: &Scenario, x: &MixedOrbitData) -> Vec<QI> {
    s.candidate.clone().unwrap_or_else(|| vecops::unit(x.dim(), x.dim() - 1))
}

fn nf_singularity(s: &Scenario) -> Result<Report, CommandError> {
    let x = mixed(s)?;
    let mut r = base("nf-singularity", s);
    let v = candidate(s, x);
    r.input("v", join(&v));
    let nps = x.n_prime_qi()?;
    let total = nps.iter().fold(vec![QI::zero(); x.dim()], |a, m| vecops::add(&a, &m.mul_vec(&v)));
    r.kv("sum N'_j v", format!("({})", join(&total)));
    let c = singularity_class(x, &v)?;
    r.kv("class", &c.kind);
    for (j, u) in c.cocycle.iter().enumerate() {
        r.line(format!("N'_{} v = ({})", j + 1, u.join(", ")));
    }
    if let Some(h) = &c.solution {
        r.kv("rational solution", format!("({})", h.join(", ")));
    }
    if let Some(p) = &c.certificate {
        r.kv("obstruction functional", format!("({})", p.join(", ")));
    }
    let mut invariant = true;
    for k in 0..x.h_rank() {
        let shifted = vecops::add(&v, &vecops::unit(x.dim(), k));
        invariant &= singularity_class(x, &shifted)?.kind == c.kind;
    }
    r.flag("class invariant under v -> v+h", invariant);
    r.value("singularity", serde_json::to_value(&c).unwrap_or(Value::Null));
    Ok(r)
}

fn nf_closure(s: &Scenario, o: &Options) -> Result<Report, CommandError> {
    let x = mixed(s)?;
    let mut r = base("nf-closure", s);
    let hb = height(s, o);
    r.prov("height bound", hb);
    for (k, e) in graph_map(x)?.iter().enumerate() {
        r.line(format!("graph coordinate {k}: {}", e.to_scalar()));
    }
    let vr = vrone_conditions(x, hb)?;
    r.kv("candidates examined", vr.examined);
    r.kv("with positive relation", vr.with_relation);
    r.kv("closure candidates", vr.candidates.len());
    let strata: Vec<Vec<usize>> = match &o.stratum {
        Some(j) => vec![j.clone()],
        None => subsets(s.orbit.n_vars()).into_iter().filter(|j| !j.is_empty()).collect(),
    };
    let deepest: Vec<usize> = (0..s.orbit.n_vars()).collect();
    let kind = singularity_class(x, &candidate(s, x))?.kind;
    for j in strata {
        let g = graph_closure_fiber(x, &j, hb)?;
        let label = stratum_label(&j);
        r.kv(&format!("closure over {label}"), g.summary());
        for p in g.pieces.iter().filter(|p| p.kind != PieceKind::Empty) {
            r.line(format!("  h = ({}): {:?}, limit ({})", join(&p.h), p.kind, p.limit.join(", ")));
        }
        if j == deepest && matches!(kind, SingularityKind::Torsion(_)) {
            r.flag("torsion singularity gives empty deepest closure", g.is_empty());
        }
    }
    Ok(r)
}
