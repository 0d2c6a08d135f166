//! Scenario files: exact scalars as strings, matrices as row lists.

use std::fmt;
use std::path::Path;

use serde::Deserialize;

use hodge_neron_core::exact::{ExactMatrix, Matrix, OmegaMode, RatFunc, Scalar, Var, QI};
use hodge_neron_core::hodge::Splitting;
use hodge_neron_core::normal_function::{validate_mixed_orbit, MixedOrbitData};
use hodge_neron_core::orbit::{validate_orbit, GammaTerm, NilpotentOrbitData};

type Rows = Vec<Vec<String>>;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawOmega {
    pub mode: String,
    #[serde(default)]
    pub value: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawPiece {
    pub p: i32,
    pub q: i32,
    pub basis: Rows,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawGamma {
    pub monomial: Vec<u32>,
    pub matrix: Rows,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawMixed {
    #[serde(rename = "N_prime")]
    pub n_prime: Vec<Rows>,
    pub splitting: Vec<RawPiece>,
    #[serde(default)]
    pub delta_prime: Option<Rows>,
    #[serde(default)]
    pub gamma_prime: Vec<RawGamma>,
    #[serde(default)]
    pub candidate: Option<Vec<String>>,
    #[serde(default)]
    pub lambda: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawScan {
    #[serde(default)]
    pub levels: Option<Vec<i64>>,
    #[serde(default)]
    pub x: Option<Vec<String>>,
    #[serde(default)]
    pub decay_levels: Option<Vec<i64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawScenario {
    pub name: String,
    #[serde(default)]
    pub description: Option<String>,
    pub omega: RawOmega,
    pub rank: usize,
    #[serde(rename = "Q")]
    pub q: Rows,
    #[serde(rename = "N")]
    pub n: Vec<Rows>,
    pub splitting: Vec<RawPiece>,
    #[serde(default = "default_weight")]
    pub weight: i32,
    #[serde(default)]
    pub delta: Option<Rows>,
    #[serde(default)]
    pub gamma: Vec<RawGamma>,
    #[serde(default)]
    pub mixed: Option<RawMixed>,
    #[serde(default)]
    pub monodromy: Option<Rows>,
    #[serde(default)]
    pub scan: Option<RawScan>,
    #[serde(default)]
    pub height_bound: Option<u32>,
    #[serde(default)]
    pub presentation_exact: bool,
}

fn default_weight() -> i32 {
    -1
}

#[derive(Debug, Clone, PartialEq)]
pub enum LoadError {
    Io(String),
    Parse { location: String, message: String },
    Validation(Vec<Issue>),
}

impl fmt::Display for LoadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LoadError::Io(m) => write!(f, "io error: {m}"),
            LoadError::Parse { location, message } => write!(f, "parse error at {location}: {message}"),
            LoadError::Validation(issues) => {
                write!(f, "validation failed:")?;
                for i in issues {
                    write!(f, "\n  {i}")?;
                }
                Ok(())
            }
        }
    }
}

/// A failed invariant with a machine-readable code.
#[derive(Debug, Clone, PartialEq)]
pub struct Issue {
    pub code: String,
    pub location: String,
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] at {}", self.code, self.location)
    }
}

fn perr(location: impl Into<String>, message: impl Into<String>) -> LoadError {
    LoadError::Parse { location: location.into(), message: message.into() }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(i64),
    Sym(&'static str),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Tok>, String> {
    let c: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < c.len() {
        let ch = c[i];
        if ch.is_whitespace() {
            i += 1;
        } else if ch.is_ascii_digit() {
            let st = i;
            while i < c.len() && c[i].is_ascii_digit() {
                i += 1;
            }
            let t: String = c[st..i].iter().collect();
            out.push(Tok::Num(t.parse().map_err(|_| format!("integer {t} out of range"))?));
        } else if "+-*/()".contains(ch) {
            out.push(Tok::Op(ch));
            i += 1;
        } else if ch == 'w' && c.get(i + 1) == Some(&'b') {
            out.push(Tok::Sym("wb"));
            i += 2;
        } else if ch == 'w' {
            out.push(Tok::Sym("w"));
            i += 1;
        } else if ch == 'i' {
            out.push(Tok::Sym("i"));
            i += 1;
        } else {
            return Err(format!("unexpected character '{ch}'"));
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn expr(&mut self) -> Result<Scalar, String> {
        let mut acc = self.term()?;
        while let Some(Tok::Op(c @ ('+' | '-'))) = self.peek().cloned() {
            self.pos += 1;
            let t = self.term()?;
            acc = if c == '+' { &acc + &t } else { &acc - &t };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Scalar, String> {
        let mut acc = self.unary()?;
        loop {
            match self.peek().cloned() {
                Some(Tok::Op('*')) => {
                    self.pos += 1;
                    acc = &acc * &self.unary()?;
                }
                Some(Tok::Op('/')) => {
                    self.pos += 1;
                    let d = self.unary()?;
                    if d.is_zero() {
                        return Err("division by zero".into());
                    }
                    acc = &acc / &d;
                }
                // juxtaposition such as `2i` or `3w`
                Some(Tok::Sym(_)) | Some(Tok::Op('(')) => acc = &acc * &self.atom()?,
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Scalar, String> {
        match self.peek() {
            Some(Tok::Op('-')) => {
                self.pos += 1;
                Ok(-&self.unary()?)
            }
            Some(Tok::Op('+')) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Scalar, String> {
        let t = self.peek().cloned().ok_or("unexpected end of expression")?;
        self.pos += 1;
        match t {
            Tok::Num(n) => Ok(RatFunc::int(n)),
            Tok::Sym("i") => Ok(RatFunc::constant(QI::i())),
            Tok::Sym("w") => Ok(RatFunc::omega()),
            Tok::Sym(_) => Ok(RatFunc::var(Var::OmegaBar)),
            Tok::Op('(') => {
                let e = self.expr()?;
                match self.peek() {
                    Some(Tok::Op(')')) => {
                        self.pos += 1;
                        Ok(e)
                    }
                    _ => Err("missing ')'".into()),
                }
            }
            Tok::Op(c) => Err(format!("unexpected '{c}'")),
        }
    }
}

/// Parses `a/b + c/d*i`-style exact scalars; `w` and `wb` denote ω and ω̄.
pub fn parse_scalar(s: &str) -> Result<Scalar, String> {
    let toks = tokenize(s)?;
    if toks.is_empty() {
        return Err("empty scalar".into());
    }
    let mut p = Parser { toks, pos: 0 };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(format!("trailing input in '{s}'"));
    }
    Ok(e)
}

pub fn parse_constant(s: &str) -> Result<QI, String> {
    parse_scalar(s)?.as_constant().ok_or_else(|| format!("'{s}' is not a constant"))
}

fn scalar_at(s: &str, loc: &str) -> Result<Scalar, LoadError> {
    parse_scalar(s).map_err(|m| perr(loc, m))
}

fn matrix_at(rows: &Rows, n: usize, loc: &str) -> Result<ExactMatrix, LoadError> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(perr(loc, format!("expected a {n}x{n} matrix")));
    }
    let data = rows
        .iter()
        .enumerate()
        .map(|(i, r)| r.iter().enumerate().map(|(j, x)| scalar_at(x, &format!("{loc}[{i}][{j}]"))).collect())
        .collect::<Result<Vec<Vec<Scalar>>, _>>()?;
    Ok(Matrix::from_rows(data))
}

fn splitting_at(pieces: &[RawPiece], n: usize, loc: &str) -> Result<Splitting<Scalar>, LoadError> {
    let mut items: Vec<((i32, i32), Vec<Vec<Scalar>>)> = Vec::new();
    for (k, p) in pieces.iter().enumerate() {
        let mut vecs = Vec::new();
        for (b, v) in p.basis.iter().enumerate() {
            let l = format!("{loc}[{k}].basis[{b}]");
            if v.len() != n {
                return Err(perr(&l, format!("expected {n} entries")));
            }
            vecs.push(v.iter().map(|x| scalar_at(x, &l)).collect::<Result<Vec<_>, _>>()?);
        }
        match items.iter_mut().find(|(pq, _)| *pq == (p.p, p.q)) {
            Some((_, existing)) => existing.extend(vecs),
            None => items.push(((p.p, p.q), vecs)),
        }
    }
    Ok(Splitting::from_vectors(n, &items))
}

fn gamma_at(g: &[RawGamma], n: usize, vars: usize, loc: &str) -> Result<Vec<GammaTerm>, LoadError> {
    g.iter()
        .enumerate()
        .map(|(k, t)| {
            let l = format!("{loc}[{k}]");
            if t.monomial.len() != vars || t.monomial.iter().all(|e| *e == 0) {
                return Err(perr(&l, format!("monomial must have {vars} exponents, not all zero")));
            }
            Ok(GammaTerm { exponents: t.monomial.clone(), matrix: matrix_at(&t.matrix, n, &format!("{l}.matrix"))? })
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct ScanSettings {
    pub levels: Vec<f64>,
    pub xs: Vec<f64>,
    pub decay_levels: Vec<i64>,
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub description: Option<String>,
    pub orbit: NilpotentOrbitData,
    pub mixed: Option<MixedOrbitData>,
    pub candidate: Option<Vec<QI>>,
    pub lambda: Option<String>,
    pub monodromy: Option<Matrix<QI>>,
    pub scan: ScanSettings,
    pub height_bound: u32,
    pub presentation_exact: bool,
}

pub const DEFAULT_HEIGHT: u32 = 10;

pub fn parse_scenario_str(text: &str) -> Result<Scenario, LoadError> {
    let raw: RawScenario = serde_json::from_str(text).map_err(|e| perr(format!("line {}", e.line()), e.to_string()))?;
    build(raw)
}

fn build(raw: RawScenario) -> Result<Scenario, LoadError> {
    let n = raw.rank;
    let omega = match raw.omega.mode.as_str() {
        "formal" => OmegaMode::Formal,
        "instantiated" => {
            let v = raw.omega.value.as_deref().ok_or_else(|| perr("omega.value", "instantiated ω needs a value"))?;
            OmegaMode::Instantiated(parse_constant(v).map_err(|m| perr("omega.value", m))?)
        }
        m => return Err(perr("omega.mode", format!("unknown mode '{m}'"))),
    };
    let q = matrix_at(&raw.q, n, "Q")?;
    let ns = raw.n.iter().enumerate().map(|(k, m)| matrix_at(m, n, &format!("N[{k}]"))).collect::<Result<Vec<_>, _>>()?;
    let splitting = splitting_at(&raw.splitting, n, "splitting")?;
    let delta = match &raw.delta {
        Some(m) => matrix_at(m, n, "delta")?,
        None => Matrix::zeros(n, n),
    };
    let gamma = gamma_at(&raw.gamma, n, ns.len(), "gamma")?;
    let orbit = NilpotentOrbitData { omega, q, ns, splitting, delta, gamma, weight: raw.weight };
    let (mixed, candidate, lambda) = match &raw.mixed {
        None => (None, None, None),
        Some(m) => {
            let d = n + 1;
            let n_prime = m
                .n_prime
                .iter()
                .enumerate()
                .map(|(k, x)| matrix_at(x, d, &format!("mixed.N_prime[{k}]")))
                .collect::<Result<Vec<_>, _>>()?;
            let splitting = splitting_at(&m.splitting, d, "mixed.splitting")?;
            let delta_prime = match &m.delta_prime {
                Some(x) => matrix_at(x, d, "mixed.delta_prime")?,
                None => Matrix::zeros(d, d),
            };
            let gamma_prime = gamma_at(&m.gamma_prime, d, orbit.ns.len(), "mixed.gamma_prime")?;
            let candidate = match &m.candidate {
                None => None,
                Some(v) if v.len() == d => Some(
                    v.iter()
                        .enumerate()
                        .map(|(k, x)| parse_constant(x).map_err(|e| perr(format!("mixed.candidate[{k}]"), e)))
                        .collect::<Result<Vec<_>, _>>()?,
                ),
                Some(_) => return Err(perr("mixed.candidate", format!("expected {d} entries"))),
            };
            let mixed = MixedOrbitData { base: orbit.clone(), n_prime, splitting, delta_prime, gamma_prime };
            (Some(mixed), candidate, m.lambda.clone())
        }
    };
    let monodromy = match &raw.monodromy {
        None => None,
        Some(rows) => {
            let k = rows.len();
            let m = matrix_at(rows, k, "monodromy")?;
            Some(m.try_map(|x| x.as_constant()).ok_or_else(|| perr("monodromy", "entries must be constants"))?)
        }
    };
    let defaults = hodge_neron_core::orbit::ScanGrid::default();
    let scan = match &raw.scan {
        None => ScanSettings { levels: defaults.levels, xs: defaults.xs, decay_levels: vec![10, 20, 40, 80] },
        Some(s) => ScanSettings {
            levels: s.levels.as_ref().map(|l| l.iter().map(|&x| x as f64).collect()).unwrap_or(defaults.levels),
            xs: match &s.x {
                None => defaults.xs,
                Some(xs) => xs
                    .iter()
                    .map(|x| parse_constant(x).map(|c| c.to_f64_pair().0).map_err(|e| perr("scan.x", e)))
                    .collect::<Result<_, _>>()?,
            },
            decay_levels: s.decay_levels.clone().unwrap_or_else(|| vec![10, 20, 40, 80]),
        },
    };
    Ok(Scenario {
        name: raw.name,
        description: raw.description,
        orbit,
        mixed,
        candidate,
        lambda,
        monodromy,
        scan,
        height_bound: raw.height_bound.unwrap_or(DEFAULT_HEIGHT),
        presentation_exact: raw.presentation_exact,
    })
}

/// Structural and orbit-level invariants of a parsed scenario.
pub fn validation_issues(s: &Scenario) -> Vec<Issue> {
    let mut out = Vec::new();
    let o = &s.orbit;
    if !o.splitting.is_direct_sum() || o.splitting.total_dim() != o.rank() {
        out.push(Issue { code: "splitting-direct-sum".into(), location: "splitting".into() });
    }
    for (k, n) in o.ns.iter().enumerate() {
        if !n.is_nilpotent() {
            out.push(Issue { code: "nilpotent".into(), location: format!("N[{k}]") });
        }
    }
    if !out.is_empty() {
        return out;
    }
    let r = validate_orbit(o);
    for (name, ok) in r.items() {
        if !ok {
            out.push(Issue { code: name.replace(' ', "-"), location: "N/splitting".into() });
        }
    }
    if o.q.transpose() != o.q.neg() || o.q.det().is_zero() {
        out.push(Issue { code: "polarization".into(), location: "Q".into() });
    }
    if let Some(m) = &s.mixed {
        let r = validate_mixed_orbit(m);
        for (name, ok) in r.items() {
            if !ok {
                out.push(Issue { code: format!("mixed-{}", name.replace(' ', "-")), location: "mixed".into() });
            }
        }
    }
    out
}

pub fn read_scenario(path: &Path) -> Result<Scenario, LoadError> {
    let text = std::fs::read_to_string(path).map_err(|e| LoadError::Io(format!("{}: {e}", path.display())))?;
    parse_scenario_str(&text)
}

/// Reads and validates a scenario; any failed invariant is reported as a validation error.
pub fn load_scenario(path: &Path) -> Result<Scenario, LoadError> {
    let s = read_scenario(path)?;
    let issues = validation_issues(&s);
    if issues.is_empty() {
        Ok(s)
    } else {
        Err(LoadError::Validation(issues))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalars() {
        assert_eq!(parse_constant("1/2+3/4*i").unwrap(), &QI::ratio(1, 2) + &(&QI::ratio(3, 4) * &QI::i()));
        assert_eq!(parse_constant("-(2i)").unwrap(), QI::gaussian(0, -2));
        assert_eq!(parse_scalar("1+2w").unwrap(), &RatFunc::one() + &(&RatFunc::int(2) * &RatFunc::omega()));
        assert!(parse_scalar("1/0").is_err());
        assert!(parse_scalar("2x").is_err());
        assert!(parse_scalar("(1").is_err());
    }
}
