//! Problem spec files.
//!
//! The format is TOML with a fixed schema; see `docs/spec-format.md` for the grammar.

use crate::error::CliError;
use num_complex::Complex64;
use serde::Deserialize;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Flat,
    Quiver,
    Nahm,
}

/// A complex scalar written either as a TOML number or as a string like `"1-0.5i"`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum ComplexLit {
    Real(f64),
    Text(String),
}

impl ComplexLit {
    pub fn value(&self) -> Result<Complex64, String> {
        match self {
            ComplexLit::Real(x) => Ok(Complex64::new(*x, 0.0)),
            ComplexLit::Text(s) => parse_complex(s),
        }
    }
}

/// Parses `a`, `bi`, `a+bi`, `a-bi`, `i`, `-i` with optional whitespace.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("cannot parse {s:?} as a complex number");
    if t.is_empty() {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix('i') else {
        return t.parse::<f64>().map(|x| Complex64::new(x, 0.0)).map_err(|_| bad());
    };
    // split at the last sign that is not part of an exponent
    let bytes = body.as_bytes();
    let mut cut = 0;
    for k in (1..bytes.len()).rev() {
        if (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E') {
            cut = k;
            break;
        }
    }
    let (re, im) = body.split_at(cut);
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        x => x.parse::<f64>().map_err(|_| bad())?,
    };
    let re = if re.is_empty() { 0.0 } else { re.parse::<f64>().map_err(|_| bad())? };
    Ok(Complex64::new(re, im))
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub kind: Kind,
    pub seed: Option<u64>,
    pub flat: Option<FlatSpec>,
    pub quiver: Option<QuiverSpec>,
    pub nahm: Option<NahmSpec>,
    #[serde(default)]
    pub verify: VerifySpec,
    #[serde(default)]
    pub prequant: Vec<PrequantSpec>,
    pub output: Option<OutputSpec>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlatSpec {
    pub hermitian_dim: usize,
}

/// Vertices are numbered from 1 in spec files.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuiverSpec {
    pub vertices: usize,
    #[serde(default)]
    pub edges: Vec<[usize; 2]>,
    pub v: Vec<usize>,
    pub w: Vec<usize>,
    pub zeta_r: Vec<f64>,
    pub zeta_c: Vec<ComplexLit>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    Constant,
    Inverse,
    Coth,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NahmSpec {
    pub m: usize,
    pub length: f64,
    pub points: usize,
    pub profile: Profile,
    pub tau: Option<Vec<Vec<Vec<ComplexLit>>>>,
    pub lambda: Option<f64>,
    pub s0: Option<f64>,
    pub rotation: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySpec {
    #[serde(default = "default_h")]
    pub h: f64,
    #[serde(default = "default_n_zeta")]
    pub n_zeta: usize,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_twistor_samples")]
    pub twistor_samples: usize,
    /// Replaces every default tolerance when present.
    pub tol: Option<f64>,
    /// Check-id prefixes to run; empty runs everything.
    #[serde(default)]
    pub checks: Vec<String>,
}

fn default_h() -> f64 {
    1e-4
}
fn default_n_zeta() -> usize {
    20
}
fn default_samples() -> usize {
    10
}
fn default_twistor_samples() -> usize {
    50
}

impl Default for VerifySpec {
    fn default() -> Self {
        Self { h: default_h(), n_zeta: default_n_zeta(), samples: default_samples(), twistor_samples: default_twistor_samples(), tol: None, checks: vec![] }
    }
}

impl VerifySpec {
    pub fn wants(&self, id: &str) -> bool {
        self.checks.is_empty() || self.checks.iter().any(|c| id.starts_with(c.as_str()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
pub enum Variant {
    #[serde(rename = "quiver-J")]
    QuiverJ,
    #[serde(rename = "quiver-K")]
    QuiverK,
    #[serde(rename = "nahm-J")]
    NahmJ,
    #[serde(rename = "nahm-K")]
    NahmK,
    #[serde(rename = "higgs-J")]
    HiggsJ,
    #[serde(rename = "higgs-K")]
    HiggsK,
}

impl Variant {
    pub fn label(self) -> &'static str {
        match self {
            Variant::QuiverJ => "quiver-J",
            Variant::QuiverK => "quiver-K",
            Variant::NahmJ => "nahm-J",
            Variant::NahmK => "nahm-K",
            Variant::HiggsJ => "higgs-J",
            Variant::HiggsK => "higgs-K",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrequantSpec {
    pub variant: Variant,
    pub zeta_c: Option<Vec<ComplexLit>>,
    pub tau: Option<Vec<Vec<ComplexLit>>>,
    pub lambdas: Option<Vec<Vec<ComplexLit>>>,
    pub rank: Option<usize>,
    /// Expected verdict; without it the check passes iff the form is prequantizable.
    pub expect: Option<bool>,
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: Option<String>,
}

fn schema(field: &str, message: impl Into<String>) -> CliError {
    CliError::Schema { line: None, field: field.into(), message: message.into() }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

pub fn parse_spec(path: &Path) -> Result<(ProblemSpec, Vec<u8>), CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::Io { path: path.display().to_string(), message: e.to_string() })?;
    let text = String::from_utf8(bytes.clone()).map_err(|_| schema("<file>", "spec is not UTF-8"))?;
    Ok((parse_spec_str(&text)?, bytes))
}

pub fn parse_spec_str(text: &str) -> Result<ProblemSpec, CliError> {
    let spec: ProblemSpec = toml::from_str(text).map_err(|e| {
        let msg = e.message().to_string();
        let field = msg
            .split('`')
            .nth(1)
            .map(str::to_string)
            .unwrap_or_else(|| "<document>".into());
        CliError::Schema { line: e.span().map(|s| line_of(text, s.start)), field, message: msg }
    })?;
    validate(&spec)?;
    Ok(spec)
}

fn finite(field: &str, x: f64) -> Result<(), CliError> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(schema(field, format!("{x} is not finite")))
    }
}

fn complex(field: &str, c: &ComplexLit) -> Result<Complex64, CliError> {
    let z = c.value().map_err(|m| schema(field, m))?;
    finite(field, z.re)?;
    finite(field, z.im)?;
    Ok(z)
}

fn validate(s: &ProblemSpec) -> Result<(), CliError> {
    let v = &s.verify;
    finite("verify.h", v.h)?;
    if v.h <= 0.0 {
        return Err(schema("verify.h", format!("step must be positive, got {}", v.h)));
    }
    if let Some(t) = v.tol {
        finite("verify.tol", t)?;
        if t <= 0.0 {
            return Err(schema("verify.tol", "tolerance must be positive"));
        }
    }
    match s.kind {
        Kind::Flat => {
            let f = s.flat.as_ref().ok_or_else(|| schema("flat", "missing section for kind = \"flat\""))?;
            if f.hermitian_dim == 0 {
                return Err(schema("flat.hermitian_dim", "must be positive"));
            }
        }
        Kind::Quiver => validate_quiver(s.quiver.as_ref().ok_or_else(|| schema("quiver", "missing section for kind = \"quiver\""))?)?,
        Kind::Nahm => validate_nahm(s.nahm.as_ref().ok_or_else(|| schema("nahm", "missing section for kind = \"nahm\""))?)?,
    }
    for (k, p) in s.prequant.iter().enumerate() {
        validate_prequant(k, p)?;
    }
    Ok(())
}

fn validate_quiver(q: &QuiverSpec) -> Result<(), CliError> {
    let n = q.vertices;
    if n == 0 {
        return Err(schema("quiver.vertices", "must be positive"));
    }
    for (name, len) in [("quiver.v", q.v.len()), ("quiver.w", q.w.len()), ("quiver.zeta_r", q.zeta_r.len()), ("quiver.zeta_c", q.zeta_c.len())] {
        if len != n {
            return Err(schema(name, format!("expected {n} entries, found {len}")));
        }
    }
    for e in &q.edges {
        if e.iter().any(|&x| x == 0 || x > n) {
            return Err(schema("quiver.edges", format!("edge {e:?} is outside vertices 1..={n}")));
        }
    }
    for &x in &q.zeta_r {
        finite("quiver.zeta_r", x)?;
    }
    for c in &q.zeta_c {
        complex("quiver.zeta_c", c)?;
    }
    Ok(())
}

fn validate_nahm(n: &NahmSpec) -> Result<(), CliError> {
    finite("nahm.length", n.length)?;
    if n.length <= 0.0 {
        return Err(schema("nahm.length", "must be positive"));
    }
    if n.points < 5 {
        return Err(schema("nahm.points", "need at least 5 grid points"));
    }
    if n.m < 2 {
        return Err(schema("nahm.m", "need m >= 2"));
    }
    match n.profile {
        Profile::Constant => {
            let tau = n.tau.as_ref().ok_or_else(|| schema("nahm.tau", "required for profile = \"constant\""))?;
            if tau.len() != 3 {
                return Err(schema("nahm.tau", format!("expected 3 matrices, found {}", tau.len())));
            }
            for t in tau {
                complex_matrix("nahm.tau", t, n.m)?;
            }
        }
        Profile::Inverse | Profile::Coth => {
            if n.m != 2 {
                return Err(schema("nahm.m", "closed-form profiles are su(2) only"));
            }
            if n.tau.is_some() {
                return Err(schema("nahm.tau", "tau is determined by the profile"));
            }
        }
    }
    if n.profile == Profile::Coth {
        for (f, x) in [("nahm.lambda", n.lambda), ("nahm.s0", n.s0)] {
            let x = x.ok_or_else(|| schema(f, "required for profile = \"coth\""))?;
            finite(f, x)?;
            if x <= 0.0 {
                return Err(schema(f, "must be positive"));
            }
        }
    }
    if let Some(r) = &n.rotation {
        if r.len() != 3 || r.iter().any(|row| row.len() != 3) {
            return Err(schema("nahm.rotation", "expected a 3x3 matrix"));
        }
    }
    Ok(())
}

pub fn complex_matrix(field: &str, rows: &[Vec<ComplexLit>], m: usize) -> Result<nalgebra::DMatrix<Complex64>, CliError> {
    if rows.len() != m || rows.iter().any(|r| r.len() != m) {
        return Err(schema(field, format!("expected a {m}x{m} matrix")));
    }
    let mut out = nalgebra::DMatrix::zeros(m, m);
    for (i, r) in rows.iter().enumerate() {
        for (j, c) in r.iter().enumerate() {
            out[(i, j)] = complex(field, c)?;
        }
    }
    Ok(out)
}

pub fn complex_vec(field: &str, v: &[ComplexLit]) -> Result<Vec<Complex64>, CliError> {
    v.iter().map(|c| complex(field, c)).collect()
}

fn validate_prequant(k: usize, p: &PrequantSpec) -> Result<(), CliError> {
    let f = |name: &str| format!("prequant[{}].{name}", k + 1);
    if let Some(t) = p.tol {
        finite(&f("tol"), t)?;
        if t < 0.0 {
            return Err(schema(&f("tol"), "must be non-negative"));
        }
    }
    match p.variant {
        Variant::QuiverJ | Variant::QuiverK => {
            complex_vec(&f("zeta_c"), p.zeta_c.as_ref().ok_or_else(|| schema(&f("zeta_c"), "required for quiver variants"))?)?;
        }
        Variant::NahmJ | Variant::NahmK => {
            let t = p.tau.as_ref().ok_or_else(|| schema(&f("tau"), "required for nahm variants"))?;
            complex_matrix(&f("tau"), t, t.len())?;
        }
        Variant::HiggsJ | Variant::HiggsK => {
            let l = p.lambdas.as_ref().ok_or_else(|| schema(&f("lambdas"), "required for higgs variants"))?;
            let r = p.rank.ok_or_else(|| schema(&f("rank"), "required for higgs variants"))?;
            for row in l {
                complex_vec(&f("lambdas"), row)?;
                if row.len() != r {
                    return Err(schema(&f("lambdas"), format!("each puncture needs {r} eigenvalues")));
                }
            }
        }
    }
    Ok(())
}
