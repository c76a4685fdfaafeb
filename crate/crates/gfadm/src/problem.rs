//! TOML problem files.
//!
//! ```toml
//! name = "demo"
//!
//! [parameters]
//! k = 0.5
//!
//! [component.1]
//! operator = "lane_emden alpha=2"
//! left = "neumann0"
//! right = "a=1 b=0 c=1"
//! rhs = "k*y1^2"
//!
//! [component.2]
//! operator = "flat"
//! left = "dirichlet value=1"
//! right = "a=1 b=0 c=0.5"
//! rhs = "y1*y2"
//!
//! [run]
//! n_terms = 10
//! backend = "grid"
//! ```
//!
//! Parameter names may appear in right-hand sides and in the numeric
//! values of `operator`, `left` and `right`.

use std::collections::BTreeMap;
use std::path::Path;

use gfadm_core::{
    parse_expression_with, Backend, BaselineMode, ComponentSpec, LeftBc, MaxResidualForm, MaxResidualOptions,
    Operator, ParseError, ProblemSpec, ResidualMethod, RightBc, SolveError,
};
use serde::Deserialize;

use crate::bundled;

#[derive(Debug, thiserror::Error)]
pub enum ProblemFileError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed problem file: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("{field}: {message}")]
    Field { field: String, message: String },
    #[error("component.{component}.rhs: {source}")]
    Expression {
        component: usize,
        #[source]
        source: ParseError,
    },
    #[error("invalid problem: {0}")]
    Invalid(#[from] SolveError),
    #[error("no such file and no bundled problem named {0:?}")]
    NotFound(String),
}

fn field_error(field: impl Into<String>, message: impl Into<String>) -> ProblemFileError {
    ProblemFileError::Field { field: field.into(), message: message.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BackendChoice {
    Grid,
    Poly,
}

impl std::str::FromStr for BackendChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "grid" => Ok(Self::Grid),
            "poly" => Ok(Self::Poly),
            _ => Err(format!("unknown backend {s:?} (expected grid or poly)")),
        }
    }
}

/// Run defaults from the `[run]` table.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub n_terms: usize,
    pub backend: BackendChoice,
    pub grid_size: usize,
    pub residual: MaxResidualOptions,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n_terms: 5,
            backend: BackendChoice::Grid,
            grid_size: gfadm_core::solver::DEFAULT_GRID_SIZE,
            residual: MaxResidualOptions::default(),
        }
    }
}

impl RunConfig {
    pub fn backend(&self) -> Backend {
        match self.backend {
            BackendChoice::Grid => Backend::Grid { grid_size: self.grid_size },
            BackendChoice::Poly => Backend::ExactPolynomial,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub spec: ProblemSpec,
    pub description: Option<String>,
    pub run: RunConfig,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    name: Option<String>,
    description: Option<String>,
    #[serde(default)]
    parameters: BTreeMap<String, f64>,
    component: RawComponents,
    #[serde(default)]
    run: RawRun,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawComponents {
    #[serde(rename = "1")]
    first: RawComponent,
    #[serde(rename = "2")]
    second: RawComponent,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawComponent {
    operator: String,
    left: String,
    right: String,
    rhs: String,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawRun {
    n_terms: Option<usize>,
    backend: Option<String>,
    grid_size: Option<usize>,
    baseline: Option<String>,
    residual_method: Option<String>,
    max_residual_form: Option<String>,
    max_residual_interval: Option<[f64; 2]>,
}

const RESERVED: [&str; 3] = ["x", "y1", "y2"];

/// `keyword k1=v1 k2=v2 …`, values resolved as numbers or parameters.
struct Directive<'a> {
    field: String,
    keyword: Option<&'a str>,
    pairs: Vec<(&'a str, f64)>,
}

impl<'a> Directive<'a> {
    fn parse(field: String, text: &'a str, params: &BTreeMap<String, f64>) -> Result<Self, ProblemFileError> {
        let mut keyword = None;
        let mut pairs = Vec::new();
        for (i, token) in text.split_whitespace().enumerate() {
            match token.split_once('=') {
                Some((k, v)) => {
                    let value = v
                        .parse::<f64>()
                        .ok()
                        .or_else(|| params.get(v).copied())
                        .ok_or_else(|| field_error(&field, format!("{v:?} is neither a number nor a parameter")))?;
                    if pairs.iter().any(|(seen, _)| *seen == k) {
                        return Err(field_error(&field, format!("duplicate key {k:?}")));
                    }
                    pairs.push((k, value));
                }
                None if i == 0 => keyword = Some(token),
                None => return Err(field_error(&field, format!("unexpected token {token:?}"))),
            }
        }
        Ok(Self { field, keyword, pairs })
    }

    fn take(&mut self, key: &str) -> Option<f64> {
        let i = self.pairs.iter().position(|(k, _)| *k == key)?;
        Some(self.pairs.remove(i).1)
    }

    fn require(&mut self, key: &str) -> Result<f64, ProblemFileError> {
        self.take(key).ok_or_else(|| field_error(&self.field, format!("missing {key}=…")))
    }

    fn finish(self) -> Result<(), ProblemFileError> {
        match self.pairs.first() {
            Some((k, _)) => Err(field_error(self.field, format!("unknown key {k:?}"))),
            None => Ok(()),
        }
    }
}

fn parse_component(index: usize, raw: &RawComponent, params: &BTreeMap<String, f64>) -> Result<ComponentSpec, ProblemFileError> {
    let section = format!("component.{index}");

    let mut op = Directive::parse(format!("{section}.operator"), &raw.operator, params)?;
    let operator = match op.keyword {
        Some("lane_emden") => Operator::LaneEmden { alpha: op.require("alpha")? },
        Some("flat") => Operator::Flat,
        other => return Err(field_error(op.field, format!("expected \"lane_emden alpha=…\" or \"flat\", got {other:?}"))),
    };
    op.finish()?;

    let mut left = Directive::parse(format!("{section}.left"), &raw.left, params)?;
    let left_bc = match left.keyword {
        Some("neumann0") => LeftBc::Neumann0,
        Some("dirichlet") => LeftBc::Dirichlet(left.require("value")?),
        other => return Err(field_error(left.field, format!("expected \"neumann0\" or \"dirichlet value=…\", got {other:?}"))),
    };
    left.finish()?;

    let mut right = Directive::parse(format!("{section}.right"), &raw.right, params)?;
    if let Some(k) = right.keyword {
        return Err(field_error(right.field, format!("unexpected token {k:?}")));
    }
    let right_bc = RightBc { a: right.require("a")?, b: right.take("b").unwrap_or(0.0), c: right.require("c")? };
    right.finish()?;

    let rhs = parse_expression_with(&raw.rhs, &|name| params.get(name).copied())
        .map_err(|source| ProblemFileError::Expression { component: index, source })?;
    Ok(ComponentSpec { operator, left: left_bc, right: right_bc, rhs })
}

fn parse_run(raw: &RawRun) -> Result<RunConfig, ProblemFileError> {
    let mut run = RunConfig::default();
    if let Some(n) = raw.n_terms {
        run.n_terms = n;
    }
    if let Some(b) = &raw.backend {
        run.backend = b.parse().map_err(|m| field_error("run.backend", m))?;
    }
    if let Some(g) = raw.grid_size {
        if g < 2 {
            return Err(field_error("run.grid_size", "must be at least 2"));
        }
        run.grid_size = g;
    }
    if let Some(m) = &raw.residual_method {
        run.residual.method = parse_method(m).map_err(|m| field_error("run.residual_method", m))?;
    }
    if let Some(f) = &raw.max_residual_form {
        run.residual.form = parse_form(f).map_err(|m| field_error("run.max_residual_form", m))?;
    }
    if let Some([lo, hi]) = raw.max_residual_interval {
        if !(0.0 <= lo && lo < hi && hi <= 1.0) {
            return Err(field_error("run.max_residual_interval", "expected [lo, hi] with 0 <= lo < hi <= 1"));
        }
        run.residual.interval = (lo, hi);
    }
    Ok(run)
}

fn parse_baseline(text: &str) -> Result<BaselineMode, ProblemFileError> {
    match text {
        "affine" => Ok(BaselineMode::Affine),
        "split" => Ok(BaselineMode::Split),
        _ => Err(field_error("run.baseline", format!("expected \"affine\" or \"split\", got {text:?}"))),
    }
}

pub fn parse_method(text: &str) -> Result<ResidualMethod, String> {
    match text {
        "identity" | "adomian_identity" => Ok(ResidualMethod::AdomianIdentity),
        "spectral" => Ok(ResidualMethod::Spectral),
        _ => Err(format!("unknown residual method {text:?} (expected identity or spectral)")),
    }
}

pub fn parse_form(text: &str) -> Result<MaxResidualForm, String> {
    match text {
        "plain" => Ok(MaxResidualForm::Plain),
        "divergence" => Ok(MaxResidualForm::Divergence),
        _ => Err(format!("unknown max-residual form {text:?} (expected plain or divergence)")),
    }
}

/// Parses problem-file text; `fallback_name` is used when the file has
/// no `name` key.
pub fn parse_problem(text: &str, fallback_name: &str) -> Result<Problem, ProblemFileError> {
    let raw: RawFile = toml::from_str(text)?;
    for (name, value) in &raw.parameters {
        if RESERVED.contains(&name.as_str()) {
            return Err(field_error(format!("parameters.{name}"), "reserved name"));
        }
        if !value.is_finite() {
            return Err(field_error(format!("parameters.{name}"), "must be finite"));
        }
    }
    let components = [
        parse_component(1, &raw.component.first, &raw.parameters)?,
        parse_component(2, &raw.component.second, &raw.parameters)?,
    ];
    let baseline_mode = match &raw.run.baseline {
        Some(b) => parse_baseline(b)?,
        None => BaselineMode::default(),
    };
    let spec = ProblemSpec { name: raw.name.unwrap_or_else(|| fallback_name.to_string()), components, baseline_mode };
    spec.validate()?;
    Ok(Problem { spec, description: raw.description, run: parse_run(&raw.run)? })
}

/// Loads a problem from a path or, failing that, by bundled name.
pub fn load_problem(source: &str) -> Result<Problem, ProblemFileError> {
    let path = Path::new(source);
    if path.exists() {
        let text = std::fs::read_to_string(path).map_err(|e| ProblemFileError::Io { path: source.to_string(), source: e })?;
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("problem");
        return parse_problem(&text, stem);
    }
    match bundled::get(source) {
        Some(text) => parse_problem(text, source),
        None => Err(ProblemFileError::NotFound(source.to_string())),
    }
}
