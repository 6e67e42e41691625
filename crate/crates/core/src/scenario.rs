//! Scenario files: the on-disk description of one problem instance.
//!
//! The format is TOML with expression-valued strings:
//!
//! ```toml
//! kind = "thm1"
//! interval = [0.0, 0.5]
//! grid_points = 1025
//!
//! [functions]
//! a = "1"
//! b = "0"
//! f = "1"
//! g = "1"
//! k = "1"
//! alpha = "t"
//! beta = "t"
//! W = "x"
//! Phi = "x^2"
//!
//! [solver]
//! tolerance = 1e-10
//!
//! [sweep]
//! param = "functions.g"
//! values = [0.5, 1.0, 2.0]
//! ```
//!
//! Field names and semantics are the contract; each kind accepts exactly
//! the functions its inequality mentions and requires the ones it cannot
//! default. Unknown keys anywhere are rejected rather than ignored: a
//! certifying tool must not silently drop a hypothesis the author thought
//! they had stated.
//!
//! Variable conventions: `a`, `b`, `alpha`, `beta`, `k_fn` are functions
//! of `t`; `f` and `g` of `(t, s)`; `k` of `(s, tau)`; the nonlinearities
//! `W`, `Phi`, `h`, `Psi` of `x`. The equation integrands are `F(s, x,
//! tau)` (time, state, inner integral) and `K(tau, x)` (time, state).

use std::collections::BTreeSet;
use std::path::Path;

use serde::Deserialize;

use crate::bounds::{
    application_bound, lemma1_result, lemma2_bound, thm1_bound, thm2_bound, BoundResult,
    PsiArgumentMode,
};
use crate::error::{Error, Result};
use crate::expr::{parse_expr, Expr, Var};
use crate::funcs::{BivariateFn, ScalarFn};
use crate::grid::Grid;
use crate::instance::{
    build_application, build_standard, ApplicationData, InstanceKind, ProblemInstance,
    StandardInputs,
};
use crate::nonlinear::NonlinearPack;
use crate::solver::{solve_eq1, solve_equality, PicardConfig, Solution};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    kind: String,
    interval: [f64; 2],
    grid_points: Option<usize>,
    k_const: Option<f64>,
    psi_argument_mode: Option<String>,
    #[serde(default)]
    functions: FunctionsSection,
    solver: Option<SolverSection>,
    sweep: Option<SweepSection>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FunctionsSection {
    a: Option<String>,
    b: Option<String>,
    f: Option<String>,
    g: Option<String>,
    k: Option<String>,
    alpha: Option<String>,
    beta: Option<String>,
    #[serde(rename = "W")]
    w: Option<String>,
    #[serde(rename = "Phi")]
    phi: Option<String>,
    h: Option<String>,
    #[serde(rename = "Psi")]
    psi: Option<String>,
    k_fn: Option<String>,
    #[serde(rename = "F")]
    eq_f: Option<String>,
    #[serde(rename = "K")]
    eq_k: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct SolverSection {
    max_iterations: Option<usize>,
    tolerance: Option<f64>,
    divergence_window: Option<usize>,
    abs_tol: Option<f64>,
    rel_tol: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepSection {
    param: String,
    values: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub param: String,
    pub values: Vec<f64>,
}

/// Dominance tolerances, kept next to the Picard settings they qualify.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub abs_tol: f64,
    pub rel_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            abs_tol: 1e-9,
            rel_tol: 1e-6,
        }
    }
}

/// A fully resolved scenario: expressions parsed, kinds and modes checked,
/// but no grid sampled yet. `build` turns it into a validated instance;
/// overrides (grid size, psi mode) can be applied in between.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub kind: InstanceKind,
    pub lo: f64,
    pub hi: f64,
    pub grid_points: usize,
    pub k_const: Option<f64>,
    pub psi_mode: PsiArgumentMode,
    pub picard: PicardConfig,
    pub tolerances: Tolerances,
    pub sweep: Option<SweepSpec>,
    a: Option<ScalarFn>,
    b: Option<ScalarFn>,
    f: Option<BivariateFn>,
    g: Option<BivariateFn>,
    k: Option<BivariateFn>,
    alpha: Option<ScalarFn>,
    beta: Option<ScalarFn>,
    k_fn: Option<ScalarFn>,
    pack: NonlinearPack,
    eq_f: Option<Expr>,
    eq_k: Option<Expr>,
    raw: ScenarioFile,
}

/// A built instance, ready for the bound and solver pipelines.
#[derive(Debug)]
pub enum Built {
    Standard(ProblemInstance),
    Application(ApplicationData),
}

impl Built {
    pub fn grid(&self) -> &Grid {
        match self {
            Built::Standard(inst) => &inst.grid,
            Built::Application(data) => &data.grid,
        }
    }

    pub fn report(&self) -> &crate::instance::ValidationReport {
        match self {
            Built::Standard(inst) => &inst.report,
            Built::Application(data) => &data.report,
        }
    }
}

const DEFAULT_GRID_POINTS: usize = 1025;

fn schema(message: String) -> Error {
    Error::Schema { message }
}

/// Prefix nested errors with the field they came from so messages point
/// into the file.
fn in_field(name: &str, e: Error) -> Error {
    match e {
        Error::Schema { message } => schema(format!("functions.{name}: {message}")),
        Error::Parse { offset, expected } => schema(format!(
            "functions.{name}: parse error at offset {offset}: expected {expected}"
        )),
        other => other,
    }
}

fn parse_scalar(name: &str, src: &str, var: Var) -> Result<ScalarFn> {
    let ast = parse_expr(src).map_err(|e| in_field(name, e))?;
    ScalarFn::from_expr(ast, var).map_err(|e| in_field(name, e))
}

fn parse_bivariate(name: &str, src: &str, vars: (Var, Var)) -> Result<BivariateFn> {
    let ast = parse_expr(src).map_err(|e| in_field(name, e))?;
    BivariateFn::from_expr(ast, vars).map_err(|e| in_field(name, e))
}

fn parse_equation_integrand(name: &str, src: &str, allowed: &[Var]) -> Result<Expr> {
    let ast = parse_expr(src).map_err(|e| in_field(name, e))?;
    for var in Var::ALL {
        if ast.variables().contains(var) && !allowed.contains(&var) {
            let names: Vec<&str> = allowed.iter().map(|v| v.name()).collect();
            return Err(schema(format!(
                "functions.{name} may use {} only, but uses '{}'",
                names.join(", "),
                var.name()
            )));
        }
    }
    Ok(ast)
}

/// The function fields each kind accepts (first list) and the subset it
/// cannot run without (second list). `beta` defaults to `alpha` where
/// allowed but absent; `F`/`K` are only needed to solve, so the bound
/// pipeline accepts their absence.
fn field_sets(kind: InstanceKind) -> (&'static [&'static str], &'static [&'static str]) {
    match kind {
        InstanceKind::Lemma1 => (&["a", "b", "f", "alpha"], &["a", "b", "f", "alpha"]),
        InstanceKind::Thm1 => (
            &["a", "b", "f", "g", "k", "alpha", "beta", "W", "Phi"],
            &["a", "b", "f", "g", "k", "alpha", "W", "Phi"],
        ),
        InstanceKind::Lemma2 => (
            &["a", "f", "alpha", "h", "Psi"],
            &["a", "f", "alpha", "h", "Psi"],
        ),
        InstanceKind::Thm2 => (
            &[
                "a", "b", "f", "g", "k", "alpha", "beta", "W", "Phi", "h", "Psi",
            ],
            &["a", "b", "f", "g", "k", "alpha", "W", "Phi", "h", "Psi"],
        ),
        InstanceKind::Application => (
            &["k_fn", "Phi", "alpha", "F", "K"],
            &["k_fn", "Phi", "alpha"],
        ),
    }
}

fn provided_fields(fns: &FunctionsSection) -> Vec<(&'static str, &str)> {
    [
        ("a", &fns.a),
        ("b", &fns.b),
        ("f", &fns.f),
        ("g", &fns.g),
        ("k", &fns.k),
        ("alpha", &fns.alpha),
        ("beta", &fns.beta),
        ("W", &fns.w),
        ("Phi", &fns.phi),
        ("h", &fns.h),
        ("Psi", &fns.psi),
        ("k_fn", &fns.k_fn),
        ("F", &fns.eq_f),
        ("K", &fns.eq_k),
    ]
    .into_iter()
    .filter_map(|(name, v)| v.as_deref().map(|s| (name, s)))
    .collect()
}

impl Scenario {
    pub fn from_path(path: &Path) -> Result<Scenario> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        Scenario::from_toml(&text)
    }

    pub fn from_toml(text: &str) -> Result<Scenario> {
        let raw: ScenarioFile =
            toml::from_str(text).map_err(|e| schema(e.to_string().trim_end().to_string()))?;
        resolve(raw)
    }

    /// The scenario with one parameter replaced, for sweeps. `param` is
    /// either `k_const` or `functions.<name>`; the value is substituted as
    /// a constant and the whole file is re-resolved, so every validation
    /// applies to the swept variant too.
    pub fn with_param(&self, param: &str, value: f64) -> Result<Scenario> {
        let mut raw = self.raw.clone();
        raw.sweep = None;
        if param == "k_const" {
            if raw.k_const.is_none() {
                return Err(schema(
                    "sweep parameter 'k_const' requires a k_const field to replace".to_string(),
                ));
            }
            raw.k_const = Some(value);
        } else if let Some(name) = param.strip_prefix("functions.") {
            let text = format!("{value}");
            let slot = match name {
                "a" => &mut raw.functions.a,
                "b" => &mut raw.functions.b,
                "f" => &mut raw.functions.f,
                "g" => &mut raw.functions.g,
                "k" => &mut raw.functions.k,
                "alpha" => &mut raw.functions.alpha,
                "beta" => &mut raw.functions.beta,
                "W" => &mut raw.functions.w,
                "Phi" => &mut raw.functions.phi,
                "h" => &mut raw.functions.h,
                "Psi" => &mut raw.functions.psi,
                "k_fn" => &mut raw.functions.k_fn,
                other => {
                    return Err(schema(format!("unknown sweep parameter 'functions.{other}'")))
                }
            };
            *slot = Some(text);
        } else {
            return Err(schema(format!(
                "unknown sweep parameter '{param}' (expected 'k_const' or 'functions.<name>')"
            )));
        }
        resolve(raw)
    }

    /// Sample everything on the grid and run the hypothesis validators.
    pub fn build(&self, unchecked: bool) -> Result<Built> {
        let grid = Grid::new(self.lo, self.hi, self.grid_points)?;
        match self.kind {
            InstanceKind::Application => {
                let data = build_application(
                    grid,
                    self.k_const.expect("resolve checked presence"),
                    self.k_fn.clone().expect("resolve checked presence"),
                    self.pack.phi.clone().expect("resolve checked presence"),
                    self.alpha.clone().expect("resolve checked presence"),
                    self.eq_f.clone(),
                    self.eq_k.clone(),
                    unchecked,
                )?;
                Ok(Built::Application(data))
            }
            kind => {
                let inst = build_standard(
                    StandardInputs {
                        kind,
                        grid,
                        a: self.a.clone().expect("resolve checked presence"),
                        b: self.b.clone(),
                        f: self.f.clone().expect("resolve checked presence"),
                        g: self.g.clone(),
                        k: self.k.clone(),
                        alpha: self.alpha.clone().expect("resolve checked presence"),
                        beta: self.beta.clone(),
                        pack: self.pack.clone(),
                    },
                    unchecked,
                )?;
                Ok(Built::Standard(inst))
            }
        }
    }
}

fn resolve(raw: ScenarioFile) -> Result<Scenario> {
    let kind = InstanceKind::from_token(&raw.kind).ok_or_else(|| {
        schema(format!(
            "unknown kind '{}' (expected lemma1, thm1, lemma2, thm2 or application)",
            raw.kind
        ))
    })?;
    let [lo, hi] = raw.interval;
    let grid_points = raw.grid_points.unwrap_or(DEFAULT_GRID_POINTS);

    if raw.k_const.is_some() && kind != InstanceKind::Application {
        return Err(schema(format!(
            "k_const applies to kind 'application' only, not '{}'",
            kind.token()
        )));
    }
    if kind == InstanceKind::Application && raw.k_const.is_none() {
        return Err(schema("kind 'application' requires k_const".to_string()));
    }

    let psi_mode = match &raw.psi_argument_mode {
        None => PsiArgumentMode::AsPrinted,
        Some(tok) => {
            if kind != InstanceKind::Thm2 {
                return Err(schema(format!(
                    "psi_argument_mode applies to kind 'thm2' only, not '{}'",
                    kind.token()
                )));
            }
            PsiArgumentMode::from_token(tok).ok_or_else(|| {
                schema(format!(
                    "unknown psi_argument_mode '{tok}' (expected 'as-printed' or 'conservative')"
                ))
            })?
        }
    };

    let (allowed, required) = field_sets(kind);
    let allowed_set: BTreeSet<&str> = allowed.iter().copied().collect();
    let provided = provided_fields(&raw.functions);
    let provided_set: BTreeSet<&str> = provided.iter().map(|(n, _)| *n).collect();
    for (name, _) in &provided {
        if !allowed_set.contains(name) {
            return Err(schema(format!(
                "functions.{} is not used by kind '{}'",
                name,
                kind.token()
            )));
        }
    }
    for name in required {
        if !provided_set.contains(name) {
            return Err(schema(format!(
                "kind '{}' requires functions.{}",
                kind.token(),
                name
            )));
        }
    }

    let fns = &raw.functions;
    let get_scalar = |name: &str, src: &Option<String>, var: Var| -> Result<Option<ScalarFn>> {
        src.as_deref()
            .map(|s| parse_scalar(name, s, var))
            .transpose()
    };
    let get_bivariate =
        |name: &str, src: &Option<String>, vars: (Var, Var)| -> Result<Option<BivariateFn>> {
            src.as_deref()
                .map(|s| parse_bivariate(name, s, vars))
                .transpose()
        };

    let a = get_scalar("a", &fns.a, Var::T)?;
    let b = get_scalar("b", &fns.b, Var::T)?;
    let f = get_bivariate("f", &fns.f, (Var::T, Var::S))?;
    let g = get_bivariate("g", &fns.g, (Var::T, Var::S))?;
    let k = get_bivariate("k", &fns.k, (Var::S, Var::Tau))?;
    let alpha = get_scalar("alpha", &fns.alpha, Var::T)?;
    let beta = get_scalar("beta", &fns.beta, Var::T)?;
    let k_fn = get_scalar("k_fn", &fns.k_fn, Var::T)?;
    let pack = NonlinearPack {
        w: get_scalar("W", &fns.w, Var::X)?,
        phi: get_scalar("Phi", &fns.phi, Var::X)?,
        h: get_scalar("h", &fns.h, Var::X)?,
        psi: get_scalar("Psi", &fns.psi, Var::X)?,
    };
    let eq_f = fns
        .eq_f
        .as_deref()
        .map(|s| parse_equation_integrand("F", s, &[Var::S, Var::X, Var::Tau]))
        .transpose()?;
    let eq_k = fns
        .eq_k
        .as_deref()
        .map(|s| parse_equation_integrand("K", s, &[Var::Tau, Var::X]))
        .transpose()?;

    let mut picard = PicardConfig::default();
    let mut tolerances = Tolerances::default();
    if let Some(sv) = &raw.solver {
        if let Some(v) = sv.max_iterations {
            picard.max_iterations = v;
        }
        if let Some(v) = sv.tolerance {
            picard.tolerance = v;
        }
        if let Some(v) = sv.divergence_window {
            picard.divergence_window = v;
        }
        if let Some(v) = sv.abs_tol {
            tolerances.abs_tol = v;
        }
        if let Some(v) = sv.rel_tol {
            tolerances.rel_tol = v;
        }
    }

    let sweep = match &raw.sweep {
        None => None,
        Some(sw) => {
            if sw.values.is_empty() {
                return Err(schema("sweep.values must not be empty".to_string()));
            }
            if let Some(bad) = sw.values.iter().find(|v| !v.is_finite()) {
                return Err(schema(format!("sweep.values must be finite, got {bad}")));
            }
            if sw.param != "k_const" && !sw.param.starts_with("functions.") {
                return Err(schema(format!(
                    "unknown sweep parameter '{}' (expected 'k_const' or 'functions.<name>')",
                    sw.param
                )));
            }
            if let Some(name) = sw.param.strip_prefix("functions.") {
                if !allowed_set.contains(name) || matches!(name, "F" | "K") {
                    return Err(schema(format!(
                        "sweep parameter 'functions.{}' is not a sweepable field of kind '{}'",
                        name,
                        kind.token()
                    )));
                }
            }
            if sw.param == "k_const" && kind != InstanceKind::Application {
                return Err(schema(
                    "sweep parameter 'k_const' applies to kind 'application' only".to_string(),
                ));
            }
            Some(SweepSpec {
                param: sw.param.clone(),
                values: sw.values.clone(),
            })
        }
    };

    Ok(Scenario {
        kind,
        lo,
        hi,
        grid_points,
        k_const: raw.k_const,
        psi_mode,
        picard,
        tolerances,
        sweep,
        a,
        b,
        f,
        g,
        k,
        alpha,
        beta,
        k_fn,
        pack,
        eq_f,
        eq_k,
        raw,
    })
}

/// Bound pipeline for a built instance.
pub fn compute_bound(built: &Built, mode: PsiArgumentMode) -> Result<BoundResult> {
    match built {
        Built::Standard(inst) => match inst.kind {
            InstanceKind::Lemma1 => lemma1_result(inst),
            InstanceKind::Thm1 => thm1_bound(inst),
            InstanceKind::Lemma2 => lemma2_bound(inst),
            InstanceKind::Thm2 => thm2_bound(inst, mode),
            InstanceKind::Application => unreachable!("application uses Built::Application"),
        },
        Built::Application(data) => application_bound(data),
    }
}

/// Picard solution of the matching equality.
pub fn compute_solution(built: &Built, cfg: &PicardConfig) -> Result<Solution> {
    match built {
        Built::Standard(inst) => solve_equality(inst, cfg),
        Built::Application(data) => solve_eq1(data, cfg),
    }
}
