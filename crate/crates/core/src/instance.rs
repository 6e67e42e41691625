//! Certified problem instances.
//!
//! An instance bundles the grid, all coefficient functions, the delays, and
//! the nonlinearities for one declared inequality kind, together with
//! pre-sampled arrays (the bound pipeline is O(n^2) and reuses them
//! heavily). Construction validates every hypothesis the declared kind
//! needs; the outcome of each check is kept as a report row so the CLI can
//! print exactly what was verified and at which resolution.
//!
//! Validation is sampling-based: a pass certifies consistency with the
//! hypotheses at the grid resolution, nothing stronger. That caveat is part
//! of the report wording on purpose.

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::funcs::{validate_delay, BivariateFn, DelayFn, Matrix, ScalarFn, CHECK_SLACK};
use crate::grid::Grid;
use crate::nonlinear::{check_hypotheses, NonlinearPack};

/// The five inequality kinds the pipeline knows. The token strings are the
/// stable external names used in scenario files and reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InstanceKind {
    Lemma1,
    Thm1,
    Lemma2,
    Thm2,
    Application,
}

impl InstanceKind {
    pub const ALL: [InstanceKind; 5] = [
        InstanceKind::Lemma1,
        InstanceKind::Thm1,
        InstanceKind::Lemma2,
        InstanceKind::Thm2,
        InstanceKind::Application,
    ];

    pub fn token(self) -> &'static str {
        match self {
            InstanceKind::Lemma1 => "lemma1",
            InstanceKind::Thm1 => "thm1",
            InstanceKind::Lemma2 => "lemma2",
            InstanceKind::Thm2 => "thm2",
            InstanceKind::Application => "application",
        }
    }

    pub fn from_token(s: &str) -> Option<InstanceKind> {
        InstanceKind::ALL.into_iter().find(|k| k.token() == s)
    }

    /// Kinds whose a(t) must be strictly positive and nondecreasing.
    pub fn needs_positive_a(self) -> bool {
        matches!(self, InstanceKind::Lemma2 | InstanceKind::Thm2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    /// Failure invalidates the instance.
    Required,
    /// Failure only annotates the report.
    Advisory,
}

/// One validation check outcome. `hypothesis` and `subject` feed the
/// `InvalidInstance` error when a required check fails; `name` and `detail`
/// are for the report.
#[derive(Debug, Clone)]
pub struct CheckEntry {
    pub name: String,
    pub hypothesis: String,
    pub subject: String,
    pub passed: bool,
    pub severity: Severity,
    pub detail: String,
}

impl CheckEntry {
    pub fn pass(name: &str, detail: String) -> CheckEntry {
        let (hypothesis, subject) = split_name(name);
        CheckEntry {
            name: name.to_string(),
            hypothesis,
            subject,
            passed: true,
            severity: Severity::Required,
            detail,
        }
    }

    pub fn fail(name: &str, severity: Severity, detail: String) -> CheckEntry {
        let (hypothesis, subject) = split_name(name);
        CheckEntry {
            name: name.to_string(),
            hypothesis,
            subject,
            passed: false,
            severity,
            detail,
        }
    }

    pub fn with_parts(mut self, hypothesis: &str, subject: &str) -> CheckEntry {
        self.hypothesis = hypothesis.to_string();
        self.subject = subject.to_string();
        self
    }

    fn to_error(&self) -> Error {
        Error::InvalidInstance {
            hypothesis: self.hypothesis.clone(),
            subject: self.subject.clone(),
            detail: self.detail.clone(),
        }
    }
}

/// Default mapping from a check name like "Phi submultiplicative" to the
/// (hypothesis, subject) pair: first word is the subject, rest the
/// hypothesis. Entries with unusual names override via `with_parts`.
fn split_name(name: &str) -> (String, String) {
    match name.split_once(' ') {
        Some((subject, hypothesis)) => (hypothesis.to_string(), subject.to_string()),
        None => (name.to_string(), name.to_string()),
    }
}

#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub entries: Vec<CheckEntry>,
    pub unchecked: bool,
}

impl ValidationReport {
    pub fn unchecked() -> ValidationReport {
        ValidationReport {
            entries: Vec::new(),
            unchecked: true,
        }
    }

    pub fn first_required_failure(&self) -> Option<&CheckEntry> {
        self.entries
            .iter()
            .find(|e| !e.passed && e.severity == Severity::Required)
    }

    pub fn all_required_pass(&self) -> bool {
        self.first_required_failure().is_none()
    }

    pub fn render(&self) -> String {
        if self.unchecked {
            return "validation: SKIPPED (UNCHECKED mode, hypotheses taken on trust)\n".to_string();
        }
        let mut out = String::from("validation (sampled checks, certify consistency at grid resolution):\n");
        for e in &self.entries {
            let tag = match (e.passed, e.severity) {
                (true, _) => "PASS",
                (false, Severity::Required) => "FAIL",
                (false, Severity::Advisory) => "warn",
            };
            out.push_str(&format!("  [{tag}] {} - {}\n", e.name, e.detail));
        }
        out
    }
}

/// A validated standard instance (kinds lemma1, thm1, lemma2, thm2).
/// Functions the kind does not use are constant-zero placeholders; samples
/// and kernel matrices are precomputed on the grid.
#[derive(Debug, Clone)]
pub struct ProblemInstance {
    pub kind: InstanceKind,
    pub grid: Grid,
    pub a_fn: ScalarFn,
    pub b_fn: ScalarFn,
    pub f: BivariateFn,
    pub g: BivariateFn,
    pub k: BivariateFn,
    pub alpha: DelayFn,
    pub beta: DelayFn,
    pub pack: NonlinearPack,
    pub a_samples: Vec<f64>,
    pub b_samples: Vec<f64>,
    pub f_matrix: Matrix,
    pub g_matrix: Matrix,
    pub k_matrix: Matrix,
    pub report: ValidationReport,
}

/// Data of the retarded-equation application: not a full instance because
/// the bound is a fixed specialization (a = k_const, b = 1, f(t,s) = t,
/// g = 1, W = identity, beta = alpha) and the equation solver takes F and K
/// directly.
#[derive(Debug, Clone)]
pub struct ApplicationData {
    pub grid: Grid,
    pub k_const: f64,
    pub k_fn: ScalarFn,
    pub phi: ScalarFn,
    pub alpha: DelayFn,
    /// F(s, u, v) with s the time, x bound to u(s), tau bound to the inner
    /// integral v(s). Needed by solve/verify, not by bound.
    pub f_expr: Option<Expr>,
    /// K(tau, u) with tau the time and x bound to u(tau).
    pub k_expr: Option<Expr>,
    pub report: ValidationReport,
}

/// Raw (not yet validated) inputs for a standard instance. Optional members
/// default to what the kind ignores; requiredness per kind is enforced by
/// the scenario layer, which knows the field names the user wrote.
pub struct StandardInputs {
    pub kind: InstanceKind,
    pub grid: Grid,
    pub a: ScalarFn,
    pub b: Option<ScalarFn>,
    pub f: BivariateFn,
    pub g: Option<BivariateFn>,
    pub k: Option<BivariateFn>,
    pub alpha: ScalarFn,
    pub beta: Option<ScalarFn>,
    pub pack: NonlinearPack,
}

/// Validate and assemble. With `unchecked` set, every hypothesis validator
/// is skipped (sampling still happens; evaluation errors still fail) and
/// the report is watermarked.
pub fn build_standard(inputs: StandardInputs, unchecked: bool) -> Result<ProblemInstance> {
    let StandardInputs {
        kind,
        grid,
        a,
        b,
        f,
        g,
        k,
        alpha,
        beta,
        pack,
    } = inputs;
    assert!(kind != InstanceKind::Application);

    let b = b.unwrap_or_else(|| ScalarFn::from_const(0.0));
    let g = g.unwrap_or_else(BivariateFn::zero);
    let k = k.unwrap_or_else(BivariateFn::zero);
    let beta = beta.unwrap_or_else(|| alpha.clone());

    let mut entries: Vec<CheckEntry> = Vec::new();

    let (alpha, beta) = if unchecked {
        (
            DelayFn::new_unchecked("alpha", &alpha, &grid)?,
            DelayFn::new_unchecked("beta", &beta, &grid)?,
        )
    } else {
        let alpha = match validate_delay("alpha", &alpha, &grid) {
            Ok(d) => {
                entries.push(CheckEntry::pass("alpha delay hypotheses", "in range and nondecreasing at all nodes".into()).with_parts("delay", "alpha"));
                d
            }
            Err(e) => return Err(e),
        };
        let beta = match validate_delay("beta", &beta, &grid) {
            Ok(d) => {
                entries.push(CheckEntry::pass("beta delay hypotheses", "in range and nondecreasing at all nodes".into()).with_parts("delay", "beta"));
                d
            }
            Err(e) => return Err(e),
        };
        (alpha, beta)
    };

    let a_samples = a.sample(&grid)?;
    let b_samples = b.sample(&grid)?;
    let f_matrix = f.sample_matrix(&grid)?;
    let g_matrix = g.sample_matrix(&grid)?;
    let k_matrix = k.sample_matrix(&grid)?;

    if !unchecked {
        entries.push(check_nonneg("a", &a_samples));
        entries.push(check_nonneg("b", &b_samples));
        entries.push(check_nonneg("f", f_matrix.values()));
        entries.push(check_nonneg("g", g_matrix.values()));
        entries.push(check_nonneg("k", k_matrix.values()));
        entries.push(check_monotone_first("f", &f_matrix, "t"));
        entries.push(check_monotone_first("k", &k_matrix, "s"));
        if kind.needs_positive_a() {
            entries.push(check_positive_samples("a", &a_samples, &grid));
            entries.push(check_nondecreasing_samples("a", &a_samples, &grid));
        }
        entries.extend(check_hypotheses(&pack));
    }

    let report = ValidationReport {
        entries,
        unchecked,
    };
    if let Some(failure) = report.first_required_failure() {
        return Err(failure.to_error());
    }

    let mut f = f;
    let mut k = k;
    f.certify_monotone_first();
    k.certify_monotone_first();
    let mut a = a;
    let mut b = b;
    a.certify_nonneg();
    b.certify_nonneg();

    Ok(ProblemInstance {
        kind,
        grid,
        a_fn: a,
        b_fn: b,
        f,
        g,
        k,
        alpha,
        beta,
        pack,
        a_samples,
        b_samples,
        f_matrix,
        g_matrix,
        k_matrix,
        report,
    })
}

/// Validate and assemble the application data. The report flags a grid that
/// does not start at 0, because the equation's integrals start at 0 and the
/// pipeline uses the grid origin in their place.
pub fn build_application(
    grid: Grid,
    k_const: f64,
    k_fn: ScalarFn,
    phi: ScalarFn,
    alpha: ScalarFn,
    f_expr: Option<Expr>,
    k_expr: Option<Expr>,
    unchecked: bool,
) -> Result<ApplicationData> {
    let mut entries: Vec<CheckEntry> = Vec::new();

    let alpha = if unchecked {
        DelayFn::new_unchecked("alpha", &alpha, &grid)?
    } else {
        let d = validate_delay("alpha", &alpha, &grid)?;
        entries.push(
            CheckEntry::pass("alpha delay hypotheses", "in range and nondecreasing at all nodes".into())
                .with_parts("delay", "alpha"),
        );
        d
    };

    let k_samples = k_fn.sample(&grid)?;

    if !unchecked {
        if k_const < 0.0 {
            entries.push(
                CheckEntry::fail(
                    "k_const nonnegative",
                    Severity::Required,
                    format!("k_const = {k_const}"),
                )
                .with_parts("nonnegative", "k_const"),
            );
        } else {
            entries.push(
                CheckEntry::pass("k_const nonnegative", format!("k_const = {k_const}"))
                    .with_parts("nonnegative", "k_const"),
            );
        }
        entries.push(check_nonneg("k", &k_samples));
        let pack = NonlinearPack {
            w: None,
            phi: Some(phi.clone()),
            h: None,
            psi: None,
        };
        entries.extend(check_hypotheses(&pack));
        if grid.lo() > 0.0 {
            entries.push(
                CheckEntry::fail(
                    "interval starts at 0",
                    Severity::Advisory,
                    format!(
                        "interval starts at {}; the equation's integrals start at 0 and the grid origin is used in their place",
                        grid.lo()
                    ),
                )
                .with_parts("interval-origin", "interval"),
            );
        }
    }

    let report = ValidationReport {
        entries,
        unchecked,
    };
    if let Some(failure) = report.first_required_failure() {
        return Err(failure.to_error());
    }

    Ok(ApplicationData {
        grid,
        k_const,
        k_fn,
        phi,
        alpha,
        f_expr,
        k_expr,
        report,
    })
}

fn check_nonneg(subject: &str, values: &[f64]) -> CheckEntry {
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let floor = -CHECK_SLACK * (1.0 + scale);
    match values.iter().enumerate().find(|(_, &v)| v < floor) {
        Some((i, &v)) => CheckEntry::fail(
            &format!("{subject} nonnegative"),
            Severity::Required,
            format!("value {v} at sample index {i}"),
        ),
        None => CheckEntry::pass(
            &format!("{subject} nonnegative"),
            "all grid samples".to_string(),
        ),
    }
}

fn check_positive_samples(subject: &str, values: &[f64], grid: &Grid) -> CheckEntry {
    match values.iter().enumerate().find(|(_, &v)| v <= 0.0) {
        Some((i, &v)) => CheckEntry::fail(
            &format!("{subject} positivity"),
            Severity::Required,
            format!("value {v} at t = {}", grid.node(i)),
        ),
        None => CheckEntry::pass(
            &format!("{subject} positivity"),
            "strictly positive at all grid nodes".to_string(),
        ),
    }
}

fn check_nondecreasing_samples(subject: &str, values: &[f64], grid: &Grid) -> CheckEntry {
    for i in 1..values.len() {
        let slack = CHECK_SLACK * (1.0 + values[i - 1].abs());
        if values[i] < values[i - 1] - slack {
            return CheckEntry::fail(
                &format!("{subject} monotone"),
                Severity::Required,
                format!(
                    "decreases between t = {} ({}) and t = {} ({})",
                    grid.node(i - 1),
                    values[i - 1],
                    grid.node(i),
                    values[i]
                ),
            );
        }
    }
    CheckEntry::pass(
        &format!("{subject} monotone"),
        "nondecreasing at all grid nodes".to_string(),
    )
}

/// Kernel monotonicity in the first argument: down each column (second
/// argument fixed), row values must not decrease beyond the relative slack.
fn check_monotone_first(subject: &str, m: &Matrix, first_arg: &str) -> CheckEntry {
    let n = m.n();
    for j in 0..n {
        for i in 1..n {
            let prev = m.get(i - 1, j);
            let cur = m.get(i, j);
            if cur < prev - CHECK_SLACK * (1.0 + prev.abs()) {
                return CheckEntry::fail(
                    &format!("{subject} monotone-in-{first_arg}"),
                    Severity::Required,
                    format!(
                        "decreases in the first argument at row {i}, column {j} ({prev} -> {cur})"
                    ),
                );
            }
        }
    }
    CheckEntry::pass(
        &format!("{subject} monotone-in-{first_arg}"),
        "nondecreasing in the first argument at all node pairs".to_string(),
    )
}
