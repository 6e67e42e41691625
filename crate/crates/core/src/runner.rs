//! Command orchestration: load a scenario, run a pipeline, write artifacts.
//!
//! Exit status contract:
//!   0  requested work done (for `verify`: the bound dominates)
//!   1  verify ran to completion and the bound failed to dominate
//!   2  the scenario is unusable: unreadable, unparseable, or a required
//!      hypothesis fails
//!   3  the Picard iteration did not converge or diverged
//!
//! CSV output uses a header row, '.' decimals, 17 significant digits and LF
//! line endings, so identical runs produce byte-identical files.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::bounds::{BoundResult, PsiArgumentMode};
use crate::error::{Error, Result};
use crate::instance::InstanceKind;
use crate::scenario::{compute_bound, compute_solution, Scenario};
use crate::solver::{check_dominance, DominanceReport, Solution};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Bound,
    Solve,
    Verify,
    Sweep,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Bound => "bound",
            Command::Solve => "solve",
            Command::Verify => "verify",
            Command::Sweep => "sweep",
        }
    }
}

/// Command-line overrides applied on top of the scenario file.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub grid_points: Option<usize>,
    /// Picard solver tolerance.
    pub tolerance: Option<f64>,
    pub mode: Option<PsiArgumentMode>,
    pub unchecked: bool,
}

#[derive(Debug)]
pub struct RunOutput {
    pub status: i32,
    pub messages: Vec<String>,
    pub files: Vec<PathBuf>,
}

fn status_of(err: &Error) -> i32 {
    match err {
        Error::NotConverged { .. } | Error::Diverging { .. } => 3,
        _ => 2,
    }
}

/// 17 significant digits: enough to round-trip any double exactly.
fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn run_scenario(
    path: &Path,
    command: Command,
    overrides: &Overrides,
    out_dir: &Path,
) -> RunOutput {
    let mut messages = Vec::new();
    let mut files = Vec::new();
    let status = match run_inner(path, command, overrides, out_dir, &mut messages, &mut files) {
        Ok(status) => status,
        Err(e) => {
            messages.push(format!("error: {e}"));
            status_of(&e)
        }
    };
    RunOutput {
        status,
        messages,
        files,
    }
}

fn apply_overrides(sc: &mut Scenario, overrides: &Overrides) {
    if let Some(n) = overrides.grid_points {
        sc.grid_points = n;
    }
    if let Some(tol) = overrides.tolerance {
        sc.picard.tolerance = tol;
    }
    if let Some(mode) = overrides.mode {
        sc.psi_mode = mode;
    }
}

fn run_inner(
    path: &Path,
    command: Command,
    overrides: &Overrides,
    out_dir: &Path,
    messages: &mut Vec<String>,
    files: &mut Vec<PathBuf>,
) -> Result<i32> {
    let mut sc = Scenario::from_path(path)?;
    apply_overrides(&mut sc, overrides);
    std::fs::create_dir_all(out_dir).map_err(|e| Error::Io {
        path: out_dir.to_path_buf(),
        source: e,
    })?;

    match command {
        Command::Bound => {
            let built = sc.build(overrides.unchecked)?;
            let bound = compute_bound(&built, sc.psi_mode)?;
            write_file(out_dir, "bound.csv", &render_bound_csv(&bound), files)?;
            let report = render_report(command, &sc, overrides, Some(&bound), None, None);
            write_file(out_dir, "report.txt", &report, files)?;
            messages.push(summarize_bound(&bound));
            Ok(0)
        }
        Command::Solve => {
            let built = sc.build(overrides.unchecked)?;
            let sol = compute_solution(&built, &sc.picard)?;
            write_file(
                out_dir,
                "solution.csv",
                &render_solution_csv(built.grid().nodes().as_slice(), &sol),
                files,
            )?;
            messages.push(format!(
                "solved in {} iterations, residual sup {:.3e}",
                sol.iterations, sol.residual_sup
            ));
            Ok(0)
        }
        Command::Verify => {
            let built = sc.build(overrides.unchecked)?;
            let bound = compute_bound(&built, sc.psi_mode)?;
            let sol = compute_solution(&built, &sc.picard)?;
            let dom = check_dominance(
                &sol.values,
                &bound,
                sc.tolerances.abs_tol,
                sc.tolerances.rel_tol,
            );
            write_file(out_dir, "bound.csv", &render_bound_csv(&bound), files)?;
            write_file(
                out_dir,
                "solution.csv",
                &render_solution_csv(built.grid().nodes().as_slice(), &sol),
                files,
            )?;
            write_file(
                out_dir,
                "verify.csv",
                &render_verify_csv(&bound, &sol),
                files,
            )?;
            let report =
                render_report(command, &sc, overrides, Some(&bound), Some(&sol), Some(&dom));
            write_file(out_dir, "report.txt", &report, files)?;
            messages.push(summarize_bound(&bound));
            messages.push(format!(
                "solved in {} iterations, residual sup {:.3e}",
                sol.iterations, sol.residual_sup
            ));
            if dom.pass {
                messages.push(format!(
                    "dominance PASS: max(u - bound) = {:.3e} over {} checked nodes",
                    dom.max_violation, dom.checked_nodes
                ));
                Ok(0)
            } else {
                messages.push(format!(
                    "dominance FAIL: violation {:.3e} at t = {}",
                    dom.max_violation, dom.worst_t
                ));
                Ok(1)
            }
        }
        Command::Sweep => {
            let spec = sc.sweep.clone().ok_or_else(|| Error::Schema {
                message: "sweep requires a [sweep] section in the scenario".to_string(),
            })?;
            let mut values = spec.values.clone();
            values.sort_by(|a, b| a.partial_cmp(b).expect("finite by validation"));
            let mut rows = String::from("param,t_star,max_bound,dominance_pass\n");
            for &value in &values {
                let mut variant = sc.with_param(&spec.param, value)?;
                apply_overrides(&mut variant, overrides);
                let built = variant.build(overrides.unchecked)?;
                let bound = compute_bound(&built, variant.psi_mode)?;
                let max_bound = bound
                    .bound_samples
                    .iter()
                    .fold(f64::NEG_INFINITY, |m, &v| m.max(v));
                let pass = match compute_solution(&built, &variant.picard) {
                    Ok(sol) => {
                        check_dominance(
                            &sol.values,
                            &bound,
                            variant.tolerances.abs_tol,
                            variant.tolerances.rel_tol,
                        )
                        .pass
                    }
                    Err(e) => {
                        messages.push(format!(
                            "{} = {}: solver failed ({e}); dominance_pass recorded as false",
                            spec.param, value
                        ));
                        false
                    }
                };
                let _ = writeln!(
                    rows,
                    "{},{},{},{}",
                    fmt_f64(value),
                    fmt_f64(bound.t_star.value),
                    fmt_f64(max_bound),
                    pass
                );
            }
            write_file(out_dir, "sweep.csv", &rows, files)?;
            messages.push(format!(
                "swept {} over {} values",
                spec.param,
                values.len()
            ));
            Ok(0)
        }
    }
}

fn write_file(dir: &Path, name: &str, content: &str, files: &mut Vec<PathBuf>) -> Result<()> {
    let path = dir.join(name);
    std::fs::write(&path, content).map_err(|e| Error::Io {
        path: path.clone(),
        source: e,
    })?;
    files.push(path);
    Ok(())
}

fn col(arr: &[f64], i: usize) -> f64 {
    arr.get(i).copied().unwrap_or(0.0)
}

fn render_bound_csv(bound: &BoundResult) -> String {
    let mut out = String::from("t,a,eta,p,q,bound\n");
    for i in 0..bound.len() {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            fmt_f64(bound.nodes[i]),
            fmt_f64(col(&bound.a_samples, i)),
            fmt_f64(col(&bound.eta_samples, i)),
            fmt_f64(col(&bound.p_samples, i)),
            fmt_f64(col(&bound.q_samples, i)),
            fmt_f64(bound.bound_samples[i]),
        );
    }
    out
}

fn render_solution_csv(nodes: &[f64], sol: &Solution) -> String {
    let mut out = String::from("t,u,residual\n");
    for i in 0..sol.values.len() {
        let _ = writeln!(
            out,
            "{},{},{}",
            fmt_f64(nodes[i]),
            fmt_f64(sol.values[i]),
            fmt_f64(sol.residual[i]),
        );
    }
    out
}

fn render_verify_csv(bound: &BoundResult, sol: &Solution) -> String {
    let mut out = String::from("t,u,bound,margin\n");
    for i in 0..bound.len() {
        let u = sol.values[i];
        let b = bound.bound_samples[i];
        let _ = writeln!(
            out,
            "{},{},{},{}",
            fmt_f64(bound.nodes[i]),
            fmt_f64(u),
            fmt_f64(b),
            fmt_f64(b - u),
        );
    }
    out
}

fn summarize_bound(bound: &BoundResult) -> String {
    format!(
        "certified up to t_star = {} ({} nodes)",
        bound.t_star.value,
        bound.len()
    )
}

fn render_report(
    command: Command,
    sc: &Scenario,
    overrides: &Overrides,
    bound: Option<&BoundResult>,
    sol: Option<&Solution>,
    dom: Option<&DominanceReport>,
) -> String {
    let mut out = String::new();
    if overrides.unchecked {
        out.push_str("UNCHECKED RUN: hypothesis validators were skipped\n\n");
    }
    let _ = writeln!(out, "command: {}", command.name());
    let _ = writeln!(out, "kind: {}", sc.kind.token());
    let _ = writeln!(out, "interval: [{}, {}]", sc.lo, sc.hi);
    let _ = writeln!(out, "grid points: {}", sc.grid_points);
    if sc.kind == InstanceKind::Thm2 {
        let _ = writeln!(out, "psi argument mode: {}", sc.psi_mode.token());
    }
    if let Some(k) = sc.k_const {
        let _ = writeln!(out, "k_const: {k}");
    }
    if let Some(b) = bound {
        let _ = writeln!(out, "t_star: {} (node {})", b.t_star.value, b.t_star.node_index);
        let _ = writeln!(
            out,
            "t_star bracket: [{}, {}]",
            b.t_star.bracket.0, b.t_star.bracket.1
        );
        if b.t_star.empty {
            let _ = writeln!(out, "t_star is degenerate: only the initial node is certified");
        }
        if let Some(sup) = b.g_sup {
            let _ = writeln!(out, "G_sup: {sup}");
        }
        if let Some(sup) = b.h_sup {
            let _ = writeln!(out, "H_sup: {sup}");
        }
        if !b.warnings.is_empty() {
            let _ = writeln!(out, "warnings:");
            for w in &b.warnings {
                let _ = writeln!(out, "  - {w}");
            }
        }
        out.push('\n');
        out.push_str(&b.report.render());
    }
    if let Some(s) = sol {
        let _ = writeln!(
            out,
            "\nsolver: converged in {} iterations, residual sup {:.3e}",
            s.iterations, s.residual_sup
        );
    }
    if let Some(d) = dom {
        let _ = writeln!(
            out,
            "dominance: {}, max(u - bound) = {:.6e} at t = {} ({} nodes checked to t = {}, {} uncertified, abs_tol {:.1e}, rel_tol {:.1e})",
            if d.pass { "PASS" } else { "FAIL" },
            d.max_violation,
            d.worst_t,
            d.checked_nodes,
            d.checked_to,
            d.uncertified_nodes,
            d.abs_tol,
            d.rel_tol,
        );
    }
    out
}
