//! Picard iteration for the equality form of each inequality, plus the
//! dominance check that compares the fixed point against a certified bound.
//!
//! The right-hand side of every kind is a Volterra-type operator (all
//! integrals run up to a delayed time <= t), so the iteration converges
//! factorially for data that is not too large; the divergence window exists
//! to cut off the cases that are.

use crate::error::{Error, Result};
use crate::expr::{eval_expr, Bindings, Var};
use crate::instance::{ApplicationData, InstanceKind, ProblemInstance};
use crate::quad::{cumtrap, CumulativeFn};

#[derive(Debug, Clone, Copy)]
pub struct PicardConfig {
    pub max_iterations: usize,
    /// Sup-norm tolerance, scaled by `1 + sup |u|`.
    pub tolerance: f64,
    /// Consecutive iterations with strictly growing update size before the
    /// iteration is declared divergent.
    pub divergence_window: usize,
}

impl Default for PicardConfig {
    fn default() -> Self {
        PicardConfig {
            max_iterations: 200,
            tolerance: 1e-10,
            divergence_window: 3,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub values: Vec<f64>,
    /// `u - RHS(u)` per node, recomputed once after convergence.
    pub residual: Vec<f64>,
    pub residual_sup: f64,
    pub iterations: usize,
}

/// Max-norm of the difference between two sample arrays.
fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn sup_abs(a: &[f64]) -> f64 {
    a.iter().map(|x| x.abs()).fold(0.0, f64::max)
}

/// Run the iteration `u <- rhs(u)` from `u0` until the update is below
/// tolerance, then re-apply the operator once to record the residual.
fn iterate<F>(u0: Vec<f64>, mut rhs: F, cfg: &PicardConfig) -> Result<Solution>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    let mut u = u0;
    let mut prev_delta = f64::INFINITY;
    let mut growing = 0usize;
    for iter in 1..=cfg.max_iterations {
        let next = rhs(&u)?;
        if next.iter().any(|v| !v.is_finite()) {
            return Err(Error::Diverging {
                iteration: iter,
                delta: f64::INFINITY,
            });
        }
        let delta = sup_diff(&next, &u);
        u = next;
        if delta <= cfg.tolerance * (1.0 + sup_abs(&u)) {
            let check = rhs(&u)?;
            let residual: Vec<f64> = u.iter().zip(&check).map(|(a, b)| a - b).collect();
            let residual_sup = sup_abs(&residual);
            let allowed = 10.0 * cfg.tolerance * (1.0 + sup_abs(&u));
            if residual_sup > allowed {
                return Err(Error::NotConverged {
                    iterations: iter,
                    last_delta: residual_sup,
                });
            }
            return Ok(Solution {
                values: u,
                residual,
                residual_sup,
                iterations: iter,
            });
        }
        if delta > prev_delta {
            growing += 1;
            if growing >= cfg.divergence_window {
                return Err(Error::Diverging {
                    iteration: iter,
                    delta,
                });
            }
        } else {
            growing = 0;
        }
        prev_delta = delta;
    }
    Err(Error::NotConverged {
        iterations: cfg.max_iterations,
        last_delta: prev_delta,
    })
}

/// `v(s_j) = integral up to s_j of k(s_j, tau) Phi(u(tau))`, one cumulative
/// pass per node because the kernel depends on the outer time.
fn inner_v(inst: &ProblemInstance, u: &[f64]) -> Result<Vec<f64>> {
    let n = inst.grid.len();
    let phi = inst.pack.phi.as_ref().ok_or_else(|| Error::Schema {
        message: "Phi is required to solve this equation".to_string(),
    })?;
    let mut phi_u = Vec::with_capacity(n);
    for &uj in u {
        phi_u.push(phi.eval(uj)?);
    }
    let mut v = Vec::with_capacity(n);
    let mut w = vec![0.0; n];
    for j in 0..n {
        let row = inst.k_matrix.row(j);
        for l in 0..n {
            w[l] = row[l] * phi_u[l];
        }
        v.push(cumtrap(&inst.grid, &w)[j]);
    }
    Ok(v)
}

/// Fixed point of the equality matching the instance kind, from the
/// starting guess `u0 = a`.
pub fn solve_equality(inst: &ProblemInstance, cfg: &PicardConfig) -> Result<Solution> {
    let grid = inst.grid.clone();
    let n = grid.len();
    let kind = inst.kind;
    let u0 = inst.a_samples.clone();

    let rhs = move |u: &[f64]| -> Result<Vec<f64>> {
        // weight applied to f under the integral: u itself for the linear
        // kinds, h(u) for the class-H ones
        let f_weight: Vec<f64> = match kind {
            InstanceKind::Lemma1 | InstanceKind::Thm1 => u.to_vec(),
            InstanceKind::Lemma2 | InstanceKind::Thm2 => {
                let h = inst.pack.h.as_ref().ok_or_else(|| Error::Schema {
                    message: "h is required to solve this equation".to_string(),
                })?;
                let mut hu = Vec::with_capacity(n);
                for &uj in u {
                    hu.push(h.eval(uj)?);
                }
                hu
            }
            InstanceKind::Application => unreachable!("handled by solve_eq1"),
        };
        // lemma2 has no b factor in front of its integral
        let b_of = |i: usize| -> f64 {
            if kind == InstanceKind::Lemma2 {
                1.0
            } else {
                inst.b_samples[i]
            }
        };
        let w_of_v: Option<Vec<f64>> = match kind {
            InstanceKind::Thm1 | InstanceKind::Thm2 => {
                let w_fn = inst.pack.w.as_ref().ok_or_else(|| Error::Schema {
                    message: "W is required to solve this equation".to_string(),
                })?;
                let v = inner_v(inst, u)?;
                let mut wv = Vec::with_capacity(n);
                for &vj in &v {
                    wv.push(w_fn.eval(vj)?);
                }
                Some(wv)
            }
            _ => None,
        };

        let mut out = Vec::with_capacity(n);
        let mut buf = vec![0.0; n];
        for i in 0..n {
            let row = inst.f_matrix.row(i);
            for j in 0..n {
                buf[j] = row[j] * f_weight[j];
            }
            let f_int = CumulativeFn::new(&grid, &buf).eval(inst.alpha.at_node(i));
            let mut val = inst.a_samples[i] + b_of(i) * f_int;
            if let Some(wv) = &w_of_v {
                let g_row = inst.g_matrix.row(i);
                for j in 0..n {
                    buf[j] = g_row[j] * wv[j];
                }
                val += CumulativeFn::new(&grid, &buf).eval(inst.beta.at_node(i));
            }
            out.push(val);
        }
        Ok(out)
    };

    iterate(u0, rhs, cfg)
}

/// Fixed point of the delayed equation
/// `u(t) = k_const + integral up to alpha(t) of F(s, u(s), v(s))` with
/// `v(s) = integral up to s of K(tau, u(tau))`; `v` is recomputed from the
/// current sweep. F sees the time as `s`, the state as `x` and the inner
/// integral as `tau`; K sees the time as `tau` and the state as `x`.
pub fn solve_eq1(data: &ApplicationData, cfg: &PicardConfig) -> Result<Solution> {
    let f_expr = data.f_expr.as_ref().ok_or_else(|| Error::Schema {
        message: "F is required to solve the equation".to_string(),
    })?;
    let k_expr = data.k_expr.as_ref().ok_or_else(|| Error::Schema {
        message: "K is required to solve the equation".to_string(),
    })?;
    let grid = data.grid.clone();
    let n = grid.len();
    let nodes = grid.nodes();
    let u0 = vec![data.k_const; n];

    let rhs = move |u: &[f64]| -> Result<Vec<f64>> {
        let mut k_vals = Vec::with_capacity(n);
        for j in 0..n {
            let b = Bindings::new().with(Var::Tau, nodes[j]).with(Var::X, u[j]);
            k_vals.push(eval_expr(k_expr, &b)?);
        }
        let v = cumtrap(&grid, &k_vals);
        let mut f_vals = Vec::with_capacity(n);
        for j in 0..n {
            let b = Bindings::new()
                .with(Var::S, nodes[j])
                .with(Var::X, u[j])
                .with(Var::Tau, v[j]);
            f_vals.push(eval_expr(f_expr, &b)?);
        }
        let cum = CumulativeFn::new(&grid, &f_vals);
        Ok((0..n)
            .map(|i| data.k_const + cum.eval(data.alpha.at_node(i)))
            .collect())
    };

    iterate(u0, rhs, cfg)
}

/// Outcome of comparing a computed solution against a certified bound on
/// the certified prefix of the grid.
#[derive(Debug, Clone)]
pub struct DominanceReport {
    pub pass: bool,
    /// Largest `u - bound` over checked nodes; negative values mean the
    /// bound dominated everywhere with that margin to spare.
    pub max_violation: f64,
    pub worst_node: usize,
    pub worst_t: f64,
    /// Upper end of the checked interval (t_star).
    pub checked_to: f64,
    pub checked_nodes: usize,
    /// Grid nodes past t_star, excluded from the comparison.
    pub uncertified_nodes: usize,
    pub abs_tol: f64,
    pub rel_tol: f64,
}

/// Compare a solution against a bound node by node up to t_star. The check
/// passes when `u <= bound + abs_tol + rel_tol * |bound|` at every checked
/// node.
pub fn check_dominance(
    u: &[f64],
    bound: &crate::bounds::BoundResult,
    abs_tol: f64,
    rel_tol: f64,
) -> DominanceReport {
    let checked = bound.len().min(u.len());
    let mut max_violation = f64::NEG_INFINITY;
    let mut worst = 0usize;
    let mut pass = true;
    for i in 0..checked {
        let b = bound.bound_samples[i];
        let excess = u[i] - b;
        if !u[i].is_finite() || !b.is_finite() {
            pass = false;
            max_violation = f64::INFINITY;
            worst = i;
            break;
        }
        if excess > max_violation {
            max_violation = excess;
            worst = i;
        }
        if excess > abs_tol + rel_tol * b.abs() {
            pass = false;
        }
    }
    DominanceReport {
        pass,
        max_violation,
        worst_node: worst,
        worst_t: bound.nodes.get(worst).copied().unwrap_or(bound.grid.lo()),
        checked_to: bound.t_star.value,
        checked_nodes: checked,
        uncertified_nodes: u.len().saturating_sub(checked),
        abs_tol,
        rel_tol,
    }
}
