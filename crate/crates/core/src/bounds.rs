//! The bound formulas.
//!
//! Five entry points, one per inequality kind. They share three pieces of
//! machinery:
//!
//! * the exponential kernel `K[c](t_i) = integral from lo to alpha(t_i) of
//!   exp(M_i(alpha_i) - M_i(s)) f(t_i, s) c(s) ds` with `M_i` the running
//!   integral of `b * f(t_i, .)` — the closed Gronwall form applied to a
//!   nonnegative core array `c`;
//! * the `eta -> inner -> p` chain feeding the monotone map `G`, whose
//!   domain supremum decides the certified horizon `t_star`;
//! * `find_t_star`, which locates the largest grid node whose map argument
//!   stays below `sup * (1 - 1e-6)`, always rounding down and recording the
//!   bracketing interval.
//!
//! Everything is sampled on the instance grid; each per-node integral is a
//! cumulative trapezoid sum evaluated at the (possibly off-grid) retarded
//! upper limit, so the total cost per bound is O(n^2).
//!
//! All returned arrays are restricted to the certified region `[lo, t_star]`;
//! values past `t_star` are not merely unreliable, they are undefined (the
//! map inversions they would need are outside the domain).

use crate::error::{Error, Result};
use crate::expr::{parse_expr, Var};
use crate::funcs::{DelayFn, Matrix, ScalarFn};
use crate::grid::Grid;
use crate::instance::{ApplicationData, InstanceKind, ProblemInstance, ValidationReport};
use crate::nonlinear::{build_g, build_h, MonotoneMap, DEFAULT_TOL, DEFAULT_X_MAX};
use crate::quad::{cumtrap, CumulativeFn};

/// Fractional distance below the map supremum at which certification stops.
const T_STAR_MARGIN: f64 = 1e-6;

/// Certified horizon with its provenance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TStar {
    /// The certified time: a grid node, except when the threshold is never
    /// reached on the interval (then it is the exact upper limit, e.g.
    /// beta(b)).
    pub value: f64,
    /// Largest grid index whose node is <= value.
    pub node_index: usize,
    /// Interval bracketing the true threshold crossing; collapses to
    /// (value, value) when nothing constrained the horizon.
    pub bracket: (f64, f64),
    /// Degenerate result: the domain condition failed at the first step and
    /// only the initial node is certified.
    pub empty: bool,
}

impl TStar {
    fn unconstrained(value: f64, grid: &Grid) -> TStar {
        TStar {
            value,
            node_index: grid.floor_index(value).unwrap_or(0),
            bracket: (value, value),
            empty: false,
        }
    }

    fn degenerate(grid: &Grid) -> TStar {
        TStar {
            value: grid.lo(),
            node_index: 0,
            bracket: (grid.lo(), grid.lo()),
            empty: true,
        }
    }
}

/// Which argument the class-H companion gets in the q factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsiArgumentMode {
    /// `Psi(a(s)) / a(s)`, matching the statement as printed.
    AsPrinted,
    /// `Psi(z(s)) / z(s)` with `z` the additive core, matching what the
    /// proof actually applies the lemma to. Never smaller than as-printed
    /// for nondecreasing `Psi(x)/x`, but the two are not comparable in
    /// general; reports always name the active mode.
    Conservative,
}

impl PsiArgumentMode {
    pub fn token(self) -> &'static str {
        match self {
            PsiArgumentMode::AsPrinted => "as-printed",
            PsiArgumentMode::Conservative => "conservative",
        }
    }

    pub fn from_token(s: &str) -> Option<PsiArgumentMode> {
        match s {
            "as-printed" => Some(PsiArgumentMode::AsPrinted),
            "conservative" => Some(PsiArgumentMode::Conservative),
            _ => None,
        }
    }
}

/// Certified bound with every intermediate array kept for diagnostics.
/// Arrays cover the certified nodes `0 ..= t_star.node_index` only; arrays
/// a kind does not produce are empty.
#[derive(Debug, Clone)]
pub struct BoundResult {
    pub kind: InstanceKind,
    pub grid: Grid,
    pub t_star: TStar,
    /// Certified grid nodes (same length as the arrays below).
    pub nodes: Vec<f64>,
    pub a_samples: Vec<f64>,
    pub eta_samples: Vec<f64>,
    pub inner_samples: Vec<f64>,
    /// Argument of the map that limits the domain: `p` for the G-side
    /// kinds, `H(1) + c(t)` for the H-side ones, zeros for lemma1.
    pub p_samples: Vec<f64>,
    /// Additive core: the bound before the final multiplicative or kernel
    /// layer (a for the lemmas, q for the retarded kinds, z for thm2).
    pub q_samples: Vec<f64>,
    /// Multiplicative class-H factor (lemma2 and thm2 only).
    pub factor_samples: Vec<f64>,
    pub bound_samples: Vec<f64>,
    pub g_sup: Option<f64>,
    pub h_sup: Option<f64>,
    pub psi_mode: Option<PsiArgumentMode>,
    pub warnings: Vec<String>,
    pub report: ValidationReport,
}

impl BoundResult {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// The exponential kernel applied to a core array, one value per grid node.
/// `core` must span the full grid (pad with zeros past the certified region;
/// the padding is never reached because `alpha(t_i) <= t_i`).
fn kernel_apply(
    grid: &Grid,
    alpha: &DelayFn,
    b_samples: &[f64],
    f_matrix: &Matrix,
    core: &[f64],
) -> Vec<f64> {
    let n = grid.len();
    debug_assert_eq!(core.len(), n);
    let mut out = Vec::with_capacity(n);
    let mut bf = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let row = f_matrix.row(i);
        for j in 0..n {
            bf[j] = b_samples[j] * row[j];
        }
        let m = cumtrap(grid, &bf);
        let alpha_i = alpha.at_node(i);
        let m_at_alpha = grid.interp(&m, alpha_i);
        for j in 0..n {
            w[j] = (m_at_alpha - m[j]).exp() * row[j] * core[j];
        }
        out.push(CumulativeFn::new(grid, &w).eval(alpha_i));
    }
    out
}

/// Closed-form bound for the linear retarded inequality:
/// `a(t) + b(t) * K[a](t)` at every grid node.
pub fn lemma1_bound(inst: &ProblemInstance) -> Result<Vec<f64>> {
    let kernel = kernel_apply(
        &inst.grid,
        &inst.alpha,
        &inst.b_samples,
        &inst.f_matrix,
        &inst.a_samples,
    );
    Ok(inst
        .a_samples
        .iter()
        .zip(&inst.b_samples)
        .zip(&kernel)
        .map(|((a, b), k)| a + b * k)
        .collect())
}

/// lemma1 packaged with the shared result shape: no domain constraint, so
/// the whole interval is certified and the additive core is a itself.
pub fn lemma1_result(inst: &ProblemInstance) -> Result<BoundResult> {
    let bound = lemma1_bound(inst)?;
    let n = inst.grid.len();
    Ok(BoundResult {
        kind: InstanceKind::Lemma1,
        grid: inst.grid.clone(),
        t_star: TStar::unconstrained(inst.grid.hi(), &inst.grid),
        nodes: inst.grid.nodes(),
        a_samples: inst.a_samples.clone(),
        eta_samples: Vec::new(),
        inner_samples: Vec::new(),
        p_samples: vec![0.0; n],
        q_samples: inst.a_samples.clone(),
        factor_samples: Vec::new(),
        bound_samples: bound,
        g_sup: None,
        h_sup: None,
        psi_mode: None,
        warnings: Vec::new(),
        report: inst.report.clone(),
    })
}

/// `eta(tau) = max(a(tau), integral of g(tau, .) up to beta(tau))` on the
/// full grid.
pub fn eta_function(inst: &ProblemInstance) -> Result<Vec<f64>> {
    let n = inst.grid.len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let row = inst.g_matrix.row(i);
        let g_int = CumulativeFn::new(&inst.grid, row).eval(inst.beta.at_node(i));
        out.push(inst.a_samples[i].max(g_int));
    }
    Ok(out)
}

/// The domain-driving chain: `inner = eta + b * K[eta]` and
/// `p(s_i) = integral from lo to s_i of k(s_i, tau) Phi(inner(tau)) d tau`.
/// Returns `(inner, p)`, both on the full grid.
pub fn p_function(inst: &ProblemInstance, eta: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = inst.grid.len();
    let phi = inst
        .pack
        .phi
        .as_ref()
        .ok_or_else(|| Error::Schema {
            message: "Phi is required for the p computation".to_string(),
        })?;
    let kernel = kernel_apply(
        &inst.grid,
        &inst.alpha,
        &inst.b_samples,
        &inst.f_matrix,
        eta,
    );
    let inner: Vec<f64> = (0..n)
        .map(|i| eta[i] + inst.b_samples[i] * kernel[i])
        .collect();
    let mut phi_inner = Vec::with_capacity(n);
    for &v in &inner {
        phi_inner.push(phi.eval(v)?);
    }
    let mut p = Vec::with_capacity(n);
    let mut w = vec![0.0; n];
    for i in 0..n {
        let row = inst.k_matrix.row(i);
        for j in 0..n {
            w[j] = row[j] * phi_inner[j];
        }
        // the upper limit is the node itself, so the prefix value is exact
        p.push(cumtrap(&inst.grid, &w)[i]);
    }
    debug_assert!(
        p.windows(2)
            .all(|w| w[1] >= w[0] - 1e-9 * (1.0 + w[0].abs())),
        "p must be nondecreasing for certified instances"
    );
    Ok((inner, p))
}

/// Largest grid node at which `values` stays below `sup * (1 - 1e-6)`,
/// scanning no further than `upper_limit`. The result always rounds down to
/// a grid node; one extra bisection between the last passing and first
/// failing node tightens the recorded bracket. An unbounded map certifies
/// the whole scan range, in which case the exact `upper_limit` is returned.
pub fn find_t_star(
    values: &[f64],
    map: &MonotoneMap,
    upper_limit: f64,
    grid: &Grid,
) -> Result<TStar> {
    debug_assert_eq!(values.len(), grid.len());
    let sup = map.sup();
    if sup.is_infinite() {
        return Ok(TStar::unconstrained(upper_limit, grid));
    }
    let threshold = sup * (1.0 - T_STAR_MARGIN);
    let scan_end = grid.floor_index(upper_limit).unwrap_or(0);
    let mut first_fail = None;
    for (i, &v) in values.iter().enumerate().take(scan_end + 1) {
        if v > threshold {
            first_fail = Some(i);
            break;
        }
    }
    match first_fail {
        None => Ok(TStar::unconstrained(upper_limit, grid)),
        Some(0) | Some(1) => Err(Error::EmptyDomain),
        Some(f) => {
            let idx = f - 1;
            let lo = grid.node(idx);
            let hi = grid.node(f);
            let mid = 0.5 * (lo + hi);
            let v_mid = grid.interp(values, mid);
            let bracket = if v_mid <= threshold { (mid, hi) } else { (lo, mid) };
            Ok(TStar {
                value: lo,
                node_index: idx,
                bracket,
                empty: false,
            })
        }
    }
}

/// Translate a threshold verdict on delayed-argument samples into the outer
/// horizon. The bound at time t only reads the scanned values up to
/// delay(t), so every node with delay(t_i) inside the certified prefix
/// inherits the certificate; for a strict delay that reaches past the
/// prefix's own node index. The bracket midpoint is classified against the
/// scan's bracket where possible, otherwise left at the full cell.
fn delay_certified_horizon(scan: &TStar, delay: &DelayFn, grid: &Grid) -> Result<TStar> {
    let n = grid.len();
    let slack = 1e-12 * (1.0 + scan.value.abs());
    let mut idx = 0usize;
    for i in 0..n {
        if delay.at_node(i) <= scan.value + slack {
            idx = i;
        } else {
            break;
        }
    }
    if idx == n - 1 {
        let hi = grid.node(n - 1);
        return Ok(TStar {
            value: hi,
            node_index: idx,
            bracket: (hi, hi),
            empty: false,
        });
    }
    let lo_t = grid.node(idx);
    let hi_t = grid.node(idx + 1);
    let mid = 0.5 * (lo_t + hi_t);
    let at_mid = delay.eval(mid)?;
    let (s_lo, s_hi) = scan.bracket;
    let bracket = if at_mid <= s_lo {
        (mid, hi_t)
    } else if at_mid >= s_hi {
        (lo_t, mid)
    } else {
        (lo_t, hi_t)
    };
    Ok(TStar {
        value: lo_t,
        node_index: idx,
        bracket,
        empty: false,
    })
}

/// Enforce the proof-side requirement `beta(alpha(t)) <= t_star` for every
/// certified node, shrinking the horizon until it holds. For delays that
/// honestly satisfy `beta(x) <= x` this never fires; it exists so the
/// emitted certificate matches what the argument actually needs.
fn shrink_to_composed_delays(
    ts: &mut TStar,
    alpha: &DelayFn,
    beta: &DelayFn,
    grid: &Grid,
    warnings: &mut Vec<String>,
) -> Result<()> {
    let mut shrunk = false;
    'outer: loop {
        let slack = 1e-12 * (1.0 + ts.value.abs());
        for i in 0..=ts.node_index {
            let composed = beta.eval(alpha.at_node(i))?;
            if composed > ts.value + slack {
                if ts.node_index == 0 {
                    ts.empty = true;
                    warnings.push(
                        "composed delay beta(alpha(t)) exceeds every candidate horizon; result degenerates to t_star = interval start"
                            .to_string(),
                    );
                    return Ok(());
                }
                ts.node_index -= 1;
                ts.value = grid.node(ts.node_index);
                ts.bracket = (ts.value, ts.value.min(ts.bracket.1));
                shrunk = true;
                continue 'outer;
            }
        }
        break;
    }
    if shrunk {
        warnings.push(format!(
            "t_star shrunk to {} so that beta(alpha(t)) <= t_star on the certified range",
            ts.value
        ));
    }
    Ok(())
}

fn truncate(v: &[f64], len: usize) -> Vec<f64> {
    v[..len.min(v.len())].to_vec()
}

fn pad_to(mut v: Vec<f64>, n: usize) -> Vec<f64> {
    v.resize(n, 0.0);
    v
}

/// W(G^-1(p_j)) for the certified prefix, zero-padded to the full grid so
/// it can feed grid-wide cumulative sums.
fn w_of_g_inverse(
    map: &MonotoneMap,
    w_fn: &ScalarFn,
    p: &[f64],
    certified_len: usize,
    n: usize,
) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(n);
    for &pj in p.iter().take(certified_len) {
        let x = map.invert(pj)?;
        out.push(w_fn.eval(x)?);
    }
    Ok(pad_to(out, n))
}

/// Full retarded pipeline: eta, p, G, t_star, q, and the final kernel layer.
pub fn thm1_bound(inst: &ProblemInstance) -> Result<BoundResult> {
    let w_fn = inst.pack.w.clone().ok_or_else(|| Error::Schema {
        message: "W is required for this bound".to_string(),
    })?;
    let phi_fn = inst.pack.phi.clone().ok_or_else(|| Error::Schema {
        message: "Phi is required for this bound".to_string(),
    })?;
    let grid = &inst.grid;
    let n = grid.len();
    let mut warnings = Vec::new();

    let eta = eta_function(inst)?;
    let (inner, p) = p_function(inst, &eta)?;
    let mut gmap = build_g(&w_fn, &phi_fn, DEFAULT_X_MAX, DEFAULT_TOL)?;

    // the scan lives in the delayed variable; q at time t only reads it up
    // to beta(t), so the outer horizon is recovered by composition
    let s_scan = match find_t_star(&p, &gmap, grid.hi(), grid) {
        Ok(ts) => ts,
        Err(Error::EmptyDomain) => {
            warnings.push(
                "domain condition fails at the first grid step; only the initial node is certified"
                    .to_string(),
            );
            TStar::degenerate(grid)
        }
        Err(e) => return Err(e),
    };
    let s_len = s_scan.node_index + 1;
    let mut ts = if s_scan.empty {
        s_scan
    } else {
        delay_certified_horizon(&s_scan, &inst.beta, grid)?
    };
    if !ts.empty {
        shrink_to_composed_delays(&mut ts, &inst.alpha, &inst.beta, grid, &mut warnings)?;
    }
    let len = ts.node_index + 1;

    gmap.ensure_covers(p[..s_len].iter().fold(0.0f64, |m, &v| m.max(v)))?;
    let wgp = w_of_g_inverse(&gmap, &w_fn, &p, s_len, n)?;

    let mut q = Vec::with_capacity(len);
    let mut w = vec![0.0; n];
    for i in 0..len {
        let row = inst.g_matrix.row(i);
        for j in 0..n {
            w[j] = row[j] * wgp[j];
        }
        let integral = CumulativeFn::new(grid, &w).eval(inst.beta.at_node(i));
        q.push(inst.a_samples[i] + integral);
    }

    let q_full = pad_to(q.clone(), n);
    let kernel = kernel_apply(grid, &inst.alpha, &inst.b_samples, &inst.f_matrix, &q_full);
    let bound: Vec<f64> = (0..len)
        .map(|i| q[i] + inst.b_samples[i] * kernel[i])
        .collect();

    Ok(BoundResult {
        kind: InstanceKind::Thm1,
        grid: grid.clone(),
        t_star: ts,
        nodes: truncate(&grid.nodes(), len),
        a_samples: truncate(&inst.a_samples, len),
        eta_samples: truncate(&eta, len),
        inner_samples: truncate(&inner, len),
        p_samples: truncate(&p, len),
        q_samples: q,
        factor_samples: Vec::new(),
        bound_samples: bound,
        g_sup: Some(gmap.sup()),
        h_sup: None,
        psi_mode: None,
        warnings,
        report: inst.report.clone(),
    })
}

/// `a(t) * Hinv(H(1) + integral of f(t, .) Psi(a)/a up to alpha(t))` with
/// the default anchor.
pub fn lemma2_bound(inst: &ProblemInstance) -> Result<BoundResult> {
    lemma2_bound_with_anchor(inst, 1.0)
}

/// Same bound with an explicit anchor `x0` for `H(x) = integral from x0 to
/// x of ds / h`. The bound only depends on `H` through `Hinv(H(1) + c)`,
/// which is invariant under the anchor; exposing it makes that testable.
pub fn lemma2_bound_with_anchor(inst: &ProblemInstance, anchor: f64) -> Result<BoundResult> {
    let h_fn = inst.pack.h.clone().ok_or_else(|| Error::Schema {
        message: "h is required for this bound".to_string(),
    })?;
    let psi_fn = inst.pack.psi.clone().ok_or_else(|| Error::Schema {
        message: "Psi is required for this bound".to_string(),
    })?;
    let grid = &inst.grid;
    let mut warnings = Vec::new();

    let mut hmap = build_h(&h_fn, anchor, DEFAULT_X_MAX, DEFAULT_TOL)?;
    let h_at_one = hmap.eval(1.0)?;

    let ratio = psi_over_r(&psi_fn, &inst.a_samples)?;
    let c = retarded_integrals(grid, &inst.f_matrix, &ratio, &inst.alpha);
    let y: Vec<f64> = c.iter().map(|v| h_at_one + v).collect();

    let ts = match find_t_star(&y, &hmap, grid.hi(), grid) {
        Ok(ts) => ts,
        Err(Error::EmptyDomain) => {
            warnings.push(
                "domain condition fails at the first grid step; only the initial node is certified"
                    .to_string(),
            );
            TStar::degenerate(grid)
        }
        Err(e) => return Err(e),
    };
    let len = ts.node_index + 1;

    hmap.ensure_covers(y[..len].iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v)))?;
    let mut factor = Vec::with_capacity(len);
    for &yi in y.iter().take(len) {
        factor.push(hmap.invert(yi)?);
    }
    let bound: Vec<f64> = (0..len).map(|i| inst.a_samples[i] * factor[i]).collect();

    Ok(BoundResult {
        kind: InstanceKind::Lemma2,
        grid: grid.clone(),
        t_star: ts,
        nodes: truncate(&grid.nodes(), len),
        a_samples: truncate(&inst.a_samples, len),
        eta_samples: Vec::new(),
        inner_samples: Vec::new(),
        p_samples: truncate(&y, len),
        q_samples: truncate(&inst.a_samples, len),
        factor_samples: factor,
        bound_samples: bound,
        g_sup: None,
        h_sup: Some(hmap.sup()),
        psi_mode: None,
        warnings,
        report: inst.report.clone(),
    })
}

/// Composite bound: the thm1 additive core `z` times the class-H factor,
/// certified up to the smaller of the two horizons.
pub fn thm2_bound(inst: &ProblemInstance, mode: PsiArgumentMode) -> Result<BoundResult> {
    let w_fn = inst.pack.w.clone().ok_or_else(|| Error::Schema {
        message: "W is required for this bound".to_string(),
    })?;
    let phi_fn = inst.pack.phi.clone().ok_or_else(|| Error::Schema {
        message: "Phi is required for this bound".to_string(),
    })?;
    let h_fn = inst.pack.h.clone().ok_or_else(|| Error::Schema {
        message: "h is required for this bound".to_string(),
    })?;
    let psi_fn = inst.pack.psi.clone().ok_or_else(|| Error::Schema {
        message: "Psi is required for this bound".to_string(),
    })?;
    let grid = &inst.grid;
    let n = grid.len();
    let mut warnings = Vec::new();

    // G side, exactly as in the full retarded pipeline
    let eta = eta_function(inst)?;
    let (inner, p) = p_function(inst, &eta)?;
    let mut gmap = build_g(&w_fn, &phi_fn, DEFAULT_X_MAX, DEFAULT_TOL)?;
    let mut empty = false;
    let s_scan = match find_t_star(&p, &gmap, grid.hi(), grid) {
        Ok(ts) => ts,
        Err(Error::EmptyDomain) => {
            empty = true;
            TStar::degenerate(grid)
        }
        Err(e) => return Err(e),
    };
    let s_len = s_scan.node_index + 1;
    let mut ts_g = if empty {
        s_scan
    } else {
        delay_certified_horizon(&s_scan, &inst.beta, grid)?
    };
    if !empty {
        shrink_to_composed_delays(&mut ts_g, &inst.alpha, &inst.beta, grid, &mut warnings)?;
        empty = ts_g.empty;
    }
    let len_g = ts_g.node_index + 1;

    gmap.ensure_covers(p[..s_len].iter().fold(0.0f64, |m, &v| m.max(v)))?;
    let wgp = w_of_g_inverse(&gmap, &w_fn, &p, s_len, n)?;
    let mut z = Vec::with_capacity(len_g);
    let mut buf = vec![0.0; n];
    for i in 0..len_g {
        let row = inst.g_matrix.row(i);
        for j in 0..n {
            buf[j] = row[j] * wgp[j];
        }
        let integral = CumulativeFn::new(grid, &buf).eval(inst.beta.at_node(i));
        z.push(inst.a_samples[i] + integral);
    }

    // H side, with the psi argument selected by mode
    let mut hmap = build_h(&h_fn, 1.0, DEFAULT_X_MAX, DEFAULT_TOL)?;
    let h_at_one = hmap.eval(1.0)?;
    let r_full = match mode {
        PsiArgumentMode::AsPrinted => inst.a_samples.clone(),
        PsiArgumentMode::Conservative => pad_to(z.clone(), n),
    };
    let ratio = psi_over_r_partial(&psi_fn, &r_full, len_g)?;
    let c = retarded_integrals(grid, &inst.f_matrix, &ratio, &inst.alpha);
    let y: Vec<f64> = c.iter().map(|v| h_at_one + v).collect();

    let ts_h = if empty {
        TStar::degenerate(grid)
    } else {
        match find_t_star(&y, &hmap, ts_g.value.min(grid.hi()), grid) {
            Ok(ts) => ts,
            Err(Error::EmptyDomain) => {
                empty = true;
                TStar::degenerate(grid)
            }
            Err(e) => return Err(e),
        }
    };

    let mut ts = if empty {
        warnings.push(
            "domain condition fails at the first grid step; only the initial node is certified"
                .to_string(),
        );
        TStar::degenerate(grid)
    } else if ts_h.value < ts_g.value {
        warnings.push("certified horizon limited by the class-H domain".to_string());
        ts_h
    } else {
        ts_g
    };
    ts.node_index = ts.node_index.min(ts_g.node_index).min(ts_h.node_index);
    let len = ts.node_index + 1;

    hmap.ensure_covers(y[..len].iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v)))?;
    let mut factor = Vec::with_capacity(len);
    for &yi in y.iter().take(len) {
        factor.push(hmap.invert(yi)?);
    }
    let bound: Vec<f64> = (0..len).map(|i| z[i] * factor[i]).collect();

    Ok(BoundResult {
        kind: InstanceKind::Thm2,
        grid: grid.clone(),
        t_star: ts,
        nodes: truncate(&grid.nodes(), len),
        a_samples: truncate(&inst.a_samples, len),
        eta_samples: truncate(&eta, len),
        inner_samples: truncate(&inner, len),
        p_samples: truncate(&p, len),
        q_samples: truncate(&z, len),
        factor_samples: factor,
        bound_samples: bound,
        g_sup: Some(gmap.sup()),
        h_sup: Some(hmap.sup()),
        psi_mode: Some(mode),
        warnings,
        report: inst.report.clone(),
    })
}

/// Bound for the retarded equation: the full pipeline specialized to
/// `a = k_const`, `b = 1`, `f(t,s) = t`, `g = 1`, `W = id`, `beta = alpha`,
/// written out directly in that reduced form.
pub fn application_bound(data: &ApplicationData) -> Result<BoundResult> {
    let grid = &data.grid;
    let n = grid.len();
    let mut warnings = Vec::new();
    if grid.lo() > 0.0 {
        warnings.push(format!(
            "interval starts at {} > 0; integrals written from 0 start at the grid origin instead",
            grid.lo()
        ));
    }

    let nodes = grid.nodes();
    let eta: Vec<f64> = (0..n)
        .map(|i| data.k_const.max(data.alpha.at_node(i)))
        .collect();

    // inner(tau) = eta(tau) + tau * integral exp(tau (alpha - xi)) eta(xi)
    let mut inner = Vec::with_capacity(n);
    let mut w = vec![0.0; n];
    for i in 0..n {
        let t = nodes[i];
        let alpha_i = data.alpha.at_node(i);
        for j in 0..n {
            w[j] = (t * (alpha_i - nodes[j])).exp() * eta[j];
        }
        let integral = CumulativeFn::new(grid, &w).eval(alpha_i);
        inner.push(eta[i] + t * integral);
    }

    let k_samples = data.k_fn.sample(grid)?;
    let mut kphi = Vec::with_capacity(n);
    for i in 0..n {
        kphi.push(k_samples[i] * data.phi.eval(inner[i])?);
    }
    let p = cumtrap(grid, &kphi);

    let identity = ScalarFn::from_expr(parse_expr("x").expect("static expression"), Var::X)
        .expect("static expression");
    let mut gmap = build_g(&identity, &data.phi, DEFAULT_X_MAX, DEFAULT_TOL)?;

    let s_scan = match find_t_star(&p, &gmap, grid.hi(), grid) {
        Ok(ts) => ts,
        Err(Error::EmptyDomain) => {
            warnings.push(
                "domain condition fails at the first grid step; only the initial node is certified"
                    .to_string(),
            );
            TStar::degenerate(grid)
        }
        Err(e) => return Err(e),
    };
    let s_len = s_scan.node_index + 1;
    let mut ts = if s_scan.empty {
        s_scan
    } else {
        delay_certified_horizon(&s_scan, &data.alpha, grid)?
    };
    if !ts.empty {
        shrink_to_composed_delays(&mut ts, &data.alpha, &data.alpha, grid, &mut warnings)?;
    }
    let len = ts.node_index + 1;

    gmap.ensure_covers(p[..s_len].iter().fold(0.0f64, |m, &v| m.max(v)))?;
    let mut ginv = Vec::with_capacity(n);
    for &pj in p.iter().take(s_len) {
        ginv.push(gmap.invert(pj)?);
    }
    let ginv = pad_to(ginv, n);

    let ginv_cum = CumulativeFn::new(grid, &ginv);
    let mut q = Vec::with_capacity(len);
    for i in 0..len {
        q.push(data.k_const + ginv_cum.eval(data.alpha.at_node(i)));
    }

    let q_full = pad_to(q.clone(), n);
    let mut bound = Vec::with_capacity(len);
    for i in 0..len {
        let t = nodes[i];
        let alpha_i = data.alpha.at_node(i);
        for j in 0..n {
            w[j] = (t * (alpha_i - nodes[j])).exp() * q_full[j];
        }
        let integral = CumulativeFn::new(grid, &w).eval(alpha_i);
        bound.push(q[i] + t * integral);
    }

    Ok(BoundResult {
        kind: InstanceKind::Application,
        grid: grid.clone(),
        t_star: ts,
        nodes: truncate(&nodes, len),
        a_samples: vec![data.k_const; len],
        eta_samples: truncate(&eta, len),
        inner_samples: truncate(&inner, len),
        p_samples: truncate(&p, len),
        q_samples: q,
        factor_samples: Vec::new(),
        bound_samples: bound,
        g_sup: Some(gmap.sup()),
        h_sup: None,
        psi_mode: None,
        warnings,
        report: data.report.clone(),
    })
}

/// `Psi(r_j) / r_j` for every node; `r` must be strictly positive.
fn psi_over_r(psi: &ScalarFn, r: &[f64]) -> Result<Vec<f64>> {
    psi_over_r_partial(psi, r, r.len())
}

/// Same, but only the first `len` entries are meaningful (zero past them);
/// used when `r` is itself only certified on a prefix.
fn psi_over_r_partial(psi: &ScalarFn, r: &[f64], len: usize) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(r.len());
    for &rj in r.iter().take(len) {
        if rj <= 0.0 {
            return Err(Error::InvalidInstance {
                hypothesis: "positivity".to_string(),
                subject: "Psi argument".to_string(),
                detail: format!("nonpositive value {rj}"),
            });
        }
        out.push(psi.eval(rj)? / rj);
    }
    Ok(pad_to(out, r.len()))
}

/// Per-node retarded integrals `integral of f(t_i, .) * weight up to
/// alpha(t_i)`.
fn retarded_integrals(
    grid: &Grid,
    f_matrix: &Matrix,
    weight: &[f64],
    alpha: &DelayFn,
) -> Vec<f64> {
    let n = grid.len();
    let mut out = Vec::with_capacity(n);
    let mut w = vec![0.0; n];
    for i in 0..n {
        let row = f_matrix.row(i);
        for j in 0..n {
            w[j] = row[j] * weight[j];
        }
        out.push(CumulativeFn::new(grid, &w).eval(alpha.at_node(i)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcs::BivariateFn;
    use crate::instance::{build_application, build_standard, StandardInputs};
    use crate::nonlinear::NonlinearPack;

    fn sfn_t(src: &str) -> ScalarFn {
        ScalarFn::from_expr(parse_expr(src).unwrap(), Var::T).unwrap()
    }

    fn sfn_x(src: &str) -> ScalarFn {
        ScalarFn::from_expr(parse_expr(src).unwrap(), Var::X).unwrap()
    }

    struct Spec {
        kind: InstanceKind,
        lo: f64,
        hi: f64,
        n: usize,
        a: ScalarFn,
        b: Option<ScalarFn>,
        f: BivariateFn,
        g: Option<BivariateFn>,
        k: Option<BivariateFn>,
        alpha: ScalarFn,
        beta: Option<ScalarFn>,
        pack: NonlinearPack,
    }

    impl Spec {
        fn new(kind: InstanceKind) -> Spec {
            Spec {
                kind,
                lo: 0.0,
                hi: 1.0,
                n: 257,
                a: ScalarFn::from_const(1.0),
                b: None,
                f: BivariateFn::from_const(1.0),
                g: None,
                k: None,
                alpha: sfn_t("t"),
                beta: None,
                pack: NonlinearPack::default(),
            }
        }

        fn build(self) -> ProblemInstance {
            build_standard(
                StandardInputs {
                    kind: self.kind,
                    grid: Grid::new(self.lo, self.hi, self.n).unwrap(),
                    a: self.a,
                    b: self.b,
                    f: self.f,
                    g: self.g,
                    k: self.k,
                    alpha: self.alpha,
                    beta: self.beta,
                    pack: self.pack,
                },
                false,
            )
            .unwrap()
        }
    }

    fn max_rel_err(got: &[f64], nodes: &[f64], exact: impl Fn(f64) -> f64) -> f64 {
        got.iter()
            .zip(nodes)
            .map(|(&v, &t)| {
                let e = exact(t);
                (v - e).abs() / (1.0 + e.abs())
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn classical_gronwall_is_the_exponential() {
        let mut spec = Spec::new(InstanceKind::Lemma1);
        spec.b = Some(ScalarFn::from_const(1.0));
        spec.n = 1025;
        let inst = spec.build();
        let bound = lemma1_bound(&inst).unwrap();
        let err = max_rel_err(&bound, &inst.grid.nodes(), |t| t.exp());
        assert!(err < 1e-6, "max rel err {err}");
    }

    #[test]
    fn zero_b_collapses_to_a() {
        let mut spec = Spec::new(InstanceKind::Lemma1);
        spec.a = sfn_t("1 + t^2");
        spec.b = Some(ScalarFn::from_const(0.0));
        let inst = spec.build();
        let bound = lemma1_bound(&inst).unwrap();
        for (i, &v) in bound.iter().enumerate() {
            assert_eq!(v, inst.a_samples[i]);
        }
    }

    #[test]
    fn left_endpoint_delay_collapses_to_a() {
        let mut spec = Spec::new(InstanceKind::Lemma1);
        spec.b = Some(ScalarFn::from_const(1.0));
        spec.alpha = sfn_t("0");
        let inst = spec.build();
        let bound = lemma1_bound(&inst).unwrap();
        for (i, &v) in bound.iter().enumerate() {
            assert_eq!(v, inst.a_samples[i], "node {i}");
        }
    }

    #[test]
    fn eta_reduces_to_a_without_g() {
        let mut spec = Spec::new(InstanceKind::Thm1);
        spec.a = sfn_t("1 + t");
        spec.k = Some(BivariateFn::from_const(1.0));
        spec.pack = NonlinearPack {
            w: Some(sfn_x("x")),
            phi: Some(sfn_x("x^2")),
            h: None,
            psi: None,
        };
        let inst = spec.build();
        let eta = eta_function(&inst).unwrap();
        assert_eq!(eta, inst.a_samples);
    }

    #[test]
    fn eta_is_the_g_integral_when_a_vanishes() {
        let mut spec = Spec::new(InstanceKind::Thm1);
        spec.a = ScalarFn::from_const(0.0);
        spec.g = Some(BivariateFn::from_const(1.0));
        spec.k = Some(BivariateFn::from_const(1.0));
        spec.pack = NonlinearPack {
            w: Some(sfn_x("x")),
            phi: Some(sfn_x("x^2")),
            h: None,
            psi: None,
        };
        let inst = spec.build();
        let eta = eta_function(&inst).unwrap();
        for (i, &v) in eta.iter().enumerate() {
            assert!((v - inst.grid.node(i)).abs() < 1e-12, "node {i}: {v}");
        }
    }

    #[test]
    fn eta_crossover_at_one() {
        let mut spec = Spec::new(InstanceKind::Thm1);
        spec.hi = 2.0;
        spec.g = Some(BivariateFn::from_const(1.0));
        spec.k = Some(BivariateFn::from_const(1.0));
        spec.pack = NonlinearPack {
            w: Some(sfn_x("x")),
            phi: Some(sfn_x("x^2")),
            h: None,
            psi: None,
        };
        let inst = spec.build();
        let eta = eta_function(&inst).unwrap();
        for (i, &v) in eta.iter().enumerate() {
            let t = inst.grid.node(i);
            assert!((v - 1.0f64.max(t)).abs() < 1e-12, "node {i}");
        }
    }

    fn q_oracle_spec() -> Spec {
        // a = 1, b = 0, g = 1, beta = t, k = 1, Phi = x^2, W = x on [0, 0.5]:
        // eta = 1, inner = 1, p(s) = s, Ginv(y) = y/(1-y),
        // q(t) = 1 - t - ln(1-t), bound = q, t_star = 0.5
        let mut spec = Spec::new(InstanceKind::Thm1);
        spec.hi = 0.5;
        spec.b = Some(ScalarFn::from_const(0.0));
        spec.g = Some(BivariateFn::from_const(1.0));
        spec.k = Some(BivariateFn::from_const(1.0));
        spec.pack = NonlinearPack {
            w: Some(sfn_x("x")),
            phi: Some(sfn_x("x^2")),
            h: None,
            psi: None,
        };
        spec
    }

    #[test]
    fn p_is_linear_for_unit_data() {
        let mut spec = q_oracle_spec();
        spec.g = None; // eta = a = 1 directly
        let inst = spec.build();
        let eta = eta_function(&inst).unwrap();
        let (inner, p) = p_function(&inst, &eta).unwrap();
        for (i, (&ival, &pval)) in inner.iter().zip(&p).enumerate() {
            assert!((ival - 1.0).abs() < 1e-12);
            assert!((pval - inst.grid.node(i)).abs() < 1e-8, "p[{i}] = {pval}");
        }
    }

    #[test]
    fn q_matches_the_log_oracle() {
        let mut spec = q_oracle_spec();
        spec.n = 1025;
        let inst = spec.build();
        let r = thm1_bound(&inst).unwrap();
        assert_eq!(r.t_star.value, 0.5);
        assert!(!r.t_star.empty);
        assert_eq!(r.len(), 1025);
        let err = max_rel_err(&r.q_samples, &r.nodes, |t| 1.0 - t - (1.0 - t).ln());
        assert!(err < 1e-6, "max rel err {err}");
        // b = 0: the final kernel layer adds nothing
        for i in 0..r.len() {
            assert_eq!(r.q_samples[i], r.bound_samples[i]);
        }
        assert!((r.g_sup.unwrap() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn t_star_rounds_down_at_the_crossing() {
        // p(t) = t crosses the threshold just below 1 on [0, 2]
        let mut spec = q_oracle_spec();
        spec.hi = 2.0;
        spec.n = 1025;
        let inst = spec.build();
        let r = thm1_bound(&inst).unwrap();
        let h = inst.grid.step();
        assert!(
            r.t_star.value >= 1.0 - 2.0 * h && r.t_star.value < 1.0,
            "t_star = {}",
            r.t_star.value
        );
        assert!(r.t_star.bracket.0 <= r.t_star.bracket.1);
        assert!(r.t_star.bracket.1 - r.t_star.bracket.0 <= h);
        assert_eq!(r.len(), r.t_star.node_index + 1);
    }

    #[test]
    fn find_t_star_unbounded_map_certifies_everything() {
        let grid = Grid::new(0.0, 2.0, 129).unwrap();
        let p: Vec<f64> = grid.nodes();
        let gmap = build_g(&sfn_x("x"), &sfn_x("x"), DEFAULT_X_MAX, DEFAULT_TOL).unwrap();
        let ts = find_t_star(&p, &gmap, 1.7, &grid).unwrap();
        assert_eq!(ts.value, 1.7);
        assert!(!ts.empty);
    }

    #[test]
    fn find_t_star_empty_domain() {
        let grid = Grid::new(0.0, 1.0, 17).unwrap();
        let mut p = vec![10.0; 17];
        p[0] = 0.0;
        let gmap = build_g(&sfn_x("x"), &sfn_x("x^2"), DEFAULT_X_MAX, DEFAULT_TOL).unwrap();
        assert!(matches!(
            find_t_star(&p, &gmap, 1.0, &grid),
            Err(Error::EmptyDomain)
        ));
    }

    #[test]
    fn degenerate_domain_collapses_to_the_first_node() {
        let mut spec = q_oracle_spec();
        spec.n = 129;
        spec.k = Some(BivariateFn::from_const(2000.0));
        let inst = spec.build();
        let r = thm1_bound(&inst).unwrap();
        assert!(r.t_star.empty);
        assert_eq!(r.len(), 1);
        assert_eq!(r.bound_samples[0], 1.0);
        assert!(!r.warnings.is_empty());
    }

    #[test]
    fn thm1_without_g_reduces_to_lemma1() {
        // Phi = x keeps G unbounded, so the whole interval stays certified
        // and the comparison runs over every node
        let mut spec = Spec::new(InstanceKind::Thm1);
        spec.b = Some(ScalarFn::from_const(1.0));
        spec.a = sfn_t("1 + t/2");
        spec.k = Some(BivariateFn::from_const(1.0));
        spec.pack = NonlinearPack {
            w: Some(sfn_x("x")),
            phi: Some(sfn_x("x")),
            h: None,
            psi: None,
        };
        let inst = spec.build();
        let r = thm1_bound(&inst).unwrap();
        let l1 = lemma1_bound(&inst).unwrap();
        assert_eq!(r.len(), inst.grid.len());
        for i in 0..r.len() {
            let d = (r.bound_samples[i] - l1[i]).abs();
            assert!(d <= 1e-10 * (1.0 + l1[i].abs()), "node {i}: {d}");
        }
    }

    #[test]
    fn zero_k_uses_w_at_zero() {
        // k = 0 means p = 0, Ginv(0) = 0, so q = a + W(0) * (beta(t) - lo)
        let mut spec = Spec::new(InstanceKind::Thm1);
        spec.b = Some(ScalarFn::from_const(0.0));
        spec.g = Some(BivariateFn::from_const(1.0));
        spec.pack = NonlinearPack {
            w: Some(sfn_x("x + 0.3")),
            phi: Some(sfn_x("x^2")),
            h: None,
            psi: None,
        };
        let inst = spec.build();
        let r = thm1_bound(&inst).unwrap();
        for (i, &t) in r.nodes.iter().enumerate() {
            let expected = 1.0 + 0.3 * t;
            assert!(
                (r.bound_samples[i] - expected).abs() < 1e-10,
                "node {i}: {} vs {expected}",
                r.bound_samples[i]
            );
        }
    }

    fn lemma2_spec(h: &str, psi: &str) -> Spec {
        let mut spec = Spec::new(InstanceKind::Lemma2);
        spec.pack = NonlinearPack {
            w: None,
            phi: None,
            h: Some(sfn_x(h)),
            psi: Some(sfn_x(psi)),
        };
        spec
    }

    #[test]
    fn lemma2_recovers_linear_gronwall() {
        let mut spec = lemma2_spec("x", "x");
        spec.a = ScalarFn::from_const(2.0);
        spec.f = BivariateFn::from_const(0.7);
        spec.n = 1025;
        let inst = spec.build();
        let r = lemma2_bound(&inst).unwrap();
        assert_eq!(r.len(), 1025);
        let err = max_rel_err(&r.bound_samples, &r.nodes, |t| 2.0 * (0.7 * t).exp());
        assert!(err < 1e-6, "max rel err {err}");
        assert!(r.h_sup.unwrap().is_infinite());
    }

    #[test]
    fn lemma2_bihari_blow_up() {
        let mut spec = lemma2_spec("x^2", "x^2");
        spec.hi = 0.9;
        spec.n = 1025;
        let inst = spec.build();
        let r = lemma2_bound(&inst).unwrap();
        // the blow-up is at t = 1, outside the interval, so everything is
        // certified
        assert_eq!(r.t_star.value, 0.9);
        let err = max_rel_err(&r.bound_samples, &r.nodes, |t| 1.0 / (1.0 - t));
        assert!(err < 1e-5, "max rel err {err}");
        assert!((r.h_sup.unwrap() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn lemma2_truncates_before_the_blow_up() {
        let mut spec = lemma2_spec("x^2", "x^2");
        spec.hi = 2.0;
        spec.n = 1025;
        let inst = spec.build();
        let r = lemma2_bound(&inst).unwrap();
        assert!(r.t_star.value < 1.0, "t_star = {}", r.t_star.value);
        assert!(r.t_star.value > 0.99, "t_star = {}", r.t_star.value);
        // still accurate inside the certified region
        let err = max_rel_err(&r.bound_samples, &r.nodes, |t| 1.0 / (1.0 - t));
        assert!(err < 1e-4, "max rel err {err}");
    }

    #[test]
    fn lemma2_zero_f_gives_a_back() {
        let mut spec = lemma2_spec("x", "x");
        spec.a = sfn_t("2 + t");
        spec.f = BivariateFn::from_const(0.0);
        let inst = spec.build();
        let r = lemma2_bound(&inst).unwrap();
        for i in 0..r.len() {
            let d = (r.bound_samples[i] - inst.a_samples[i]).abs();
            assert!(d < 1e-12, "node {i}");
        }
    }

    #[test]
    fn lemma2_anchor_invariance() {
        let mut spec = lemma2_spec("x^2", "x^2");
        spec.a = sfn_t("1 + t/3");
        spec.f = BivariateFn::from_const(0.5);
        spec.hi = 0.8;
        let inst = spec.build();
        let base = lemma2_bound_with_anchor(&inst, 1.0).unwrap();
        for anchor in [0.5, 2.0] {
            let other = lemma2_bound_with_anchor(&inst, anchor).unwrap();
            assert_eq!(other.len(), base.len(), "anchor {anchor}");
            for i in 0..base.len() {
                let d = (other.bound_samples[i] - base.bound_samples[i]).abs();
                assert!(
                    d <= 1e-7 * (1.0 + base.bound_samples[i].abs()),
                    "anchor {anchor}, node {i}: {d}"
                );
            }
        }
    }

    fn thm2_composition_spec() -> Spec {
        let mut spec = Spec::new(InstanceKind::Thm2);
        spec.b = Some(ScalarFn::from_const(1.0));
        spec.g = Some(BivariateFn::from_const(1.0));
        spec.pack = NonlinearPack {
            w: Some(sfn_x("x")),
            phi: Some(sfn_x("x^2")),
            h: Some(sfn_x("x")),
            psi: Some(sfn_x("x")),
        };
        spec
    }

    #[test]
    fn thm2_composes_the_two_closed_forms() {
        // k = 0: z = a = 1 and the H factor is e^t, so bound = e^t
        let mut spec = thm2_composition_spec();
        spec.n = 1025;
        let inst = spec.build();
        for mode in [PsiArgumentMode::AsPrinted, PsiArgumentMode::Conservative] {
            let r = thm2_bound(&inst, mode).unwrap();
            assert_eq!(r.len(), 1025, "mode {mode:?}");
            let err = max_rel_err(&r.bound_samples, &r.nodes, |t| t.exp());
            assert!(err < 1e-6, "mode {mode:?}: max rel err {err}");
        }
    }

    #[test]
    fn thm2_without_g_reduces_to_lemma2() {
        let mut spec = thm2_composition_spec();
        spec.g = None;
        spec.a = sfn_t("1 + t/4");
        spec.f = BivariateFn::from_const(0.6);
        let inst = spec.build();
        let l2 = lemma2_bound(&inst).unwrap();
        for mode in [PsiArgumentMode::AsPrinted, PsiArgumentMode::Conservative] {
            let r = thm2_bound(&inst, mode).unwrap();
            assert_eq!(r.len(), l2.len());
            for i in 0..r.len() {
                let d = (r.bound_samples[i] - l2.bound_samples[i]).abs();
                assert!(
                    d <= 1e-10 * (1.0 + l2.bound_samples[i].abs()),
                    "mode {mode:?}, node {i}: {d}"
                );
            }
        }
    }

    fn application_data(k_const: f64, n: usize) -> ApplicationData {
        build_application(
            Grid::new(0.0, 1.0, n).unwrap(),
            k_const,
            ScalarFn::from_const(0.0),
            sfn_x("x^2"),
            sfn_t("t"),
            None,
            None,
            false,
        )
        .unwrap()
    }

    #[test]
    fn application_gaussian_oracle() {
        let data = application_data(1.0, 1025);
        let r = application_bound(&data).unwrap();
        assert_eq!(r.t_star.value, 1.0);
        assert_eq!(r.len(), 1025);
        let err = max_rel_err(&r.bound_samples, &r.nodes, |t| (t * t).exp());
        assert!(err < 1e-5, "max rel err {err}");
        for (i, &q) in r.q_samples.iter().enumerate() {
            assert_eq!(q, 1.0, "q[{i}]");
        }
    }

    #[test]
    fn application_zero_data_is_zero() {
        let data = application_data(0.0, 257);
        let r = application_bound(&data).unwrap();
        for &v in &r.bound_samples {
            assert_eq!(v, 0.0);
        }
    }

    #[test]
    fn application_frozen_delay_returns_the_constant() {
        let data = build_application(
            Grid::new(0.0, 1.0, 257).unwrap(),
            1.5,
            ScalarFn::from_const(0.0),
            sfn_x("x^2"),
            sfn_t("0"),
            None,
            None,
            false,
        )
        .unwrap();
        let r = application_bound(&data).unwrap();
        for &v in &r.bound_samples {
            assert_eq!(v, 1.5);
        }
    }

    #[test]
    fn bound_dominates_core_and_core_dominates_nothing_negative() {
        let mut spec = q_oracle_spec();
        spec.n = 257;
        let inst = spec.build();
        let r = thm1_bound(&inst).unwrap();
        for i in 0..r.len() {
            assert!(r.bound_samples[i] >= r.q_samples[i]);
            assert!(r.q_samples[i] >= 0.0);
            assert!(r.bound_samples[i] >= r.a_samples[i] - 1e-12);
        }
        for w in r.p_samples.windows(2) {
            assert!(w[1] >= w[0] - 1e-12);
        }
    }
}
