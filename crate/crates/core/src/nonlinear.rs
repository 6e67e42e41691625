//! Monotone integral transforms and nonlinearity hypotheses.
//!
//! The bound formulas compose two maps:
//!
//! * `G(x) = integral from 0 to x of ds / Phi(1 + W(s))`, anchored at 0;
//! * `H(x) = integral from x_anchor to x of ds / h(s)`, anchored at a point
//!   `x_anchor > 0` the theory leaves free (the final bound is invariant
//!   under the choice; the default is 1).
//!
//! Both are strictly increasing where their integrand is positive, so they
//! invert uniquely on the range below the supremum. The supremum matters:
//! a finite `G_sup` truncates the certified horizon `t_star`. Whether the
//! supremum is finite is decided numerically from the tail behaviour of the
//! tabulation and recorded in the report.

use crate::error::{Error, Result};
use crate::funcs::ScalarFn;
use crate::instance::{CheckEntry, Severity};
use crate::quad::integrate;
use std::fmt;

/// Breakpoints per decade in the logarithmic part of a tabulation ladder.
const LOG_PER_DECADE: usize = 32;
/// Default upper end of a tabulation.
pub const DEFAULT_X_MAX: f64 = 1e12;
/// Default per-segment quadrature tolerance.
pub const DEFAULT_TOL: f64 = 1e-12;
/// Never extend a ladder past this point; inverses beyond it do not fit in
/// an f64 anyway.
const X_CAP: f64 = 1e300;
/// Relative last-decade increment below which the supremum counts as finite.
const SUP_DETECT_REL: f64 = 1e-9;
/// Margin keeping inversions away from a finite supremum.
const SUP_MARGIN: f64 = 1e-9;

/// The nonlinearities of an instance. Which members are present depends on
/// the inequality kind; accessors report a missing function by name.
#[derive(Debug, Clone, Default)]
pub struct NonlinearPack {
    pub w: Option<ScalarFn>,
    pub phi: Option<ScalarFn>,
    pub h: Option<ScalarFn>,
    pub psi: Option<ScalarFn>,
}

/// Tabulated monotone map with its integrand retained for local refinement.
pub struct MonotoneMap {
    xs: Vec<f64>,
    values: Vec<f64>,
    anchor_index: usize,
    sup: f64,
    integrand: Box<dyn Fn(f64) -> Result<f64> + Send + Sync>,
    seg_tol: f64,
    lower_truncated: Option<f64>,
}

impl fmt::Debug for MonotoneMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MonotoneMap")
            .field("x_lo", &self.xs.first())
            .field("x_hi", &self.xs.last())
            .field("points", &self.xs.len())
            .field("anchor", &self.xs[self.anchor_index])
            .field("sup", &self.sup)
            .field("lower_truncated", &self.lower_truncated)
            .finish()
    }
}

impl MonotoneMap {
    pub fn anchor(&self) -> f64 {
        self.xs[self.anchor_index]
    }

    /// Estimated supremum of the map; `f64::INFINITY` when the tabulated
    /// tail keeps growing.
    pub fn sup(&self) -> f64 {
        self.sup
    }

    pub fn x_lo(&self) -> f64 {
        self.xs[0]
    }

    pub fn x_hi(&self) -> f64 {
        *self.xs.last().unwrap()
    }

    pub fn max_tabulated_value(&self) -> f64 {
        *self.values.last().unwrap()
    }

    pub fn min_tabulated_value(&self) -> f64 {
        self.values[0]
    }

    /// Where the downward tabulation stopped early because the integrand
    /// failed or lost positivity (only possible for anchored-above-zero
    /// maps). `None` when the full default range is covered.
    pub fn lower_truncated(&self) -> Option<f64> {
        self.lower_truncated
    }

    /// Map value at `x`, exact at breakpoints and locally integrated off
    /// them. `x` must lie in the tabulated range.
    pub fn eval(&self, x: f64) -> Result<f64> {
        let lo = self.x_lo();
        let hi = self.x_hi();
        if !(lo..=hi).contains(&x) {
            return Err(Error::Eval {
                what: format!("map evaluation at {x} outside tabulated range [{lo}, {hi}]"),
            });
        }
        let idx = self.xs.partition_point(|&v| v <= x);
        let seg = idx.saturating_sub(1).min(self.xs.len() - 2);
        if x == self.xs[seg] {
            return Ok(self.values[seg]);
        }
        if x == self.xs[seg + 1] {
            return Ok(self.values[seg + 1]);
        }
        let local = integrate(&*self.integrand, self.xs[seg], x, self.seg_tol)?;
        Ok(self.values[seg] + local)
    }

    /// Extend the tabulation upward (decade by decade) until the values
    /// cover `y`, the hard cap is reached, or the values plateau. Call this
    /// before batch inversion when arguments may exceed the built range.
    pub fn ensure_covers(&mut self, y: f64) -> Result<()> {
        if !y.is_finite() {
            return Ok(());
        }
        while *self.values.last().unwrap() < y && self.x_hi() < X_CAP {
            let start_x = self.x_hi();
            let start_v = *self.values.last().unwrap();
            for k in 1..=LOG_PER_DECADE {
                let x = start_x * 10f64.powf(k as f64 / LOG_PER_DECADE as f64);
                let prev_x = *self.xs.last().unwrap();
                let prev_v = *self.values.last().unwrap();
                let inc = integrate(&*self.integrand, prev_x, x, self.seg_tol)?;
                self.xs.push(x);
                self.values.push(prev_v + inc);
            }
            self.sup = detect_sup(&self.xs, &self.values);
            if *self.values.last().unwrap() <= start_v {
                // no numeric progress over a whole decade
                break;
            }
        }
        Ok(())
    }

    /// Inverse map: the `x` with `|map(x) - y| <= 1e-10 * (1 + |y|)`.
    ///
    /// Starts from the tabulation bracket and refines with false position
    /// against the integrand. Arguments at or above `sup * (1 - 1e-9)`, or
    /// below the lowest tabulated value, are rejected as `DomainExceeded`.
    pub fn invert(&self, y: f64) -> Result<f64> {
        if y < self.values[0] || (self.sup.is_finite() && y >= self.sup * (1.0 - SUP_MARGIN)) {
            return Err(Error::DomainExceeded {
                value: y,
                sup: self.sup,
            });
        }
        if y > *self.values.last().unwrap() {
            // caller should have called ensure_covers; refuse to extrapolate
            return Err(Error::DomainExceeded {
                value: y,
                sup: self.sup,
            });
        }
        let idx = self.values.partition_point(|&v| v <= y);
        let hi_idx = idx.clamp(1, self.values.len() - 1);
        let lo_idx = hi_idx - 1;

        let tol = 0.9e-10 * (1.0 + y.abs());
        let (mut lo, mut hi) = (self.xs[lo_idx], self.xs[hi_idx]);
        let (mut flo, mut fhi) = (self.values[lo_idx], self.values[hi_idx]);
        if (flo - y).abs() <= tol {
            return Ok(lo);
        }
        if (fhi - y).abs() <= tol {
            return Ok(hi);
        }
        if fhi <= flo {
            // flat segment: any point maps to y within tolerance
            return Ok(lo);
        }

        for _ in 0..100 {
            let mut x = lo + (y - flo) * (hi - lo) / (fhi - flo);
            if !(x > lo && x < hi) {
                x = 0.5 * (lo + hi);
            }
            if !(x > lo && x < hi) {
                // bracket at float resolution; nearest endpoint is the answer
                return Ok(if (flo - y).abs() <= (fhi - y).abs() { lo } else { hi });
            }
            let fx =
                self.values[lo_idx] + integrate(&*self.integrand, self.xs[lo_idx], x, self.seg_tol)?;
            if (fx - y).abs() <= tol {
                return Ok(x);
            }
            if fx < y {
                lo = x;
                flo = fx;
            } else {
                hi = x;
                fhi = fx;
            }
        }
        Err(Error::Eval {
            what: format!("map inversion at {y} did not reach tolerance"),
        })
    }
}

/// Build `G(x) = integral of 1 / Phi(1 + W(s))` from 0 to `x_max`,
/// linear breakpoints on [0, 1] and logarithmic above.
pub fn build_g(w: &ScalarFn, phi: &ScalarFn, x_max: f64, tol: f64) -> Result<MonotoneMap> {
    let w = w.clone();
    let phi = phi.clone();
    let integrand = move |s: f64| -> Result<f64> {
        let ws = w.eval(s)?;
        let ps = phi.eval(1.0 + ws)?;
        if !(ps > 0.0) || !ps.is_finite() {
            return Err(Error::DegenerateIntegrand { x: s, value: ps });
        }
        Ok(1.0 / ps)
    };
    build_map(Box::new(integrand), 0.0, None, x_max, tol)
}

/// Build `H(x) = integral of 1 / h(s)` anchored at `x_anchor` (so
/// `H(x_anchor) = 0` exactly), tabulated down to about `x_anchor / 1e6`
/// (stopping early where `h` fails or loses positivity) and up to `x_max`.
pub fn build_h(h: &ScalarFn, x_anchor: f64, x_max: f64, tol: f64) -> Result<MonotoneMap> {
    assert!(x_anchor > 0.0 && x_anchor.is_finite());
    let h = h.clone();
    let integrand = move |s: f64| -> Result<f64> {
        let hs = h.eval(s)?;
        if !(hs > 0.0) || !hs.is_finite() {
            return Err(Error::DegenerateIntegrand { x: s, value: hs });
        }
        Ok(1.0 / hs)
    };
    build_map(
        Box::new(integrand),
        x_anchor,
        Some(x_anchor / 1e6),
        x_max,
        tol,
    )
}

fn build_map(
    integrand: Box<dyn Fn(f64) -> Result<f64> + Send + Sync>,
    anchor: f64,
    descend_to: Option<f64>,
    x_max: f64,
    tol: f64,
) -> Result<MonotoneMap> {
    assert!(x_max > anchor);

    // ascending breakpoints, anchor exclusive
    let mut ups: Vec<f64> = Vec::new();
    if anchor == 0.0 {
        let lin_hi = x_max.min(1.0);
        for i in 1..=64 {
            ups.push(lin_hi * i as f64 / 64.0);
        }
        if x_max > 1.0 {
            push_log_ladder(&mut ups, 1.0, x_max);
        }
    } else {
        push_log_ladder(&mut ups, anchor, x_max);
    }

    let mut xs = vec![anchor];
    let mut values = vec![0.0];
    for &x in &ups {
        let prev_x = *xs.last().unwrap();
        let prev_v = *values.last().unwrap();
        let inc = integrate(&*integrand, prev_x, x, tol)?;
        xs.push(x);
        values.push(prev_v + inc);
    }

    // descending part (anchored-above-zero maps only); failure truncates
    // instead of erroring because the range below the anchor is only needed
    // as far down as the data actually reaches
    let mut downs_x: Vec<f64> = Vec::new();
    let mut downs_v: Vec<f64> = Vec::new();
    let mut lower_truncated = None;
    if let Some(floor) = descend_to {
        let decades = (anchor / floor).log10().ceil().max(1.0) as usize;
        let mut cur_x = anchor;
        let mut cur_v = 0.0;
        'down: for k in 1..=decades * LOG_PER_DECADE {
            let x = anchor * 10f64.powf(-(k as f64) / LOG_PER_DECADE as f64);
            let probe = integrand(x);
            let inc = match probe {
                Ok(_) => integrate(&*integrand, x, cur_x, tol),
                Err(e) => Err(e),
            };
            match inc {
                Ok(v) => {
                    cur_v -= v;
                    cur_x = x;
                    downs_x.push(x);
                    downs_v.push(cur_v);
                }
                Err(_) => {
                    lower_truncated = Some(cur_x);
                    break 'down;
                }
            }
        }
    }

    let anchor_index = downs_x.len();
    if anchor_index > 0 {
        downs_x.reverse();
        downs_v.reverse();
        downs_x.extend_from_slice(&xs);
        downs_v.extend_from_slice(&values);
        xs = downs_x;
        values = downs_v;
    }

    let sup = detect_sup(&xs, &values);
    Ok(MonotoneMap {
        xs,
        values,
        anchor_index,
        sup,
        integrand,
        seg_tol: tol,
        lower_truncated,
    })
}

fn push_log_ladder(out: &mut Vec<f64>, from: f64, to: f64) {
    let mut k = 1usize;
    loop {
        let x = from * 10f64.powf(k as f64 / LOG_PER_DECADE as f64);
        if x >= to {
            out.push(to);
            break;
        }
        out.push(x);
        k += 1;
    }
}

/// Classify the tabulated tail: if the last decade contributed less than
/// `SUP_DETECT_REL` of the total and the per-decade increments decay
/// geometrically, extrapolate the finite limit; otherwise report infinity.
fn detect_sup(xs: &[f64], values: &[f64]) -> f64 {
    let x_end = *xs.last().unwrap();
    let v_end = *values.last().unwrap();
    let x1 = x_end / 10.0;
    let x2 = x_end / 100.0;
    if x2 <= xs[0] || x2 <= 0.0 {
        // not enough tail to judge
        return f64::INFINITY;
    }
    let v1 = interp_at(xs, values, x1);
    let v2 = interp_at(xs, values, x2);
    let inc_last = v_end - v1;
    let inc_prev = v1 - v2;
    let scale = v_end.abs().max(1e-300);
    if inc_last >= SUP_DETECT_REL * scale {
        return f64::INFINITY;
    }
    let r = if inc_prev > 0.0 { inc_last / inc_prev } else { 0.0 };
    if r >= 0.9 {
        return f64::INFINITY;
    }
    v_end + inc_last * r / (1.0 - r)
}

fn interp_at(xs: &[f64], values: &[f64], x: f64) -> f64 {
    let idx = xs.partition_point(|&v| v <= x);
    let seg = idx.clamp(1, xs.len() - 1) - 1;
    let (x0, x1) = (xs[seg], xs[seg + 1]);
    let w = ((x - x0) / (x1 - x0)).clamp(0.0, 1.0);
    values[seg] + w * (values[seg + 1] - values[seg])
}

/// 61 log-spaced lattice points on [1e-3, 1e3] used by every sampled
/// hypothesis check.
pub fn hypothesis_lattice() -> Vec<f64> {
    (0..61).map(|k| 10f64.powf((k - 30) as f64 / 10.0)).collect()
}

const PAIR_SLACK: f64 = 1e-9;
const MONO_SLACK: f64 = 1e-12;

/// Run every sampled hypothesis check applicable to the present functions.
/// Entries are report rows; required failures make the instance invalid,
/// advisory ones only annotate the report.
pub fn check_hypotheses(pack: &NonlinearPack) -> Vec<CheckEntry> {
    let lattice = hypothesis_lattice();
    let mut out = Vec::new();

    if let Some(w) = &pack.w {
        out.push(check_nondecreasing("W nondecreasing", w, &lattice));
        out.push(check_w_at_zero(w));
    }
    if let Some(phi) = &pack.phi {
        out.push(check_nondecreasing("Phi nondecreasing", phi, &lattice));
        out.push(check_positive(
            "Phi positive on [1, inf)",
            phi,
            lattice.iter().copied().filter(|&x| x >= 1.0),
            Severity::Required,
        ));
        out.push(check_positive(
            "Phi positive below 1 (not required by the theory)",
            phi,
            lattice.iter().copied().filter(|&x| x < 1.0),
            Severity::Advisory,
        ));
        out.push(check_submultiplicative(phi, &lattice));
    }
    if let (Some(h), Some(psi)) = (&pack.h, &pack.psi) {
        out.push(check_nondecreasing("h nondecreasing", h, &lattice));
        out.push(check_positive(
            "h positive for x > 0",
            h,
            lattice.iter().copied(),
            Severity::Required,
        ));
        out.push(check_class_h(h, psi, &lattice));
    }
    out
}

fn check_w_at_zero(w: &ScalarFn) -> CheckEntry {
    let entry = match w.eval(0.0) {
        Ok(v) if v >= -MONO_SLACK => CheckEntry::pass("W(0) >= 0", format!("W(0) = {v}")),
        Ok(v) => CheckEntry::fail("W(0) >= 0", Severity::Required, format!("W(0) = {v}")),
        Err(e) => CheckEntry::fail("W(0) >= 0", Severity::Required, format!("W(0) failed: {e}")),
    };
    entry.with_parts("nonnegative", "W(0)")
}

fn check_nondecreasing(name: &str, f: &ScalarFn, lattice: &[f64]) -> CheckEntry {
    let mut prev: Option<(f64, f64)> = None;
    for &x in lattice {
        let v = match f.eval(x) {
            Ok(v) => v,
            Err(e) => {
                return CheckEntry::fail(name, Severity::Required, format!("evaluation at {x} failed: {e}"))
            }
        };
        if !v.is_finite() {
            // values past overflow say nothing about ordering; stop scanning
            break;
        }
        if let Some((px, pv)) = prev {
            if v < pv - MONO_SLACK * (1.0 + pv.abs()) {
                return CheckEntry::fail(
                    name,
                    Severity::Required,
                    format!("decreases between x = {px} ({pv}) and x = {x} ({v})"),
                );
            }
        }
        prev = Some((x, v));
    }
    CheckEntry::pass(name, "61-point lattice on [1e-3, 1e3]".to_string())
}

fn check_positive(
    name: &str,
    f: &ScalarFn,
    points: impl Iterator<Item = f64>,
    severity: Severity,
) -> CheckEntry {
    for x in points {
        match f.eval(x) {
            Ok(v) if v > 0.0 => {}
            Ok(v) => {
                return CheckEntry::fail(name, severity, format!("value {v} at x = {x}"));
            }
            Err(e) => {
                return CheckEntry::fail(name, severity, format!("evaluation at {x} failed: {e}"));
            }
        }
    }
    CheckEntry::pass(name, "lattice scan".to_string())
}

fn check_submultiplicative(phi: &ScalarFn, lattice: &[f64]) -> CheckEntry {
    let name = "Phi submultiplicative";
    let mut skipped = 0usize;
    for &x in lattice {
        for &y in lattice {
            let (vx, vy, vxy) = match (phi.eval(x), phi.eval(y), phi.eval(x * y)) {
                (Ok(a), Ok(b), Ok(c)) => (a, b, c),
                (Err(e), _, _) | (_, Err(e), _) | (_, _, Err(e)) => {
                    return CheckEntry::fail(
                        name,
                        Severity::Required,
                        format!("evaluation failed near ({x}, {y}): {e}"),
                    )
                }
            };
            let rhs = vx * vy;
            if !vxy.is_finite() || !rhs.is_finite() {
                skipped += 1;
                continue;
            }
            if vxy > rhs * (1.0 + PAIR_SLACK) {
                return CheckEntry::fail(
                    name,
                    Severity::Required,
                    format!("Phi({x} * {y}) = {vxy} > Phi({x}) * Phi({y}) = {rhs}"),
                );
            }
        }
    }
    let detail = if skipped > 0 {
        format!("61x61 lattice pairs; {skipped} non-finite pairs skipped")
    } else {
        "61x61 lattice pairs".to_string()
    };
    CheckEntry::pass(name, detail)
}

fn check_class_h(h: &ScalarFn, psi: &ScalarFn, lattice: &[f64]) -> CheckEntry {
    let name = "class-H pair (h, Psi)";
    let mut skipped = 0usize;
    let mut failure: Option<String> = None;
    'scan: for &alpha in lattice {
        for &x in lattice {
            let (hax, pa, hx) = match (h.eval(alpha * x), psi.eval(alpha), h.eval(x)) {
                (Ok(a), Ok(b), Ok(c)) => (a, b, c),
                (Err(e), _, _) | (_, Err(e), _) | (_, _, Err(e)) => {
                    failure = Some(format!(
                        "evaluation failed near (alpha = {alpha}, x = {x}): {e}"
                    ));
                    break 'scan;
                }
            };
            let rhs = pa * hx;
            if !hax.is_finite() || !rhs.is_finite() {
                skipped += 1;
                continue;
            }
            if hax > rhs * (1.0 + PAIR_SLACK) {
                failure = Some(format!(
                    "h({alpha} * {x}) = {hax} > Psi({alpha}) * h({x}) = {rhs}"
                ));
                break 'scan;
            }
        }
    }
    let entry = match failure {
        Some(detail) => CheckEntry::fail(name, Severity::Required, detail),
        None => {
            let detail = if skipped > 0 {
                format!("61x61 lattice pairs; {skipped} non-finite pairs skipped")
            } else {
                "61x61 lattice pairs".to_string()
            };
            CheckEntry::pass(name, detail)
        }
    };
    entry.with_parts("class-H", "(h, Psi)")
}
