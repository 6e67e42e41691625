//! Quadrature: adaptive Simpson for one-off integrals and cumulative
//! trapezoid sums for everything evaluated on the shared grid.
//!
//! The adaptive rule is the classic bisection scheme with Richardson
//! correction. The acceptance threshold is fixed from the first whole-interval
//! estimate (`eps = tol * (1 + |S0|)`) and halves with each bisection so the
//! per-subinterval errors sum to about `eps` globally.

use crate::error::{Error, Result};
use crate::grid::Grid;

const MAX_DEPTH: u32 = 40;

/// Adaptive Simpson integral of `f` over `[lo, hi]`.
///
/// `lo > hi` integrates the reversed interval with a sign flip; `lo == hi`
/// is exactly zero without evaluating `f`. Non-finite integrand values are
/// rejected as [`Error::DegenerateIntegrand`] and failure to reach the
/// tolerance within the depth limit as [`Error::MaxDepthExceeded`].
pub fn integrate<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if lo == hi {
        return Ok(0.0);
    }
    let (a, b, sign) = if lo < hi { (lo, hi, 1.0) } else { (hi, lo, -1.0) };
    let fa = sample(&mut f, a)?;
    let fb = sample(&mut f, b)?;
    let m = 0.5 * (a + b);
    let fm = sample(&mut f, m)?;
    let s0 = simpson(a, b, fa, fm, fb);
    let eps = tol * (1.0 + s0.abs());
    let v = adapt(&mut f, a, m, b, fa, fm, fb, s0, eps, MAX_DEPTH)?;
    Ok(sign * v)
}

fn sample<F>(f: &mut F, x: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let v = f(x)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::DegenerateIntegrand { x, value: v })
    }
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adapt<F>(
    f: &mut F,
    a: f64,
    m: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    eps: f64,
    depth: u32,
) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    if !(a < lm && lm < m && m < rm && rm < b) {
        // interval shrank to float resolution without converging
        return Err(Error::MaxDepthExceeded { lo: a, hi: b });
    }
    let flm = sample(f, lm)?;
    let frm = sample(f, rm)?;
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let s2 = left + right;
    let diff = s2 - whole;
    if diff.abs() <= 15.0 * eps {
        return Ok(s2 + diff / 15.0);
    }
    if depth == 0 {
        return Err(Error::MaxDepthExceeded { lo: a, hi: b });
    }
    let half = 0.5 * eps;
    let l = adapt(f, a, lm, m, fa, flm, fm, left, half, depth - 1)?;
    let r = adapt(f, m, rm, b, fm, frm, fb, right, half, depth - 1)?;
    Ok(l + r)
}

/// Cumulative trapezoid sums of per-node samples: `out[i]` approximates the
/// integral from the first node to node `i`, with `out[0] == 0` exactly.
pub fn cumtrap(grid: &Grid, samples: &[f64]) -> Vec<f64> {
    assert_eq!(samples.len(), grid.len());
    let h = grid.step();
    let mut out = Vec::with_capacity(grid.len());
    out.push(0.0);
    let mut acc = 0.0;
    for i in 1..grid.len() {
        acc += 0.5 * h * (samples[i - 1] + samples[i]);
        out.push(acc);
    }
    out
}

/// Trapezoid integral over the whole grid.
pub fn trapz(grid: &Grid, samples: &[f64]) -> f64 {
    assert_eq!(samples.len(), grid.len());
    let h = grid.step();
    let mut acc = 0.0;
    for i in 1..grid.len() {
        acc += 0.5 * h * (samples[i - 1] + samples[i]);
    }
    acc
}

/// A sampled antiderivative: trapezoid prefix sums over a grid, evaluable at
/// off-grid points by linear interpolation. This is how every retarded upper
/// limit `alpha(t)` enters an integral: build the prefix once, evaluate at
/// the delayed point.
#[derive(Debug, Clone)]
pub struct CumulativeFn {
    grid: Grid,
    prefix: Vec<f64>,
}

impl CumulativeFn {
    pub fn new(grid: &Grid, samples: &[f64]) -> CumulativeFn {
        CumulativeFn {
            grid: grid.clone(),
            prefix: cumtrap(grid, samples),
        }
    }

    /// Take ownership of already-computed prefix sums.
    pub fn from_prefix(grid: &Grid, prefix: Vec<f64>) -> CumulativeFn {
        assert_eq!(prefix.len(), grid.len());
        CumulativeFn {
            grid: grid.clone(),
            prefix,
        }
    }

    /// Integral from the interval start to `t`. Arguments are clamped into
    /// the grid interval; delay validation upstream guarantees in-range
    /// arguments up to roundoff.
    pub fn eval(&self, t: f64) -> f64 {
        let t = t.clamp(self.grid.lo(), self.grid.hi());
        self.grid.interp(&self.prefix, t)
    }

    pub fn at_node(&self, i: usize) -> f64 {
        self.prefix[i]
    }

    pub fn prefix(&self) -> &[f64] {
        &self.prefix
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }
}
