//! Uniform grids over the working interval.
//!
//! Every quantity in the pipeline is sampled on one shared uniform grid so
//! that prefix-sum quadrature, bound evaluation and the equality-case solver
//! all see the same nodes. Node counts are restricted to `2^k + 1` which makes
//! `refine` insert midpoints exactly and keeps convergence studies honest: a
//! refined grid contains the coarse one as a subset.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    lo: f64,
    hi: f64,
    n: usize,
}

impl Grid {
    /// `n` must be at least 3 with `n - 1` a power of two, and `lo < hi`.
    pub fn new(lo: f64, hi: f64, n: usize) -> Result<Grid> {
        if !lo.is_finite() || !hi.is_finite() || lo >= hi {
            return Err(Error::Schema {
                message: format!("grid interval [{lo}, {hi}] is not a nondegenerate finite interval"),
            });
        }
        if n < 3 || !(n - 1).is_power_of_two() {
            return Err(Error::Schema {
                message: format!("grid size {n} is not of the form 2^k + 1 with k >= 1"),
            });
        }
        Ok(Grid { lo, hi, n })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> f64 {
        (self.hi - self.lo) / (self.n - 1) as f64
    }

    /// i-th node; endpoints are reproduced exactly.
    pub fn node(&self, i: usize) -> f64 {
        debug_assert!(i < self.n);
        if i == 0 {
            self.lo
        } else if i == self.n - 1 {
            self.hi
        } else {
            self.lo + (self.hi - self.lo) * i as f64 / (self.n - 1) as f64
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.node(i)).collect()
    }

    /// Index of the lower node of the cell containing `t`, clamped so the
    /// returned cell `[i, i+1]` always exists. Values outside the interval
    /// clamp to the first or last cell.
    pub fn locate(&self, t: f64) -> usize {
        let raw = (t - self.lo) / (self.hi - self.lo) * (self.n - 1) as f64;
        let i = raw.floor();
        if i < 0.0 {
            0
        } else {
            (i as usize).min(self.n - 2)
        }
    }

    /// Largest node index whose node is `<= t` (within one ulp-scale slack so
    /// that `t` equal to a node up to roundoff maps to that node). Returns
    /// `None` when `t` lies below the first node.
    pub fn floor_index(&self, t: f64) -> Option<usize> {
        let slack = 1e-12 * (1.0 + self.hi.abs() + self.lo.abs());
        if t < self.lo - slack {
            return None;
        }
        let cell = self.locate(t);
        if t >= self.node(cell + 1) - slack {
            Some((cell + 1).min(self.n - 1))
        } else {
            Some(cell)
        }
    }

    /// Linear interpolation of per-node samples at an off-grid point.
    /// `samples.len()` must equal the grid length.
    pub fn interp(&self, samples: &[f64], t: f64) -> f64 {
        debug_assert_eq!(samples.len(), self.n);
        let i = self.locate(t);
        let x0 = self.node(i);
        let x1 = self.node(i + 1);
        let w = ((t - x0) / (x1 - x0)).clamp(0.0, 1.0);
        samples[i] + w * (samples[i + 1] - samples[i])
    }

    /// Same interval with `2n - 1` nodes; even indices coincide with the
    /// parent's nodes.
    pub fn refine(&self) -> Grid {
        Grid {
            lo: self.lo,
            hi: self.hi,
            n: 2 * self.n - 1,
        }
    }

    /// Apply `f` at every node.
    pub fn sample(&self, mut f: impl FnMut(f64) -> Result<f64>) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(self.n);
        for i in 0..self.n {
            out.push(f(self.node(i))?);
        }
        Ok(out)
    }
}
