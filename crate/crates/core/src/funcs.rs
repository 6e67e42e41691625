//! Function data of a problem instance: scalar coefficients, bivariate
//! kernels, and retardation (delay) functions.
//!
//! Functions are either expression-backed (parsed from scenario text) or
//! sample-backed (piecewise linear on a grid). Validation happens by grid
//! sampling only; a passing check certifies "consistent with the hypotheses
//! at resolution h", which is the strongest statement a sampled check can
//! make and is recorded as such in reports.

use crate::error::{Error, Result};
use crate::expr::{eval_expr, Bindings, Expr, Var};
use crate::grid::Grid;

/// Relative slack applied to nonnegativity and monotonicity checks so that
/// round-off in expressions like `sin(t)^2 + cos(t)^2 - 1` does not reject
/// a legitimate instance.
pub const CHECK_SLACK: f64 = 1e-12;

#[derive(Debug, Clone)]
enum ScalarBacking {
    Expr { ast: Expr, var: Var },
    Samples { grid: Grid, values: Vec<f64> },
    Const(f64),
}

/// Real function of one variable, evaluable anywhere on the working interval.
#[derive(Debug, Clone)]
pub struct ScalarFn {
    backing: ScalarBacking,
    nonneg: bool,
}

impl ScalarFn {
    /// Wrap an expression. Only `var` may occur free in it.
    pub fn from_expr(ast: Expr, var: Var) -> Result<ScalarFn> {
        for v in ast.variables().iter() {
            if v != var {
                return Err(Error::Schema {
                    message: format!(
                        "expression must be a function of '{}' alone, but uses '{}'",
                        var.name(),
                        v.name()
                    ),
                });
            }
        }
        Ok(ScalarFn {
            backing: ScalarBacking::Expr { ast, var },
            nonneg: false,
        })
    }

    pub fn from_const(value: f64) -> ScalarFn {
        ScalarFn {
            backing: ScalarBacking::Const(value),
            nonneg: value >= 0.0,
        }
    }

    pub fn from_samples(grid: Grid, values: Vec<f64>) -> ScalarFn {
        assert_eq!(values.len(), grid.len());
        ScalarFn {
            backing: ScalarBacking::Samples { grid, values },
            nonneg: false,
        }
    }

    /// Record a passed nonnegativity check.
    pub fn certify_nonneg(&mut self) {
        self.nonneg = true;
    }

    pub fn is_certified_nonneg(&self) -> bool {
        self.nonneg
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        match &self.backing {
            ScalarBacking::Expr { ast, var } => eval_expr(ast, &Bindings::new().with(*var, x)),
            ScalarBacking::Samples { grid, values } => Ok(grid.interp(values, x)),
            ScalarBacking::Const(v) => Ok(*v),
        }
    }

    pub fn sample(&self, grid: &Grid) -> Result<Vec<f64>> {
        grid.sample(|x| self.eval(x))
    }
}

/// Square matrix of kernel samples over grid node pairs, row-major; row index
/// is the first argument, column the second.
#[derive(Debug, Clone)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn from_rows(n: usize, data: Vec<f64>) -> Matrix {
        assert_eq!(data.len(), n * n);
        Matrix { n, data }
    }

    pub fn constant(n: usize, value: f64) -> Matrix {
        Matrix {
            n,
            data: vec![value; n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn values(&self) -> &[f64] {
        &self.data
    }
}

#[derive(Debug, Clone)]
enum BivariateBacking {
    Expr { ast: Expr, vars: (Var, Var) },
    Samples { grid: Grid, matrix: Matrix },
    Const(f64),
}

/// Real function of two variables.
#[derive(Debug, Clone)]
pub struct BivariateFn {
    backing: BivariateBacking,
    monotone_first: bool,
}

impl BivariateFn {
    /// Wrap an expression whose free variables are a subset of
    /// `{vars.0, vars.1}`. The pair also fixes the argument order for
    /// [`BivariateFn::eval`].
    pub fn from_expr(ast: Expr, vars: (Var, Var)) -> Result<BivariateFn> {
        assert_ne!(vars.0, vars.1);
        for v in ast.variables().iter() {
            if v != vars.0 && v != vars.1 {
                return Err(Error::Schema {
                    message: format!(
                        "expression must be a function of '{}' and '{}' alone, but uses '{}'",
                        vars.0.name(),
                        vars.1.name(),
                        v.name()
                    ),
                });
            }
        }
        Ok(BivariateFn {
            backing: BivariateBacking::Expr { ast, vars },
            monotone_first: false,
        })
    }

    pub fn from_const(value: f64) -> BivariateFn {
        BivariateFn {
            backing: BivariateBacking::Const(value),
            monotone_first: true,
        }
    }

    /// Constant zero, the stand-in for kernels a kind does not use.
    pub fn zero() -> BivariateFn {
        BivariateFn::from_const(0.0)
    }

    pub fn from_samples(grid: Grid, matrix: Matrix) -> BivariateFn {
        assert_eq!(matrix.n(), grid.len());
        BivariateFn {
            backing: BivariateBacking::Samples { grid, matrix },
            monotone_first: false,
        }
    }

    pub fn certify_monotone_first(&mut self) {
        self.monotone_first = true;
    }

    pub fn is_certified_monotone_first(&self) -> bool {
        self.monotone_first
    }

    pub fn eval(&self, first: f64, second: f64) -> Result<f64> {
        match &self.backing {
            BivariateBacking::Expr { ast, vars } => {
                let b = Bindings::new().with(vars.0, first).with(vars.1, second);
                eval_expr(ast, &b)
            }
            BivariateBacking::Samples { grid, matrix } => {
                // bilinear interpolation between the four surrounding nodes
                let i = grid.locate(first);
                let j = grid.locate(second);
                let wi = ((first - grid.node(i)) / grid.step()).clamp(0.0, 1.0);
                let wj = ((second - grid.node(j)) / grid.step()).clamp(0.0, 1.0);
                let v00 = matrix.get(i, j);
                let v01 = matrix.get(i, j + 1);
                let v10 = matrix.get(i + 1, j);
                let v11 = matrix.get(i + 1, j + 1);
                Ok(v00 * (1.0 - wi) * (1.0 - wj)
                    + v01 * (1.0 - wi) * wj
                    + v10 * wi * (1.0 - wj)
                    + v11 * wi * wj)
            }
            BivariateBacking::Const(v) => Ok(*v),
        }
    }

    /// Samples at all node pairs: entry `(i, j)` is the value at
    /// `(node_i, node_j)`.
    pub fn sample_matrix(&self, grid: &Grid) -> Result<Matrix> {
        let n = grid.len();
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            let ti = grid.node(i);
            for j in 0..n {
                data.push(self.eval(ti, grid.node(j))?);
            }
        }
        Ok(Matrix::from_rows(n, data))
    }
}

/// A validated retardation function: `lo <= alpha(t_i) <= t_i` at every node
/// and nondecreasing node samples (up to a 1e-12 slack).
#[derive(Debug, Clone)]
pub struct DelayFn {
    inner: ScalarFn,
    samples: Vec<f64>,
    name: String,
}

impl DelayFn {
    /// Sample without the hypothesis checks, for UNCHECKED runs. Evaluation
    /// failures still propagate; there is nothing to compute without samples.
    pub fn new_unchecked(name: &str, src: &ScalarFn, grid: &Grid) -> Result<DelayFn> {
        Ok(DelayFn {
            inner: src.clone(),
            samples: src.sample(grid)?,
            name: name.to_string(),
        })
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        self.inner.eval(t)
    }

    /// Cached node samples, index-aligned with the validation grid.
    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn at_node(&self, i: usize) -> f64 {
        self.samples[i]
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

/// Check the delay hypotheses of `src` on `grid` and package the certificate.
/// `name` labels the function ("alpha" or "beta") in error messages.
pub fn validate_delay(name: &str, src: &ScalarFn, grid: &Grid) -> Result<DelayFn> {
    let samples = src.sample(grid)?;
    let lo = grid.lo();
    for (i, &v) in samples.iter().enumerate() {
        let t = grid.node(i);
        let slack = CHECK_SLACK * (1.0 + t.abs() + lo.abs());
        if v < lo - slack || v > t + slack {
            return Err(Error::InvalidInstance {
                hypothesis: "range".into(),
                subject: name.into(),
                detail: format!("{name}({t}) = {v} is outside [{lo}, {t}]"),
            });
        }
    }
    for i in 1..samples.len() {
        if samples[i] < samples[i - 1] - CHECK_SLACK {
            return Err(Error::InvalidInstance {
                hypothesis: "monotone".into(),
                subject: name.into(),
                detail: format!(
                    "{name} decreases between t = {} and t = {} ({} -> {})",
                    grid.node(i - 1),
                    grid.node(i),
                    samples[i - 1],
                    samples[i]
                ),
            });
        }
    }
    Ok(DelayFn {
        inner: src.clone(),
        samples,
        name: name.to_string(),
    })
}
