use super::{BinFn, BinOp, Expr, ExprKind, UnaryFn, Var};
use crate::error::{Error, Result};

/// Values for the four mini-language variables. Unset variables stay
/// unbound, and reaching one during evaluation is an error.
#[derive(Debug, Clone, Copy, Default)]
pub struct Bindings {
    vals: [Option<f64>; 4],
}

impl Bindings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, var: Var, value: f64) -> Self {
        self.vals[var as usize] = Some(value);
        self
    }

    pub fn set(&mut self, var: Var, value: f64) {
        self.vals[var as usize] = Some(value);
    }

    pub fn get(&self, var: Var) -> Option<f64> {
        self.vals[var as usize]
    }
}

/// IEEE double evaluation. Domain violations (log/sqrt of a negative
/// argument, division by zero, NaN-producing pow) surface as errors rather
/// than NaN values, so downstream quadrature never sees NaN.
pub fn eval_expr(expr: &Expr, bindings: &Bindings) -> Result<f64> {
    match &expr.kind {
        ExprKind::Const(v) => Ok(*v),
        ExprKind::Variable(v) => bindings
            .get(*v)
            .ok_or(Error::UnboundVariable { name: v.name() }),
        ExprKind::Neg(inner) => Ok(-eval_expr(inner, bindings)?),
        ExprKind::Binary { op, lhs, rhs } => {
            let l = eval_expr(lhs, bindings)?;
            let r = eval_expr(rhs, bindings)?;
            let v = match op {
                BinOp::Add => l + r,
                BinOp::Sub => l - r,
                BinOp::Mul => l * r,
                BinOp::Div => {
                    if r == 0.0 {
                        return Err(Error::Eval {
                            what: format!("division by zero ({l} / 0)"),
                        });
                    }
                    l / r
                }
                BinOp::Pow => pow(l, r)?,
            };
            finite_or_err(v, op.symbol())
        }
        ExprKind::Call1 { f, arg } => {
            let x = eval_expr(arg, bindings)?;
            let v = match f {
                UnaryFn::Exp => x.exp(),
                UnaryFn::Log => {
                    if x <= 0.0 {
                        return Err(Error::Eval {
                            what: format!("log domain (argument {x})"),
                        });
                    }
                    x.ln()
                }
                UnaryFn::Sqrt => {
                    if x < 0.0 {
                        return Err(Error::Eval {
                            what: format!("sqrt domain (argument {x})"),
                        });
                    }
                    x.sqrt()
                }
                UnaryFn::Sin => x.sin(),
                UnaryFn::Cos => x.cos(),
                UnaryFn::Abs => x.abs(),
            };
            finite_or_err(v, f.name())
        }
        ExprKind::Call2 { f, lhs, rhs } => {
            let l = eval_expr(lhs, bindings)?;
            let r = eval_expr(rhs, bindings)?;
            let v = match f {
                BinFn::Min => l.min(r),
                BinFn::Max => l.max(r),
                BinFn::Pow => pow(l, r)?,
            };
            finite_or_err(v, f.name())
        }
    }
}

fn pow(base: f64, exponent: f64) -> Result<f64> {
    let v = base.powf(exponent);
    if v.is_nan() {
        return Err(Error::Eval {
            what: format!("pow domain (base {base}, exponent {exponent})"),
        });
    }
    Ok(v)
}

// Overflow to infinity is tolerated (the caller sees an honestly huge value);
// NaN is not. inf - inf and 0 * inf are the cases this catches.
fn finite_or_err(v: f64, op: &str) -> Result<f64> {
    if v.is_nan() {
        return Err(Error::Eval {
            what: format!("NaN result from {op}"),
        });
    }
    Ok(v)
}
