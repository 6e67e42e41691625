//! Crate-wide error type.
//!
//! One enum covers the whole pipeline: expression handling, quadrature,
//! monotone-map construction and inversion, instance validation, the Picard
//! solver, and scenario I/O. Variants carry enough payload to point at the
//! offending byte, grid node, or hypothesis by name.

use std::fmt;
use std::io;
use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug)]
pub enum Error {
    /// Malformed expression source. `offset` is a byte offset into the input.
    Parse { offset: usize, expected: String },
    /// Evaluation reached a variable with no bound value.
    UnboundVariable { name: &'static str },
    /// Evaluation hit a domain violation (log/sqrt of a negative argument,
    /// division by zero, NaN-producing pow) instead of propagating NaN.
    Eval { what: String },
    /// A hypothesis required by the declared inequality kind does not hold.
    InvalidInstance {
        hypothesis: String,
        subject: String,
        detail: String,
    },
    /// Adaptive quadrature subdivided past its depth limit.
    MaxDepthExceeded { lo: f64, hi: f64 },
    /// A monotone-map integrand was non-positive or non-finite where it must
    /// be integrable.
    DegenerateIntegrand { x: f64, value: f64 },
    /// Argument to a map inversion lies outside the invertible range.
    DomainExceeded { value: f64, sup: f64 },
    /// The domain condition fails already at the first grid step past `a`.
    EmptyDomain,
    /// Picard iteration ran out of iterations before meeting tolerance.
    NotConverged { iterations: usize, last_delta: f64 },
    /// Picard iteration increments grew over consecutive sweeps.
    Diverging { iteration: usize, delta: f64 },
    /// Filesystem failure while reading a scenario or writing outputs.
    Io { path: PathBuf, source: io::Error },
    /// Scenario-level problem: unknown kind, missing field, bad value.
    Schema { message: String },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Parse { offset, expected } => {
                write!(f, "parse error at byte {offset}: expected {expected}")
            }
            Error::UnboundVariable { name } => write!(f, "unbound variable: {name}"),
            Error::Eval { what } => write!(f, "evaluation error: {what}"),
            Error::InvalidInstance {
                hypothesis,
                subject,
                detail,
            } => {
                write!(f, "{hypothesis} hypothesis violated: {subject} ({detail})")
            }
            Error::MaxDepthExceeded { lo, hi } => {
                write!(
                    f,
                    "adaptive quadrature exceeded maximum depth on [{lo}, {hi}]"
                )
            }
            Error::DegenerateIntegrand { x, value } => {
                write!(f, "integrand degenerate at x = {x} (value {value})")
            }
            Error::DomainExceeded { value, sup } => {
                write!(
                    f,
                    "inversion argument {value} outside map domain (sup = {sup})"
                )
            }
            Error::EmptyDomain => {
                write!(f, "domain condition fails at the first grid step")
            }
            Error::NotConverged {
                iterations,
                last_delta,
            } => {
                write!(
                    f,
                    "no convergence after {iterations} iterations (last sup-change {last_delta:e})"
                )
            }
            Error::Diverging { iteration, delta } => {
                write!(
                    f,
                    "iteration diverging at sweep {iteration} (sup-change {delta:e})"
                )
            }
            Error::Io { path, source } => {
                write!(f, "i/o error on {}: {source}", path.display())
            }
            Error::Schema { message } => write!(f, "scenario error: {message}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io { source, .. } => Some(source),
            _ => None,
        }
    }
}
