//! Certified upper bounds for retarded Gronwall-Bihari integral inequalities.
//!
//! The crate computes explicit pointwise bounds for unknown functions that
//! satisfy integral inequalities with delayed (retarded) upper limits, and
//! cross-checks each bound by solving the corresponding equality case with a
//! Picard iteration. The public surface is organised as a pipeline:
//!
//! * [`expr`] parses the arithmetic mini-language used in scenario files.
//! * [`grid`] and [`quad`] provide the shared discretisation and quadrature.
//! * [`funcs`] wraps parsed expressions as sampled scalar/bivariate functions.
//! * [`instance`] assembles a validated problem instance.
//! * [`nonlinear`] builds the monotone integral transforms and their inverses.
//! * [`bounds`] evaluates the bound formulas and locates the certification
//!   horizon `t_star`.
//! * [`solver`] solves the equality case and checks dominance.
//! * [`scenario`] and [`runner`] tie everything to the TOML scenario format
//!   and the command-line front end.

pub mod bounds;
pub mod error;
pub mod expr;
pub mod funcs;
pub mod grid;
pub mod instance;
pub mod nonlinear;
pub mod quad;
pub mod runner;
pub mod scenario;
pub mod solver;

pub use error::{Error, Result};
