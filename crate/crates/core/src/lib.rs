//! Uniform asymptotic expansions of the confluent hypergeometric functions
//! `M(a,b,z)` and `U(a,b,z)` for large `z`, with error checks against
//! independent high-precision reference evaluations.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod coefficients;
pub mod dd;
pub mod error;
pub mod evaluation;
pub mod oracle;
#[cfg(test)]
mod qd;
pub mod real;
pub mod scaling;
pub mod series;
pub mod verify;

pub use coefficients::{coefficient_set, tilde_coefficients, CoefficientSet, Which};
pub use error::{Error, Result};
pub use evaluation::{eval_m, eval_m_scaled, eval_u, eval_u_scaled, evaluate, EvalOptions, ExpansionResult, ValueStatus};
pub use scaling::{saddle, scale, Parameters, SaddleData, ScaledParameters};
