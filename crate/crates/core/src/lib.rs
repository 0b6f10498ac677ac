//! Numerical certification toolkit for third-order nonlinear vector ODEs
//!
//! ```text
//! X''' + F(X, X', X'') X'' + G(X, X') X' + H(X) = P(t, X, X', X'')
//! ```
//!
//! written as the first-order system `X' = Y`, `Y' = Z`,
//! `Z' = −F Z − G Y − H(X) + P`.
//!
//! The crate samples the spectral hypotheses of an existence theorem for
//! periodic solutions over a box, evaluates the Lyapunov function used in its
//! proof, integrates trajectories, and locates periodic orbits by shooting.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod error;
pub mod hypothesis;
pub mod integrate;
pub mod linalg;
pub mod lyapunov;
pub mod orbits;
mod quadrature;
pub mod report;
pub mod system;

pub use error::{Error, Result};
