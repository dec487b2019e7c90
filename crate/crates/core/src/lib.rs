//! Cheeger constants and Cheeger sets of two-component Gaussian mixtures
//! `μ = p·γ(·−a) + (1−p)·γ(·−b)` in any dimension.
//!
//! The problem reduces to a one-dimensional minimization of `(log Q)'` over
//! `[0, r*]`; optimal sets are half-spaces perpendicular to `b − a`.
//! [`oracle`] provides independent checks (exact formulas for tilted
//! half-spaces, Monte-Carlo estimates for other sets) and [`scanner`]
//! explores the `(p, d)` parameter plane.

pub mod cli;
pub mod error;
pub mod mixture;
pub mod oracle;
mod roots;
pub mod scanner;
pub mod solver;
pub mod special_fn;

pub use error::{Error, Result};
pub use mixture::{canonicalize, Canonical, CanonicalMixture, MixtureSpec};
pub use solver::{cheeger, find_minimizers, CheegerSolution, HalfSpace, Side};
pub use special_fn::Probability;
