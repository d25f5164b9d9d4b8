//! Conic condition numbers of homogeneous systems `Ax <= 0, x != 0`.
//!
//! The crate computes the condition number `C(A) = 1/|cos theta(A)|` exactly
//! for small ambient dimension, evaluates closed-form tail and moment bounds,
//! and runs seeded Monte Carlo experiments under the uniform-sphere row model.
//!
//! Layout:
//! - [`sphere`]: spherical caps, sine-power integrals, cap measures.
//! - [`matrix`], [`linalg`], [`minnorm`], [`oracle`]: input matrices and the
//!   linear-algebra kernels.
//! - [`condition`]: feasibility classification and condition reports.
//! - [`perceptron`]: the relaxation solver.
//! - [`bounds`] and [`special`]: bound evaluators in log-space.
//! - [`montecarlo`]: samplers and statistical experiments.
//! - [`cli`]: the `conic` command-line front end.

pub mod bounds;
pub mod cli;
pub mod condition;
pub mod error;
pub mod linalg;
pub mod matrix;
pub mod minnorm;
pub mod montecarlo;
pub mod oracle;
pub mod perceptron;
pub mod special;
pub mod sphere;

pub use condition::{classify_and_condition, verify_report, ConditionReport, FeasibilityClass};
pub use error::{Error, Result};
pub use matrix::UnitRowMatrix;
