//! Discrete biharmonic Dirichlet problems on weighted graphs.
//!
//! The crate builds the μ-Laplacian and the biharmonic quadratic form on a
//! finite domain `Ω ⊂ V`, computes the spectral and embedding constants that
//! control the problem
//!
//! ```text
//! Δ²u = λu + |u|^{p-2}u + εf   in Ω,      u = 0 on ∂Ω,
//! ```
//!
//! and produces two distinct weak solutions: a small-norm local minimizer of
//! the energy and a mountain-pass critical point.
//!
//! Modules, bottom up:
//!
//! - [`graph`]: weighted graphs, domains and their boundaries.
//! - [`operators`]: Laplacian, gradient form, integrals, norms, and the
//!   assembled [`operators::BiharmonicForm`].
//! - [`spectrum`]: `λ₁(Ω)`, embedding constants, dual norms and the forcing
//!   threshold `ε̂₁`.
//! - [`functional`]: the energy, its first variation, and certification
//!   helpers.
//! - [`solvers`]: linear auxiliary solve, ball minimizer, mountain pass,
//!   Newton refinement and the two-solution pipeline.
//! - [`harness`]: run configuration, reports and ε sweeps used by the CLI.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod exec;
pub mod functional;
pub mod generators;
pub mod graph;
pub mod harness;
pub mod operators;
pub mod solvers;
pub mod spectrum;

pub use error::{Error, Result};
pub use exec::Execution;
pub use functional::ProblemParams;
pub use graph::{Domain, GraphFile, WeightedGraph};
pub use operators::{BiharmonicForm, VertexFunction};
pub use solvers::{CriticalPoint, PointKind, SolverConfig};
pub use spectrum::ConstantsReport;
