//! Split-operator fixed-point solver for families of parameter-dependent and
//! random convection-diffusion problems.
//!
//! Every problem in a family shares one parameter-independent operator `A0`,
//! which is assembled and factored once. The parameter-dependent remainder
//! `A1` is moved to the right-hand side and the family is advanced together by
//! Picard iteration, so each step costs one batched triangular solve.
//!
//! The crate is layered bottom-up:
//!
//! - [`mesh`]: interval and structured triangular meshes.
//! - [`sparse`]: CSR storage, banded LU with many right-hand sides.
//! - [`fem`]: P1/P2 spaces, assembly, Dirichlet elimination and norms.
//! - [`splitter`]: the fixed-point engine and its diagnostics.
//! - [`grouping`]: clustering of scalar samples under a relative metric.
//! - [`experiments`]: the problem catalog and table pipelines.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiments;
pub mod fem;
pub mod grouping;
pub mod mesh;
pub mod sparse;
pub mod splitter;

pub use error::{Error, Result};
