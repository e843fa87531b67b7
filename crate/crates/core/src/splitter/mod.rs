//! Factor-once, solve-many fixed-point engine for `A = A0 + A1(omega)`.
//!
//! `A0` is factored a single time; every sample is advanced by
//! `A0 U_n = f - A1 U_{n-1}` starting from `A0 U_0 = f`.

mod iterate;
mod rho;
mod system;

pub use iterate::{sci, IterateOptions, IterationHistory, IterationOutcome, StopRule};
pub use rho::{above_floor, compute_rho, compute_rho_hat, estimate_rate, RhoEstimate};
pub use system::{build_split_system, check_elliptic, Load, Perturbation, SampleTerms, SplitSystem};
