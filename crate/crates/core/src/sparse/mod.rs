//! Sparse storage and the reusable direct solver.

mod csr;
mod dense;
mod lu;

pub use csr::CsrMatrix;
pub use dense::{dense_solve, Columns};
pub use lu::Factorization;

/// Cost ratio of solving `j` problems individually against factoring once and
/// running `k` batched iterations.
///
/// `n` is the dof count, `p` the exponent of the build cost `n^p` and `cs` the
/// cost of one triangular solve, in the same units as `n^p`.
pub fn estimate_speedup(n: f64, j: f64, k: f64, p: f64, cs: f64) -> f64 {
    let build = n.powf(p);
    j * (build + cs) / (build + k * j * cs)
}
