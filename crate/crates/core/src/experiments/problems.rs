use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fem::{ScalarField, VectorField};
use crate::mesh::Side;
use crate::splitter::SampleTerms;

/// Perturbation amplitudes of the five deterministic 1-D problems.
pub const TEST1_EPS: [f64; 5] = [0.1035, 0.0727, -0.0303, 0.0294, -0.0787];

/// Coefficients, data and closed-form solution of one sample.
#[derive(Debug, Clone)]
pub struct Manufactured {
    pub a: ScalarField,
    pub b: Option<VectorField>,
    pub f: ScalarField,
    pub exact: ScalarField,
    pub exact_grad: VectorField,
}

impl Manufactured {
    pub fn terms(&self) -> SampleTerms {
        SampleTerms { a: self.a.clone(), b: self.b.clone(), f: self.f.clone(), neumann: Vec::new() }
    }
}

/// Mean of `a(x)` on the five problems is `1 + x + eps_bar sin x`.
pub fn test1_mean_eps() -> f64 {
    TEST1_EPS.iter().sum::<f64>() / TEST1_EPS.len() as f64
}

/// `a = 1 + x + eps_j sin x`, `u = x(x-1) + sin(20 pi x)/2 + eps_j sin(40 pi x)`,
/// `f = -(a u')'`; `j` is 1-based.
pub fn test1_problem(j: usize) -> Result<Manufactured> {
    if !(1..=TEST1_EPS.len()).contains(&j) {
        return Err(Error::InvalidArgument(format!("problem index {j} outside 1..=5")));
    }
    let e = TEST1_EPS[j - 1];
    let u = move |x: f64| x * (x - 1.0) + 0.5 * (20.0 * PI * x).sin() + e * (40.0 * PI * x).sin();
    let du = move |x: f64| 2.0 * x - 1.0 + 10.0 * PI * (20.0 * PI * x).cos() + 40.0 * PI * e * (40.0 * PI * x).cos();
    let d2u =
        move |x: f64| 2.0 - 200.0 * PI * PI * (20.0 * PI * x).sin() - 1600.0 * PI * PI * e * (40.0 * PI * x).sin();
    Ok(Manufactured {
        a: ScalarField::from_fn_1d(move |x| 1.0 + x + e * x.sin()),
        b: None,
        f: ScalarField::from_fn_1d(move |x| -((1.0 + e * x.cos()) * du(x) + (1.0 + x + e * x.sin()) * d2u(x))),
        exact: ScalarField::from_fn_1d(u),
        exact_grad: VectorField::along_x(ScalarField::from_fn_1d(du)),
    })
}

/// Disk conductivity and bottom flux of the 2-D piecewise problem on
/// `[-1, 1]^2`: `a = mu1` in the disk, 1 outside, zero source.
pub fn test2_problem(mu: [f64; 2]) -> Result<SampleTerms> {
    if !(0.1..=10.0).contains(&mu[0]) || !(-1.0..=1.0).contains(&mu[1]) {
        return Err(Error::InvalidArgument(format!("mu = {mu:?} outside [0.1, 10] x [-1, 1]")));
    }
    Ok(SampleTerms {
        a: ScalarField::Subdomain([1.0, mu[0]]),
        b: None,
        f: ScalarField::constant(0.0),
        neumann: vec![(Side::Bottom, ScalarField::constant(mu[1]))],
    })
}

/// `c(eps) = E[X / (2 (1 + eps X))]` for `X ~ U(0, 1)`.
pub fn expectation_coefficient(eps: f64) -> f64 {
    if eps < 1e-2 {
        // (eps - ln(1 + eps)) / eps^2 = sum_k (-1)^k eps^(k-2) / k
        let s: f64 = (2..16).map(|k| (-eps).powi(k - 2) / f64::from(k)).sum();
        0.5 * s
    } else {
        0.5 * (1.0 / eps - eps.ln_1p() / (eps * eps))
    }
}

/// Per-sample profile factor `X / (2 (1 + eps X))`.
pub fn sample_coefficient(x: f64, eps: f64) -> f64 {
    x / (2.0 * (1.0 + eps * x))
}

fn parabola(c: f64) -> (ScalarField, VectorField) {
    (
        ScalarField::from_fn_1d(move |x| c * (x - x * x)),
        VectorField::along_x(ScalarField::from_fn_1d(move |x| c * (1.0 - 2.0 * x))),
    )
}

fn bubble(c: f64) -> (ScalarField, VectorField) {
    (
        ScalarField::from_fn(move |p| c * (p[0] - p[0] * p[0]) * (p[1] - p[1] * p[1])),
        VectorField::from_fn(move |p| {
            let (x, y) = (p[0], p[1]);
            [c * (1.0 - 2.0 * x) * (y - y * y), c * (x - x * x) * (1.0 - 2.0 * y)]
        }),
    )
}

/// `-((1 + eps X) u')' = X` on `(0, 1)` with zero end values, one entry per draw.
pub fn random_diffusion_problem(x_draws: &[f64], eps: f64) -> Vec<Manufactured> {
    x_draws
        .iter()
        .map(|&x| {
            let (exact, exact_grad) = parabola(sample_coefficient(x, eps));
            Manufactured {
                a: ScalarField::constant(1.0 + eps * x),
                b: None,
                f: ScalarField::constant(x),
                exact,
                exact_grad,
            }
        })
        .collect()
}

/// `E[u]` and its gradient for the 1-D random problems.
pub fn random_diffusion_expectation(eps: f64) -> (ScalarField, VectorField) {
    parabola(expectation_coefficient(eps))
}

/// `-(a u')' + b u' = X (51 - 100 x)` with `a = 1 + eps X`, `b = 100 a`.
pub fn convdiff_1d_problem(x_draws: &[f64], eps: f64) -> Vec<Manufactured> {
    x_draws
        .iter()
        .map(|&x| {
            let (exact, exact_grad) = parabola(sample_coefficient(x, eps));
            let a = 1.0 + eps * x;
            Manufactured {
                a: ScalarField::constant(a),
                b: Some(VectorField::Constant([100.0 * a, 0.0])),
                f: ScalarField::from_fn_1d(move |t| x * (51.0 - 100.0 * t)),
                exact,
                exact_grad,
            }
        })
        .collect()
}

/// Recirculating wind `(2y(1 - x^2), -2x(1 - y^2))`.
pub fn wind(p: [f64; 2]) -> [f64; 2] {
    let (x, y) = (p[0], p[1]);
    [2.0 * y * (1.0 - x * x), -2.0 * x * (1.0 - y * y)]
}

/// Source terms of the 2-D problem: `f = delta X/(1 + eps X) g1 + X g2`.
pub fn glazing_g1(p: [f64; 2]) -> f64 {
    let (x, y) = (p[0], p[1]);
    y - y * y + x - x * x
}

pub fn glazing_g2(p: [f64; 2]) -> f64 {
    let (x, y) = (p[0], p[1]);
    y * (y - y * y) * (1.0 - x * x) * (1.0 - 2.0 * x) - x * (x - x * x) * (1.0 - y * y) * (1.0 - 2.0 * y)
}

/// `-delta lap u + (1 + eps X) w . grad u = f` on `(0, 1)^2`, zero on the boundary.
pub fn double_glazing_2d(x_draws: &[f64], eps: f64, delta: f64) -> Result<Vec<Manufactured>> {
    if !(delta > 0.0) {
        return Err(Error::InvalidArgument(format!("delta must be positive, got {delta}")));
    }
    Ok(x_draws
        .iter()
        .map(|&x| {
            let (exact, exact_grad) = bubble(sample_coefficient(x, eps));
            let s = 1.0 + eps * x;
            Manufactured {
                a: ScalarField::constant(delta),
                b: Some(VectorField::from_fn(move |p| {
                    let w = wind(p);
                    [s * w[0], s * w[1]]
                })),
                f: ScalarField::from_fn(move |p| delta * x / s * glazing_g1(p) + x * glazing_g2(p)),
                exact,
                exact_grad,
            }
        })
        .collect())
}

/// `E[u]` and its gradient for the 2-D problem.
pub fn double_glazing_expectation(eps: f64) -> (ScalarField, VectorField) {
    bubble(expectation_coefficient(eps))
}
