use crate::error::{Error, Result};
use crate::fem::{ScalarField, VectorField};
use crate::mesh::Point;

/// Dominance diagnostics, one entry per sample.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RhoEstimate {
    pub rho: Vec<f64>,
    pub rho_hat: Vec<f64>,
    pub regression_rate: Vec<f64>,
}

impl RhoEstimate {
    pub fn max_rho(&self) -> f64 {
        self.rho.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_rho_hat(&self) -> f64 {
        self.rho_hat.iter().copied().fold(0.0, f64::max)
    }
}

fn min_positive(a0: &ScalarField, probes: &[(Point, u8)]) -> Result<f64> {
    let mut min = f64::INFINITY;
    for &(p, tag) in probes {
        let v = a0.eval(p, tag);
        if !(v > 0.0) {
            return Err(Error::NotElliptic { value: v, x: p[0], y: p[1] });
        }
        min = min.min(v);
    }
    if probes.is_empty() {
        return Err(Error::InvalidArgument("no probe points".into()));
    }
    Ok(min)
}

fn norm2(v: [f64; 2]) -> f64 {
    v[0].hypot(v[1])
}

/// Per-sample `max_x (|a_j - a0| + |b_j - b0|) / min_x a0` over `probes`.
/// A missing `b` counts as zero.
pub fn compute_rho(
    a0: &ScalarField,
    b0: Option<&VectorField>,
    samples: &[(ScalarField, Option<VectorField>)],
    probes: &[(Point, u8)],
) -> Result<Vec<f64>> {
    let min_a0 = min_positive(a0, probes)?;
    Ok(samples
        .iter()
        .map(|(a, b)| {
            probes
                .iter()
                .map(|&(p, tag)| {
                    let eta_a = (a.eval(p, tag) - a0.eval(p, tag)).abs();
                    let bj = b.as_ref().map_or([0.0; 2], |b| b.eval(p, tag));
                    let b0v = b0.map_or([0.0; 2], |b| b.eval(p, tag));
                    eta_a + norm2([bj[0] - b0v[0], bj[1] - b0v[1]])
                })
                .fold(0.0, f64::max)
                / min_a0
        })
        .collect())
}

/// Per-sample `max_x |a_j - a0| / a0` over `probes`.
pub fn compute_rho_hat(a0: &ScalarField, samples: &[ScalarField], probes: &[(Point, u8)]) -> Result<Vec<f64>> {
    min_positive(a0, probes)?;
    Ok(samples
        .iter()
        .map(|a| {
            probes
                .iter()
                .map(|&(p, tag)| {
                    let v0 = a0.eval(p, tag);
                    (a.eval(p, tag) - v0).abs() / v0
                })
                .fold(0.0, f64::max)
        })
        .collect())
}

/// Base `q` of the least-squares fit `errors[n] ~ C q^(n+1)`.
pub fn estimate_rate(errors: &[f64]) -> Result<f64> {
    if errors.len() < 2 {
        return Err(Error::InvalidArgument(format!("rate fit needs at least 2 entries, got {}", errors.len())));
    }
    if let Some(e) = errors.iter().find(|e| !(**e > 0.0) || !e.is_finite()) {
        return Err(Error::InvalidArgument(format!("rate fit needs positive finite entries, got {e}")));
    }
    let m = errors.len() as f64;
    let xs = (1..=errors.len()).map(|k| k as f64);
    let x_mean = xs.clone().sum::<f64>() / m;
    let y_mean = errors.iter().map(|e| e.ln()).sum::<f64>() / m;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, e) in xs.zip(errors) {
        sxy += (x - x_mean) * (e.ln() - y_mean);
        sxx += (x - x_mean) * (x - x_mean);
    }
    Ok((sxy / sxx).exp())
}

/// Longest prefix of `errors` above `floor`, as used before a rate fit.
pub fn above_floor(errors: &[f64], floor: f64) -> &[f64] {
    let end = errors.iter().position(|e| !(*e > floor)).unwrap_or(errors.len());
    &errors[..end]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Vec<(Point, u8)> {
        (0..=20).map(|i| ([i as f64 / 20.0, 0.0], 0)).collect()
    }

    #[test]
    fn rates_of_exact_geometric_sequences() {
        assert!((estimate_rate(&[0.5, 0.25, 0.125]).unwrap() - 0.5).abs() < 1e-14);
        assert!((estimate_rate(&[0.09, 0.0081]).unwrap() - 0.09).abs() < 1e-14);
    }

    #[test]
    fn rate_rejects_bad_input() {
        assert!(estimate_rate(&[0.1]).is_err());
        assert!(estimate_rate(&[0.1, 0.0]).is_err());
        assert!(estimate_rate(&[0.1, -1.0, 0.01]).is_err());
    }

    #[test]
    fn floor_prefix() {
        assert_eq!(above_floor(&[1.0, 0.1, 1e-14, 0.5], 1e-12), &[1.0, 0.1]);
    }

    #[test]
    fn identical_samples_have_zero_rho() {
        let a0 = ScalarField::from_fn_1d(|x| 1.0 + x);
        let s = vec![(a0.clone(), None); 3];
        assert_eq!(compute_rho(&a0, None, &s, &grid()).unwrap(), vec![0.0; 3]);
        let r = compute_rho_hat(&a0, std::slice::from_ref(&a0), &grid()).unwrap();
        assert_eq!(r, vec![0.0]);
    }

    #[test]
    fn doubled_coefficient_gives_unit_rho_hat() {
        let a0 = ScalarField::from_fn_1d(|x| 1.0 + x);
        let a = ScalarField::from_fn_1d(|x| 2.0 * (1.0 + x));
        let r = compute_rho_hat(&a0, &[a], &grid()).unwrap();
        assert!((r[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rho_dominates_rho_hat() {
        let a0 = ScalarField::from_fn_1d(|x| 1.0 + x);
        let a = ScalarField::from_fn_1d(|x| 1.0 + x + 0.3 * (5.0 * x).sin());
        let rho = compute_rho(&a0, None, &[(a.clone(), None)], &grid()).unwrap();
        let hat = compute_rho_hat(&a0, &[a], &grid()).unwrap();
        assert!(rho[0] >= hat[0] && hat[0] > 0.0);
    }

    #[test]
    fn convection_contributes() {
        let a0 = ScalarField::constant(2.0);
        let b = VectorField::along_x(ScalarField::constant(1.0));
        let rho = compute_rho(&a0, None, &[(a0.clone(), Some(b))], &grid()).unwrap();
        assert!((rho[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn nonpositive_a0_is_rejected() {
        let a0 = ScalarField::from_fn_1d(|x| x - 0.5);
        assert!(matches!(compute_rho_hat(&a0, &[], &grid()), Err(Error::NotElliptic { .. })));
    }
}
