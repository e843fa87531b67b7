//! Quadrature rules on the unit interval and the reference triangle.

use std::sync::OnceLock;

/// Cached five-point Gauss-Legendre rule.
pub(crate) fn gauss5() -> &'static (Vec<f64>, Vec<f64>) {
    static FIVE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    FIVE.get_or_init(|| gauss_legendre(5))
}

/// Gauss-Legendre rule with `n` points on `[0, 1]`; weights sum to 1.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "rule needs at least one point");
    let mut points = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        // Newton iteration on P_n from the Chebyshev-like initial guess.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        // map [-1, 1] to [0, 1], ascending order
        points[n - 1 - i] = 0.5 * (x + 1.0);
        weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    (points, weights)
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Six-point rule of polynomial degree 4 on the reference triangle
/// `{(s, t): s, t >= 0, s + t <= 1}`; weights sum to 1 (fractions of area).
pub fn triangle_degree4() -> (Vec<[f64; 2]>, Vec<f64>) {
    const A1: f64 = 0.445_948_490_915_965;
    const W1: f64 = 0.223_381_589_678_011_5;
    const A2: f64 = 0.091_576_213_509_770_74;
    const W2: f64 = 0.109_951_743_655_321_87;
    let points = vec![
        [A1, A1],
        [1.0 - 2.0 * A1, A1],
        [A1, 1.0 - 2.0 * A1],
        [A2, A2],
        [1.0 - 2.0 * A2, A2],
        [A2, 1.0 - 2.0 * A2],
    ];
    (points, vec![W1, W1, W1, W2, W2, W2])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_integrates_polynomials() {
        for n in 1..=8 {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-14);
            assert!(x.windows(2).all(|p| p[0] < p[1]));
            for deg in 0..2 * n {
                let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                assert!((q - 1.0 / (deg as f64 + 1.0)).abs() < 1e-14, "n={n} deg={deg}");
            }
        }
    }

    #[test]
    fn five_point_nodes() {
        let (x, _) = gauss_legendre(5);
        assert!((x[2] - 0.5).abs() < 1e-16);
        assert!((x[0] - 0.5 * (1.0 - 0.906_179_845_938_664)).abs() < 1e-14);
        assert!((x[1] - 0.5 * (1.0 - 0.538_469_310_105_683)).abs() < 1e-14);
    }

    #[test]
    fn triangle_rule_exact_to_degree_four() {
        let (p, w) = triangle_degree4();
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        // mean of s^a t^b over the triangle is 2 a! b! / (a + b + 2)!
        let fact = |k: u32| (1..=k).map(f64::from).product::<f64>();
        for a in 0..=4u32 {
            for b in 0..=(4 - a) {
                let q: f64 = p.iter().zip(&w).map(|(p, w)| w * p[0].powi(a as i32) * p[1].powi(b as i32)).sum();
                let exact = 2.0 * fact(a) * fact(b) / fact(a + b + 2);
                assert!((q - exact).abs() < 1e-15, "a={a} b={b}");
            }
        }
    }
}
