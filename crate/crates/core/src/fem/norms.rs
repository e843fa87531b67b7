use super::field::{ScalarField, VectorField};
use super::space::FeFunction;
use crate::sparse::CsrMatrix;

/// Norm selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormKind {
    L2,
    H1,
    H1Semi,
}

impl NormKind {
    fn combine(self, l2_sq: f64, semi_sq: f64) -> f64 {
        match self {
            NormKind::L2 => l2_sq.sqrt(),
            NormKind::H1Semi => semi_sq.sqrt(),
            NormKind::H1 => (l2_sq + semi_sq).sqrt(),
        }
    }
}

/// Quadrature norm of a finite element function.
pub fn norm(u: &FeFunction<'_>, kind: NormKind) -> f64 {
    let zero = ScalarField::constant(0.0);
    let zero_grad = VectorField::Constant([0.0, 0.0]);
    error_vs_exact_refined(u, &zero, &zero_grad, kind, 1)
}

/// Quadrature norm of `u - exact`.
pub fn error_vs_exact(u: &FeFunction<'_>, exact: &ScalarField, exact_grad: &VectorField, kind: NormKind) -> f64 {
    error_vs_exact_refined(u, exact, exact_grad, kind, 1)
}

/// As [`error_vs_exact`] with every element split into `subdivisions`
/// pieces per direction before quadrature.
pub fn error_vs_exact_refined(
    u: &FeFunction<'_>,
    exact: &ScalarField,
    exact_grad: &VectorField,
    kind: NormKind,
    subdivisions: usize,
) -> f64 {
    let (l2, semi) = error_parts(u, exact, exact_grad, subdivisions);
    kind.combine(l2, semi)
}

/// Squared L2 and H1-seminorm errors.
pub(crate) fn error_parts(
    u: &FeFunction<'_>,
    exact: &ScalarField,
    exact_grad: &VectorField,
    subdivisions: usize,
) -> (f64, f64) {
    let space = u.space();
    let c = u.coeffs();
    let mut qps = Vec::new();
    let (mut l2, mut semi) = (0.0, 0.0);
    for e in 0..space.num_elements() {
        space.element_points(e, subdivisions, &mut qps);
        let tag = space.element_tag(e);
        let dofs = space.element_dofs(e);
        for q in &qps {
            let mut v = 0.0;
            let mut g = [0.0; 2];
            for (i, &d) in dofs.iter().enumerate() {
                v += c[d] * q.phi[i];
                g[0] += c[d] * q.grad[i][0];
                g[1] += c[d] * q.grad[i][1];
            }
            let ev = exact.eval(q.x, tag);
            let eg = exact_grad.eval(q.x, tag);
            l2 += q.w * (v - ev).powi(2);
            semi += q.w * ((g[0] - eg[0]).powi(2) + (g[1] - eg[1]).powi(2));
        }
    }
    (l2, semi)
}

/// `sqrt(v^T G v)` for a Gram matrix `G`; negative roundoff clamps to zero.
pub fn gram_norm(gram: &CsrMatrix, v: &[f64]) -> f64 {
    gram.quadratic_form(v).max(0.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::{assemble_diffusion, assemble_mass, gram_matrix, FeSpace};
    use crate::mesh::{structured_rectangle, uniform_interval};

    fn space(m: usize, degree: usize) -> FeSpace {
        FeSpace::interval(uniform_interval(0.0, 1.0, m).unwrap(), degree).unwrap()
    }

    #[test]
    fn zero_function_has_zero_norms() {
        let s = space(4, 2);
        let z = FeFunction::zero(&s);
        for k in [NormKind::L2, NormKind::H1, NormKind::H1Semi] {
            assert_eq!(norm(&z, k), 0.0);
        }
    }

    #[test]
    fn linear_function_norms() {
        let s = space(3, 1);
        let u = FeFunction::interpolate(&s, &ScalarField::from_fn_1d(|x| x));
        assert!((norm(&u, NormKind::L2) - (1.0f64 / 3.0).sqrt()).abs() < 1e-14);
        assert!((norm(&u, NormKind::H1Semi) - 1.0).abs() < 1e-14);
        assert!((norm(&u, NormKind::H1) - (4.0f64 / 3.0).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn quadratic_function_norms() {
        let s = space(2, 2);
        let u = FeFunction::interpolate(&s, &ScalarField::from_fn_1d(|x| x * (1.0 - x)));
        assert!((norm(&u, NormKind::L2) - (1.0f64 / 30.0).sqrt()).abs() < 1e-14);
        assert!((norm(&u, NormKind::H1Semi) - (1.0f64 / 3.0).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn error_examples() {
        let s = space(5, 2);
        let f = ScalarField::from_fn_1d(|x| x * (1.0 - x));
        let g = VectorField::from_fn(|p| [1.0 - 2.0 * p[0], 0.0]);
        let u = FeFunction::interpolate(&s, &f);
        assert!(error_vs_exact(&u, &f, &g, NormKind::H1) < 1e-13);
        let z = FeFunction::zero(&s);
        let e = error_vs_exact(&z, &f, &g, NormKind::L2);
        assert!((e - (1.0f64 / 30.0).sqrt()).abs() < 1e-14);
        let e2 = error_vs_exact_refined(&z, &f, &g, NormKind::L2, 3);
        assert!((e - e2).abs() < 1e-14);
    }

    #[test]
    fn gram_norm_matches_quadrature() {
        let s = space(6, 2);
        let u = FeFunction::interpolate(&s, &ScalarField::from_fn_1d(|x| (3.0 * x).sin()));
        let g = gram_matrix(&s);
        assert!((gram_norm(&g, u.coeffs()) - norm(&u, NormKind::H1)).abs() < 1e-13);
        let m = assemble_mass(&s, &ScalarField::constant(1.0));
        let k = assemble_diffusion(&s, &ScalarField::constant(1.0));
        assert!((gram_norm(&m, u.coeffs()) - norm(&u, NormKind::L2)).abs() < 1e-13);
        assert!((gram_norm(&k, u.coeffs()) - norm(&u, NormKind::H1Semi)).abs() < 1e-13);

        let t = structured_rectangle(0.0, 1.0, 0.0, 2.0, 3, 5, None).unwrap();
        let s2 = FeSpace::triangles(t, 1, &[]).unwrap();
        let v = FeFunction::interpolate(&s2, &ScalarField::from_fn(|p| p[0] * p[1] + 1.0));
        let g2 = gram_matrix(&s2);
        assert!((gram_norm(&g2, v.coeffs()) - norm(&v, NormKind::H1)).abs() < 1e-12);
    }
}
