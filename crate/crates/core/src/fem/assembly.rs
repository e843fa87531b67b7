use super::field::{ScalarField, VectorField};
use super::quadrature::gauss5;
use super::space::{FeSpace, Geometry, QuadPoint};
use crate::error::{Error, Result};
use crate::mesh::Side;
use crate::sparse::CsrMatrix;

/// Generic bilinear assembly: `entry(q, i, j)` is the integrand for test
/// function `i` and trial function `j` at quadrature point `q`.
fn assemble_bilinear(space: &FeSpace, mut entry: impl FnMut(&QuadPoint, u8, usize, usize) -> f64) -> CsrMatrix {
    let n = space.num_dofs();
    let nloc = space.local_size();
    let mut triplets = Vec::with_capacity(space.num_elements() * nloc * nloc);
    let mut qps = Vec::new();
    for e in 0..space.num_elements() {
        space.element_points(e, 1, &mut qps);
        let tag = space.element_tag(e);
        let mut local = [[0.0; 3]; 3];
        for q in &qps {
            for (i, row) in local.iter_mut().enumerate().take(nloc) {
                for (j, v) in row.iter_mut().enumerate().take(nloc) {
                    *v += q.w * entry(q, tag, i, j);
                }
            }
        }
        let dofs = space.element_dofs(e);
        for i in 0..nloc {
            for j in 0..nloc {
                triplets.push((dofs[i], dofs[j], local[i][j]));
            }
        }
    }
    CsrMatrix::from_triplets(n, n, &triplets).expect("dof indices in range")
}

/// Stiffness matrix of `\int a grad(phi_j) . grad(phi_i)`; exactly symmetric.
pub fn assemble_diffusion(space: &FeSpace, a: &ScalarField) -> CsrMatrix {
    let k = assemble_bilinear(space, |q, tag, i, j| {
        let (gi, gj) = (q.grad[i], q.grad[j]);
        a.eval(q.x, tag) * (gi[0] * gj[0] + gi[1] * gj[1])
    });
    // products commute, but enforce bitwise symmetry against summation order
    let kt = k.transpose();
    k.map_entries(|i, j, v| if j < i { kt.get(i, j) } else { v })
}

/// Convection matrix of `\int (b . grad(phi_j)) phi_i`.
pub fn assemble_convection(space: &FeSpace, b: &VectorField) -> CsrMatrix {
    assemble_bilinear(space, |q, tag, i, j| {
        let bv = b.eval(q.x, tag);
        (bv[0] * q.grad[j][0] + bv[1] * q.grad[j][1]) * q.phi[i]
    })
}

/// Weighted mass matrix of `\int c phi_j phi_i`.
pub fn assemble_mass(space: &FeSpace, c: &ScalarField) -> CsrMatrix {
    assemble_bilinear(space, |q, tag, i, j| c.eval(q.x, tag) * q.phi[i] * q.phi[j])
}

/// Gram matrix of the H1 inner product, `M + K` with unit weights.
pub fn gram_matrix(space: &FeSpace) -> CsrMatrix {
    let one = ScalarField::constant(1.0);
    assemble_mass(space, &one).add(&assemble_diffusion(space, &one)).expect("same dimensions")
}

/// Load vector of `\int f phi_i`.
pub fn assemble_load(space: &FeSpace, f: &ScalarField) -> Vec<f64> {
    let mut out = vec![0.0; space.num_dofs()];
    let mut qps = Vec::new();
    for e in 0..space.num_elements() {
        space.element_points(e, 1, &mut qps);
        let tag = space.element_tag(e);
        let dofs = space.element_dofs(e);
        let mut local = [0.0; 3];
        for q in &qps {
            let fv = f.eval(q.x, tag);
            for (i, l) in local.iter_mut().enumerate().take(dofs.len()) {
                *l += q.w * fv * q.phi[i];
            }
        }
        for (i, &d) in dofs.iter().enumerate() {
            out[d] += local[i];
        }
    }
    out
}

/// Boundary load `\int_side g phi_i ds`. On intervals the left and right
/// sides are the end points and the integral is a point evaluation.
pub fn assemble_boundary_load(space: &FeSpace, side: Side, g: &ScalarField) -> Result<Vec<f64>> {
    let mut out = vec![0.0; space.num_dofs()];
    match space.geometry() {
        Geometry::Interval(mesh) => {
            let (x, dof) = match side {
                Side::Left => (mesh.left(), 0),
                Side::Right => (mesh.right(), space.num_dofs() - 1),
                other => return Err(Error::EmptyBoundary(other.to_string())),
            };
            out[dof] = g.eval([x, 0.0], 0);
        }
        Geometry::Triangles(mesh) => {
            let (pts, wts) = gauss5();
            let mut found = false;
            for edge in mesh.boundary_edges().iter().filter(|e| e.side == side) {
                found = true;
                let [a, b] = edge.vertices;
                let (pa, pb) = (mesh.vertices()[a], mesh.vertices()[b]);
                let len = ((pb[0] - pa[0]).powi(2) + (pb[1] - pa[1]).powi(2)).sqrt();
                let (mut la, mut lb) = (0.0, 0.0);
                for (&t, &w) in pts.iter().zip(wts) {
                    let x = [pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1])];
                    let gv = g.eval(x, 0) * w * len;
                    la += gv * (1.0 - t);
                    lb += gv * t;
                }
                out[a] += la;
                out[b] += lb;
            }
            if !found {
                return Err(Error::EmptyBoundary(side.to_string()));
            }
        }
    }
    Ok(out)
}

/// How Dirichlet rows are eliminated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Elimination {
    /// Zero row and column, unit diagonal.
    Symmetric,
    /// Zero row, unit diagonal; columns untouched.
    RowOnly,
}

/// Imposes `u = value` at the Dirichlet dofs. Only `value = 0` is supported.
pub fn apply_dirichlet(
    a: &CsrMatrix,
    rhs: &[f64],
    space: &FeSpace,
    value: f64,
    mode: Elimination,
) -> Result<(CsrMatrix, Vec<f64>)> {
    if value != 0.0 {
        return Err(Error::NonHomogeneousDirichlet(value));
    }
    let n = space.num_dofs();
    if a.nrows() != n || a.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: a.nrows() });
    }
    if rhs.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: rhs.len() });
    }
    let m = eliminate(a, space, 1.0, mode);
    let mut b = rhs.to_vec();
    for &d in space.dirichlet_dofs() {
        b[d] = 0.0;
    }
    Ok((m, b))
}

/// Zeroes Dirichlet rows and columns including the diagonal; used for the
/// parameter-dependent part, whose rows must not touch boundary values.
pub fn zero_dirichlet(a: &CsrMatrix, space: &FeSpace) -> CsrMatrix {
    eliminate(a, space, 0.0, Elimination::Symmetric)
}

/// Zeroes the Dirichlet entries of a vector in place.
pub fn zero_dirichlet_entries(v: &mut [f64], space: &FeSpace) {
    for &d in space.dirichlet_dofs() {
        v[d] = 0.0;
    }
}

fn eliminate(a: &CsrMatrix, space: &FeSpace, diag: f64, mode: Elimination) -> CsrMatrix {
    let n = a.nrows();
    let mut triplets = Vec::with_capacity(a.nnz() + space.dirichlet_dofs().len());
    for i in 0..n {
        let (cols, vals) = a.row(i);
        if space.is_dirichlet(i) {
            triplets.push((i, i, diag));
            continue;
        }
        for (&c, &v) in cols.iter().zip(vals) {
            let keep = mode == Elimination::RowOnly || !space.is_dirichlet(c);
            triplets.push((i, c, if keep { v } else { 0.0 }));
        }
    }
    CsrMatrix::from_triplets(n, n, &triplets).expect("indices in range")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::FeSpace;
    use crate::mesh::{structured_rectangle, uniform_interval};
    use crate::sparse::Factorization;

    fn p1(m: usize) -> FeSpace {
        FeSpace::interval(uniform_interval(0.0, 1.0, m).unwrap(), 1).unwrap()
    }

    fn close(a: &[Vec<f64>], b: &[Vec<f64>], tol: f64) -> bool {
        a.iter().flatten().zip(b.iter().flatten()).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn p1_stiffness_two_elements() {
        let k = assemble_diffusion(&p1(2), &ScalarField::constant(1.0));
        let expect = vec![vec![2.0, -2.0, 0.0], vec![-2.0, 4.0, -2.0], vec![0.0, -2.0, 2.0]];
        assert!(close(&k.to_dense(), &expect, 1e-13));
        let z = assemble_diffusion(&p1(2), &ScalarField::constant(0.0));
        assert!(z.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn unit_square_two_triangle_stiffness() {
        let mesh = structured_rectangle(0.0, 1.0, 0.0, 1.0, 1, 1, None).unwrap();
        let s = FeSpace::triangles(mesh, 1, &[]).unwrap();
        let k = assemble_diffusion(&s, &ScalarField::constant(1.0));
        // vertices 0=(0,0), 1=(1,0), 2=(0,1), 3=(1,1); the diagonal 0-3 couples with zero weight
        let expect = vec![
            vec![1.0, -0.5, -0.5, 0.0],
            vec![-0.5, 1.0, 0.0, -0.5],
            vec![-0.5, 0.0, 1.0, -0.5],
            vec![0.0, -0.5, -0.5, 1.0],
        ];
        assert!(close(&k.to_dense(), &expect, 1e-14), "{:?}", k.to_dense());
    }

    #[test]
    fn p1_convection_interior_row() {
        let c = assemble_convection(&p1(2), &VectorField::along_x(ScalarField::constant(1.0)));
        let row = &c.to_dense()[1];
        assert!((row[0] + 0.5).abs() < 1e-14 && row[1].abs() < 1e-14 && (row[2] - 0.5).abs() < 1e-14);
        let z = assemble_convection(&p1(2), &VectorField::Constant([0.0, 0.0]));
        assert!(z.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn convection_annihilates_constants() {
        let mesh = structured_rectangle(0.0, 1.0, 0.0, 1.0, 6, 6, None).unwrap();
        let s = FeSpace::triangles(mesh, 1, &Side::ALL).unwrap();
        let b = VectorField::from_fn(|p| {
            let (x, y) = (p[0], p[1]);
            [2.001 * 2.0 * y * (1.0 - x * x), -2.001 * 2.0 * x * (1.0 - y * y)]
        });
        let c = assemble_convection(&s, &b);
        let r = c.spmv(&vec![1.0; s.num_dofs()]).unwrap();
        let worst = r.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        assert!(worst <= 1e-12 * c.norm_inf());
    }

    #[test]
    fn load_examples() {
        let s = p1(2);
        assert_eq!(assemble_load(&s, &ScalarField::constant(0.0)), vec![0.0; 3]);
        let b = assemble_load(&s, &ScalarField::constant(1.0));
        for (v, e) in b.iter().zip([0.25, 0.5, 0.25]) {
            assert!((v - e).abs() < 1e-15);
        }
        // f = 51 - 100x against hats on [0, 1/2] and [1/2, 1]
        let f = assemble_load(&s, &ScalarField::from_fn_1d(|x| 51.0 - 100.0 * x));
        let exact = [51.0 / 4.0 - 100.0 / 24.0, 51.0 / 2.0 - 25.0, 51.0 / 4.0 - 100.0 * 5.0 / 24.0];
        for (v, e) in f.iter().zip(exact) {
            assert!((v - e).abs() < 1e-12, "{v} vs {e}");
        }
    }

    #[test]
    fn boundary_load_examples() {
        let mesh = structured_rectangle(-1.0, 1.0, -1.0, 1.0, 4, 4, None).unwrap();
        let s = FeSpace::triangles(mesh, 1, &[Side::Top]).unwrap();
        let zero = assemble_boundary_load(&s, Side::Bottom, &ScalarField::constant(0.0)).unwrap();
        assert!(zero.iter().all(|&v| v == 0.0));
        let one = assemble_boundary_load(&s, Side::Bottom, &ScalarField::constant(1.0)).unwrap();
        assert!((one.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        let neg = assemble_boundary_load(&s, Side::Bottom, &ScalarField::constant(-1.0)).unwrap();
        assert!(one.iter().zip(&neg).all(|(a, b)| *a == -b));
        assert!(matches!(
            assemble_boundary_load(&p1(2), Side::Top, &ScalarField::constant(1.0)),
            Err(Error::EmptyBoundary(_))
        ));
    }

    #[test]
    fn dirichlet_examples() {
        let s = p1(2);
        let k = assemble_diffusion(&s, &ScalarField::constant(1.0));
        let f = assemble_load(&s, &ScalarField::constant(1.0));
        let (a, b) = apply_dirichlet(&k, &f, &s, 0.0, Elimination::Symmetric).unwrap();
        let u = Factorization::factorize(&a).unwrap().solve(&b).unwrap();
        assert_eq!(u[0], 0.0);
        assert_eq!(u[2], 0.0);
        assert!((u[1] - 0.125).abs() < 1e-15);
        let (r, _) = apply_dirichlet(&k, &f, &s, 0.0, Elimination::RowOnly).unwrap();
        assert_eq!(r.get(1, 0), -2.0);
        assert_eq!(r.get(0, 1), 0.0);
        assert!(matches!(
            apply_dirichlet(&k, &f, &s, 1.0, Elimination::Symmetric),
            Err(Error::NonHomogeneousDirichlet(_))
        ));
    }

    #[test]
    fn dirichlet_without_and_with_all_dofs() {
        let mesh = structured_rectangle(0.0, 1.0, 0.0, 1.0, 2, 2, None).unwrap();
        let free = FeSpace::triangles(mesh.clone(), 1, &[]).unwrap();
        let k = assemble_diffusion(&free, &ScalarField::constant(1.0));
        let f = assemble_load(&free, &ScalarField::constant(1.0));
        let (a, b) = apply_dirichlet(&k, &f, &free, 0.0, Elimination::Symmetric).unwrap();
        assert_eq!(a, k);
        assert_eq!(b, f);

        let mesh1 = structured_rectangle(0.0, 1.0, 0.0, 1.0, 1, 1, None).unwrap();
        let all = FeSpace::triangles(mesh1, 1, &Side::ALL).unwrap();
        let k = assemble_diffusion(&all, &ScalarField::constant(1.0));
        let f = assemble_load(&all, &ScalarField::constant(1.0));
        let (a, b) = apply_dirichlet(&k, &f, &all, 0.0, Elimination::Symmetric).unwrap();
        assert_eq!(a.to_dense(), CsrMatrix::identity(4).to_dense());
        assert_eq!(Factorization::factorize(&a).unwrap().solve(&b).unwrap(), vec![0.0; 4]);
    }
}
