use std::borrow::Cow;

use super::field::ScalarField;
use super::quadrature::{gauss5, triangle_degree4};
use crate::error::{Error, Result};
use crate::mesh::{Mesh1D, Mesh2D, Point, Side};

/// Points per element of the 1-D Gauss rule used for assembly and norms.
pub const GAUSS_POINTS_1D: usize = 5;

/// Mesh underlying a space.
#[derive(Debug, Clone)]
pub enum Geometry {
    Interval(Mesh1D),
    Triangles(Mesh2D),
}

/// Quadrature point of one element with all local shape data.
#[derive(Debug, Clone, Copy)]
pub(crate) struct QuadPoint {
    pub x: Point,
    /// Weight including the element measure.
    pub w: f64,
    pub phi: [f64; 3],
    pub grad: [[f64; 2]; 3],
}

/// Conforming Lagrange space: P1 or P2 on intervals, P1 on triangles.
///
/// 1-D P2 numbers dofs left to right, so element `e` owns `[2e, 2e+1, 2e+2]`
/// with the midpoint in the middle. Dirichlet dofs are sorted.
#[derive(Debug, Clone)]
pub struct FeSpace {
    geometry: Geometry,
    degree: usize,
    nloc: usize,
    dof_coords: Vec<Point>,
    dof_map: Vec<usize>,
    dirichlet: Vec<usize>,
    is_dirichlet: Vec<bool>,
    dirichlet_sides: Vec<Side>,
}

impl FeSpace {
    /// Space on an interval with homogeneous Dirichlet data at both ends.
    pub fn interval(mesh: Mesh1D, degree: usize) -> Result<Self> {
        let m = mesh.num_elements();
        let (nloc, dof_coords, dof_map) = match degree {
            1 => {
                let coords = mesh.nodes().iter().map(|&x| [x, 0.0]).collect();
                let map = (0..m).flat_map(|e| [e, e + 1, usize::MAX]).collect();
                (2, coords, map)
            }
            2 => {
                let mut coords = Vec::with_capacity(2 * m + 1);
                for e in 0..m {
                    let (a, b) = mesh.element(e);
                    coords.push([a, 0.0]);
                    coords.push([0.5 * (a + b), 0.0]);
                }
                coords.push([mesh.right(), 0.0]);
                let map = (0..m).flat_map(|e| [2 * e, 2 * e + 1, 2 * e + 2]).collect();
                (3, coords, map)
            }
            d => return Err(Error::InvalidArgument(format!("interval spaces support degree 1 or 2, got {d}"))),
        };
        let n: usize = if degree == 1 { m + 1 } else { 2 * m + 1 };
        let dirichlet = vec![0, n - 1];
        Ok(Self::finish(
            Geometry::Interval(mesh),
            degree,
            nloc,
            dof_coords,
            dof_map,
            dirichlet,
            vec![Side::Left, Side::Right],
        ))
    }

    /// P1 space on a triangulation with homogeneous Dirichlet data on the
    /// listed sides; the remaining sides are natural (Neumann) boundaries.
    pub fn triangles(mesh: Mesh2D, degree: usize, dirichlet_sides: &[Side]) -> Result<Self> {
        if degree != 1 {
            return Err(Error::InvalidArgument(format!("triangle spaces support degree 1 only, got {degree}")));
        }
        let dof_coords = mesh.vertices().to_vec();
        let dof_map = mesh.triangles().iter().flatten().copied().collect();
        let mut dirichlet: Vec<usize> = mesh
            .boundary_edges()
            .iter()
            .filter(|e| dirichlet_sides.contains(&e.side))
            .flat_map(|e| e.vertices)
            .collect();
        dirichlet.sort_unstable();
        dirichlet.dedup();
        let mut sides = dirichlet_sides.to_vec();
        sides.sort();
        sides.dedup();
        Ok(Self::finish(Geometry::Triangles(mesh), 1, 3, dof_coords, dof_map, dirichlet, sides))
    }

    fn finish(
        geometry: Geometry,
        degree: usize,
        nloc: usize,
        dof_coords: Vec<Point>,
        dof_map: Vec<usize>,
        dirichlet: Vec<usize>,
        dirichlet_sides: Vec<Side>,
    ) -> Self {
        let mut is_dirichlet = vec![false; dof_coords.len()];
        for &d in &dirichlet {
            is_dirichlet[d] = true;
        }
        Self { geometry, degree, nloc, dof_coords, dof_map, dirichlet, is_dirichlet, dirichlet_sides }
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn num_dofs(&self) -> usize {
        self.dof_coords.len()
    }

    pub fn num_elements(&self) -> usize {
        self.dof_map.len() / 3
    }

    /// Local shape functions per element.
    pub fn local_size(&self) -> usize {
        self.nloc
    }

    /// Global dofs of element `e` in local order.
    pub fn element_dofs(&self, e: usize) -> &[usize] {
        &self.dof_map[3 * e..3 * e + self.nloc]
    }

    pub fn dof_coords(&self) -> &[Point] {
        &self.dof_coords
    }

    pub fn dirichlet_dofs(&self) -> &[usize] {
        &self.dirichlet
    }

    pub fn is_dirichlet(&self, dof: usize) -> bool {
        self.is_dirichlet[dof]
    }

    pub fn dirichlet_sides(&self) -> &[Side] {
        &self.dirichlet_sides
    }

    /// Subdomain tag of element `e` (always 0 on intervals).
    pub fn element_tag(&self, e: usize) -> u8 {
        match &self.geometry {
            Geometry::Interval(_) => 0,
            Geometry::Triangles(m) => m.subdomain()[e],
        }
    }

    /// Characteristic mesh size.
    pub fn h(&self) -> f64 {
        match &self.geometry {
            Geometry::Interval(m) => m.max_h(),
            Geometry::Triangles(m) => m.h(),
        }
    }

    /// Assembly quadrature points and element dof locations, each with the
    /// tag of its element; the probe set for pointwise coefficient extrema.
    pub fn probe_points(&self) -> Vec<(Point, u8)> {
        let mut buf = Vec::new();
        let mut out = Vec::new();
        for e in 0..self.num_elements() {
            self.element_points(e, 1, &mut buf);
            let tag = self.element_tag(e);
            out.extend(buf.iter().map(|q| (q.x, tag)));
            out.extend(self.element_dofs(e).iter().map(|&d| (self.dof_coords[d], tag)));
        }
        out
    }

    /// Fills `out` with the quadrature points of element `e`, with the element
    /// split into `subdivisions` pieces per direction.
    pub(crate) fn element_points(&self, e: usize, subdivisions: usize, out: &mut Vec<QuadPoint>) {
        out.clear();
        let s = subdivisions.max(1);
        match &self.geometry {
            Geometry::Interval(mesh) => {
                let (a, b) = mesh.element(e);
                let h = b - a;
                let (pts, wts) = gauss5();
                for k in 0..s {
                    for (&tau, &w) in pts.iter().zip(wts) {
                        let t = (k as f64 + tau) / s as f64;
                        let (phi, dphi) = shape_1d(self.degree, t);
                        let mut grad = [[0.0; 2]; 3];
                        for i in 0..3 {
                            grad[i][0] = dphi[i] / h;
                        }
                        out.push(QuadPoint { x: [a + t * h, 0.0], w: w * h / s as f64, phi, grad });
                    }
                }
            }
            Geometry::Triangles(mesh) => {
                let [p0, p1, p2] = mesh.triangle_points(e);
                let j = [[p1[0] - p0[0], p2[0] - p0[0]], [p1[1] - p0[1], p2[1] - p0[1]]];
                let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
                let area = 0.5 * det.abs();
                // rows of J^{-T} applied to reference gradients
                let inv = [[j[1][1] / det, -j[1][0] / det], [-j[0][1] / det, j[0][0] / det]];
                let ref_grads = [[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]];
                let mut grad = [[0.0; 2]; 3];
                for i in 0..3 {
                    let g = ref_grads[i];
                    grad[i] = [inv[0][0] * g[0] + inv[0][1] * g[1], inv[1][0] * g[0] + inv[1][1] * g[1]];
                }
                let (pts, wts) = triangle_degree4();
                for sub in reference_subtriangles(s) {
                    for (q, &w) in pts.iter().zip(&wts) {
                        let r = [
                            sub[0][0] + (sub[1][0] - sub[0][0]) * q[0] + (sub[2][0] - sub[0][0]) * q[1],
                            sub[0][1] + (sub[1][1] - sub[0][1]) * q[0] + (sub[2][1] - sub[0][1]) * q[1],
                        ];
                        let phi = [1.0 - r[0] - r[1], r[0], r[1]];
                        let x = [p0[0] + j[0][0] * r[0] + j[0][1] * r[1], p0[1] + j[1][0] * r[0] + j[1][1] * r[1]];
                        out.push(QuadPoint { x, w: w * area / (s * s) as f64, phi, grad });
                    }
                }
            }
        }
    }
}

/// Lagrange shape functions on `[0, 1]` and their derivatives.
fn shape_1d(degree: usize, t: f64) -> ([f64; 3], [f64; 3]) {
    if degree == 1 {
        ([1.0 - t, t, 0.0], [-1.0, 1.0, 0.0])
    } else {
        (
            [2.0 * (t - 0.5) * (t - 1.0), -4.0 * t * (t - 1.0), 2.0 * t * (t - 0.5)],
            [4.0 * t - 3.0, 4.0 - 8.0 * t, 4.0 * t - 1.0],
        )
    }
}

/// Uniform split of the reference triangle into `s * s` congruent pieces.
fn reference_subtriangles(s: usize) -> Vec<[[f64; 2]; 3]> {
    if s == 1 {
        return vec![[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]];
    }
    let f = |i: usize, j: usize| [i as f64 / s as f64, j as f64 / s as f64];
    let mut out = Vec::with_capacity(s * s);
    for j in 0..s {
        for i in 0..s - j {
            out.push([f(i, j), f(i + 1, j), f(i, j + 1)]);
            if i + j + 1 < s {
                out.push([f(i + 1, j), f(i + 1, j + 1), f(i, j + 1)]);
            }
        }
    }
    out
}

/// Coefficient vector bound to a space.
#[derive(Debug, Clone)]
pub struct FeFunction<'a> {
    space: &'a FeSpace,
    coeffs: Cow<'a, [f64]>,
}

impl<'a> FeFunction<'a> {
    pub fn new(space: &'a FeSpace, coeffs: impl Into<Cow<'a, [f64]>>) -> Result<Self> {
        let coeffs = coeffs.into();
        if coeffs.len() != space.num_dofs() {
            return Err(Error::DimensionMismatch { expected: space.num_dofs(), found: coeffs.len() });
        }
        Ok(Self { space, coeffs })
    }

    pub fn zero(space: &'a FeSpace) -> Self {
        Self { space, coeffs: Cow::Owned(vec![0.0; space.num_dofs()]) }
    }

    /// Nodal interpolant of `f`.
    pub fn interpolate(space: &'a FeSpace, f: &ScalarField) -> Self {
        let coeffs = space.dof_coords().iter().map(|&p| f.eval(p, 0)).collect::<Vec<_>>();
        Self { space, coeffs: Cow::Owned(coeffs) }
    }

    pub fn space(&self) -> &'a FeSpace {
        self.space
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs.into_owned()
    }
}
