//! Interval and structured triangular meshes.
//!
//! Both mesh kinds are immutable once built. The 2-D mesh splits every grid
//! cell along its lower-left to upper-right diagonal, so a given set of
//! parameters always yields the same mesh bit for bit.

use std::fmt;
use std::io::Write;

use crate::error::{Error, Result};

/// A point in the plane. 1-D code uses `[x, 0.0]`.
pub type Point = [f64; 2];

/// Uniform or non-uniform partition of an interval.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh1D {
    nodes: Vec<f64>,
}

impl Mesh1D {
    /// Builds a mesh from a strictly increasing node list.
    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::InvalidMesh("need at least two nodes".into()));
        }
        if let Some(w) = nodes.windows(2).find(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidMesh(format!("nodes not strictly increasing: {} then {}", w[0], w[1])));
        }
        Ok(Self { nodes })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn num_elements(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Endpoints of element `e`.
    pub fn element(&self, e: usize) -> (f64, f64) {
        (self.nodes[e], self.nodes[e + 1])
    }

    pub fn left(&self) -> f64 {
        self.nodes[0]
    }

    pub fn right(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    /// Largest element length.
    pub fn max_h(&self) -> f64 {
        self.nodes.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }

    /// Line-oriented debug listing: `node <i> <x>` then `elem <e> <i> <i+1>`.
    pub fn dump<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (i, x) in self.nodes.iter().enumerate() {
            writeln!(out, "node {i} {x:.17e}")?;
        }
        for e in 0..self.num_elements() {
            writeln!(out, "elem {e} {} {}", e, e + 1)?;
        }
        Ok(())
    }
}

/// `num_elems` equal intervals on `[left, right]`.
pub fn uniform_interval(left: f64, right: f64, num_elems: usize) -> Result<Mesh1D> {
    if num_elems == 0 {
        return Err(Error::InvalidMesh("num_elems must be positive".into()));
    }
    if !(left < right) {
        return Err(Error::InvalidMesh(format!("left end {left} must be below right end {right}")));
    }
    let len = right - left;
    let mut nodes: Vec<f64> = (0..=num_elems).map(|i| left + (i as f64) * len / (num_elems as f64)).collect();
    nodes[num_elems] = right;
    Mesh1D::from_nodes(nodes)
}

/// Side of a rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Bottom,
    Right,
    Top,
    Left,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::Bottom, Side::Right, Side::Top, Side::Left];

    pub fn name(self) -> &'static str {
        match self {
            Side::Bottom => "bottom",
            Side::Right => "right",
            Side::Top => "top",
            Side::Left => "left",
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A boundary edge with the side it lies on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryEdge {
    pub vertices: [usize; 2],
    pub side: Side,
}

/// Disk used to tag the inner subdomain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Disk {
    pub center: Point,
    pub radius: f64,
}

impl Disk {
    pub fn contains(&self, p: Point) -> bool {
        let dx = p[0] - self.center[0];
        let dy = p[1] - self.center[1];
        (dx * dx + dy * dy).sqrt() < self.radius
    }
}

/// Triangulation of an axis-aligned rectangle.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh2D {
    vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    boundary_edges: Vec<BoundaryEdge>,
    subdomain: Vec<u8>,
    bounds: [f64; 4],
    nx: usize,
    ny: usize,
}

impl Mesh2D {
    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn boundary_edges(&self) -> &[BoundaryEdge] {
        &self.boundary_edges
    }

    /// Per-triangle subdomain tag (1 inside the configured disk, else 0).
    pub fn subdomain(&self) -> &[u8] {
        &self.subdomain
    }

    /// `[xmin, xmax, ymin, ymax]`.
    pub fn bounds(&self) -> [f64; 4] {
        self.bounds
    }

    pub fn cells(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    /// Grid spacing along x (the mesh size used throughout).
    pub fn h(&self) -> f64 {
        (self.bounds[1] - self.bounds[0]) / self.nx as f64
    }

    /// Corner coordinates of triangle `t`.
    pub fn triangle_points(&self, t: usize) -> [Point; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    /// Signed area of triangle `t` (positive for counter-clockwise).
    pub fn signed_area(&self, t: usize) -> f64 {
        let [p0, p1, p2] = self.triangle_points(t);
        0.5 * ((p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]))
    }

    pub fn centroid(&self, t: usize) -> Point {
        let [p0, p1, p2] = self.triangle_points(t);
        [(p0[0] + p1[0] + p2[0]) / 3.0, (p0[1] + p1[1] + p2[1]) / 3.0]
    }

    /// Line-oriented debug listing of vertices, triangles and boundary edges.
    pub fn dump<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (i, p) in self.vertices.iter().enumerate() {
            writeln!(out, "vertex {i} {:.17e} {:.17e}", p[0], p[1])?;
        }
        for (t, tri) in self.triangles.iter().enumerate() {
            writeln!(out, "triangle {t} {} {} {} {}", tri[0], tri[1], tri[2], self.subdomain[t])?;
        }
        for e in &self.boundary_edges {
            writeln!(out, "edge {} {} {}", e.vertices[0], e.vertices[1], e.side)?;
        }
        Ok(())
    }
}

/// Structured triangulation of `[xmin, xmax] x [ymin, ymax]` with `nx * ny`
/// cells, each split into two triangles along the diagonal from its
/// lower-left to its upper-right corner.
pub fn structured_rectangle(
    xmin: f64,
    xmax: f64,
    ymin: f64,
    ymax: f64,
    nx: usize,
    ny: usize,
    disk: Option<Disk>,
) -> Result<Mesh2D> {
    if nx == 0 || ny == 0 {
        return Err(Error::InvalidMesh("nx and ny must be positive".into()));
    }
    if !(xmin < xmax) || !(ymin < ymax) {
        return Err(Error::InvalidMesh(format!("degenerate rectangle [{xmin}, {xmax}] x [{ymin}, {ymax}]")));
    }
    if let Some(d) = disk {
        if !(d.radius > 0.0) {
            return Err(Error::InvalidMesh(format!("disk radius must be positive, got {}", d.radius)));
        }
    }

    let coord = |lo: f64, hi: f64, i: usize, n: usize| {
        if i == n {
            hi
        } else {
            lo + (i as f64) * (hi - lo) / (n as f64)
        }
    };
    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        let y = coord(ymin, ymax, j, ny);
        for i in 0..=nx {
            vertices.push([coord(xmin, xmax, i, nx), y]);
        }
    }

    let vid = |i: usize, j: usize| j * (nx + 1) + i;
    let mut triangles = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let v0 = vid(i, j);
            let v1 = vid(i + 1, j);
            let v2 = vid(i + 1, j + 1);
            let v3 = vid(i, j + 1);
            triangles.push([v0, v1, v2]);
            triangles.push([v0, v2, v3]);
        }
    }

    let mut boundary_edges = Vec::with_capacity(2 * (nx + ny));
    for i in 0..nx {
        boundary_edges.push(BoundaryEdge { vertices: [vid(i, 0), vid(i + 1, 0)], side: Side::Bottom });
    }
    for j in 0..ny {
        boundary_edges.push(BoundaryEdge { vertices: [vid(nx, j), vid(nx, j + 1)], side: Side::Right });
    }
    for i in 0..nx {
        boundary_edges.push(BoundaryEdge { vertices: [vid(i + 1, ny), vid(i, ny)], side: Side::Top });
    }
    for j in 0..ny {
        boundary_edges.push(BoundaryEdge { vertices: [vid(0, j + 1), vid(0, j)], side: Side::Left });
    }

    let mut mesh =
        Mesh2D { vertices, triangles, boundary_edges, subdomain: Vec::new(), bounds: [xmin, xmax, ymin, ymax], nx, ny };
    mesh.subdomain = (0..mesh.triangles.len())
        .map(|t| match disk {
            Some(d) if d.contains(mesh.centroid(t)) => 1,
            _ => 0,
        })
        .collect();
    Ok(mesh)
}
