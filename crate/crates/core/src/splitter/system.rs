use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fem::{
    apply_dirichlet, assemble_boundary_load, assemble_convection, assemble_diffusion, assemble_load, gram_matrix,
    zero_dirichlet, zero_dirichlet_entries, Elimination, FeSpace, ScalarField, VectorField,
};
use crate::mesh::Side;
use crate::sparse::{CsrMatrix, Factorization};

/// Parameter-dependent operator `A1` of one sample.
#[derive(Debug, Clone)]
pub enum Perturbation {
    Zero,
    Assembled(CsrMatrix),
    /// `factor * base`, with `base` shared between samples.
    Scaled {
        factor: f64,
        base: Arc<CsrMatrix>,
    },
}

impl Perturbation {
    /// `rhs -= A1 u`.
    #[inline]
    pub(crate) fn subtract_from(&self, u: &[f64], rhs: &mut [f64]) {
        match self {
            Perturbation::Zero => {}
            Perturbation::Assembled(m) => {
                for (i, r) in rhs.iter_mut().enumerate() {
                    let (cols, vals) = m.row(i);
                    let s: f64 = cols.iter().zip(vals).map(|(&c, &v)| v * u[c]).sum();
                    *r -= s;
                }
            }
            Perturbation::Scaled { factor, base } => {
                if *factor == 0.0 {
                    return;
                }
                // entrywise `factor * v` matches `base.scale(factor)` bit for bit
                let f = *factor;
                for (i, r) in rhs.iter_mut().enumerate() {
                    let (cols, vals) = base.row(i);
                    let s: f64 = cols.iter().zip(vals).map(|(&c, &v)| (f * v) * u[c]).sum();
                    *r -= s;
                }
            }
        }
    }

    /// Explicit matrix of dimension `n`.
    pub fn to_matrix(&self, n: usize) -> CsrMatrix {
        match self {
            Perturbation::Zero => CsrMatrix::zeros(n, n),
            Perturbation::Assembled(m) => m.clone(),
            Perturbation::Scaled { factor, base } => base.scale(*factor),
        }
    }

    fn dim(&self) -> Option<usize> {
        match self {
            Perturbation::Zero => None,
            Perturbation::Assembled(m) => Some(m.nrows()),
            Perturbation::Scaled { base, .. } => Some(base.nrows()),
        }
    }
}

/// Load vector of one sample.
#[derive(Debug, Clone)]
pub enum Load {
    Vector(Vec<f64>),
    /// `sum_k c_k v_k` over shared vectors.
    Combination(Vec<(f64, Arc<Vec<f64>>)>),
}

impl Load {
    pub(crate) fn write_into(&self, out: &mut [f64]) {
        match self {
            Load::Vector(v) => out.copy_from_slice(v),
            Load::Combination(terms) => {
                out.fill(0.0);
                for (c, v) in terms {
                    for (o, x) in out.iter_mut().zip(v.iter()) {
                        *o += c * x;
                    }
                }
            }
        }
    }

    pub fn to_vec(&self, n: usize) -> Vec<f64> {
        let mut out = vec![0.0; n];
        self.write_into(&mut out);
        out
    }

    fn dims(&self) -> Vec<usize> {
        match self {
            Load::Vector(v) => vec![v.len()],
            Load::Combination(t) => t.iter().map(|(_, v)| v.len()).collect(),
        }
    }
}

/// Per-sample coefficient data for [`build_split_system`].
#[derive(Debug, Clone)]
pub struct SampleTerms {
    pub a: ScalarField,
    pub b: Option<VectorField>,
    pub f: ScalarField,
    pub neumann: Vec<(Side, ScalarField)>,
}

impl SampleTerms {
    pub fn diffusion(a: ScalarField, f: ScalarField) -> Self {
        Self { a, b: None, f, neumann: Vec::new() }
    }
}

/// Shared factored operator plus per-sample perturbations and loads.
///
/// Invariants: every matrix and vector has the dimension of `a0`; rows and
/// columns of each `A1` at Dirichlet dofs are zero; loads vanish there.
#[derive(Debug, Clone)]
pub struct SplitSystem {
    a0: CsrMatrix,
    fact: Factorization,
    perturbations: Vec<Perturbation>,
    loads: Vec<Load>,
    gram: CsrMatrix,
    space: Option<Arc<FeSpace>>,
}

/// Checks `a0 > 0` at every probe point of the space.
pub fn check_elliptic(space: &FeSpace, a0: &ScalarField) -> Result<()> {
    for (p, tag) in space.probe_points() {
        let v = a0.eval(p, tag);
        if !(v > 0.0) {
            return Err(Error::NotElliptic { value: v, x: p[0], y: p[1] });
        }
    }
    Ok(())
}

/// Assembles `A0 = diffusion(a0) [+ convection(b0)]` and, per sample,
/// `A1 = diffusion(a - a0) [+ convection(b - b0)]` and the load, then factors
/// `A0` once.
pub fn build_split_system(
    space: Arc<FeSpace>,
    a0: &ScalarField,
    b0: Option<&VectorField>,
    samples: &[SampleTerms],
) -> Result<SplitSystem> {
    check_elliptic(&space, a0)?;
    let mut a0_mat = assemble_diffusion(&space, a0);
    if let Some(b) = b0 {
        a0_mat = a0_mat.add(&assemble_convection(&space, b))?;
    }
    let zero_b = VectorField::Constant([0.0, 0.0]);
    let mut perturbations = Vec::with_capacity(samples.len());
    let mut loads = Vec::with_capacity(samples.len());
    for s in samples {
        let mut a1 = assemble_diffusion(&space, &s.a.minus(a0));
        let conv = match (&s.b, b0) {
            (Some(b), Some(b0)) => Some(b.minus(b0)),
            (Some(b), None) => Some(b.clone()),
            (None, Some(b0)) => Some(zero_b.minus(b0)),
            (None, None) => None,
        };
        if let Some(c) = conv {
            a1 = a1.add(&assemble_convection(&space, &c))?;
        }
        let mut load = assemble_load(&space, &s.f);
        for (side, g) in &s.neumann {
            let g = assemble_boundary_load(&space, *side, g)?;
            load.iter_mut().zip(&g).for_each(|(l, v)| *l += v);
        }
        perturbations.push(Perturbation::Assembled(a1));
        loads.push(Load::Vector(load));
    }
    SplitSystem::affine(space, &a0_mat, perturbations, loads)
}

impl SplitSystem {
    /// Builds a system from raw assembled pieces over a space; Dirichlet
    /// conditions are imposed here.
    pub fn affine(
        space: Arc<FeSpace>,
        a0: &CsrMatrix,
        perturbations: Vec<Perturbation>,
        loads: Vec<Load>,
    ) -> Result<Self> {
        let n = space.num_dofs();
        let (a0c, _) = apply_dirichlet(a0, &vec![0.0; n], &space, 0.0, Elimination::Symmetric)?;
        let mut bases: Vec<(*const CsrMatrix, Arc<CsrMatrix>)> = Vec::new();
        let perturbations = perturbations
            .into_iter()
            .map(|p| match p {
                Perturbation::Zero => Perturbation::Zero,
                Perturbation::Assembled(m) => Perturbation::Assembled(zero_dirichlet(&m, &space)),
                Perturbation::Scaled { factor, base } => {
                    let key = Arc::as_ptr(&base);
                    let shared = match bases.iter().find(|(k, _)| *k == key) {
                        Some((_, b)) => b.clone(),
                        None => {
                            let b = Arc::new(zero_dirichlet(&base, &space));
                            bases.push((key, b.clone()));
                            b
                        }
                    };
                    Perturbation::Scaled { factor, base: shared }
                }
            })
            .collect();
        let mut vectors: Vec<(*const Vec<f64>, Arc<Vec<f64>>)> = Vec::new();
        let loads = loads
            .into_iter()
            .map(|l| match l {
                Load::Vector(mut v) => {
                    if v.len() == n {
                        zero_dirichlet_entries(&mut v, &space);
                    }
                    Load::Vector(v)
                }
                Load::Combination(terms) => Load::Combination(
                    terms
                        .into_iter()
                        .map(|(c, v)| {
                            let key = Arc::as_ptr(&v);
                            let shared = match vectors.iter().find(|(k, _)| *k == key) {
                                Some((_, s)) => s.clone(),
                                None => {
                                    let mut w = (*v).clone();
                                    if w.len() == n {
                                        zero_dirichlet_entries(&mut w, &space);
                                    }
                                    let s = Arc::new(w);
                                    vectors.push((key, s.clone()));
                                    s
                                }
                            };
                            (c, shared)
                        })
                        .collect(),
                ),
            })
            .collect();
        let gram = gram_matrix(&space);
        let mut sys = Self::from_parts(a0c, perturbations, loads, gram)?;
        sys.space = Some(space);
        Ok(sys)
    }

    /// Builds a system from already constrained algebraic pieces. `gram`
    /// defines the norm used for iterate differences.
    pub fn from_parts(
        a0: CsrMatrix,
        perturbations: Vec<Perturbation>,
        loads: Vec<Load>,
        gram: CsrMatrix,
    ) -> Result<Self> {
        let n = a0.nrows();
        if a0.ncols() != n {
            return Err(Error::NotSquare { nrows: n, ncols: a0.ncols() });
        }
        if perturbations.len() != loads.len() {
            return Err(Error::DimensionMismatch { expected: loads.len(), found: perturbations.len() });
        }
        if loads.is_empty() {
            return Err(Error::InvalidArgument("a split system needs at least one sample".into()));
        }
        for p in &perturbations {
            if let Some(d) = p.dim() {
                if d != n {
                    return Err(Error::DimensionMismatch { expected: n, found: d });
                }
            }
        }
        for l in &loads {
            for d in l.dims() {
                if d != n {
                    return Err(Error::DimensionMismatch { expected: n, found: d });
                }
            }
        }
        if gram.nrows() != n {
            return Err(Error::DimensionMismatch { expected: n, found: gram.nrows() });
        }
        let fact = Factorization::factorize(&a0)?;
        Ok(Self { a0, fact, perturbations, loads, gram, space: None })
    }

    pub fn dim(&self) -> usize {
        self.a0.nrows()
    }

    pub fn num_samples(&self) -> usize {
        self.loads.len()
    }

    pub fn a0(&self) -> &CsrMatrix {
        &self.a0
    }

    pub fn factorization(&self) -> &Factorization {
        &self.fact
    }

    pub fn perturbation(&self, j: usize) -> &Perturbation {
        &self.perturbations[j]
    }

    pub fn perturbations(&self) -> &[Perturbation] {
        &self.perturbations
    }

    pub fn loads(&self) -> &[Load] {
        &self.loads
    }

    pub fn load(&self, j: usize) -> Vec<f64> {
        self.loads[j].to_vec(self.dim())
    }

    pub fn gram(&self) -> &CsrMatrix {
        &self.gram
    }

    pub fn space(&self) -> Option<&FeSpace> {
        self.space.as_deref()
    }

    pub fn space_arc(&self) -> Option<Arc<FeSpace>> {
        self.space.clone()
    }

    /// `A0 + A1` of sample `j`.
    pub fn full_matrix(&self, j: usize) -> CsrMatrix {
        match &self.perturbations[j] {
            Perturbation::Zero => self.a0.clone(),
            Perturbation::Assembled(m) => self.a0.add(m).expect("same dimensions"),
            Perturbation::Scaled { factor, base } => self.a0.add_scaled(*factor, base).expect("same dimensions"),
        }
    }

    /// Factors and solves the full system of sample `j` on its own.
    pub fn solve_individual(&self, j: usize) -> Result<Vec<f64>> {
        let f = Factorization::factorize(&self.full_matrix(j))?;
        f.solve(&self.load(j))
    }

    /// `max |(A0 + A1) u - f|` for sample `j`.
    pub fn residual_inf(&self, j: usize, u: &[f64]) -> f64 {
        let mut r = self.a0.spmv(u).expect("dimension");
        let f = self.load(j);
        let mut minus_a1 = vec![0.0; self.dim()];
        self.perturbations[j].subtract_from(u, &mut minus_a1);
        r.iter_mut()
            .zip(&minus_a1)
            .zip(&f)
            .map(|((r, m), f)| {
                *r -= m;
                (*r - f).abs()
            })
            .fold(0.0, f64::max)
    }
}
