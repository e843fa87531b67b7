use std::sync::Arc;
use std::time::Instant;

use super::problems::*;
use super::{choose_a0, convergence_order, mc_expectation, A0Strategy};
use crate::error::{Error, Result};
use crate::fem::{
    assemble_boundary_load, assemble_convection, assemble_diffusion, assemble_load, error_vs_exact,
    error_vs_exact_refined, gauss_legendre, norm, FeFunction, FeSpace, NormKind, ScalarField, VectorField,
};
use crate::grouping::{group_samples, relative_distance, GroupingResult};
use crate::mesh::{structured_rectangle, uniform_interval, Disk, Side};
use crate::sparse::{estimate_speedup, Columns, CsrMatrix, Factorization};
use crate::splitter::{
    above_floor, build_split_system, compute_rho, compute_rho_hat, estimate_rate, IterateOptions, IterationHistory,
    Load, Perturbation, RhoEstimate, SplitSystem, StopRule,
};

/// Diffs at or below `floor_rel * max_j ||U_0^j||` are roundoff and are not
/// used as the base of a contraction ratio.
pub const CONTRACTION_FLOOR: f64 = 1e-10;
/// Slack added to `rho` in the contraction check.
pub const CONTRACTION_SLACK: f64 = 0.05;
/// Trace entries at or below this multiple of `max_j ||U_0^j||` are dropped
/// before a rate fit.
pub const RATE_FLOOR: f64 = 1e-12;

/// Ratios `diff(n+1) / diff(n)` over pairs whose base exceeds `floor`.
pub fn contraction_ratios(diffs: &[f64], floor: f64) -> Vec<f64> {
    diffs.windows(2).filter(|w| w[0] > floor).map(|w| w[1] / w[0]).collect()
}

/// `diff(n+1) <= (rho + slack) diff(n)` on every pair above `floor`.
pub fn contraction_holds(diffs: &[f64], rho: f64, floor: f64) -> bool {
    contraction_ratios(diffs, floor).iter().all(|r| *r <= rho + CONTRACTION_SLACK)
}

/// Number of uniform cells of width `h` covering a unit length.
pub fn cells_for(h: f64) -> Result<usize> {
    if !(h > 0.0 && h <= 1.0) {
        return Err(Error::InvalidArgument(format!("mesh size {h} outside (0, 1]")));
    }
    let m = (1.0 / h).round();
    if ((m * h) - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!("mesh size {h} does not divide the unit length")));
    }
    Ok(m as usize)
}

fn unit_interval(h: f64, degree: usize) -> Result<Arc<FeSpace>> {
    Ok(Arc::new(FeSpace::interval(uniform_interval(0.0, 1.0, cells_for(h)?)?, degree)?))
}

fn unit_square(h: f64) -> Result<Arc<FeSpace>> {
    let m = cells_for(h)?;
    Ok(Arc::new(FeSpace::triangles(structured_rectangle(0.0, 1.0, 0.0, 1.0, m, m, None)?, 1, &Side::ALL)?))
}

fn h1_l2(space: &FeSpace, coeffs: &[f64], exact: &ScalarField, grad: &VectorField) -> Result<(f64, f64)> {
    let u = FeFunction::new(space, coeffs)?;
    Ok((error_vs_exact(&u, exact, grad, NormKind::H1), error_vs_exact(&u, exact, grad, NormKind::L2)))
}

fn max_initial_norm(sys: &SplitSystem, u0: &Columns) -> f64 {
    u0.iter().map(|c| crate::fem::gram_norm(sys.gram(), c)).fold(0.0, f64::max)
}

/// Direct solves of every sample with the time they took.
#[derive(Debug, Clone)]
pub struct Comparison {
    pub t_ind: f64,
    /// `max_j ||u_j - U_j||` in the system's Gram norm.
    pub max_diff: f64,
    pub direct: Vec<Vec<f64>>,
}

/// Factors and solves `(A0 + A1^j) u = f^j` for every sample separately and
/// compares with `solutions`.
pub fn compare_individual(sys: &SplitSystem, solutions: &Columns) -> Result<Comparison> {
    let start = Instant::now();
    let direct = (0..sys.num_samples()).map(|j| sys.solve_individual(j)).collect::<Result<Vec<_>>>()?;
    let t_ind = start.elapsed().as_secs_f64();
    let mut max_diff = 0.0_f64;
    let mut d = vec![0.0; sys.dim()];
    for (j, u) in direct.iter().enumerate() {
        d.iter_mut().zip(u.iter().zip(solutions.col(j))).for_each(|(d, (a, b))| *d = a - b);
        max_diff = max_diff.max(crate::fem::gram_norm(sys.gram(), &d));
    }
    Ok(Comparison { t_ind, max_diff, direct })
}

// ---------------------------------------------------------------------------
// Deterministic 1-D problems

#[derive(Debug, Clone)]
pub struct Test1Config {
    /// Mesh sizes `2^-k`.
    pub levels: Vec<u32>,
    pub degree: usize,
    pub a0: A0Strategy,
    pub opts: IterateOptions,
    /// Uses problems `1..=samples`.
    pub samples: usize,
    /// Also evaluate errors with every element split in two.
    pub refined_errors: bool,
}

impl Default for Test1Config {
    fn default() -> Self {
        Self {
            levels: vec![7, 8, 9, 10],
            degree: 2,
            a0: A0Strategy::Mean,
            opts: IterateOptions::default(),
            samples: 5,
            refined_errors: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Test1Level {
    pub h: f64,
    pub dofs: usize,
    /// `||u_j - U_j||_H1` of the final iterate.
    pub errors: Vec<f64>,
    pub errors_refined: Option<Vec<f64>>,
    pub history: IterationHistory,
    /// `||u_j^h - U_{j,n}^h||_H1` for `n = 0..=iterations`.
    pub traces: Vec<Vec<f64>>,
    pub rho: RhoEstimate,
    /// Largest `||U_0^j||_H1`.
    pub initial_norm: f64,
    pub t_it: f64,
    pub comparison: Comparison,
}

#[derive(Debug, Clone)]
pub struct Test1Result {
    pub a0: A0Strategy,
    pub levels: Vec<Test1Level>,
}

pub fn run_test1(cfg: &Test1Config) -> Result<Test1Result> {
    if cfg.samples == 0 || cfg.samples > TEST1_EPS.len() {
        return Err(Error::InvalidArgument(format!("test1 has 1..=5 problems, asked for {}", cfg.samples)));
    }
    let problems = (1..=cfg.samples).map(test1_problem).collect::<Result<Vec<_>>>()?;
    let a: Vec<ScalarField> = problems.iter().map(|p| p.a.clone()).collect();
    let mut levels = Vec::new();
    for &k in &cfg.levels {
        let h = 0.5f64.powi(k as i32);
        let space = unit_interval(h, cfg.degree)?;
        let probes = space.probe_points();
        let a0 = choose_a0(cfg.a0, &a, &probes)?;
        let terms: Vec<_> = problems.iter().map(|p| p.terms()).collect();

        let start = Instant::now();
        let sys = build_split_system(space.clone(), &a0, None, &terms)?;
        let mut iterates = Vec::new();
        let out = sys.iterate_with(&cfg.opts, |_, u| iterates.push(u.clone()))?;
        let t_it = start.elapsed().as_secs_f64();

        let comparison = compare_individual(&sys, &out.solutions)?;
        let gram = sys.gram();
        let traces: Vec<Vec<f64>> = (0..cfg.samples)
            .map(|j| {
                iterates
                    .iter()
                    .map(|u| {
                        let d: Vec<f64> = u.col(j).iter().zip(&comparison.direct[j]).map(|(a, b)| a - b).collect();
                        crate::fem::gram_norm(gram, &d)
                    })
                    .collect()
            })
            .collect();
        let initial_norm = max_initial_norm(&sys, &iterates[0]);
        let rates = traces
            .iter()
            .map(|t| estimate_rate(above_floor(t, RATE_FLOOR * initial_norm)).unwrap_or(f64::NAN))
            .collect();
        let pairs: Vec<_> = a.iter().map(|s| (s.clone(), None)).collect();
        let rho = RhoEstimate {
            rho: compute_rho(&a0, None, &pairs, &probes)?,
            rho_hat: compute_rho_hat(&a0, &a, &probes)?,
            regression_rate: rates,
        };
        let mut errors = Vec::new();
        let mut refined = Vec::new();
        for (j, p) in problems.iter().enumerate() {
            let u = FeFunction::new(&space, out.solutions.col(j))?;
            errors.push(error_vs_exact(&u, &p.exact, &p.exact_grad, NormKind::H1));
            if cfg.refined_errors {
                refined.push(error_vs_exact_refined(&u, &p.exact, &p.exact_grad, NormKind::H1, 2));
            }
        }
        let mut history = out.history;
        for (j, t) in traces.iter().enumerate() {
            history.push_errors(format!("E{}", j + 1), t.clone());
        }
        levels.push(Test1Level {
            h,
            dofs: space.num_dofs(),
            errors,
            errors_refined: cfg.refined_errors.then_some(refined),
            history,
            traces,
            rho,
            initial_norm,
            t_it,
            comparison,
        });
    }
    Ok(Test1Result { a0: cfg.a0, levels })
}

// ---------------------------------------------------------------------------
// Random problems driven by one uniform variable

/// A random problem family split as `A0 + s_j B` with one shared matrix `B`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RandomFamily {
    /// `-((1 + eps X) u')' = X` with `a0 = 1`.
    Approach1 { eps: f64 },
    /// The same problem with a given constant `a0`.
    Approach2 { eps: f64, a0: f64 },
    /// `-(a u')' + 100 a u' = X (51 - 100 x)`, `a = 1 + eps X`, shared `a0`
    /// and `b0 = 100 a0`.
    ConvDiff { eps: f64, a0: f64 },
    /// `-delta lap u + (1 + eps X) w . grad u = f` on the unit square with
    /// shared wind `s0 w`.
    Glazing { eps: f64, delta: f64, s0: f64 },
}

impl RandomFamily {
    /// Approach 2 with `a0` chosen from the draws.
    pub fn approach2(eps: f64, xs: &[f64], strategy: A0Strategy) -> Result<Self> {
        Ok(RandomFamily::Approach2 { eps, a0: shared_scale(eps, xs, strategy)? })
    }

    pub fn convdiff(eps: f64, xs: &[f64]) -> Result<Self> {
        Ok(RandomFamily::ConvDiff { eps, a0: shared_scale(eps, xs, A0Strategy::Mean)? })
    }

    pub fn glazing(eps: f64, delta: f64, xs: &[f64]) -> Result<Self> {
        Ok(RandomFamily::Glazing { eps, delta, s0: shared_scale(eps, xs, A0Strategy::Mean)? })
    }

    pub fn name(&self) -> &'static str {
        match self {
            RandomFamily::Approach1 { .. } => "approach1",
            RandomFamily::Approach2 { .. } => "approach2",
            RandomFamily::ConvDiff { .. } => "convdiff",
            RandomFamily::Glazing { .. } => "glazing",
        }
    }

    pub fn eps(&self) -> f64 {
        match *self {
            RandomFamily::Approach1 { eps }
            | RandomFamily::Approach2 { eps, .. }
            | RandomFamily::ConvDiff { eps, .. }
            | RandomFamily::Glazing { eps, .. } => eps,
        }
    }

    pub fn is_2d(&self) -> bool {
        matches!(self, RandomFamily::Glazing { .. })
    }

    pub fn space(&self, h: f64) -> Result<Arc<FeSpace>> {
        if self.is_2d() {
            unit_square(h)
        } else {
            unit_interval(h, 1)
        }
    }

    /// Closed-form expectation of the solution.
    pub fn expectation(&self) -> (ScalarField, VectorField) {
        if self.is_2d() {
            double_glazing_expectation(self.eps())
        } else {
            random_diffusion_expectation(self.eps())
        }
    }

    pub fn samples(&self, xs: &[f64]) -> Result<Vec<Manufactured>> {
        Ok(match *self {
            RandomFamily::Approach1 { eps } | RandomFamily::Approach2 { eps, .. } => random_diffusion_problem(xs, eps),
            RandomFamily::ConvDiff { eps, .. } => convdiff_1d_problem(xs, eps),
            RandomFamily::Glazing { eps, delta, .. } => double_glazing_2d(xs, eps, delta)?,
        })
    }

    /// `(a0, b0)` of the splitting.
    pub fn shared(&self) -> (ScalarField, Option<VectorField>) {
        match *self {
            RandomFamily::Approach1 { .. } => (ScalarField::constant(1.0), None),
            RandomFamily::Approach2 { a0, .. } => (ScalarField::constant(a0), None),
            RandomFamily::ConvDiff { a0, .. } => {
                (ScalarField::constant(a0), Some(VectorField::Constant([100.0 * a0, 0.0])))
            }
            RandomFamily::Glazing { delta, s0, .. } => (
                ScalarField::constant(delta),
                Some(VectorField::from_fn(move |p| {
                    let w = wind(p);
                    [s0 * w[0], s0 * w[1]]
                })),
            ),
        }
    }

    /// Per-sample `rho` on the probe points of `space`.
    pub fn rho(&self, space: &FeSpace, xs: &[f64]) -> Result<Vec<f64>> {
        let (a0, b0) = self.shared();
        let pairs: Vec<_> = self.samples(xs)?.into_iter().map(|m| (m.a, m.b)).collect();
        compute_rho(&a0, b0.as_ref(), &pairs, &space.probe_points())
    }

    /// Assembles the split system for draws `xs` on `space`.
    pub fn build(&self, space: Arc<FeSpace>, xs: &[f64]) -> Result<SplitSystem> {
        let s = &*space;
        let (a0, base, factors, loads): (CsrMatrix, CsrMatrix, Vec<f64>, Vec<Load>) = match *self {
            RandomFamily::Approach1 { eps } => {
                let k = assemble_diffusion(s, &ScalarField::constant(1.0));
                let l = Arc::new(assemble_load(s, &ScalarField::constant(1.0)));
                let loads = xs.iter().map(|&x| Load::Combination(vec![(x, l.clone())])).collect();
                (k.clone(), k, xs.iter().map(|x| eps * x).collect(), loads)
            }
            RandomFamily::Approach2 { eps, a0 } => {
                let k = assemble_diffusion(s, &ScalarField::constant(1.0));
                let l = Arc::new(assemble_load(s, &ScalarField::constant(1.0)));
                let loads = xs.iter().map(|&x| Load::Combination(vec![(x, l.clone())])).collect();
                (k.scale(a0), k, xs.iter().map(|x| 1.0 + eps * x - a0).collect(), loads)
            }
            RandomFamily::ConvDiff { eps, a0 } => {
                let m = assemble_diffusion(s, &ScalarField::constant(1.0))
                    .add(&assemble_convection(s, &VectorField::Constant([100.0, 0.0])))?;
                let l = Arc::new(assemble_load(s, &ScalarField::from_fn_1d(|x| 51.0 - 100.0 * x)));
                let loads = xs.iter().map(|&x| Load::Combination(vec![(x, l.clone())])).collect();
                (m.scale(a0), m, xs.iter().map(|x| 1.0 + eps * x - a0).collect(), loads)
            }
            RandomFamily::Glazing { eps, delta, s0 } => {
                let k = assemble_diffusion(s, &ScalarField::constant(1.0));
                let c = assemble_convection(s, &VectorField::from_fn(wind));
                let g1 = Arc::new(assemble_load(s, &ScalarField::from_fn(glazing_g1)));
                let g2 = Arc::new(assemble_load(s, &ScalarField::from_fn(glazing_g2)));
                let loads = xs
                    .iter()
                    .map(|&x| Load::Combination(vec![(delta * x / (1.0 + eps * x), g1.clone()), (x, g2.clone())]))
                    .collect();
                (k.scale(delta).add_scaled(s0, &c)?, c, xs.iter().map(|x| 1.0 + eps * x - s0).collect(), loads)
            }
        };
        let base = Arc::new(base);
        let perturbations =
            factors.into_iter().map(|factor| Perturbation::Scaled { factor, base: base.clone() }).collect();
        SplitSystem::affine(space, &a0, perturbations, loads)
    }
}

/// Constant shared coefficient `a0` for samples `1 + eps X_j`.
pub fn shared_scale(eps: f64, xs: &[f64], strategy: A0Strategy) -> Result<f64> {
    let a: Vec<ScalarField> = xs.iter().map(|x| ScalarField::constant(1.0 + eps * x)).collect();
    match choose_a0(strategy, &a, &[])? {
        ScalarField::Constant(c) => Ok(c),
        other => Err(Error::InvalidArgument(format!("expected a constant a0, got {other:?}"))),
    }
}

/// Which Monte Carlo error is reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorMeasure {
    /// `||E[u] - E_mc[U_n]||`.
    OfExpectation,
    /// `E_mc[||u - U_n||]`.
    ExpectedError,
}

/// Split of the expectation error into a discretization part measured
/// against a Gauss rule in `X` and a sampling part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorSplit {
    pub disc_h1: f64,
    pub disc_l2: f64,
    pub mc_h1: f64,
    pub mc_l2: f64,
}

#[derive(Debug, Clone)]
pub struct StudyLevel {
    pub h: f64,
    pub dofs: usize,
    pub h1: f64,
    pub l2: f64,
    /// `(H1, L2)` error after every update `n = 0..=iterations`.
    pub trace: Vec<(f64, f64)>,
    pub history: IterationHistory,
    pub initial_norm: f64,
    pub split: Option<ErrorSplit>,
    pub t_it: f64,
}

#[derive(Debug, Clone)]
pub struct Study {
    pub family: RandomFamily,
    pub measure: ErrorMeasure,
    pub rho: Vec<f64>,
    pub levels: Vec<StudyLevel>,
}

impl Study {
    pub fn max_rho(&self) -> f64 {
        self.rho.iter().copied().fold(0.0, f64::max)
    }

    pub fn h1_errors(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.h1).collect()
    }

    pub fn l2_errors(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.l2).collect()
    }

    pub fn h1_orders(&self) -> Result<Vec<f64>> {
        convergence_order(&self.h1_errors())
    }

    pub fn l2_orders(&self) -> Result<Vec<f64>> {
        convergence_order(&self.l2_errors())
    }
}

#[derive(Debug, Clone)]
pub struct StudyConfig {
    pub hs: Vec<f64>,
    pub opts: IterateOptions,
    pub measure: ErrorMeasure,
    /// Gauss nodes in `X` for the error split; `None` skips it.
    pub split_nodes: Option<usize>,
    /// Record the error after every update.
    pub trace: bool,
}

fn sample_errors(
    space: &FeSpace,
    u: &Columns,
    samples: &[Manufactured],
    measure: ErrorMeasure,
    expectation: &(ScalarField, VectorField),
) -> Result<(f64, f64)> {
    match measure {
        ErrorMeasure::OfExpectation => {
            let mean = mc_expectation(u.iter())?;
            h1_l2(space, &mean, &expectation.0, &expectation.1)
        }
        ErrorMeasure::ExpectedError => {
            let (mut h1, mut l2) = (0.0, 0.0);
            for (j, m) in samples.iter().enumerate() {
                let (a, b) = h1_l2(space, u.col(j), &m.exact, &m.exact_grad)?;
                h1 += a;
                l2 += b;
            }
            let n = samples.len() as f64;
            Ok((h1 / n, l2 / n))
        }
    }
}

/// Runs the family on every mesh size with the same draws.
pub fn run_study(family: RandomFamily, xs: &[f64], cfg: &StudyConfig) -> Result<Study> {
    if xs.is_empty() {
        return Err(Error::InvalidArgument("study needs at least one sample".into()));
    }
    let samples = if cfg.measure == ErrorMeasure::ExpectedError { family.samples(xs)? } else { Vec::new() };
    let expectation = family.expectation();
    let first = family.space(*cfg.hs.first().ok_or_else(|| Error::InvalidArgument("no mesh sizes".into()))?)?;
    let rho = family.rho(&first, xs)?;
    let mut levels = Vec::new();
    for &h in &cfg.hs {
        let space = family.space(h)?;
        let start = Instant::now();
        let sys = family.build(space.clone(), xs)?;
        let mut trace = Vec::new();
        let mut initial_norm = 0.0;
        let mut failure = None;
        let out = sys.iterate_with(&cfg.opts, |n, u| {
            if n == 0 {
                initial_norm = max_initial_norm(&sys, u);
            }
            if cfg.trace {
                match sample_errors(&space, u, &samples, cfg.measure, &expectation) {
                    Ok(e) => trace.push(e),
                    Err(e) => failure = Some(e),
                }
            }
        })?;
        let t_it = start.elapsed().as_secs_f64();
        if let Some(e) = failure {
            return Err(e);
        }
        let (h1, l2) = match trace.last() {
            Some(&e) if cfg.trace => e,
            _ => sample_errors(&space, &out.solutions, &samples, cfg.measure, &expectation)?,
        };
        let split = match (cfg.split_nodes, cfg.measure) {
            (Some(q), ErrorMeasure::OfExpectation) => {
                let mean = mc_expectation(out.solutions.iter())?;
                Some(error_split(family, &space, &mean, q, &cfg.opts, &expectation)?)
            }
            _ => None,
        };
        let mut history = out.history;
        if cfg.trace {
            history.push_errors("E_H1", trace.iter().map(|e| e.0).collect());
            history.push_errors("E_L2", trace.iter().map(|e| e.1).collect());
        }
        levels.push(StudyLevel { h, dofs: space.num_dofs(), h1, l2, trace, history, initial_norm, split, t_it });
    }
    Ok(Study { family, measure: cfg.measure, rho, levels })
}

fn error_split(
    family: RandomFamily,
    space: &Arc<FeSpace>,
    mc_mean: &[f64],
    nodes: usize,
    opts: &IterateOptions,
    expectation: &(ScalarField, VectorField),
) -> Result<ErrorSplit> {
    let (xq, wq) = gauss_legendre(nodes);
    let sys = family.build(space.clone(), &xq)?;
    let out = sys.iterate(opts)?;
    let mut quad = vec![0.0; sys.dim()];
    for (col, w) in out.solutions.iter().zip(&wq) {
        quad.iter_mut().zip(col).for_each(|(q, c)| *q += w * c);
    }
    let (disc_h1, disc_l2) = h1_l2(space, &quad, &expectation.0, &expectation.1)?;
    let diff: Vec<f64> = quad.iter().zip(mc_mean).map(|(a, b)| a - b).collect();
    let d = FeFunction::new(space, diff)?;
    Ok(ErrorSplit { disc_h1, disc_l2, mc_h1: norm(&d, NormKind::H1), mc_l2: norm(&d, NormKind::L2) })
}

/// Approach 1 at one mesh size with the per-sample error after every update.
pub fn approach1_trace(eps: f64, xs: &[f64], h: f64, n: usize) -> Result<Study> {
    let cfg = StudyConfig {
        hs: vec![h],
        opts: IterateOptions::fixed(n),
        measure: ErrorMeasure::ExpectedError,
        split_nodes: None,
        trace: true,
    };
    run_study(RandomFamily::Approach1 { eps }, xs, &cfg)
}

/// One run stopped on the norm of the mean update.
pub fn stopping_run(family: RandomFamily, xs: &[f64], h: f64, tol: f64, max_iter: usize) -> Result<Study> {
    let cfg = StudyConfig {
        hs: vec![h],
        opts: IterateOptions { tol, max_iter, stop: StopRule::NormOfMean },
        measure: ErrorMeasure::OfExpectation,
        split_nodes: None,
        trace: true,
    };
    run_study(family, xs, &cfg)
}

// ---------------------------------------------------------------------------
// 2-D piecewise problem with a disk inclusion

/// Affine pieces of the disk problem: `A(mu) = K_out + mu1 K_disk`,
/// `F(mu) = mu2 g`.
#[derive(Debug, Clone)]
pub struct Test2Operators {
    pub space: Arc<FeSpace>,
    pub k_out: CsrMatrix,
    pub k_disk: Arc<CsrMatrix>,
    pub g_bottom: Arc<Vec<f64>>,
}

impl Test2Operators {
    /// `nx` cells per direction on `[-1, 1]^2`; the mesh size is `2 / nx`.
    pub fn new(nx: usize) -> Result<Self> {
        let disk = Disk { center: [0.0, 0.0], radius: 0.5 };
        let mesh = structured_rectangle(-1.0, 1.0, -1.0, 1.0, nx, nx, Some(disk))?;
        let space = Arc::new(FeSpace::triangles(mesh, 1, &[Side::Top])?);
        let k_out = assemble_diffusion(&space, &ScalarField::Subdomain([1.0, 0.0]));
        let k_disk = Arc::new(assemble_diffusion(&space, &ScalarField::Subdomain([0.0, 1.0])));
        let g_bottom = Arc::new(assemble_boundary_load(&space, Side::Bottom, &ScalarField::constant(1.0))?);
        Ok(Self { space, k_out, k_disk, g_bottom })
    }

    /// Split system with `a0 = mu0` on the disk and 1 outside.
    pub fn system(&self, mu0: f64, mus: &[[f64; 2]]) -> Result<SplitSystem> {
        if !(mu0 > 0.0) {
            return Err(Error::NotElliptic { value: mu0, x: 0.0, y: 0.0 });
        }
        let a0 = self.k_out.add_scaled(mu0, &self.k_disk)?;
        let perturbations =
            mus.iter().map(|m| Perturbation::Scaled { factor: m[0] - mu0, base: self.k_disk.clone() }).collect();
        let loads = mus.iter().map(|m| Load::Combination(vec![(m[1], self.g_bottom.clone())])).collect();
        SplitSystem::affine(self.space.clone(), &a0, perturbations, loads)
    }
}

#[derive(Debug, Clone)]
pub struct GroupRun {
    pub group: usize,
    pub members: Vec<usize>,
    pub region: (f64, f64),
    pub center: f64,
    /// `max r(mu1, center)` over members.
    pub rho: f64,
    pub iterations: usize,
    pub converged: bool,
    /// `max_j ||u_j^h - U_{j,n}^h||_H1` when compared.
    pub max_err: Option<f64>,
    pub t_it: f64,
    pub t_ind: Option<f64>,
    /// Factorization and single-solve times of this group's `A0`.
    pub t_fact: f64,
    pub t_solve: f64,
}

#[derive(Debug, Clone)]
pub struct GroupBench {
    pub dofs: usize,
    pub n_s: usize,
    pub grouping: Option<GroupingResult>,
    pub groups: Vec<GroupRun>,
}

impl GroupBench {
    pub fn t_it(&self) -> f64 {
        self.groups.iter().map(|g| g.t_it).sum()
    }

    pub fn t_ind(&self) -> Option<f64> {
        self.groups.iter().map(|g| g.t_ind).sum()
    }

    pub fn max_err(&self) -> Option<f64> {
        self.groups.iter().map(|g| g.max_err).try_fold(0.0_f64, |acc, e| e.map(|e| acc.max(e)))
    }

    pub fn max_iterations(&self) -> usize {
        self.groups.iter().map(|g| g.iterations).max().unwrap_or(0)
    }

    pub fn max_rho(&self) -> f64 {
        self.groups.iter().map(|g| g.rho).fold(0.0, f64::max)
    }

    /// Measured speedup and the cost-model estimate from measured
    /// factorization and solve times.
    pub fn speedup(&self) -> Option<(f64, f64)> {
        let t_ind = self.t_ind()?;
        let n = self.groups.len() as f64;
        let t_fact = self.groups.iter().map(|g| g.t_fact).sum::<f64>() / n;
        let t_solve = self.groups.iter().map(|g| g.t_solve).sum::<f64>() / n;
        let k = (self.max_iterations() + 1) as f64;
        // build cost measured directly: n^p with n = t_fact, p = 1
        Some((t_ind / self.t_it(), estimate_speedup(t_fact, self.n_s as f64, k, 1.0, t_solve)))
    }
}

fn time_kernels(sys: &SplitSystem) -> Result<(f64, f64)> {
    let start = Instant::now();
    let f = Factorization::factorize(sys.a0())?;
    let t_fact = start.elapsed().as_secs_f64();
    let mut b = sys.load(0);
    let reps = 5;
    let start = Instant::now();
    for _ in 0..reps {
        f.solve_in_place(&mut b);
    }
    Ok((t_fact, start.elapsed().as_secs_f64() / reps as f64))
}

fn run_group(
    ops: &Test2Operators,
    mus: &[[f64; 2]],
    group: usize,
    members: Vec<usize>,
    center: f64,
    opts: &IterateOptions,
    compare: bool,
) -> Result<GroupRun> {
    let sub: Vec<[f64; 2]> = members.iter().map(|&i| mus[i]).collect();
    let start = Instant::now();
    let sys = ops.system(center, &sub)?;
    let out = sys.iterate(opts)?;
    let t_it = start.elapsed().as_secs_f64();
    let (max_err, t_ind) = if compare {
        let c = compare_individual(&sys, &out.solutions)?;
        (Some(c.max_diff), Some(c.t_ind))
    } else {
        (None, None)
    };
    let (t_fact, t_solve) = time_kernels(&sys)?;
    let vals: Vec<f64> = sub.iter().map(|m| m[0]).collect();
    Ok(GroupRun {
        group,
        region: (
            vals.iter().copied().fold(f64::INFINITY, f64::min),
            vals.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        ),
        rho: vals.iter().map(|&v| relative_distance(v, center)).fold(0.0, f64::max),
        members,
        center,
        iterations: out.history.iterations_used,
        converged: out.history.converged,
        max_err,
        t_it,
        t_ind,
        t_fact,
        t_solve,
    })
}

/// Groups the `mu1` values into `n_c` clusters and iterates each cluster with
/// `a0 = center` on the disk.
pub fn group_bench(
    ops: &Test2Operators,
    mus: &[[f64; 2]],
    n_c: usize,
    iter_max: usize,
    opts: &IterateOptions,
    compare: bool,
) -> Result<GroupBench> {
    let w: Vec<f64> = mus.iter().map(|m| m[0]).collect();
    let grouping = group_samples(&w, n_c, iter_max)?;
    let mut groups = Vec::new();
    for g in 0..n_c {
        let members = grouping.members(g);
        if members.is_empty() {
            continue;
        }
        groups.push(run_group(ops, mus, g, members, grouping.centers[g], opts, compare)?);
    }
    Ok(GroupBench { dofs: ops.space.num_dofs(), n_s: mus.len(), grouping: Some(grouping), groups })
}

/// One group over all samples with `a0` on the disk from `strategy`.
pub fn single_group(
    ops: &Test2Operators,
    mus: &[[f64; 2]],
    strategy: A0Strategy,
    opts: &IterateOptions,
    compare: bool,
) -> Result<GroupBench> {
    let w: Vec<f64> = mus.iter().map(|m| m[0]).collect();
    let center = shared_disk_value(&w, strategy)?;
    let run = run_group(ops, mus, 0, (0..mus.len()).collect(), center, opts, compare)?;
    Ok(GroupBench { dofs: ops.space.num_dofs(), n_s: mus.len(), grouping: None, groups: vec![run] })
}

fn shared_disk_value(w: &[f64], strategy: A0Strategy) -> Result<f64> {
    if w.is_empty() {
        return Err(Error::InvalidArgument("no samples".into()));
    }
    Ok(match strategy {
        A0Strategy::Mean => w.iter().sum::<f64>() / w.len() as f64,
        A0Strategy::Max | A0Strategy::Sup => w.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        A0Strategy::Value(v) => v,
    })
}
