use std::sync::Arc;

use proptest::prelude::*;
use splitfem::experiments::{
    contraction_holds, double_glazing_2d, test2_problem, RandomFamily, SampleDraw, Test2Operators, CONTRACTION_FLOOR,
};
use splitfem::fem::{FeSpace, ScalarField};
use splitfem::mesh::{structured_rectangle, uniform_interval, Disk, Side};
use splitfem::sparse::{dense_solve, CsrMatrix};
use splitfem::splitter::{
    build_split_system, compute_rho, IterateOptions, Load, Perturbation, SampleTerms, SplitSystem,
};

fn interval_space(n: usize, degree: usize) -> Arc<FeSpace> {
    Arc::new(FeSpace::interval(uniform_interval(0.0, 1.0, n).unwrap(), degree).unwrap())
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn same_solutions(a: &SplitSystem, b: &SplitSystem, n: usize, tol: f64) {
    let ua = a.iterate(&IterateOptions::fixed(n)).unwrap().solutions;
    let ub = b.iterate(&IterateOptions::fixed(n)).unwrap().solutions;
    for (x, y) in ua.iter().zip(ub.iter()) {
        let scale = x.iter().map(|v| v.abs()).fold(1e-300, f64::max);
        assert!(max_diff(x, y) <= tol * scale, "{} vs scale {scale}", max_diff(x, y));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn constant_coefficients_contract_at_rho(cs in prop::collection::vec(0.6f64..1.4, 1..6), n in 4usize..24) {
        let space = interval_space(n, 1);
        let a: Vec<ScalarField> = cs.iter().map(|&c| ScalarField::constant(c)).collect();
        let mean = cs.iter().sum::<f64>() / cs.len() as f64;
        let a0 = ScalarField::constant(mean);
        let terms: Vec<_> = a.iter().map(|s| SampleTerms::diffusion(s.clone(), ScalarField::constant(1.0))).collect();
        let sys = build_split_system(space.clone(), &a0, None, &terms).unwrap();
        let pairs: Vec<_> = a.iter().map(|s| (s.clone(), None)).collect();
        let rho = compute_rho(&a0, None, &pairs, &space.probe_points()).unwrap();
        let rho = rho.iter().copied().fold(0.0, f64::max);
        prop_assume!(rho < 1.0);
        let out = sys.iterate(&IterateOptions::fixed(12)).unwrap();
        let u0 = sys.iterate(&IterateOptions::fixed(0)).unwrap().solutions;
        let scale = u0.iter().map(|c| splitfem::fem::gram_norm(sys.gram(), c)).fold(0.0, f64::max);
        prop_assert!(contraction_holds(out.history.diffs(), rho, CONTRACTION_FLOOR * scale));
    }

    #[test]
    fn dirichlet_values_stay_zero(eps in prop::collection::vec(-0.5f64..0.5, 1..5), n in 3usize..20, degree in 1usize..3) {
        let space = interval_space(n, degree);
        let terms: Vec<_> = eps
            .iter()
            .map(|&e| SampleTerms::diffusion(
                ScalarField::from_fn_1d(move |x| 1.0 + e * (3.0 * x).sin()),
                ScalarField::from_fn_1d(move |x| 1.0 + e * x),
            ))
            .collect();
        let sys = build_split_system(space.clone(), &ScalarField::constant(1.0), None, &terms).unwrap();
        let mut ok = true;
        sys.iterate_with(&IterateOptions::fixed(6), |_, u| {
            for c in u.iter() {
                ok &= space.dirichlet_dofs().iter().all(|&d| c[d] == 0.0);
            }
        })
        .unwrap();
        prop_assert!(ok);
    }

    #[test]
    fn converged_iterates_match_dense_solves(xs in prop::collection::vec(0.0f64..1.0, 1..6), n in 4usize..40) {
        let family = RandomFamily::approach2(0.5, &xs, splitfem::experiments::A0Strategy::Mean).unwrap();
        let space = interval_space(n, 1);
        let sys = family.build(space.clone(), &xs).unwrap();
        let rho = family.rho(&space, &xs).unwrap().into_iter().fold(0.0, f64::max);
        let tol = 1e-8;
        let out = sys.iterate(&IterateOptions { tol, ..IterateOptions::default() }).unwrap();
        prop_assert!(out.history.converged);
        for j in 0..xs.len() {
            let dense = dense_solve(&sys.full_matrix(j).to_dense(), &sys.load(j)).unwrap();
            prop_assert!(max_diff(out.solutions.col(j), &dense) <= tol / (1.0 - rho));
        }
    }

    #[test]
    fn scaled_perturbations_are_bit_identical(
        factors in prop::collection::vec(-0.4f64..0.4, 1..5),
        n in 3usize..30,
    ) {
        let space = interval_space(n, 2);
        let k = splitfem::fem::assemble_diffusion(&space, &ScalarField::from_fn_1d(|x| 1.0 + x * x));
        let l = Arc::new(splitfem::fem::assemble_load(&space, &ScalarField::from_fn_1d(|x| x.cos())));
        let base = Arc::new(k.clone());
        let scaled: Vec<_> = factors.iter().map(|&f| Perturbation::Scaled { factor: f, base: base.clone() }).collect();
        let assembled: Vec<_> = factors.iter().map(|&f| Perturbation::Assembled(k.scale(f))).collect();
        let combo: Vec<_> = factors.iter().map(|&f| Load::Combination(vec![(1.0 + f, l.clone())])).collect();
        let vecs: Vec<_> = factors.iter().map(|&f| Load::Vector(l.iter().map(|v| (1.0 + f) * v).collect())).collect();
        let a = SplitSystem::affine(space.clone(), &k, scaled, combo).unwrap();
        let b = SplitSystem::affine(space.clone(), &k, assembled, vecs).unwrap();
        let ua = a.iterate(&IterateOptions::fixed(5)).unwrap().solutions;
        let ub = b.iterate(&IterateOptions::fixed(5)).unwrap().solutions;
        prop_assert_eq!(ua.as_slice(), ub.as_slice());
    }
}

#[test]
fn disk_operators_match_generic_assembly() {
    let ops = Test2Operators::new(4).unwrap();
    let mus = SampleDraw::mu_pairs(5, 6);
    let mu0 = 1.3;
    let affine = ops.system(mu0, &mus).unwrap();
    let terms: Vec<_> = mus.iter().map(|&m| test2_problem(m).unwrap()).collect();
    let disk = Disk { center: [0.0, 0.0], radius: 0.5 };
    let mesh = structured_rectangle(-1.0, 1.0, -1.0, 1.0, 4, 4, Some(disk)).unwrap();
    let space = Arc::new(FeSpace::triangles(mesh, 1, &[Side::Top]).unwrap());
    let generic = build_split_system(space, &ScalarField::Subdomain([1.0, mu0]), None, &terms).unwrap();
    same_solutions(&affine, &generic, 6, 1e-12);
}

#[test]
fn random_families_match_generic_assembly() {
    let xs = SampleDraw::uniform(3, 5).values;
    let families = [
        RandomFamily::Approach1 { eps: 0.3 },
        RandomFamily::approach2(2.0, &xs, splitfem::experiments::A0Strategy::Max).unwrap(),
        RandomFamily::convdiff(0.005, &xs).unwrap(),
        RandomFamily::glazing(2.0, 0.1, &xs).unwrap(),
    ];
    for family in families {
        let h = if family.is_2d() { 0.25 } else { 0.125 };
        let space = family.space(h).unwrap();
        let affine = family.build(space.clone(), &xs).unwrap();
        let (a0, b0) = family.shared();
        let terms: Vec<_> = family.samples(&xs).unwrap().iter().map(|m| m.terms()).collect();
        let generic = build_split_system(space, &a0, b0.as_ref(), &terms).unwrap();
        same_solutions(&affine, &generic, 4, 1e-9);
    }
}

#[test]
fn glazing_samples_with_mean_wind_converge_to_direct_solves() {
    let xs = SampleDraw::uniform(8, 4).values;
    let family = RandomFamily::glazing(0.02, 0.1, &xs).unwrap();
    let space = family.space(0.25).unwrap();
    let sys = family.build(space, &xs).unwrap();
    let out = sys.iterate(&IterateOptions { tol: 1e-10, ..IterateOptions::default() }).unwrap();
    assert!(out.history.converged);
    assert_eq!(double_glazing_2d(&xs, 0.02, 0.1).unwrap().len(), 4);
    for j in 0..4 {
        let direct = sys.solve_individual(j).unwrap();
        assert!(max_diff(out.solutions.col(j), &direct) < 1e-9);
    }
}

#[test]
fn single_sample_mean_split_is_exact() {
    let xs = [0.37];
    let space = interval_space(20, 1);
    let family = RandomFamily::approach2(2.0, &xs, splitfem::experiments::A0Strategy::Mean).unwrap();
    let sys = family.build(space, &xs).unwrap();
    assert!(matches!(sys.perturbation(0), Perturbation::Scaled { factor, .. } if *factor == 0.0));
    let out = sys.iterate(&IterateOptions::default()).unwrap();
    assert_eq!(out.history.iterations_used, 1);
    assert_eq!(out.history.max_diffs[0], 0.0);
    assert!(sys.residual_inf(0, out.solutions.col(0)) < 1e-10);
}

#[test]
fn from_parts_uses_the_supplied_gram() {
    let a0 = CsrMatrix::from_dense(&[vec![2.0, 0.0], vec![0.0, 2.0]]).unwrap();
    let a1 = CsrMatrix::from_dense(&[vec![0.5, 0.0], vec![0.0, 0.0]]).unwrap();
    let sys = SplitSystem::from_parts(
        a0,
        vec![Perturbation::Assembled(a1)],
        vec![Load::Vector(vec![1.0, 1.0])],
        CsrMatrix::identity(2),
    )
    .unwrap();
    let out = sys.iterate(&IterateOptions::fixed(2)).unwrap();
    // U0 = (0.5, 0.5), U1 = (0.375, 0.5), U2 = (0.40625, 0.5)
    assert_eq!(out.history.max_diffs, vec![0.125, 0.03125]);
}
