use std::collections::BTreeSet;

use proptest::prelude::*;
use splitfem::experiments::SampleDraw;
use splitfem::grouping::{group_samples, regroup, relative_distance};
use splitfem::Error;

fn samples() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.1f64..10.0, 4..60)
}

fn contents(w: &[f64], membership: &[usize], n_c: usize) -> BTreeSet<Vec<u64>> {
    (0..n_c)
        .map(|g| {
            let mut v: Vec<u64> =
                w.iter().zip(membership).filter(|(_, m)| **m == g).map(|(x, _)| x.to_bits()).collect();
            v.sort_unstable();
            v
        })
        .collect()
}

proptest! {
    #[test]
    fn membership_is_a_partition(w in samples(), n_c in 1usize..5) {
        let g = group_samples(&w, n_c, 200).unwrap();
        prop_assert_eq!(g.membership.len(), w.len());
        prop_assert!(g.membership.iter().all(|&m| m < n_c));
        let total: usize = (0..n_c).map(|k| g.members(k).len()).sum();
        prop_assert_eq!(total, w.len());
    }

    #[test]
    fn converged_centers_are_member_means(w in samples(), n_c in 1usize..5) {
        let g = group_samples(&w, n_c, 500).unwrap();
        prop_assume!(g.converged);
        for k in 0..n_c {
            let m = g.members(k);
            prop_assert!(!m.is_empty());
            let mean = m.iter().map(|&i| w[i]).sum::<f64>() / m.len() as f64;
            prop_assert!((g.centers[k] - mean).abs() <= 1e-12 * mean.abs());
            let rho = m.iter().map(|&i| relative_distance(w[i], g.centers[k])).fold(0.0, f64::max);
            prop_assert!((g.per_group_rho[k] - rho).abs() <= 1e-15);
        }
        prop_assert_eq!(*g.transfers.last().unwrap(), 0);
    }

    #[test]
    fn regrouping_a_converged_result_is_idle(w in samples(), n_c in 1usize..5) {
        let g = group_samples(&w, n_c, 500).unwrap();
        prop_assume!(g.converged);
        let again = regroup(&w, &g, 10).unwrap();
        prop_assert_eq!(&again.transfers, &vec![0]);
        prop_assert_eq!(&again.membership, &g.membership);
        prop_assert_eq!(&again.centers, &g.centers);
    }

    #[test]
    fn permutation_keeps_group_contents(w in samples(), n_c in 1usize..4, seed in 0u64..1000) {
        let mut perm: Vec<usize> = (0..w.len()).collect();
        let keys = SampleDraw::uniform(seed, w.len()).values;
        perm.sort_by(|a, b| keys[*a].total_cmp(&keys[*b]));
        let pw: Vec<f64> = perm.iter().map(|&i| w[i]).collect();
        let a = group_samples(&w, n_c, 500).unwrap();
        let b = group_samples(&pw, n_c, 500).unwrap();
        prop_assume!(a.converged && b.converged);
        prop_assert_eq!(contents(&w, &a.membership, n_c), contents(&pw, &b.membership, n_c));
    }

    #[test]
    fn negative_samples_work_by_magnitude(w in samples(), n_c in 1usize..4) {
        let neg: Vec<f64> = w.iter().map(|x| -x).collect();
        let a = group_samples(&w, n_c, 500).unwrap();
        let b = group_samples(&neg, n_c, 500).unwrap();
        prop_assert_eq!(a.per_group_rho.len(), b.per_group_rho.len());
        prop_assert!(b.per_group_rho.iter().all(|r| r.is_finite()));
    }
}

#[test]
fn splitting_a_group_does_not_raise_its_rho() {
    for seed in 0..10 {
        let w: Vec<f64> = SampleDraw::mu_pairs(seed, 500).iter().map(|m| m[0]).collect();
        let g = group_samples(&w, 5, 500).unwrap();
        for k in 0..5 {
            let sub: Vec<f64> = g.members(k).into_iter().map(|i| w[i]).collect();
            if sub.len() < 2 {
                continue;
            }
            let split = group_samples(&sub, 2, 500).unwrap();
            assert!(split.max_rho() <= g.per_group_rho[k] + 1e-12, "seed {seed} group {k}");
        }
    }
}

#[test]
fn more_groups_shrink_rho_on_the_bench_configuration() {
    let w: Vec<f64> = SampleDraw::mu_pairs(2024, 2500).iter().map(|m| m[0]).collect();
    let rhos: Vec<f64> =
        [5, 10, 20, 40, 80, 160].iter().map(|&n| group_samples(&w, n, 100).unwrap().max_rho()).collect();
    assert!(rhos.windows(2).all(|p| p[1] <= p[0]), "{rhos:?}");
}

#[test]
fn zero_magnitudes_are_reported() {
    assert_eq!(group_samples(&[2.0, 0.0, 3.0], 2, 10), Err(Error::ZeroMagnitude(0.0)));
}
