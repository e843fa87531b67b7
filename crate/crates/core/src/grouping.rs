//! Clustering of scalar sample values under the relative distance
//! `r(x, v) = |x - v| / |v|`.
//!
//! Each pass assigns every sample to its nearest center (ties go to the
//! smaller group index), then moves each center to the mean of its members.
//! The loop stops after a pass with no transfers.

use std::io::Write;

use crate::error::{Error, Result};
use crate::splitter::sci;

/// Relative distance of `x` from center `v`.
#[inline]
pub fn relative_distance(x: f64, v: f64) -> f64 {
    (x - v).abs() / v.abs()
}

/// Outcome of a grouping run.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupingResult {
    pub centers: Vec<f64>,
    /// `membership[i]` is the group of sample `i`.
    pub membership: Vec<usize>,
    /// Largest relative distance of a member to its center; 0 for empty groups.
    pub per_group_rho: Vec<f64>,
    pub iterations_used: usize,
    pub converged: bool,
    /// Samples that changed group in each pass. Pass 1 of a fresh run counts
    /// every sample.
    pub transfers: Vec<usize>,
}

/// Per-group row of a grouping table.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupSummary {
    pub group: usize,
    pub size: usize,
    pub region_min: f64,
    pub region_max: f64,
    pub center: f64,
    pub rho: f64,
}

impl GroupingResult {
    pub fn num_groups(&self) -> usize {
        self.centers.len()
    }

    pub fn max_rho(&self) -> f64 {
        self.per_group_rho.iter().copied().fold(0.0, f64::max)
    }

    /// Sample indices of group `g`, ascending.
    pub fn members(&self, g: usize) -> Vec<usize> {
        self.membership.iter().enumerate().filter(|(_, m)| **m == g).map(|(i, _)| i).collect()
    }

    pub fn summaries(&self, w: &[f64]) -> Vec<GroupSummary> {
        (0..self.num_groups())
            .map(|g| {
                let vals: Vec<f64> = self.members(g).into_iter().map(|i| w[i]).collect();
                GroupSummary {
                    group: g,
                    size: vals.len(),
                    region_min: vals.iter().copied().fold(f64::INFINITY, f64::min),
                    region_max: vals.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                    center: self.centers[g],
                    rho: self.per_group_rho[g],
                }
            })
            .collect()
    }

    /// CSV `(group, size, region_min, region_max, center, rho)`.
    pub fn to_csv<W: Write>(&self, w: &[f64], out: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(out);
        wr.write_record(["group", "size", "region_min", "region_max", "center", "rho"])?;
        for s in self.summaries(w) {
            wr.write_record([
                s.group.to_string(),
                s.size.to_string(),
                sci(s.region_min),
                sci(s.region_max),
                sci(s.center),
                sci(s.rho),
            ])?;
        }
        wr.flush()?;
        Ok(())
    }
}

fn validate(w: &[f64], n_c: usize) -> Result<()> {
    if n_c == 0 {
        return Err(Error::InvalidArgument("number of groups must be at least 1".into()));
    }
    if w.len() < n_c {
        return Err(Error::InvalidArgument(format!("{} samples cannot fill {n_c} groups", w.len())));
    }
    if let Some(x) = w.iter().find(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument(format!("non-finite sample {x}")));
    }
    if let Some(x) = w.iter().find(|x| **x == 0.0) {
        return Err(Error::ZeroMagnitude(*x));
    }
    Ok(())
}

/// Groups `w` into `n_c` clusters from centers spaced evenly over
/// `[min w, max w]` (the midpoint when `n_c = 1`).
pub fn group_samples(w: &[f64], n_c: usize, iter_max: usize) -> Result<GroupingResult> {
    validate(w, n_c)?;
    let lo = w.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let centers: Vec<f64> = if n_c == 1 {
        vec![0.5 * (lo + hi)]
    } else {
        (0..n_c).map(|k| lo + (hi - lo) * k as f64 / (n_c - 1) as f64).collect()
    };
    run(w, centers, vec![usize::MAX; w.len()], iter_max)
}

/// Continues from the centers and membership of `previous`.
pub fn regroup(w: &[f64], previous: &GroupingResult, iter_max: usize) -> Result<GroupingResult> {
    validate(w, previous.num_groups())?;
    if previous.membership.len() != w.len() {
        return Err(Error::DimensionMismatch { expected: w.len(), found: previous.membership.len() });
    }
    run(w, previous.centers.clone(), previous.membership.clone(), iter_max)
}

fn nearest(x: f64, centers: &[f64]) -> usize {
    let mut best = 0;
    let mut best_r = relative_distance(x, centers[0]);
    for (g, &c) in centers.iter().enumerate().skip(1) {
        let r = relative_distance(x, c);
        if r < best_r {
            best = g;
            best_r = r;
        }
    }
    best
}

fn run(w: &[f64], mut centers: Vec<f64>, mut membership: Vec<usize>, iter_max: usize) -> Result<GroupingResult> {
    let n_c = centers.len();
    let mut transfers = Vec::new();
    let mut converged = false;
    for _ in 0..iter_max {
        if let Some(c) = centers.iter().find(|c| **c == 0.0) {
            return Err(Error::ZeroMagnitude(*c));
        }
        let mut moved = 0;
        for (x, m) in w.iter().zip(membership.iter_mut()) {
            let g = nearest(*x, &centers);
            if g != *m {
                *m = g;
                moved += 1;
            }
        }
        transfers.push(moved);

        let mut sums = vec![0.0; n_c];
        let mut counts = vec![0usize; n_c];
        for (x, &m) in w.iter().zip(&membership) {
            sums[m] += x;
            counts[m] += 1;
        }
        let old = centers.clone();
        let mut reseeded = false;
        for g in 0..n_c {
            if counts[g] > 0 {
                centers[g] = sums[g] / counts[g] as f64;
            }
        }
        for g in 0..n_c {
            if counts[g] == 0 {
                // worst-fitting sample against the centers it was assigned with
                let worst = w
                    .iter()
                    .zip(&membership)
                    .enumerate()
                    .filter(|(_, (x, _))| !centers.contains(x))
                    .map(|(i, (x, &m))| (i, relative_distance(*x, old[m])))
                    .fold(None::<(usize, f64)>, |acc, (i, r)| match acc {
                        Some((_, br)) if br >= r => acc,
                        _ => Some((i, r)),
                    });
                if let Some((i, _)) = worst {
                    centers[g] = w[i];
                    reseeded = true;
                }
            }
        }
        if moved == 0 && !reseeded {
            centers = old;
            converged = true;
            break;
        }
    }
    if let Some(c) = centers.iter().find(|c| **c == 0.0) {
        return Err(Error::ZeroMagnitude(*c));
    }
    let mut per_group_rho = vec![0.0; n_c];
    for (x, &m) in w.iter().zip(&membership) {
        if m < n_c {
            per_group_rho[m] = f64::max(per_group_rho[m], relative_distance(*x, centers[m]));
        }
    }
    Ok(GroupingResult { centers, membership, per_group_rho, iterations_used: transfers.len(), converged, transfers })
}
