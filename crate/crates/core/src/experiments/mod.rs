//! Catalog of manufactured and random test problems, Monte Carlo helpers and
//! the pipelines that turn them into error, rate and timing tables.
//!
//! Random draws come from `ChaCha8Rng::seed_from_u64(seed)`; the k-th value
//! of a draw is the k-th call to `gen::<f64>()`, uniform on `[0, 1)`.

mod pipelines;
mod problems;
mod report;
mod spec;

use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fem::ScalarField;
use crate::mesh::Point;

pub use pipelines::*;
pub use problems::*;
pub use report::{RunReport, Table};
pub use spec::{ExperimentSpec, EXPERIMENTS};

/// How the shared coefficient `a0` is derived from the sample coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum A0Strategy {
    /// Pointwise sample mean.
    Mean,
    /// Pointwise sample maximum.
    Max,
    /// Constant `max_j max_x |a_j(x)|` over the probe points.
    Sup,
    /// Given constant.
    Value(f64),
}

impl FromStr for A0Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "mean" => Ok(A0Strategy::Mean),
            "max" => Ok(A0Strategy::Max),
            "sup" => Ok(A0Strategy::Sup),
            other => {
                let v = other
                    .strip_prefix("value:")
                    .and_then(|v| v.parse::<f64>().ok())
                    .ok_or_else(|| Error::InvalidArgument(format!("unknown a0 strategy '{other}'")))?;
                Ok(A0Strategy::Value(v))
            }
        }
    }
}

impl std::fmt::Display for A0Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            A0Strategy::Mean => f.write_str("mean"),
            A0Strategy::Max => f.write_str("max"),
            A0Strategy::Sup => f.write_str("sup"),
            A0Strategy::Value(v) => write!(f, "value:{v}"),
        }
    }
}

fn constant_values(samples: &[ScalarField]) -> Option<Vec<[f64; 2]>> {
    samples
        .iter()
        .map(|s| match s {
            ScalarField::Constant(c) => Some([*c, *c]),
            ScalarField::Subdomain(v) => Some(*v),
            ScalarField::Function(_) => None,
        })
        .collect()
}

/// Builds `a0` from the sample coefficients. Piecewise constant samples give
/// a piecewise constant `a0`; otherwise the mean and max are evaluated
/// pointwise over all samples.
pub fn choose_a0(strategy: A0Strategy, samples: &[ScalarField], probes: &[(Point, u8)]) -> Result<ScalarField> {
    if samples.is_empty() {
        return Err(Error::InvalidArgument("a0 needs at least one sample".into()));
    }
    let j = samples.len() as f64;
    if let Some(vals) = constant_values(samples) {
        let all_const = samples.iter().all(|s| matches!(s, ScalarField::Constant(_)));
        let pick = |k: usize| -> f64 {
            match strategy {
                A0Strategy::Mean => vals.iter().map(|v| v[k]).sum::<f64>() / j,
                _ => vals.iter().map(|v| v[k]).fold(f64::NEG_INFINITY, f64::max),
            }
        };
        match strategy {
            A0Strategy::Mean | A0Strategy::Max => {
                return Ok(if all_const {
                    ScalarField::Constant(pick(0))
                } else {
                    ScalarField::Subdomain([pick(0), pick(1)])
                });
            }
            A0Strategy::Sup if all_const => {
                return Ok(ScalarField::Constant(vals.iter().map(|v| v[0].abs()).fold(0.0, f64::max)));
            }
            _ => {}
        }
    }
    Ok(match strategy {
        A0Strategy::Value(v) => ScalarField::Constant(v),
        A0Strategy::Sup => ScalarField::Constant(
            samples.iter().flat_map(|s| probes.iter().map(move |&(p, t)| s.eval(p, t).abs())).fold(0.0, f64::max),
        ),
        A0Strategy::Mean => {
            let s = samples.to_vec();
            ScalarField::from_tagged_fn(move |p, t| s.iter().map(|a| a.eval(p, t)).sum::<f64>() / j)
        }
        A0Strategy::Max => {
            let s = samples.to_vec();
            ScalarField::from_tagged_fn(move |p, t| s.iter().map(|a| a.eval(p, t)).fold(f64::NEG_INFINITY, f64::max))
        }
    })
}

/// Reproducible uniform values on `[0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleDraw {
    pub seed: u64,
    pub values: Vec<f64>,
}

impl SampleDraw {
    pub fn uniform(seed: u64, count: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self { seed, values: (0..count).map(|_| rng.gen::<f64>()).collect() }
    }

    /// `count` parameter pairs `(0.1 + 9.9 u, -1 + 2 u')`, with `u` and `u'`
    /// consecutive values of the stream.
    pub fn mu_pairs(seed: u64, count: usize) -> Vec<[f64; 2]> {
        Self::uniform(seed, 2 * count).values.chunks_exact(2).map(|c| [0.1 + 9.9 * c[0], -1.0 + 2.0 * c[1]]).collect()
    }
}

/// Arithmetic mean of equally long dof vectors.
pub fn mc_expectation<'a>(solutions: impl IntoIterator<Item = &'a [f64]>) -> Result<Vec<f64>> {
    let mut it = solutions.into_iter();
    let first = it.next().ok_or_else(|| Error::InvalidArgument("expectation of no samples".into()))?;
    let mut sum = first.to_vec();
    let mut count = 1usize;
    for v in it {
        if v.len() != sum.len() {
            return Err(Error::DimensionMismatch { expected: sum.len(), found: v.len() });
        }
        sum.iter_mut().zip(v).for_each(|(s, x)| *s += x);
        count += 1;
    }
    let c = count as f64;
    sum.iter_mut().for_each(|s| *s /= c);
    Ok(sum)
}

/// `log2(e_k / e_{k+1})` for each adjacent pair of halving meshes.
pub fn convergence_order(errors: &[f64]) -> Result<Vec<f64>> {
    if errors.len() < 2 {
        return Err(Error::InvalidArgument("orders need at least two errors".into()));
    }
    if let Some(e) = errors.iter().find(|e| !(**e > 0.0)) {
        return Err(Error::InvalidArgument(format!("orders need positive errors, got {e}")));
    }
    Ok(errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect())
}
