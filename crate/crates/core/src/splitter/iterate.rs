use std::io::Write;

use super::system::SplitSystem;
use crate::error::{Error, Result};
use crate::fem::gram_norm;
use crate::sparse::Columns;

/// Which difference sequence decides convergence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StopRule {
    /// `max_j ||U_n^j - U_{n-1}^j||`.
    #[default]
    MaxSample,
    /// `(1/J) sum_j ||U_n^j - U_{n-1}^j||`.
    MeanOfNorms,
    /// `||(1/J) sum_j (U_n^j - U_{n-1}^j)||`.
    NormOfMean,
}

impl StopRule {
    pub fn name(self) -> &'static str {
        match self {
            StopRule::MaxSample => "max-sample",
            StopRule::MeanOfNorms => "mean-of-norms",
            StopRule::NormOfMean => "norm-of-mean",
        }
    }
}

/// Iteration controls. `tol = 0` runs exactly `max_iter` updates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterateOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub stop: StopRule,
}

impl Default for IterateOptions {
    fn default() -> Self {
        Self { tol: 1e-4, max_iter: 100, stop: StopRule::MaxSample }
    }
}

impl IterateOptions {
    pub fn fixed(iterations: usize) -> Self {
        Self { tol: 0.0, max_iter: iterations, stop: StopRule::MaxSample }
    }
}

/// Per-iteration record of the fixed-point run. Entry `n - 1` of each diff
/// sequence belongs to update `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationHistory {
    pub max_diffs: Vec<f64>,
    pub mean_diffs: Vec<f64>,
    pub mean_field_diffs: Vec<f64>,
    pub iterations_used: usize,
    pub converged: bool,
    pub stop: StopRule,
    pub tol: f64,
    /// Optional error columns: `(label, value per iterate n = 0..=iterations_used)`.
    pub errors: Vec<(String, Vec<f64>)>,
}

impl IterationHistory {
    /// The sequence selected by the stop rule.
    pub fn diffs(&self) -> &[f64] {
        match self.stop {
            StopRule::MaxSample => &self.max_diffs,
            StopRule::MeanOfNorms => &self.mean_diffs,
            StopRule::NormOfMean => &self.mean_field_diffs,
        }
    }

    pub fn last_diff(&self) -> Option<f64> {
        self.diffs().last().copied()
    }

    pub fn push_errors(&mut self, label: impl Into<String>, values: Vec<f64>) {
        self.errors.push((label.into(), values));
    }

    /// CSV with one row per iterate; the `n = 0` row has empty diff cells.
    /// Column names of [`IterationHistory::rows`].
    pub fn header(&self) -> Vec<String> {
        let mut header = vec!["iteration".to_string(), "max_diff".into(), "mean_diff".into(), "mean_field_diff".into()];
        header.extend(self.errors.iter().map(|(l, _)| l.clone()));
        header
    }

    /// One row per iterate `n = 0..=iterations_used`; diff cells of `n = 0`
    /// are empty.
    pub fn rows(&self) -> Vec<Vec<String>> {
        (0..=self.iterations_used)
            .map(|n| {
                let mut row = vec![n.to_string()];
                for seq in [&self.max_diffs, &self.mean_diffs, &self.mean_field_diffs] {
                    row.push(if n == 0 { String::new() } else { sci(seq[n - 1]) });
                }
                for (_, v) in &self.errors {
                    row.push(v.get(n).map_or(String::new(), |x| sci(*x)));
                }
                row
            })
            .collect()
    }

    pub fn to_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(self.header())?;
        for row in self.rows() {
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Scientific notation with four significant digits.
pub fn sci(x: f64) -> String {
    format!("{x:.3e}")
}

/// Final iterates (one column per sample) and the history.
#[derive(Debug, Clone)]
pub struct IterationOutcome {
    pub solutions: Columns,
    pub history: IterationHistory,
}

fn check_finite(v: &[f64], sample: usize, iteration: usize) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::Diverged { sample, iteration })
    }
}

impl SplitSystem {
    /// Runs the fixed-point iteration for all samples.
    pub fn iterate(&self, opts: &IterateOptions) -> Result<IterationOutcome> {
        self.iterate_with(opts, |_, _| {})
    }

    /// As [`iterate`](Self::iterate), calling `observer(n, U_n)` for
    /// `n = 0` and after every update.
    pub fn iterate_with(
        &self,
        opts: &IterateOptions,
        mut observer: impl FnMut(usize, &Columns),
    ) -> Result<IterationOutcome> {
        if !(opts.tol >= 0.0) {
            return Err(Error::InvalidArgument(format!("tol must be non-negative, got {}", opts.tol)));
        }
        let n = self.dim();
        let j_count = self.num_samples();
        let fact = self.factorization();
        let gram = self.gram();

        let mut cur = Columns::zeros(n, j_count);
        for j in 0..j_count {
            let col = cur.col_mut(j);
            self.loads()[j].write_into(col);
            fact.solve_in_place(col);
            check_finite(col, j, 0)?;
        }
        observer(0, &cur);

        let mut next = Columns::zeros(n, j_count);
        let mut diff = vec![0.0; n];
        let mut sum_diff = vec![0.0; n];
        let mut history = IterationHistory {
            max_diffs: Vec::new(),
            mean_diffs: Vec::new(),
            mean_field_diffs: Vec::new(),
            iterations_used: 0,
            converged: false,
            stop: opts.stop,
            tol: opts.tol,
            errors: Vec::new(),
        };
        for it in 1..=opts.max_iter {
            sum_diff.fill(0.0);
            let (mut max_d, mut sum_d) = (0.0_f64, 0.0);
            for j in 0..j_count {
                let prev = cur.col(j);
                let col = next.col_mut(j);
                self.loads()[j].write_into(col);
                self.perturbation(j).subtract_from(prev, col);
                fact.solve_in_place(col);
                check_finite(col, j, it)?;
                for ((d, s), (a, b)) in diff.iter_mut().zip(sum_diff.iter_mut()).zip(col.iter().zip(prev)) {
                    *d = a - b;
                    *s += *d;
                }
                let dn = gram_norm(gram, &diff);
                max_d = max_d.max(dn);
                sum_d += dn;
            }
            sum_diff.iter_mut().for_each(|s| *s /= j_count as f64);
            std::mem::swap(&mut cur, &mut next);
            history.max_diffs.push(max_d);
            history.mean_diffs.push(sum_d / j_count as f64);
            history.mean_field_diffs.push(gram_norm(gram, &sum_diff));
            history.iterations_used = it;
            observer(it, &cur);
            let d = history.last_diff().unwrap();
            if d < opts.tol {
                history.converged = true;
                break;
            }
        }
        Ok(IterationOutcome { solutions: cur, history })
    }
}
