use std::str::FromStr;

use super::pipelines::*;
use super::report::{RunReport, Table};
use super::{convergence_order, A0Strategy, SampleDraw, TEST1_EPS};
use crate::error::{Error, Result};
use crate::splitter::{sci, IterateOptions, IterationHistory, StopRule};

/// Names accepted by [`ExperimentSpec::defaults`].
pub const EXPERIMENTS: [&str; 8] = [
    "test1",
    "test2",
    "rand-diff-a1",
    "rand-diff-a2",
    "convdiff-1d",
    "double-glazing-2d",
    "group-bench",
    "speedup-bench",
];

/// Full configuration of one experiment run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub name: String,
    /// Mesh sizes, coarse to fine.
    pub h: Vec<f64>,
    pub nx: usize,
    pub ny: usize,
    pub degree: usize,
    pub eps: Vec<f64>,
    /// Sample counts; benches run one pass per entry.
    pub samples: Vec<usize>,
    pub seed: u64,
    pub tol: f64,
    pub max_iter: usize,
    /// Fixed iteration count; `None` stops on `tol`.
    pub iterations: Option<usize>,
    pub stop: StopRule,
    pub a0: A0Strategy,
    /// Group counts; empty runs one group.
    pub centers: Vec<usize>,
    pub group_iter_max: usize,
    pub delta: f64,
    pub compare_individual: bool,
    pub sweep_eps: Vec<f64>,
    pub sweep_h: f64,
    pub sweep_n: usize,
    pub probe_eps: Vec<f64>,
    /// Mesh size of the stopping-rule run.
    pub stop_h: f64,
    /// Gauss nodes in `X` for the error split; 0 disables it.
    pub split_nodes: usize,
}

fn list<T: FromStr>(value: &str, key: &str, parse: impl Fn(&str) -> Option<T>) -> Result<Vec<T>> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty()).map(|s| parse(s).ok_or_else(|| invalid(key, s))).collect()
}

fn invalid(key: &str, value: &str) -> Error {
    Error::InvalidArgument(format!("invalid value '{value}' for key '{key}'"))
}

/// Accepts `0.01`, `1/128` and `2^-7`.
fn parse_size(s: &str) -> Option<f64> {
    if let Some(k) = s.strip_prefix("2^") {
        return k.parse::<i32>().ok().map(|k| 2f64.powi(k));
    }
    if let Some((a, b)) = s.split_once('/') {
        return Some(a.trim().parse::<f64>().ok()? / b.trim().parse::<f64>().ok()?);
    }
    s.parse().ok()
}

fn one<T: FromStr>(value: &str, key: &str) -> Result<T> {
    value.trim().parse().map_err(|_| invalid(key, value))
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

fn parse_stop(s: &str) -> Option<StopRule> {
    [StopRule::MaxSample, StopRule::MeanOfNorms, StopRule::NormOfMean].into_iter().find(|r| r.name() == s)
}

impl ExperimentSpec {
    /// Defaults of experiment `name`.
    pub fn defaults(name: &str) -> Result<Self> {
        if !EXPERIMENTS.contains(&name) {
            return Err(Error::InvalidArgument(format!(
                "unknown experiment '{name}', expected one of {}",
                EXPERIMENTS.join(", ")
            )));
        }
        let mut s = Self {
            name: name.to_string(),
            h: vec![0.2, 0.1, 0.05, 0.025],
            nx: 64,
            ny: 64,
            degree: 1,
            eps: vec![],
            samples: vec![10_000],
            seed: 2024,
            tol: 1e-4,
            max_iter: 100,
            iterations: Some(10),
            stop: StopRule::MaxSample,
            a0: A0Strategy::Mean,
            centers: vec![],
            group_iter_max: 100,
            delta: 0.1,
            compare_individual: false,
            sweep_eps: vec![0.4, 0.6, 0.8, 0.9],
            sweep_h: 0.01,
            sweep_n: 6,
            probe_eps: vec![2.0, 2.5, 3.0, 3.5],
            stop_h: 0.01,
            split_nodes: 40,
        };
        match name {
            "test1" => {
                s.h = (7..=10).map(|k| 0.5f64.powi(k)).collect();
                s.degree = 2;
                s.samples = vec![5];
                s.iterations = None;
            }
            "test2" => {
                s.samples = vec![500];
                s.iterations = None;
            }
            "rand-diff-a1" => s.eps = vec![0.1],
            "rand-diff-a2" => s.eps = vec![2.0],
            "convdiff-1d" => {
                s.eps = vec![0.005, 0.2];
                s.h = vec![0.01];
            }
            "double-glazing-2d" => s.eps = vec![2.0],
            "group-bench" => {
                s.samples = vec![500];
                s.centers = vec![5, 10, 20, 40, 80, 160];
                s.iterations = None;
            }
            _ => {
                s.samples = vec![100, 500];
                s.centers = vec![10];
                s.iterations = None;
                s.compare_individual = true;
            }
        }
        Ok(s)
    }

    /// Overrides one key; errors name the key.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key.trim() {
            "name" | "experiment" => {
                if v != self.name {
                    return Err(Error::InvalidArgument(format!(
                        "key 'name' is '{v}' but the experiment is '{}'",
                        self.name
                    )));
                }
            }
            "h" => self.h = list(v, "h", parse_size)?,
            "nx" => {
                self.nx = one(v, "nx")?;
                self.ny = self.nx;
            }
            "ny" => self.ny = one(v, "ny")?,
            "degree" => self.degree = one(v, "degree")?,
            "eps" => self.eps = list(v, "eps", |s| s.parse().ok())?,
            "samples" | "J" | "n_s" => self.samples = list(v, key, |s| s.parse().ok())?,
            "seed" => self.seed = one(v, "seed")?,
            "tol" => self.tol = one(v, "tol")?,
            "max_iter" | "max-iter" => self.max_iter = one(v, key)?,
            "iterations" | "n" => self.iterations = if v == "none" || v.is_empty() { None } else { Some(one(v, key)?) },
            "stop" => self.stop = parse_stop(v).ok_or_else(|| invalid("stop", v))?,
            "a0" | "a0_strategy" => self.a0 = v.parse().map_err(|_| invalid(key, v))?,
            "centers" | "n_c" => self.centers = list(v, key, |s| s.parse().ok())?,
            "group_iter_max" => self.group_iter_max = one(v, key)?,
            "delta" => self.delta = one(v, "delta")?,
            "compare_individual" | "compare-individual" => self.compare_individual = one(v, key)?,
            "sweep_eps" => self.sweep_eps = list(v, key, |s| s.parse().ok())?,
            "sweep_h" => self.sweep_h = parse_size(v).ok_or_else(|| invalid(key, v))?,
            "sweep_n" => self.sweep_n = one(v, key)?,
            "probe_eps" => self.probe_eps = list(v, key, |s| s.parse().ok())?,
            "stop_h" => self.stop_h = parse_size(v).ok_or_else(|| invalid(key, v))?,
            "split_nodes" => self.split_nodes = one(v, key)?,
            other => return Err(Error::InvalidArgument(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    /// Applies `key = value` lines; `#` starts a comment.
    pub fn apply_config(&mut self, text: &str) -> Result<()> {
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::InvalidArgument(format!("line {}: expected key = value", lineno + 1)))?;
            self.set(k, v)?;
        }
        Ok(())
    }

    /// Checks the value ranges shared by all experiments.
    pub fn validate(&self) -> Result<()> {
        let bad = |key: &str, why: &str| Err(Error::InvalidArgument(format!("key '{key}': {why}")));
        if !(self.tol > 0.0) {
            return bad("tol", "must be positive");
        }
        if self.samples.is_empty() || self.samples.contains(&0) {
            return bad("samples", "need at least one sample");
        }
        if self.h.is_empty() {
            return bad("h", "need at least one mesh size");
        }
        if self.eps.iter().any(|e| !(*e >= 0.0)) {
            return bad("eps", "must be nonnegative");
        }
        if !(self.delta > 0.0) {
            return bad("delta", "must be positive");
        }
        if self.nx == 0 || self.ny == 0 {
            return bad("nx", "must be positive");
        }
        if self.nx != self.ny {
            return bad("ny", "the disk problem needs nx = ny");
        }
        Ok(())
    }

    /// Every key with its value, in a fixed order.
    pub fn entries(&self) -> Vec<(String, String)> {
        let mut e = vec![
            ("name", self.name.clone()),
            ("h", join(&self.h)),
            ("nx", self.nx.to_string()),
            ("ny", self.ny.to_string()),
            ("degree", self.degree.to_string()),
            ("eps", join(&self.eps)),
            ("samples", join(&self.samples)),
            ("seed", self.seed.to_string()),
            ("tol", self.tol.to_string()),
            ("max_iter", self.max_iter.to_string()),
            ("iterations", self.iterations.map_or("none".into(), |n| n.to_string())),
            ("stop", self.stop.name().to_string()),
            ("a0", self.a0.to_string()),
            ("centers", join(&self.centers)),
            ("group_iter_max", self.group_iter_max.to_string()),
            ("delta", self.delta.to_string()),
            ("compare_individual", self.compare_individual.to_string()),
        ];
        if self.name == "rand-diff-a1" {
            e.push(("sweep_eps", join(&self.sweep_eps)));
            e.push(("sweep_h", self.sweep_h.to_string()));
            e.push(("sweep_n", self.sweep_n.to_string()));
            e.push(("probe_eps", join(&self.probe_eps)));
        }
        if self.name == "rand-diff-a2" {
            e.push(("stop_h", self.stop_h.to_string()));
            e.push(("split_nodes", self.split_nodes.to_string()));
        }
        e.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
    }

    /// Iteration options: fixed count when `iterations` is set.
    pub fn options(&self) -> IterateOptions {
        match self.iterations {
            Some(n) => IterateOptions { stop: self.stop, ..IterateOptions::fixed(n) },
            None => IterateOptions { tol: self.tol, max_iter: self.max_iter, stop: self.stop },
        }
    }

    fn first_eps(&self) -> Result<f64> {
        self.eps.first().copied().ok_or_else(|| Error::InvalidArgument("key 'eps': missing value".into()))
    }

    /// Runs the experiment.
    pub fn run(&self) -> Result<RunReport> {
        self.validate()?;
        let mut report = RunReport::new(&self.name, self.seed, self.entries());
        match self.name.as_str() {
            "test1" => self.run_test1(&mut report)?,
            "test2" => self.run_test2(&mut report)?,
            "rand-diff-a1" => self.run_a1(&mut report)?,
            "rand-diff-a2" => self.run_a2(&mut report)?,
            "convdiff-1d" => self.run_convdiff(&mut report)?,
            "double-glazing-2d" => self.run_glazing(&mut report)?,
            "group-bench" => self.run_group_bench(&mut report)?,
            _ => self.run_speedup(&mut report)?,
        }
        Ok(report)
    }

    fn run_test1(&self, report: &mut RunReport) -> Result<()> {
        let levels = self
            .h
            .iter()
            .map(|&h| {
                let k = -h.log2();
                if (k - k.round()).abs() > 1e-9 || k < 0.5 {
                    Err(invalid("h", &h.to_string()))
                } else {
                    Ok(k.round() as u32)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let cfg = Test1Config {
            levels,
            degree: self.degree,
            a0: self.a0,
            opts: self.options(),
            samples: self.samples[0],
            refined_errors: false,
        };
        let out = run_test1(&cfg)?;
        let labels: Vec<String> = (1..=cfg.samples).map(|j| format!("E{j}")).collect();
        let mut header = vec!["h"];
        header.extend(labels.iter().map(String::as_str));
        let mut errors = Table::new("errors", &header);
        let mut lv = Table::new(
            "levels",
            &["h", "dofs", "iterations", "converged", "max_rho", "max_rho_hat", "max_diff_individual"],
        );
        for l in &out.levels {
            let mut row = vec![sci(l.h)];
            row.extend(l.errors.iter().map(|e| sci(*e)));
            errors.push(row);
            lv.push(vec![
                sci(l.h),
                l.dofs.to_string(),
                l.history.iterations_used.to_string(),
                l.history.converged.to_string(),
                sci(l.rho.max_rho()),
                sci(l.rho.max_rho_hat()),
                sci(l.comparison.max_diff),
            ]);
            report.time(format!("T_it h={}", sci(l.h)), l.t_it);
            report.time(format!("T_ind h={}", sci(l.h)), l.comparison.t_ind);
        }
        let finest = out.levels.last().ok_or_else(|| invalid("h", ""))?;
        let mut rates = Table::new("rates", &["problem", "eps", "rho", "rho_hat", "rate"]);
        for (j, eps) in TEST1_EPS.iter().take(cfg.samples).enumerate() {
            rates.push(vec![
                (j + 1).to_string(),
                eps.to_string(),
                sci(finest.rho.rho[j]),
                sci(finest.rho.rho_hat[j]),
                sci(finest.rho.regression_rate[j]),
            ]);
        }
        report.note(format!(
            "a0 = {}: {} iterations at h = {} (converged: {})",
            cfg.a0,
            finest.history.iterations_used,
            sci(finest.h),
            finest.history.converged
        ));
        report.note(format!(
            "errors at finest h: {}",
            finest.errors.iter().map(|e| sci(*e)).collect::<Vec<_>>().join(", ")
        ));
        report.note(format!(
            "max rho = {}, max rho_hat = {}",
            sci(finest.rho.max_rho()),
            sci(finest.rho.max_rho_hat())
        ));
        report.note(format!(
            "fitted rates: {}",
            finest.rho.regression_rate.iter().map(|e| sci(*e)).collect::<Vec<_>>().join(", ")
        ));
        if out.levels.len() > 1 {
            for j in 0..cfg.samples {
                let e: Vec<f64> = out.levels.iter().map(|l| l.errors[j]).collect();
                report.note(format!("E{} orders: {}", j + 1, fmt_list(&convergence_order(&e)?)));
            }
        }
        report.tables.extend([errors, lv, rates, history_table("history", &finest.history)]);
        Ok(())
    }

    fn draws(&self, count: usize) -> Vec<f64> {
        SampleDraw::uniform(self.seed, count).values
    }

    fn run_a1(&self, report: &mut RunReport) -> Result<()> {
        let j = self.samples[0];
        let xs = self.draws(j);
        let opts = self.options();
        for (i, &eps) in self.eps.iter().enumerate() {
            let cfg = StudyConfig {
                hs: self.h.clone(),
                opts,
                measure: ErrorMeasure::ExpectedError,
                split_nodes: None,
                trace: false,
            };
            let study = run_study(RandomFamily::Approach1 { eps }, &xs, &cfg)?;
            self.push_study(report, &study, &suffix("orders", i, self.eps.len()))?;
        }

        let mut sens = Table::new("sensitivity", &["eps", "rho", "n", "H1_err", "L2_err"]);
        for &eps in &self.sweep_eps {
            let study = approach1_trace(eps, &xs, self.sweep_h, self.sweep_n)?;
            for (n, (h1, l2)) in study.levels[0].trace.iter().enumerate() {
                sens.push(vec![eps.to_string(), sci(study.max_rho()), n.to_string(), sci(*h1), sci(*l2)]);
            }
        }
        let mut probe = Table::new("divergence", &["eps", "rho", "n", "H1_err", "L2_err"]);
        let n_probe = self.iterations.unwrap_or(10);
        for &eps in &self.probe_eps {
            let study = approach1_trace(eps, &xs, self.sweep_h, n_probe)?;
            let (h1, l2) = study.levels[0].trace.last().copied().unwrap_or((f64::NAN, f64::NAN));
            probe.push(vec![eps.to_string(), sci(study.max_rho()), n_probe.to_string(), sci(h1), sci(l2)]);
        }
        report.tables.extend([sens, probe]);
        Ok(())
    }

    fn run_a2(&self, report: &mut RunReport) -> Result<()> {
        let eps = self.first_eps()?;
        let xs = self.draws(self.samples[0]);
        let family = RandomFamily::approach2(eps, &xs, self.a0)?;
        let cfg = StudyConfig {
            hs: self.h.clone(),
            opts: self.options(),
            measure: ErrorMeasure::OfExpectation,
            split_nodes: (self.split_nodes > 0).then_some(self.split_nodes),
            trace: false,
        };
        let study = run_study(family, &xs, &cfg)?;
        if let RandomFamily::Approach2 { a0, .. } = family {
            report.note(format!("a0 = {} ({})", sci(a0), self.a0));
        }
        self.push_study(report, &study, "orders")?;
        let mut split = Table::new("split", &["h", "disc_H1", "mc_H1", "disc_L2", "mc_L2"]);
        for l in &study.levels {
            if let Some(s) = l.split {
                split.push(vec![sci(l.h), sci(s.disc_h1), sci(s.mc_h1), sci(s.disc_l2), sci(s.mc_l2)]);
            }
        }
        if !split.rows.is_empty() {
            report.tables.push(split);
        }

        let stop = stopping_run(family, &xs, self.stop_h, self.tol, self.max_iter)?;
        let lvl = &stop.levels[0];
        let mut t = Table::new("stopping", &["h", "tol", "rule", "iterations", "converged", "H1_err", "L2_err"]);
        t.push(vec![
            sci(lvl.h),
            sci(self.tol),
            StopRule::NormOfMean.name().into(),
            lvl.history.iterations_used.to_string(),
            lvl.history.converged.to_string(),
            sci(lvl.h1),
            sci(lvl.l2),
        ]);
        report.note(format!(
            "stopping at tol {} ({}): {} iterations",
            sci(self.tol),
            StopRule::NormOfMean.name(),
            lvl.history.iterations_used
        ));
        report.tables.push(t);
        report.tables.push(history_table("stopping_history", &lvl.history));
        Ok(())
    }

    fn run_convdiff(&self, report: &mut RunReport) -> Result<()> {
        let xs = self.draws(self.samples[0]);
        let mut t = Table::new("convdiff", &["eps", "h", "rho", "n", "H1_err", "L2_err"]);
        for &eps in &self.eps {
            let family = RandomFamily::convdiff(eps, &xs)?;
            let cfg = StudyConfig {
                hs: self.h.clone(),
                opts: self.options(),
                measure: ErrorMeasure::OfExpectation,
                split_nodes: None,
                trace: true,
            };
            let study = run_study(family, &xs, &cfg)?;
            let rho = study.max_rho();
            report.note(format!(
                "eps = {eps}: rho = {}{}",
                sci(rho),
                if rho >= 1.0 { " (not contractive)" } else { "" }
            ));
            for l in &study.levels {
                t.push(vec![
                    eps.to_string(),
                    sci(l.h),
                    sci(rho),
                    l.history.iterations_used.to_string(),
                    sci(l.h1),
                    sci(l.l2),
                ]);
                report.time(format!("T_it eps={eps} h={}", sci(l.h)), l.t_it);
            }
            if let Some(l) = study.levels.last() {
                report.tables.push(history_table(&format!("history_eps{eps}"), &l.history));
            }
        }
        report.tables.insert(0, t);
        Ok(())
    }

    fn run_glazing(&self, report: &mut RunReport) -> Result<()> {
        let xs = self.draws(self.samples[0]);
        for (i, &eps) in self.eps.iter().enumerate() {
            let family = RandomFamily::glazing(eps, self.delta, &xs)?;
            let cfg = StudyConfig {
                hs: self.h.clone(),
                opts: self.options(),
                measure: ErrorMeasure::OfExpectation,
                split_nodes: None,
                trace: true,
            };
            let study = run_study(family, &xs, &cfg)?;
            if let RandomFamily::Glazing { s0, .. } = family {
                report.note(format!("eps = {eps}: b0 = {} w", sci(s0)));
            }
            self.push_study(report, &study, &suffix("orders", i, self.eps.len()))?;
        }
        Ok(())
    }

    fn push_study(&self, report: &mut RunReport, study: &Study, name: &str) -> Result<()> {
        let mut t = Table::new(name, &["h", "H1_err", "H1_order", "L2_err", "L2_order"]);
        let (h1o, l2o) =
            if study.levels.len() > 1 { (study.h1_orders()?, study.l2_orders()?) } else { (vec![], vec![]) };
        for (k, l) in study.levels.iter().enumerate() {
            let order = |o: &[f64]| if k == 0 { String::new() } else { format!("{:.2}", o[k - 1]) };
            t.push(vec![sci(l.h), sci(l.h1), order(&h1o), sci(l.l2), order(&l2o)]);
            report.time(format!("{name} T_it h={}", sci(l.h)), l.t_it);
        }
        report.note(format!("{name}: eps = {}, rho = {}", study.family.eps(), sci(study.max_rho())));
        if !h1o.is_empty() {
            report.note(format!("  H1 orders {}; L2 orders {}", fmt_list(&h1o), fmt_list(&l2o)));
        }
        report.tables.push(t);
        if let Some(l) = study.levels.last() {
            report.tables.push(history_table(&format!("{name}_history"), &l.history));
        }
        Ok(())
    }

    fn mus(&self, count: usize) -> Vec<[f64; 2]> {
        SampleDraw::mu_pairs(self.seed, count)
    }

    fn run_test2(&self, report: &mut RunReport) -> Result<()> {
        let ops = Test2Operators::new(self.nx)?;
        let mus = self.mus(self.samples[0]);
        let bench = if self.centers.is_empty() || self.centers == [1] {
            single_group(&ops, &mus, self.a0, &self.options(), self.compare_individual)?
        } else {
            group_bench(&ops, &mus, self.centers[0], self.group_iter_max, &self.options(), self.compare_individual)?
        };
        report.tables.push(grouping_table("grouping", &bench));
        push_bench_times(report, "", &bench);
        note_bench(report, &bench);
        Ok(())
    }

    fn run_group_bench(&self, report: &mut RunReport) -> Result<()> {
        let ops = Test2Operators::new(self.nx)?;
        let mus = self.mus(self.samples[0]);
        let mut trend = Table::new("trend", &["n_c", "max_rho", "max_iterations", "max_err"]);
        let centers = if self.centers.is_empty() { vec![1] } else { self.centers.clone() };
        for &n_c in &centers {
            let bench = group_bench(&ops, &mus, n_c, self.group_iter_max, &self.options(), self.compare_individual)?;
            trend.push(vec![
                n_c.to_string(),
                sci(bench.max_rho()),
                bench.max_iterations().to_string(),
                bench.max_err().map_or(String::new(), sci),
            ]);
            report.tables.push(grouping_table(&suffix_with("grouping", n_c, centers.len()), &bench));
            push_bench_times(report, &format!("n_c={n_c} "), &bench);
            report.note(format!(
                "n_c = {n_c}: max rho = {}, max iterations = {}",
                sci(bench.max_rho()),
                bench.max_iterations()
            ));
        }
        report.tables.insert(0, trend);
        Ok(())
    }

    fn run_speedup(&self, report: &mut RunReport) -> Result<()> {
        let ops = Test2Operators::new(self.nx)?;
        let n_c = self.centers.first().copied().unwrap_or(1);
        let mut t = Table::new("speedup", &["N", "J", "K", "T_it", "T_ind", "S_f_measured", "S_f_formula"]);
        for &n_s in &self.samples {
            let mus = self.mus(n_s);
            let bench = group_bench(&ops, &mus, n_c.min(n_s), self.group_iter_max, &self.options(), true)?;
            let (measured, formula) = bench.speedup().ok_or_else(|| invalid("compare_individual", "false"))?;
            let t_ind = bench.t_ind().unwrap_or(f64::NAN);
            t.push(vec![
                bench.dofs.to_string(),
                n_s.to_string(),
                (bench.max_iterations() + 1).to_string(),
                format!("{:.6}", bench.t_it()),
                format!("{t_ind:.6}"),
                format!("{measured:.3}"),
                format!("{formula:.3}"),
            ]);
            report.note(format!(
                "n_s = {n_s}: T_it = {:.3} s, T_ind = {t_ind:.3} s, measured S_f = {measured:.2}, model S_f = {formula:.2}",
                bench.t_it()
            ));
            report.tables.push(grouping_table(&format!("grouping_ns{n_s}"), &bench));
        }
        report.timing_tables.push(t);
        Ok(())
    }
}

fn suffix(name: &str, i: usize, n: usize) -> String {
    if n > 1 {
        format!("{name}_{}", i + 1)
    } else {
        name.to_string()
    }
}

fn suffix_with(name: &str, tag: usize, n: usize) -> String {
    if n > 1 {
        format!("{name}_nc{tag}")
    } else {
        name.to_string()
    }
}

fn fmt_list(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.2}")).collect::<Vec<_>>().join(", ")
}

/// Iteration history as a table.
pub fn history_table(name: &str, h: &IterationHistory) -> Table {
    let header = h.header();
    let refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut t = Table::new(name, &refs);
    for row in h.rows() {
        t.push(row);
    }
    t
}

/// Per-group rows; timing columns live in the timings file.
pub fn grouping_table(name: &str, bench: &GroupBench) -> Table {
    let mut t = Table::new(
        name,
        &["group", "size", "region_min", "region_max", "center", "rho", "iterations", "converged", "max_err"],
    );
    for g in &bench.groups {
        t.push(vec![
            g.group.to_string(),
            g.members.len().to_string(),
            sci(g.region.0),
            sci(g.region.1),
            sci(g.center),
            sci(g.rho),
            g.iterations.to_string(),
            g.converged.to_string(),
            g.max_err.map_or(String::new(), sci),
        ]);
    }
    t
}

fn push_bench_times(report: &mut RunReport, prefix: &str, bench: &GroupBench) {
    for g in &bench.groups {
        report.time(format!("{prefix}group {} T_it", g.group), g.t_it);
        if let Some(t) = g.t_ind {
            report.time(format!("{prefix}group {} T_ind", g.group), t);
        }
    }
    report.time(format!("{prefix}T_it"), bench.t_it());
    if let Some(t) = bench.t_ind() {
        report.time(format!("{prefix}T_ind"), t);
    }
}

fn note_bench(report: &mut RunReport, bench: &GroupBench) {
    report.note(format!(
        "{} samples, {} dofs, {} group(s): max rho = {}, max iterations = {}",
        bench.n_s,
        bench.dofs,
        bench.groups.len(),
        sci(bench.max_rho()),
        bench.max_iterations()
    ));
    if let Some(e) = bench.max_err() {
        report.note(format!("max H1 difference to individual solves = {}", sci(e)));
    }
    if let Some((measured, formula)) = bench.speedup() {
        report.note(format!("S_f measured = {measured:.2}, model = {formula:.2}"));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_exist_for_every_experiment() {
        for name in EXPERIMENTS {
            let s = ExperimentSpec::defaults(name).unwrap();
            s.validate().unwrap();
            assert_eq!(s.entries()[0].1, name);
        }
        assert!(ExperimentSpec::defaults("table11").is_err());
    }

    #[test]
    fn set_reports_the_key() {
        let mut s = ExperimentSpec::defaults("test1").unwrap();
        let msg = s.set("tol", "abc").unwrap_err().to_string();
        assert!(msg.contains("'tol'"), "{msg}");
        let msg = s.set("colour", "1").unwrap_err().to_string();
        assert!(msg.contains("'colour'"), "{msg}");
        s.set("h", "2^-7, 1/256").unwrap();
        assert_eq!(s.h, vec![1.0 / 128.0, 1.0 / 256.0]);
        s.set("J", "1").unwrap();
        assert_eq!(s.samples, vec![1]);
        s.set("a0_strategy", "value:2.0871").unwrap();
        assert_eq!(s.a0, A0Strategy::Value(2.0871));
        s.set("tol", "0").unwrap();
        assert!(s.validate().unwrap_err().to_string().contains("'tol'"));
    }

    #[test]
    fn config_file_lines() {
        let mut s = ExperimentSpec::defaults("rand-diff-a2").unwrap();
        s.apply_config("# comment\nname = rand-diff-a2\neps = 1.5\nn_c = 3\n\nseed=9 # trailing\n").unwrap();
        assert_eq!((s.eps.clone(), s.centers.clone(), s.seed), (vec![1.5], vec![3], 9));
        assert!(s.apply_config("just words").is_err());
        assert!(s.apply_config("name = test1").is_err());
    }

    #[test]
    fn single_problem_test1_report() {
        let mut s = ExperimentSpec::defaults("test1").unwrap();
        s.set("h", "2^-4").unwrap();
        s.set("samples", "1").unwrap();
        let r = s.run().unwrap();
        let lv = r.table("levels").unwrap();
        assert_eq!(lv.column("iterations").unwrap(), vec![1.0]);
        assert_eq!(lv.column("max_rho").unwrap(), vec![0.0]);
        assert_eq!(r.table("errors").unwrap().header, vec!["h", "E1"]);
    }

    #[test]
    fn small_runs_are_deterministic() {
        let mut s = ExperimentSpec::defaults("rand-diff-a2").unwrap();
        s.apply_config("samples = 50\nh = 0.25, 0.125\nsplit_nodes = 4\nstop_h = 0.125").unwrap();
        let a = s.run().unwrap();
        let b = s.run().unwrap();
        assert_eq!(a.tables, b.tables);
        assert!(a.table("orders").is_some() && a.table("stopping").is_some());
    }
}
