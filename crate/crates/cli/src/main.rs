use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::Parser;
use splitfem::experiments::{ExperimentSpec, RunReport, Table, EXPERIMENTS};

/// Runs one split-operator experiment and writes its tables as CSV.
///
/// Values come from the experiment defaults, then the config file, then the
/// flags given here. List-valued keys take comma-separated values.
#[derive(Debug, Parser)]
#[command(name = "splitfem", version)]
struct Args {
    /// Experiment name.
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(EXPERIMENTS))]
    experiment: String,

    /// Mesh sizes, e.g. `0.1,0.05` or `2^-7,2^-8`.
    #[arg(long)]
    h: Option<String>,

    /// Cells per direction of the 2-D disk mesh.
    #[arg(long)]
    nx: Option<String>,

    #[arg(long)]
    ny: Option<String>,

    /// Polynomial degree of the 1-D space.
    #[arg(long)]
    degree: Option<String>,

    /// Perturbation amplitudes.
    #[arg(long)]
    eps: Option<String>,

    /// Sample counts (J, or n_s for the benches).
    #[arg(long)]
    samples: Option<String>,

    /// Group counts n_c.
    #[arg(long)]
    centers: Option<String>,

    #[arg(long)]
    tol: Option<String>,

    #[arg(long)]
    max_iter: Option<String>,

    /// Fixed number of updates; `none` stops on the tolerance.
    #[arg(long)]
    iterations: Option<String>,

    /// `mean`, `max`, `sup` or `value:<v>`.
    #[arg(long)]
    a0: Option<String>,

    #[arg(long)]
    seed: Option<String>,

    /// Output directory for the CSV files.
    #[arg(long, default_value = "out")]
    out: PathBuf,

    /// Also solve every sample directly and report the difference.
    #[arg(long)]
    compare_individual: bool,

    /// File of `key = value` lines applied before the flags.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Extra `key=value` overrides.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

fn build_spec(args: &Args) -> Result<ExperimentSpec> {
    let mut spec = ExperimentSpec::defaults(&args.experiment)?;
    if let Some(path) = &args.config {
        let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        spec.apply_config(&text).with_context(|| format!("in config {}", path.display()))?;
    }
    let flags = [
        ("h", &args.h),
        ("nx", &args.nx),
        ("ny", &args.ny),
        ("degree", &args.degree),
        ("eps", &args.eps),
        ("samples", &args.samples),
        ("centers", &args.centers),
        ("tol", &args.tol),
        ("max_iter", &args.max_iter),
        ("iterations", &args.iterations),
        ("a0", &args.a0),
        ("seed", &args.seed),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            spec.set(key, v)?;
        }
    }
    if args.compare_individual {
        spec.set("compare_individual", "true")?;
    }
    for kv in &args.set {
        let (k, v) = kv.split_once('=').with_context(|| format!("--set expects KEY=VALUE, got '{kv}'"))?;
        spec.set(k, v)?;
    }
    Ok(spec)
}

fn write_table(dir: &Path, table: &Table) -> Result<()> {
    let path = dir.join(format!("{}.csv", table.name));
    let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    table.to_csv(BufWriter::new(file)).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn write_report(dir: &Path, report: &RunReport) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut config = Table::new("config", &["key", "value"]);
    for (k, v) in &report.config {
        config.push(vec![k.clone(), v.clone()]);
    }
    write_table(dir, &config)?;
    for t in report.tables.iter().chain(&report.timing_tables) {
        write_table(dir, t)?;
    }
    write_table(dir, &report.timings)
}

fn main() -> Result<()> {
    let args = Args::parse();
    let spec = build_spec(&args)?;
    let report = spec.run().with_context(|| format!("experiment {} failed", spec.name))?;
    write_report(&args.out, &report)?;
    print!("{report}");
    println!("tables written to {}", args.out.display());
    Ok(())
}
