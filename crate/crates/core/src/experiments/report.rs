use std::fmt;
use std::io::Write;

use crate::error::Result;

/// Named CSV table; cells are preformatted.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: impl Into<String>, header: &[&str]) -> Self {
        Self { name: name.into(), header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len(), "row width of table {}", self.name);
        self.rows.push(row);
    }

    pub fn to_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Column `name` parsed as numbers; empty cells become NaN.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[k].parse().unwrap_or(f64::NAN)).collect())
    }
}

/// Everything one experiment run produces. Timings are kept apart from the
/// deterministic tables.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunReport {
    pub experiment: String,
    pub seed: u64,
    pub config: Vec<(String, String)>,
    pub tables: Vec<Table>,
    pub timings: Table,
    /// Further tables that hold wall-clock values.
    pub timing_tables: Vec<Table>,
    pub summary: Vec<String>,
}

impl RunReport {
    pub fn new(experiment: &str, seed: u64, config: Vec<(String, String)>) -> Self {
        Self {
            experiment: experiment.to_string(),
            seed,
            config,
            tables: Vec::new(),
            timings: Table::new("timings", &["label", "seconds"]),
            timing_tables: Vec::new(),
            summary: Vec::new(),
        }
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn time(&mut self, label: impl Into<String>, seconds: f64) {
        self.timings.push(vec![label.into(), format!("{seconds:.6}")]);
    }

    pub fn note(&mut self, line: impl Into<String>) {
        self.summary.push(line.into());
    }
}

impl fmt::Display for RunReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "experiment: {} (seed {})", self.experiment, self.seed)?;
        for (k, v) in &self.config {
            writeln!(f, "  {k} = {v}")?;
        }
        for line in &self.summary {
            writeln!(f, "{line}")?;
        }
        for t in &self.tables {
            writeln!(f, "[{}] {} rows", t.name, t.rows.len())?;
        }
        Ok(())
    }
}
