//! Checks, tables and the per-run output directory: CSV tables, a JSON report and a hashed
//! manifest written before and after each run.

use crate::config::RunConfig;
use crate::error::RunError;
use hawking_core::background::Background;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

/// One measured quantity against its tolerance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    /// Acceptance criterion this check belongs to, if any.
    pub criterion: Option<u8>,
    pub name: String,
    pub measured: f64,
    pub limit: String,
    pub pass: bool,
}

impl Check {
    pub fn at_most(criterion: Option<u8>, name: &str, measured: f64, limit: f64) -> Self {
        Self { criterion, name: name.into(), measured, limit: format!("<= {limit:e}"), pass: measured <= limit }
    }

    pub fn at_least(criterion: Option<u8>, name: &str, measured: f64, limit: f64) -> Self {
        Self { criterion, name: name.into(), measured, limit: format!(">= {limit:e}"), pass: measured >= limit }
    }

    pub fn within(criterion: Option<u8>, name: &str, measured: f64, target: f64, tol: f64) -> Self {
        Self {
            criterion,
            name: name.into(),
            measured,
            limit: format!("{target} +- {tol}"),
            pass: (measured - target).abs() <= tol,
        }
    }

    /// Boolean check; `measured` is 1 when the property holds.
    pub fn holds(criterion: Option<u8>, name: &str, pass: bool) -> Self {
        Self { criterion, name: name.into(), measured: if pass { 1.0 } else { 0.0 }, limit: "holds".into(), pass }
    }

    /// A step that raised an error; recorded as a failed check.
    pub fn failed(criterion: Option<u8>, name: &str, err: &dyn std::fmt::Display) -> Self {
        Self { criterion, name: name.into(), measured: f64::NAN, limit: format!("error: {err}"), pass: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<Vec<u8>, RunError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for r in &self.rows {
            w.write_record(r.iter().map(|v| format!("{v:e}")))?;
        }
        w.into_inner().map_err(|e| RunError::Io(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub experiment: String,
    pub pass: bool,
    pub checks: Vec<Check>,
    #[serde(skip)]
    pub tables: Vec<Table>,
}

impl Report {
    pub fn new(experiment: &str) -> Self {
        Self { experiment: experiment.into(), pass: true, checks: Vec::new(), tables: Vec::new() }
    }

    pub fn check(&mut self, c: Check) {
        self.pass &= c.pass;
        self.checks.push(c);
    }

    pub fn table(&mut self, t: Table) {
        self.tables.push(t);
    }

    /// Appends another report; its table names are prefixed with its experiment name.
    pub fn merge(&mut self, other: Report) {
        for c in other.checks {
            self.check(c);
        }
        for mut t in other.tables {
            t.name = format!("{}_{}", other.experiment.replace('-', "_"), t.name);
            self.tables.push(t);
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Derived constants recorded in every manifest.
pub fn derived_constants(bg: &Background) -> BTreeMap<String, f64> {
    let h = &bg.geom.horizons;
    let s = &bg.star;
    let c = &bg.chart;
    [
        ("r_neg", h.r_neg),
        ("r_minus", h.r_minus),
        ("r_plus", h.r_plus),
        ("kappa_minus", h.kappa_minus),
        ("kappa_plus", h.kappa_plus),
        ("beta_minus", h.beta_minus),
        ("beta_plus", h.beta_plus),
        ("shooting_param", c.shooting_param),
        ("lambda_k_minus", c.lambda_k_minus),
        ("lambda_k_plus", c.lambda_k_plus),
        ("mu_k_minus", c.mu_k_minus),
        ("t_hat_b", s.t_hat_b),
        ("alpha_0", s.alpha_0),
        ("beta_0", s.beta_0),
        ("gamma_0", s.gamma_0),
        ("c_b", s.c_b),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect()
}

#[derive(Debug, Clone, Serialize)]
struct Manifest<'a> {
    experiment: &'a str,
    version: &'a str,
    status: &'a str,
    config: &'a BTreeMap<String, String>,
    config_sha256: String,
    constants: &'a BTreeMap<String, f64>,
    checks_passed: usize,
    checks_total: usize,
    outputs: BTreeMap<String, String>,
    manifest_sha256: String,
}

/// Output directory of one experiment.
pub struct RunDir {
    pub dir: PathBuf,
    experiment: String,
    config: BTreeMap<String, String>,
    constants: BTreeMap<String, f64>,
}

impl RunDir {
    pub fn create(out: &Path, experiment: &str, cfg: &RunConfig, bg: &Background) -> Result<Self, RunError> {
        let dir = out.join(experiment);
        std::fs::create_dir_all(&dir)?;
        Ok(Self { dir, experiment: experiment.into(), config: cfg.echo(), constants: derived_constants(bg) })
    }

    fn write_manifest(&self, status: &str, report: Option<&Report>, outputs: BTreeMap<String, String>) -> Result<String, RunError> {
        let config_json = serde_json::to_vec(&self.config)?;
        let mut m = Manifest {
            experiment: &self.experiment,
            version: env!("CARGO_PKG_VERSION"),
            status,
            config: &self.config,
            config_sha256: sha256_hex(&config_json),
            constants: &self.constants,
            checks_passed: report.map_or(0, |r| r.checks.iter().filter(|c| c.pass).count()),
            checks_total: report.map_or(0, |r| r.checks.len()),
            outputs,
            manifest_sha256: String::new(),
        };
        m.manifest_sha256 = sha256_hex(&serde_json::to_vec(&m)?);
        let text = serde_json::to_string_pretty(&m)?;
        std::fs::write(self.dir.join("manifest.json"), text + "\n")?;
        Ok(m.manifest_sha256)
    }

    /// Manifest with status `running`, written before any computation.
    pub fn start(&self) -> Result<(), RunError> {
        self.write_manifest("running", None, BTreeMap::new()).map(|_| ())
    }

    /// Writes tables and the report, then the final manifest; returns the manifest hash.
    pub fn finish(&self, report: &Report) -> Result<String, RunError> {
        let mut outputs = BTreeMap::new();
        for t in &report.tables {
            let bytes = t.to_csv()?;
            let name = format!("{}.csv", t.name);
            outputs.insert(name.clone(), sha256_hex(&bytes));
            std::fs::write(self.dir.join(name), bytes)?;
        }
        let json = serde_json::to_string_pretty(report)? + "\n";
        outputs.insert("report.json".into(), sha256_hex(json.as_bytes()));
        std::fs::write(self.dir.join("report.json"), json)?;
        self.write_manifest(if report.pass { "pass" } else { "fail" }, Some(report), outputs)
    }

    /// Final manifest for a run that stopped with an error.
    pub fn abort(&self, err: &RunError) -> Result<(), RunError> {
        let mut outputs = BTreeMap::new();
        outputs.insert("error".into(), err.to_string());
        self.write_manifest("error", None, outputs).map(|_| ())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checks_compare_against_their_limits() {
        assert!(Check::at_most(None, "a", 1e-9, 1e-8).pass);
        assert!(!Check::at_least(None, "b", 0.1, 0.2).pass);
        assert!(Check::within(None, "c", 2.1, 2.0, 0.2).pass);
        assert!(!Check::at_most(None, "d", f64::NAN, 1.0).pass);
    }

    #[test]
    fn csv_rows_use_exponent_format() {
        let mut t = Table::new("t", &["x", "y"]);
        t.push(vec![1.0, 0.25]);
        assert_eq!(String::from_utf8(t.to_csv().unwrap()).unwrap(), "x,y\n1e0,2.5e-1\n");
    }
}
