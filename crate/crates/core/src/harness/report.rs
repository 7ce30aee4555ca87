use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use super::config::sha256_hex;
use crate::error::{Error, Result};

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
    #[serde(rename = "in")]
    Within,
}

/// One tested inequality.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    /// inequality identifier, e.g. `mode_ceiling`
    pub id: String,
    pub value: Option<f64>,
    pub relation: Relation,
    /// bound (or [lo, hi] for `in`)
    pub bound: Vec<f64>,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    pub fn at_most(id: &str, value: f64, bound: f64) -> Check {
        Check::make(id, value, Relation::AtMost, vec![bound], value <= bound)
    }

    pub fn at_least(id: &str, value: f64, bound: f64) -> Check {
        Check::make(id, value, Relation::AtLeast, vec![bound], value >= bound)
    }

    pub fn within(id: &str, value: f64, lo: f64, hi: f64) -> Check {
        Check::make(
            id,
            value,
            Relation::Within,
            vec![lo, hi],
            (lo..=hi).contains(&value),
        )
    }

    /// Check that holds vacuously (no data to test); value is reported as null.
    pub fn vacuous(id: &str, relation: Relation, bound: Vec<f64>, note: &str) -> Check {
        Check {
            id: id.into(),
            value: None,
            relation,
            bound,
            passed: true,
            note: Some(note.into()),
        }
    }

    fn make(id: &str, value: f64, relation: Relation, bound: Vec<f64>, ok: bool) -> Check {
        Check {
            id: id.into(),
            value: value.is_finite().then_some(value),
            relation,
            bound,
            passed: ok && !value.is_nan(),
            note: None,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Check {
        self.note = Some(note.into());
        self
    }

    pub fn prefixed(mut self, prefix: &str) -> Check {
        self.id = format!("{prefix}/{}", self.id);
        self
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScatterReport {
    pub schema: u32,
    pub experiment: String,
    pub config_hash: String,
    pub seed: u64,
    pub crate_version: &'static str,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub metrics: Value,
    pub files: Vec<String>,
    pub unused_config_keys: Vec<String>,
}

impl ScatterReport {
    pub fn check(&self, id: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.id == id)
    }

    pub fn failed(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Output directory that records every file it writes.
#[derive(Debug)]
pub struct OutDir {
    root: Option<PathBuf>,
    pub files: Vec<String>,
}

impl OutDir {
    pub fn new(root: Option<&Path>) -> Result<OutDir> {
        if let Some(r) = root {
            std::fs::create_dir_all(r)?;
        }
        Ok(OutDir {
            root: root.map(Path::to_path_buf),
            files: Vec::new(),
        })
    }

    pub fn root(&self) -> Option<&Path> {
        self.root.as_deref()
    }

    pub fn is_enabled(&self) -> bool {
        self.root.is_some()
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        if let Some(r) = &self.root {
            std::fs::write(r.join(name), bytes)?;
            self.files.push(name.to_string());
        }
        Ok(())
    }

    /// RFC-4180 CSV from a header and rows of numbers.
    pub fn write_csv(
        &mut self,
        name: &str,
        header: &[&str],
        rows: impl IntoIterator<Item = Vec<f64>>,
    ) -> Result<()> {
        if !self.is_enabled() {
            return Ok(());
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header)?;
        for r in rows {
            w.write_record(r.iter().map(|v| format!("{v:e}")))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        self.write(name, &bytes)
    }

    /// report.json plus manifest.json with a SHA-256 per file.
    pub fn finish(&mut self, report: &ScatterReport) -> Result<()> {
        let Some(root) = self.root.clone() else {
            return Ok(());
        };
        let mut json = serde_json::to_vec_pretty(report)?;
        json.push(b'\n');
        self.write("report.json", &json)?;
        let files: Vec<Value> = self
            .files
            .iter()
            .map(|f| {
                let bytes = std::fs::read(root.join(f))?;
                Ok(serde_json::json!({ "name": f, "bytes": bytes.len(), "sha256": sha256_hex(&bytes) }))
            })
            .collect::<Result<_>>()?;
        let manifest = serde_json::json!({
            "schema": SCHEMA,
            "experiment": report.experiment,
            "config_hash": report.config_hash,
            "seed": report.seed,
            "crate_version": report.crate_version,
            "files": files,
        });
        let mut m = serde_json::to_vec_pretty(&manifest)?;
        m.push(b'\n');
        std::fs::write(root.join("manifest.json"), m)?;
        Ok(())
    }
}

/// Process exit code for a finished report or an error.
pub fn exit_code(outcome: &Result<ScatterReport>) -> i32 {
    match outcome {
        Ok(r) if r.passed => 0,
        Ok(_) => 2,
        Err(Error::Guard(_)) => 3,
        Err(Error::Config(_) | Error::Io(_)) => 1,
        Err(_) => 4,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_relations() {
        assert!(Check::at_most("x", 1.0, 1.0).passed);
        assert!(!Check::at_most("x", 1.1, 1.0).passed);
        assert!(Check::at_least("x", 0.2, 0.1).passed);
        assert!(!Check::within("x", 0.9, 0.2, 0.8).passed);
        assert!(!Check::at_most("x", f64::NAN, 1.0).passed);
        let c = Check::at_most("x", f64::INFINITY, 1.0);
        assert!(!c.passed && c.value.is_none());
    }

    #[test]
    fn exit_codes() {
        let r = |passed| ScatterReport {
            schema: SCHEMA,
            experiment: "modes".into(),
            config_hash: String::new(),
            seed: 0,
            crate_version: "",
            passed,
            checks: vec![],
            metrics: Value::Null,
            files: vec![],
            unused_config_keys: vec![],
        };
        assert_eq!(exit_code(&Ok(r(true))), 0);
        assert_eq!(exit_code(&Ok(r(false))), 2);
        assert_eq!(exit_code(&Err(Error::Guard("big".into()))), 3);
        assert_eq!(exit_code(&Err(Error::NotConverged("x".into()))), 4);
        assert_eq!(exit_code(&Err(Error::config("x"))), 1);
    }
}
