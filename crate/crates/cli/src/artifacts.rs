use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anisodnl::analysis::REPORT_SCHEMA;
use anisodnl::discretization::io::{write_checkpoint, write_field_csv};
use anisodnl::discretization::{ScalarField, TimeSeries};
use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub const MANIFEST: &str = "manifest.json";

/// Output directory that remembers every file written to it.
pub struct Artifacts {
    root: PathBuf,
    files: Vec<String>,
}

impl Artifacts {
    pub fn create(root: &Path) -> Result<Self> {
        fs::create_dir_all(root).with_context(|| format!("creating {}", root.display()))?;
        Ok(Self {
            root: root.to_path_buf(),
            files: Vec::new(),
        })
    }

    fn open(&mut self, name: &str) -> Result<BufWriter<fs::File>> {
        let path = self.root.join(name);
        let file = fs::File::create(&path).with_context(|| format!("writing {}", path.display()))?;
        if !self.files.iter().any(|f| f == name) {
            self.files.push(name.to_string());
        }
        Ok(BufWriter::new(file))
    }

    pub fn field(&mut self, name: &str, field: &ScalarField) -> Result<()> {
        let mut w = self.open(name)?;
        write_field_csv(field, &mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn checkpoint(&mut self, name: &str, series: &TimeSeries) -> Result<()> {
        let mut w = self.open(name)?;
        write_checkpoint(series, &mut w)?;
        w.flush()?;
        Ok(())
    }

    /// CSV with a header row; numbers use 17 significant digits.
    pub fn table(&mut self, name: &str, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
        let mut w = self.open(name)?;
        writeln!(w, "{}", header.join(","))?;
        for row in rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.17e}")).collect();
            writeln!(w, "{}", cells.join(","))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn json(&mut self, name: &str, value: &impl Serialize) -> Result<()> {
        let mut w = self.open(name)?;
        serde_json::to_writer_pretty(&mut w, value)?;
        writeln!(w)?;
        w.flush()?;
        Ok(())
    }

    /// Writes `manifest.json` listing every artifact with its SHA-256.
    pub fn finish(mut self) -> Result<PathBuf> {
        self.files.sort();
        let mut entries = Vec::new();
        for name in &self.files {
            let bytes = fs::read(self.root.join(name))?;
            entries.push(json!({
                "file": name,
                "bytes": bytes.len(),
                "sha256": hex::encode(Sha256::digest(&bytes)),
            }));
        }
        let manifest = json!({ "schema": REPORT_SCHEMA, "files": entries });
        let path = self.root.join(MANIFEST);
        fs::write(&path, serde_json::to_string_pretty(&manifest)? + "\n")?;
        Ok(path)
    }
}

/// Versioned envelope of every JSON report.
pub fn report(scenario: &str, config: &impl Serialize, violations: &[String], results: Value) -> Value {
    json!({
        "schema": REPORT_SCHEMA,
        "scenario": scenario,
        "config": config,
        "passed": violations.is_empty(),
        "violations": violations,
        "results": results,
    })
}
