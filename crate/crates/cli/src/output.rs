//! Provenance-stamped CSV files.
//!
//! Every table starts with a single `#` comment line carrying the resolved
//! experiment config, seed lists, and artifact version as JSON, followed by a
//! mandatory header row. Floats are written with Rust's shortest-roundtrip
//! formatting, so identical runs produce byte-identical files.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde_json::json;

use crate::RunError;

pub struct CsvSink {
    writer: BufWriter<File>,
    path: PathBuf,
}

impl CsvSink {
    pub fn create(path: &Path, provenance: &serde_json::Value, header: &str) -> Result<Self, RunError> {
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        let mut writer = BufWriter::new(File::create(path)?);
        writeln!(writer, "# {}", compact(provenance))?;
        writeln!(writer, "{header}")?;
        Ok(Self { writer, path: path.to_path_buf() })
    }

    pub fn row(&mut self, line: &str) -> Result<(), RunError> {
        writeln!(self.writer, "{line}")?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<PathBuf, RunError> {
        self.writer.flush()?;
        Ok(self.path)
    }
}

fn compact(v: &serde_json::Value) -> String {
    serde_json::to_string(v).expect("JSON provenance serializes")
}

/// Standard provenance envelope for one experiment run.
pub fn provenance(experiment: &str, resolved: serde_json::Value) -> serde_json::Value {
    json!({
        "artifact_version": env!("CARGO_PKG_VERSION"),
        "experiment": experiment,
        "resolved": resolved,
    })
}

/// Write a JSON sidecar next to binary outputs.
pub fn write_json(path: &Path, value: &serde_json::Value) -> Result<(), RunError> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| RunError::Config(e.to_string()))?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}
