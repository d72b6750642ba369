//! JSON sidecars recording how an output file was produced.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Sidecar {
    pub schema_version: u32,
    pub tool: String,
    pub tool_version: String,
    pub command: String,
    /// Command-line arguments after the program name; `gldpc rerun` replays
    /// them with a new output path.
    pub args: Vec<String>,
    /// Fully resolved settings, defaults included.
    pub config: serde_json::Value,
    pub seeds: BTreeMap<String, u64>,
    pub outputs: Vec<PathBuf>,
    pub worker_threads: usize,
    pub runtime_s: f64,
}

impl Sidecar {
    pub fn new(command: &str, args: &[String], config: impl Serialize) -> Result<Self> {
        Ok(Self {
            schema_version: SCHEMA_VERSION,
            tool: env!("CARGO_PKG_NAME").to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            args: args.to_vec(),
            config: serde_json::to_value(config)?,
            seeds: BTreeMap::new(),
            outputs: Vec::new(),
            worker_threads: gldpc::par::worker_count(),
            runtime_s: 0.0,
        })
    }

    pub fn write(&self, csv_path: &Path) -> Result<PathBuf> {
        let path = sidecar_path(csv_path);
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(&path, text + "\n").with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let sidecar: Sidecar = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        if sidecar.schema_version != SCHEMA_VERSION {
            anyhow::bail!(
                "sidecar schema version {} is not supported (expected {SCHEMA_VERSION})",
                sidecar.schema_version
            );
        }
        Ok(sidecar)
    }
}

/// `out.csv` gets `out.json`; other names get `.json` appended.
pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    match csv_path.extension() {
        Some(ext) if ext == "csv" => csv_path.with_extension("json"),
        _ => {
            let mut s = csv_path.as_os_str().to_owned();
            s.push(".json");
            PathBuf::from(s)
        }
    }
}
