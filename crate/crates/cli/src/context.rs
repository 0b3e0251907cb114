//! Run bookkeeping: where output goes, which format the caller picked, and
//! the manifest sidecar that makes a file reproducible.
//!
//! Output files contain only seed-determined numbers; wall time lives in
//! the manifest alone, so reruns with the same command, parameters, seed,
//! and version rewrite every data file byte for byte.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use serde::Serialize;

use crate::args::{Cli, Format};

#[derive(Serialize)]
struct RunManifest {
    command: String,
    parameters: BTreeMap<String, String>,
    seed: u64,
    tool_version: String,
    wall_time_seconds: f64,
    outputs: Vec<String>,
}

pub struct RunContext {
    pub seed: u64,
    out: Option<PathBuf>,
    format: Option<Format>,
    command: String,
    parameters: BTreeMap<String, String>,
    started: Instant,
    outputs: Vec<PathBuf>,
}

impl RunContext {
    pub fn new(cli: &Cli, command: &str) -> Self {
        let mut parameters = BTreeMap::new();
        if let Some(t) = cli.threads {
            parameters.insert("threads".into(), t.to_string());
        }
        Self {
            seed: cli.seed,
            out: cli.out.clone(),
            format: cli.format,
            command: command.to_string(),
            parameters,
            started: Instant::now(),
            outputs: Vec::new(),
        }
    }

    /// Record an input parameter for the manifest.
    pub fn param(&mut self, key: &str, value: impl Display) {
        self.parameters.insert(key.to_string(), value.to_string());
    }

    pub fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }

    pub fn has_out(&self) -> bool {
        self.out.is_some()
    }

    pub fn out_path(&self) -> Option<&Path> {
        self.out.as_deref()
    }

    /// Write the primary artifact to --out, or print it when running to
    /// stdout.
    pub fn write_primary(&mut self, contents: &str) -> Result<()> {
        match self.out.clone() {
            Some(path) => self.write_file(&path, contents),
            None => {
                print!("{contents}");
                Ok(())
            }
        }
    }

    /// Write a secondary artifact next to --out, named by swapping the
    /// extension for `suffix` (out masses.csv + "summary.json" gives
    /// masses.summary.json). Returns None when running to stdout.
    pub fn write_sibling(&mut self, suffix: &str, contents: &str) -> Result<Option<PathBuf>> {
        let Some(out) = self.out.clone() else {
            return Ok(None);
        };
        let path = sibling_path(&out, suffix);
        self.write_file(&path, contents)?;
        Ok(Some(path))
    }

    fn write_file(&mut self, path: &Path, contents: &str) -> Result<()> {
        fs::write(path, contents)
            .with_context(|| format!("writing {}", path.display()))?;
        self.outputs.push(path.to_path_buf());
        Ok(())
    }

    /// Write the manifest sidecar (for file output) and close the run.
    pub fn finish(self) -> Result<()> {
        let Some(out) = self.out else {
            return Ok(());
        };
        let manifest = RunManifest {
            command: self.command,
            parameters: self.parameters,
            seed: self.seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            wall_time_seconds: self.started.elapsed().as_secs_f64(),
            outputs: self
                .outputs
                .iter()
                .map(|p| p.display().to_string())
                .collect(),
        };
        let path = sibling_path(&out, "manifest.json");
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        Ok(())
    }
}

fn sibling_path(out: &Path, suffix: &str) -> PathBuf {
    let stem = out.with_extension("");
    PathBuf::from(format!("{}.{suffix}", stem.display()))
}
