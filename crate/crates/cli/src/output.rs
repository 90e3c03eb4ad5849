//! Atomic output files and run manifests.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Writes `bytes` to a temporary file next to `path`, then renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)
}

/// Collects the files a command writes into its output directory.
#[derive(Debug)]
pub struct OutputDir {
    pub root: PathBuf,
    pub files: Vec<String>,
}

impl OutputDir {
    pub fn new(root: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(root)?;
        Ok(Self { root: root.to_path_buf(), files: Vec::new() })
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf, CliError> {
        let path = self.root.join(name);
        write_atomic(&path, bytes)?;
        if !self.files.iter().any(|f| f == name) {
            self.files.push(name.to_string());
        }
        Ok(path)
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<PathBuf, CliError> {
        let mut s = serde_json::to_string_pretty(value)?;
        s.push('\n');
        self.write(name, s.as_bytes())
    }

    /// Serializes `rows` with a header into `name`.
    pub fn write_csv<R: Serialize>(&mut self, name: &str, rows: &[R]) -> Result<PathBuf, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in rows {
            w.serialize(r)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Runtime(format!("csv: {e}")))?;
        self.write(name, &bytes)
    }

    /// Writes `rows` as `<stem>.csv` or `<stem>.json`.
    pub fn write_table<R: Serialize>(&mut self, stem: &str, rows: &[R], format: Format) -> Result<PathBuf, CliError> {
        match format {
            Format::Csv => self.write_csv(&format!("{stem}.csv"), rows),
            Format::Json => self.write_json(&format!("{stem}.json"), &rows),
        }
    }
}

/// Everything needed to reproduce a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// Arguments after the program name, with any config file expanded.
    pub argv: Vec<String>,
    /// Resolved parameters of the command.
    pub config: serde_json::Value,
    pub seeds: Vec<u64>,
    pub threads: usize,
    pub started_unix: u64,
    pub wall_clock_seconds: f64,
    pub outputs: Vec<String>,
    pub summary: serde_json::Value,
}

impl Manifest {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read manifest '{}': {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("bad manifest '{}': {e}", path.display())))
    }
}
