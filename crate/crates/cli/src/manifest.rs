//! Run manifests written next to every output.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sped::FrequencyGrid;

use crate::error::{CliError, CliResult};
use crate::io::{manifest_path, write_text};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct QuadratureRecord {
    pub label: String,
    pub tolerance: f64,
    pub cutoff: Option<f64>,
    pub step: Option<f64>,
    pub tail_bound: Option<f64>,
    pub nodes: Option<usize>,
    pub oscillation_scale: Option<f64>,
    pub alpha_min: Option<f64>,
    pub alpha_max: Option<f64>,
}

impl QuadratureRecord {
    pub fn from_grid(
        label: &str,
        tolerance: f64,
        grid: &FrequencyGrid,
        alphas: (f64, f64),
    ) -> Self {
        Self {
            label: label.to_string(),
            tolerance,
            cutoff: Some(grid.cutoff()),
            step: Some(grid.step()),
            tail_bound: Some(grid.tail_bound()),
            nodes: Some(grid.len()),
            oscillation_scale: Some(grid.oscillation_scale()),
            alpha_min: Some(alphas.0),
            alpha_max: Some(alphas.1),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub argv: Vec<String>,
    pub parameters: Value,
    pub seed: Option<u64>,
    pub started_at: String,
    pub finished_at: String,
    pub quadrature: Vec<QuadratureRecord>,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str, parameters: Value, seed: Option<u64>) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            argv: std::env::args().collect(),
            parameters,
            seed,
            started_at: now(),
            finished_at: String::new(),
            quadrature: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn output(&mut self, path: &Path) {
        self.outputs.push(path.display().to_string());
    }

    /// Stamp the finish time and write `<output>.manifest.json`.
    pub fn write_for(mut self, output: &Path) -> CliResult<()> {
        self.finished_at = now();
        let text = serde_json::to_string_pretty(&self)
            .map_err(|e| CliError::write(output, std::io::Error::other(e)))?;
        write_text(&manifest_path(output), &(text + "\n"))
    }

    pub fn read_for(output: &Path) -> CliResult<Self> {
        let path = manifest_path(output);
        let text = std::fs::read_to_string(&path)
            .map_err(|_| CliError::MissingFile(format!("missing manifest {}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Data(format!("{}: malformed manifest: {e}", path.display())))
    }
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}
