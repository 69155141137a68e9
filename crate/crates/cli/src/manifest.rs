use std::path::{Path, PathBuf};
use std::time::Instant;

use photon_core::{Error, Result};
use serde::Serialize;
use serde_json::{json, Map, Value};

pub const MANIFEST_FILE: &str = "manifest.json";

/// Written next to every command's outputs.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    command: String,
    tool_version: String,
    config: Value,
    threads: usize,
    seed: Option<u64>,
    inputs: Vec<Value>,
    #[serde(flatten)]
    extra: Map<String, Value>,
    wall_clock_seconds: f64,
}

impl RunManifest {
    pub fn new(command: &str, config: &impl Serialize, threads: usize, inputs: &[(PathBuf, String)], seed: Option<u64>) -> Self {
        Self {
            command: command.to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config: serde_json::to_value(config).unwrap_or(Value::Null),
            threads,
            seed,
            inputs: inputs.iter().map(|(p, h)| json!({"path": p, "sha256": h})).collect(),
            extra: Map::new(),
            wall_clock_seconds: 0.0,
        }
    }

    pub fn with(mut self, key: &str, value: Value) -> Self {
        self.extra.insert(key.to_string(), value);
        self
    }

    pub fn finish(self, dir: &Path, start: Instant) -> Result<()> {
        self.finish_named(dir, MANIFEST_FILE, start)
    }

    pub fn finish_named(mut self, dir: &Path, name: &str, start: Instant) -> Result<()> {
        self.wall_clock_seconds = start.elapsed().as_secs_f64();
        let path = dir.join(name);
        let text = serde_json::to_string_pretty(&self)? + "\n";
        std::fs::write(&path, text).map_err(|e| Error::Io { path, source: e })
    }
}
