use std::collections::BTreeMap;
use std::path::Path;

use chrono::{DateTime, Utc};
use serde::Serialize;

use crate::CliResult;

/// Run manifest written beside every command's outputs. Reruns with equal
/// manifests reproduce the outputs bit-exactly (timestamps excluded).
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: BTreeMap<String, String>,
    pub seed: u64,
    pub tool_version: String,
    pub started: DateTime<Utc>,
    pub finished: Option<DateTime<Utc>>,
}

impl RunManifest {
    pub fn start(command: &str, seed: u64) -> RunManifest {
        RunManifest {
            command: command.to_string(),
            config: BTreeMap::new(),
            seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            started: Utc::now(),
            finished: None,
        }
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.config.insert(key.to_string(), value.to_string());
    }

    /// Stamps the finish time and writes `manifest.json` into `out_dir`.
    pub fn finish(mut self, out_dir: &Path) -> CliResult<()> {
        self.finished = Some(Utc::now());
        let file = std::fs::File::create(out_dir.join("manifest.json"))?;
        serde_json::to_writer_pretty(file, &self).map_err(std::io::Error::from)?;
        Ok(())
    }
}
