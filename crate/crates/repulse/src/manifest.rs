use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

/// Record of one invocation, written next to its outputs.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: BTreeMap<String, String>,
    pub versions: BTreeMap<String, String>,
    pub outputs: Vec<PathBuf>,
    pub started_unix_ms: u128,
    pub finished_unix_ms: u128,
}

pub fn unix_ms() -> u128 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_millis())
}

impl RunManifest {
    pub fn start(command: &str) -> RunManifest {
        let mut versions = BTreeMap::new();
        versions.insert("repulse".into(), env!("CARGO_PKG_VERSION").into());
        versions.insert("repulse-core".into(), env!("CARGO_PKG_VERSION").into());
        RunManifest {
            command: command.into(),
            parameters: BTreeMap::new(),
            versions,
            outputs: Vec::new(),
            started_unix_ms: unix_ms(),
            finished_unix_ms: 0,
        }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) {
        self.parameters.insert(key.into(), value.to_string());
    }

    /// Writes to `explicit`, else beside the first output; nothing if neither exists.
    pub fn finish(mut self, explicit: Option<&Path>) -> io::Result<Option<PathBuf>> {
        self.finished_unix_ms = unix_ms();
        let path = match (explicit, self.outputs.first()) {
            (Some(p), _) => p.to_path_buf(),
            (None, Some(first)) => {
                let mut name = first.as_os_str().to_owned();
                name.push(".manifest.json");
                PathBuf::from(name)
            }
            (None, None) => return Ok(None),
        };
        let text = serde_json::to_string_pretty(&self).map_err(io::Error::other)?;
        fs::write(&path, text + "\n")?;
        Ok(Some(path))
    }
}
