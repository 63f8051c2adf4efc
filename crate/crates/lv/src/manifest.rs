//! Run manifests: every output file is accompanied by a
//! `<output>.manifest.json` echoing the fully resolved configuration, so any
//! run can be replayed bit-identically from its manifest alone. The wall
//! clock lives only here, never in the data outputs.

use serde::{Deserialize, Serialize};
use std::io;
use std::path::{Path, PathBuf};

/// What produced an output file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    /// Subcommand name.
    pub command: String,
    /// Fully resolved arguments (defaults included).
    pub args: serde_json::Value,
    /// Seed the run used.
    pub seed: u64,
    /// Tool version.
    pub version: String,
    /// Wall-clock duration of the run in seconds.
    pub duration_secs: f64,
}

impl RunManifest {
    /// A manifest for `command` with resolved `args`.
    pub fn new(command: &str, args: serde_json::Value, seed: u64, duration_secs: f64) -> Self {
        RunManifest {
            command: command.to_owned(),
            args,
            seed,
            version: env!("CARGO_PKG_VERSION").to_owned(),
            duration_secs,
        }
    }
}

/// Manifest path for an output file: `report.json` → `report.json.manifest.json`.
pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".into());
    name.push_str(".manifest.json");
    out.with_file_name(name)
}

/// Writes the manifest next to its output file.
pub fn write_manifest(out: &Path, manifest: &RunManifest) -> io::Result<()> {
    let text = serde_json::to_string_pretty(manifest).expect("manifest serializes");
    std::fs::write(manifest_path(out), text)
}
