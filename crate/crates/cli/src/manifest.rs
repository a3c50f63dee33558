//! Run manifest: every file a command wrote, with checksums. Written last,
//! so its presence means the run completed.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use dice_core::control::SolverSettings;
use dice_core::ModelConfig;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Serialize)]
pub struct FileEntry {
    pub path: String,
    pub bytes: usize,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub command: String,
    pub tool_version: String,
    pub status: String,
    pub exit_code: u8,
    /// `None` when the built-in defaults were used.
    pub config_path: Option<String>,
    pub config_hash: String,
    pub out_dir: String,
    pub settings: String,
    pub wall_clock_seconds: f64,
    pub files: Vec<FileEntry>,
    #[serde(skip)]
    root: PathBuf,
    #[serde(skip)]
    started: Instant,
}

impl Manifest {
    pub fn new(
        root: &Path,
        command: &str,
        config_path: Option<&Path>,
        config: &ModelConfig,
        settings: &SolverSettings,
    ) -> Self {
        Manifest {
            command: command.into(),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            status: String::new(),
            exit_code: 0,
            config_path: config_path.map(|p| p.display().to_string()),
            config_hash: config.hash(),
            out_dir: root.display().to_string(),
            settings: settings.to_string(),
            wall_clock_seconds: 0.0,
            files: Vec::new(),
            root: root.to_path_buf(),
            started: Instant::now(),
        }
    }

    /// Write `contents` to `rel` under the output directory and record it.
    pub fn write(&mut self, rel: &str, contents: &str) -> io::Result<()> {
        let path = self.root.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(&path, contents)?;
        self.files.push(FileEntry {
            path: rel.to_string(),
            bytes: contents.len(),
            sha256: hex::encode(Sha256::digest(contents.as_bytes())),
        });
        Ok(())
    }

    pub fn finish(mut self) -> io::Result<()> {
        self.wall_clock_seconds = self.started.elapsed().as_secs_f64();
        let json = serde_json::to_string_pretty(&self).map_err(io::Error::other)?;
        fs::write(self.root.join(MANIFEST_FILE), json + "\n")
    }
}
