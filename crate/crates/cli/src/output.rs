//! Run directories: an exclusive lock, atomic file writes and a manifest
//! written last.

use std::fs::{self, OpenOptions};
use std::io::{ErrorKind, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::failure::{CmdResult, Failure};

pub const LOCK_FILE: &str = ".lock";
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub spec: Value,
    pub tool_version: String,
    pub wall_time: f64,
    pub outputs: Vec<String>,
    pub checksums: serde_json::Map<String, Value>,
}

pub struct RunDir {
    dir: PathBuf,
    started: Instant,
    outputs: Vec<(String, String)>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl RunDir {
    /// Create `dir` if needed and take its lock. A leftover manifest from an
    /// earlier run is removed so that it never describes this run's files.
    pub fn open(dir: &Path) -> CmdResult<Self> {
        fs::create_dir_all(dir)
            .map_err(|e| Failure::Usage(format!("cannot create output directory {}: {e}", dir.display())))?;
        let lock = dir.join(LOCK_FILE);
        match OpenOptions::new().write(true).create_new(true).open(&lock) {
            Ok(mut f) => writeln!(f, "{}", std::process::id())?,
            Err(e) if e.kind() == ErrorKind::AlreadyExists => {
                return Err(Failure::Usage(format!(
                    "output directory {} is in use by another run (remove {} if it is stale)",
                    dir.display(),
                    lock.display()
                )))
            }
            Err(e) => return Err(e.into()),
        }
        let run = RunDir {
            dir: dir.to_path_buf(),
            started: Instant::now(),
            outputs: Vec::new(),
        };
        match fs::remove_file(dir.join(MANIFEST_FILE)) {
            Err(e) if e.kind() != ErrorKind::NotFound => return Err(e.into()),
            _ => {}
        }
        Ok(run)
    }

    /// Write through `name.partial` and rename into place.
    fn write_atomic(&self, name: &str, bytes: &[u8]) -> CmdResult<()> {
        let path = self.dir.join(name);
        let partial = self.dir.join(format!("{name}.partial"));
        let mut f = fs::File::create(&partial)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&partial, &path)?;
        Ok(())
    }

    pub fn write(&mut self, name: &str, contents: &str) -> CmdResult<()> {
        self.write_atomic(name, contents.as_bytes())?;
        self.outputs.push((name.to_string(), sha256_hex(contents.as_bytes())));
        Ok(())
    }

    pub fn finish(self, command: &str, spec: Value) -> CmdResult<()> {
        let manifest = RunManifest {
            command: command.to_string(),
            spec,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            wall_time: self.started.elapsed().as_secs_f64(),
            outputs: self.outputs.iter().map(|(n, _)| n.clone()).collect(),
            checksums: self
                .outputs
                .iter()
                .map(|(n, h)| (n.clone(), Value::String(h.clone())))
                .collect(),
        };
        let json = serde_json::to_string_pretty(&manifest).map_err(|e| Failure::Failed(e.to_string()))?;
        self.write_atomic(MANIFEST_FILE, format!("{json}\n").as_bytes())
    }
}

impl Drop for RunDir {
    fn drop(&mut self) {
        let _ = fs::remove_file(self.dir.join(LOCK_FILE));
    }
}

/// Fixed 17-significant-digit scientific format used by every CSV column.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV text from a header and rows of already formatted fields.
pub fn csv(header: &str, rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}
