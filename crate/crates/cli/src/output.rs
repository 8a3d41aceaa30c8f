use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::CliResult;

/// Shortest round-trip decimal, with `inf`, `-inf` and `nan` spelled out.
pub fn num(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FileEntry {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Serialize)]
struct Manifest<'a, C: Serialize> {
    command: &'a str,
    claim: Option<&'a str>,
    tracelab_version: &'a str,
    created_unix: u64,
    status: &'a str,
    config: &'a C,
    files: &'a [FileEntry],
}

/// An output directory that remembers what was written to it.
#[derive(Debug)]
pub struct OutputDir {
    root: PathBuf,
    files: Vec<PathBuf>,
}

impl OutputDir {
    pub fn create(root: &Path) -> CliResult<Self> {
        fs::create_dir_all(root)?;
        Ok(Self { root: root.to_path_buf(), files: Vec::new() })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// Path for `name` inside the directory, registered for the manifest.
    pub fn register(&mut self, name: &str) -> PathBuf {
        let p = self.root.join(name);
        if !self.files.contains(&p) {
            self.files.push(p.clone());
        }
        p
    }

    pub fn csv(&mut self, name: &str, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> CliResult<()> {
        let path = self.register(name);
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(header)?;
        for row in rows {
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> CliResult<()> {
        let path = self.register(name);
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        fs::write(path, text)?;
        Ok(())
    }

    fn entries(&self) -> CliResult<Vec<FileEntry>> {
        let mut out = Vec::new();
        for p in &self.files {
            if !p.exists() {
                continue;
            }
            let bytes = fs::read(p)?;
            let rel = p.strip_prefix(&self.root).unwrap_or(p);
            out.push(FileEntry {
                path: rel.to_string_lossy().into_owned(),
                sha256: hex::encode(Sha256::digest(&bytes)),
                bytes: bytes.len() as u64,
            });
        }
        out.sort_by(|a, b| a.path.cmp(&b.path));
        Ok(out)
    }

    /// Writes `manifest.json` listing every registered file with its hash.
    pub fn finish<C: Serialize>(&self, command: &str, claim: Option<&str>, status: &str, config: &C) -> CliResult<Vec<FileEntry>> {
        let files = self.entries()?;
        let created_unix = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        let m = Manifest {
            command,
            claim,
            tracelab_version: env!("CARGO_PKG_VERSION"),
            created_unix,
            status,
            config,
            files: &files,
        };
        let mut text = serde_json::to_string_pretty(&m)?;
        text.push('\n');
        fs::write(self.root.join("manifest.json"), text)?;
        Ok(files)
    }
}
