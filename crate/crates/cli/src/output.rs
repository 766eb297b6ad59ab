//! Artifact writing: provenance headers, atomic renames, and rollback of a
//! failed run's files.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{CliError, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config_sha256: String,
    pub seed: Option<u64>,
}

impl Provenance {
    pub fn new(command: &str, config_sha256: String, seed: Option<u64>) -> Self {
        Self {
            tool: "holdup-lab",
            version: VERSION,
            command: command.to_string(),
            config_sha256,
            seed,
        }
    }

    pub fn line(&self) -> String {
        let seed = self.seed.map_or_else(|| "none".to_string(), |s| s.to_string());
        format!(
            "{} {} command={} config_sha256={} seed={}",
            self.tool, self.version, self.command, self.config_sha256, seed
        )
    }
}

/// Writes artifacts into one directory and remembers them, so a run that
/// fails halfway can take its files back out.
pub struct Artifacts {
    dir: PathBuf,
    provenance: Provenance,
    written: Vec<PathBuf>,
}

impl Artifacts {
    pub fn create(dir: &Path, provenance: Provenance) -> Result<Self> {
        fs::create_dir_all(dir)
            .map_err(|e| CliError::Config(format!("output directory {} is not writable: {e}", dir.display())))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            provenance,
            written: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    /// CSV with a leading `#` provenance line.
    pub fn csv(&mut self, name: &str, body: &str) -> Result<PathBuf> {
        nonempty(name, body)?;
        self.put(name, format!("# {}\n{body}", self.provenance.line()))
    }

    /// Markdown with the provenance in an HTML comment.
    pub fn markdown(&mut self, name: &str, body: &str) -> Result<PathBuf> {
        nonempty(name, body)?;
        self.put(name, format!("<!-- {} -->\n\n{body}", self.provenance.line()))
    }

    /// `{"provenance": ..., "result": ...}`, pretty-printed.
    pub fn json<T: Serialize>(&mut self, name: &str, result: &T) -> Result<PathBuf> {
        #[derive(Serialize)]
        struct Wrapped<'a, T> {
            provenance: &'a Provenance,
            result: &'a T,
        }
        let mut text = serde_json::to_string_pretty(&Wrapped {
            provenance: &self.provenance,
            result,
        })
        .map_err(|e| CliError::Data(format!("serializing {name}: {e}")))?;
        text.push('\n');
        self.put(name, text)
    }

    fn put(&mut self, name: &str, contents: String) -> Result<PathBuf> {
        let target = self.dir.join(name);
        let tmp = self.dir.join(format!(".{name}.tmp"));
        let write = fs::write(&tmp, contents).and_then(|_| fs::rename(&tmp, &target));
        if let Err(e) = write {
            let _ = fs::remove_file(&tmp);
            return Err(CliError::Data(format!("writing {}: {e}", target.display())));
        }
        self.written.push(target.clone());
        Ok(target)
    }

    /// Removes everything this run wrote.
    pub fn rollback(&mut self) {
        for p in self.written.drain(..) {
            let _ = fs::remove_file(p);
        }
    }
}

fn nonempty(name: &str, body: &str) -> Result<()> {
    if body.trim().is_empty() {
        return Err(CliError::Data(format!("{name}: nothing to write (empty result set)")));
    }
    Ok(())
}
