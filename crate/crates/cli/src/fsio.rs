//! File output that never leaves a half-written file behind.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use tempfile::NamedTempFile;

fn parent_dir(path: &Path) -> &Path {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    }
}

/// Writes `bytes` to a temporary file beside `path`, then renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = parent_dir(path);
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut tmp = NamedTempFile::new_in(dir).with_context(|| format!("creating temporary file in {}", dir.display()))?;
    tmp.write_all(bytes)
        .and_then(|()| tmp.as_file().sync_all())
        .with_context(|| format!("writing {}", path.display()))?;
    tmp.persist(path)
        .map_err(|e| e.error)
        .with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

/// A set of files staged in a scratch directory and moved into `dest` together.
pub struct Staging {
    dest: PathBuf,
    scratch: tempfile::TempDir,
    names: Vec<String>,
}

impl Staging {
    pub fn new(dest: &Path) -> Result<Self> {
        fs::create_dir_all(dest).with_context(|| format!("creating {}", dest.display()))?;
        let scratch = tempfile::Builder::new()
            .prefix(".staging")
            .tempdir_in(dest)
            .with_context(|| format!("creating scratch directory in {}", dest.display()))?;
        Ok(Self {
            dest: dest.to_path_buf(),
            scratch,
            names: Vec::new(),
        })
    }

    /// `name` may contain `/` separators for subdirectories.
    pub fn add(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.scratch.path().join(name);
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir)?;
        }
        fs::write(&path, bytes).with_context(|| format!("writing {name}"))?;
        self.names.push(name.to_string());
        Ok(())
    }

    /// Moves every staged file to its final place; the scratch directory goes away on drop.
    pub fn commit(self) -> Result<()> {
        for name in &self.names {
            let to = self.dest.join(name);
            if let Some(dir) = to.parent() {
                fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            }
            fs::rename(self.scratch.path().join(name), &to).with_context(|| format!("moving {}", to.display()))?;
        }
        Ok(())
    }
}
