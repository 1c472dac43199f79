//! Atomic file output: every file is written to a temporary sibling and
//! renamed into place, so a reader never sees a half-written result.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use tempfile::NamedTempFile;

pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut tmp = NamedTempFile::new_in(dir).with_context(|| format!("creating a temporary file in {}", dir.display()))?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Collects written paths so the command can list them at the end.
#[derive(Default)]
pub struct Written(pub Vec<PathBuf>);

impl Written {
    pub fn write(&mut self, path: PathBuf, contents: &str) -> Result<()> {
        write_atomic(&path, contents)?;
        self.0.push(path);
        Ok(())
    }

    pub fn print(&self) {
        for p in &self.0 {
            println!("wrote {}", p.display());
        }
    }
}

/// File-name-safe form of a check name such as `bounds(alpha=0.6,sigma0/k0=0.5)`.
pub fn slug(name: &str) -> String {
    let mut out = String::with_capacity(name.len());
    for c in name.chars() {
        match c {
            'a'..='z' | 'A'..='Z' | '0'..='9' | '.' | '-' => out.push(c),
            _ => {
                if !out.ends_with('_') {
                    out.push('_')
                }
            }
        }
    }
    out.trim_matches('_').to_string()
}
