//! Output files of one command invocation. Anything written is removed again
//! unless the set is committed, so a failed run leaves no partial results.

use std::fs;
use std::path::{Path, PathBuf};

use nanogrid_core::io::write_atomic;

use crate::error::CliError;

#[derive(Debug, Default)]
pub struct OutputSet {
    files: Vec<PathBuf>,
    dirs: Vec<PathBuf>,
    committed: bool,
}

impl OutputSet {
    pub fn new() -> Self {
        Self::default()
    }

    fn create_dirs(&mut self, dir: &Path) -> Result<(), CliError> {
        let mut missing = Vec::new();
        let mut cur = Some(dir);
        while let Some(d) = cur {
            if d.as_os_str().is_empty() || d.exists() {
                break;
            }
            missing.push(d.to_path_buf());
            cur = d.parent();
        }
        for d in missing.into_iter().rev() {
            fs::create_dir(&d).map_err(|e| nanogrid_core::Error::Io {
                path: d.clone(),
                source: e,
            })?;
            self.dirs.push(d);
        }
        Ok(())
    }

    pub fn write(&mut self, path: &Path, bytes: &[u8]) -> Result<(), CliError> {
        if let Some(parent) = path.parent() {
            self.create_dirs(parent)?;
        }
        write_atomic(path, bytes)?;
        log::debug!("wrote {}", path.display());
        self.files.push(path.to_path_buf());
        Ok(())
    }

    pub fn files(&self) -> &[PathBuf] {
        &self.files
    }

    pub fn commit(mut self) -> Vec<PathBuf> {
        self.committed = true;
        std::mem::take(&mut self.files)
    }
}

impl Drop for OutputSet {
    fn drop(&mut self) {
        if self.committed {
            return;
        }
        for f in self.files.iter().rev() {
            log::debug!("removing partial output {}", f.display());
            let _ = fs::remove_file(f);
        }
        for d in self.dirs.iter().rev() {
            let _ = fs::remove_dir(d);
        }
    }
}
