//! Report directory staging: everything is written to a sibling temporary
//! directory that replaces the target only when the run succeeds.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{AtStage, Stage, StageError};

/// Marks a directory as a report so a later run may replace it.
pub const MARKER: &str = ".fxtopo-report";

pub struct Staging {
    target: PathBuf,
    dir: PathBuf,
    committed: bool,
}

impl Staging {
    pub fn new(target: &Path) -> Result<Self, StageError> {
        if target.exists() {
            let empty = fs::read_dir(target).at(Stage::Output)?.next().is_none();
            let inside_report = target.parent().is_some_and(|p| p.join(MARKER).exists());
            if !empty && !target.join(MARKER).exists() && !inside_report {
                return Err(StageError::msg(
                    Stage::Output,
                    format!("{} exists and is not a report directory; refusing to overwrite", target.display()),
                ));
            }
        }
        let name = target.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_else(|| "report".into());
        let parent = target.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
        fs::create_dir_all(parent).at(Stage::Output)?;
        let dir = parent.join(format!(".{name}.staging-{}", std::process::id()));
        if dir.exists() {
            fs::remove_dir_all(&dir).at(Stage::Output)?;
        }
        fs::create_dir_all(&dir).at(Stage::Output)?;
        fs::write(dir.join(MARKER), "").at(Stage::Output)?;
        Ok(Self { target: target.to_path_buf(), dir, committed: false })
    }

    pub fn path(&self) -> &Path {
        &self.dir
    }

    pub fn commit(mut self) -> Result<PathBuf, StageError> {
        if self.target.exists() {
            fs::remove_dir_all(&self.target).at(Stage::Output)?;
        }
        fs::rename(&self.dir, &self.target).at(Stage::Output)?;
        self.committed = true;
        Ok(self.target.clone())
    }
}

impl Drop for Staging {
    fn drop(&mut self) {
        if !self.committed {
            let _ = fs::remove_dir_all(&self.dir);
        }
    }
}

/// Create `dir/rel` (and parents) and return the file path for `name` in it.
pub fn file_in(root: &Path, rel: &str, name: &str) -> Result<PathBuf, StageError> {
    let dir = root.join(rel);
    fs::create_dir_all(&dir).at(Stage::Output)?;
    Ok(dir.join(name))
}

pub fn create(path: &Path) -> Result<std::io::BufWriter<fs::File>, StageError> {
    if let Some(p) = path.parent() {
        fs::create_dir_all(p).at(Stage::Output)?;
    }
    fs::File::create(path)
        .map(std::io::BufWriter::new)
        .map_err(|e| StageError::msg(Stage::Output, format!("{}: {e}", path.display())))
}
