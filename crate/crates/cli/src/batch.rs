//! A directory of `*.job` files, run concurrently, one JSON report each.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::config::parse_config;
use crate::run::run_job;

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BatchEntry {
    pub name: String,
    /// 0, 1 or 2 as for a single job.
    pub code: i32,
    pub summary: String,
    /// The report written, if the job ran.
    pub output: Option<PathBuf>,
}

/// The `*.job` files of `dir`, sorted by name.
pub fn job_files(dir: &Path) -> io::Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "job") && p.is_file())
        .collect();
    files.sort();
    Ok(files)
}

fn run_one(path: &Path, out: &Path) -> BatchEntry {
    let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let fail = |code, summary: String| BatchEntry { name: name.clone(), code, summary, output: None };
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return fail(2, format!("{}: {e}", path.display())),
    };
    let cfg = match parse_config(&text) {
        Ok(c) => c,
        Err(d) => return fail(2, format!("{}:{d}", path.display())),
    };
    let report = match run_job(&cfg) {
        Ok(r) => r,
        Err(e) => return fail(2, e.to_string()),
    };
    let target = out.join(format!("{name}.json"));
    if let Err(e) = write_atomic(&target, &report.to_json()) {
        return fail(2, format!("{}: {e}", target.display()));
    }
    BatchEntry {
        name: name.clone(),
        code: report.exit_code(),
        summary: format!("{} {}", cfg.kind, cfg.target),
        output: Some(target),
    }
}

/// Runs every job in `dir`, writing `<out>/<stem>.json`; entries come back
/// in file-name order whatever the scheduling.
pub fn run_batch(dir: &Path, out: &Path) -> io::Result<Vec<BatchEntry>> {
    let files = job_files(dir)?;
    fs::create_dir_all(out)?;
    Ok(files.par_iter().map(|f| run_one(f, out)).collect())
}
