//! Run manifests. The `key=value` lines are valid `--config` input, so a
//! manifest can be replayed with `arw --config run.manifest <command>`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use clap::{ArgMatches, Command};
use sha2::{Digest, Sha256};

pub struct Manifest {
    pub command: String,
    pub params: Vec<(String, String)>,
    pub files: Vec<PathBuf>,
    pub started: SystemTime,
    pub elapsed: Duration,
}

/// Resolved values of every flag of `leaf`, defaults included.
pub fn params_of(leaf: &Command, matches: &ArgMatches) -> Vec<(String, String)> {
    let mut out = Vec::new();
    for arg in leaf.get_arguments() {
        let Some(long) = arg.get_long() else { continue };
        if long == "config" || long == "help" || long == "version" {
            continue;
        }
        let Ok(Some(raw)) = matches.try_get_raw(arg.get_id().as_str()) else { continue };
        let values: Vec<String> = raw.map(|v| v.to_string_lossy().into_owned()).collect();
        out.push((long.to_string(), values.join(",")));
    }
    out.sort();
    out
}

pub fn sha256_file(path: &Path) -> std::io::Result<String> {
    let bytes = std::fs::read(path)?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

impl Manifest {
    pub fn render(&self) -> std::io::Result<String> {
        let mut out = String::from("# arw-lab manifest v1\n");
        let _ = writeln!(out, "# command={}", self.command);
        let _ = writeln!(out, "# version={}", env!("CARGO_PKG_VERSION"));
        let started = self.started.duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        let _ = writeln!(out, "# started_unix={started}");
        let _ = writeln!(out, "# wall_clock_seconds={:.3}", self.elapsed.as_secs_f64());
        for f in &self.files {
            let _ = writeln!(out, "# sha256 {} {}", sha256_file(f)?, f.display());
        }
        for (k, v) in &self.params {
            let _ = writeln!(out, "{k}={v}");
        }
        Ok(out)
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.render()?)
    }
}

/// `<path>.manifest`.
pub fn manifest_path(primary: &Path) -> PathBuf {
    let mut s = primary.as_os_str().to_owned();
    s.push(".manifest");
    PathBuf::from(s)
}
