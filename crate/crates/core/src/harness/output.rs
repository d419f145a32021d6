//! CSV series, JSON summaries, run manifests and the worker pool.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::Value;

use super::config::{hex_digest, RunConfig};
use crate::ergodics::ObservableSeries;
use crate::error::{Error, Result};

pub const SUMMARY_SCHEMA: &str = "sdnlw-summary-1";
pub const WORKERS_ENV: &str = "SDNLW_WORKERS";

/// Worker count from `SDNLW_WORKERS`, one if unset or unparsable.
pub fn worker_count() -> usize {
    std::env::var(WORKERS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()).filter(|&n| n > 0).unwrap_or(1)
}

/// Runs `f` inside a rayon pool of [`worker_count`] threads.
pub fn with_workers<R: Send>(f: impl FnOnce() -> R + Send) -> Result<R> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count())
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(f))
}

/// `t,<name>,...` with every float in `{:.16e}`. All series must share their sample times.
pub fn series_csv(series: &[ObservableSeries]) -> Result<String> {
    let Some(first) = series.first() else {
        return Err(Error::InvalidArgument("no series to write".into()));
    };
    if series.iter().any(|s| s.times != first.times) {
        return Err(Error::InvalidArgument("series have different sample times".into()));
    }
    let mut out = String::from("t");
    for s in series {
        out.push(',');
        out.push_str(&s.name);
    }
    out.push('\n');
    for (i, t) in first.times.iter().enumerate() {
        out.push_str(&format!("{t:.16e}"));
        for s in series {
            out.push_str(&format!(",{:.16e}", s.values[i]));
        }
        out.push('\n');
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub schema: &'static str,
    pub command: String,
    pub config_digest: String,
    pub body: Value,
}

impl Summary {
    pub fn new(command: &str, config: &RunConfig, body: impl Serialize) -> Result<Self> {
        Ok(Self {
            schema: SUMMARY_SCHEMA,
            command: command.to_string(),
            config_digest: config.digest(),
            body: serde_json::to_value(body)?,
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OutputDigest {
    pub path: PathBuf,
    pub sha256: String,
}

/// Everything needed to rerun a command bit-identically on the same build.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: String,
    pub config_digest: String,
    pub seeds: Vec<u64>,
    pub code_version: String,
    pub workers: usize,
    pub started_unix: f64,
    pub finished_unix: f64,
    pub outputs: Vec<OutputDigest>,
}

impl RunManifest {
    pub fn start(command: &str, config: &RunConfig, seeds: Vec<u64>) -> Self {
        Self {
            command: command.to_string(),
            config: config.to_text(),
            config_digest: config.digest(),
            seeds,
            code_version: concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION")).to_string(),
            workers: worker_count(),
            started_unix: unix_now(),
            finished_unix: f64::NAN,
            outputs: Vec::new(),
        }
    }

    /// Writes `contents` to `dir/name` and records its digest.
    pub fn emit(&mut self, dir: &Path, name: &str, contents: &[u8]) -> Result<PathBuf> {
        std::fs::create_dir_all(dir)?;
        let path = dir.join(name);
        let mut f = std::fs::File::create(&path)?;
        f.write_all(contents)?;
        self.outputs.push(OutputDigest { path: path.clone(), sha256: hex_digest(contents) });
        Ok(path)
    }

    pub fn finish(mut self, dir: &Path) -> Result<PathBuf> {
        self.finished_unix = unix_now();
        std::fs::create_dir_all(dir)?;
        let path = dir.join("manifest.json");
        std::fs::write(&path, serde_json::to_string_pretty(&self)?)?;
        Ok(path)
    }
}

fn unix_now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(f64::NAN)
}
