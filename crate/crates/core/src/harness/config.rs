//! Flat `key = value` run configuration.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::dynamics::{Integrator, SimConfig};
use crate::error::{ConfigIssue, Error, Result};
use crate::spectral::SpectralGrid;

pub const KEYS: [&str; 12] =
    ["N", "M_pad", "s", "gamma", "alpha", "dt", "T", "seed", "integrator", "cubic", "observables", "output_dir"];

pub const DEFAULT_OBSERVABLES: [&str; 3] = ["mean_u", "mean_u2", "clipped_h_alpha"];

/// Simulation parameters plus output settings.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub sim: SimConfig,
    pub observables: Vec<String>,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            sim: SimConfig::default(),
            observables: DEFAULT_OBSERVABLES.iter().map(|s| s.to_string()).collect(),
            output_dir: PathBuf::from("out"),
        }
    }
}

impl RunConfig {
    /// Canonical text form; parsing it gives back the same config.
    pub fn to_text(&self) -> String {
        let s = &self.sim;
        let mut out = String::new();
        let _ = writeln!(out, "N = {}", s.n);
        let _ = writeln!(out, "M_pad = {}", s.m);
        let _ = writeln!(out, "s = {:?}", s.s);
        let _ = writeln!(out, "gamma = {:?}", s.gamma);
        let _ = writeln!(out, "alpha = {:?}", s.alpha);
        let _ = writeln!(out, "dt = {:?}", s.dt);
        let _ = writeln!(out, "T = {:?}", s.horizon);
        let _ = writeln!(out, "seed = {}", s.seed);
        let _ = writeln!(out, "integrator = {}", s.integrator);
        let _ = writeln!(out, "cubic = {}", s.cubic);
        let _ = writeln!(out, "observables = {}", self.observables.join(","));
        let _ = writeln!(out, "output_dir = {}", self.output_dir.display());
        out
    }

    /// SHA-256 of [`RunConfig::to_text`], hex encoded.
    pub fn digest(&self) -> String {
        hex_digest(self.to_text().as_bytes())
    }
}

pub(crate) fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text)
}

/// Parses `key = value` lines over the defaults. `#` starts a comment.
/// All problems are collected before failing.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    let mut issues = Vec::new();
    let mut explicit_m = false;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            issues.push(ConfigIssue::new(format!("line {}", lineno + 1), format!("expected `key = value`, got `{line}`")));
            continue;
        };
        let (key, value) = (key.trim(), value.trim());
        let sim = &mut cfg.sim;
        let res: std::result::Result<(), String> = match key {
            "N" => parse_into(value, &mut sim.n),
            "M_pad" => {
                explicit_m = true;
                parse_into(value, &mut sim.m)
            }
            "s" => parse_into(value, &mut sim.s),
            "gamma" => parse_into(value, &mut sim.gamma),
            "alpha" => parse_into(value, &mut sim.alpha),
            "dt" => parse_into(value, &mut sim.dt),
            "T" => parse_into(value, &mut sim.horizon),
            "seed" => parse_into(value, &mut sim.seed),
            "cubic" => parse_into(value, &mut sim.cubic),
            "integrator" => value.parse::<Integrator>().map(|i| sim.integrator = i),
            "observables" => {
                cfg.observables = value.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect();
                Ok(())
            }
            "output_dir" => {
                cfg.output_dir = PathBuf::from(value);
                Ok(())
            }
            _ => Err(format!("unknown key (expected one of {})", KEYS.join(", "))),
        };
        if let Err(message) = res {
            issues.push(ConfigIssue::new(key, message));
        }
    }
    if !explicit_m {
        cfg.sim.m = SpectralGrid::default_resolution(cfg.sim.n);
    }
    issues.extend(cfg.sim.issues());
    if issues.is_empty() {
        Ok(cfg)
    } else {
        Err(Error::InvalidConfig(issues))
    }
}

fn parse_into<T: std::str::FromStr>(value: &str, slot: &mut T) -> std::result::Result<(), String>
where
    T::Err: std::fmt::Display,
{
    value.parse::<T>().map(|v| *slot = v).map_err(|e| format!("cannot parse `{value}`: {e}"))
}
