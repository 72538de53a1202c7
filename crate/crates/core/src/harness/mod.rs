//! Scenario files, embedded presets, output files and SVG figures.

mod svg;

pub use svg::{decay_plot, energy_plot, ray_plot};

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::experiments::Scenario;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("scenario: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("serialization: {0}")]
    Serialize(String),
    #[error("unknown preset '{0}' (available: annulus, disc, pocket)")]
    UnknownPreset(String),
}

/// Embedded scenario presets, by name.
pub const PRESETS: [(&str, &str); 3] = [
    ("annulus", include_str!("../../../../scenarios/annulus.toml")),
    ("disc", include_str!("../../../../scenarios/disc.toml")),
    ("pocket", include_str!("../../../../scenarios/pocket.toml")),
];

pub fn parse_scenario(text: &str) -> Result<Scenario, HarnessError> {
    Ok(toml::from_str(text)?)
}

pub fn scenario_to_toml(scenario: &Scenario) -> Result<String, HarnessError> {
    toml::to_string(scenario).map_err(|e| HarnessError::Serialize(e.to_string()))
}

pub fn load_scenario(path: &Path) -> Result<Scenario, HarnessError> {
    let text = fs::read_to_string(path).map_err(|source| HarnessError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    parse_scenario(&text)
}

pub fn preset(name: &str) -> Result<Scenario, HarnessError> {
    let (_, text) = PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| HarnessError::UnknownPreset(name.to_string()))?;
    parse_scenario(text)
}

/// Writes `contents` to `dir/name`, creating `dir`.
pub fn write_output(dir: &Path, name: &str, contents: &[u8]) -> Result<PathBuf, HarnessError> {
    let path = dir.join(name);
    let wrap = |source| HarnessError::Write {
        path: path.clone(),
        source,
    };
    fs::create_dir_all(dir).map_err(wrap)?;
    fs::write(&path, contents).map_err(wrap)?;
    Ok(path)
}

pub fn to_json<T: Serialize>(value: &T) -> Result<Vec<u8>, HarnessError> {
    let mut v = serde_json::to_vec_pretty(value).map_err(|e| HarnessError::Serialize(e.to_string()))?;
    v.push(b'\n');
    Ok(v)
}

/// CSV with a header row; every row must have as many cells as the header.
pub fn to_csv(header: &[&str], rows: &[Vec<String>]) -> Vec<u8> {
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        out.push_str(&r.join(","));
        out.push('\n');
    }
    out.into_bytes()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_parse() {
        for (name, _) in PRESETS {
            let s = preset(name).unwrap();
            assert_eq!(s.name, name);
        }
        assert!(matches!(preset("nope"), Err(HarnessError::UnknownPreset(_))));
    }
}
