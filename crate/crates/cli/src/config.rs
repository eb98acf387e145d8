//! Flat `key = value` configuration for the power study.
//!
//! Lines are `key = value`; blank lines and lines starting with `#` are
//! skipped. Unknown keys are an error. Lists are comma-separated.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use lanpower_core::testing::linear_grid;
use lanpower_core::{BiasMode, C1Mode, Family, PowerStudyConfig, Variant};

use crate::CliError;

pub const KNOWN_KEYS: &[&str] = &[
    "preset",
    "family",
    "rho0",
    "coefficient",
    "amplitude_grid",
    "amplitude_range",
    "n_list",
    "m",
    "alpha",
    "variants",
    "b_mode",
    "c1_mode",
    "bootstrap_reps",
    "master_seed",
    "burn_in",
    "out_dir",
    "plot",
];

/// Parsed key/value pairs, in file order of last occurrence.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    pub entries: BTreeMap<String, String>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut entries = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| usage(format!("config line {}: expected key = value", lineno + 1)))?;
            let key = key.trim();
            if !KNOWN_KEYS.contains(&key) {
                return Err(usage(format!("config line {}: unknown key '{key}'", lineno + 1)));
            }
            entries.insert(key.to_string(), value.trim().to_string());
        }
        Ok(Self { entries })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }
}

fn usage(msg: String) -> CliError {
    CliError::Usage(msg)
}

pub fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .trim()
        .parse()
        .map_err(|_| usage(format!("{key}: cannot parse '{value}'")))
}

pub fn parse_list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>, CliError> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_num(key, s))
        .collect()
}

/// `lo:hi:count`
pub fn parse_range(value: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = value.split(':').collect();
    if parts.len() != 3 {
        return Err(usage(format!("amplitude_range: expected lo:hi:count, got '{value}'")));
    }
    let lo: f64 = parse_num("amplitude_range", parts[0])?;
    let hi: f64 = parse_num("amplitude_range", parts[1])?;
    let count: usize = parse_num("amplitude_range", parts[2])?;
    Ok(linear_grid(lo, hi, count))
}

pub fn parse_bool(key: &str, value: &str) -> Result<bool, CliError> {
    match value.trim() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        other => Err(usage(format!("{key}: expected true or false, got '{other}'"))),
    }
}

pub fn parse_family(value: &str) -> Result<Family, CliError> {
    value.trim().parse().map_err(|e: lanpower_core::Error| usage(e.to_string()))
}

/// Power-study settings plus output options.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSettings {
    pub study: PowerStudyConfig,
    pub out_dir: PathBuf,
    pub plot: bool,
}

impl PowerSettings {
    pub fn from_preset(family: Family) -> Self {
        Self {
            study: PowerStudyConfig::paper_figure(family),
            out_dir: PathBuf::from("."),
            plot: false,
        }
    }

    /// Overlay every key present in `raw`, except `preset` which selects
    /// the starting point and is handled by the caller.
    pub fn apply(&mut self, raw: &RawConfig) -> Result<(), CliError> {
        for (key, value) in &raw.entries {
            self.set(key, value)?;
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let s = &mut self.study;
        match key {
            "preset" => {}
            "family" => s.family = parse_family(value)?,
            "rho0" => s.rho0 = parse_num(key, value)?,
            "coefficient" => s.coefficient = parse_num(key, value)?,
            "amplitude_grid" => s.amplitude_grid = parse_list(key, value)?,
            "amplitude_range" => s.amplitude_grid = parse_range(value)?,
            "n_list" => s.n_list = parse_list(key, value)?,
            "m" => s.m = parse_num(key, value)?,
            "alpha" => s.alpha = parse_num(key, value)?,
            "variants" => {
                s.variants = value
                    .split(',')
                    .map(str::trim)
                    .filter(|v| !v.is_empty())
                    .map(|v| v.parse::<Variant>().map_err(|e| usage(e.to_string())))
                    .collect::<Result<_, _>>()?
            }
            "b_mode" => s.b_mode = value.trim().parse::<BiasMode>().map_err(|e| usage(e.to_string()))?,
            "c1_mode" => s.c1_mode = value.trim().parse::<C1Mode>().map_err(|e| usage(e.to_string()))?,
            "bootstrap_reps" => s.bootstrap_reps = parse_num(key, value)?,
            "master_seed" => s.master_seed = parse_num(key, value)?,
            "burn_in" => s.burn_in = parse_num(key, value)?,
            "out_dir" => self.out_dir = PathBuf::from(value.trim()),
            "plot" => self.plot = parse_bool(key, value)?,
            other => return Err(usage(format!("unknown key '{other}'"))),
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_overlays() {
        let raw = RawConfig::parse("# comment\n\nm = 20\nn_list = 30, 80\namplitude_range = 0:1:3\nvariants = lse,me\nplot = true\n")
            .unwrap();
        let mut s = PowerSettings::from_preset(Family::Ar1);
        s.apply(&raw).unwrap();
        assert_eq!(s.study.m, 20);
        assert_eq!(s.study.n_list, vec![30, 80]);
        assert_eq!(s.study.amplitude_grid, vec![0.0, 0.5, 1.0]);
        assert_eq!(s.study.variants, vec![Variant::Lse, Variant::Me]);
        assert!(s.plot);
    }

    #[test]
    fn rejects_unknown_keys_and_garbage() {
        assert!(matches!(RawConfig::parse("bogus = 1"), Err(CliError::Usage(_))));
        assert!(matches!(RawConfig::parse("m 20"), Err(CliError::Usage(_))));
        let raw = RawConfig::parse("m = twenty").unwrap();
        let mut s = PowerSettings::from_preset(Family::Ar1);
        assert!(matches!(s.apply(&raw), Err(CliError::Usage(_))));
    }
}
