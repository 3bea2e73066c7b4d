//! Defaults, overridable by key=value config files.

use std::collections::BTreeMap;
use std::path::Path;

use lpneg::embedcheck::ScanConfig;
use lpneg::QuadratureConfig;
use serde::Serialize;

use crate::CliError;

pub const CONFIG_ENV: &str = "LPNEG_CONFIG";

#[derive(Debug, Clone, Serialize)]
pub struct Settings {
    pub quad: QuadratureConfig,
    pub grid: usize,
    pub samples: usize,
    pub scan_seed: u64,
    pub floor: f64,
    pub n_samples: usize,
    pub sim_seed: u64,
}

impl Default for Settings {
    fn default() -> Self {
        let scan = ScanConfig::default();
        Settings {
            quad: QuadratureConfig::default(),
            grid: scan.levels,
            samples: scan.samples,
            scan_seed: scan.seed,
            floor: scan.floor,
            n_samples: 200_000,
            sim_seed: 42,
        }
    }
}

impl Settings {
    /// Defaults, then the file named by `LPNEG_CONFIG`, then `explicit`.
    pub fn load(explicit: Option<&Path>) -> Result<Self, CliError> {
        let mut s = Settings::default();
        if let Some(path) = std::env::var_os(CONFIG_ENV).filter(|p| !p.is_empty()) {
            s.apply_file(Path::new(&path))?;
        }
        if let Some(path) = explicit {
            s.apply_file(path)?;
        }
        Ok(s)
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::validation(format!("cannot read config {}: {e}", path.display())))?;
        for (key, value) in parse_pairs(&text).map_err(CliError::validation)? {
            self.set(&key, &value)?;
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let bad = |e: &dyn std::fmt::Display| CliError::validation(format!("config key {key}: {e}"));
        let f = || value.parse::<f64>().map_err(|e| bad(&e));
        let u = || value.parse::<usize>().map_err(|e| bad(&e));
        let s = || value.parse::<u64>().map_err(|e| bad(&e));
        match key {
            "rel_tol" => self.quad.rel_tol = f()?,
            "abs_tol" => self.quad.abs_tol = f()?,
            "max_panels" => self.quad.max_panels = u()?,
            "mc_samples" => self.quad.mc_samples = u()?,
            "mc_seed" => self.quad.mc_seed = s()?,
            "mc_rel_tol" => self.quad.mc_rel_tol = f()?,
            "grid" => self.grid = u()?,
            "samples" => self.samples = u()?,
            "scan_seed" => self.scan_seed = s()?,
            "floor" => self.floor = f()?,
            "n_samples" => self.n_samples = u()?,
            "sim_seed" => self.sim_seed = s()?,
            _ => return Err(CliError::validation(format!("unknown config key {key:?}"))),
        }
        Ok(())
    }
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>, String> {
    let mut seen = BTreeMap::new();
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(format!("line {}: expected key=value", i + 1));
        };
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() {
            return Err(format!("line {}: empty key", i + 1));
        }
        if seen.insert(k.to_string(), ()).is_some() {
            return Err(format!("line {}: duplicate key {k}", i + 1));
        }
        out.push((k.to_string(), v.to_string()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_blanks() {
        let p = parse_pairs("# header\nrel_tol = 1e-6\n\n grid=5 # inline\n").unwrap();
        assert_eq!(p, vec![("rel_tol".into(), "1e-6".into()), ("grid".into(), "5".into())]);
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(parse_pairs("rel_tol 1e-6").is_err());
        assert!(parse_pairs("a=1\na=2").is_err());
    }

    #[test]
    fn set_overrides_and_rejects_unknown() {
        let mut s = Settings::default();
        s.set("rel_tol", "1e-6").unwrap();
        s.set("n_samples", "1000").unwrap();
        assert_eq!(s.quad.rel_tol, 1e-6);
        assert_eq!(s.n_samples, 1000);
        assert!(s.set("nope", "1").is_err());
        assert!(s.set("grid", "x").is_err());
    }
}
