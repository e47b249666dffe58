//! Run configuration: a flat INI file with `[maps]`, `[tolerances]`,
//! `[budgets]` and `[run]` sections.

use std::path::{Path, PathBuf};

use concave_skew::maps::{FiberMap, FiberPair, Tolerances};
use concave_skew::symbolic::{DEFAULT_ITERATION_CAP, DEFAULT_NODE_BUDGET};
use ini::Ini;
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {}", path.display())]
    Io { path: PathBuf, source: ini::Error },
    #[error("malformed config: {0}")]
    Parse(#[from] ini::ParseError),
    #[error("unknown section [{0}]")]
    UnknownSection(String),
    #[error("unknown key `{key}` in [{section}]")]
    UnknownKey { section: String, key: String },
    #[error("[{section}] {key}: {msg}")]
    BadValue { section: String, key: String, msg: String },
    #[error("invalid configuration: {0}")]
    Invalid(#[from] concave_skew::Error),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub f0: FiberMap,
    pub f1: FiberMap,
    pub modulus: f64,
    pub tol: Tolerances,
    pub node_budget: u64,
    pub iteration_cap: usize,
    /// `None` lets rayon decide.
    #[serde(skip)]
    pub workers: Option<usize>,
    pub seed: u64,
    #[serde(skip)]
    pub output: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            f0: FiberMap::logistic(0.5),
            f1: FiberMap::moebius(2.0, 1.0, 0.4),
            modulus: 2.0,
            tol: Tolerances::default(),
            node_budget: DEFAULT_NODE_BUDGET,
            iteration_cap: DEFAULT_ITERATION_CAP,
            workers: None,
            seed: 20240601,
            output: None,
        }
    }
}

fn value<T: std::str::FromStr>(section: &str, key: &str, raw: &str) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    raw.trim().parse().map_err(|e: T::Err| ConfigError::BadValue {
        section: section.into(),
        key: key.into(),
        msg: e.to_string(),
    })
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let ini = Ini::load_from_file(path).map_err(|source| ConfigError::Io { path: path.into(), source })?;
        Self::from_ini(&ini)
    }

    #[cfg(test)]
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let ini = Ini::load_from_str(text)?;
        Self::from_ini(&ini)
    }

    fn from_ini(ini: &Ini) -> Result<Self, ConfigError> {
        let mut cfg = RunConfig::default();
        for (section, props) in ini.iter() {
            let section = section.unwrap_or("");
            for (key, raw) in props.iter() {
                let unknown = || ConfigError::UnknownKey { section: section.into(), key: key.into() };
                match section {
                    "maps" => match key {
                        "f0" => cfg.f0 = value(section, key, raw)?,
                        "f1" => cfg.f1 = value(section, key, raw)?,
                        "M" => cfg.modulus = value(section, key, raw)?,
                        _ => return Err(unknown()),
                    },
                    "tolerances" => match key {
                        "bisect" => cfg.tol.bisect = value(section, key, raw)?,
                        "parab" => cfg.tol.parab = value(section, key, raw)?,
                        "meas" => cfg.tol.meas = value(section, key, raw)?,
                        _ => return Err(unknown()),
                    },
                    "budgets" => match key {
                        "nodes" => cfg.node_budget = value(section, key, raw)?,
                        "iterations" => cfg.iteration_cap = value(section, key, raw)?,
                        "workers" => cfg.workers = Some(value(section, key, raw)?),
                        _ => return Err(unknown()),
                    },
                    "run" => match key {
                        "seed" => cfg.seed = value(section, key, raw)?,
                        "output" => cfg.output = Some(PathBuf::from(raw.trim())),
                        _ => return Err(unknown()),
                    },
                    _ => return Err(ConfigError::UnknownSection(section.into())),
                }
            }
        }
        cfg.tol.validate()?;
        if !(cfg.modulus > 0.0 && cfg.modulus.is_finite()) {
            return Err(ConfigError::BadValue { section: "maps".into(), key: "M".into(), msg: "must be positive".into() });
        }
        if cfg.workers == Some(0) {
            return Err(ConfigError::BadValue { section: "budgets".into(), key: "workers".into(), msg: "must be positive".into() });
        }
        Ok(cfg)
    }

    pub fn pair(&self) -> Result<FiberPair, ConfigError> {
        Ok(FiberPair::new(self.f0, self.f1, self.modulus)?.with_tolerances(self.tol))
    }

    /// SHA-256 of the settings that influence results.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        Sha256::digest(canonical.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }
}
