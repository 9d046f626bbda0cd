use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed config: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unknown experiment `{id}`; valid ids: {valid}")]
    UnknownExperiment { id: String, valid: String },
    #[error("parameter `{key}`: {reason}")]
    Param { key: String, reason: String },
    #[error("unknown parameters for `{id}`: {keys}")]
    UnusedParams { id: String, keys: String },
}

/// One experiment run. Every field has a default; experiment-specific
/// settings live in `params` and fall back to the acceptance-scale values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub seed: u64,
    /// Matrix sizes; empty means the experiment's default grid.
    pub sizes: Vec<usize>,
    pub samples: Option<usize>,
    pub params: BTreeMap<String, Value>,
    /// Thread count; `None` uses all cores. Does not affect results.
    pub threads: Option<usize>,
    /// Output directory; does not affect results.
    pub out: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            experiment: "suite".into(),
            seed: 0,
            sizes: Vec::new(),
            samples: None,
            params: BTreeMap::new(),
            threads: None,
            out: None,
        }
    }
}

impl ExperimentConfig {
    pub fn new(experiment: &str, seed: u64) -> Self {
        Self { experiment: experiment.into(), seed, ..Self::default() }
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, ConfigError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// SHA-256 of the result-determining fields (everything except threads and out).
    pub fn hash(&self) -> String {
        let key = Self { threads: None, out: None, ..self.clone() };
        let digest = Sha256::digest(serde_json::to_vec(&key).expect("config serializes"));
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    pub fn params(&self) -> Params<'_> {
        Params { cfg: self, used: Default::default() }
    }
}

/// Typed access to `params` that remembers which keys were read.
pub struct Params<'a> {
    cfg: &'a ExperimentConfig,
    used: std::cell::RefCell<BTreeSet<String>>,
}

fn bad(key: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Param { key: key.into(), reason: reason.into() }
}

impl Params<'_> {
    fn get(&self, key: &str) -> Option<&Value> {
        self.used.borrow_mut().insert(key.into());
        self.cfg.params.get(key)
    }

    pub fn f64(&self, key: &str, default: f64) -> Result<f64, ConfigError> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v.as_f64().ok_or_else(|| bad(key, "expected a number")),
        }
    }

    pub fn usize(&self, key: &str, default: usize) -> Result<usize, ConfigError> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v.as_u64().map(|x| x as usize).ok_or_else(|| bad(key, "expected a non-negative integer")),
        }
    }

    pub fn bool(&self, key: &str, default: bool) -> Result<bool, ConfigError> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v.as_bool().ok_or_else(|| bad(key, "expected a boolean")),
        }
    }

    pub fn str(&self, key: &str, default: &str) -> Result<String, ConfigError> {
        match self.get(key) {
            None => Ok(default.into()),
            Some(v) => v.as_str().map(String::from).ok_or_else(|| bad(key, "expected a string")),
        }
    }

    pub fn f64_list(&self, key: &str, default: &[f64]) -> Result<Vec<f64>, ConfigError> {
        match self.get(key) {
            None => Ok(default.to_vec()),
            Some(Value::Array(a)) => a.iter().map(|v| v.as_f64().ok_or_else(|| bad(key, "expected numbers"))).collect(),
            Some(_) => Err(bad(key, "expected an array of numbers")),
        }
    }

    pub fn sizes(&self, default: &[usize]) -> Vec<usize> {
        if self.cfg.sizes.is_empty() {
            default.to_vec()
        } else {
            self.cfg.sizes.clone()
        }
    }

    /// First entry of `sizes`, for single-size experiments.
    pub fn size(&self, default: usize) -> usize {
        self.cfg.sizes.first().copied().unwrap_or(default)
    }

    pub fn samples(&self, default: usize) -> usize {
        self.cfg.samples.unwrap_or(default)
    }

    /// Fail on any parameter the experiment did not read.
    pub fn finish(self) -> Result<(), ConfigError> {
        let used = self.used.borrow();
        let unused: Vec<&str> = self.cfg.params.keys().filter(|k| !used.contains(*k)).map(String::as_str).collect();
        if unused.is_empty() {
            Ok(())
        } else {
            Err(ConfigError::UnusedParams { id: self.cfg.experiment.clone(), keys: unused.join(", ") })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_is_all_defaults() {
        assert_eq!(ExperimentConfig::from_json("{}").unwrap(), ExperimentConfig::default());
    }

    #[test]
    fn hash_ignores_threads_and_out() {
        let mut a = ExperimentConfig::new("lsc", 7);
        let h = a.hash();
        a.threads = Some(4);
        a.out = Some("/tmp/x".into());
        assert_eq!(a.hash(), h);
        a.seed = 8;
        assert_ne!(a.hash(), h);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        assert!(ExperimentConfig::from_json(r#"{"experimnet": "lsc"}"#).is_err());
    }

    #[test]
    fn params_track_usage() {
        let mut c = ExperimentConfig::new("x", 0);
        c.params.insert("a".into(), Value::from(1.5));
        c.params.insert("b".into(), Value::from("s"));
        let p = c.params();
        assert_eq!(p.f64("a", 0.0).unwrap(), 1.5);
        assert!(p.usize("b", 0).is_err());
        p.finish().unwrap();
        let p = c.params();
        p.f64("a", 0.0).unwrap();
        assert!(matches!(p.finish(), Err(ConfigError::UnusedParams { .. })));
    }
}
