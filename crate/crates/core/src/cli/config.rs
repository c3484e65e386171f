// Copyright 2026 The groverfeat Developers
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not use this file except
// in compliance with the License. You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License
// is distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express
// or implied. See the License for the specific language governing permissions and limitations under
// the License.

//! Run configuration as a flat map of dotted keys.
//!
//! Values are resolved in order defaults < config file < command-line flags.
//! A config file is TOML (tables flatten to dotted keys, so `[qepfe]
//! n_qubits = 4` and `"qepfe.n_qubits" = 4` are the same) or JSON.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::OovPolicy;
use crate::encoding::EncodingKind;
use crate::error::{Error, Result};
use crate::qepfe::{Pooling, QepfeConfig, Schedule};
use crate::search::{KConvention, SearchConfig};
use crate::seed::child_seed;
use crate::train::TaskConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    GroverDemo,
    ValidatePm,
    BbhtBench,
    ExtractFeatures,
    Train,
    Eval,
}

impl Task {
    pub fn as_str(self) -> &'static str {
        match self {
            Task::GroverDemo => "grover-demo",
            Task::ValidatePm => "validate-pm",
            Task::BbhtBench => "bbht-bench",
            Task::ExtractFeatures => "extract-features",
            Task::Train => "train",
            Task::Eval => "eval",
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Task::GroverDemo, Task::ValidatePm, Task::BbhtBench, Task::ExtractFeatures, Task::Train, Task::Eval]
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::Config(format!("task: unknown task {s:?}")))
    }
}

/// Every recognized key with its default.
pub const DEFAULTS: &[(&str, &str)] = &[
    ("task", ""),
    ("seed", "0"),
    ("qepfe.n_qubits", "6"),
    ("qepfe.encoding", "amplitude"),
    ("qepfe.tau", "0.5"),
    ("qepfe.pooling", "mean"),
    ("qepfe.schedule", "adaptive"),
    ("search.lambda", "1.2"),
    ("search.max_m", "sqrt"),
    ("search.k_convention", "zero-based"),
    ("training.lr", "0.00001"),
    ("training.epochs", "5"),
    ("training.batch_size", "32"),
    ("embeddings.dim", "32"),
    ("embeddings.oov", "hash"),
    ("paths.dataset", ""),
    ("paths.embeddings", ""),
    ("paths.output_dir", "groverfeat-out"),
    ("paths.checkpoint", ""),
    ("demo.qubits", "3"),
    ("demo.marked", "5"),
    ("demo.iters", "auto"),
    ("pm.qubits", "2"),
    ("pm.marked_count", "1"),
    ("pm.m", "1,2,4,8"),
    ("pm.trials", "10000"),
    ("bench.qubits", "10"),
    ("bench.marked_counts", "1,4,16"),
    ("bench.runs", "1000"),
];

/// Flat dotted-key settings.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlatConfig(pub BTreeMap<String, String>);

impl FlatConfig {
    pub fn defaults() -> Self {
        Self(DEFAULTS.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect())
    }

    /// Sets a known key.
    pub fn set(&mut self, key: &str, value: impl Into<String>) -> Result<()> {
        if !DEFAULTS.iter().any(|(k, _)| *k == key) {
            return Err(Error::Config(format!("{key}: unknown configuration key")));
        }
        self.0.insert(key.to_string(), value.into());
        Ok(())
    }

    /// Parses `key=value`.
    pub fn set_pair(&mut self, pair: &str) -> Result<()> {
        let (key, value) =
            pair.split_once('=').ok_or_else(|| Error::Config(format!("--set expects key=value, got {pair:?}")))?;
        self.set(key.trim(), value.trim())
    }

    pub fn merge(&mut self, other: &FlatConfig) -> Result<()> {
        for (k, v) in &other.0 {
            self.set(k, v.clone())?;
        }
        Ok(())
    }

    pub fn get(&self, key: &str) -> &str {
        self.0.get(key).map(String::as_str).unwrap_or("")
    }

    pub fn parse<T: FromStr>(&self, key: &str) -> Result<T>
    where
        T::Err: fmt::Display,
    {
        let raw = self.get(key);
        raw.parse::<T>().map_err(|e| Error::Config(format!("{key}: cannot parse {raw:?}: {e}")))
    }

    pub fn parse_list<T: FromStr>(&self, key: &str) -> Result<Vec<T>>
    where
        T::Err: fmt::Display,
    {
        let raw = self.get(key);
        let items = raw
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<T>().map_err(|e| Error::Config(format!("{key}: cannot parse {s:?}: {e}"))))
            .collect::<Result<Vec<T>>>()?;
        if items.is_empty() {
            return Err(Error::Config(format!("{key}: expected a comma-separated list")));
        }
        Ok(items)
    }

    fn path(&self, key: &str) -> Option<PathBuf> {
        let raw = self.get(key);
        (!raw.is_empty()).then(|| PathBuf::from(raw))
    }

    /// Reads a TOML or JSON (by `.json` extension) config file.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("config file {}: {e}", path.display())))?;
        let mut out = FlatConfig::default();
        if path.extension().is_some_and(|e| e == "json") {
            let value: serde_json::Value = serde_json::from_str(&text)
                .map_err(|e| Error::Config(format!("config file {}: {e}", path.display())))?;
            flatten_json("", &value, &mut out)?;
        } else {
            let table: toml::Table =
                text.parse().map_err(|e| Error::Config(format!("config file {}: {e}", path.display())))?;
            for (k, v) in &table {
                flatten_toml(k, v, &mut out)?;
            }
        }
        Ok(out)
    }
}

fn join(prefix: &str, key: &str) -> String {
    if prefix.is_empty() {
        key.to_string()
    } else {
        format!("{prefix}.{key}")
    }
}

fn flatten_toml(key: &str, value: &toml::Value, out: &mut FlatConfig) -> Result<()> {
    match value {
        toml::Value::Table(t) => {
            for (k, v) in t {
                flatten_toml(&join(key, k), v, out)?;
            }
            Ok(())
        }
        toml::Value::String(s) => out.set(key, s.clone()),
        toml::Value::Array(items) => {
            let parts = items
                .iter()
                .map(|v| match v {
                    toml::Value::String(s) => Ok(s.clone()),
                    toml::Value::Integer(_) | toml::Value::Float(_) | toml::Value::Boolean(_) => Ok(v.to_string()),
                    _ => Err(Error::Config(format!("{key}: nested arrays are not supported"))),
                })
                .collect::<Result<Vec<_>>>()?;
            out.set(key, parts.join(","))
        }
        other => out.set(key, other.to_string()),
    }
}

fn flatten_json(prefix: &str, value: &serde_json::Value, out: &mut FlatConfig) -> Result<()> {
    use serde_json::Value;
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                flatten_json(&join(prefix, k), v, out)?;
            }
            Ok(())
        }
        Value::String(s) => out.set(prefix, s.clone()),
        Value::Array(items) => {
            let parts: Vec<String> = items
                .iter()
                .map(|v| match v {
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                })
                .collect();
            out.set(prefix, parts.join(","))
        }
        Value::Null => out.set(prefix, ""),
        other => out.set(prefix, other.to_string()),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Paths {
    pub dataset: Option<PathBuf>,
    pub embeddings: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub checkpoint: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DemoSettings {
    pub qubits: usize,
    pub marked: Vec<usize>,
    pub iters: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PmSettings {
    pub qubits: usize,
    pub marked_count: usize,
    pub m: Vec<usize>,
    pub trials: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchSettings {
    pub qubits: usize,
    pub marked_counts: Vec<usize>,
    pub runs: usize,
}

/// Fully typed run configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub task: Task,
    pub seed: u64,
    pub qepfe: QepfeConfig,
    pub training: TaskConfig,
    pub embed_dim: usize,
    pub oov: OovPolicy,
    pub paths: Paths,
    pub demo: DemoSettings,
    pub pm: PmSettings,
    pub bench: BenchSettings,
    /// The resolved flat settings this config was built from.
    pub flat: FlatConfig,
}

impl RunConfig {
    pub fn from_flat(flat: FlatConfig) -> Result<Self> {
        let task: Task = flat.parse("task")?;
        let seed: u64 = flat.parse("seed")?;
        let max_m = match flat.get("search.max_m") {
            "sqrt" => None,
            _ => Some(flat.parse::<f64>("search.max_m")?),
        };
        let search = SearchConfig {
            lambda: flat.parse("search.lambda")?,
            max_m,
            k_convention: flat.parse::<KConvention>("search.k_convention")?,
            seed: child_seed(seed, "qepfe"),
            record_pd: false,
        };
        let qepfe = QepfeConfig {
            n_qubits: flat.parse("qepfe.n_qubits")?,
            encoding: flat.parse::<EncodingKind>("qepfe.encoding")?,
            tau: flat.parse("qepfe.tau")?,
            search,
            pooling: flat.parse::<Pooling>("qepfe.pooling")?,
            schedule: flat.parse::<Schedule>("qepfe.schedule")?,
        };
        let training = TaskConfig {
            lr: flat.parse("training.lr")?,
            epochs: flat.parse("training.epochs")?,
            batch_size: flat.parse("training.batch_size")?,
            seed,
        };
        let demo = DemoSettings {
            qubits: flat.parse("demo.qubits")?,
            marked: flat.parse_list("demo.marked")?,
            iters: match flat.get("demo.iters") {
                "auto" => None,
                _ => Some(flat.parse("demo.iters")?),
            },
        };
        let pm = PmSettings {
            qubits: flat.parse("pm.qubits")?,
            marked_count: flat.parse("pm.marked_count")?,
            m: flat.parse_list("pm.m")?,
            trials: flat.parse("pm.trials")?,
        };
        let bench = BenchSettings {
            qubits: flat.parse("bench.qubits")?,
            marked_counts: flat.parse_list("bench.marked_counts")?,
            runs: flat.parse("bench.runs")?,
        };
        let paths = Paths {
            dataset: flat.path("paths.dataset"),
            embeddings: flat.path("paths.embeddings"),
            output_dir: flat
                .path("paths.output_dir")
                .ok_or_else(|| Error::Config("paths.output_dir: must not be empty".into()))?,
            checkpoint: flat.path("paths.checkpoint"),
        };
        let config = Self {
            task,
            seed,
            qepfe,
            training,
            embed_dim: flat.parse("embeddings.dim")?,
            oov: flat.parse::<OovPolicy>("embeddings.oov")?,
            paths,
            demo,
            pm,
            bench,
            flat,
        };
        config.validate()?;
        Ok(config)
    }

    /// Task-specific checks, including that every input path exists.
    pub fn validate(&self) -> Result<()> {
        let require = |key: &str, path: &Option<PathBuf>| -> Result<()> {
            match path {
                None => Err(Error::Config(format!("{key}: required for {}", self.task))),
                Some(p) if !p.is_file() => Err(Error::Config(format!("{key}: {} does not exist", p.display()))),
                Some(_) => Ok(()),
            }
        };
        if let Some(p) = &self.paths.embeddings {
            if !p.is_file() {
                return Err(Error::Config(format!("paths.embeddings: {} does not exist", p.display())));
            }
        }
        if self.embed_dim == 0 {
            return Err(Error::Config("embeddings.dim: must be ≥ 1".into()));
        }
        match self.task {
            Task::ExtractFeatures => {
                require("paths.dataset", &self.paths.dataset)?;
                self.qepfe.validate()?;
            }
            Task::Train => {
                require("paths.dataset", &self.paths.dataset)?;
                self.qepfe.validate()?;
                self.training.validate()?;
            }
            Task::Eval => {
                require("paths.dataset", &self.paths.dataset)?;
                require("paths.checkpoint", &self.paths.checkpoint)?;
                self.qepfe.validate()?;
            }
            Task::GroverDemo => {
                if !(1..=crate::statevector::MAX_QUBITS).contains(&self.demo.qubits) {
                    return Err(Error::Config(format!("demo.qubits: must be in 1..=20, got {}", self.demo.qubits)));
                }
            }
            Task::ValidatePm => {
                if !(1..=crate::statevector::MAX_QUBITS).contains(&self.pm.qubits) {
                    return Err(Error::Config(format!("pm.qubits: must be in 1..=20, got {}", self.pm.qubits)));
                }
                if self.pm.trials == 0 {
                    return Err(Error::Config("pm.trials: must be ≥ 1".into()));
                }
                self.qepfe.search.validate()?;
            }
            Task::BbhtBench => {
                if !(1..=crate::statevector::MAX_QUBITS).contains(&self.bench.qubits) {
                    return Err(Error::Config(format!("bench.qubits: must be in 1..=20, got {}", self.bench.qubits)));
                }
                if self.bench.runs == 0 {
                    return Err(Error::Config("bench.runs: must be ≥ 1".into()));
                }
                self.qepfe.search.validate()?;
            }
        }
        Ok(())
    }
}
