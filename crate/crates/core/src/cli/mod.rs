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

//! Command-line front end.
//!
//! Each subcommand's flags map onto dotted configuration keys, so
//! `train --lr 0.01` and `train --set training.lr=0.01` are equivalent.

pub mod config;
pub mod run;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use config::{FlatConfig, RunConfig, Task};
pub use run::{execute, execute_with, Manifest};

use crate::error::{Error, Result};

/// Exit status for a failed run: 2 configuration, 3 data, 4 numeric.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) | Error::Validation(_) | Error::Capacity { .. } => 2,
        Error::Numeric(_) => 4,
        _ => 3,
    }
}

#[derive(Debug, Parser)]
#[command(name = "groverfeat", version, about = "Grover-amplified word features and a fused text classifier")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Default, Args)]
pub struct Common {
    /// TOML or JSON file of dotted-key settings.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_name = "DIR")]
    pub output_dir: Option<PathBuf>,
    /// Override any setting, e.g. `--set qepfe.tau=0.3`. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

#[derive(Debug, Default, Args)]
pub struct QepfeArgs {
    #[arg(long)]
    pub qubits: Option<usize>,
    /// `amplitude` or `angle`.
    #[arg(long)]
    pub encoding: Option<String>,
    #[arg(long)]
    pub tau: Option<f64>,
    /// `mean` or `max`.
    #[arg(long)]
    pub pooling: Option<String>,
    /// `adaptive` or a fixed iteration count.
    #[arg(long)]
    pub schedule: Option<String>,
    /// `zero-based` or `one-based`.
    #[arg(long)]
    pub k_convention: Option<String>,
}

#[derive(Debug, Default, Args)]
pub struct DataArgs {
    /// JSONL dataset.
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    /// Binary embedding table; without it every token is hashed.
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
    /// `hash`, `zero` or `skip`.
    #[arg(long)]
    pub oov: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Success probability per Grover iteration, simulated against the closed form.
    GroverDemo {
        #[arg(long)]
        qubits: Option<usize>,
        /// Comma-separated marked indices.
        #[arg(long)]
        marked: Option<String>,
        /// Iterations to run (default: the optimal count).
        #[arg(long)]
        iters: Option<usize>,
    },
    /// Fixed-window round success: closed form against sampled trials.
    ValidatePm {
        #[arg(long)]
        qubits: Option<usize>,
        #[arg(long)]
        marked_count: Option<usize>,
        /// Comma-separated window sizes.
        #[arg(long)]
        m: Option<String>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        k_convention: Option<String>,
    },
    /// Monte-Carlo benchmark of the adaptive search.
    BbhtBench {
        #[arg(long)]
        qubits: Option<usize>,
        /// Comma-separated marked-set sizes.
        #[arg(long)]
        marked_count: Option<String>,
        #[arg(long)]
        runs: Option<usize>,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        k_convention: Option<String>,
    },
    /// Writes one feature vector per dataset example.
    ExtractFeatures {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        qepfe: QepfeArgs,
    },
    /// Trains the classification head.
    Train {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        qepfe: QepfeArgs,
        #[arg(long)]
        lr: Option<f64>,
        #[arg(long)]
        epochs: Option<usize>,
        #[arg(long)]
        batch: Option<usize>,
    },
    /// Scores a checkpoint on a dataset.
    Eval {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        qepfe: QepfeArgs,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
    /// Repeats a run from its manifest.
    Rerun {
        #[arg(long)]
        manifest: PathBuf,
    },
}

type Pairs = Vec<(&'static str, String)>;

fn push<T: ToString>(pairs: &mut Pairs, key: &'static str, value: &Option<T>) {
    if let Some(v) = value {
        pairs.push((key, v.to_string()));
    }
}

fn push_path(pairs: &mut Pairs, key: &'static str, value: &Option<PathBuf>) {
    if let Some(v) = value {
        pairs.push((key, v.display().to_string()));
    }
}

impl QepfeArgs {
    fn pairs(&self, pairs: &mut Pairs) {
        push(pairs, "qepfe.n_qubits", &self.qubits);
        push(pairs, "qepfe.encoding", &self.encoding);
        push(pairs, "qepfe.tau", &self.tau);
        push(pairs, "qepfe.pooling", &self.pooling);
        push(pairs, "qepfe.schedule", &self.schedule);
        push(pairs, "search.k_convention", &self.k_convention);
    }
}

impl DataArgs {
    fn pairs(&self, pairs: &mut Pairs) {
        push_path(pairs, "paths.dataset", &self.dataset);
        push_path(pairs, "paths.embeddings", &self.embeddings);
        push(pairs, "embeddings.oov", &self.oov);
    }
}

impl Command {
    fn task(&self) -> Option<Task> {
        Some(match self {
            Command::GroverDemo { .. } => Task::GroverDemo,
            Command::ValidatePm { .. } => Task::ValidatePm,
            Command::BbhtBench { .. } => Task::BbhtBench,
            Command::ExtractFeatures { .. } => Task::ExtractFeatures,
            Command::Train { .. } => Task::Train,
            Command::Eval { .. } => Task::Eval,
            Command::Rerun { .. } => return None,
        })
    }

    fn pairs(&self) -> Pairs {
        let mut p = Pairs::new();
        match self {
            Command::GroverDemo { qubits, marked, iters } => {
                push(&mut p, "demo.qubits", qubits);
                push(&mut p, "demo.marked", marked);
                push(&mut p, "demo.iters", iters);
            }
            Command::ValidatePm { qubits, marked_count, m, trials, k_convention } => {
                push(&mut p, "pm.qubits", qubits);
                push(&mut p, "pm.marked_count", marked_count);
                push(&mut p, "pm.m", m);
                push(&mut p, "pm.trials", trials);
                push(&mut p, "search.k_convention", k_convention);
            }
            Command::BbhtBench { qubits, marked_count, runs, lambda, k_convention } => {
                push(&mut p, "bench.qubits", qubits);
                push(&mut p, "bench.marked_counts", marked_count);
                push(&mut p, "bench.runs", runs);
                push(&mut p, "search.lambda", lambda);
                push(&mut p, "search.k_convention", k_convention);
            }
            Command::ExtractFeatures { data, qepfe } => {
                data.pairs(&mut p);
                qepfe.pairs(&mut p);
            }
            Command::Train { data, qepfe, lr, epochs, batch } => {
                data.pairs(&mut p);
                qepfe.pairs(&mut p);
                push(&mut p, "training.lr", lr);
                push(&mut p, "training.epochs", epochs);
                push(&mut p, "training.batch_size", batch);
            }
            Command::Eval { data, qepfe, checkpoint } => {
                data.pairs(&mut p);
                qepfe.pairs(&mut p);
                push_path(&mut p, "paths.checkpoint", checkpoint);
            }
            Command::Rerun { .. } => {}
        }
        p
    }
}

/// Resolves the run configuration: defaults (or a manifest's recorded
/// settings for `rerun`) < `--config` file < flags < `--set`.
pub fn resolve(cli: &Cli) -> Result<RunConfig> {
    let mut flat = match &cli.command {
        Command::Rerun { manifest } => Manifest::load(manifest)?.config,
        _ => FlatConfig::defaults(),
    };
    if let Some(path) = &cli.common.config {
        flat.merge(&FlatConfig::from_file(path)?)?;
    }
    if let Some(task) = cli.command.task() {
        flat.set("task", task.as_str())?;
    }
    for (key, value) in cli.command.pairs() {
        flat.set(key, value)?;
    }
    if let Some(seed) = cli.common.seed {
        flat.set("seed", seed.to_string())?;
    }
    if let Some(dir) = &cli.common.output_dir {
        flat.set("paths.output_dir", dir.display().to_string())?;
    }
    for pair in &cli.common.set {
        flat.set_pair(pair)?;
    }
    RunConfig::from_flat(flat)
}

/// Parses `args`, runs, and returns the process exit status.
pub fn main_with_args<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match resolve(&cli).and_then(|cfg| execute(&cfg)) {
        Ok(manifest) => {
            eprintln!("wrote {} to {}", manifest.outputs.join(", "), manifest.config.get("paths.output_dir"));
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
