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

//! Task runners behind the command-line subcommands.
//!
//! Every runner writes only inside the output directory. Files are tracked as
//! they are created so a failed run can remove what it left behind.

use std::fs::{self, File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{FlatConfig, RunConfig, Task};
use crate::data::{self, Dataset, EmbeddingStore};
use crate::error::{Error, Result};
use crate::grover::{self, GroverAngles, MarkedSet};
use crate::head::{self, LinearHead};
use crate::metrics::{ConfusionMatrix, Metrics};
use crate::search::{self, SearchConfig};
use crate::seed::child_seed;
use crate::train::{self, Featurizer};

pub const MANIFEST_NAME: &str = "manifest.json";
pub const CHECKPOINT_NAME: &str = "checkpoint.qtph";

/// Files a run has written into its output directory.
#[derive(Debug)]
pub struct Outputs {
    dir: PathBuf,
    created_dir: bool,
    names: Vec<String>,
    fresh: Vec<PathBuf>,
}

impl Outputs {
    pub fn open(dir: &Path) -> Result<Self> {
        let created_dir = !dir.exists();
        fs::create_dir_all(dir)?;
        Ok(Self { dir: dir.to_path_buf(), created_dir, names: Vec::new(), fresh: Vec::new() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Names of the files written so far, in creation order.
    pub fn names(&self) -> &[String] {
        &self.names
    }

    fn track(&mut self, name: &str, path: PathBuf, fresh: bool) {
        if fresh {
            self.fresh.push(path);
        }
        if !self.names.iter().any(|n| n == name) {
            self.names.push(name.to_string());
        }
    }

    /// Creates (truncating) `name` in the output directory.
    pub fn create(&mut self, name: &str) -> Result<BufWriter<File>> {
        let path = self.dir.join(name);
        let file = File::create(&path)?;
        self.track(name, path, true);
        Ok(BufWriter::new(file))
    }

    /// Opens `name` for appending; returns whether it was newly created.
    pub fn append(&mut self, name: &str) -> Result<(BufWriter<File>, bool)> {
        let path = self.dir.join(name);
        let is_new = !path.exists();
        let file = OpenOptions::new().create(true).append(true).open(&path)?;
        self.track(name, path, is_new);
        Ok((BufWriter::new(file), is_new))
    }

    /// Removes every file this run created (appended-to logs that existed
    /// before are left alone) and the directory if it was created here.
    pub fn discard(self) {
        for path in &self.fresh {
            let _ = fs::remove_file(path);
        }
        if self.created_dir {
            let _ = fs::remove_dir(&self.dir);
        }
    }
}

/// Provenance record written next to every run's outputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub task: Task,
    pub seed: u64,
    pub config: FlatConfig,
    pub outputs: Vec<String>,
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("manifest {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("manifest {}: {e}", path.display())))
    }
}

/// Runs the configured task, reporting progress on stdout.
pub fn execute(config: &RunConfig) -> Result<Manifest> {
    execute_with(config, &mut std::io::stdout().lock())
}

/// Runs the configured task, then writes the manifest. Human-readable
/// progress goes to `console`. On failure every file created by the run is
/// removed.
pub fn execute_with(config: &RunConfig, console: &mut dyn Write) -> Result<Manifest> {
    let mut outputs = Outputs::open(&config.paths.output_dir)?;
    match run_task(config, &mut outputs, console).and_then(|()| write_manifest(config, &mut outputs)) {
        Ok(manifest) => Ok(manifest),
        Err(e) => {
            outputs.discard();
            Err(e)
        }
    }
}

fn write_manifest(config: &RunConfig, outputs: &mut Outputs) -> Result<Manifest> {
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        task: config.task,
        seed: config.seed,
        config: config.flat.clone(),
        outputs: outputs.names().to_vec(),
    };
    let mut w = outputs.create(MANIFEST_NAME)?;
    serde_json::to_writer_pretty(&mut w, &manifest).map_err(|e| Error::Data(e.to_string()))?;
    writeln!(w)?;
    w.flush()?;
    Ok(manifest)
}

fn run_task(config: &RunConfig, outputs: &mut Outputs, console: &mut dyn Write) -> Result<()> {
    match config.task {
        Task::GroverDemo => grover_demo(config, outputs, console),
        Task::ValidatePm => validate_pm(config, outputs, console),
        Task::BbhtBench => bbht_bench(config, outputs, console),
        Task::ExtractFeatures => extract_features(config, outputs, console),
        Task::Train => train_head(config, outputs, console),
        Task::Eval => eval_head(config, outputs, console),
    }
}

fn csv_writer(outputs: &mut Outputs, name: &str, header: &[&str]) -> Result<csv::Writer<BufWriter<File>>> {
    let mut w = csv::Writer::from_writer(outputs.create(name)?);
    w.write_record(header).map_err(csv_err)?;
    Ok(w)
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// `a` evenly spaced indices of an `n`-qubit register.
pub fn spread_marked(n_qubits: usize, a: usize) -> Result<MarkedSet> {
    let dim = 1usize << n_qubits;
    if a == 0 || a >= dim {
        return Err(Error::Config(format!("marked count {a} must be in 1..{dim} for {n_qubits} qubits")));
    }
    MarkedSet::new(n_qubits, (0..a).map(|i| i * dim / a))
}

fn grover_demo(config: &RunConfig, outputs: &mut Outputs, console: &mut dyn Write) -> Result<()> {
    let demo = &config.demo;
    let dim = 1usize << demo.qubits;
    if let Some(&bad) = demo.marked.iter().find(|&&x| x >= dim) {
        return Err(Error::Config(format!("demo.marked: index {bad} out of range for {} qubits", demo.qubits)));
    }
    let marked = MarkedSet::new(demo.qubits, demo.marked.iter().copied())
        .map_err(|e| Error::Config(format!("demo.marked: {e}")))?;
    let a = marked.count();
    let angles = GroverAngles::new(demo.qubits, a)?;
    let iters = demo.iters.unwrap_or(angles.k_opt);

    let mut csv = csv_writer(outputs, "grover_demo.csv", &["k", "analytic", "simulated", "abs_diff"])?;
    writeln!(console, "N = {dim}, a = {a}, k_opt = {}", angles.k_opt)?;
    writeln!(console, "{:>4}  {:>12}  {:>12}", "k", "analytic", "simulated")?;
    let mut state = grover::uniform_superposition::<f64>(demo.qubits)?;
    for k in 0..=iters {
        let simulated = state.mass_on(marked.members());
        let analytic = grover::analytic_success(demo.qubits, a, k)?;
        writeln!(console, "{k:>4}  {analytic:>12.6}  {simulated:>12.6}")?;
        csv.write_record([
            k.to_string(),
            analytic.to_string(),
            simulated.to_string(),
            (analytic - simulated).abs().to_string(),
        ])
        .map_err(csv_err)?;
        grover::grover_iterate(&mut state, &marked, None)?;
    }
    csv.flush()?;
    Ok(())
}

const SEARCH_HEADER: [&str; 7] = ["N", "a", "m", "p_m_analytic", "p_m_empirical", "mean_calls", "success_rate"];

fn validate_pm(config: &RunConfig, outputs: &mut Outputs, console: &mut dyn Write) -> Result<()> {
    let pm = &config.pm;
    let dim = 1usize << pm.qubits;
    let marked = spread_marked(pm.qubits, pm.marked_count)?;
    let convention = config.qepfe.search.k_convention;
    let base = child_seed(config.seed, "validate-pm");
    let mut csv = csv_writer(outputs, "validate_pm.csv", &SEARCH_HEADER)?;
    writeln!(console, "N = {dim}, a = {}, {} trials per m, {convention}", pm.marked_count, pm.trials)?;
    writeln!(console, "{:>5}  {:>10}  {:>10}  {:>10}", "m", "analytic", "empirical", "mean_calls")?;
    for &m in &pm.m {
        if m == 0 {
            return Err(Error::Config("pm.m: window sizes must be ≥ 1".into()));
        }
        let analytic = search::round_success(pm.qubits, pm.marked_count, m, convention)?;
        let (freq, mean_k) =
            search::empirical_round_success(&marked, m, convention, pm.trials, child_seed(base, &format!("m-{m}")))?;
        let mean_calls = mean_k + 1.0;
        writeln!(console, "{m:>5}  {analytic:>10.6}  {freq:>10.6}  {mean_calls:>10.4}")?;
        csv.write_record([
            dim.to_string(),
            pm.marked_count.to_string(),
            m.to_string(),
            analytic.to_string(),
            freq.to_string(),
            mean_calls.to_string(),
            freq.to_string(),
        ])
        .map_err(csv_err)?;
    }
    csv.flush()?;
    Ok(())
}

fn bbht_bench(config: &RunConfig, outputs: &mut Outputs, console: &mut dyn Write) -> Result<()> {
    let bench = &config.bench;
    let dim = 1usize << bench.qubits;
    let base = child_seed(config.seed, "bbht");
    let mut csv = csv_writer(outputs, "bbht_bench.csv", &SEARCH_HEADER)?;
    writeln!(console, "N = {dim}, {} runs per a", bench.runs)?;
    writeln!(console, "{:>5}  {:>10}  {:>10}  {:>10}  {:>6}", "a", "predicted", "success", "mean_calls", "false+")?;
    for &a in &bench.marked_counts {
        let marked = spread_marked(bench.qubits, a)?;
        let cfg = SearchConfig { seed: child_seed(base, &format!("a-{a}")), ..config.qepfe.search.clone() };
        let predicted = search::schedule_success_probability(bench.qubits, a, &cfg)?;
        let (summary, _) = search::bbht_bench(&marked, &cfg, bench.runs)?;
        writeln!(
            console,
            "{a:>5}  {predicted:>10.6}  {:>10.6}  {:>10.3}  {:>6}",
            summary.success_rate, summary.mean_calls, summary.false_positives
        )?;
        csv.write_record([
            dim.to_string(),
            a.to_string(),
            cfg.cap(dim).to_string(),
            predicted.to_string(),
            summary.success_rate.to_string(),
            summary.mean_calls.to_string(),
            summary.success_rate.to_string(),
        ])
        .map_err(csv_err)?;
    }
    csv.flush()?;
    Ok(())
}

/// Embedding table from `paths.embeddings`, or an empty table of
/// `embeddings.dim` so every token goes through the OOV policy.
pub fn embedding_store(config: &RunConfig) -> Result<EmbeddingStore> {
    match &config.paths.embeddings {
        Some(path) => EmbeddingStore::load(path, config.oov),
        None => EmbeddingStore::new(config.embed_dim, config.oov),
    }
}

fn load_inputs(config: &RunConfig) -> Result<(Dataset, Featurizer)> {
    let path = config.paths.dataset.as_ref().ok_or_else(|| Error::Config("paths.dataset: required".into()))?;
    let dataset = data::load_dataset(path)?;
    let featurizer = Featurizer::new(embedding_store(config)?, config.qepfe.clone())?;
    Ok((dataset, featurizer))
}

#[derive(Serialize)]
struct FeatureRecord<'a> {
    id: &'a str,
    p: &'a [f64],
}

fn extract_features(config: &RunConfig, outputs: &mut Outputs, console: &mut dyn Write) -> Result<()> {
    let (dataset, featurizer) = load_inputs(config)?;
    let features = dataset.examples.par_iter().map(|e| featurizer.features(&e.text)).collect::<Result<Vec<_>>>()?;
    let mut w = outputs.create("features.jsonl")?;
    for (example, fv) in dataset.examples.iter().zip(&features) {
        serde_json::to_writer(&mut w, &FeatureRecord { id: &example.id, p: &fv.p })
            .map_err(|e| Error::Data(e.to_string()))?;
        writeln!(w)?;
    }
    w.flush()?;
    writeln!(console, "{} feature vectors of dimension {}", features.len(), config.qepfe.feature_dim())?;
    Ok(())
}

fn train_head(config: &RunConfig, outputs: &mut Outputs, console: &mut dyn Write) -> Result<()> {
    let (dataset, featurizer) = load_inputs(config)?;
    let mut head = LinearHead::seeded(dataset.num_classes, featurizer.input_dim(), child_seed(config.seed, "init"))?;
    let report = train::train(&dataset, &featurizer, &mut head, &config.training)?;

    let mut csv = csv_writer(outputs, "history.csv", &["epoch", "mean_loss", "accuracy"])?;
    for r in &report.history {
        csv.write_record([r.epoch.to_string(), r.mean_loss.to_string(), r.accuracy.to_string()]).map_err(csv_err)?;
    }
    csv.flush()?;
    let mut w = outputs.create(CHECKPOINT_NAME)?;
    head::write_checkpoint(&head, featurizer.qepfe.feature_dim(), featurizer.store.dim(), &mut w)?;
    if let Some(last) = report.history.last() {
        writeln!(
            console,
            "{} epochs, {} steps, loss {:.6}, train accuracy {:.4}{}",
            report.history.len(),
            report.steps,
            last.mean_loss,
            last.accuracy,
            if report.converged { " (converged)" } else { "" }
        )?;
    }
    Ok(())
}

#[derive(Serialize)]
struct EvalReport<'a> {
    examples: usize,
    classes: usize,
    #[serde(flatten)]
    metrics: &'a Metrics,
    confusion: Vec<Vec<u64>>,
}

fn eval_head(config: &RunConfig, outputs: &mut Outputs, console: &mut dyn Write) -> Result<()> {
    let (dataset, featurizer) = load_inputs(config)?;
    let checkpoint =
        config.paths.checkpoint.as_ref().ok_or_else(|| Error::Config("paths.checkpoint: required".into()))?;
    let (head, feature_dim, embed_dim) = head::read_checkpoint(std::io::BufReader::new(File::open(checkpoint)?))?;
    if feature_dim != config.qepfe.feature_dim() || embed_dim != featurizer.store.dim() {
        return Err(Error::Config(format!(
            "checkpoint expects N = {feature_dim}, d = {embed_dim}; configuration gives N = {}, d = {}",
            config.qepfe.feature_dim(),
            featurizer.store.dim()
        )));
    }
    if dataset.num_classes > head.classes() {
        return Err(Error::Data(format!(
            "dataset has {} classes, checkpoint has {}",
            dataset.num_classes,
            head.classes()
        )));
    }
    let features = featurizer.featurize(&dataset)?;
    let cm: ConfusionMatrix = train::evaluate(&features, &head)?;
    let metrics = cm.report()?;
    let confusion = (0..cm.classes()).map(|t| (0..cm.classes()).map(|p| cm.count(t, p)).collect()).collect();

    let mut w = outputs.create("metrics.json")?;
    let report = EvalReport { examples: features.len(), classes: cm.classes(), metrics: &metrics, confusion };
    serde_json::to_writer_pretty(&mut w, &report).map_err(|e| Error::Data(e.to_string()))?;
    writeln!(w)?;
    w.flush()?;

    let (log, is_new) = outputs.append("runs.csv")?;
    let mut log = csv::WriterBuilder::new().has_headers(false).from_writer(log);
    if is_new {
        log.write_record([
            "seed",
            "dataset",
            "checkpoint",
            "examples",
            "accuracy",
            "precision",
            "recall",
            "f1",
            "degenerate",
        ])
        .map_err(csv_err)?;
    }
    let dataset_path = config.paths.dataset.as_deref().map(|p| p.display().to_string()).unwrap_or_default();
    log.write_record([
        config.seed.to_string(),
        dataset_path,
        checkpoint.display().to_string(),
        features.len().to_string(),
        metrics.accuracy.to_string(),
        metrics.precision.to_string(),
        metrics.recall.to_string(),
        metrics.f1.to_string(),
        metrics.degenerate_flags.any().to_string(),
    ])
    .map_err(csv_err)?;
    log.flush()?;
    writeln!(
        console,
        "accuracy {:.4}, precision {:.4}, recall {:.4}, F1 {:.4}",
        metrics.accuracy, metrics.precision, metrics.recall, metrics.f1
    )?;
    Ok(())
}
