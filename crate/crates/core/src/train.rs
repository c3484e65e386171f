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

//! Training loop for the fusion head.
//!
//! The quantum branch and the embedding store are frozen, so every example's
//! fused vector is computed once and reused by all epochs; only the head's
//! weights and bias change.

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{self, Dataset, EmbeddingStore};
use crate::error::{Error, Result};
use crate::head::{FusionInput, LinearHead};
use crate::metrics::ConfusionMatrix;
use crate::qepfe::{self, FeatureVector, QepfeConfig};
use crate::radam::{ParamBlock, RAdam, RAdamConfig};
use crate::seed;

/// Turns raw text into `z = p ⊕ h`.
#[derive(Clone, Debug)]
pub struct Featurizer {
    pub store: EmbeddingStore,
    pub qepfe: QepfeConfig,
}

impl Featurizer {
    pub fn new(store: EmbeddingStore, qepfe: QepfeConfig) -> Result<Self> {
        qepfe.validate()?;
        Ok(Self { store, qepfe })
    }

    /// `N + d`.
    pub fn input_dim(&self) -> usize {
        self.qepfe.feature_dim() + self.store.dim()
    }

    /// Quantum features of a text. Tokens dropped by the OOV policy or whose
    /// register vector is zero are skipped; with nothing left the features
    /// are uniform.
    pub fn features(&self, text: &str) -> Result<FeatureVector> {
        let tokens = data::tokenize(text);
        let mut words = Vec::new();
        for v in data::token_vectors(&self.store, &tokens) {
            let w = self.qepfe.register_vector(&v)?;
            if self.qepfe.encoding == crate::EncodingKind::Amplitude && w.l2_norm() <= 1e-12 {
                continue;
            }
            words.push(w);
        }
        if words.is_empty() {
            let dim = self.qepfe.feature_dim();
            return Ok(FeatureVector { p: vec![1.0 / dim as f64; dim], source_tokens: 0 });
        }
        qepfe::extract_sequence_features(&words, &self.qepfe)
    }

    /// Mean token embedding; zeros when every token is dropped.
    pub fn embedding(&self, text: &str) -> Vec<f64> {
        let tokens = data::tokenize(text);
        data::sentence_embedding(&self.store, &tokens).unwrap_or_else(|_| vec![0.0; self.store.dim()])
    }

    pub fn fuse(&self, text: &str) -> Result<FusionInput> {
        Ok(FusionInput::new(&self.features(text)?, &self.embedding(text)))
    }

    /// Fused vectors and labels for a whole dataset, in dataset order.
    pub fn featurize(&self, dataset: &Dataset) -> Result<Vec<(Vec<f64>, usize)>> {
        dataset.examples.par_iter().map(|e| Ok((self.fuse(&e.text)?.into_z(), e.label))).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaskConfig {
    pub lr: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
}

impl TaskConfig {
    /// Sentiment-classification settings.
    pub fn sentiment() -> Self {
        Self { lr: 0.00001, epochs: 5, batch_size: 32, seed: 0 }
    }

    /// Word-sense-disambiguation settings.
    pub fn wsd() -> Self {
        Self { lr: 0.0003, epochs: 30, batch_size: 50, seed: 0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return Err(Error::Config(format!("training.lr must be positive, got {}", self.lr)));
        }
        if self.epochs == 0 {
            return Err(Error::Config("training.epochs must be ≥ 1".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::Config("training.batch_size must be ≥ 1".into()));
        }
        Ok(())
    }
}

impl Default for TaskConfig {
    fn default() -> Self {
        Self::sentiment()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    /// Mean of the per-batch losses seen during the epoch.
    pub mean_loss: f64,
    /// Training accuracy after the epoch's updates.
    pub accuracy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub history: Vec<EpochRecord>,
    pub converged: bool,
    pub steps: u64,
}

/// Epoch-mean loss change below which training stops.
pub const CONVERGENCE_DELTA: f64 = 1e-6;

/// Featurizes `dataset` once and trains `head` on the cached vectors.
pub fn train(
    dataset: &Dataset,
    featurizer: &Featurizer,
    head: &mut LinearHead,
    task: &TaskConfig,
) -> Result<TrainReport> {
    let features = featurizer.featurize(dataset)?;
    train_on_features(&features, head, task)
}

/// Mini-batch RAdam on cross-entropy. The visiting order is reshuffled every
/// epoch from a generator seeded by the task seed; the last partial batch
/// is kept.
pub fn train_on_features(
    features: &[(Vec<f64>, usize)],
    head: &mut LinearHead,
    task: &TaskConfig,
) -> Result<TrainReport> {
    task.validate()?;
    if features.is_empty() {
        return Err(Error::Data("training set is empty".into()));
    }
    let mut optimizer = RAdam::<f64>::new(RAdamConfig::default(), &[head.weights.len(), head.bias.len()]);
    let mut rng = seed::rng(seed::child_seed(task.seed, "shuffle"));
    let mut order: Vec<usize> = (0..features.len()).collect();
    let mut history = Vec::with_capacity(task.epochs);
    let mut converged = false;

    for epoch in 1..=task.epochs {
        order.shuffle(&mut rng);
        let mut loss_sum = 0.0;
        let mut batches = 0usize;
        for chunk in order.chunks(task.batch_size) {
            let batch: Vec<(&[f64], usize)> =
                chunk.iter().map(|&i| (features[i].0.as_slice(), features[i].1)).collect();
            let (loss, grads) = head.loss_and_grad(&batch)?;
            if !loss.is_finite() {
                return Err(Error::Numeric(format!("non-finite loss in epoch {epoch}")));
            }
            optimizer.step(
                &mut [
                    ParamBlock { name: "weights", values: &mut head.weights, grads: &grads.weights },
                    ParamBlock { name: "bias", values: &mut head.bias, grads: &grads.bias },
                ],
                task.lr,
            )?;
            if let Some(i) = head.weights.iter().chain(&head.bias).position(|w| !w.is_finite()) {
                return Err(Error::Numeric(format!("head parameter {i} overflowed in epoch {epoch}")));
            }
            loss_sum += loss;
            batches += 1;
        }
        let mean_loss = loss_sum / batches as f64;
        let accuracy = evaluate(features, head)?.macro_metrics()?.accuracy;
        let previous = history.last().map(|r: &EpochRecord| r.mean_loss);
        history.push(EpochRecord { epoch, mean_loss, accuracy });
        if previous.is_some_and(|p| (p - mean_loss).abs() < CONVERGENCE_DELTA) {
            converged = true;
            break;
        }
    }
    Ok(TrainReport { history, converged, steps: optimizer.step_count() })
}

/// Confusion matrix of the head's predictions.
pub fn evaluate(features: &[(Vec<f64>, usize)], head: &LinearHead) -> Result<ConfusionMatrix> {
    let mut cm = ConfusionMatrix::new(head.classes())?;
    for (z, label) in features {
        cm.record(*label, head.predict(z)?)?;
    }
    Ok(cm)
}
