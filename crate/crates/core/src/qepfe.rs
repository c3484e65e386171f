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

//! Encode → amplify → read out: the quantum feature branch.
//!
//! A token's word vector is encoded into a register, a marked set is derived
//! from the encoded amplitudes, the randomized amplification schedule is run,
//! and the exact Born distribution of the schedule's final pre-measurement
//! state is the feature vector.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::encoding::{self, EncodingKind, WordVector};
use crate::error::{Error, Result};
use crate::grover::{self, MarkedSet};
use crate::search::{self, SearchConfig, SearchOutcome};
use crate::statevector::Statevector;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pooling {
    #[default]
    Mean,
    /// Element-wise maximum, renormalized to sum to one.
    Max,
}

impl fmt::Display for Pooling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pooling::Mean => "mean",
            Pooling::Max => "max",
        })
    }
}

impl FromStr for Pooling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mean" => Ok(Pooling::Mean),
            "max" => Ok(Pooling::Max),
            other => Err(Error::Config(format!("unknown pooling {other:?}, expected \"mean\" or \"max\""))),
        }
    }
}

/// How many Grover iterations the feature state receives.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Schedule {
    /// The randomized growing-window schedule.
    #[default]
    Adaptive,
    /// Exactly this many iterations.
    Fixed(usize),
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Schedule::Adaptive => f.write_str("adaptive"),
            Schedule::Fixed(k) => write!(f, "{k}"),
        }
    }
}

impl FromStr for Schedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "adaptive" {
            return Ok(Schedule::Adaptive);
        }
        s.parse::<usize>()
            .map(Schedule::Fixed)
            .map_err(|_| Error::Config(format!("schedule must be \"adaptive\" or an iteration count, got {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QepfeConfig {
    pub n_qubits: usize,
    pub encoding: EncodingKind,
    /// Relative magnitude threshold for marking basis states, in (0, 1].
    pub tau: f64,
    pub search: SearchConfig,
    pub pooling: Pooling,
    pub schedule: Schedule,
}

impl Default for QepfeConfig {
    fn default() -> Self {
        Self {
            n_qubits: 6,
            encoding: EncodingKind::Amplitude,
            tau: 0.5,
            search: SearchConfig::default(),
            pooling: Pooling::Mean,
            schedule: Schedule::Adaptive,
        }
    }
}

impl QepfeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(2..=12).contains(&self.n_qubits) {
            return Err(Error::Config(format!("qepfe.n_qubits must be in 2..=12, got {}", self.n_qubits)));
        }
        if !(self.tau > 0.0 && self.tau <= 1.0) {
            return Err(Error::Config(format!("qepfe.tau must be in (0, 1], got {}", self.tau)));
        }
        self.search.validate()
    }

    /// Feature dimension `N = 2^n`.
    pub fn feature_dim(&self) -> usize {
        1 << self.n_qubits
    }

    /// Resizes an arbitrary embedding to the encoder's input length
    /// (`2^n` for amplitude encoding, `n` for angle encoding) by padding or
    /// strided folding.
    pub fn register_vector(&self, embedding: &[f64]) -> Result<WordVector> {
        if embedding.is_empty() {
            return Err(Error::Degenerate("embedding has no components".into()));
        }
        WordVector::new(encoding::fold_to_len(embedding, self.encoding.input_len(self.n_qubits)))
    }
}

/// Probability feature vector; sums to one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub p: Vec<f64>,
    pub source_tokens: usize,
}

/// Marks `{x : |ŵ_x| ≥ τ·max|ŵ|}` over the encoded amplitudes `ŵ`. An empty
/// or full set falls back to the single largest index (smallest on ties).
pub fn derive_marked_set(w: &WordVector, config: &QepfeConfig) -> Result<MarkedSet> {
    let state = encoding::encode(config.encoding, w, config.n_qubits)?;
    marked_from_state(&state, config.tau)
}

fn marked_from_state(state: &Statevector, tau: f64) -> Result<MarkedSet> {
    let mags: Vec<f64> = state.amplitudes().iter().map(|a| a.norm()).collect();
    let (argmax, max) =
        mags.iter()
            .enumerate()
            .fold((0usize, f64::NEG_INFINITY), |(bi, bv), (i, &v)| if v > bv { (i, v) } else { (bi, bv) });
    if !(max > 0.0) {
        return Err(Error::Degenerate("encoded state has no non-zero amplitude".into()));
    }
    let threshold = tau * max;
    let members: Vec<usize> = (0..mags.len()).filter(|&i| mags[i] >= threshold).collect();
    if members.is_empty() || members.len() == mags.len() {
        return MarkedSet::new(state.n_qubits(), [argmax]);
    }
    MarkedSet::new(state.n_qubits(), members)
}

/// Features of one word vector with the marked set derived from it.
pub fn extract_features(w: &WordVector, config: &QepfeConfig) -> Result<FeatureVector> {
    let marked = derive_marked_set(w, config)?;
    Ok(extract_features_with_marked(w, &marked, config)?.0)
}

/// Features with an externally supplied marked set. Also returns the search
/// record when the adaptive schedule ran.
pub fn extract_features_with_marked(
    w: &WordVector,
    marked: &MarkedSet,
    config: &QepfeConfig,
) -> Result<(FeatureVector, Option<SearchOutcome>)> {
    config.validate()?;
    let initial = encoding::encode(config.encoding, w, config.n_qubits)?;
    let (state, outcome) = match config.schedule {
        Schedule::Fixed(k) => {
            let mut state = initial;
            for _ in 0..k {
                grover::grover_iterate(&mut state, marked, None)?;
            }
            (state, None)
        }
        Schedule::Adaptive => {
            let (outcome, state) = search::adaptive_search_from(&initial, marked, &config.search)?;
            (state, Some(outcome))
        }
    };
    let p = state.probabilities();
    if p.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric("non-finite feature probabilities".into()));
    }
    Ok((FeatureVector { p, source_tokens: 1 }, outcome))
}

/// Per-token features pooled into one vector.
pub fn extract_sequence_features(tokens: &[WordVector], config: &QepfeConfig) -> Result<FeatureVector> {
    if tokens.is_empty() {
        return Err(Error::Degenerate("no tokens to extract features from".into()));
    }
    let per_token = tokens.iter().map(|w| extract_features(w, config)).collect::<Result<Vec<_>>>()?;
    pool(&per_token, config.pooling)
}

/// Fixed-order pooling of per-token feature vectors.
pub fn pool(features: &[FeatureVector], pooling: Pooling) -> Result<FeatureVector> {
    let first = features.first().ok_or_else(|| Error::Degenerate("nothing to pool".into()))?;
    let dim = first.p.len();
    if features.iter().any(|f| f.p.len() != dim) {
        return Err(Error::Shape("feature vectors of differing dimension".into()));
    }
    let mut p = vec![0.0; dim];
    match pooling {
        Pooling::Mean => {
            for f in features {
                for (acc, v) in p.iter_mut().zip(&f.p) {
                    *acc += v;
                }
            }
            let count = features.len() as f64;
            p.iter_mut().for_each(|v| *v /= count);
        }
        Pooling::Max => {
            for f in features {
                for (acc, &v) in p.iter_mut().zip(&f.p) {
                    *acc = acc.max(v);
                }
            }
            let total: f64 = p.iter().sum();
            if !(total > 0.0) {
                return Err(Error::Numeric("max-pooled features sum to zero".into()));
            }
            p.iter_mut().for_each(|v| *v /= total);
        }
    }
    Ok(FeatureVector { p, source_tokens: features.iter().map(|f| f.source_tokens).sum() })
}
