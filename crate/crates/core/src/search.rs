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

//! Randomized amplitude amplification for an unknown number of marked items.
//!
//! Starting from `m = 1`, each round draws an iteration count `k` uniformly
//! from a window of size `⌈m⌉`, amplifies, measures, and checks the outcome
//! classically. On failure `m ← λ·m`. The loop runs while `m ≤ max_m`
//! (`√N` unless configured).

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grover::{self, GroverAngles, MarkedSet};
use crate::scalar::Real;
use crate::seed;
use crate::statevector::Statevector;

/// Which window the iteration count is drawn from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KConvention {
    /// `k ∈ {0, …, ⌈m⌉−1}`, the window the closed-form `P_m` averages over.
    #[default]
    ZeroBased,
    /// `k ∈ {1, …, ⌈m⌉}`.
    OneBased,
}

impl KConvention {
    pub fn as_str(self) -> &'static str {
        match self {
            KConvention::ZeroBased => "zero-based",
            KConvention::OneBased => "one-based",
        }
    }

    /// Inclusive bounds of the window for a window size `size ≥ 1`.
    pub fn window(self, size: usize) -> (usize, usize) {
        match self {
            KConvention::ZeroBased => (0, size - 1),
            KConvention::OneBased => (1, size),
        }
    }
}

impl fmt::Display for KConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for KConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zero-based" => Ok(KConvention::ZeroBased),
            "one-based" => Ok(KConvention::OneBased),
            other => {
                Err(Error::Config(format!("unknown k convention {other:?}, expected \"zero-based\" or \"one-based\"")))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Growth factor for `m`, `1 < λ ≤ 2`.
    pub lambda: f64,
    /// Loop cap on `m`; `None` means `√N`.
    pub max_m: Option<f64>,
    pub k_convention: KConvention,
    pub seed: u64,
    /// Record the phase-detection monitor of every round's final state.
    pub record_pd: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self { lambda: 6.0 / 5.0, max_m: None, k_convention: KConvention::ZeroBased, seed: 0, record_pd: false }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 1.0 && self.lambda <= 2.0) {
            return Err(Error::Config(format!("search.lambda must be in (1, 2], got {}", self.lambda)));
        }
        if let Some(max_m) = self.max_m {
            if !(max_m >= 1.0) {
                return Err(Error::Config(format!("search.max_m must be ≥ 1, got {max_m}")));
            }
        }
        Ok(())
    }

    /// Effective loop cap for a register of `dim` states.
    pub fn cap(&self, dim: usize) -> f64 {
        self.max_m.unwrap_or_else(|| (dim as f64).sqrt())
    }

    /// The sequence of `m` values the loop visits when every round fails.
    pub fn schedule(&self, dim: usize) -> Vec<f64> {
        let cap = self.cap(dim);
        let mut out = Vec::new();
        let mut m = 1.0;
        while m <= cap {
            out.push(m);
            m *= self.lambda;
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundLog {
    pub m: f64,
    pub k: usize,
    pub measured: usize,
    pub success: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    /// A verified member of `A`, or `None` when the loop was exhausted.
    pub found: Option<usize>,
    /// Grover iterations (one oracle call each) plus one classical
    /// verification per round.
    pub oracle_calls: u64,
    pub grover_iterations: u64,
    pub verifications: u64,
    pub iterations_log: Vec<RoundLog>,
    /// Per-round `|⟨s|ψ⟩|²` of the pre-measurement state, when requested.
    pub pd_trace: Vec<f64>,
}

/// `G^k |ψ₀⟩` for increasing `k`, computed once and reused across rounds.
struct Amplified<'a, T> {
    marked: &'a MarkedSet,
    states: Vec<Statevector<T>>,
}

impl<'a, T: Real> Amplified<'a, T> {
    fn new(initial: Statevector<T>, marked: &'a MarkedSet) -> Result<Self> {
        if initial.n_qubits() != marked.n_qubits() {
            return Err(Error::Shape(format!(
                "initial state has {} qubits, marked set {}",
                initial.n_qubits(),
                marked.n_qubits()
            )));
        }
        Ok(Self { marked, states: vec![initial] })
    }

    fn get(&mut self, k: usize) -> Result<&Statevector<T>> {
        while self.states.len() <= k {
            let mut next = self.states[self.states.len() - 1].clone();
            grover::grover_iterate(&mut next, self.marked, None)?;
            self.states.push(next);
        }
        Ok(&self.states[k])
    }
}

/// Randomized search from the uniform superposition.
pub fn adaptive_search(marked: &MarkedSet, config: &SearchConfig) -> Result<SearchOutcome> {
    let initial = grover::uniform_superposition::<f64>(marked.n_qubits())?;
    Ok(adaptive_search_from(&initial, marked, config)?.0)
}

/// Randomized search from an arbitrary prepared state. Also returns the
/// state of the last round just before its measurement.
pub fn adaptive_search_from<T: Real>(
    initial: &Statevector<T>,
    marked: &MarkedSet,
    config: &SearchConfig,
) -> Result<(SearchOutcome, Statevector<T>)> {
    config.validate()?;
    let mut amplified = Amplified::new(initial.clone(), marked)?;
    let mut rng = seed::rng(config.seed);
    let cap = config.cap(marked.dim());

    let mut outcome = SearchOutcome {
        found: None,
        oracle_calls: 0,
        grover_iterations: 0,
        verifications: 0,
        iterations_log: Vec::new(),
        pd_trace: Vec::new(),
    };
    let mut last = 0usize;
    let mut m = 1.0f64;
    while m <= cap {
        let (lo, hi) = config.k_convention.window(m.ceil() as usize);
        let k = rng.gen_range(lo..=hi);
        let state = amplified.get(k)?;
        if config.record_pd {
            outcome.pd_trace.push(grover::phase_detection_overlap(state).as_f64());
        }
        let measured = state.sample_with(1, &mut rng)[0];
        let success = marked.contains(measured);
        last = k;
        outcome.grover_iterations += k as u64;
        outcome.verifications += 1;
        outcome.iterations_log.push(RoundLog { m, k, measured, success });
        if success {
            outcome.found = Some(measured);
            break;
        }
        m *= config.lambda;
    }
    outcome.oracle_calls = outcome.grover_iterations + outcome.verifications;
    let final_state = amplified.get(last)?.clone();
    Ok((outcome, final_state))
}

/// `P_m = 1/2 − sin(4mθ_a) / (4m·sin(2θ_a))`: success probability when `k`
/// is uniform on `{0, …, m−1}`.
pub fn p_m(n_qubits: usize, a: usize, m: usize) -> Result<f64> {
    if m == 0 {
        return Err(Error::Validation("m must be ≥ 1".into()));
    }
    let theta = GroverAngles::new(n_qubits, a)?.theta_a;
    let s2 = (2.0 * theta).sin();
    if s2 < 1e-12 {
        return Err(Error::Degenerate(format!("P_m is singular at a = N/2 (a = {a}, N = {})", 1usize << n_qubits)));
    }
    let m = m as f64;
    Ok(0.5 - (4.0 * m * theta).sin() / (4.0 * m * s2))
}

/// Success probability of one round with window size `m` under `convention`.
pub fn round_success(n_qubits: usize, a: usize, m: usize, convention: KConvention) -> Result<f64> {
    match convention {
        KConvention::ZeroBased => p_m(n_qubits, a, m),
        KConvention::OneBased => {
            // Average over {1..m} = ((m+1)·P_{m+1} − sin²θ_a) / m.
            let initial = a as f64 / (1usize << n_qubits) as f64;
            Ok(((m + 1) as f64 * p_m(n_qubits, a, m + 1)? - initial) / m as f64)
        }
    }
}

/// Probability that the whole loop finds a marked element.
pub fn schedule_success_probability(n_qubits: usize, a: usize, config: &SearchConfig) -> Result<f64> {
    config.validate()?;
    let mut failure = 1.0;
    for m in config.schedule(1 << n_qubits) {
        failure *= 1.0 - round_success(n_qubits, a, m.ceil() as usize, config.k_convention)?;
    }
    Ok(1.0 - failure)
}

/// Generous ceiling `8·√(N/a)` on the mean oracle-call count.
pub fn expected_calls_bound(n_qubits: usize, a: usize) -> f64 {
    8.0 * ((1usize << n_qubits) as f64 / a as f64).sqrt()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchSummary {
    pub n_qubits: usize,
    pub a: usize,
    pub runs: usize,
    pub successes: usize,
    pub false_positives: usize,
    pub mean_calls: f64,
    pub success_rate: f64,
}

/// Seed of run `index` in a Monte-Carlo batch.
pub fn run_seed(base: u64, index: usize) -> u64 {
    seed::child_seed(base, &format!("run-{index}"))
}

/// `runs` independent searches; run `i` uses [`run_seed`]`(config.seed, i)`.
/// Runs execute in parallel and are aggregated in seed order.
pub fn bbht_bench(
    marked: &MarkedSet,
    config: &SearchConfig,
    runs: usize,
) -> Result<(BenchSummary, Vec<SearchOutcome>)> {
    let outcomes = (0..runs)
        .into_par_iter()
        .map(|i| {
            let cfg = SearchConfig { seed: run_seed(config.seed, i), ..config.clone() };
            adaptive_search(marked, &cfg)
        })
        .collect::<Result<Vec<_>>>()?;
    let successes = outcomes.iter().filter(|o| o.found.is_some()).count();
    let false_positives = outcomes.iter().filter(|o| o.found.is_some_and(|x| !marked.contains(x))).count();
    let total_calls: u64 = outcomes.iter().map(|o| o.oracle_calls).sum();
    let summary = BenchSummary {
        n_qubits: marked.n_qubits(),
        a: marked.count(),
        runs,
        successes,
        false_positives,
        mean_calls: total_calls as f64 / runs.max(1) as f64,
        success_rate: successes as f64 / runs.max(1) as f64,
    };
    Ok((summary, outcomes))
}

/// Fixed-window trials: draw `k` per `convention` from a window of size `m`,
/// amplify from `|In⟩`, measure once. Returns the marked-measurement
/// frequency and the mean of `k`.
pub fn empirical_round_success(
    marked: &MarkedSet,
    m: usize,
    convention: KConvention,
    trials: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    if m == 0 || trials == 0 {
        return Err(Error::Validation("m and trials must be ≥ 1".into()));
    }
    let initial = grover::uniform_superposition::<f64>(marked.n_qubits())?;
    let mut amplified = Amplified::new(initial, marked)?;
    let mut rng = seed::rng(seed);
    let (lo, hi) = convention.window(m);
    let mut hits = 0usize;
    let mut k_sum = 0usize;
    for _ in 0..trials {
        let k = rng.gen_range(lo..=hi);
        let x = amplified.get(k)?.sample_with(1, &mut rng)[0];
        k_sum += k;
        if marked.contains(x) {
            hits += 1;
        }
    }
    Ok((hits as f64 / trials as f64, k_sum as f64 / trials as f64))
}
