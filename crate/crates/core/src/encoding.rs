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

//! Loading real vectors into a register.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::statevector::{GateSpec, Statevector};

/// A real input vector; components are unitless embedding coordinates
/// (amplitude encoding) or angles in radians (angle encoding).
#[derive(Clone, Debug, PartialEq)]
pub struct WordVector<T = f64> {
    values: Vec<T>,
}

impl<T: Real> WordVector<T> {
    pub fn new(values: Vec<T>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Degenerate("word vector has no components".into()));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn l2_norm(&self) -> T {
        self.values.iter().map(|&v| v * v).sum::<T>().sqrt()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EncodingKind {
    #[default]
    Amplitude,
    Angle,
}

impl EncodingKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EncodingKind::Amplitude => "amplitude",
            EncodingKind::Angle => "angle",
        }
    }

    /// Number of real components a register of `n_qubits` consumes.
    pub fn input_len(self, n_qubits: usize) -> usize {
        match self {
            EncodingKind::Amplitude => 1 << n_qubits,
            EncodingKind::Angle => n_qubits,
        }
    }
}

impl fmt::Display for EncodingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EncodingKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "amplitude" => Ok(EncodingKind::Amplitude),
            "angle" => Ok(EncodingKind::Angle),
            other => Err(Error::Config(format!("unknown encoding {other:?}, expected \"amplitude\" or \"angle\""))),
        }
    }
}

/// Smallest qubit count whose register holds `len` amplitudes.
pub fn required_qubits(len: usize) -> usize {
    len.max(1).next_power_of_two().trailing_zeros() as usize
}

/// `amplitude(x) = w_x / ‖w‖₂` for `x < m`, zero above.
pub fn amplitude_encode<T: Real>(w: &WordVector<T>, n_qubits: usize) -> Result<Statevector<T>> {
    let mut state = Statevector::new_zero_state(n_qubits)?;
    if w.len() > state.dim() {
        return Err(Error::Capacity { len: w.len(), n_qubits, required_qubits: required_qubits(w.len()) });
    }
    let norm = w.l2_norm();
    if !norm.is_finite() {
        return Err(Error::Numeric("word vector has non-finite components".into()));
    }
    if norm <= T::of(1e-12) {
        return Err(Error::Degenerate("cannot amplitude-encode a zero vector".into()));
    }
    let amps = state.amplitudes_mut();
    amps[0] = Complex::new(T::zero(), T::zero());
    for (amp, &v) in amps.iter_mut().zip(w.values()) {
        *amp = Complex::new(v / norm, T::zero());
    }
    Ok(state)
}

/// `⊗ᵢ RY(wᵢ)|0⟩`, one angle per qubit.
pub fn angle_encode<T: Real>(w: &WordVector<T>, n_qubits: usize) -> Result<Statevector<T>> {
    if w.len() != n_qubits {
        return Err(Error::Shape(format!(
            "angle encoding needs one angle per qubit: {} angles for {n_qubits} qubits",
            w.len()
        )));
    }
    if w.values().iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric("word vector has non-finite components".into()));
    }
    let mut state = Statevector::new_zero_state(n_qubits)?;
    for (qubit, &angle) in w.values().iter().enumerate() {
        state.apply_gate(&GateSpec::ry(angle, qubit))?;
    }
    Ok(state)
}

pub fn encode<T: Real>(kind: EncodingKind, w: &WordVector<T>, n_qubits: usize) -> Result<Statevector<T>> {
    match kind {
        EncodingKind::Amplitude => amplitude_encode(w, n_qubits),
        EncodingKind::Angle => angle_encode(w, n_qubits),
    }
}

/// Resizes an embedding to `len` components: zero-padded when it fits,
/// otherwise folded by summing strided segments,
/// `out[j] = Σₖ embedding[j + k·len]`.
pub fn fold_to_len<T: Real>(embedding: &[T], len: usize) -> Vec<T> {
    let len = len.max(1);
    let mut out = vec![T::zero(); len];
    for (i, &v) in embedding.iter().enumerate() {
        out[i % len] += v;
    }
    out
}

/// Projects an embedding of any dimension onto a `2^n_qubits` register.
pub fn project_to_register<T: Real>(embedding: &[T], n_qubits: usize) -> Result<WordVector<T>> {
    if embedding.is_empty() {
        return Err(Error::Degenerate("embedding has no components".into()));
    }
    WordVector::new(fold_to_len(embedding, 1 << n_qubits))
}
