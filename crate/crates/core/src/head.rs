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

//! Linear softmax head over the fused vector `z = p ⊕ h`.

use std::io::{Read, Write};

use rand::Rng;

use crate::error::{Error, Result};
use crate::qepfe::FeatureVector;
use crate::scalar::Real;
use crate::seed;

/// Concatenation of quantum features `p` and a frozen embedding `h`.
#[derive(Clone, Debug, PartialEq)]
pub struct FusionInput {
    z: Vec<f64>,
    p_dim: usize,
}

impl FusionInput {
    pub fn new(p: &FeatureVector, h: &[f64]) -> Self {
        let mut z = Vec::with_capacity(p.p.len() + h.len());
        z.extend_from_slice(&p.p);
        z.extend_from_slice(h);
        Self { z, p_dim: p.p.len() }
    }

    pub fn z(&self) -> &[f64] {
        &self.z
    }

    pub fn p(&self) -> &[f64] {
        &self.z[..self.p_dim]
    }

    pub fn h(&self) -> &[f64] {
        &self.z[self.p_dim..]
    }

    pub fn into_z(self) -> Vec<f64> {
        self.z
    }
}

/// `softmax(W z + b)` with `W` stored row-major, `classes × input_dim`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearHead<T = f64> {
    classes: usize,
    input_dim: usize,
    pub weights: Vec<T>,
    pub bias: Vec<T>,
}

/// Gradients with the same layout as [`LinearHead`].
#[derive(Clone, Debug, PartialEq)]
pub struct HeadGrads<T = f64> {
    pub weights: Vec<T>,
    pub bias: Vec<T>,
}

/// Max-subtracted softmax.
pub fn softmax<T: Real>(logits: &[T]) -> Vec<T> {
    let max = logits.iter().copied().fold(T::neg_infinity(), T::max);
    let exps: Vec<T> = logits.iter().map(|&l| (l - max).exp()).collect();
    let total: T = exps.iter().copied().sum();
    exps.into_iter().map(|e| e / total).collect()
}

impl<T: Real> LinearHead<T> {
    pub fn zeros(classes: usize, input_dim: usize) -> Result<Self> {
        if classes < 2 || input_dim == 0 {
            return Err(Error::Validation(format!(
                "head needs ≥ 2 classes and a non-empty input, got {classes} × {input_dim}"
            )));
        }
        Ok(Self { classes, input_dim, weights: vec![T::zero(); classes * input_dim], bias: vec![T::zero(); classes] })
    }

    /// Weights uniform in `±1/√input_dim`, zero bias.
    pub fn seeded(classes: usize, input_dim: usize, seed: u64) -> Result<Self> {
        let mut head = Self::zeros(classes, input_dim)?;
        let bound = 1.0 / (input_dim as f64).sqrt();
        let mut rng = seed::rng(seed);
        for w in &mut head.weights {
            *w = T::of(rng.gen_range(-bound..bound));
        }
        Ok(head)
    }

    pub fn from_parts(classes: usize, input_dim: usize, weights: Vec<T>, bias: Vec<T>) -> Result<Self> {
        if weights.len() != classes * input_dim || bias.len() != classes {
            return Err(Error::Shape(format!(
                "weights {} and bias {} do not match {classes} × {input_dim}",
                weights.len(),
                bias.len()
            )));
        }
        let mut head = Self::zeros(classes, input_dim)?;
        head.weights = weights;
        head.bias = bias;
        Ok(head)
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    fn check_input(&self, z: &[T]) -> Result<()> {
        if z.len() != self.input_dim {
            return Err(Error::Validation(format!(
                "fusion input has {} components, head expects {}",
                z.len(),
                self.input_dim
            )));
        }
        Ok(())
    }

    pub fn logits(&self, z: &[T]) -> Result<Vec<T>> {
        self.check_input(z)?;
        Ok(self
            .weights
            .chunks_exact(self.input_dim)
            .zip(&self.bias)
            .map(|(row, &b)| row.iter().zip(z).map(|(&w, &x)| w * x).sum::<T>() + b)
            .collect())
    }

    /// `(logits, probs)`.
    pub fn forward(&self, z: &[T]) -> Result<(Vec<T>, Vec<T>)> {
        let logits = self.logits(z)?;
        let probs = softmax(&logits);
        Ok((logits, probs))
    }

    /// Arg-max class; ties go to the smaller index.
    pub fn predict(&self, z: &[T]) -> Result<usize> {
        let logits = self.logits(z)?;
        Ok(logits
            .iter()
            .enumerate()
            .fold((0, T::neg_infinity()), |(bi, bv), (i, &v)| if v > bv { (i, v) } else { (bi, bv) })
            .0)
    }

    /// Mean cross-entropy over `batch` and its exact gradient.
    pub fn loss_and_grad(&self, batch: &[(&[T], usize)]) -> Result<(T, HeadGrads<T>)> {
        if batch.is_empty() {
            return Err(Error::Validation("empty batch".into()));
        }
        let mut grads = HeadGrads { weights: vec![T::zero(); self.weights.len()], bias: vec![T::zero(); self.classes] };
        let mut loss = T::zero();
        for &(z, label) in batch {
            if label >= self.classes {
                return Err(Error::Validation(format!("label {label} out of range for {} classes", self.classes)));
            }
            let (_, probs) = self.forward(z)?;
            loss -= probs[label].max(T::min_positive_value()).ln();
            // ∂L/∂logit_c = p_c − [c = label]
            for (c, &p) in probs.iter().enumerate() {
                let delta = if c == label { p - T::one() } else { p };
                grads.bias[c] += delta;
                let row = &mut grads.weights[c * self.input_dim..(c + 1) * self.input_dim];
                for (g, &x) in row.iter_mut().zip(z) {
                    *g += delta * x;
                }
            }
        }
        let n = T::of_usize(batch.len());
        grads.weights.iter_mut().chain(grads.bias.iter_mut()).for_each(|g| *g /= n);
        Ok((loss / n, grads))
    }
}

const CHECKPOINT_MAGIC: &[u8; 4] = b"QTPH";
pub const CHECKPOINT_VERSION: u32 = 1;

/// Writes `magic, version, C, N, d` (u32 LE) then weights and bias as f64 LE.
/// `input_dim` must equal `feature_dim + embed_dim`.
pub fn write_checkpoint<W: Write>(
    head: &LinearHead<f64>,
    feature_dim: usize,
    embed_dim: usize,
    mut out: W,
) -> Result<()> {
    if feature_dim + embed_dim != head.input_dim() {
        return Err(Error::Shape(format!(
            "N + d = {} does not match head input {}",
            feature_dim + embed_dim,
            head.input_dim()
        )));
    }
    out.write_all(CHECKPOINT_MAGIC)?;
    for v in [CHECKPOINT_VERSION, head.classes() as u32, feature_dim as u32, embed_dim as u32] {
        out.write_all(&v.to_le_bytes())?;
    }
    for w in head.weights.iter().chain(&head.bias) {
        out.write_all(&w.to_le_bytes())?;
    }
    out.flush()?;
    Ok(())
}

/// Head plus `(N, d)` from a checkpoint stream.
pub fn read_checkpoint<R: Read>(mut input: R) -> Result<(LinearHead<f64>, usize, usize)> {
    let mut magic = [0u8; 4];
    input.read_exact(&mut magic).map_err(|e| Error::Data(format!("checkpoint header: {e}")))?;
    if &magic != CHECKPOINT_MAGIC {
        return Err(Error::Data(format!("bad checkpoint magic {magic:?}")));
    }
    let mut read_u32 = || -> Result<u32> {
        let mut b = [0u8; 4];
        input.read_exact(&mut b).map_err(|e| Error::Data(format!("checkpoint header: {e}")))?;
        Ok(u32::from_le_bytes(b))
    };
    let version = read_u32()?;
    if version != CHECKPOINT_VERSION {
        return Err(Error::Data(format!("unsupported checkpoint version {version}")));
    }
    let classes = read_u32()? as usize;
    let feature_dim = read_u32()? as usize;
    let embed_dim = read_u32()? as usize;
    let input_dim = feature_dim + embed_dim;
    let mut values = vec![0f64; classes * input_dim + classes];
    let mut buf = [0u8; 8];
    for v in &mut values {
        input.read_exact(&mut buf).map_err(|e| Error::Data(format!("truncated checkpoint: {e}")))?;
        *v = f64::from_le_bytes(buf);
    }
    let bias = values.split_off(classes * input_dim);
    let head = LinearHead::from_parts(classes, input_dim, values, bias)?;
    Ok((head, feature_dim, embed_dim))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_head_is_uniform() {
        let head = LinearHead::<f64>::zeros(2, 3).unwrap();
        let (_, probs) = head.forward(&[0.3, -1.0, 2.0]).unwrap();
        assert_eq!(probs, vec![0.5, 0.5]);
    }

    #[test]
    fn softmax_is_shift_invariant() {
        assert_eq!(softmax(&[0.0f64, 0.0]), vec![0.5, 0.5]);
        assert_eq!(softmax(&[1000.0f64, 1000.0]), vec![0.5, 0.5]);
        let a = softmax(&[0.1f64, -2.0, 3.5]);
        let b = softmax(&[7.1f64, 5.0, 10.5]);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn identity_block() {
        let head = LinearHead::from_parts(2, 2, vec![1.0, 0.0, 0.0, 1.0], vec![0.0, 0.0]).unwrap();
        let (_, probs) = head.forward(&[1.0, 0.0]).unwrap();
        let e = std::f64::consts::E;
        assert!((probs[0] - e / (e + 1.0)).abs() < 1e-15);
        assert!((probs[0] - 0.7311).abs() < 1e-4 && (probs[1] - 0.2689).abs() < 1e-4);
    }

    #[test]
    fn shape_mismatch() {
        let head = LinearHead::<f64>::zeros(2, 3).unwrap();
        assert!(matches!(head.forward(&[1.0]), Err(Error::Validation(_))));
        assert!(head.loss_and_grad(&[(&[0.0, 0.0, 0.0], 2)]).is_err());
        assert!(head.loss_and_grad(&[]).is_err());
    }

    #[test]
    fn uniform_loss_is_ln2() {
        let head = LinearHead::<f64>::zeros(2, 2).unwrap();
        let (loss, _) = head.loss_and_grad(&[(&[0.5, 0.5], 0)]).unwrap();
        assert!((loss - std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn confident_prediction_has_vanishing_loss() {
        let head = LinearHead::from_parts(2, 1, vec![50.0, -50.0], vec![0.0, 0.0]).unwrap();
        let (loss, _) = head.loss_and_grad(&[(&[1.0], 0)]).unwrap();
        assert!((0.0..1e-40).contains(&loss));
    }

    #[test]
    fn checkpoint_round_trip_and_layout() {
        let head = LinearHead::<f64>::seeded(3, 5, 9).unwrap();
        let mut buf = Vec::new();
        write_checkpoint(&head, 4, 1, &mut buf).unwrap();
        assert_eq!(&buf[..4], b"QTPH");
        assert_eq!(buf.len(), 4 + 16 + 8 * (15 + 3));
        assert_eq!(u32::from_le_bytes(buf[8..12].try_into().unwrap()), 3);
        assert_eq!(f64::from_le_bytes(buf[20..28].try_into().unwrap()), head.weights[0]);
        let (back, n, d) = read_checkpoint(&buf[..]).unwrap();
        assert_eq!((n, d), (4, 1));
        assert_eq!(back, head);
        assert!(read_checkpoint(&buf[..30]).is_err());
        assert!(write_checkpoint(&head, 4, 2, Vec::new()).is_err());
    }
}
