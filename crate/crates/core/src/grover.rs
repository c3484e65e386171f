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

//! Oracle, diffusion and phase-detection operators.

use std::f64::consts::FRAC_PI_4;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::statevector::{qubit_mask, Statevector};

/// The marked basis indices `A` and their membership predicate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkedSet {
    n_qubits: usize,
    members: Vec<usize>,
    flags: Vec<bool>,
}

impl MarkedSet {
    /// Builds `A` from indices (sorted and de-duplicated). Requires
    /// `1 ≤ |A| ≤ 2^n − 1`.
    pub fn new(n_qubits: usize, members: impl IntoIterator<Item = usize>) -> Result<Self> {
        if n_qubits == 0 || n_qubits > crate::statevector::MAX_QUBITS {
            return Err(Error::Config(format!(
                "n_qubits must be in 1..={}, got {n_qubits}",
                crate::statevector::MAX_QUBITS
            )));
        }
        let dim = 1usize << n_qubits;
        let mut members: Vec<usize> = members.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        if let Some(&bad) = members.iter().find(|&&x| x >= dim) {
            return Err(Error::Validation(format!("marked index {bad} out of range for {n_qubits} qubits")));
        }
        if members.is_empty() {
            return Err(Error::Validation("marked set is empty".into()));
        }
        if members.len() == dim {
            return Err(Error::Validation("marked set covers every basis state".into()));
        }
        let mut flags = vec![false; dim];
        for &x in &members {
            flags[x] = true;
        }
        Ok(Self { n_qubits, members, flags })
    }

    /// Builds `A` from a predicate evaluated on every index.
    pub fn from_predicate(n_qubits: usize, f: impl Fn(usize) -> bool) -> Result<Self> {
        if n_qubits == 0 || n_qubits > crate::statevector::MAX_QUBITS {
            return Err(Error::Config(format!(
                "n_qubits must be in 1..={}, got {n_qubits}",
                crate::statevector::MAX_QUBITS
            )));
        }
        Self::new(n_qubits, (0..1usize << n_qubits).filter(|&x| f(x)))
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// `N = 2^n`.
    pub fn dim(&self) -> usize {
        self.flags.len()
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    /// `a = |A|`.
    pub fn count(&self) -> usize {
        self.members.len()
    }

    /// `f(x)`: classical membership check.
    pub fn contains(&self, x: usize) -> bool {
        self.flags.get(x).copied().unwrap_or(false)
    }
}

/// Rotation angle `θ_a = arcsin √(a/N)` and the optimal iteration count
/// `⌊(π/4)·√(N/a)⌋`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GroverAngles {
    pub theta_a: f64,
    pub k_opt: usize,
}

impl GroverAngles {
    pub fn new(n_qubits: usize, a: usize) -> Result<Self> {
        let dim = checked_dim(n_qubits)?;
        if a == 0 || a >= dim {
            return Err(Error::Validation(format!("marked count {a} must be in 1..{dim}")));
        }
        let ratio = a as f64 / dim as f64;
        Ok(Self { theta_a: ratio.sqrt().asin(), k_opt: (FRAC_PI_4 * (1.0 / ratio).sqrt()).floor() as usize })
    }
}

fn checked_dim(n_qubits: usize) -> Result<usize> {
    if n_qubits == 0 || n_qubits > 62 {
        return Err(Error::Config(format!("n_qubits {n_qubits} out of range")));
    }
    Ok(1usize << n_qubits)
}

/// `sin²((2k+1)·θ_a)`: marked mass after `k` iterations from `|In⟩`.
pub fn analytic_success(n_qubits: usize, a: usize, k: usize) -> Result<f64> {
    let angles = GroverAngles::new(n_qubits, a)?;
    Ok(((2 * k + 1) as f64 * angles.theta_a).sin().powi(2))
}

fn check_dims<T: Real>(state: &Statevector<T>, marked: &MarkedSet) -> Result<()> {
    if state.n_qubits() != marked.n_qubits() {
        return Err(Error::Shape(format!(
            "oracle on {} qubits applied to a {}-qubit state",
            marked.n_qubits(),
            state.n_qubits()
        )));
    }
    Ok(())
}

/// Phase oracle: negates `amplitude(x)` for every `x ∈ A`.
pub fn apply_oracle<T: Real>(state: &mut Statevector<T>, marked: &MarkedSet) -> Result<()> {
    check_dims(state, marked)?;
    let amps = state.amplitudes_mut();
    for &x in marked.members() {
        amps[x] = -amps[x];
    }
    Ok(())
}

/// `|In⟩ = H^⊗n |0⟩`.
pub fn uniform_superposition<T: Real>(n_qubits: usize) -> Result<Statevector<T>> {
    let mut state = Statevector::new_zero_state(n_qubits)?;
    let amp = Complex::new(T::one() / T::of_usize(state.dim()).sqrt(), T::zero());
    state.amplitudes_mut().fill(amp);
    Ok(state)
}

/// Reflection about the mean amplitude, `2|In⟩⟨In| − I`.
pub fn apply_diffusion<T: Real>(state: &mut Statevector<T>) {
    let dim = T::of_usize(state.dim());
    let sum = state.amplitudes().iter().fold(Complex::new(T::zero(), T::zero()), |acc, a| acc + a);
    let twice_mean = sum * ((T::one() + T::one()) / dim);
    for amp in state.amplitudes_mut() {
        *amp = twice_mean - *amp;
    }
}

/// `|⟨s|ψ⟩|²` with `|s⟩ = |+⟩^⊗n`: the probability that phase detection
/// flips its ancilla.
pub fn phase_detection_overlap<T: Real>(state: &Statevector<T>) -> T {
    let sum = state.amplitudes().iter().fold(Complex::new(T::zero(), T::zero()), |acc, a| acc + a);
    sum.norm_sqr() / T::of_usize(state.dim())
}

/// One Grover iteration: oracle, optional phase-detection monitor, diffusion.
///
/// When `pd_trace` is given the ancilla-flip probability of the post-oracle
/// state is appended to it; the data register is not disturbed.
pub fn grover_iterate<T: Real>(
    state: &mut Statevector<T>,
    marked: &MarkedSet,
    pd_trace: Option<&mut Vec<T>>,
) -> Result<()> {
    apply_oracle(state, marked)?;
    if let Some(trace) = pd_trace {
        trace.push(phase_detection_overlap(state));
    }
    apply_diffusion(state);
    Ok(())
}

/// Appends one ancilla qubit in `|0⟩` after the existing qubits.
pub fn attach_ancilla<T: Real>(state: &Statevector<T>) -> Result<Statevector<T>> {
    let zero = Complex::new(T::zero(), T::zero());
    let mut amps = Vec::with_capacity(state.dim() * 2);
    for &a in state.amplitudes() {
        amps.push(a);
        amps.push(zero);
    }
    Statevector::from_amplitudes(amps)
}

/// `PD = (I − |s⟩⟨s|) ⊗ I + |s⟩⟨s| ⊗ X` on a register whose qubit `ancilla`
/// is the flag and whose remaining qubits form the data register.
/// Acts on arbitrary states; see [`apply_phase_detection`] for the checked
/// form used in practice.
pub fn apply_phase_detection_unitary<T: Real>(state: &mut Statevector<T>, ancilla: usize) -> Result<()> {
    let n = state.n_qubits();
    if n < 2 || ancilla >= n {
        return Err(Error::Validation(format!(
            "ancilla {ancilla} invalid for a {n}-qubit register (needs a data qubit and an ancilla)"
        )));
    }
    let mask = qubit_mask(n, ancilla);
    let zero = Complex::new(T::zero(), T::zero());
    let (mut sum0, mut sum1) = (zero, zero);
    for (i, a) in state.amplitudes().iter().enumerate() {
        if i & mask == 0 {
            sum0 += a;
        } else {
            sum1 += a;
        }
    }
    // With o_b = ⟨s|ψ_b⟩ and s uniform over D data states, every ψ_0 entry
    // moves by (o_1 − o_0)/√D and every ψ_1 entry by the opposite amount.
    let data_dim = T::of_usize(state.dim() / 2);
    let shift = (sum1 - sum0) / data_dim;
    for (i, a) in state.amplitudes_mut().iter_mut().enumerate() {
        if i & mask == 0 {
            *a += shift;
        } else {
            *a -= shift;
        }
    }
    Ok(())
}

/// Applies `PD` to a register whose ancilla starts in `|0⟩` and returns the
/// exact probability of finding the ancilla in `|1⟩` afterwards, without
/// collapsing the state.
pub fn apply_phase_detection<T: Real>(state: &mut Statevector<T>, ancilla: usize) -> Result<T> {
    let n = state.n_qubits();
    if n < 2 || ancilla >= n {
        return Err(Error::Validation(format!("ancilla {ancilla} invalid for a {n}-qubit register")));
    }
    let mask = qubit_mask(n, ancilla);
    let excited: T =
        state.amplitudes().iter().enumerate().filter(|(i, _)| i & mask != 0).map(|(_, a)| a.norm_sqr()).sum();
    if excited > T::of(1e-12) {
        return Err(Error::Precondition(format!("ancilla qubit {ancilla} is not in |0⟩ (|1⟩ population {excited})")));
    }
    apply_phase_detection_unitary(state, ancilla)?;
    Ok(state.amplitudes().iter().enumerate().filter(|(i, _)| i & mask != 0).map(|(_, a)| a.norm_sqr()).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn reals(s: &Statevector<f64>) -> Vec<f64> {
        s.amplitudes().iter().map(|a| a.re).collect()
    }

    #[test]
    fn marked_set_validation() {
        assert!(MarkedSet::new(2, []).is_err());
        assert!(MarkedSet::new(2, [0, 1, 2, 3]).is_err());
        assert!(MarkedSet::new(2, [4]).is_err());
        let m = MarkedSet::new(3, [5, 1, 5]).unwrap();
        assert_eq!(m.members(), &[1, 5]);
        assert_eq!(m.count(), 2);
    }

    #[test]
    fn predicate_matches_members_exhaustively() {
        for n in 2..=12 {
            let m = MarkedSet::from_predicate(n, |x| x % 7 == 3).unwrap();
            for x in 0..1usize << n {
                assert_eq!(m.contains(x), x % 7 == 3);
                assert_eq!(m.members().binary_search(&x).is_ok(), m.contains(x));
            }
        }
    }

    #[test]
    fn oracle_flips_marked_sign() {
        let mut s = uniform_superposition::<f64>(2).unwrap();
        let m = MarkedSet::new(2, [3]).unwrap();
        apply_oracle(&mut s, &m).unwrap();
        assert_eq!(reals(&s), vec![0.5, 0.5, 0.5, -0.5]);
        apply_oracle(&mut s, &m).unwrap();
        assert_eq!(s, uniform_superposition(2).unwrap());
    }

    #[test]
    fn oracle_dimension_mismatch() {
        let mut s = uniform_superposition::<f64>(3).unwrap();
        let m = MarkedSet::new(2, [3]).unwrap();
        assert!(matches!(apply_oracle(&mut s, &m), Err(Error::Shape(_))));
    }

    #[test]
    fn uniform_examples() {
        for a in reals(&uniform_superposition(1).unwrap()) {
            assert!((a - FRAC_1_SQRT_2).abs() < 1e-15);
        }
        assert_eq!(reals(&uniform_superposition(2).unwrap()), vec![0.5; 4]);
        for a in reals(&uniform_superposition(3).unwrap()) {
            assert!((a - 0.353553).abs() < 1e-6);
        }
    }

    #[test]
    fn diffusion_after_oracle() {
        let mut s = Statevector::from_real(&[0.5, 0.5, 0.5, -0.5]).unwrap();
        apply_diffusion(&mut s);
        assert_eq!(reals(&s), vec![0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn diffusion_fixes_uniform() {
        let mut s = uniform_superposition::<f64>(4).unwrap();
        apply_diffusion(&mut s);
        for a in s.amplitudes() {
            assert!((a.re - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn iterate_examples() {
        let mut s = uniform_superposition::<f64>(2).unwrap();
        let m = MarkedSet::new(2, [3]).unwrap();
        grover_iterate(&mut s, &m, None).unwrap();
        assert!((s.mass_on(m.members()) - 1.0).abs() < 1e-12);

        let m = MarkedSet::new(3, [5]).unwrap();
        let mut s = uniform_superposition::<f64>(3).unwrap();
        grover_iterate(&mut s, &m, None).unwrap();
        assert!((s.mass_on(m.members()) - 0.78125).abs() < 1e-12);
        grover_iterate(&mut s, &m, None).unwrap();
        assert!((s.mass_on(m.members()) - 0.9453125).abs() < 1e-12);
    }

    #[test]
    fn analytic_examples() {
        assert!((analytic_success(2, 1, 1).unwrap() - 1.0).abs() < 1e-15);
        assert!((analytic_success(3, 1, 1).unwrap() - 0.78125).abs() < 1e-15);
        for (n, a) in [(2, 1), (5, 3), (8, 17)] {
            let p = analytic_success(n, a, 0).unwrap();
            assert!((p - a as f64 / (1 << n) as f64).abs() < 1e-15);
        }
        assert!(analytic_success(2, 4, 0).is_err());
    }

    #[test]
    fn optimal_k_is_near_peak() {
        for n in 2..=10 {
            for a in 1..=8usize {
                // with a large fraction marked the curve wraps past π inside
                // the scan window and a later period can beat k_opt
                if 4 * a > 1 << n {
                    continue;
                }
                let angles = GroverAngles::new(n, a).unwrap();
                let dim = (1usize << n) as f64;
                let upper = (std::f64::consts::FRAC_PI_2 * (dim / a as f64).sqrt()).ceil() as usize;
                let best = (0..=upper).map(|k| analytic_success(n, a, k).unwrap()).fold(0.0f64, f64::max);
                let near = (angles.k_opt.saturating_sub(1)..=angles.k_opt + 1)
                    .map(|k| analytic_success(n, a, k).unwrap())
                    .fold(0.0f64, f64::max);
                assert!((best - near).abs() < 1e-12, "n={n} a={a} k_opt={}", angles.k_opt);
            }
        }
    }

    #[test]
    fn phase_detection_examples() {
        // data = |s⟩
        let data = uniform_superposition::<f64>(2).unwrap();
        let mut reg = attach_ancilla(&data).unwrap();
        let flip = apply_phase_detection(&mut reg, 2).unwrap();
        assert!((flip - 1.0).abs() < 1e-12);
        for (i, a) in reg.amplitudes().iter().enumerate() {
            let expected = if i & 1 == 1 { 0.5 } else { 0.0 };
            assert!((a.re - expected).abs() < 1e-12);
        }

        // data ⟂ |s⟩
        let data = Statevector::from_real(&[FRAC_1_SQRT_2, -FRAC_1_SQRT_2]).unwrap();
        let before = attach_ancilla(&data).unwrap();
        let mut reg = before.clone();
        let flip = apply_phase_detection(&mut reg, 1).unwrap();
        assert!(flip.abs() < 1e-12);
        for (a, b) in reg.amplitudes().iter().zip(before.amplitudes()) {
            assert!((a - b).norm() < 1e-12);
        }

        // basis state on n = 2
        let data = Statevector::<f64>::basis_state(2, 2).unwrap();
        let mut reg = attach_ancilla(&data).unwrap();
        assert!((apply_phase_detection(&mut reg, 2).unwrap() - 0.25).abs() < 1e-12);
        assert!((phase_detection_overlap(&data) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn phase_detection_requires_clean_ancilla() {
        let mut reg = Statevector::<f64>::basis_state(2, 1).unwrap();
        assert!(matches!(apply_phase_detection(&mut reg, 1), Err(Error::Precondition(_))));
    }

    #[test]
    fn pd_trace_is_recorded_without_disturbing_state() {
        let m = MarkedSet::new(4, [9]).unwrap();
        let mut a = uniform_superposition::<f64>(4).unwrap();
        let mut b = a.clone();
        let mut trace = Vec::new();
        for _ in 0..3 {
            grover_iterate(&mut a, &m, Some(&mut trace)).unwrap();
            grover_iterate(&mut b, &m, None).unwrap();
        }
        assert_eq!(a, b);
        assert_eq!(trace.len(), 3);
    }
}
