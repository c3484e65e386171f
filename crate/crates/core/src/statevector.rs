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

//! Dense statevector and gate kernels.
//!
//! Basis indices are big-endian in the qubit label: qubit 0 is the most
//! significant bit of the index, so on three qubits `|100⟩` is index 4.

use num_complex::Complex;
use rand::Rng;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::seed;

/// Largest register the simulator accepts.
pub const MAX_QUBITS: usize = 20;

/// Single-qubit operation kinds. `Mcx` and `Mcz` take any number of controls
/// and act iff every control is `|1⟩`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GateKind<T> {
    X,
    H,
    Ry(T),
    Mcx,
    Mcz,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GateSpec<T> {
    pub kind: GateKind<T>,
    pub controls: Vec<usize>,
    pub target: usize,
}

impl<T: Real> GateSpec<T> {
    pub fn x(target: usize) -> Self {
        Self { kind: GateKind::X, controls: Vec::new(), target }
    }

    pub fn h(target: usize) -> Self {
        Self { kind: GateKind::H, controls: Vec::new(), target }
    }

    pub fn ry(angle: T, target: usize) -> Self {
        Self { kind: GateKind::Ry(angle), controls: Vec::new(), target }
    }

    pub fn mcx(controls: &[usize], target: usize) -> Self {
        Self { kind: GateKind::Mcx, controls: controls.to_vec(), target }
    }

    pub fn mcz(controls: &[usize], target: usize) -> Self {
        Self { kind: GateKind::Mcz, controls: controls.to_vec(), target }
    }

    /// The 2×2 block applied to the target when all controls are set,
    /// row-major `[[u00, u01], [u10, u11]]`.
    pub fn base_matrix(&self) -> [[Complex<T>; 2]; 2] {
        let zero = Complex::new(T::zero(), T::zero());
        let one = Complex::new(T::one(), T::zero());
        match self.kind {
            GateKind::X | GateKind::Mcx => [[zero, one], [one, zero]],
            GateKind::Mcz => [[one, zero], [zero, -one]],
            GateKind::H => {
                let r = Complex::new(T::FRAC_1_SQRT_2(), T::zero());
                [[r, r], [r, -r]]
            }
            GateKind::Ry(angle) => {
                let half = angle / (T::one() + T::one());
                let c = Complex::new(half.cos(), T::zero());
                let s = Complex::new(half.sin(), T::zero());
                [[c, -s], [s, c]]
            }
        }
    }

    /// Checks qubit indices against a register of `n_qubits`.
    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        if self.target >= n_qubits {
            return Err(Error::Validation(format!("target qubit {} out of range for {n_qubits} qubits", self.target)));
        }
        if matches!(self.kind, GateKind::X | GateKind::H | GateKind::Ry(_)) && !self.controls.is_empty() {
            return Err(Error::Validation(format!(
                "{:?} takes no controls; use Mcx/Mcz for controlled operations",
                self.kind
            )));
        }
        for (i, &c) in self.controls.iter().enumerate() {
            if c >= n_qubits {
                return Err(Error::Validation(format!("control qubit {c} out of range for {n_qubits} qubits")));
            }
            if c == self.target {
                return Err(Error::Validation(format!("qubit {c} is both control and target")));
            }
            if self.controls[..i].contains(&c) {
                return Err(Error::Validation(format!("duplicate control qubit {c}")));
            }
        }
        Ok(())
    }
}

/// A register of `n_qubits` as `2^n_qubits` complex amplitudes.
#[derive(Clone, Debug, PartialEq)]
pub struct Statevector<T = f64> {
    n_qubits: usize,
    amplitudes: Vec<Complex<T>>,
}

fn check_qubit_count(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 || n_qubits > MAX_QUBITS {
        return Err(Error::Config(format!("n_qubits must be in 1..={MAX_QUBITS}, got {n_qubits}")));
    }
    Ok(())
}

/// Bit mask of `qubit` in a basis index of an `n_qubits` register.
#[inline]
pub fn qubit_mask(n_qubits: usize, qubit: usize) -> usize {
    1 << (n_qubits - 1 - qubit)
}

impl<T: Real> Statevector<T> {
    /// `|0…0⟩` on `n_qubits`.
    pub fn new_zero_state(n_qubits: usize) -> Result<Self> {
        Self::basis_state(n_qubits, 0)
    }

    /// Computational basis state `|index⟩`.
    pub fn basis_state(n_qubits: usize, index: usize) -> Result<Self> {
        check_qubit_count(n_qubits)?;
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::Validation(format!("basis index {index} out of range for {n_qubits} qubits")));
        }
        let mut amplitudes = vec![Complex::new(T::zero(), T::zero()); dim];
        amplitudes[index] = Complex::new(T::one(), T::zero());
        Ok(Self { n_qubits, amplitudes })
    }

    /// Wraps an amplitude array. The length must be a power of two; the
    /// caller is responsible for normalization.
    pub fn from_amplitudes(amplitudes: Vec<Complex<T>>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::Shape(format!("amplitude count {len} is not a power of two ≥ 2")));
        }
        let n_qubits = len.trailing_zeros() as usize;
        check_qubit_count(n_qubits)?;
        Ok(Self { n_qubits, amplitudes })
    }

    /// Real amplitudes, see [`Statevector::from_amplitudes`].
    pub fn from_real(amplitudes: &[T]) -> Result<Self> {
        Self::from_amplitudes(amplitudes.iter().map(|&a| Complex::new(a, T::zero())).collect())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Number of basis states, `2^n_qubits`.
    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex<T> {
        self.amplitudes[index]
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex<T>> {
        self.amplitudes
    }

    /// `Σ |amplitude|²`.
    pub fn norm_sqr(&self) -> T {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        if self.dim() != other.dim() {
            return Err(Error::Shape(format!(
                "inner product of {}-qubit and {}-qubit states",
                self.n_qubits, other.n_qubits
            )));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a.conj() * b))
    }

    /// Born probabilities `|amplitude(x)|²` in index order.
    pub fn probabilities(&self) -> Vec<T> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Probability mass on a set of basis indices.
    pub fn mass_on(&self, indices: &[usize]) -> T {
        indices.iter().map(|&i| self.amplitudes[i].norm_sqr()).sum()
    }

    /// Applies one gate in place.
    pub fn apply_gate(&mut self, gate: &GateSpec<T>) -> Result<()> {
        gate.validate(self.n_qubits)?;
        let n = self.n_qubits;
        let control_mask = gate.controls.iter().fold(0usize, |m, &c| m | qubit_mask(n, c));
        let target_mask = qubit_mask(n, gate.target);

        if let GateKind::Mcz = gate.kind {
            let all = control_mask | target_mask;
            for (i, amp) in self.amplitudes.iter_mut().enumerate() {
                if i & all == all {
                    *amp = -*amp;
                }
            }
            return Ok(());
        }

        let [[u00, u01], [u10, u11]] = gate.base_matrix();
        for i in 0..self.amplitudes.len() {
            if i & target_mask != 0 || i & control_mask != control_mask {
                continue;
            }
            let j = i | target_mask;
            let a0 = self.amplitudes[i];
            let a1 = self.amplitudes[j];
            self.amplitudes[i] = u00 * a0 + u01 * a1;
            self.amplitudes[j] = u10 * a0 + u11 * a1;
        }
        Ok(())
    }

    /// Applies a sequence of gates in order.
    pub fn apply_all<'a, I>(&mut self, gates: I) -> Result<()>
    where
        I: IntoIterator<Item = &'a GateSpec<T>>,
    {
        for gate in gates {
            self.apply_gate(gate)?;
        }
        Ok(())
    }

    /// Draws `shots` basis indices by inverse-CDF over [`Self::probabilities`]
    /// using a generator seeded with `seed`.
    pub fn sample(&self, shots: usize, seed: u64) -> Vec<usize> {
        let mut rng = seed::rng(seed);
        self.sample_with(shots, &mut rng)
    }

    /// As [`Self::sample`] but drawing from a caller-owned generator.
    pub fn sample_with<R: Rng + ?Sized>(&self, shots: usize, rng: &mut R) -> Vec<usize> {
        let mut cdf = Vec::with_capacity(self.amplitudes.len());
        let mut acc = 0.0f64;
        let mut last_nonzero = 0;
        for (i, a) in self.amplitudes.iter().enumerate() {
            let p = a.norm_sqr().as_f64();
            if p > 0.0 {
                last_nonzero = i;
            }
            acc += p;
            cdf.push(acc);
        }
        (0..shots)
            .map(|_| {
                let u = rng.gen::<f64>() * acc;
                let idx = cdf.partition_point(|&c| c <= u);
                idx.min(last_nonzero)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn assert_amps(state: &Statevector<f64>, expected: &[Complex<f64>], tol: f64) {
        assert_eq!(state.dim(), expected.len());
        for (a, e) in state.amplitudes().iter().zip(expected) {
            assert!((a - e).norm() <= tol, "{a} vs {e}");
        }
    }

    #[test]
    fn zero_state() {
        let s1 = Statevector::<f64>::new_zero_state(1).unwrap();
        assert_amps(&s1, &[c(1.0, 0.0), c(0.0, 0.0)], 0.0);
        let s2 = Statevector::<f64>::new_zero_state(2).unwrap();
        assert_amps(&s2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)], 0.0);
        assert_eq!(Statevector::<f64>::new_zero_state(3).unwrap().norm_sqr(), 1.0);
    }

    #[test]
    fn zero_state_rejects_out_of_range() {
        for n in [0, MAX_QUBITS + 1] {
            let err = Statevector::<f64>::new_zero_state(n).unwrap_err();
            assert!(matches!(err, Error::Config(_)));
            assert!(err.to_string().contains("20"), "{err}");
        }
    }

    #[test]
    fn hadamard_and_x() {
        let mut s = Statevector::<f64>::new_zero_state(1).unwrap();
        s.apply_gate(&GateSpec::h(0)).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert_amps(&s, &[c(r, 0.0), c(r, 0.0)], 1e-15);

        let mut s = Statevector::<f64>::new_zero_state(1).unwrap();
        s.apply_gate(&GateSpec::x(0)).unwrap();
        assert_amps(&s, &[c(0.0, 0.0), c(1.0, 0.0)], 0.0);
    }

    #[test]
    fn mcz_flips_only_all_ones() {
        // (|10⟩ + |11⟩)/√2 → (|10⟩ − |11⟩)/√2
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let mut s = Statevector::from_real(&[0.0, 0.0, r, r]).unwrap();
        s.apply_gate(&GateSpec::mcz(&[0], 1)).unwrap();
        assert_amps(&s, &[c(0.0, 0.0), c(0.0, 0.0), c(r, 0.0), c(-r, 0.0)], 0.0);
    }

    #[test]
    fn big_endian_ordering() {
        let mut s = Statevector::<f64>::new_zero_state(3).unwrap();
        s.apply_gate(&GateSpec::x(0)).unwrap();
        assert_eq!(s.amplitude(4), c(1.0, 0.0));
    }

    #[test]
    fn mcx_with_two_controls() {
        let mut s = Statevector::<f64>::basis_state(3, 0b110).unwrap();
        s.apply_gate(&GateSpec::mcx(&[0, 1], 2)).unwrap();
        assert_eq!(s.amplitude(0b111), c(1.0, 0.0));
        let mut s = Statevector::<f64>::basis_state(3, 0b100).unwrap();
        s.apply_gate(&GateSpec::mcx(&[0, 1], 2)).unwrap();
        assert_eq!(s.amplitude(0b100), c(1.0, 0.0));
    }

    #[test]
    fn gate_validation_errors() {
        let mut s = Statevector::<f64>::new_zero_state(2).unwrap();
        assert!(matches!(s.apply_gate(&GateSpec::mcx(&[1], 1)), Err(Error::Validation(_))));
        assert!(matches!(s.apply_gate(&GateSpec::mcz(&[0, 0], 1)), Err(Error::Validation(_))));
        assert!(matches!(s.apply_gate(&GateSpec::x(2)), Err(Error::Validation(_))));
        let bad = GateSpec { kind: GateKind::H, controls: vec![0], target: 1 };
        assert!(matches!(s.apply_gate(&bad), Err(Error::Validation(_))));
    }

    #[test]
    fn probabilities_examples() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let p = Statevector::from_real(&[r, r]).unwrap().probabilities();
        assert!((p[0] - 0.5).abs() < 1e-15 && (p[1] - 0.5).abs() < 1e-15);
        assert_eq!(Statevector::from_real(&[1.0, 0.0]).unwrap().probabilities(), vec![1.0, 0.0]);
        let s = Statevector::from_amplitudes(vec![c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        let p = s.probabilities();
        assert!((p[0] - 0.36).abs() < 1e-15 && (p[1] - 0.64).abs() < 1e-15);
    }

    #[test]
    fn sample_deterministic_distribution() {
        let s = Statevector::<f64>::basis_state(1, 1).unwrap();
        for seed in [0, 1, 99] {
            assert_eq!(s.sample(5, seed), vec![1; 5]);
        }
    }

    #[test]
    fn sample_uniform_frequencies() {
        let s = Statevector::from_real(&[0.5, 0.5, 0.5, 0.5]).unwrap();
        let shots = 100_000;
        let draws = s.sample(shots, 2024);
        let mut counts = [0usize; 4];
        for d in &draws {
            counts[*d] += 1;
        }
        for count in counts {
            let f = count as f64 / shots as f64;
            assert!((f - 0.25).abs() <= 0.01, "frequency {f}");
        }
        assert_eq!(draws, s.sample(shots, 2024));
    }

    #[test]
    fn sample_never_returns_zero_probability_index() {
        let s = Statevector::from_real(&[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(s.sample(1000, 5).iter().all(|&x| x == 1));
    }

    #[test]
    fn single_precision_register() {
        let mut s = Statevector::<f32>::new_zero_state(2).unwrap();
        s.apply_gate(&GateSpec::h(0)).unwrap();
        s.apply_gate(&GateSpec::h(1)).unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-6);
    }

    fn arb_gate(n: usize) -> impl Strategy<Value = GateSpec<f64>> {
        (0..5u8, 0..n, any::<u64>(), -6.3f64..6.3).prop_map(move |(kind, target, bits, angle)| {
            let controls: Vec<usize> = (0..n).filter(|&q| q != target && bits >> q & 1 == 1).collect();
            match kind {
                0 => GateSpec::x(target),
                1 => GateSpec::h(target),
                2 => GateSpec::ry(angle, target),
                3 => GateSpec::mcx(&controls, target),
                _ => GateSpec::mcz(&controls, target),
            }
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn norm_is_preserved(n in 1usize..=12, gates in proptest::collection::vec(arb_gate(12), 1..1000)) {
            let mut s = Statevector::<f64>::new_zero_state(n).unwrap();
            for g in gates.iter().filter(|g| g.validate(n).is_ok()) {
                s.apply_gate(g).unwrap();
            }
            prop_assert!((s.norm_sqr() - 1.0).abs() <= 1e-10);
        }

        #[test]
        fn gate_sequences_are_bitwise_deterministic(gates in proptest::collection::vec(arb_gate(5), 1..200)) {
            let run = || {
                let mut s = Statevector::<f64>::new_zero_state(5).unwrap();
                s.apply_all(&gates).unwrap();
                s
            };
            let (a, b) = (run(), run());
            for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
                prop_assert_eq!(x.re.to_bits(), y.re.to_bits());
                prop_assert_eq!(x.im.to_bits(), y.im.to_bits());
            }
        }
    }
}
