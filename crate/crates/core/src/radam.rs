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

//! Rectified Adam.
//!
//! ```text
//! m_t = β₁ m + (1−β₁) g          v_t = β₂ v + (1−β₂) g²
//! m̂_t = m_t / (1−β₁ᵗ)
//! ρ_∞ = 2/(1−β₂) − 1              ρ_t = ρ_∞ − 2t β₂ᵗ / (1−β₂ᵗ)
//! ρ_t > 4:  θ −= lr · r_t · m̂_t / (√(v_t/(1−β₂ᵗ)) + ε)
//!           r_t = √((ρ_t−4)(ρ_t−2)ρ_∞ / ((ρ_∞−4)(ρ_∞−2)ρ_t))
//! else:     θ −= lr · m̂_t
//! ```

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RAdamConfig {
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for RAdamConfig {
    fn default() -> Self {
        Self { beta1: 0.9, beta2: 0.999, epsilon: 1e-8 }
    }
}

impl RAdamConfig {
    pub fn rho_inf(&self) -> f64 {
        2.0 / (1.0 - self.beta2) - 1.0
    }

    /// Length of the approximated simple moving average at step `t ≥ 1`.
    pub fn rho(&self, t: u64) -> f64 {
        let b2t = self.beta2.powi(t as i32);
        self.rho_inf() - 2.0 * t as f64 * b2t / (1.0 - b2t)
    }
}

/// One named parameter block and its gradient.
pub struct ParamBlock<'a, T> {
    pub name: &'a str,
    pub values: &'a mut [T],
    pub grads: &'a [T],
}

#[derive(Clone, Debug, PartialEq)]
pub struct RAdam<T = f64> {
    pub config: RAdamConfig,
    step: u64,
    first: Vec<Vec<T>>,
    second: Vec<Vec<T>>,
}

impl<T: Real> RAdam<T> {
    /// Optimizer for blocks of the given sizes.
    pub fn new(config: RAdamConfig, block_sizes: &[usize]) -> Self {
        Self {
            config,
            step: 0,
            first: block_sizes.iter().map(|&n| vec![T::zero(); n]).collect(),
            second: block_sizes.iter().map(|&n| vec![T::zero(); n]).collect(),
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    /// Applies one update to every block. Nothing is modified if any
    /// gradient is non-finite or a shape disagrees.
    pub fn step(&mut self, blocks: &mut [ParamBlock<'_, T>], lr: f64) -> Result<()> {
        if !(lr > 0.0) {
            return Err(Error::Config(format!("learning rate must be positive, got {lr}")));
        }
        if blocks.len() != self.first.len() {
            return Err(Error::Shape(format!(
                "optimizer tracks {} blocks, step received {}",
                self.first.len(),
                blocks.len()
            )));
        }
        for (block, m) in blocks.iter().zip(&self.first) {
            if block.values.len() != m.len() || block.grads.len() != m.len() {
                return Err(Error::Shape(format!(
                    "block {:?}: {} values, {} grads, optimizer state {}",
                    block.name,
                    block.values.len(),
                    block.grads.len(),
                    m.len()
                )));
            }
            if let Some(i) = block.grads.iter().position(|g| !g.is_finite()) {
                return Err(Error::Numeric(format!("non-finite gradient in block {:?} at index {i}", block.name)));
            }
        }

        self.step += 1;
        let t = self.step;
        let cfg = self.config;
        let (beta1, beta2) = (T::of(cfg.beta1), T::of(cfg.beta2));
        let one = T::one();
        let bias1 = one - T::of(cfg.beta1.powi(t as i32));
        let bias2 = T::of(1.0 - cfg.beta2.powi(t as i32));
        let rho_t = cfg.rho(t);
        let rho_inf = cfg.rho_inf();
        let rect = (rho_t > 4.0).then(|| {
            T::of((((rho_t - 4.0) * (rho_t - 2.0) * rho_inf) / ((rho_inf - 4.0) * (rho_inf - 2.0) * rho_t)).sqrt())
        });
        let lr = T::of(lr);
        let eps = T::of(cfg.epsilon);

        for ((block, m), v) in blocks.iter_mut().zip(&mut self.first).zip(&mut self.second) {
            for (((theta, &g), mi), vi) in block.values.iter_mut().zip(block.grads).zip(m.iter_mut()).zip(v.iter_mut())
            {
                *mi = beta1 * *mi + (one - beta1) * g;
                *vi = beta2 * *vi + (one - beta2) * g * g;
                let m_hat = *mi / bias1;
                match rect {
                    Some(r) => {
                        let v_hat = (*vi / bias2).sqrt();
                        *theta -= lr * r * m_hat / (v_hat + eps);
                    }
                    None => *theta -= lr * m_hat,
                }
            }
        }
        Ok(())
    }
}
