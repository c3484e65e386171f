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

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A configuration value is outside its supported range.
    #[error("configuration error: {0}")]
    Config(String),

    /// Malformed operator or gate arguments.
    #[error("validation error: {0}")]
    Validation(String),

    /// Dimension disagreement between operands.
    #[error("shape error: {0}")]
    Shape(String),

    /// A vector does not fit in the register.
    #[error("capacity error: {len} components need at least {required_qubits} qubits, register has {n_qubits}")]
    Capacity { len: usize, n_qubits: usize, required_qubits: usize },

    /// Input with no usable content (zero vector, empty token list, ...).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// A state does not satisfy an operator precondition.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// Malformed or inconsistent input data.
    #[error("data error: {0}")]
    Data(String),

    /// Non-finite values or a formula evaluated at a singular point.
    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
