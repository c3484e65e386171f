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

//! Adaptive Grover amplitude amplification as a feature extractor for text.
//!
//! The crate is organized bottom-up:
//!
//! * [`statevector`] dense complex register and gate kernels,
//! * [`encoding`] loading real word vectors into a register,
//! * [`grover`] oracle, diffusion and phase-detection operators,
//! * [`search`] randomized amplification when the marked count is unknown,
//! * [`qepfe`] the encode / amplify / read-out feature pipeline,
//! * [`head`], [`radam`] and [`train`] the fusion classifier,
//! * [`data`] datasets, tokenization and the embedding store,
//! * [`metrics`] confusion matrices and scores,
//! * [`cli`] configuration, run manifests and the `groverfeat` subcommands.
//!
//! The numerical core is generic over the scalar type (see [`Real`]); the
//! aliases below fix it to `f64`, which is what the pipeline and the
//! tolerances in the test-suite assume.

// `!(x > 0.0)` style checks are deliberate: they reject NaN along with the
// out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod data;
pub mod encoding;
pub mod error;
pub mod grover;
pub mod head;
pub mod metrics;
pub mod qepfe;
pub mod radam;
pub mod scalar;
pub mod search;
pub mod seed;
pub mod statevector;
pub mod train;

pub use error::{Error, Result};
pub use scalar::Real;

/// Double-precision statevector.
pub type Statevector = statevector::Statevector<f64>;
/// Single-precision statevector.
pub type Statevector32 = statevector::Statevector<f32>;
/// Double-precision gate.
pub type GateSpec = statevector::GateSpec<f64>;
/// Double-precision word vector.
pub type WordVector = encoding::WordVector<f64>;
/// Double-precision fusion head.
pub type LinearHead = head::LinearHead<f64>;
/// Double-precision optimizer state.
pub type RAdam = radam::RAdam<f64>;

pub use encoding::EncodingKind;
pub use grover::{GroverAngles, MarkedSet};
pub use metrics::{ConfusionMatrix, Metrics};
pub use qepfe::{FeatureVector, Pooling, QepfeConfig, Schedule};
pub use search::{KConvention, SearchConfig, SearchOutcome};
