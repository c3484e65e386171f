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

//! Confusion matrices and accuracy / precision / recall / F1.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Binary counts for one positive class.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinaryCounts {
    pub tp: u64,
    pub tn: u64,
    pub fp: u64,
    pub fn_: u64,
}

impl BinaryCounts {
    pub fn total(&self) -> u64 {
        self.tp + self.tn + self.fp + self.fn_
    }
}

/// Which ratios hit a zero denominator and were reported as 0.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegenerateFlags {
    pub precision: bool,
    pub recall: bool,
    pub f1: bool,
}

impl DegenerateFlags {
    pub fn any(&self) -> bool {
        self.precision || self.recall || self.f1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub degenerate_flags: DegenerateFlags,
}

fn ratio(num: f64, den: f64, flag: &mut bool) -> f64 {
    if den == 0.0 {
        *flag = true;
        0.0
    } else {
        num / den
    }
}

fn precision_recall_f1(c: &BinaryCounts, flags: &mut DegenerateFlags) -> (f64, f64, f64) {
    let (tp, fp, fn_) = (c.tp as f64, c.fp as f64, c.fn_ as f64);
    let precision = ratio(tp, tp + fp, &mut flags.precision);
    let recall = ratio(tp, tp + fn_, &mut flags.recall);
    let f1 = ratio(2.0 * precision * recall, precision + recall, &mut flags.f1);
    (precision, recall, f1)
}

/// Scores for binary counts. Zero denominators give 0 and set a flag.
pub fn compute_metrics(c: &BinaryCounts) -> Result<Metrics> {
    let total = c.total();
    if total == 0 {
        return Err(Error::Data("confusion matrix is empty".into()));
    }
    let mut flags = DegenerateFlags::default();
    let (precision, recall, f1) = precision_recall_f1(c, &mut flags);
    Ok(Metrics { accuracy: (c.tp + c.tn) as f64 / total as f64, precision, recall, f1, degenerate_flags: flags })
}

/// `C × C` counts, rows = true class, columns = predicted class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    classes: usize,
    counts: Vec<u64>,
}

impl ConfusionMatrix {
    pub fn new(classes: usize) -> Result<Self> {
        if classes < 2 {
            return Err(Error::Validation(format!("confusion matrix needs ≥ 2 classes, got {classes}")));
        }
        Ok(Self { classes, counts: vec![0; classes * classes] })
    }

    /// Binary matrix (class 1 positive) from explicit counts.
    pub fn from_binary(c: BinaryCounts) -> Self {
        Self { classes: 2, counts: vec![c.tn, c.fp, c.fn_, c.tp] }
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn record(&mut self, truth: usize, predicted: usize) -> Result<()> {
        if truth >= self.classes || predicted >= self.classes {
            return Err(Error::Validation(format!(
                "class pair ({truth}, {predicted}) out of range for {} classes",
                self.classes
            )));
        }
        self.counts[truth * self.classes + predicted] += 1;
        Ok(())
    }

    pub fn count(&self, truth: usize, predicted: usize) -> u64 {
        self.counts[truth * self.classes + predicted]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Adds another matrix's counts.
    pub fn merge(&mut self, other: &ConfusionMatrix) -> Result<()> {
        if other.classes != self.classes {
            return Err(Error::Shape("merging confusion matrices of different class counts".into()));
        }
        self.counts.iter_mut().zip(&other.counts).for_each(|(a, b)| *a += b);
        Ok(())
    }

    /// One-vs-rest counts for `positive`.
    pub fn one_vs_rest(&self, positive: usize) -> BinaryCounts {
        let mut c = BinaryCounts::default();
        for t in 0..self.classes {
            for p in 0..self.classes {
                let n = self.count(t, p);
                match (t == positive, p == positive) {
                    (true, true) => c.tp += n,
                    (false, true) => c.fp += n,
                    (true, false) => c.fn_ += n,
                    (false, false) => c.tn += n,
                }
            }
        }
        c
    }

    /// Accuracy over all classes; precision, recall and F1 macro-averaged
    /// over the per-class one-vs-rest scores.
    pub fn macro_metrics(&self) -> Result<Metrics> {
        let total = self.total();
        if total == 0 {
            return Err(Error::Data("confusion matrix is empty".into()));
        }
        let correct: u64 = (0..self.classes).map(|c| self.count(c, c)).sum();
        let mut flags = DegenerateFlags::default();
        let (mut p, mut r, mut f) = (0.0, 0.0, 0.0);
        for class in 0..self.classes {
            let (pc, rc, fc) = precision_recall_f1(&self.one_vs_rest(class), &mut flags);
            p += pc;
            r += rc;
            f += fc;
        }
        let k = self.classes as f64;
        Ok(Metrics {
            accuracy: correct as f64 / total as f64,
            precision: p / k,
            recall: r / k,
            f1: f / k,
            degenerate_flags: flags,
        })
    }

    /// Binary scores on class 1 for two classes, macro scores otherwise.
    pub fn report(&self) -> Result<Metrics> {
        if self.classes == 2 {
            compute_metrics(&self.one_vs_rest(1))
        } else {
            self.macro_metrics()
        }
    }
}
