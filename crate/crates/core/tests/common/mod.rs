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

//! Fixtures shared by the integration tests.

#![allow(dead_code)]

use groverfeat::data::{Dataset, LabeledExample};
use rand::seq::SliceRandom;
use rand::Rng;

pub const POSITIVE: [&str; 8] = ["bright", "lovely", "superb", "warm", "crisp", "joyful", "vivid", "gentle"];
pub const NEGATIVE: [&str; 8] = ["dull", "broken", "bleak", "soggy", "harsh", "grim", "stale", "noisy"];

/// Two classes of short texts drawn from disjoint word lists.
pub fn two_class_dataset(size: usize, seed: u64) -> Dataset {
    let mut rng = groverfeat::seed::rng(seed);
    let examples = (0..size)
        .map(|i| {
            let label = i % 2;
            let words = if label == 1 { &POSITIVE } else { &NEGATIVE };
            let len = rng.gen_range(2..=5);
            let text: Vec<&str> = (0..len).map(|_| *words.choose(&mut rng).unwrap()).collect();
            LabeledExample { id: format!("ex-{i:04}"), text: text.join(" "), label }
        })
        .collect();
    Dataset { examples, num_classes: 2 }
}

/// Classic perceptron with bias; returns the training accuracy it reaches.
pub fn perceptron_accuracy(features: &[(Vec<f64>, usize)], epochs: usize) -> f64 {
    let dim = features[0].0.len();
    let mut w = vec![0.0; dim + 1];
    let predict = |w: &[f64], z: &[f64]| {
        let s: f64 = w[dim] + z.iter().zip(w).map(|(a, b)| a * b).sum::<f64>();
        usize::from(s > 0.0)
    };
    for _ in 0..epochs {
        let mut mistakes = 0;
        for (z, y) in features {
            if predict(&w, z) != *y {
                mistakes += 1;
                let sign = if *y == 1 { 1.0 } else { -1.0 };
                for (wi, zi) in w.iter_mut().zip(z) {
                    *wi += sign * zi;
                }
                w[dim] += sign;
            }
        }
        if mistakes == 0 {
            break;
        }
    }
    let correct = features.iter().filter(|(z, y)| predict(&w, z) == *y).count();
    correct as f64 / features.len() as f64
}
