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

//! Statistical properties of the adaptive search.

use groverfeat::grover::MarkedSet;
use groverfeat::search::{self, KConvention, SearchConfig};

fn spread(n: usize, a: usize) -> MarkedSet {
    let dim = 1 << n;
    MarkedSet::new(n, (0..a).map(|i| i * dim / a)).unwrap()
}

/// Observed frequency within three binomial standard deviations of `p`.
fn within_three_sigma(observed: f64, p: f64, trials: usize) -> bool {
    let sigma = (p * (1.0 - p) / trials as f64).sqrt();
    (observed - p).abs() <= 3.0 * sigma + 1e-12
}

#[test]
fn fixed_window_frequency_matches_closed_form() {
    let trials = 10_000;
    for (n, a) in [(2, 1), (4, 1), (5, 3), (6, 2), (8, 5)] {
        let marked = spread(n, a);
        for convention in [KConvention::ZeroBased, KConvention::OneBased] {
            for m in [1, 2, 3, 5, 8, 13] {
                let p = search::round_success(n, a, m, convention).unwrap();
                let seed = groverfeat::seed::child_seed(n as u64 * 1000 + a as u64, &format!("{convention}-{m}"));
                let (freq, _) = search::empirical_round_success(&marked, m, convention, trials, seed).unwrap();
                assert!(within_three_sigma(freq, p, trials), "n={n} a={a} m={m} {convention}: {freq} vs {p}");
            }
        }
    }
}

#[test]
fn first_round_on_four_states_succeeds_a_quarter_of_the_time() {
    let marked = spread(2, 1);
    let cfg = SearchConfig { max_m: Some(1.0), ..SearchConfig::default() };
    let (summary, _) = search::bbht_bench(&marked, &cfg, 10_000).unwrap();
    assert!((summary.success_rate - 0.25).abs() <= 0.02, "{}", summary.success_rate);
}

#[test]
fn mean_calls_stay_under_the_envelope() {
    for (n, a) in [(6, 1), (6, 16), (8, 2), (8, 64), (10, 8), (10, 256)] {
        assert!(4 * a <= 1 << n);
        let cfg = SearchConfig { seed: 77, ..SearchConfig::default() };
        let marked = spread(n, a);
        let (summary, outcomes) = search::bbht_bench(&marked, &cfg, 1000).unwrap();
        let bound = search::expected_calls_bound(n, a);
        assert!(summary.mean_calls <= bound, "n={n} a={a}: {} > {bound}", summary.mean_calls);
        for o in &outcomes {
            if let Some(x) = o.found {
                assert!(marked.contains(x));
            }
            let k_sum: u64 = o.iterations_log.iter().map(|r| r.k as u64).sum();
            assert_eq!(o.oracle_calls, k_sum + o.iterations_log.len() as u64);
        }
    }
}

#[test]
fn observed_success_tracks_the_schedule_prediction() {
    for (n, a) in [(6, 1), (8, 1), (10, 1), (10, 4)] {
        for convention in [KConvention::ZeroBased, KConvention::OneBased] {
            let cfg = SearchConfig { k_convention: convention, seed: 5, ..SearchConfig::default() };
            let predicted = search::schedule_success_probability(n, a, &cfg).unwrap();
            let (summary, _) = search::bbht_bench(&spread(n, a), &cfg, 2000).unwrap();
            assert!(
                within_three_sigma(summary.success_rate, predicted, 2000),
                "n={n} a={a} {convention}: {} vs {predicted}",
                summary.success_rate
            );
        }
    }
}

#[test]
fn nearly_full_marked_set_succeeds_at_once() {
    let n = 5;
    let dim = 1 << n;
    let marked = MarkedSet::new(n, 1..dim).unwrap();
    let cfg = SearchConfig { seed: 3, ..SearchConfig::default() };
    let (summary, outcomes) = search::bbht_bench(&marked, &cfg, 2000).unwrap();
    let first_round = outcomes.iter().filter(|o| o.iterations_log.len() == 1).count() as f64 / 2000.0;
    let p = (dim - 1) as f64 / dim as f64;
    assert!(within_three_sigma(first_round, p, 2000), "{first_round}");
    assert_eq!(summary.false_positives, 0);
}
