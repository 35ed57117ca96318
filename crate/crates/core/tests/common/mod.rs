//! Shared fixtures for the integration suites: scenario builders, an
//! independent window-assignment oracle, and the pass/fail reporter used by
//! the acceptance tests.
#![allow(dead_code)]

use mmwsim_core::engine::{sigma_for_window_ms, ScenarioConfig};
use mmwsim_core::schedulers::Policy;

/// The default scenario with one blockage intensity and prediction window
/// swapped in; σ follows the window pairing.
pub fn scenario(policy: Policy, arrival_rate_per_s: f64, mean_duration_ms: f64, window_ms: f64) -> ScenarioConfig {
    let mut config = ScenarioConfig::table1();
    config.policy = policy;
    config.blockage.arrival_rate_per_s = arrival_rate_per_s;
    config.blockage.mean_duration_ms = mean_duration_ms;
    config.prediction.window_ms = window_ms;
    config.prediction.sigma_db = sigma_for_window_ms(window_ms).unwrap_or(config.prediction.sigma_db);
    config
}

/// Window assignment oracle: a deliberately naive backward pass that
/// recomputes each user's assigned in-window sum from scratch at every slot
/// and scores rate/sum with the zero conventions written out longhand.
/// Exact ties keep the lowest user index, so callers must feed tie-free
/// (continuous random) rates when comparing against the production path.
pub fn window_assignment_oracle(predicted: &[Vec<f64>]) -> Vec<u16> {
    let n_users = predicted.len();
    let n_slots = predicted[0].len();
    let mut x = vec![vec![false; n_slots]; n_users];
    for t in (0..n_slots).rev() {
        let mut best: Option<(usize, bool, f64)> = None; // (user, is_infinite, value)
        for u in 0..n_users {
            let sum: f64 = (t..n_slots).filter(|&j| x[u][j]).map(|j| predicted[u][j]).sum();
            let rate = predicted[u][t];
            let (is_infinite, value) = if sum > 0.0 {
                (false, rate / sum)
            } else if rate > 0.0 {
                (true, rate)
            } else {
                (false, 0.0)
            };
            let better = match best {
                None => true,
                Some((_, best_inf, best_val)) => {
                    (is_infinite && !best_inf) || (is_infinite == best_inf && value > best_val)
                }
            };
            if better {
                best = Some((u, is_infinite, value));
            }
        }
        x[best.unwrap().0][t] = true;
    }
    (0..n_slots)
        .map(|t| (0..n_users).find(|&u| x[u][t]).unwrap() as u16)
        .collect()
}

/// Prints the one verdict line for an acceptance criterion and panics on
/// failure so the suite reports it.
pub fn verdict(criterion: u32, ok: bool, detail: &str) {
    let tag = if ok { "PASS" } else { "FAIL" };
    println!("[{tag}] criterion {criterion}: {detail}");
    assert!(ok, "criterion {criterion} failed: {detail}");
}
