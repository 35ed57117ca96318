//! Received-power prediction over a future window.
//!
//! The simulator has the ground-truth future, so prediction is modeled as
//! truth plus i.i.d. Gaussian error in the dB domain; how the forecast would
//! be obtained in a real deployment is outside this crate's scope. A window
//! is flagged as containing a blockage event when any user's predicted power
//! swings by more than a detection threshold.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Prediction behavior for one scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredictionParams {
    /// Length of the prediction window, slots.
    pub window_slots: usize,
    /// Standard deviation of the prediction error, dB.
    pub error_std_db: f64,
    /// Power swing within a window that counts as a predicted blockage, dB.
    pub detection_threshold_db: f64,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PredictionError {
    #[error("invalid prediction parameters: {0}")]
    InvalidParams(&'static str),
}

impl PredictionParams {
    pub fn validate(&self) -> Result<(), PredictionError> {
        if self.window_slots == 0 {
            return Err(PredictionError::InvalidParams("window must cover at least one slot"));
        }
        if !(self.error_std_db >= 0.0 && self.error_std_db.is_finite()) {
            return Err(PredictionError::InvalidParams("error std must be finite and non-negative"));
        }
        if !(self.detection_threshold_db > 0.0 && self.detection_threshold_db.is_finite()) {
            return Err(PredictionError::InvalidParams("detection threshold must be positive"));
        }
        Ok(())
    }
}

/// Estimated received power per user over the upcoming window.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictedWindow {
    /// `[user][window slot]` estimated received power, dBm.
    pub est_rx_dbm: Vec<Vec<f64>>,
    /// True when any user's prediction shows a blockage-sized swing.
    pub blockage_flag: bool,
}

impl PredictedWindow {
    /// Predicts every user's received power over the window and evaluates
    /// the detection rule.
    pub fn build<R: Rng + ?Sized>(
        true_rx_dbm: &[Vec<f64>],
        error_std_db: f64,
        detection_threshold_db: f64,
        rng: &mut R,
    ) -> Self {
        let est_rx_dbm: Vec<Vec<f64>> = true_rx_dbm
            .iter()
            .map(|row| predict_window(row, error_std_db, rng))
            .collect();
        let blockage_flag = est_rx_dbm
            .iter()
            .any(|row| detect_blockage(row, detection_threshold_db));
        PredictedWindow { est_rx_dbm, blockage_flag }
    }
}

/// True powers plus i.i.d. Gaussian error of standard deviation
/// `error_std_db`, added in the dB domain. With zero error std the output
/// equals the input exactly.
pub fn predict_window<R: Rng + ?Sized>(
    true_powers_dbm: &[f64],
    error_std_db: f64,
    rng: &mut R,
) -> Vec<f64> {
    true_powers_dbm
        .iter()
        .map(|&p| {
            let e: f64 = rng.sample(StandardNormal);
            p + error_std_db * e
        })
        .collect()
}

/// Detection rule: the window contains a predicted blockage iff the power
/// range (max minus min) exceeds the threshold. A constant window never
/// triggers; a decay or rise ramp spanning more than the threshold always
/// does.
pub fn detect_blockage(window_dbm: &[f64], threshold_db: f64) -> bool {
    assert!(!window_dbm.is_empty(), "detection needs a non-empty window");
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for &p in window_dbm {
        min = min.min(p);
        max = max.max(p);
    }
    max - min > threshold_db
}
