//! Config ingestion: a TOML file with nested sections, every key optional.
//! Unset keys take the built-in preset's value; unknown keys are a hard
//! error with the parser's line/column diagnostics. The literal path
//! `table1` (or an empty file) selects the preset unchanged.

use std::fs;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use mmwsim_core::engine::{ScenarioConfig, SweepGrid};
use mmwsim_core::schedulers::Policy;
use serde::Deserialize;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    n_ues: Option<usize>,
    cell_radius_m: Option<f64>,
    ap_height_m: Option<f64>,
    slot_us: Option<f64>,
    horizon_slots: Option<usize>,
    policy: Option<String>,
    ema_weight: Option<f64>,
    drops: Option<u32>,
    master_seed: Option<u64>,
    blockage: Option<BlockageSection>,
    radio: Option<RadioSection>,
    prediction: Option<PredictionSection>,
    sweep: Option<SweepSection>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct BlockageSection {
    arrival_rate_per_s: Option<f64>,
    mean_duration_ms: Option<f64>,
    decay_db_per_ms: Option<f64>,
    rise_db_per_ms: Option<f64>,
    max_attenuation_db: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RadioSection {
    tx_power_dbm: Option<f64>,
    tx_gain_dbi: Option<f64>,
    rx_gain_dbi: Option<f64>,
    ref_loss_db: Option<f64>,
    pathloss_exponent: Option<f64>,
    bandwidth_hz: Option<f64>,
    noise_figure_db: Option<f64>,
    snr_threshold_db: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct PredictionSection {
    window_ms: Option<f64>,
    sigma_db: Option<f64>,
    detection_delta_db: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepSection {
    arrival_rates_per_s: Option<Vec<f64>>,
    mean_durations_ms: Option<Vec<f64>>,
    windows_ms: Option<Vec<f64>>,
    policies: Option<Vec<String>>,
}

/// Reads and parses the file, or returns the empty overlay for `table1`.
pub fn load_file(path: &str) -> Result<FileConfig> {
    if path == "table1" {
        return Ok(FileConfig::default());
    }
    let text = fs::read_to_string(path).with_context(|| format!("cannot read config `{path}`"))?;
    toml::from_str(&text).with_context(|| format!("cannot parse config `{path}`"))
}

fn parse_policy(name: &str) -> Result<Policy> {
    Policy::from_str(name).map_err(|e| anyhow::anyhow!(e))
}

/// The scenario a run executes plus the sweep grid, if one was configured.
#[derive(Debug)]
pub struct Effective {
    pub config: ScenarioConfig,
    pub sweep: Option<SweepGrid>,
}

/// Layers the file over the preset and the command line over the file.
/// The master seed resolves as: `--seed`, else the file, else the
/// `MMWSIM_SEED` environment variable, else the preset's 42.
pub fn effective(
    file: FileConfig,
    seed_flag: Option<u64>,
    drops_flag: Option<u32>,
    policy_flag: Option<Policy>,
) -> Result<Effective> {
    let mut config = ScenarioConfig::table1();
    if let Some(v) = file.n_ues {
        config.n_ues = v;
    }
    if let Some(v) = file.cell_radius_m {
        config.cell_radius_m = v;
    }
    if let Some(v) = file.ap_height_m {
        config.ap_height_m = v;
    }
    if let Some(v) = file.slot_us {
        config.slot_us = v;
    }
    if let Some(v) = file.horizon_slots {
        config.horizon_slots = v;
    }
    if let Some(name) = &file.policy {
        config.policy = parse_policy(name).context("config key `policy`")?;
    }
    if let Some(v) = file.ema_weight {
        config.ema_weight = v;
    }
    if let Some(v) = file.drops {
        config.drops = v;
    }
    let blockage = file.blockage.unwrap_or_default();
    if let Some(v) = blockage.arrival_rate_per_s {
        config.blockage.arrival_rate_per_s = v;
    }
    if let Some(v) = blockage.mean_duration_ms {
        config.blockage.mean_duration_ms = v;
    }
    if let Some(v) = blockage.decay_db_per_ms {
        config.blockage.decay_db_per_ms = v;
    }
    if let Some(v) = blockage.rise_db_per_ms {
        config.blockage.rise_db_per_ms = v;
    }
    if let Some(v) = blockage.max_attenuation_db {
        config.blockage.max_attenuation_db = v;
    }
    let radio = file.radio.unwrap_or_default();
    if let Some(v) = radio.tx_power_dbm {
        config.radio.tx_power_dbm = v;
    }
    if let Some(v) = radio.tx_gain_dbi {
        config.radio.tx_gain_dbi = v;
    }
    if let Some(v) = radio.rx_gain_dbi {
        config.radio.rx_gain_dbi = v;
    }
    if let Some(v) = radio.ref_loss_db {
        config.radio.ref_loss_db = v;
    }
    if let Some(v) = radio.pathloss_exponent {
        config.radio.pathloss_exponent = v;
    }
    if let Some(v) = radio.bandwidth_hz {
        config.radio.bandwidth_hz = v;
    }
    if let Some(v) = radio.noise_figure_db {
        config.radio.noise_figure_db = v;
    }
    if let Some(v) = radio.snr_threshold_db {
        config.radio.snr_threshold_db = v;
    }
    let prediction = file.prediction.unwrap_or_default();
    if let Some(v) = prediction.window_ms {
        config.prediction.window_ms = v;
    }
    if let Some(v) = prediction.sigma_db {
        config.prediction.sigma_db = v;
    }
    if let Some(v) = prediction.detection_delta_db {
        config.prediction.detection_delta_db = v;
    }

    config.master_seed = match (seed_flag, file.master_seed) {
        (Some(s), _) => s,
        (None, Some(s)) => s,
        (None, None) => match std::env::var("MMWSIM_SEED") {
            Ok(text) => text
                .parse::<u64>()
                .with_context(|| format!("MMWSIM_SEED must be an unsigned integer, got `{text}`"))?,
            Err(_) => config.master_seed,
        },
    };
    if let Some(d) = drops_flag {
        config.drops = d;
    }
    if let Some(p) = policy_flag {
        config.policy = p;
    }

    let sweep = match file.sweep {
        None => None,
        Some(section) => {
            let base = SweepGrid::single(&config);
            let policies = match section.policies {
                None => base.policies,
                Some(names) => {
                    let mut parsed = Vec::with_capacity(names.len());
                    for name in &names {
                        parsed.push(parse_policy(name).context("config key `sweep.policies`")?);
                    }
                    parsed
                }
            };
            let grid = SweepGrid {
                arrival_rates_per_s: section.arrival_rates_per_s.unwrap_or(base.arrival_rates_per_s),
                mean_durations_ms: section.mean_durations_ms.unwrap_or(base.mean_durations_ms),
                windows_ms: section.windows_ms.unwrap_or(base.windows_ms),
                policies,
            };
            if grid.arrival_rates_per_s.is_empty()
                || grid.mean_durations_ms.is_empty()
                || grid.windows_ms.is_empty()
                || grid.policies.is_empty()
            {
                bail!("config section `sweep`: every list must be non-empty");
            }
            Some(grid)
        }
    };

    config.validate()?;
    Ok(Effective { config, sweep })
}
