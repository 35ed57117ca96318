//! Drop orchestration and Monte Carlo campaigns.
//!
//! One *drop* is an independent realization: users placed uniformly in the
//! cell, one blockage trace per user, and a full frame of slot-by-slot
//! scheduling under the configured policy. Every random quantity comes from
//! a named substream of (master seed, drop index), so rerunning a drop under
//! a different policy replays the identical placements, blockage processes,
//! and prediction errors — campaigns compare policies on common random
//! numbers. Drops are embarrassingly parallel; results are keyed by drop
//! index, which keeps aggregation bit-identical for any thread count.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::blockage::{generate_trace, AttenuationTrace, BlockageParams, TraceError};
use crate::channel::{noise_power, LinkBudget, UeGeometry};
use crate::metrics::{MetricsError, MetricsReport};
use crate::predictor::{PredictedWindow, PredictionError, PredictionParams};
use crate::schedulers::{bapf_schedule_window, schedule_slot, Policy, ScheduleAssignment, SchedulerState};
use crate::seeds;

// ─── Configuration ───────────────────────────────────────────────────────────

/// Radio-side inputs of the link budget (noise power is derived, not set).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadioParams {
    pub tx_power_dbm: f64,
    pub tx_gain_dbi: f64,
    pub rx_gain_dbi: f64,
    pub ref_loss_db: f64,
    pub pathloss_exponent: f64,
    pub bandwidth_hz: f64,
    pub noise_figure_db: f64,
    pub snr_threshold_db: f64,
}

/// Prediction knobs in wall-clock units (converted to slots per scenario).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredictionConfig {
    pub window_ms: f64,
    pub sigma_db: f64,
    pub detection_delta_db: f64,
}

/// Everything one scenario point needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub n_ues: usize,
    pub cell_radius_m: f64,
    pub ap_height_m: f64,
    /// Slot duration, microseconds.
    pub slot_us: f64,
    /// Frame length, slots.
    pub horizon_slots: usize,
    pub blockage: BlockageParams,
    pub radio: RadioParams,
    pub prediction: PredictionConfig,
    pub policy: Policy,
    pub ema_weight: f64,
    /// Monte Carlo repetitions.
    pub drops: u32,
    pub master_seed: u64,
}

impl ScenarioConfig {
    /// The built-in default parameter set: eight users under a ceiling AP at
    /// desk scale, 2 GHz of bandwidth, a 3-second frame of 62.5 us slots.
    pub fn table1() -> Self {
        ScenarioConfig {
            n_ues: 8,
            cell_radius_m: 15.0,
            ap_height_m: 2.0,
            slot_us: 62.5,
            horizon_slots: 48_000,
            blockage: BlockageParams {
                arrival_rate_per_s: 0.2,
                mean_duration_ms: 1000.0,
                decay_db_per_ms: 0.2,
                rise_db_per_ms: 6.7,
                max_attenuation_db: 40.0,
            },
            radio: RadioParams {
                tx_power_dbm: 20.0,
                tx_gain_dbi: 3.16,
                rx_gain_dbi: 0.0,
                ref_loss_db: 63.4,
                pathloss_exponent: 1.72,
                bandwidth_hz: 2e9,
                noise_figure_db: 9.0,
                snr_threshold_db: 0.0,
            },
            prediction: PredictionConfig { window_ms: 200.0, sigma_db: 1e-2, detection_delta_db: 3.0 },
            policy: Policy::Pf,
            ema_weight: 0.5,
            drops: 200,
            master_seed: 42,
        }
    }

    pub fn slot_ms(&self) -> f64 {
        self.slot_us / 1000.0
    }

    /// Prediction window length in slots.
    pub fn window_slots(&self) -> usize {
        (self.prediction.window_ms / self.slot_ms()).round() as usize
    }

    pub fn prediction_params(&self) -> PredictionParams {
        PredictionParams {
            window_slots: self.window_slots(),
            error_std_db: self.prediction.sigma_db,
            detection_threshold_db: self.prediction.detection_delta_db,
        }
    }

    /// The link budget shared by all users, with noise power derived from
    /// bandwidth and noise figure.
    pub fn link_budget(&self) -> LinkBudget {
        LinkBudget {
            tx_power_dbm: self.radio.tx_power_dbm,
            tx_gain_dbi: self.radio.tx_gain_dbi,
            rx_gain_dbi: self.radio.rx_gain_dbi,
            ref_loss_db: self.radio.ref_loss_db,
            pathloss_exponent: self.radio.pathloss_exponent,
            noise_power_dbm: noise_power(self.radio.bandwidth_hz, self.radio.noise_figure_db),
            bandwidth_hz: self.radio.bandwidth_hz,
            snr_threshold_db: self.radio.snr_threshold_db,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        fn check(ok: bool, field: &'static str, message: &'static str) -> Result<(), ConfigError> {
            if ok { Ok(()) } else { Err(ConfigError::Invalid { field, message }) }
        }
        check(self.n_ues >= 1, "n_ues", "need at least one user")?;
        check(self.cell_radius_m > 0.0 && self.cell_radius_m.is_finite(), "cell_radius_m", "must be positive")?;
        check(self.ap_height_m > 0.0 && self.ap_height_m.is_finite(), "ap_height_m", "must be positive")?;
        check(self.slot_us > 0.0 && self.slot_us.is_finite(), "slot_us", "must be positive")?;
        check(self.horizon_slots >= 1, "horizon_slots", "need at least one slot")?;
        self.blockage.validate().map_err(|e| ConfigError::Invalid {
            field: "blockage",
            message: match e {
                TraceError::InvalidParams(m) => m,
                TraceError::EmptyHorizon => "empty horizon",
            },
        })?;
        check(self.radio.tx_power_dbm.is_finite(), "radio.tx_power_dbm", "must be finite")?;
        check(self.radio.tx_gain_dbi.is_finite(), "radio.tx_gain_dbi", "must be finite")?;
        check(self.radio.rx_gain_dbi.is_finite(), "radio.rx_gain_dbi", "must be finite")?;
        check(self.radio.ref_loss_db.is_finite(), "radio.ref_loss_db", "must be finite")?;
        check(
            self.radio.pathloss_exponent > 0.0 && self.radio.pathloss_exponent.is_finite(),
            "radio.pathloss_exponent",
            "must be positive",
        )?;
        check(self.radio.bandwidth_hz > 0.0 && self.radio.bandwidth_hz.is_finite(), "radio.bandwidth_hz", "must be positive")?;
        check(self.radio.noise_figure_db.is_finite(), "radio.noise_figure_db", "must be finite")?;
        check(self.radio.snr_threshold_db.is_finite(), "radio.snr_threshold_db", "must be finite")?;
        check(self.prediction.window_ms.is_finite() && self.prediction.window_ms > 0.0, "prediction.window_ms", "must be positive")?;
        self.prediction_params().validate().map_err(|e| ConfigError::Invalid {
            field: "prediction",
            message: match e {
                PredictionError::InvalidParams(m) => m,
            },
        })?;
        check((0.0..=1.0).contains(&self.ema_weight), "ema_weight", "must lie in [0, 1]")?;
        check(self.drops >= 1, "drops", "need at least one drop")
    }
}

/// Conventional pairing of prediction-window length and error std: longer
/// forecasts carry more error. Windows outside the table keep the
/// scenario's configured sigma.
pub fn sigma_for_window_ms(window_ms: f64) -> Option<f64> {
    const PAIRS: [(f64, f64); 3] = [(50.0, 1e-3), (200.0, 1e-2), (500.0, 1e-1)];
    PAIRS.iter().find(|(w, _)| *w == window_ms).map(|(_, s)| *s)
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("config field `{field}`: {message}")]
    Invalid { field: &'static str, message: &'static str },
}

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

// ─── One drop ────────────────────────────────────────────────────────────────

/// Outcome of one drop.
#[derive(Debug, Clone, PartialEq)]
pub struct DropResult {
    /// Frame-averaged rate per user, bit/s.
    pub avg_rates_bps: Vec<f64>,
    /// Slots each user was scheduled.
    pub slots_assigned: Vec<u32>,
    /// Slots each user spent outside LOS.
    pub blocked_slots: Vec<u32>,
    /// Merged blockage episodes per user.
    pub blockage_episodes: Vec<u32>,
    /// Scheduled user per slot.
    pub assignment: ScheduleAssignment,
}

/// Uniform placement over the coverage disc: the planar radius is
/// `R * sqrt(U)`. The azimuth never enters the link budget (the cell is
/// rotationally symmetric), so only the radius is drawn.
pub fn place_ues<R: Rng + ?Sized>(
    n_ues: usize,
    cell_radius_m: f64,
    ap_height_m: f64,
    rng: &mut R,
) -> Vec<UeGeometry> {
    (0..n_ues)
        .map(|_| UeGeometry {
            planar_radius_m: cell_radius_m * rng.random::<f64>().sqrt(),
            ap_height_m,
        })
        .collect()
}

/// Runs one full drop: placement, traces, and the scheduling frame.
pub fn run_drop(config: &ScenarioConfig, drop_index: u32) -> Result<DropResult, SimError> {
    config.validate()?;
    let mut placement_rng = seeds::stream_rng(config.master_seed, drop_index, seeds::STREAM_PLACEMENT);
    let geoms = place_ues(config.n_ues, config.cell_radius_m, config.ap_height_m, &mut placement_rng);
    let slot_ms = config.slot_ms();
    let traces: Vec<AttenuationTrace> = (0..config.n_ues)
        .map(|u| {
            let mut rng = seeds::blockage_rng(config.master_seed, drop_index, u);
            generate_trace(&config.blockage, config.horizon_slots, slot_ms, &mut rng)
        })
        .collect::<Result<_, _>>()?;
    run_drop_with_parts(config, drop_index, &geoms, &traces)
}

/// The scheduling frame for externally supplied placements and traces.
/// [`run_drop`] draws them from the seed streams; tests and diagnostics can
/// force exact geometries and blockage patterns here.
pub fn run_drop_with_parts(
    config: &ScenarioConfig,
    drop_index: u32,
    geoms: &[UeGeometry],
    traces: &[AttenuationTrace],
) -> Result<DropResult, SimError> {
    config.validate()?;
    let n = config.n_ues;
    assert_eq!(geoms.len(), n, "one geometry per user");
    assert_eq!(traces.len(), n, "one trace per user");
    let t_total = config.horizon_slots;
    assert!(traces.iter().all(|tr| tr.len() == t_total), "traces must cover the horizon");

    let lb = config.link_budget();
    let rx0: Vec<f64> = geoms.iter().map(|g| lb.unblocked_rx_dbm(g.distance_m())).collect();

    // True feasible rate per (slot, user), flat so each slot's rates are one
    // contiguous row. Consecutive slots almost always repeat the attenuation
    // value (LOS and NLOS stretches), so the Shannon evaluation caches on it.
    let mut rates_t = vec![0.0f64; t_total * n];
    for u in 0..n {
        let unblocked_snr = rx0[u] - lb.noise_power_dbm;
        let mut last_a = f64::NAN;
        let mut last_r = 0.0;
        for (t, &a) in traces[u].values_db.iter().enumerate() {
            if a != last_a {
                last_a = a;
                last_r = lb.feasible_rate(unblocked_snr - a);
            }
            rates_t[t * n + u] = last_r;
        }
    }

    let mut tiebreak_rng = seeds::stream_rng(config.master_seed, drop_index, seeds::STREAM_TIEBREAK);
    let mut prediction_rng = seeds::stream_rng(config.master_seed, drop_index, seeds::STREAM_PREDICTION);

    let initial: Vec<f64> = (0..n).map(|u| lb.feasible_rate(rx0[u] - lb.noise_power_dbm)).collect();
    let mut state = SchedulerState::new(&initial, config.ema_weight);

    let window_len = config.window_slots();
    let prediction = config.prediction_params();
    let mut plan: Option<ScheduleAssignment> = None;
    let mut plan_start = 0usize;

    let mut assignment: ScheduleAssignment = Vec::with_capacity(t_total);
    let mut rate_sums = vec![0.0f64; n];
    let mut slots_assigned = vec![0u32; n];
    let mut realized = vec![0.0f64; n];

    for t in 0..t_total {
        // Window boundaries sit at the first slot after each decision slot:
        // the frame starts with a plain-PF slot, and every `window_len` slots
        // the predictor looks ahead and either fixes the whole upcoming
        // window (blockage flagged) or leaves it to per-slot PF.
        if config.policy == Policy::BaPf && t >= 1 && (t - 1) % window_len == 0 {
            plan = plan_window(&lb, &rx0, traces, t, window_len.min(t_total - t), &prediction, &mut prediction_rng, &mut tiebreak_rng);
            plan_start = t;
        }
        let window_pick = match &plan {
            Some(p) if t - plan_start < p.len() => Some(p[t - plan_start]),
            _ => None,
        };
        let feasible = &rates_t[t * n..(t + 1) * n];
        let pick = schedule_slot(config.policy, feasible, &state, window_pick, &mut tiebreak_rng);
        let r = feasible[pick];
        rate_sums[pick] += r;
        slots_assigned[pick] += 1;
        assignment.push(pick as u16);
        realized.fill(0.0);
        realized[pick] = r;
        state.update_avg(&realized);
    }

    Ok(DropResult {
        avg_rates_bps: rate_sums.iter().map(|s| s / t_total as f64).collect(),
        slots_assigned,
        blocked_slots: traces.iter().map(|tr| tr.blocked_slots() as u32).collect(),
        blockage_episodes: traces.iter().map(|tr| tr.episode_count() as u32).collect(),
        assignment,
    })
}

/// Predicts the window starting at `start` and, when a blockage is flagged,
/// fixes its assignment. Prediction noise is always consumed from its own
/// stream so the draw sequence does not depend on what the flags were.
#[allow(clippy::too_many_arguments)]
fn plan_window<R1: Rng + ?Sized, R2: Rng + ?Sized>(
    lb: &LinkBudget,
    rx0: &[f64],
    traces: &[AttenuationTrace],
    start: usize,
    len: usize,
    prediction: &PredictionParams,
    prediction_rng: &mut R1,
    tiebreak_rng: &mut R2,
) -> Option<ScheduleAssignment> {
    if len == 0 {
        return None;
    }
    let true_powers: Vec<Vec<f64>> = rx0
        .iter()
        .zip(traces)
        .map(|(&p0, tr)| tr.values_db[start..start + len].iter().map(|&a| p0 - a).collect())
        .collect();
    let window = PredictedWindow::build(
        &true_powers,
        prediction.error_std_db,
        prediction.detection_threshold_db,
        prediction_rng,
    );
    if !window.blockage_flag {
        return None;
    }
    let predicted_rates: Vec<Vec<f64>> = window
        .est_rx_dbm
        .iter()
        .map(|row| row.iter().map(|&p| lb.feasible_rate(p - lb.noise_power_dbm)).collect())
        .collect();
    Some(bapf_schedule_window(&predicted_rates, tiebreak_rng))
}

// ─── Campaigns ───────────────────────────────────────────────────────────────

/// All drops of one scenario, in drop order.
pub fn run_drops(config: &ScenarioConfig, threads: Option<usize>) -> Result<Vec<DropResult>, SimError> {
    config.validate()?;
    with_pool(threads, || (0..config.drops).into_par_iter().map(|d| run_drop(config, d)).collect())
}

/// Metrics of one scenario point over all its drops.
pub fn run_point(config: &ScenarioConfig, threads: Option<usize>) -> Result<MetricsReport, SimError> {
    summarize(&run_drops(config, threads)?).map_err(SimError::from)
}

/// Pools the per-user averages of finished drops into a report.
pub fn summarize(drops: &[DropResult]) -> Result<MetricsReport, MetricsError> {
    let per_drop: Vec<Vec<f64>> = drops.iter().map(|d| d.avg_rates_bps.clone()).collect();
    MetricsReport::from_per_drop_rates(&per_drop)
}

/// One point of a sweep grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScenarioPoint {
    pub policy: Policy,
    pub arrival_rate_per_s: f64,
    pub mean_duration_ms: f64,
    pub window_ms: f64,
    pub sigma_db: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointResult {
    pub point: ScenarioPoint,
    pub report: MetricsReport,
}

/// Scenario grid: the cartesian product of the four lists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub arrival_rates_per_s: Vec<f64>,
    pub mean_durations_ms: Vec<f64>,
    pub windows_ms: Vec<f64>,
    pub policies: Vec<Policy>,
}

impl SweepGrid {
    /// A grid holding just the base config's own scenario.
    pub fn single(config: &ScenarioConfig) -> Self {
        SweepGrid {
            arrival_rates_per_s: vec![config.blockage.arrival_rate_per_s],
            mean_durations_ms: vec![config.blockage.mean_duration_ms],
            windows_ms: vec![config.prediction.window_ms],
            policies: vec![config.policy],
        }
    }

    /// The config a grid point runs: the base scenario with the point's
    /// blockage intensity, window (with its paired error std, if the window
    /// is one of the conventional three), and policy.
    pub fn config_at(&self, base: &ScenarioConfig, point: &ScenarioPoint) -> ScenarioConfig {
        let mut config = base.clone();
        config.blockage.arrival_rate_per_s = point.arrival_rate_per_s;
        config.blockage.mean_duration_ms = point.mean_duration_ms;
        config.prediction.window_ms = point.window_ms;
        config.prediction.sigma_db = point.sigma_db;
        config.policy = point.policy;
        config
    }

    /// Grid points in sweep order (rate, duration, window, policy).
    pub fn points(&self, base: &ScenarioConfig) -> Vec<ScenarioPoint> {
        let mut points = Vec::new();
        for &rate in &self.arrival_rates_per_s {
            for &duration in &self.mean_durations_ms {
                for &window in &self.windows_ms {
                    for &policy in &self.policies {
                        points.push(ScenarioPoint {
                            policy,
                            arrival_rate_per_s: rate,
                            mean_duration_ms: duration,
                            window_ms: window,
                            sigma_db: sigma_for_window_ms(window).unwrap_or(base.prediction.sigma_db),
                        });
                    }
                }
            }
        }
        points
    }
}

/// Runs every grid point over `base` and reports each one. All points share
/// the base master seed, so policies at the same blockage intensity see the
/// same placements and traces.
pub fn run_campaign(
    base: &ScenarioConfig,
    grid: &SweepGrid,
    threads: Option<usize>,
) -> Result<Vec<PointResult>, SimError> {
    let points = grid.points(base);
    if points.is_empty() {
        return Err(ConfigError::Invalid { field: "sweep", message: "the grid is empty" }.into());
    }
    points
        .into_iter()
        .map(|point| {
            let config = grid.config_at(base, &point);
            let report = run_point(&config, threads)?;
            Ok(PointResult { point, report })
        })
        .collect()
}

fn with_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match threads {
        None => f(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .expect("worker pool")
            .install(f),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blockage::{trace_from_blockers, ChannelState};
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Small scenario for fast tests: 2000 slots instead of a full frame.
    fn small() -> ScenarioConfig {
        ScenarioConfig { horizon_slots: 2000, drops: 4, ..ScenarioConfig::table1() }
    }

    fn los_trace(config: &ScenarioConfig) -> AttenuationTrace {
        trace_from_blockers(&config.blockage, config.horizon_slots, config.slot_ms(), &[]).unwrap()
    }

    #[test]
    fn table1_is_valid_and_self_consistent() {
        let config = ScenarioConfig::table1();
        config.validate().unwrap();
        assert_eq!(config.window_slots(), 3200);
        assert!((config.link_budget().noise_power_dbm - -71.99).abs() < 0.01);
    }

    #[test]
    fn validation_names_the_bad_field() {
        let mut config = small();
        config.n_ues = 0;
        assert_eq!(
            config.validate(),
            Err(ConfigError::Invalid { field: "n_ues", message: "need at least one user" })
        );
        let mut config = small();
        config.ema_weight = 1.5;
        assert!(matches!(config.validate(), Err(ConfigError::Invalid { field: "ema_weight", .. })));
        let mut config = small();
        config.blockage.mean_duration_ms = -1.0;
        assert!(matches!(config.validate(), Err(ConfigError::Invalid { field: "blockage", .. })));
    }

    #[test]
    fn placement_radii_are_disc_uniform() {
        // r^2 must be uniform on [0, R^2]: check the CDF on a grid with
        // binomial 4-sigma bands.
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let n = 100_000;
        let geoms = place_ues(n, 15.0, 2.0, &mut rng);
        assert!(geoms.iter().all(|g| (0.0..=15.0).contains(&g.planar_radius_m)));
        for q in [0.25, 0.5, 0.75] {
            let threshold = 15.0 * 15.0 * q;
            let hits = geoms.iter().filter(|g| g.planar_radius_m.powi(2) <= threshold).count();
            let p = hits as f64 / n as f64;
            let sigma = (q * (1.0 - q) / n as f64).sqrt();
            assert!((p - q).abs() < 4.0 * sigma, "q={q}: {p}");
        }
    }

    #[test]
    fn sole_unblocked_user_gets_its_feasible_rate() {
        let mut config = small();
        config.n_ues = 1;
        config.blockage.arrival_rate_per_s = 0.0;
        let result = run_drop(&config, 0).unwrap();
        let geom = {
            let mut rng = seeds::stream_rng(config.master_seed, 0, seeds::STREAM_PLACEMENT);
            place_ues(1, config.cell_radius_m, config.ap_height_m, &mut rng)[0]
        };
        let lb = config.link_budget();
        let feasible = lb.feasible_rate(lb.unblocked_rx_dbm(geom.distance_m()) - lb.noise_power_dbm);
        assert!((result.avg_rates_bps[0] - feasible).abs() / feasible < 1e-9);
        assert_eq!(result.slots_assigned[0] as usize, config.horizon_slots);
    }

    #[test]
    fn identical_static_users_split_evenly_under_pf() {
        let config = ScenarioConfig { n_ues: 8, ..small() };
        let geoms = vec![UeGeometry { planar_radius_m: 3.0, ap_height_m: 2.0 }; 8];
        let traces = vec![los_trace(&config); 8];
        let result = run_drop_with_parts(&config, 0, &geoms, &traces).unwrap();
        let lb = config.link_budget();
        let feasible = lb.feasible_rate(lb.unblocked_rx_dbm(geoms[0].distance_m()) - lb.noise_power_dbm);
        for u in 0..8 {
            let share = result.avg_rates_bps[u] / feasible;
            assert!((share - 0.125).abs() < 0.125 * 0.02, "user {u}: {share}");
        }
    }

    #[test]
    fn every_slot_is_assigned_exactly_once() {
        for policy in Policy::ALL {
            let config = ScenarioConfig { policy, blockage: BlockageParams { arrival_rate_per_s: 2.0, ..small().blockage }, ..small() };
            let result = run_drop(&config, 1).unwrap();
            assert_eq!(result.assignment.len(), config.horizon_slots);
            assert_eq!(result.slots_assigned.iter().sum::<u32>() as usize, config.horizon_slots);
            assert!(result.assignment.iter().all(|&u| (u as usize) < config.n_ues));
            let mut counted = vec![0u32; config.n_ues];
            for &u in &result.assignment {
                counted[u as usize] += 1;
            }
            assert_eq!(counted, result.slots_assigned);
        }
    }

    #[test]
    fn no_blockage_makes_bapf_and_pf_identical() {
        let mut config = small();
        config.blockage.arrival_rate_per_s = 0.0;
        config.policy = Policy::Pf;
        let pf = run_drop(&config, 3).unwrap();
        config.policy = Policy::BaPf;
        let bapf = run_drop(&config, 3).unwrap();
        assert_eq!(pf, bapf);
    }

    #[test]
    fn drops_are_deterministic() {
        let config = ScenarioConfig { policy: Policy::BaPf, blockage: BlockageParams { arrival_rate_per_s: 1.0, ..small().blockage }, ..small() };
        assert_eq!(run_drop(&config, 5).unwrap(), run_drop(&config, 5).unwrap());
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let config = ScenarioConfig { policy: Policy::BaPf, blockage: BlockageParams { arrival_rate_per_s: 1.0, ..small().blockage }, ..small() };
        let single = run_drops(&config, Some(1)).unwrap();
        let dual = run_drops(&config, Some(2)).unwrap();
        assert_eq!(single, dual);
        assert_eq!(run_point(&config, Some(1)).unwrap(), run_point(&config, Some(2)).unwrap());
    }

    #[test]
    fn rates_respect_the_cell_ceiling() {
        let config = ScenarioConfig { blockage: BlockageParams { arrival_rate_per_s: 1.0, ..small().blockage }, ..small() };
        let lb = config.link_budget();
        // The closest possible user stands right under the AP.
        let ceiling = lb.feasible_rate(lb.unblocked_rx_dbm(config.ap_height_m) - lb.noise_power_dbm);
        for drop in 0..3 {
            let result = run_drop(&config, drop).unwrap();
            assert!(result.avg_rates_bps.iter().all(|&r| r <= ceiling));
        }
    }

    #[test]
    fn blocked_slot_accounting_matches_the_traces() {
        // 6000 slots = 375 ms: enough for the 200 ms climb plus the dwell.
        let config = ScenarioConfig { horizon_slots: 6000, ..small() };
        let geoms = vec![UeGeometry { planar_radius_m: 1.0, ap_height_m: 2.0 }; 8];
        let mut traces = vec![los_trace(&config); 8];
        traces[2] = trace_from_blockers(
            &config.blockage,
            config.horizon_slots,
            config.slot_ms(),
            &[crate::blockage::Blocker { arrival_ms: 10.0, dwell_ms: 25.0 }],
        )
        .unwrap();
        let result = run_drop_with_parts(&config, 0, &geoms, &traces).unwrap();
        assert_eq!(result.blockage_episodes, vec![0, 0, 1, 0, 0, 0, 0, 0]);
        assert!(result.blocked_slots[2] > 0);
        assert_eq!(result.blocked_slots[2] as usize, traces[2].blocked_slots());
        assert!(traces[2].states.contains(&ChannelState::Nlos));
    }

    #[test]
    fn campaign_points_are_reproducible() {
        let mut config = small();
        config.drops = 2;
        let grid = SweepGrid {
            arrival_rates_per_s: vec![1.0, 1.0],
            mean_durations_ms: vec![1000.0],
            windows_ms: vec![200.0],
            policies: vec![Policy::Pf],
        };
        let results = run_campaign(&config, &grid, None).unwrap();
        assert_eq!(results.len(), 2);
        // Identical grid points under one master seed give identical reports.
        assert_eq!(results[0].report, results[1].report);
        assert_eq!(results[0].report.sample_count, config.n_ues * 2);
        assert_eq!(results[0].point.sigma_db, 1e-2); // paired to the 200 ms window
    }

    #[test]
    fn empty_grid_is_an_error() {
        let grid = SweepGrid { arrival_rates_per_s: vec![], mean_durations_ms: vec![], windows_ms: vec![], policies: vec![] };
        assert!(matches!(run_campaign(&small(), &grid, None), Err(SimError::Config(_))));
    }
}
