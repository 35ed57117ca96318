//! Four-state blockage attenuation model.
//!
//! Each user's link alternates between clear and blocked periods driven by a
//! Poisson process of blocker arrivals. A blockage episode ramps the
//! attenuation up linearly while the blocker moves in (DECAY), holds it at
//! the maximum while the body obstructs the path (NLOS), then ramps it back
//! down once the path clears (RISE). Overlapping blockers merge into one
//! episode that stays in NLOS until the last pending blocker leaves.

use std::fmt;

use rand::Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Parameters of the blockage process for one user.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockageParams {
    /// Blocker arrivals per second.
    pub arrival_rate_per_s: f64,
    /// Mean time a blocker keeps the link fully blocked, milliseconds.
    pub mean_duration_ms: f64,
    /// Slope of the attenuation ramp while a blocker moves in, dB/ms.
    pub decay_db_per_ms: f64,
    /// Slope of the attenuation ramp once the path clears, dB/ms.
    pub rise_db_per_ms: f64,
    /// Attenuation of a fully developed blockage, dB.
    pub max_attenuation_db: f64,
}

impl BlockageParams {
    pub fn validate(&self) -> Result<(), TraceError> {
        let check = |ok: bool, what: &'static str| if ok { Ok(()) } else { Err(TraceError::InvalidParams(what)) };
        check(self.arrival_rate_per_s >= 0.0 && self.arrival_rate_per_s.is_finite(), "arrival rate must be finite and non-negative")?;
        check(self.mean_duration_ms > 0.0 && self.mean_duration_ms.is_finite(), "mean blockage duration must be positive")?;
        check(self.decay_db_per_ms > 0.0 && self.decay_db_per_ms.is_finite(), "decay slope must be positive")?;
        check(self.rise_db_per_ms > 0.0 && self.rise_db_per_ms.is_finite(), "rise slope must be positive")?;
        check(self.max_attenuation_db > 0.0 && self.max_attenuation_db.is_finite(), "max attenuation must be positive")
    }
}

/// Channel state of one slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChannelState {
    Los,
    Decay,
    Nlos,
    Rise,
}

impl fmt::Display for ChannelState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ChannelState::Los => "LOS",
            ChannelState::Decay => "DECAY",
            ChannelState::Nlos => "NLOS",
            ChannelState::Rise => "RISE",
        })
    }
}

/// One blocker: when it arrives and how long it holds the link in NLOS.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Blocker {
    pub arrival_ms: f64,
    pub dwell_ms: f64,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TraceError {
    #[error("horizon must be at least one slot")]
    EmptyHorizon,
    #[error("invalid blockage parameters: {0}")]
    InvalidParams(&'static str),
}

/// Per-slot attenuation series for one user.
#[derive(Debug, Clone, PartialEq)]
pub struct AttenuationTrace {
    /// Attenuation in dB, one entry per slot.
    pub values_db: Vec<f64>,
    /// Channel state of each slot, parallel to `values_db`.
    pub states: Vec<ChannelState>,
}

impl AttenuationTrace {
    pub fn len(&self) -> usize {
        self.values_db.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values_db.is_empty()
    }

    /// Number of slots spent outside LOS.
    pub fn blocked_slots(&self) -> usize {
        self.states.iter().filter(|&&s| s != ChannelState::Los).count()
    }

    /// Number of maximal non-LOS runs (merged blockage episodes).
    pub fn episode_count(&self) -> usize {
        let mut count = 0;
        let mut prev = ChannelState::Los;
        for &s in &self.states {
            if s != ChannelState::Los && prev == ChannelState::Los {
                count += 1;
            }
            prev = s;
        }
        count
    }

    /// Verifies the structural invariants every trace must satisfy: values in
    /// bounds and consistent with states, per-slot movement no faster than the
    /// ramp slopes, and only transitions the state machine can produce.
    ///
    /// Meaningful when ramps and dwells span at least a slot each — the regime
    /// this simulator targets. Phases shorter than one slot are invisible at
    /// slot resolution and void the transition check.
    pub fn check_invariants(&self, params: &BlockageParams, slot_ms: f64) -> Result<(), String> {
        use ChannelState::*;
        if self.values_db.len() != self.states.len() {
            return Err("values and states lengths differ".into());
        }
        let a_max = params.max_attenuation_db;
        let step_d = params.decay_db_per_ms * slot_ms;
        let step_r = params.rise_db_per_ms * slot_ms;
        let eps = 1e-9 * a_max.max(1.0);
        for (t, (&v, &s)) in self.values_db.iter().zip(&self.states).enumerate() {
            if !(0.0..=a_max).contains(&v) {
                return Err(format!("slot {t}: attenuation {v} outside [0, {a_max}]"));
            }
            if s == Los && v != 0.0 {
                return Err(format!("slot {t}: LOS with nonzero attenuation {v}"));
            }
            if s == Nlos && v != a_max {
                return Err(format!("slot {t}: NLOS with attenuation {v} != {a_max}"));
            }
            if t == 0 {
                continue;
            }
            let diff = v - self.values_db[t - 1];
            if diff > step_d + eps || diff < -(step_r + eps) {
                return Err(format!("slot {t}: increment {diff} faster than the ramp slopes"));
            }
            let legal = match (self.states[t - 1], s) {
                (a, b) if a == b => true,
                (Los, Decay) | (Decay, Nlos) | (Nlos, Rise) | (Rise, Los) => true,
                // Re-blocking, including the shadows it casts at slot
                // resolution when the rise fragment is shorter than a slot.
                (Rise, Decay) | (Nlos, Decay) | (Rise, Nlos) => true,
                _ => false,
            };
            if !legal {
                return Err(format!("slot {t}: illegal transition {} -> {}", self.states[t - 1], s));
            }
        }
        Ok(())
    }
}

/// Arrival instants of a Poisson process with `rate_per_s`, in seconds,
/// sorted within `[0, horizon_s)`. A zero rate yields no arrivals.
pub fn arrival_times<R: Rng + ?Sized>(rate_per_s: f64, horizon_s: f64, rng: &mut R) -> Vec<f64> {
    if rate_per_s <= 0.0 || horizon_s <= 0.0 {
        return Vec::new();
    }
    let gap = Exp::new(rate_per_s).expect("positive rate");
    let mut out = Vec::new();
    let mut t = 0.0;
    loop {
        t += gap.sample(rng);
        if t >= horizon_s {
            return out;
        }
        out.push(t);
    }
}

/// Draws blocker arrivals and dwells for `horizon_slots` slots and renders
/// the resulting attenuation trace. Deterministic given the RNG state.
pub fn generate_trace<R: Rng + ?Sized>(
    params: &BlockageParams,
    horizon_slots: usize,
    slot_ms: f64,
    rng: &mut R,
) -> Result<AttenuationTrace, TraceError> {
    params.validate()?;
    if horizon_slots == 0 {
        return Err(TraceError::EmptyHorizon);
    }
    if !(slot_ms > 0.0 && slot_ms.is_finite()) {
        return Err(TraceError::InvalidParams("slot duration must be positive"));
    }
    let horizon_s = horizon_slots as f64 * slot_ms / 1000.0;
    let arrivals = arrival_times(params.arrival_rate_per_s, horizon_s, rng);
    let dwell = Exp::new(1.0 / params.mean_duration_ms).expect("validated");
    let blockers: Vec<Blocker> = arrivals
        .iter()
        .map(|&a_s| Blocker { arrival_ms: a_s * 1000.0, dwell_ms: dwell.sample(rng) })
        .collect();
    trace_from_blockers(params, horizon_slots, slot_ms, &blockers)
}

/// Renders the trace for an explicit set of blockers. This is the
/// deterministic core of [`generate_trace`], also useful on its own for
/// constructing known blockage geometries.
pub fn trace_from_blockers(
    params: &BlockageParams,
    horizon_slots: usize,
    slot_ms: f64,
    blockers: &[Blocker],
) -> Result<AttenuationTrace, TraceError> {
    params.validate()?;
    if horizon_slots == 0 {
        return Err(TraceError::EmptyHorizon);
    }
    if !(slot_ms > 0.0 && slot_ms.is_finite()) {
        return Err(TraceError::InvalidParams("slot duration must be positive"));
    }
    if blockers.iter().any(|b| !(b.arrival_ms >= 0.0 && b.arrival_ms.is_finite() && b.dwell_ms >= 0.0 && b.dwell_ms.is_finite())) {
        return Err(TraceError::InvalidParams("blocker times must be finite and non-negative"));
    }
    let mut sorted = blockers.to_vec();
    sorted.sort_by(|a, b| a.arrival_ms.total_cmp(&b.arrival_ms));
    let segments = build_segments(params, &sorted);
    Ok(sample_segments(params, horizon_slots, slot_ms, &segments))
}

// ─── Continuous-time construction ────────────────────────────────────────────

/// A maximal span of one channel state. The attenuation over the span is
/// `anchor_db` plus the state's slope times the elapsed time; each segment
/// ends where the next one starts.
struct Segment {
    start_ms: f64,
    state: ChannelState,
    anchor_db: f64,
}

fn build_segments(p: &BlockageParams, blockers: &[Blocker]) -> Vec<Segment> {
    let a_max = p.max_attenuation_db;
    let mut segs: Vec<Segment> = Vec::with_capacity(4 * blockers.len() + 1);
    let mut t = 0.0;
    let mut i = 0;
    while i < blockers.len() {
        let opener = blockers[i];
        i += 1;
        if opener.arrival_ms > t {
            segs.push(Segment { start_ms: t, state: ChannelState::Los, anchor_db: 0.0 });
        }
        // One blockage episode. A decay leg climbs to full attenuation, the
        // merged NLOS dwell holds it there, and the rise leg drops back to
        // zero — unless another blocker lands mid-rise, which re-opens a
        // decay leg from the current level.
        let mut leg_start = opener.arrival_ms;
        let mut level = 0.0;
        let mut opener_dwell = opener.dwell_ms;
        t = loop {
            let t_nlos = leg_start + (a_max - level) / p.decay_db_per_ms;
            if t_nlos > leg_start {
                segs.push(Segment { start_ms: leg_start, state: ChannelState::Decay, anchor_db: level });
            }
            // The dwell clock of a blocker that arrives before full blockage
            // develops starts once NLOS is reached; later arrivals run from
            // their own arrival instant. The episode ends with the last
            // blocker standing.
            let mut nlos_end = t_nlos + opener_dwell;
            while i < blockers.len() && blockers[i].arrival_ms < t_nlos {
                nlos_end = nlos_end.max(t_nlos + blockers[i].dwell_ms);
                i += 1;
            }
            segs.push(Segment { start_ms: t_nlos, state: ChannelState::Nlos, anchor_db: a_max });
            while i < blockers.len() && blockers[i].arrival_ms < nlos_end {
                nlos_end = nlos_end.max(blockers[i].arrival_ms + blockers[i].dwell_ms);
                i += 1;
            }
            segs.push(Segment { start_ms: nlos_end, state: ChannelState::Rise, anchor_db: a_max });
            let t_los = nlos_end + a_max / p.rise_db_per_ms;
            if i < blockers.len() && blockers[i].arrival_ms < t_los {
                let again = blockers[i];
                i += 1;
                level = (a_max - p.rise_db_per_ms * (again.arrival_ms - nlos_end)).max(0.0);
                leg_start = again.arrival_ms;
                opener_dwell = again.dwell_ms;
            } else {
                break t_los;
            }
        };
    }
    segs.push(Segment { start_ms: t, state: ChannelState::Los, anchor_db: 0.0 });
    segs
}

// ─── Slot sampling ───────────────────────────────────────────────────────────

/// First slot whose boundary lies at or after `t_ms`. State changes take
/// effect at that boundary; the slot duration is far below every blockage
/// timescale, so the quantization error is negligible.
fn slot_at_or_after(t_ms: f64, slot_ms: f64) -> usize {
    (t_ms / slot_ms).ceil() as usize
}

fn sample_segments(p: &BlockageParams, horizon: usize, slot_ms: f64, segs: &[Segment]) -> AttenuationTrace {
    let a_max = p.max_attenuation_db;
    let step_d = p.decay_db_per_ms * slot_ms;
    let step_r = p.rise_db_per_ms * slot_ms;
    let mut values = vec![0.0f64; horizon];
    let mut states = vec![ChannelState::Los; horizon];
    for (k, seg) in segs.iter().enumerate() {
        let end_ms = segs.get(k + 1).map_or(f64::INFINITY, |s| s.start_ms);
        let first = slot_at_or_after(seg.start_ms, slot_ms).min(horizon);
        let last = slot_at_or_after(end_ms, slot_ms).min(horizon);
        if first >= last {
            continue; // segment squeezed below slot resolution (or past the horizon)
        }
        match seg.state {
            ChannelState::Los => {
                for s in first..last {
                    values[s] = 0.0;
                    states[s] = ChannelState::Los;
                }
            }
            ChannelState::Nlos => {
                for s in first..last {
                    values[s] = a_max;
                    states[s] = ChannelState::Nlos;
                }
            }
            // Ramps step by exactly one slope increment per slot, clipped
            // where they land on a bound, so traces keep bit-exact slopes
            // instead of accumulating resampling error.
            ChannelState::Decay => {
                let mut v = seg.anchor_db + p.decay_db_per_ms * (first as f64 * slot_ms - seg.start_ms);
                for s in first..last {
                    values[s] = v.min(a_max);
                    states[s] = ChannelState::Decay;
                    v = (v + step_d).min(a_max);
                }
            }
            ChannelState::Rise => {
                let mut v = seg.anchor_db - p.rise_db_per_ms * (first as f64 * slot_ms - seg.start_ms);
                for s in first..last {
                    values[s] = v.max(0.0);
                    states[s] = ChannelState::Rise;
                    v = (v - step_r).max(0.0);
                }
            }
        }
    }
    AttenuationTrace { values_db: values, states }
}

// ─── Tests ───────────────────────────────────────────────────────────────────
