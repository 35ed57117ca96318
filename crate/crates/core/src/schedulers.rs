//! The three scheduling policies behind one per-slot interface.
//!
//! PF and MaxMin decide slot by slot from the users' moving-average rates.
//! The blockage-aware variant additionally precomputes whole prediction
//! windows: when a blockage is flagged for the upcoming window it fixes
//! every slot of that window in advance (see [`bapf_schedule_window`]), and
//! otherwise it behaves exactly like PF.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

/// Scheduling policy selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Policy {
    Pf,
    MaxMin,
    BaPf,
}

impl Policy {
    pub const ALL: [Policy; 3] = [Policy::Pf, Policy::MaxMin, Policy::BaPf];

    pub fn name(&self) -> &'static str {
        match self {
            Policy::Pf => "pf",
            Policy::MaxMin => "maxmin",
            Policy::BaPf => "bapf",
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Policy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pf" => Ok(Policy::Pf),
            "maxmin" => Ok(Policy::MaxMin),
            "bapf" => Ok(Policy::BaPf),
            other => Err(format!("unknown policy {other:?}, expected pf, maxmin, or bapf")),
        }
    }
}

/// Scheduled user per slot.
pub type ScheduleAssignment = Vec<u16>;

/// Priority of one user in a selection. Every infinite-class entry outranks
/// every finite one; within a class, larger magnitude wins.
///
/// The infinite class captures positive rates over a zero denominator —
/// a user whose average (or in-window sum) is still zero but who could
/// actually move data should win the slot outright.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Priority {
    Finite(f64),
    Infinite(f64),
}

fn cmp_priority(a: Priority, b: Priority) -> Ordering {
    use Priority::*;
    match (a, b) {
        (Finite(x), Finite(y)) => x.total_cmp(&y),
        (Infinite(x), Infinite(y)) => x.total_cmp(&y),
        (Infinite(_), Finite(_)) => Ordering::Greater,
        (Finite(_), Infinite(_)) => Ordering::Less,
    }
}

/// Index of the maximal priority among `n` candidates, breaking exact ties
/// uniformly at random. Draws from the RNG only when there is a tie.
pub fn pick_max<R: Rng + ?Sized>(n: usize, priority: impl Fn(usize) -> Priority, rng: &mut R) -> usize {
    debug_assert!(n > 0);
    let mut best = priority(0);
    for u in 1..n {
        let p = priority(u);
        if cmp_priority(p, best) == Ordering::Greater {
            best = p;
        }
    }
    let ties = (0..n).filter(|&u| cmp_priority(priority(u), best) == Ordering::Equal).count();
    let winner = if ties == 1 { 0 } else { rng.random_range(0..ties) };
    (0..n)
        .filter(|&u| cmp_priority(priority(u), best) == Ordering::Equal)
        .nth(winner)
        .expect("winner is within the tie count")
}

/// Per-policy mutable state carried across the slots of one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct SchedulerState {
    /// Exponential moving average of each user's realized rate, bit/s.
    pub avg_rates_bps: Vec<f64>,
    /// EMA weight of the newest sample, in [0, 1].
    pub ema_weight: f64,
}

impl SchedulerState {
    /// Starts the averages at the given rates — conventionally each user's
    /// unblocked feasible rate, which avoids a divide-by-zero transient on
    /// the first slots of the frame.
    pub fn new(initial_rates_bps: &[f64], ema_weight: f64) -> Self {
        assert!((0.0..=1.0).contains(&ema_weight), "EMA weight must lie in [0, 1]");
        assert!(initial_rates_bps.iter().all(|r| *r >= 0.0), "rates must be non-negative");
        SchedulerState { avg_rates_bps: initial_rates_bps.to_vec(), ema_weight }
    }

    /// Folds one slot's realized rates into the moving averages:
    /// `avg <- (1-w) * avg + w * realized` for every user, scheduled or not.
    pub fn update_avg(&mut self, realized_bps: &[f64]) {
        debug_assert_eq!(realized_bps.len(), self.avg_rates_bps.len());
        let w = self.ema_weight;
        for (avg, &r) in self.avg_rates_bps.iter_mut().zip(realized_bps) {
            *avg = (1.0 - w) * *avg + w * r;
        }
    }
}

/// PF selection: the user maximizing feasible rate over average rate.
/// A zero average with a positive feasible rate is an infinite priority;
/// if nobody can move data the slot is wasted on a uniform random pick.
pub fn pf_select<R: Rng + ?Sized>(feasible_bps: &[f64], state: &SchedulerState, rng: &mut R) -> usize {
    debug_assert_eq!(feasible_bps.len(), state.avg_rates_bps.len());
    pick_max(
        feasible_bps.len(),
        |u| priority_ratio(feasible_bps[u], state.avg_rates_bps[u]),
        rng,
    )
}

/// MaxMin selection: the user with the lowest average rate; zero averages
/// dominate everything.
pub fn maxmin_select<R: Rng + ?Sized>(state: &SchedulerState, rng: &mut R) -> usize {
    pick_max(
        state.avg_rates_bps.len(),
        |u| {
            let avg = state.avg_rates_bps[u];
            if avg > 0.0 {
                Priority::Finite(-avg)
            } else {
                Priority::Infinite(0.0)
            }
        },
        rng,
    )
}

/// Ratio priority shared by PF (rate over EMA) and the window assignment
/// (rate over in-window sum).
fn priority_ratio(rate: f64, denominator: f64) -> Priority {
    if denominator > 0.0 {
        Priority::Finite(rate / denominator)
    } else if rate > 0.0 {
        Priority::Infinite(rate)
    } else {
        Priority::Finite(0.0)
    }
}

/// Assigns every slot of a prediction window at once, walking backwards from
/// the window's end. Each decision weighs a user's predicted rate in the
/// current slot against the predicted sum of everything that user already
/// holds later in the window, so a user about to lose its link collects its
/// transmissions in the slots where the link still works.
///
/// `predicted_rates_bps[user][slot]` must already include the outage gate
/// (zero where the predicted SNR misses the threshold).
pub fn bapf_schedule_window<R: Rng + ?Sized>(
    predicted_rates_bps: &[Vec<f64>],
    rng: &mut R,
) -> ScheduleAssignment {
    let n_users = predicted_rates_bps.len();
    assert!(n_users > 0, "window scheduling needs at least one user");
    let window = predicted_rates_bps[0].len();
    debug_assert!(predicted_rates_bps.iter().all(|r| r.len() == window));
    let mut later_sum = vec![0.0f64; n_users];
    let mut assignment = vec![0u16; window];
    for slot in (0..window).rev() {
        let pick = pick_max(
            n_users,
            |u| priority_ratio(predicted_rates_bps[u][slot], later_sum[u]),
            rng,
        );
        assignment[slot] = pick as u16;
        later_sum[pick] += predicted_rates_bps[pick][slot];
    }
    assignment
}

/// Unified per-slot dispatch. PF and MaxMin decide on the spot; the
/// blockage-aware policy consumes its precomputed pick when the current
/// window was flagged and scheduled ahead, and otherwise falls back to plain
/// PF — which makes it slot-identical to PF whenever no blockage is
/// predicted.
pub fn schedule_slot<R: Rng + ?Sized>(
    policy: Policy,
    feasible_bps: &[f64],
    state: &SchedulerState,
    window_pick: Option<u16>,
    rng: &mut R,
) -> usize {
    match policy {
        Policy::Pf => pf_select(feasible_bps, state, rng),
        Policy::MaxMin => maxmin_select(state, rng),
        Policy::BaPf => match window_pick {
            Some(u) => u as usize,
            None => pf_select(feasible_bps, state, rng),
        },
    }
}
