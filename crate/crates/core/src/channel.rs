//! Link budget, SNR, and Shannon rate evaluation.
//!
//! All link arithmetic stays in the dB domain — received powers span well
//! over 100 dB of dynamic range — and conversion to linear happens only
//! inside the capacity formula.

use serde::{Deserialize, Serialize};

/// Thermal noise density at room temperature, dBm/Hz.
pub const THERMAL_NOISE_DBM_PER_HZ: f64 = -174.0;

/// Static radio parameters of the downlink shared by every user.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkBudget {
    pub tx_power_dbm: f64,
    pub tx_gain_dbi: f64,
    pub rx_gain_dbi: f64,
    /// Path loss at the 1 m reference distance, dB.
    pub ref_loss_db: f64,
    pub pathloss_exponent: f64,
    pub noise_power_dbm: f64,
    pub bandwidth_hz: f64,
    /// SNR at or below this threshold puts the link in outage, dB.
    pub snr_threshold_db: f64,
}

/// Position of one user relative to the AP.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UeGeometry {
    /// Horizontal distance from the point under the AP, metres.
    pub planar_radius_m: f64,
    /// Height of the AP above the user's antenna, metres.
    pub ap_height_m: f64,
}

impl UeGeometry {
    /// Slant distance from AP to user antenna.
    pub fn distance_m(&self) -> f64 {
        self.ap_height_m.hypot(self.planar_radius_m)
    }
}

/// Noise power over bandwidth `bandwidth_hz` with the given receiver noise
/// figure, dBm.
pub fn noise_power(bandwidth_hz: f64, noise_figure_db: f64) -> f64 {
    assert!(bandwidth_hz > 0.0, "bandwidth must be positive");
    THERMAL_NOISE_DBM_PER_HZ + 10.0 * bandwidth_hz.log10() + noise_figure_db
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// SNR in dB is a plain difference of dB powers.
pub fn snr_db(p_rx_dbm: f64, p_n_dbm: f64) -> f64 {
    p_rx_dbm - p_n_dbm
}

impl LinkBudget {
    /// Received power at `distance_m` with no blockage, dBm.
    pub fn unblocked_rx_dbm(&self, distance_m: f64) -> f64 {
        assert!(distance_m > 0.0, "link distance must be positive");
        self.tx_power_dbm + self.tx_gain_dbi + self.rx_gain_dbi
            - self.ref_loss_db
            - 10.0 * self.pathloss_exponent * distance_m.log10()
    }

    /// Received power with `attenuation_db` of blockage on the path, dBm.
    pub fn received_power(&self, geom: &UeGeometry, attenuation_db: f64) -> f64 {
        debug_assert!(attenuation_db >= 0.0);
        self.unblocked_rx_dbm(geom.distance_m()) - attenuation_db
    }

    /// Rate the user would get if scheduled this slot: the Shannon rate over
    /// the full band, or zero when the SNR does not clear the outage
    /// threshold (strictly).
    pub fn feasible_rate(&self, snr_db: f64) -> f64 {
        if snr_db > self.snr_threshold_db {
            self.bandwidth_hz * (1.0 + db_to_linear(snr_db)).log2()
        } else {
            0.0
        }
    }
}

/// Realized user rate for one slot: the feasible rate if the slot was
/// allocated to this user, zero otherwise.
pub fn instantaneous_rate(snr_db: f64, allocated: bool, lb: &LinkBudget) -> f64 {
    if allocated {
        lb.feasible_rate(snr_db)
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn budget() -> LinkBudget {
        LinkBudget {
            tx_power_dbm: 20.0,
            tx_gain_dbi: 3.16,
            rx_gain_dbi: 0.0,
            ref_loss_db: 63.4,
            pathloss_exponent: 1.72,
            noise_power_dbm: noise_power(2e9, 9.0),
            bandwidth_hz: 2e9,
            snr_threshold_db: 0.0,
        }
    }

    #[test]
    fn noise_power_reference_values() {
        assert!((noise_power(2e9, 9.0) - -71.99).abs() < 0.01);
        assert!((noise_power(1.0, 0.0) - -174.0).abs() < 1e-9);
        assert!((noise_power(1e6, 9.0) - -105.0).abs() < 1e-9);
    }

    #[test]
    fn received_power_sums_the_budget() {
        let lb = budget();
        let at_1m = UeGeometry { planar_radius_m: 0.0, ap_height_m: 1.0 };
        assert!((lb.received_power(&at_1m, 0.0) - -40.24).abs() < 1e-9);
        assert!((lb.received_power(&at_1m, 40.0) - -80.24).abs() < 1e-9);
        let under_ap = UeGeometry { planar_radius_m: 0.0, ap_height_m: 2.0 };
        let expect = -40.24 - 17.2 * 2f64.log10();
        assert!((lb.received_power(&under_ap, 0.0) - expect).abs() < 1e-9);
        assert!((expect - -45.42).abs() < 0.01);
    }

    #[test]
    fn snr_is_a_db_difference() {
        assert!((snr_db(-45.42, -71.99) - 26.57).abs() < 1e-9);
        assert_eq!(snr_db(-71.99, -71.99), 0.0);
        assert!((snr_db(-80.24, -71.99) - -8.25).abs() < 1e-9);
    }

    #[test]
    fn rate_is_shannon_with_an_outage_gate() {
        let lb = budget();
        assert_eq!(instantaneous_rate(30.0, false, &lb), 0.0);
        assert_eq!(instantaneous_rate(-5.0, true, &lb), 0.0);
        // Threshold is strict: exactly at the threshold is still outage.
        assert_eq!(instantaneous_rate(0.0, true, &lb), 0.0);
        // Linear SNR of 3 over 2 GHz: log2(4) bit/s/Hz.
        let z = 10.0 * 3f64.log10();
        let rate = instantaneous_rate(z, true, &lb);
        assert!((rate - 4e9).abs() / 4e9 < 1e-12, "{rate}");
    }

    #[test]
    fn rate_monotone_in_attenuation_and_distance() {
        let lb = budget();
        let geom = UeGeometry { planar_radius_m: 3.0, ap_height_m: 2.0 };
        let mut last = f64::INFINITY;
        for a in [0.0, 5.0, 10.0, 20.0, 39.0, 40.0] {
            let r = lb.feasible_rate(snr_db(lb.received_power(&geom, a), lb.noise_power_dbm));
            assert!(r <= last, "rate must not grow with attenuation");
            last = r;
        }
        let mut last = f64::INFINITY;
        for radius in [0.0, 2.0, 5.0, 10.0, 15.0] {
            let geom = UeGeometry { planar_radius_m: radius, ap_height_m: 2.0 };
            let r = lb.feasible_rate(snr_db(lb.received_power(&geom, 0.0), lb.noise_power_dbm));
            assert!(r <= last, "rate must not grow with distance");
            last = r;
        }
    }

    #[test]
    fn full_blockage_is_outage_everywhere_in_the_cell() {
        // 40 dB of blockage drives every placeable user below threshold.
        let lb = budget();
        for radius in [0.0, 1.0, 5.0, 10.0, 15.0] {
            let geom = UeGeometry { planar_radius_m: radius, ap_height_m: 2.0 };
            let z = snr_db(lb.received_power(&geom, 40.0), lb.noise_power_dbm);
            assert!(z <= 0.0, "radius {radius}: snr {z}");
            assert_eq!(lb.feasible_rate(z), 0.0);
        }
    }

    #[test]
    fn db_linear_round_trip() {
        for db in [-80.0, -8.25, 0.0, 11.3, 26.57] {
            let back = linear_to_db(db_to_linear(db));
            assert!((back - db).abs() <= 1e-9 * db.abs().max(1.0));
        }
    }

    #[test]
    fn geometry_distances() {
        let centre = UeGeometry { planar_radius_m: 0.0, ap_height_m: 2.0 };
        assert_eq!(centre.distance_m(), 2.0);
        let edge = UeGeometry { planar_radius_m: 15.0, ap_height_m: 2.0 };
        assert!((edge.distance_m() - 229f64.sqrt()).abs() < 1e-12);
    }
}
