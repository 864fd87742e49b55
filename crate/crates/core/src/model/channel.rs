use serde::{Deserialize, Serialize};

use super::RadioConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Up,
    Down,
}

/// Linear power gain of the log-distance pathloss model,
/// `PL(dB) = PL_ref + 10 n log10(d / d_ref)`.
///
/// Distances below the reference distance are clamped to it.
pub fn pathloss_gain(distance_m: f64, cfg: &RadioConfig) -> f64 {
    let d = distance_m.max(cfg.pathloss_ref_distance_m);
    let pl_db = cfg.pathloss_ref_db
        + 10.0 * cfg.pathloss_exponent * (d / cfg.pathloss_ref_distance_m).log10();
    10f64.powf(-pl_db / 10.0)
}

/// Shannon capacity of one channel in bits per second.
pub fn channel_capacity(gain: f64, cfg: &RadioConfig, direction: Direction, interference_w: f64) -> f64 {
    let sinr = cfg.tx_power_w * gain / (cfg.noise_power_w + interference_w);
    cfg.channel_bandwidth_hz(direction) * (1.0 + sinr).log2()
}

/// Total rate over the channels whose flag is set.
///
/// # Panics
/// If the two slices differ in length.
pub fn aggregate_rate(assigned: &[bool], per_channel_rates: &[f64]) -> f64 {
    assert_eq!(
        assigned.len(),
        per_channel_rates.len(),
        "one flag per channel"
    );
    assigned
        .iter()
        .zip(per_channel_rates)
        .filter(|(flag, _)| **flag)
        .map(|(_, r)| r)
        .sum()
}
