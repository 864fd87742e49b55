//! Human-facing configuration of the cell.
//!
//! File values use the units of the simulation parameter table (km/h, Mb,
//! ms, GHz, MHz). [`EnvConfig::scenario`] validates them and converts to SI.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::env::RewardParams;
use crate::model::{ComputeConfig, RadioConfig, TaskType, ThresholdModel, Tti};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("invalid configuration: {0}")]
pub struct ConfigError(pub String);

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnvConfig {
    pub scenario: ScenarioSection,
    pub radio: RadioSection,
    pub compute: ComputeSection,
    pub tasks: TaskSection,
    pub reward: RewardParams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioSection {
    /// Number of vehicles in the cell.
    pub vehicles: usize,
    /// RSU coverage range; the road segment length.
    pub coverage_m: f64,
    /// Perpendicular distance from the road to the RSU.
    pub rsu_offset_m: f64,
    pub speed_range_kmh: [f64; 2],
    /// Road speed limit used by the HPA deadline curve.
    pub speed_limit_kmh: f64,
    pub tti_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RadioSection {
    pub uplink_bandwidth_mhz: f64,
    pub downlink_bandwidth_mhz: f64,
    pub uplink_channels: usize,
    pub downlink_channels: usize,
    pub tx_power_w: f64,
    pub noise_power_w: f64,
    pub interference_w: f64,
    pub pathloss_exponent: f64,
    pub pathloss_ref_db: f64,
    pub pathloss_ref_distance_m: f64,
    /// Unit-mean exponential (Rayleigh power) fast fading per channel and TTI.
    pub fading: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ComputeSection {
    pub vec_cpu_ghz: f64,
    /// Vehicle CPU frequencies; each vehicle draws one uniformly.
    pub vehicle_cpu_ghz: Vec<f64>,
    pub hold_wait_ms: f64,
    /// Charge transmit energy on whole-TTI air time instead of exact air time.
    pub energy_on_rounded_time: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TaskSection {
    pub queue_size: usize,
    pub size_mb: [f64; 2],
    pub density_cycles_per_bit: [f64; 2],
    pub output_ratio: f64,
    pub energy_density_j_per_cycle: f64,
    /// CA, HPA, LPA deadlines.
    pub delay_threshold_ms: [f64; 3],
    /// Generation probabilities of CA, HPA, LPA.
    pub mix: [f64; 3],
}

impl Default for ScenarioSection {
    fn default() -> Self {
        Self {
            vehicles: 5,
            coverage_m: 500.0,
            rsu_offset_m: 10.0,
            speed_range_kmh: [30.0, 80.0],
            speed_limit_kmh: 80.0,
            tti_ms: 1.0,
        }
    }
}

impl Default for RadioSection {
    fn default() -> Self {
        Self {
            uplink_bandwidth_mhz: 100.0,
            downlink_bandwidth_mhz: 100.0,
            uplink_channels: 4,
            downlink_channels: 4,
            tx_power_w: 0.5,
            noise_power_w: 1e-13,
            interference_w: 0.0,
            pathloss_exponent: 3.0,
            pathloss_ref_db: 47.0,
            pathloss_ref_distance_m: 1.0,
            fading: true,
        }
    }
}

impl Default for ComputeSection {
    fn default() -> Self {
        Self {
            vec_cpu_ghz: 10.0,
            vehicle_cpu_ghz: vec![1.0, 1.2, 1.4, 1.6, 1.8],
            hold_wait_ms: 20.0,
            energy_on_rounded_time: false,
        }
    }
}

impl Default for TaskSection {
    fn default() -> Self {
        Self {
            queue_size: 10,
            size_mb: [0.2, 1.0],
            density_cycles_per_bit: [20.0, 50.0],
            output_ratio: 0.1,
            energy_density_j_per_cycle: 1.25e-26,
            delay_threshold_ms: [10.0, 40.0, 100.0],
            mix: [0.2, 0.4, 0.4],
        }
    }
}

impl Default for EnvConfig {
    fn default() -> Self {
        Self {
            scenario: ScenarioSection::default(),
            radio: RadioSection::default(),
            compute: ComputeSection::default(),
            tasks: TaskSection::default(),
            reward: RewardParams::default(),
        }
    }
}

/// Validated cell parameters in SI units.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub vehicles: usize,
    pub segment_m: f64,
    pub rsu_offset_m: f64,
    pub speed_range_mps: [f64; 2],
    pub radio: RadioConfig,
    pub compute: ComputeConfig,
    pub thresholds: ThresholdModel,
    pub vehicle_cpu_hz: Vec<f64>,
    pub energy_on_rounded_time: bool,
    pub queue_size: usize,
    pub size_bits: [f64; 2],
    pub density: [f64; 2],
    pub output_ratio: f64,
    pub energy_density: f64,
    pub mix: [f64; 3],
    pub reward: RewardParams,
}

impl Scenario {
    pub fn n_uplink(&self) -> usize {
        self.radio.n_uplink_channels
    }

    pub fn n_downlink(&self) -> usize {
        self.radio.n_downlink_channels
    }

    pub fn action_dim(&self) -> usize {
        3 + self.n_uplink() + self.n_downlink()
    }

    /// Per-vehicle observation: speeds, positions and pending sizes of all
    /// vehicles, VEC residual, own last decision (hold, vec, share) and the
    /// free flags of every channel.
    pub fn observation_dim(&self) -> usize {
        3 * self.vehicles + 4 + self.n_uplink() + self.n_downlink()
    }

    pub fn task_type_weight(&self, ty: TaskType) -> f64 {
        match ty {
            TaskType::Ca => self.mix[0],
            TaskType::Hpa => self.mix[1],
            TaskType::Lpa => self.mix[2],
        }
    }
}

pub fn kmh_to_mps(kmh: f64) -> f64 {
    kmh / 3.6
}

fn ordered_range(name: &str, r: [f64; 2]) -> Result<(), ConfigError> {
    if !(r[0].is_finite() && r[1].is_finite() && r[0] > 0.0 && r[0] <= r[1]) {
        return Err(invalid(format!("{name} must be a positive range [lo, hi], got {r:?}")));
    }
    Ok(())
}

fn positive(name: &str, v: f64) -> Result<(), ConfigError> {
    if !(v.is_finite() && v > 0.0) {
        return Err(invalid(format!("{name} must be positive, got {v}")));
    }
    Ok(())
}

impl EnvConfig {
    pub fn from_toml_str(s: &str) -> Result<Self, ConfigError> {
        toml::from_str(s).map_err(|e| invalid(e.to_string()))
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    /// Stable hash of the configuration, hex encoded.
    pub fn fingerprint(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(&json))
    }

    pub fn scenario(&self) -> Result<Scenario, ConfigError> {
        let s = &self.scenario;
        let r = &self.radio;
        let c = &self.compute;
        let t = &self.tasks;

        if s.vehicles == 0 {
            return Err(invalid("at least one vehicle is required"));
        }
        positive("coverage_m", s.coverage_m)?;
        if !(s.rsu_offset_m >= 0.0) {
            return Err(invalid("rsu_offset_m must be non-negative"));
        }
        ordered_range("speed_range_kmh", s.speed_range_kmh)?;
        positive("speed_limit_kmh", s.speed_limit_kmh)?;
        positive("tti_ms", s.tti_ms)?;

        let offloading = t.mix[1] > 0.0 || t.mix[2] > 0.0;
        if offloading && (r.uplink_channels == 0 || r.downlink_channels == 0) {
            return Err(invalid(
                "offloadable tasks are enabled but there are no uplink or downlink channels",
            ));
        }
        positive("uplink_bandwidth_mhz", r.uplink_bandwidth_mhz)?;
        positive("downlink_bandwidth_mhz", r.downlink_bandwidth_mhz)?;
        positive("tx_power_w", r.tx_power_w)?;
        positive("noise_power_w", r.noise_power_w)?;
        positive("pathloss_ref_distance_m", r.pathloss_ref_distance_m)?;
        if !(r.interference_w >= 0.0) {
            return Err(invalid("interference_w must be non-negative"));
        }

        positive("vec_cpu_ghz", c.vec_cpu_ghz)?;
        if c.vehicle_cpu_ghz.is_empty() {
            return Err(invalid("vehicle_cpu_ghz must list at least one frequency"));
        }
        for f in &c.vehicle_cpu_ghz {
            positive("vehicle_cpu_ghz", *f)?;
        }
        positive("hold_wait_ms", c.hold_wait_ms)?;
        let hold_ttis = c.hold_wait_ms / s.tti_ms;
        if (hold_ttis - hold_ttis.round()).abs() > 1e-9 {
            return Err(invalid("hold_wait_ms must be a whole number of TTIs"));
        }

        if t.queue_size == 0 {
            return Err(invalid("queue_size must be positive"));
        }
        ordered_range("size_mb", t.size_mb)?;
        ordered_range("density_cycles_per_bit", t.density_cycles_per_bit)?;
        if !(t.output_ratio > 0.0 && t.output_ratio <= 1.0) {
            return Err(invalid("output_ratio must lie in (0, 1]"));
        }
        positive("energy_density_j_per_cycle", t.energy_density_j_per_cycle)?;
        for thr in t.delay_threshold_ms {
            positive("delay_threshold_ms", thr)?;
        }
        if t.mix.iter().any(|p| !(*p >= 0.0)) || (t.mix.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(invalid("task mix must be non-negative and sum to 1"));
        }
        self.reward.validate()?;

        let tti_seconds = s.tti_ms * 1e-3;
        Ok(Scenario {
            vehicles: s.vehicles,
            segment_m: s.coverage_m,
            rsu_offset_m: s.rsu_offset_m,
            speed_range_mps: [kmh_to_mps(s.speed_range_kmh[0]), kmh_to_mps(s.speed_range_kmh[1])],
            radio: RadioConfig {
                uplink_bandwidth_hz: r.uplink_bandwidth_mhz * 1e6,
                downlink_bandwidth_hz: r.downlink_bandwidth_mhz * 1e6,
                n_uplink_channels: r.uplink_channels,
                n_downlink_channels: r.downlink_channels,
                tx_power_w: r.tx_power_w,
                noise_power_w: r.noise_power_w,
                interference_w: r.interference_w,
                pathloss_exponent: r.pathloss_exponent,
                pathloss_ref_db: r.pathloss_ref_db,
                pathloss_ref_distance_m: r.pathloss_ref_distance_m,
                fading_enabled: r.fading,
            },
            compute: ComputeConfig {
                vec_cpu_hz: c.vec_cpu_ghz * 1e9,
                tti_seconds,
                hold_wait_ttis: hold_ttis.round() as Tti,
            },
            thresholds: ThresholdModel::new(
                t.delay_threshold_ms[0] * 1e-3,
                t.delay_threshold_ms[1] * 1e-3,
                t.delay_threshold_ms[2] * 1e-3,
                kmh_to_mps(s.speed_limit_kmh),
            ),
            vehicle_cpu_hz: c.vehicle_cpu_ghz.iter().map(|g| g * 1e9).collect(),
            energy_on_rounded_time: c.energy_on_rounded_time,
            queue_size: t.queue_size,
            size_bits: [t.size_mb[0] * 1e6, t.size_mb[1] * 1e6],
            density: t.density_cycles_per_bit,
            output_ratio: t.output_ratio,
            energy_density: t.energy_density_j_per_cycle,
            mix: t.mix,
            reward: self.reward.clone(),
        })
    }
}
