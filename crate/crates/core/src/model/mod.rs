//! Physical model of one vehicular edge computing cell.
//!
//! Everything here is a pure function of its inputs and uses SI units
//! (bits, Hz, seconds, Joules, m/s, Watts). Unit conversion from the
//! human-facing configuration happens in [`crate::config`].

mod channel;
mod cost;
mod threshold;

pub use channel::{aggregate_rate, channel_capacity, pathloss_gain, Direction};
pub use cost::{
    cell_energy_j, ceil_ttis, local_delay_ttis, local_energy_j, offload_delay_ttis,
    offload_energy_j, offload_energy_rounded_j, total_delay_ttis, ComponentDelays, Placement,
    VehicleEnergy,
};
pub use threshold::{delay_threshold, ThresholdModel};

use serde::{Deserialize, Serialize};
use std::fmt;

/// Simulation time in transport time intervals.
pub type Tti = u64;

/// Application class of a task.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum TaskType {
    /// Critical application. Always executed on the vehicle.
    Ca,
    /// High-priority application with a speed-dependent deadline.
    Hpa,
    /// Low-priority application. The only class that pays a download.
    Lpa,
}

impl TaskType {
    pub const ALL: [TaskType; 3] = [TaskType::Ca, TaskType::Hpa, TaskType::Lpa];

    pub fn is_offloadable(self) -> bool {
        !matches!(self, TaskType::Ca)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TaskType::Ca => "CA",
            TaskType::Hpa => "HPA",
            TaskType::Lpa => "LPA",
        }
    }
}

impl fmt::Display for TaskType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One computing job owned by a vehicle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Task {
    pub id: u64,
    pub task_type: TaskType,
    pub size_bits: f64,
    pub density_cycles_per_bit: f64,
    /// Download size over upload size. Only LPA tasks use it.
    pub output_ratio: f64,
    pub generated_at: Tti,
    pub owner: usize,
    pub energy_density_j_per_cycle: f64,
}

impl Task {
    pub fn cycles(&self) -> f64 {
        self.density_cycles_per_bit * self.size_bits
    }
}

/// Radio parameters of the cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadioConfig {
    pub uplink_bandwidth_hz: f64,
    pub downlink_bandwidth_hz: f64,
    pub n_uplink_channels: usize,
    pub n_downlink_channels: usize,
    pub tx_power_w: f64,
    pub noise_power_w: f64,
    /// Co-channel interference. Zero in a single cell with exclusive channels.
    pub interference_w: f64,
    pub pathloss_exponent: f64,
    pub pathloss_ref_db: f64,
    pub pathloss_ref_distance_m: f64,
    pub fading_enabled: bool,
}

impl RadioConfig {
    pub fn channel_bandwidth_hz(&self, direction: Direction) -> f64 {
        match direction {
            Direction::Up => self.uplink_bandwidth_hz / self.n_uplink_channels as f64,
            Direction::Down => self.downlink_bandwidth_hz / self.n_downlink_channels as f64,
        }
    }

    pub fn n_channels(&self, direction: Direction) -> usize {
        match direction {
            Direction::Up => self.n_uplink_channels,
            Direction::Down => self.n_downlink_channels,
        }
    }
}

/// Compute capabilities and timing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComputeConfig {
    pub vec_cpu_hz: f64,
    pub tti_seconds: f64,
    pub hold_wait_ttis: Tti,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("required transmission rate is zero")]
    ZeroRate,
    #[error("allocated VEC cpu share is zero")]
    ZeroShare,
}
