//! Delay and energy of executing a task on the VEC server or on the vehicle.

use serde::{Deserialize, Serialize};

use super::{ComputeConfig, ModelError, Task, TaskType, Tti};

/// Relative tolerance under which a duration is treated as a whole number
/// of TTIs. Keeps e.g. `1e6 / 1e8 / 1e-3` from rounding up to 11.
const WHOLE_TTI_TOLERANCE: f64 = 1e-9;

/// Where a task goes at a decision point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Placement {
    Hold,
    Vec,
    Local,
}

impl Placement {
    pub fn as_str(self) -> &'static str {
        match self {
            Placement::Hold => "hold",
            Placement::Vec => "vec",
            Placement::Local => "local",
        }
    }
}

/// Rounds a duration up to whole TTIs.
pub fn ceil_ttis(seconds: f64, tti_seconds: f64) -> Tti {
    let x = seconds / tti_seconds;
    let nearest = x.round();
    if (x - nearest).abs() <= WHOLE_TTI_TOLERANCE * nearest.max(1.0) {
        nearest as Tti
    } else {
        x.ceil() as Tti
    }
}

fn upload_seconds(task: &Task, uplink_bps: f64) -> Result<f64, ModelError> {
    if uplink_bps <= 0.0 {
        return Err(ModelError::ZeroRate);
    }
    Ok(task.size_bits / uplink_bps)
}

fn download_seconds(task: &Task, downlink_bps: f64) -> Result<f64, ModelError> {
    match task.task_type {
        TaskType::Lpa => {
            if downlink_bps <= 0.0 {
                return Err(ModelError::ZeroRate);
            }
            Ok(task.output_ratio * task.size_bits / downlink_bps)
        }
        // HPA results are small enough that the download is dropped.
        TaskType::Ca | TaskType::Hpa => Ok(0.0),
    }
}

/// Upload + VEC execution (+ download for LPA), each term rounded up to whole TTIs.
pub fn offload_delay_ttis(
    task: &Task,
    uplink_bps: f64,
    downlink_bps: f64,
    cpu_share: f64,
    cfg: &ComputeConfig,
) -> Result<Tti, ModelError> {
    if cpu_share <= 0.0 {
        return Err(ModelError::ZeroShare);
    }
    let up = upload_seconds(task, uplink_bps)?;
    let down = download_seconds(task, downlink_bps)?;
    let exec = task.cycles() / (cpu_share * cfg.vec_cpu_hz);
    let mut ttis = ceil_ttis(up, cfg.tti_seconds) + ceil_ttis(exec, cfg.tti_seconds);
    if task.task_type == TaskType::Lpa {
        ttis += ceil_ttis(down, cfg.tti_seconds);
    }
    Ok(ttis)
}

pub fn local_delay_ttis(task: &Task, vehicle_cpu_hz: f64, cfg: &ComputeConfig) -> Tti {
    ceil_ttis(task.cycles() / vehicle_cpu_hz, cfg.tti_seconds)
}

/// Execution times of each placement, in TTIs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ComponentDelays {
    pub hold_wait: Tti,
    pub offload: Tti,
    pub local: Tti,
}

/// Delay from task generation to completion (or to the end of a hold).
pub fn total_delay_ttis(task: &Task, now: Tti, placement: Placement, delays: ComponentDelays) -> Tti {
    debug_assert!(now >= task.generated_at);
    let age = now - task.generated_at;
    age + match placement {
        Placement::Hold => delays.hold_wait,
        Placement::Vec => delays.offload,
        Placement::Local => delays.local,
    }
}

/// Transmit energy of offloading, using un-rounded air time.
pub fn offload_energy_j(
    task: &Task,
    uplink_bps: f64,
    downlink_bps: f64,
    tx_power_w: f64,
) -> Result<f64, ModelError> {
    let air = upload_seconds(task, uplink_bps)? + download_seconds(task, downlink_bps)?;
    Ok(tx_power_w * air)
}

/// Transmit energy charged on whole-TTI air time instead.
pub fn offload_energy_rounded_j(
    task: &Task,
    uplink_bps: f64,
    downlink_bps: f64,
    tx_power_w: f64,
    cfg: &ComputeConfig,
) -> Result<f64, ModelError> {
    let up = ceil_ttis(upload_seconds(task, uplink_bps)?, cfg.tti_seconds);
    let down = match task.task_type {
        TaskType::Lpa => ceil_ttis(download_seconds(task, downlink_bps)?, cfg.tti_seconds),
        _ => 0,
    };
    Ok(tx_power_w * (up + down) as f64 * cfg.tti_seconds)
}

/// `xi * kappa * c * f^2`.
pub fn local_energy_j(task: &Task, vehicle_cpu_hz: f64) -> f64 {
    task.energy_density_j_per_cycle * task.cycles() * vehicle_cpu_hz * vehicle_cpu_hz
}

/// Per-vehicle indicator pair and the two candidate energies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VehicleEnergy {
    pub hold: bool,
    pub offload: bool,
    pub offload_energy_j: f64,
    pub local_energy_j: f64,
}

/// Energy spent by all vehicles of the cell in one step.
pub fn cell_energy_j(vehicles: &[VehicleEnergy]) -> f64 {
    vehicles
        .iter()
        // (1 - hold) * [vec * ER + (1 - vec) * EL], written as branches so an
        // unusable (infinite) candidate energy never meets a zero indicator.
        .map(|v| match (v.hold, v.offload) {
            (true, _) => 0.0,
            (false, true) => v.offload_energy_j,
            (false, false) => v.local_energy_j,
        })
        .sum()
}
