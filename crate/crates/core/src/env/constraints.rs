//! Feasibility of a joint decision against the cell's constraints.
//!
//! * c1: a task is not held and offloaded at once.
//! * c2: granted plus requested VEC cpu shares stay within capacity.
//! * c3 / c4: every uplink / downlink channel has at most one user.
//! * c5: the task finishes within its speed-aware deadline.
//!
//! c1 to c4 depend only on the decisions and the current resource holdings.
//! c5 needs the delay of the decision and is filled in afterwards.

use super::{CellState, Decision};

/// Slack allowed on the cpu-share sum before it counts as over capacity.
const SHARE_TOLERANCE: f64 = 1e-9;

/// Violations attributed to one deciding vehicle, with the excess amount of
/// each violated condition (zero when satisfied).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct VehicleViolations {
    pub c1: bool,
    pub c2: bool,
    pub c3: bool,
    pub c4: bool,
    pub c1_excess: f64,
    pub c2_excess: f64,
    pub c3_excess: f64,
    pub c4_excess: f64,
    /// `None` until the delay of the decision has been evaluated, and for
    /// decisions that already break one of c1 to c4.
    pub c5: Option<bool>,
}

impl VehicleViolations {
    pub fn any_structural(&self) -> bool {
        self.c1 || self.c2 || self.c3 || self.c4
    }

    /// Semicolon-separated names of the violated constraints.
    pub fn labels(&self) -> String {
        let mut names = Vec::new();
        for (flag, name) in [
            (self.c1, "c1"),
            (self.c2, "c2"),
            (self.c3, "c3"),
            (self.c4, "c4"),
            (self.c5 == Some(false), "c5"),
        ] {
            if flag {
                names.push(name);
            }
        }
        names.join(";")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintReport {
    /// `None` for vehicles that made no decision this TTI.
    pub vehicles: Vec<Option<VehicleViolations>>,
    /// Granted plus requested VEC share.
    pub cpu_demand: f64,
    /// Users per uplink channel, current holder included.
    pub uplink_load: Vec<u32>,
    pub downlink_load: Vec<u32>,
}

impl ConstraintReport {
    pub fn share_ok(&self) -> bool {
        self.cpu_demand <= 1.0 + SHARE_TOLERANCE
    }

    pub fn channels_ok(&self) -> bool {
        self.uplink_load.iter().chain(&self.downlink_load).all(|l| *l <= 1)
    }
}

/// Checks c1 to c4 for every deciding vehicle.
///
/// Out-of-range channel indices are a caller bug.
pub fn check_constraints(state: &CellState, decisions: &[Option<Decision>]) -> ConstraintReport {
    assert_eq!(decisions.len(), state.vehicles.len(), "one decision slot per vehicle");

    let mut uplink_load: Vec<u32> = state.uplink_owner.iter().map(|o| u32::from(o.is_some())).collect();
    let mut downlink_load: Vec<u32> =
        state.downlink_owner.iter().map(|o| u32::from(o.is_some())).collect();
    let mut cpu_demand = 1.0 - state.vec_residual_cpu;

    for d in decisions.iter().flatten().filter(|d| d.claims_resources()) {
        cpu_demand += d.cpu_share;
        for &n in &d.uplink {
            uplink_load[n] += 1;
        }
        for &n in &d.downlink {
            downlink_load[n] += 1;
        }
    }
    let share_over = cpu_demand > 1.0 + SHARE_TOLERANCE;

    let vehicles = decisions
        .iter()
        .map(|slot| {
            let d = slot.as_ref()?;
            let mut v = VehicleViolations::default();
            if d.hold && d.offload {
                v.c1 = true;
                v.c1_excess = 1.0;
            }
            if d.claims_resources() {
                if share_over && d.cpu_share > 0.0 {
                    v.c2 = true;
                    v.c2_excess = cpu_demand - 1.0;
                }
                let up: u32 = d.uplink.iter().map(|&n| uplink_load[n].saturating_sub(1)).sum();
                let down: u32 = d.downlink.iter().map(|&n| downlink_load[n].saturating_sub(1)).sum();
                v.c3 = up > 0;
                v.c3_excess = f64::from(up);
                v.c4 = down > 0;
                v.c4_excess = f64::from(down);
            }
            Some(v)
        })
        .collect();

    ConstraintReport {
        vehicles,
        cpu_demand,
        uplink_load,
        downlink_load,
    }
}
