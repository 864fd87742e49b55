//! Exhaustive per-TTI energy minimization on small cells.

use thiserror::Error;

use crate::config::Scenario;
use crate::env::{assess, CellState, Decision};
use crate::model::TaskType;

pub const MAX_ORACLE_VEHICLES: usize = 3;
pub const MAX_ORACLE_CHANNELS: usize = 2;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("instance too large for exhaustive search: {vehicles} vehicles, {uplinks} uplinks, {downlinks} downlinks")]
pub struct InstanceTooLarge {
    pub vehicles: usize,
    pub uplinks: usize,
    pub downlinks: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleConfig {
    /// Candidate VEC cpu shares; zero entries are skipped.
    pub share_grid: Vec<f64>,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            share_grid: vec![0.0, 0.25, 0.5, 0.75, 1.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleSolution {
    pub decisions: Vec<Option<Decision>>,
    pub energy_j: f64,
}

struct Candidate {
    decision: Decision,
    share: f64,
    up_mask: u32,
    down_mask: u32,
    energy_j: f64,
}

fn subsets(items: &[usize]) -> Vec<Vec<usize>> {
    (1u32..(1 << items.len()))
        .map(|m| {
            items
                .iter()
                .enumerate()
                .filter(|(i, _)| m & (1 << i) != 0)
                .map(|(_, c)| *c)
                .collect()
        })
        .collect()
}

fn mask(channels: &[usize]) -> u32 {
    channels.iter().fold(0, |m, c| m | (1 << c))
}

/// Minimum-energy joint decision meeting every constraint, or `None` when
/// no combination lets every decider meet its deadline.
///
/// Enumerates, per decider, local execution and offloading with every grid share and every non-empty set of free
/// channels (downlinks for LPA tasks only).
pub fn brute_force_optimum(
    scenario: &Scenario,
    state: &CellState,
    cfg: &OracleConfig,
) -> Result<Option<OracleSolution>, InstanceTooLarge> {
    let (vehicles, uplinks, downlinks) = (
        state.vehicles.len(),
        state.uplink_owner.len(),
        state.downlink_owner.len(),
    );
    if vehicles > MAX_ORACLE_VEHICLES || uplinks > MAX_ORACLE_CHANNELS || downlinks > MAX_ORACLE_CHANNELS {
        return Err(InstanceTooLarge {
            vehicles,
            uplinks,
            downlinks,
        });
    }
    let up_sets = subsets(&state.free_uplinks());
    let down_sets = subsets(&state.free_downlinks());

    // A decider's delay and energy do not depend on the others' choices,
    // so infeasible options are dropped per vehicle before combining.
    let mut per_vehicle: Vec<(usize, Vec<Candidate>)> = Vec::new();
    for (k, v) in state.vehicles.iter().enumerate() {
        if !v.can_decide(state.now) {
            continue;
        }
        let task = v.pending_task.as_ref().expect("deciders have a task");
        // holding leaves the deadline open, so it never satisfies c5
        let mut raw = vec![Decision::local()];
        if task.task_type.is_offloadable() {
            let downs: Vec<Vec<usize>> = if task.task_type == TaskType::Lpa {
                down_sets.clone()
            } else {
                vec![Vec::new()]
            };
            for &share in cfg.share_grid.iter().filter(|s| **s > 0.0) {
                for up in &up_sets {
                    for down in &downs {
                        raw.push(Decision::offload(share, up.clone(), down.clone()));
                    }
                }
            }
        }
        let mut options = Vec::new();
        for d in raw {
            let mut slots = vec![None; vehicles];
            slots[k] = Some(d.clone());
            let o = assess(scenario, state, &slots).outcomes[k].clone().expect("decider");
            if o.committed() && o.meets_deadline() {
                options.push(Candidate {
                    share: if d.offload { d.cpu_share } else { 0.0 },
                    up_mask: if d.offload { mask(&d.uplink) } else { 0 },
                    down_mask: if d.offload { mask(&d.downlink) } else { 0 },
                    energy_j: o.energy_j,
                    decision: d,
                });
            }
        }
        per_vehicle.push((k, options));
    }

    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut chosen = Vec::with_capacity(per_vehicle.len());
    search(&per_vehicle, state.vec_residual_cpu, 0, 0, 0.0, 0.0, &mut chosen, &mut best);

    Ok(best.map(|(_, picks)| {
        let mut decisions = vec![None; vehicles];
        for ((k, options), i) in per_vehicle.iter().zip(&picks) {
            decisions[*k] = Some(options[*i].decision.clone());
        }
        let energy_j = assess(scenario, state, &decisions).cell_energy_j();
        OracleSolution { decisions, energy_j }
    }))
}

#[allow(clippy::too_many_arguments)]
fn search(
    per_vehicle: &[(usize, Vec<Candidate>)],
    residual: f64,
    up_used: u32,
    down_used: u32,
    share_used: f64,
    energy: f64,
    chosen: &mut Vec<usize>,
    best: &mut Option<(f64, Vec<usize>)>,
) {
    let depth = chosen.len();
    if depth == per_vehicle.len() {
        if best.as_ref().is_none_or(|(e, _)| energy < *e) {
            *best = Some((energy, chosen.clone()));
        }
        return;
    }
    for (i, o) in per_vehicle[depth].1.iter().enumerate() {
        if o.up_mask & up_used != 0 || o.down_mask & down_used != 0 {
            continue;
        }
        if share_used + o.share > residual + 1e-9 {
            continue;
        }
        chosen.push(i);
        search(
            per_vehicle,
            residual,
            up_used | o.up_mask,
            down_used | o.down_mask,
            share_used + o.share,
            energy + o.energy_j,
            chosen,
            best,
        );
        chosen.pop();
    }
}
