use rand::Rng;

use crate::config::Scenario;
use crate::env::{assess, channel_rates, CellState, Decision, VehicleOutcome, RESIDUAL_DUST};
use crate::model::{Direction, TaskType};

fn pending_type(state: &CellState, k: usize) -> Option<TaskType> {
    let v = &state.vehicles[k];
    v.can_decide(state.now)
        .then(|| v.pending_task.as_ref().map(|t| t.task_type))
        .flatten()
}

fn pending_bits(state: &CellState, k: usize) -> f64 {
    state.vehicles[k].pending_task.as_ref().map_or(0.0, |t| t.size_bits)
}

/// Deciders sorted by descending task size, ties by index.
fn by_size_desc(state: &CellState, mut ks: Vec<usize>) -> Vec<usize> {
    ks.sort_by(|a, b| pending_bits(state, *b).total_cmp(&pending_bits(state, *a)).then(a.cmp(b)));
    ks
}

/// Every decider runs its task locally.
pub fn al_decisions(state: &CellState) -> Vec<Option<Decision>> {
    (0..state.vehicles.len())
        .map(|k| pending_type(state, k).map(|_| Decision::local()))
        .collect()
}

/// Resource plan for a set of would-be offloaders.
///
/// In descending task-size order each offloader takes the lowest-indexed
/// free uplink (plus a free downlink for LPA tasks); one that finds none
/// holds instead, as do all of them when the server is fully booked. The
/// residual VEC cpu is then split among the served offloaders in
/// proportion to task size.
pub fn size_proportional_allocation(state: &CellState, offloaders: &[usize]) -> Vec<(usize, Decision)> {
    if state.vec_residual_cpu < RESIDUAL_DUST {
        return offloaders.iter().map(|&k| (k, Decision::hold())).collect();
    }
    let mut free_up = state.free_uplinks().into_iter();
    let mut free_down = state.free_downlinks().into_iter();
    let mut served = Vec::new();
    let mut out = Vec::new();
    for k in by_size_desc(state, offloaders.to_vec()) {
        let needs_down = pending_type(state, k) == Some(TaskType::Lpa);
        let up = free_up.next();
        let down = if needs_down { free_down.next() } else { None };
        match (up, down, needs_down) {
            (Some(u), d, false) => served.push((k, vec![u], d.into_iter().collect::<Vec<_>>())),
            (Some(u), Some(d), true) => served.push((k, vec![u], vec![d])),
            _ => out.push((k, Decision::hold())),
        }
    }
    let total: f64 = served.iter().map(|(k, _, _)| pending_bits(state, *k)).sum();
    for (k, up, down) in served {
        let share = state.vec_residual_cpu * pending_bits(state, k) / total;
        out.push((k, Decision::offload(share, up, down)));
    }
    out.sort_by_key(|(k, _)| *k);
    out
}

fn with_offloaders(state: &CellState, offloaders: &[usize]) -> Vec<Option<Decision>> {
    let mut decisions = al_decisions(state);
    for (k, d) in size_proportional_allocation(state, offloaders) {
        decisions[k] = Some(d);
    }
    decisions
}

/// CA tasks run locally; every HPA and LPA task is offloaded.
pub fn av_decisions(state: &CellState) -> Vec<Option<Decision>> {
    let offloaders: Vec<usize> = (0..state.vehicles.len())
        .filter(|&k| pending_type(state, k).is_some_and(TaskType::is_offloadable))
        .collect();
    with_offloaders(state, &offloaders)
}

/// CA tasks run locally; every other task is offloaded with probability
/// one half, drawn per task in vehicle order.
pub fn rd_decisions<R: Rng + ?Sized>(state: &CellState, rng: &mut R) -> Vec<Option<Decision>> {
    let offloaders: Vec<usize> = (0..state.vehicles.len())
        .filter(|&k| pending_type(state, k).is_some_and(TaskType::is_offloadable))
        .filter(|_| rng.random_bool(0.5))
        .collect();
    with_offloaders(state, &offloaders)
}

/// Offload candidates of the greedy rule: shares proportional to task size
/// over all offloadable deciders, and free channels dealt round-robin in
/// descending task-size order, each vehicle taking its strongest remaining
/// channel.
pub fn greedy_candidates(scenario: &Scenario, state: &CellState) -> Vec<Option<Decision>> {
    let n = state.vehicles.len();
    let offloadable: Vec<usize> = (0..n)
        .filter(|&k| pending_type(state, k).is_some_and(TaskType::is_offloadable))
        .collect();
    let order = by_size_desc(state, offloadable.clone());
    let total: f64 = offloadable.iter().map(|&k| pending_bits(state, k)).sum();

    let deal = |direction: Direction, pool: Vec<usize>, takers: &[usize]| -> Vec<Vec<usize>> {
        let mut picks = vec![Vec::new(); n];
        let mut pool = pool;
        let rates: Vec<Vec<f64>> = (0..n).map(|k| channel_rates(scenario, state, k, direction)).collect();
        while !pool.is_empty() && !takers.is_empty() {
            for &k in takers {
                let Some((pos, _)) = pool
                    .iter()
                    .enumerate()
                    .max_by(|a, b| rates[k][*a.1].total_cmp(&rates[k][*b.1]).then(b.1.cmp(a.1)))
                else {
                    break;
                };
                picks[k].push(pool.remove(pos));
            }
        }
        for p in &mut picks {
            p.sort_unstable();
        }
        picks
    };
    let up = deal(Direction::Up, state.free_uplinks(), &order);
    let lpa: Vec<usize> = order
        .iter()
        .copied()
        .filter(|&k| pending_type(state, k) == Some(TaskType::Lpa))
        .collect();
    let down = deal(Direction::Down, state.free_downlinks(), &lpa);

    (0..n)
        .map(|k| {
            offloadable.contains(&k).then(|| {
                let share = state.vec_residual_cpu * pending_bits(state, k) / total;
                Decision::offload(share, up[k].clone(), down[k].clone())
            })
        })
        .collect()
}

fn solo_outcome(scenario: &Scenario, state: &CellState, k: usize, d: Decision) -> VehicleOutcome {
    let mut slots = vec![None; state.vehicles.len()];
    slots[k] = Some(d);
    assess(scenario, state, &slots).outcomes[k]
        .clone()
        .expect("vehicle can decide")
}

/// Picks between local and the offload candidate: the cheaper of those
/// meeting the deadline, else the one meeting it, else the faster.
pub fn edg_decisions(scenario: &Scenario, state: &CellState) -> Vec<Option<Decision>> {
    let candidates = greedy_candidates(scenario, state);
    (0..state.vehicles.len())
        .map(|k| {
            pending_type(state, k)?;
            let Some(vec) = candidates[k].clone() else {
                return Some(Decision::local());
            };
            let local = solo_outcome(scenario, state, k, Decision::local());
            let offload = solo_outcome(scenario, state, k, vec.clone());
            let offload_ok = offload.committed() && offload.meets_deadline();
            let pick_vec = match (local.meets_deadline(), offload_ok) {
                (true, true) => offload.energy_j < local.energy_j,
                (false, true) => true,
                (true, false) => false,
                (false, false) => match (offload.committed(), offload.delay_ttis) {
                    (true, Some(dv)) => local.delay_ttis.is_none_or(|dl| dv < dl),
                    _ => false,
                },
            };
            Some(if pick_vec { vec } else { Decision::local() })
        })
        .collect()
}
