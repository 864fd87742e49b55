//! The cell as a Markov decision process.
//!
//! Every TTI, each vehicle that is idle and has a pending task decides to
//! hold it, offload it to the VEC server, or run it locally. The joint
//! decision is checked against the cell constraints, feasible grants are
//! committed to the resource ledger, each decider is rewarded, and the
//! clock, mobility and channel gains advance by one TTI.

mod action;
mod constraints;
mod reward;

pub use action::{ActionVector, Decision, DECISION_THRESHOLD};
pub use constraints::{check_constraints, ConstraintReport, VehicleViolations};
pub use reward::{
    deadline_missed_reward, infeasible_reward, reward, satisfied_reward, DecisionOutcome,
    RewardParams, RewardTier,
};

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use serde::Serialize;

use crate::config::{ConfigError, EnvConfig, Scenario};
use crate::model::{
    aggregate_rate, cell_energy_j, channel_capacity, delay_threshold, local_delay_ttis,
    local_energy_j, offload_delay_ttis, offload_energy_j, offload_energy_rounded_j, pathloss_gain,
    total_delay_ttis, ComponentDelays, Direction, Placement, Task, TaskType, Tti, VehicleEnergy,
};

/// Residual VEC share below which the server counts as fully booked.
pub const RESIDUAL_DUST: f64 = 1e-9;

/// Resources and time committed to one decision.
#[derive(Debug, Clone, PartialEq)]
pub struct Holding {
    pub placement: Placement,
    pub cpu_share: f64,
    pub uplink: Vec<usize>,
    pub downlink: Vec<usize>,
    pub started: Tti,
    pub until: Tti,
    /// The task being executed. Held tasks stay in `pending_task`.
    pub task: Option<Task>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VehicleState {
    pub index: usize,
    pub speed_mps: f64,
    pub position_m: f64,
    pub cpu_hz: f64,
    pub pending_task: Option<Task>,
    pub queue: VecDeque<Task>,
    pub holding: Option<Holding>,
    pub busy_until: Tti,
}

impl VehicleState {
    pub fn can_decide(&self, now: Tti) -> bool {
        self.busy_until <= now && self.pending_task.is_some()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellState {
    pub now: Tti,
    pub vehicles: Vec<VehicleState>,
    /// `1 - sum of granted shares`.
    pub vec_residual_cpu: f64,
    pub uplink_owner: Vec<Option<usize>>,
    pub downlink_owner: Vec<Option<usize>>,
    /// Channel power gain per `[vehicle][channel]` for the current TTI.
    pub uplink_gain: Vec<Vec<f64>>,
    pub downlink_gain: Vec<Vec<f64>>,
    pub last_hold: Vec<bool>,
    pub last_offload: Vec<bool>,
    pub last_share: Vec<f64>,
}

impl CellState {
    pub fn deciding(&self) -> impl Iterator<Item = &VehicleState> + '_ {
        self.vehicles.iter().filter(move |v| v.can_decide(self.now))
    }

    pub fn granted_share(&self) -> f64 {
        self.vehicles
            .iter()
            .filter_map(|v| v.holding.as_ref())
            .map(|h| h.cpu_share)
            .sum()
    }

    pub fn free_uplinks(&self) -> Vec<usize> {
        free(&self.uplink_owner)
    }

    pub fn free_downlinks(&self) -> Vec<usize> {
        free(&self.downlink_owner)
    }

    fn refresh_residual(&mut self) {
        let residual = 1.0 - self.granted_share();
        // summing shares leaves rounding dust that must not count as capacity
        self.vec_residual_cpu = if residual < RESIDUAL_DUST { 0.0 } else { residual.min(1.0) };
    }
}

fn free(owner: &[Option<usize>]) -> Vec<usize> {
    owner
        .iter()
        .enumerate()
        .filter(|(_, o)| o.is_none())
        .map(|(n, _)| n)
        .collect()
}

/// Per-channel Shannon rates of vehicle `k` in the current TTI.
pub fn channel_rates(scenario: &Scenario, state: &CellState, k: usize, direction: Direction) -> Vec<f64> {
    let gains = match direction {
        Direction::Up => &state.uplink_gain[k],
        Direction::Down => &state.downlink_gain[k],
    };
    gains
        .iter()
        .map(|g| channel_capacity(*g, &scenario.radio, direction, scenario.radio.interference_w))
        .collect()
}

/// Applies the task-class rules to a raw decision: critical tasks always
/// run locally, and HPA tasks never claim downlink channels.
pub fn normalize_decision(task: &Task, decision: Decision) -> Decision {
    match task.task_type {
        TaskType::Ca => Decision::local(),
        TaskType::Hpa => Decision {
            downlink: Vec::new(),
            ..decision
        },
        TaskType::Lpa => decision,
    }
}

/// Evaluated decision of one vehicle.
#[derive(Debug, Clone, PartialEq)]
pub struct VehicleOutcome {
    pub decision: Decision,
    pub violations: VehicleViolations,
    /// Total delay from generation, `None` if the decision cannot execute.
    pub delay_ttis: Option<Tti>,
    pub threshold_s: f64,
    pub energy_j: f64,
    pub tier: RewardTier,
    pub reward: f64,
}

impl VehicleOutcome {
    /// Whether the decision enters the resource ledger.
    pub fn committed(&self) -> bool {
        !self.violations.any_structural() && self.delay_ttis.is_some()
    }

    pub fn meets_deadline(&self) -> bool {
        self.violations.c5 == Some(true)
    }
}

/// Evaluation of a joint decision against a state, without side effects.
#[derive(Debug, Clone, PartialEq)]
pub struct Assessment {
    pub report: ConstraintReport,
    pub outcomes: Vec<Option<VehicleOutcome>>,
}

impl Assessment {
    /// Energy spent by the committed decisions.
    pub fn cell_energy_j(&self) -> f64 {
        let entries: Vec<VehicleEnergy> = self
            .outcomes
            .iter()
            .flatten()
            .filter(|o| o.committed())
            .map(|o| VehicleEnergy {
                hold: o.decision.hold,
                offload: o.decision.offload,
                offload_energy_j: o.energy_j,
                local_energy_j: o.energy_j,
            })
            .collect();
        cell_energy_j(&entries)
    }

    /// True when every decider satisfies c1 to c5.
    pub fn all_satisfied(&self) -> bool {
        self.outcomes.iter().flatten().all(|o| o.tier == RewardTier::Satisfied)
    }
}

/// Checks, prices and rewards a joint decision.
///
/// Slots of vehicles that cannot decide are ignored. Decisions are
/// normalized with [`normalize_decision`] first.
pub fn assess(scenario: &Scenario, state: &CellState, decisions: &[Option<Decision>]) -> Assessment {
    assert_eq!(decisions.len(), state.vehicles.len(), "one decision slot per vehicle");
    let normalized: Vec<Option<Decision>> = state
        .vehicles
        .iter()
        .zip(decisions)
        .map(|(v, d)| {
            if !v.can_decide(state.now) {
                return None;
            }
            let task = v.pending_task.as_ref()?;
            d.clone().map(|d| normalize_decision(task, d))
        })
        .collect();

    let mut report = check_constraints(state, &normalized);
    let mut outcomes = Vec::with_capacity(normalized.len());
    for (k, slot) in normalized.into_iter().enumerate() {
        let Some(decision) = slot else {
            outcomes.push(None);
            continue;
        };
        let vehicle = &state.vehicles[k];
        let task = vehicle.pending_task.as_ref().expect("deciders have a task");
        let threshold_s = delay_threshold(task.task_type, vehicle.speed_mps, &scenario.thresholds);
        let mut violations = report.vehicles[k].clone().expect("decider has a report");

        let (delay_ttis, energy_j) = if violations.any_structural() {
            (None, 0.0)
        } else {
            price(scenario, state, k, task, &decision)
        };
        if !violations.any_structural() {
            let ok = delay_ttis.is_some_and(|d| d as f64 * scenario.compute.tti_seconds <= threshold_s);
            // a held task has not finished: its deadline stays open unless
            // the wait alone already overruns it
            violations.c5 = if decision.hold && ok { None } else { Some(ok) };
        }
        let outcome = (!violations.any_structural()).then(|| DecisionOutcome {
            delay_s: delay_ttis.map_or(f64::INFINITY, |d| d as f64 * scenario.compute.tti_seconds),
            threshold_s,
            energy_j,
            pending: violations.c5.is_none(),
        });
        let (tier, r) = reward(&violations, outcome, &scenario.reward);
        report.vehicles[k] = Some(violations.clone());
        outcomes.push(Some(VehicleOutcome {
            decision,
            violations,
            delay_ttis,
            threshold_s,
            energy_j,
            tier,
            reward: r,
        }));
    }
    Assessment { report, outcomes }
}

/// Total delay and energy of a structurally valid decision.
fn price(scenario: &Scenario, state: &CellState, k: usize, task: &Task, decision: &Decision) -> (Option<Tti>, f64) {
    let vehicle = &state.vehicles[k];
    let compute = &scenario.compute;
    let now = state.now;
    let local = local_delay_ttis(task, vehicle.cpu_hz, compute);
    match decision.placement().expect("c1 already checked") {
        Placement::Hold => {
            let delays = ComponentDelays {
                hold_wait: compute.hold_wait_ttis,
                offload: 0,
                local,
            };
            (Some(total_delay_ttis(task, now, Placement::Hold, delays)), 0.0)
        }
        Placement::Local => {
            let delays = ComponentDelays {
                hold_wait: compute.hold_wait_ttis,
                offload: 0,
                local,
            };
            (
                Some(total_delay_ttis(task, now, Placement::Local, delays)),
                local_energy_j(task, vehicle.cpu_hz),
            )
        }
        Placement::Vec => {
            let (up, down) = offload_rates(scenario, state, k, decision);
            let Ok(offload) = offload_delay_ttis(task, up, down, decision.cpu_share, compute) else {
                return (None, 0.0);
            };
            let energy = if scenario.energy_on_rounded_time {
                offload_energy_rounded_j(task, up, down, scenario.radio.tx_power_w, compute)
            } else {
                offload_energy_j(task, up, down, scenario.radio.tx_power_w)
            }
            .expect("rates already validated");
            let delays = ComponentDelays {
                hold_wait: compute.hold_wait_ttis,
                offload,
                local,
            };
            (Some(total_delay_ttis(task, now, Placement::Vec, delays)), energy)
        }
    }
}

/// Aggregate uplink and downlink rates of the channels a decision requests.
pub fn offload_rates(scenario: &Scenario, state: &CellState, k: usize, decision: &Decision) -> (f64, f64) {
    let flags = |n: usize, picks: &[usize]| -> Vec<bool> { (0..n).map(|i| picks.contains(&i)).collect() };
    let up_rates = channel_rates(scenario, state, k, Direction::Up);
    let down_rates = channel_rates(scenario, state, k, Direction::Down);
    (
        aggregate_rate(&flags(up_rates.len(), &decision.uplink), &up_rates),
        aggregate_rate(&flags(down_rates.len(), &decision.downlink), &down_rates),
    )
}

/// One decision event, as persisted by the experiment harness.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecisionRecord {
    pub tti: Tti,
    pub vehicle: usize,
    pub task_id: u64,
    pub task_type: TaskType,
    pub decision: &'static str,
    pub committed: bool,
    pub delay_ttis: Option<Tti>,
    pub energy_j: f64,
    pub reward: f64,
    pub tier: u8,
    pub violated: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepResult {
    /// Zero for vehicles that made no decision.
    pub rewards: Vec<f64>,
    pub tiers: Vec<Option<RewardTier>>,
    pub records: Vec<DecisionRecord>,
    pub report: ConstraintReport,
    pub energy_j: f64,
}

/// A cell plus its random stream. Single owner; distinct instances share nothing.
#[derive(Debug, Clone)]
pub struct Environment {
    scenario: Scenario,
    state: CellState,
    rng: ChaCha8Rng,
}

impl Environment {
    pub fn new(config: &EnvConfig, seed: u64) -> Result<Self, ConfigError> {
        Ok(Self::from_scenario(config.scenario()?, seed))
    }

    pub fn from_scenario(scenario: Scenario, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let state = initial_state(&scenario, &mut rng);
        Self { scenario, state, rng }
    }

    /// Restarts the cell from a fresh seeded draw.
    pub fn reset(&mut self, seed: u64) -> &CellState {
        self.rng = ChaCha8Rng::seed_from_u64(seed);
        self.state = initial_state(&self.scenario, &mut self.rng);
        &self.state
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn state(&self) -> &CellState {
        &self.state
    }

    /// Replaces the state, e.g. to set up a hand-built situation.
    pub fn set_state(&mut self, state: CellState) {
        self.state = state;
    }

    pub fn n_vehicles(&self) -> usize {
        self.scenario.vehicles
    }

    /// Observation of vehicle `k`, scaled to roughly unit range.
    pub fn observation(&self, k: usize) -> Vec<f64> {
        let sc = &self.scenario;
        let st = &self.state;
        let v_scale = sc.thresholds.v_max_mps.max(sc.speed_range_mps[1]);
        let mut obs = Vec::with_capacity(sc.observation_dim());
        obs.extend(st.vehicles.iter().map(|v| v.speed_mps / v_scale));
        obs.extend(st.vehicles.iter().map(|v| v.position_m / sc.segment_m));
        obs.extend(st.vehicles.iter().map(|v| {
            if v.can_decide(st.now) {
                v.pending_task.as_ref().map_or(0.0, |t| t.size_bits / sc.size_bits[1])
            } else {
                0.0
            }
        }));
        obs.push(st.vec_residual_cpu);
        obs.push(f64::from(u8::from(st.last_hold[k])));
        obs.push(f64::from(u8::from(st.last_offload[k])));
        obs.push(st.last_share[k]);
        obs.extend(st.uplink_owner.iter().map(|o| f64::from(u8::from(o.is_none()))));
        obs.extend(st.downlink_owner.iter().map(|o| f64::from(u8::from(o.is_none()))));
        obs
    }

    pub fn observations(&self) -> Vec<Vec<f64>> {
        (0..self.n_vehicles()).map(|k| self.observation(k)).collect()
    }

    /// Decodes one action per vehicle and steps. Actions of vehicles that
    /// cannot decide are ignored.
    pub fn step(&mut self, actions: &[ActionVector]) -> StepResult {
        assert_eq!(actions.len(), self.n_vehicles(), "one action per vehicle");
        let decisions: Vec<Option<Decision>> = actions.iter().map(|a| Some(a.decode())).collect();
        self.step_decisions(&decisions)
    }

    pub fn step_decisions(&mut self, decisions: &[Option<Decision>]) -> StepResult {
        let assessment = assess(&self.scenario, &self.state, decisions);
        let now = self.state.now;
        let mut rewards = vec![0.0; self.n_vehicles()];
        let mut tiers = vec![None; self.n_vehicles()];
        let mut records = Vec::new();

        for (k, outcome) in assessment.outcomes.iter().enumerate() {
            let Some(o) = outcome else { continue };
            rewards[k] = o.reward;
            tiers[k] = Some(o.tier);
            let task = self.state.vehicles[k].pending_task.clone().expect("deciders have a task");
            records.push(DecisionRecord {
                tti: now,
                vehicle: k,
                task_id: task.id,
                task_type: task.task_type,
                decision: o.decision.label(),
                committed: o.committed(),
                delay_ttis: o.delay_ttis,
                energy_j: if o.committed() { o.energy_j } else { 0.0 },
                reward: o.reward,
                tier: o.tier.level(),
                violated: o.violations.labels(),
            });
            self.state.last_hold[k] = o.decision.hold;
            self.state.last_offload[k] = o.decision.offload;
            self.state.last_share[k] = if o.decision.offload { o.decision.cpu_share } else { 0.0 };
            if !o.committed() {
                continue;
            }
            self.commit(k, &o.decision, o.delay_ttis.expect("committed decisions have a delay"), task);
        }
        self.state.refresh_residual();

        let energy_j = assessment.cell_energy_j();
        let report = assessment.report;
        self.advance();
        StepResult {
            rewards,
            tiers,
            records,
            report,
            energy_j,
        }
    }

    fn commit(&mut self, k: usize, decision: &Decision, total_delay: Tti, task: Task) {
        let now = self.state.now;
        let placement = decision.placement().expect("committed decisions are unambiguous");
        let age = now - task.generated_at;
        let duration = total_delay - age;
        let vehicle = &mut self.state.vehicles[k];
        vehicle.busy_until = now + duration;
        let executing = match placement {
            Placement::Hold => None,
            Placement::Vec | Placement::Local => vehicle.pending_task.take(),
        };
        if placement == Placement::Vec {
            for &n in &decision.uplink {
                debug_assert!(self.state.uplink_owner[n].is_none());
                self.state.uplink_owner[n] = Some(k);
            }
            for &n in &decision.downlink {
                debug_assert!(self.state.downlink_owner[n].is_none());
                self.state.downlink_owner[n] = Some(k);
            }
        }
        let vehicle = &mut self.state.vehicles[k];
        vehicle.holding = Some(Holding {
            placement,
            cpu_share: if placement == Placement::Vec { decision.cpu_share } else { 0.0 },
            uplink: if placement == Placement::Vec { decision.uplink.clone() } else { Vec::new() },
            downlink: if placement == Placement::Vec { decision.downlink.clone() } else { Vec::new() },
            started: now,
            until: now + duration,
            task: executing,
        });
    }

    /// Moves to the next TTI: mobility, resource release, next tasks, gains.
    fn advance(&mut self) {
        let sc = &self.scenario;
        let st = &mut self.state;
        st.now += 1;
        let now = st.now;
        for v in &mut st.vehicles {
            v.position_m += v.speed_mps * sc.compute.tti_seconds;
            if v.position_m > sc.segment_m {
                v.position_m = 0.0;
                v.speed_mps = sample_speed(sc, &mut self.rng);
            }
            let done = v.holding.as_ref().is_some_and(|h| h.until <= now);
            if done {
                let h = v.holding.take().expect("checked above");
                for n in h.uplink {
                    st.uplink_owner[n] = None;
                }
                for n in h.downlink {
                    st.downlink_owner[n] = None;
                }
                if h.placement != Placement::Hold {
                    v.pending_task = v.queue.pop_front().map(|mut t| {
                        t.generated_at = now;
                        t
                    });
                }
            }
        }
        st.refresh_residual();
        sample_gains(sc, st, &mut self.rng);
    }
}

fn uniform(rng: &mut ChaCha8Rng, range: [f64; 2]) -> f64 {
    range[0] + (range[1] - range[0]) * rng.random::<f64>()
}

fn sample_speed(sc: &Scenario, rng: &mut ChaCha8Rng) -> f64 {
    uniform(rng, sc.speed_range_mps)
}

fn sample_task_type(sc: &Scenario, rng: &mut ChaCha8Rng) -> TaskType {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for ty in TaskType::ALL {
        acc += sc.task_type_weight(ty);
        if u < acc {
            return ty;
        }
    }
    TaskType::Lpa
}

/// Draws one task; `generated_at` is set when it becomes pending.
pub fn sample_task(sc: &Scenario, rng: &mut ChaCha8Rng, id: u64, owner: usize) -> Task {
    let task_type = sample_task_type(sc, rng);
    let size_bits = uniform(rng, sc.size_bits);
    let density_cycles_per_bit = uniform(rng, sc.density);
    Task {
        id,
        task_type,
        size_bits,
        density_cycles_per_bit,
        output_ratio: sc.output_ratio,
        generated_at: 0,
        owner,
        energy_density_j_per_cycle: sc.energy_density,
    }
}

fn distance_to_rsu(sc: &Scenario, position_m: f64) -> f64 {
    let along = position_m - sc.segment_m / 2.0;
    (along * along + sc.rsu_offset_m * sc.rsu_offset_m).sqrt()
}

fn sample_gains(sc: &Scenario, st: &mut CellState, rng: &mut ChaCha8Rng) {
    for (k, v) in st.vehicles.iter().enumerate() {
        let base = pathloss_gain(distance_to_rsu(sc, v.position_m), &sc.radio);
        for g in st.uplink_gain[k].iter_mut().chain(st.downlink_gain[k].iter_mut()) {
            let fading: f64 = if sc.radio.fading_enabled { rng.sample(Exp1) } else { 1.0 };
            *g = base * fading;
        }
    }
}

fn initial_state(sc: &Scenario, rng: &mut ChaCha8Rng) -> CellState {
    let k_count = sc.vehicles;
    let vehicles = (0..k_count)
        .map(|k| {
            let position_m = sc.segment_m * rng.random::<f64>();
            let speed_mps = sample_speed(sc, rng);
            let cpu_hz = sc.vehicle_cpu_hz[rng.random_range(0..sc.vehicle_cpu_hz.len())];
            let mut queue: VecDeque<Task> = (0..sc.queue_size)
                .map(|i| sample_task(sc, rng, (k * sc.queue_size + i) as u64, k))
                .collect();
            let pending_task = queue.pop_front();
            VehicleState {
                index: k,
                speed_mps,
                position_m,
                cpu_hz,
                pending_task,
                queue,
                holding: None,
                busy_until: 0,
            }
        })
        .collect();
    let mut st = CellState {
        now: 0,
        vehicles,
        vec_residual_cpu: 1.0,
        uplink_owner: vec![None; sc.n_uplink()],
        downlink_owner: vec![None; sc.n_downlink()],
        uplink_gain: vec![vec![0.0; sc.n_uplink()]; k_count],
        downlink_gain: vec![vec![0.0; sc.n_downlink()]; k_count],
        last_hold: vec![false; k_count],
        last_offload: vec![false; k_count],
        last_share: vec![0.0; k_count],
    };
    sample_gains(sc, &mut st, rng);
    st
}
