//! Randomized dominance check of the baselines against the exhaustive optimizer.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{EnvConfig, Scenario};
use crate::env::{assess, CellState, Decision, Environment, Holding};
use crate::model::Placement;
use crate::policy::{
    al_decisions, av_decisions, brute_force_optimum, edg_decisions, rd_decisions, OracleConfig,
};

/// A random cell small enough for the optimizer: 1 to 3 vehicles, 1 or 2
/// channels per direction, a residual VEC share on the oracle grid and, for
/// multi-vehicle cells, sometimes one vehicle busy holding resources.
pub fn small_instance(seed: u64, vehicles: usize) -> (Scenario, CellState) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cfg = EnvConfig::default();
    cfg.scenario.vehicles = vehicles;
    cfg.radio.uplink_channels = rng.random_range(1..=2);
    cfg.radio.downlink_channels = rng.random_range(1..=2);
    let scenario = cfg.scenario().expect("default-derived config is valid");
    let mut env = Environment::from_scenario(scenario.clone(), rng.random());
    let mut state = env.reset(rng.random()).clone();
    let residual = [1.0, 0.75, 0.5][rng.random_range(0..3)];
    if vehicles > 1 && rng.random_bool(0.3) {
        let busy = &mut state.vehicles[0];
        busy.busy_until = state.now + 5;
        busy.holding = Some(Holding {
            placement: Placement::Vec,
            cpu_share: 1.0 - residual,
            uplink: vec![0],
            downlink: Vec::new(),
            started: state.now,
            until: state.now + 5,
            task: busy.pending_task.take(),
        });
        state.uplink_owner[0] = Some(0);
    }
    state.vec_residual_cpu = residual;
    (scenario, state)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct OracleCheckReport {
    pub instances: usize,
    /// Instances where some joint decision meets every deadline.
    pub feasible: usize,
    /// Baseline decisions that met every constraint and were compared.
    pub comparisons: usize,
    pub dominance_failures: Vec<String>,
    pub single_vehicle_checked: usize,
    pub greedy_mismatches: Vec<String>,
}

impl OracleCheckReport {
    pub fn passed(&self) -> bool {
        self.dominance_failures.is_empty() && self.greedy_mismatches.is_empty()
    }
}

/// Energy of a baseline's joint decision when every decider commits and
/// meets its deadline without holding; `None` otherwise.
fn feasible_energy(scenario: &Scenario, state: &CellState, decisions: &[Option<Decision>]) -> Option<f64> {
    let a = assess(scenario, state, decisions);
    let ok = a
        .outcomes
        .iter()
        .flatten()
        .all(|o| o.committed() && o.meets_deadline() && !o.decision.hold);
    ok.then(|| a.cell_energy_j())
}

/// Checks `instances` random small cells: the optimum is never beaten by a
/// feasible baseline decision, and on single-vehicle cells the greedy
/// baseline attains it.
pub fn oracle_check(instances: usize, seed: u64) -> OracleCheckReport {
    let cfg = OracleConfig::default();
    let mut report = OracleCheckReport {
        instances,
        ..Default::default()
    };
    let mut seeds = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..instances {
        let vehicles = 1 + i % 3;
        let instance_seed: u64 = seeds.random();
        let (scenario, state) = small_instance(instance_seed, vehicles);
        let optimum = brute_force_optimum(&scenario, &state, &cfg).expect("instances respect the size bounds");
        let Some(opt) = optimum else { continue };
        report.feasible += 1;
        let tolerance = 1e-12 * opt.energy_j.abs().max(1e-9);
        let mut rd_rng = ChaCha8Rng::seed_from_u64(instance_seed);
        let edg = edg_decisions(&scenario, &state);
        let candidates = [
            ("al", al_decisions(&state)),
            ("av", av_decisions(&state)),
            ("rd", rd_decisions(&state, &mut rd_rng)),
            ("edg", edg.clone()),
        ];
        for (name, decisions) in &candidates {
            if let Some(e) = feasible_energy(&scenario, &state, decisions) {
                report.comparisons += 1;
                if opt.energy_j > e + tolerance {
                    report.dominance_failures.push(format!(
                        "instance {i} (seed {instance_seed}): {name} {e:e} J beats optimum {:e} J",
                        opt.energy_j
                    ));
                }
            }
        }
        if vehicles == 1 {
            report.single_vehicle_checked += 1;
            let e = feasible_energy(&scenario, &state, &edg);
            let matches = e.is_some_and(|e| (e - opt.energy_j).abs() <= tolerance);
            if !matches {
                report.greedy_mismatches.push(format!(
                    "instance {i} (seed {instance_seed}): greedy {e:?} J vs optimum {:e} J",
                    opt.energy_j
                ));
            }
        }
    }
    report
}
