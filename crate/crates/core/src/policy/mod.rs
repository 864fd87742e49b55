//! Decision rules: the four comparison baselines, a trained model, and an
//! exhaustive optimizer for small cells.

mod baselines;
mod oracle;

pub use baselines::{
    al_decisions, av_decisions, edg_decisions, greedy_candidates, rd_decisions,
    size_proportional_allocation,
};
pub use oracle::{
    brute_force_optimum, InstanceTooLarge, OracleConfig, OracleSolution, MAX_ORACLE_CHANNELS,
    MAX_ORACLE_VEHICLES,
};

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::env::{ActionVector, Decision, Environment};
use crate::learner::Maddpg;

/// Policy names as used in configs, the CLI and output paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolicyKind {
    /// All local execution.
    Al,
    /// All offloadable tasks to the VEC server.
    Av,
    /// Uniformly random local / VEC split.
    Rd,
    /// Per-step energy-and-delay greedy.
    Edg,
    /// Trained actors.
    Learned,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 5] = [
        PolicyKind::Al,
        PolicyKind::Av,
        PolicyKind::Rd,
        PolicyKind::Edg,
        PolicyKind::Learned,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PolicyKind::Al => "al",
            PolicyKind::Av => "av",
            PolicyKind::Rd => "rd",
            PolicyKind::Edg => "edg",
            PolicyKind::Learned => "learned",
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PolicyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PolicyKind::ALL
            .into_iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown policy `{s}` (expected al, av, rd, edg or learned)"))
    }
}

/// A decision rule over the whole cell.
#[derive(Debug, Clone)]
pub enum Policy {
    AllLocal,
    AllVec,
    Random(ChaCha8Rng),
    Greedy,
    Learned(Box<Maddpg>),
}

impl Policy {
    /// Baseline of the given kind; `seed` only matters for the random one.
    ///
    /// # Panics
    /// For [`PolicyKind::Learned`], which needs a model.
    pub fn baseline(kind: PolicyKind, seed: u64) -> Self {
        match kind {
            PolicyKind::Al => Policy::AllLocal,
            PolicyKind::Av => Policy::AllVec,
            PolicyKind::Rd => Policy::Random(ChaCha8Rng::seed_from_u64(seed)),
            PolicyKind::Edg => Policy::Greedy,
            PolicyKind::Learned => panic!("the learned policy needs a trained model"),
        }
    }

    pub fn kind(&self) -> PolicyKind {
        match self {
            Policy::AllLocal => PolicyKind::Al,
            Policy::AllVec => PolicyKind::Av,
            Policy::Random(_) => PolicyKind::Rd,
            Policy::Greedy => PolicyKind::Edg,
            Policy::Learned(_) => PolicyKind::Learned,
        }
    }

    /// One slot per vehicle; `None` for vehicles that cannot decide.
    pub fn decide(&mut self, env: &Environment) -> Vec<Option<Decision>> {
        let state = env.state();
        match self {
            Policy::AllLocal => al_decisions(state),
            Policy::AllVec => av_decisions(state),
            Policy::Random(rng) => rd_decisions(state, rng),
            Policy::Greedy => edg_decisions(env.scenario(), state),
            Policy::Learned(model) => {
                let sc = env.scenario();
                (0..env.n_vehicles())
                    .map(|k| {
                        state.vehicles[k].can_decide(state.now).then(|| {
                            let raw = model
                                .actor_forward(k, &env.observation(k))
                                .expect("model matches the scenario");
                            ActionVector::from_slice(&raw, sc.n_uplink(), sc.n_downlink()).decode()
                        })
                    })
                    .collect()
            }
        }
    }
}
