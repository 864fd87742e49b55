use serde::{Deserialize, Serialize};

use super::VehicleViolations;
use crate::config::ConfigError;

/// Coefficients of the three-tier reward.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RewardParams {
    pub l1: f64,
    pub l2: f64,
    pub l3: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma3: f64,
    pub gamma4: f64,
    pub gamma5: f64,
    /// Energy scale of the satisfied-tier exponent.
    pub energy_ref_j: f64,
    /// Use `exp(D - deadline)` and `exp(E)` as printed instead of the
    /// normalized, objective-aligned exponents.
    pub literal_sign_mode: bool,
}

impl Default for RewardParams {
    fn default() -> Self {
        Self {
            l1: -0.4,
            l2: -0.2,
            l3: 0.5,
            gamma1: 0.8,
            gamma2: 0.5,
            gamma3: 0.5,
            gamma4: 0.5,
            gamma5: 0.5,
            energy_ref_j: 0.25,
            literal_sign_mode: false,
        }
    }
}

impl RewardParams {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let all = [
            self.l1,
            self.l2,
            self.l3,
            self.gamma1,
            self.gamma2,
            self.gamma3,
            self.gamma4,
            self.gamma5,
        ];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(ConfigError("reward coefficients must be finite".into()));
        }
        if !(self.energy_ref_j > 0.0) {
            return Err(ConfigError("reward energy_ref_j must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RewardTier {
    /// One of c1 to c4 is broken.
    Infeasible,
    /// c1 to c4 hold but the deadline is missed or, for a held task, still open.
    DeadlineMissed,
    /// Every constraint holds.
    Satisfied,
}

impl RewardTier {
    pub fn level(self) -> u8 {
        match self {
            RewardTier::Infeasible => 1,
            RewardTier::DeadlineMissed => 2,
            RewardTier::Satisfied => 3,
        }
    }
}

/// Delay and energy of an evaluated decision. `delay_s` is infinite when
/// the decision cannot run at all (no channel or no cpu share).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecisionOutcome {
    pub delay_s: f64,
    pub threshold_s: f64,
    pub energy_j: f64,
    /// The task is held, so whether it meets its deadline is not known yet.
    pub pending: bool,
}

/// Penalty term: `Gamma_i * excess_i * Lambda_i`, with `Lambda = -1` on a
/// violated condition and 0 otherwise.
fn penalty(gamma: f64, violated: bool, excess: f64) -> f64 {
    let lambda = if violated { -1.0 } else { 0.0 };
    gamma * excess * lambda
}

pub fn infeasible_reward(v: &VehicleViolations, p: &RewardParams) -> f64 {
    p.l1 + penalty(p.gamma1, v.c1, v.c1_excess)
        + penalty(p.gamma2, v.c2, v.c2_excess)
        + penalty(p.gamma3, v.c3, v.c3_excess)
        + penalty(p.gamma4, v.c4, v.c4_excess)
}

pub fn deadline_missed_reward(delay_s: f64, threshold_s: f64, p: &RewardParams) -> f64 {
    if !delay_s.is_finite() {
        // limit of both exponent forms' useful range: no achievable delay
        return p.l2;
    }
    let exponent = if p.literal_sign_mode {
        delay_s - threshold_s
    } else {
        // positive slack (a hold still within its deadline) earns no more
        // than a zero-slack miss, keeping this tier below the satisfied one
        ((threshold_s - delay_s) / threshold_s).min(0.0)
    };
    p.l2 + exponent.exp()
}

pub fn satisfied_reward(energy_j: f64, p: &RewardParams) -> f64 {
    let exponent = if p.literal_sign_mode {
        energy_j
    } else {
        -energy_j / p.energy_ref_j
    };
    p.l3 + p.gamma5 * exponent.exp()
}

/// Reward of one deciding vehicle. Exactly one tier applies.
///
/// `outcome` is ignored for structurally infeasible decisions and must be
/// present otherwise.
///
/// # Panics
/// If c1 to c4 hold but `outcome` is `None`.
pub fn reward(v: &VehicleViolations, outcome: Option<DecisionOutcome>, p: &RewardParams) -> (RewardTier, f64) {
    if v.any_structural() {
        return (RewardTier::Infeasible, infeasible_reward(v, p));
    }
    let o = outcome.expect("feasible decisions carry an outcome");
    if !o.pending && o.delay_s <= o.threshold_s {
        (RewardTier::Satisfied, satisfied_reward(o.energy_j, p))
    } else {
        (RewardTier::DeadlineMissed, deadline_missed_reward(o.delay_s, o.threshold_s, p))
    }
}
