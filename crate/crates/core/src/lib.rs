//! Speed-aware computing-task offloading in a vehicular edge computing cell.
//!
//! * [`model`]: closed-form deadline, rate, delay and energy formulas.
//! * [`env`]: the per-TTI decision process with constraint checking and rewards.
//! * [`learner`]: multi-agent actor-critic training (centralized critics).
//! * [`policy`]: the AL / AV / RD / EDG baselines and an exhaustive optimizer.
//! * [`harness`]: seeded experiment sweeps, metrics files and comparisons.

pub mod config;
pub mod env;
pub mod harness;
pub mod learner;
pub mod model;
pub mod policy;

pub use config::{ConfigError, EnvConfig, Scenario};
