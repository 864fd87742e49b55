//! Multi-agent deep deterministic policy gradient with centralized critics.

mod checkpoint;
mod maddpg;
mod nn;
mod replay;
mod train;

pub use checkpoint::{Checkpoint, NetSnapshot};
pub use maddpg::{AgentNets, Maddpg};
pub use nn::{Adam, Dense, ForwardCache, Gradients, Mlp, OutputActivation};
pub use replay::{Batch, ReplayBuffer, Transition};
pub use train::{moving_average, noise_scale, train, train_with, EpisodeLog, TrainError, TrainingRun};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::ConfigError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LearnerError {
    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("replay buffer holds {have} transitions, batch needs {need}")]
    EmptyBuffer { have: usize, need: usize },
    #[error("non-finite value: {0}")]
    Diverged(String),
}

/// Training hyper-parameters. `Default` is the desk-scale preset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainerConfig {
    pub episodes: usize,
    /// TTIs simulated per episode.
    pub steps_per_episode: usize,
    pub gamma: f64,
    /// Target network tracking rate.
    pub soft_update_rate: f64,
    pub actor_lr: f64,
    pub critic_lr: f64,
    pub hidden_layers: Vec<usize>,
    pub batch_size: usize,
    pub buffer_capacity: usize,
    /// Gaussian exploration std at the first episode.
    pub noise_start: f64,
    pub noise_end: f64,
    /// Fraction of the episodes over which the noise decays linearly.
    pub noise_decay_fraction: f64,
    pub grad_clip_norm: f64,
    /// Stored transitions between two rounds of network updates.
    pub update_interval: usize,
    /// Window of the reward moving average, in episodes.
    pub reward_window: usize,
    pub seed: u64,
}

impl Default for TrainerConfig {
    fn default() -> Self {
        Self {
            episodes: 2000,
            steps_per_episode: 100,
            gamma: 0.95,
            soft_update_rate: 0.01,
            actor_lr: 1e-4,
            critic_lr: 1e-3,
            hidden_layers: vec![64, 64],
            batch_size: 64,
            buffer_capacity: 20_000,
            noise_start: 0.3,
            noise_end: 0.02,
            noise_decay_fraction: 0.5,
            grad_clip_norm: 1.0,
            update_interval: 4,
            reward_window: 50,
            seed: 0,
        }
    }
}

impl TrainerConfig {
    /// Full-size networks and episode count.
    pub fn full_scale() -> Self {
        Self {
            episodes: 140_000,
            hidden_layers: vec![512, 512, 512],
            batch_size: 128,
            buffer_capacity: 1_000_000,
            update_interval: 1,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let err = |m: &str| Err(ConfigError(format!("trainer: {m}")));
        if !(0.0..1.0).contains(&self.gamma) {
            return err("gamma must lie in [0, 1)");
        }
        if !(self.soft_update_rate > 0.0 && self.soft_update_rate <= 1.0) {
            return err("soft_update_rate must lie in (0, 1]");
        }
        if !(self.actor_lr > 0.0 && self.critic_lr > 0.0) {
            return err("learning rates must be positive");
        }
        if self.batch_size == 0 || self.buffer_capacity < self.batch_size {
            return err("need 0 < batch_size <= buffer_capacity");
        }
        if self.hidden_layers.contains(&0) {
            return err("hidden layer widths must be positive");
        }
        if self.update_interval == 0 || self.reward_window == 0 || self.steps_per_episode == 0 {
            return err("update_interval, reward_window and steps_per_episode must be positive");
        }
        if !(self.noise_start >= 0.0 && self.noise_end >= 0.0) {
            return err("noise scales must be non-negative");
        }
        if !(0.0..=1.0).contains(&self.noise_decay_fraction) {
            return err("noise_decay_fraction must lie in [0, 1]");
        }
        if !(self.grad_clip_norm > 0.0) {
            return err("grad_clip_norm must be positive");
        }
        Ok(())
    }
}
