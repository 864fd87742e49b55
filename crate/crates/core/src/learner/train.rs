use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;
use thiserror::Error;

use super::replay::{ReplayBuffer, Transition};
use super::{LearnerError, Maddpg, TrainerConfig};
use crate::config::{ConfigError, EnvConfig};
use crate::env::{ActionVector, Environment, RewardTier};

#[derive(Debug, Error)]
pub enum TrainError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("training diverged in episode {episode}: {source}")]
    Diverged { episode: usize, source: LearnerError },
}

/// Per-episode training statistics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpisodeLog {
    pub episode: usize,
    /// Mean reward over the episode's decision events (0 if none).
    pub mean_reward: f64,
    pub decisions: usize,
    pub satisfied: usize,
    pub energy_j: f64,
    pub noise: f64,
    pub updates: usize,
    pub critic_loss: Option<f64>,
    pub actor_grad_norm: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct TrainingRun {
    pub model: Maddpg,
    pub episodes: Vec<EpisodeLog>,
    /// Trailing mean of `mean_reward` over `reward_window` episodes.
    pub moving_average: Vec<f64>,
    pub env_fingerprint: String,
}

/// Independent random streams of one training run.
const STREAM_INIT: u64 = 1;
const STREAM_NOISE: u64 = 2;
const STREAM_SAMPLE: u64 = 3;
const STREAM_EPISODES: u64 = 4;

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Exploration std for `episode` (0-based): linear from `noise_start` to
/// `noise_end` over the first `noise_decay_fraction` of the run, then flat.
pub fn noise_scale(cfg: &TrainerConfig, episode: usize) -> f64 {
    let span = cfg.noise_decay_fraction * cfg.episodes as f64;
    let t = if span > 0.0 {
        (episode as f64 / span).min(1.0)
    } else {
        1.0
    };
    cfg.noise_start + (cfg.noise_end - cfg.noise_start) * t
}

/// Trailing mean over at most `window` values ending at each index.
pub fn moving_average(values: &[f64], window: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut sum = 0.0;
    for (i, v) in values.iter().enumerate() {
        sum += v;
        if i >= window {
            sum -= values[i - window];
        }
        out.push(sum / (i + 1).min(window) as f64);
    }
    out
}

pub fn train(env_config: &EnvConfig, cfg: &TrainerConfig) -> Result<TrainingRun, TrainError> {
    train_with(env_config, cfg, |_| {})
}

/// Runs the full training loop, calling `on_episode` after every episode.
///
/// Every TTI in which at least one vehicle decides yields one joint
/// transition. Once the buffer holds a batch, every `update_interval`
/// transitions trigger one critic and one actor step per agent followed by
/// a soft target update.
pub fn train_with(
    env_config: &EnvConfig,
    cfg: &TrainerConfig,
    mut on_episode: impl FnMut(&EpisodeLog),
) -> Result<TrainingRun, TrainError> {
    cfg.validate()?;
    let scenario = env_config.scenario()?;
    let k_agents = scenario.vehicles;
    let act_dim = scenario.action_dim();
    let (n_up, n_down) = (scenario.n_uplink(), scenario.n_downlink());
    let mut init_rng = stream(cfg.seed, STREAM_INIT);
    let mut noise_rng = stream(cfg.seed, STREAM_NOISE);
    let mut sample_rng = stream(cfg.seed, STREAM_SAMPLE);
    let mut episode_rng = stream(cfg.seed, STREAM_EPISODES);

    let mut model = Maddpg::new(k_agents, scenario.observation_dim(), act_dim, cfg, &mut init_rng);
    let mut env = Environment::from_scenario(scenario, 0);
    let mut buffer = ReplayBuffer::new(cfg.buffer_capacity);
    let mut episodes = Vec::with_capacity(cfg.episodes);
    let mut since_update = 0usize;

    for episode in 0..cfg.episodes {
        env.reset(episode_rng.random());
        let sigma = noise_scale(cfg, episode);
        let normal = Normal::new(0.0, sigma).expect("validated non-negative std");
        let mut reward_sum = 0.0;
        let mut decisions = 0usize;
        let mut satisfied = 0usize;
        let mut energy_j = 0.0;
        let mut updates = 0usize;
        let mut loss_sum = 0.0;
        let mut norm_sum = 0.0;
        let diverged = |source| TrainError::Diverged { episode, source };

        for _ in 0..cfg.steps_per_episode {
            let now = env.state().now;
            let anyone = env.state().vehicles.iter().any(|v| v.can_decide(now));
            if !anyone {
                let idle = env.step_decisions(&vec![None; k_agents]);
                energy_j += idle.energy_j;
                continue;
            }
            let observations = env.observations();
            let mut joint_action = Vec::with_capacity(k_agents * act_dim);
            let mut actions = Vec::with_capacity(k_agents);
            for (k, obs) in observations.iter().enumerate() {
                let mut a = model.actor_forward(k, obs).map_err(diverged)?;
                for x in &mut a {
                    *x = (*x + normal.sample(&mut noise_rng)).clamp(0.0, 1.0);
                }
                joint_action.extend_from_slice(&a);
                actions.push(ActionVector::from_slice(&a, n_up, n_down));
            }
            let result = env.step(&actions);
            for (r, tier) in result.rewards.iter().zip(&result.tiers) {
                if let Some(t) = tier {
                    reward_sum += r;
                    decisions += 1;
                    satisfied += usize::from(*t == RewardTier::Satisfied);
                }
            }
            energy_j += result.energy_j;
            buffer.push(Transition {
                state: observations.concat(),
                action: joint_action,
                reward: result.rewards,
                next_state: env.observations().concat(),
            });
            since_update += 1;
            if buffer.len() >= cfg.batch_size && since_update >= cfg.update_interval {
                since_update = 0;
                for k in 0..k_agents {
                    let batch = buffer.sample(cfg.batch_size, &mut sample_rng).map_err(diverged)?;
                    loss_sum += model.critic_update(k, &batch).map_err(diverged)?;
                    norm_sum += model.actor_update(k, &batch).map_err(diverged)?;
                }
                model.soft_update_targets();
                updates += 1;
            }
        }

        let per_agent = (updates * k_agents) as f64;
        let log = EpisodeLog {
            episode,
            mean_reward: if decisions > 0 { reward_sum / decisions as f64 } else { 0.0 },
            decisions,
            satisfied,
            energy_j,
            noise: sigma,
            updates,
            critic_loss: (updates > 0).then(|| loss_sum / per_agent),
            actor_grad_norm: (updates > 0).then(|| norm_sum / per_agent),
        };
        on_episode(&log);
        episodes.push(log);
    }

    let rewards: Vec<f64> = episodes.iter().map(|e| e.mean_reward).collect();
    Ok(TrainingRun {
        model,
        moving_average: moving_average(&rewards, cfg.reward_window),
        episodes,
        env_fingerprint: env_config.fingerprint(),
    })
}
