use serde::{Deserialize, Serialize};

use super::nn::{Mlp, OutputActivation};
use super::{LearnerError, Maddpg, TrainerConfig};

/// Architecture plus flat parameters of one network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetSnapshot {
    pub sizes: Vec<usize>,
    pub output: OutputActivation,
    pub params: Vec<f64>,
}

impl NetSnapshot {
    pub fn of(net: &Mlp) -> Self {
        Self {
            sizes: net.sizes(),
            output: net.output,
            params: net.flat_params(),
        }
    }

    pub fn to_mlp(&self) -> Result<Mlp, LearnerError> {
        if self.sizes.len() < 2 {
            return Err(LearnerError::ShapeMismatch {
                expected: 2,
                got: self.sizes.len(),
            });
        }
        let mut net = Mlp::zeros(&self.sizes, self.output);
        if net.n_params() != self.params.len() {
            return Err(LearnerError::ShapeMismatch {
                expected: net.n_params(),
                got: self.params.len(),
            });
        }
        net.set_flat_params(&self.params);
        Ok(net)
    }
}

/// Online actors and critics of a trained model, tagged with the
/// fingerprint of the environment configuration they were trained on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub env_fingerprint: String,
    pub episode: usize,
    pub actors: Vec<NetSnapshot>,
    pub critics: Vec<NetSnapshot>,
}

impl Checkpoint {
    pub fn capture(model: &Maddpg, env_fingerprint: &str, episode: usize) -> Self {
        Self {
            env_fingerprint: env_fingerprint.to_owned(),
            episode,
            actors: model.agents.iter().map(|a| NetSnapshot::of(&a.actor)).collect(),
            critics: model.agents.iter().map(|a| NetSnapshot::of(&a.critic)).collect(),
        }
    }

    pub fn restore(&self, cfg: &TrainerConfig) -> Result<Maddpg, LearnerError> {
        let actors = self.actors.iter().map(NetSnapshot::to_mlp).collect::<Result<_, _>>()?;
        let critics = self.critics.iter().map(NetSnapshot::to_mlp).collect::<Result<_, _>>()?;
        Maddpg::from_networks(actors, critics, cfg)
    }
}
