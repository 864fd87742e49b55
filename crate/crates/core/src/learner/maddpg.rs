//! Per-agent deterministic actors with centralized critics.
//!
//! Critic `k` scores the joint state (all observations concatenated) and the
//! joint action. Actor `k` sees only its own observation.

use ndarray::{concatenate, s, Array1, Array2, ArrayView2, Axis};
use rand::Rng;

use super::nn::{Adam, ForwardCache, Gradients, Mlp, OutputActivation};
use super::replay::Batch;
use super::{LearnerError, TrainerConfig};

#[derive(Debug, Clone)]
pub struct AgentNets {
    pub actor: Mlp,
    pub critic: Mlp,
    pub target_actor: Mlp,
    pub target_critic: Mlp,
    actor_opt: Adam,
    critic_opt: Adam,
}

#[derive(Debug, Clone)]
pub struct Maddpg {
    pub agents: Vec<AgentNets>,
    obs_dim: usize,
    act_dim: usize,
    pub gamma: f64,
    pub soft_update_rate: f64,
    pub grad_clip_norm: f64,
}

fn layer_sizes(input: usize, hidden: &[usize], output: usize) -> Vec<usize> {
    let mut sizes = vec![input];
    sizes.extend_from_slice(hidden);
    sizes.push(output);
    sizes
}

impl Maddpg {
    pub fn new<R: Rng + ?Sized>(
        n_agents: usize,
        obs_dim: usize,
        act_dim: usize,
        cfg: &TrainerConfig,
        rng: &mut R,
    ) -> Self {
        let critic_in = n_agents * (obs_dim + act_dim);
        let agents = (0..n_agents)
            .map(|_| {
                let actor = Mlp::new(
                    &layer_sizes(obs_dim, &cfg.hidden_layers, act_dim),
                    OutputActivation::Sigmoid,
                    rng,
                );
                let critic = Mlp::new(
                    &layer_sizes(critic_in, &cfg.hidden_layers, 1),
                    OutputActivation::Identity,
                    rng,
                );
                AgentNets {
                    actor_opt: Adam::new(&actor, cfg.actor_lr),
                    critic_opt: Adam::new(&critic, cfg.critic_lr),
                    target_actor: actor.clone(),
                    target_critic: critic.clone(),
                    actor,
                    critic,
                }
            })
            .collect();
        Self {
            agents,
            obs_dim,
            act_dim,
            gamma: cfg.gamma,
            soft_update_rate: cfg.soft_update_rate,
            grad_clip_norm: cfg.grad_clip_norm,
        }
    }

    /// Builds a model around given actors and critics (targets start as copies).
    pub fn from_networks(actors: Vec<Mlp>, critics: Vec<Mlp>, cfg: &TrainerConfig) -> Result<Self, LearnerError> {
        let n = actors.len();
        let first = actors.first().ok_or(LearnerError::ShapeMismatch { expected: 1, got: 0 })?;
        let (obs_dim, act_dim) = (first.input_dim(), first.output_dim());
        if critics.len() != n {
            return Err(LearnerError::ShapeMismatch {
                expected: n,
                got: critics.len(),
            });
        }
        for c in &critics {
            if c.input_dim() != n * (obs_dim + act_dim) || c.output_dim() != 1 {
                return Err(LearnerError::ShapeMismatch {
                    expected: n * (obs_dim + act_dim),
                    got: c.input_dim(),
                });
            }
        }
        let agents = actors
            .into_iter()
            .zip(critics)
            .map(|(actor, critic)| AgentNets {
                actor_opt: Adam::new(&actor, cfg.actor_lr),
                critic_opt: Adam::new(&critic, cfg.critic_lr),
                target_actor: actor.clone(),
                target_critic: critic.clone(),
                actor,
                critic,
            })
            .collect();
        Ok(Self {
            agents,
            obs_dim,
            act_dim,
            gamma: cfg.gamma,
            soft_update_rate: cfg.soft_update_rate,
            grad_clip_norm: cfg.grad_clip_norm,
        })
    }

    pub fn n_agents(&self) -> usize {
        self.agents.len()
    }

    pub fn obs_dim(&self) -> usize {
        self.obs_dim
    }

    pub fn act_dim(&self) -> usize {
        self.act_dim
    }

    /// Deterministic action of agent `k`; exploration noise is the caller's job.
    pub fn actor_forward(&self, k: usize, observation: &[f64]) -> Result<Vec<f64>, LearnerError> {
        self.agents[k].actor.forward_one(observation)
    }

    pub fn critic_forward(&self, k: usize, joint_state: &[f64], joint_action: &[f64]) -> Result<f64, LearnerError> {
        let mut input = joint_state.to_vec();
        input.extend_from_slice(joint_action);
        Ok(self.agents[k].critic.forward_one(&input)?[0])
    }

    pub fn critic_forward_batch(
        &self,
        k: usize,
        states: ArrayView2<f64>,
        actions: ArrayView2<f64>,
    ) -> Result<Array1<f64>, LearnerError> {
        let input = joint_input(states, actions)?;
        Ok(self.agents[k].critic.forward(input.view())?.column(0).to_owned())
    }

    fn agent_block(&self, states: &ArrayView2<f64>, j: usize) -> Array2<f64> {
        states.slice(s![.., j * self.obs_dim..(j + 1) * self.obs_dim]).to_owned()
    }

    /// Temporal-difference targets `r_k + gamma * Q'_k(S', mu'_1(s'_1), ...)`,
    /// computed from the target networks only.
    pub fn td_targets(&self, k: usize, batch: &Batch) -> Result<Array1<f64>, LearnerError> {
        let next = batch.next_states.view();
        let next_actions: Vec<Array2<f64>> = self
            .agents
            .iter()
            .enumerate()
            .map(|(j, a)| a.target_actor.forward(self.agent_block(&next, j).view()))
            .collect::<Result<_, _>>()?;
        let views: Vec<ArrayView2<f64>> = next_actions.iter().map(|a| a.view()).collect();
        let joint_next_action = concatenate(Axis(1), &views).expect("same batch length");
        let input = joint_input(next, joint_next_action.view())?;
        let q_next = self.agents[k].target_critic.forward(input.view())?;
        Ok(&batch.rewards.column(k) + &(q_next.column(0).to_owned() * self.gamma))
    }

    /// Mean squared TD error and its parameter gradient for critic `k`.
    pub fn critic_loss_gradient(
        &self,
        k: usize,
        batch: &Batch,
        targets: &Array1<f64>,
    ) -> Result<(f64, Gradients), LearnerError> {
        let input = joint_input(batch.states.view(), batch.actions.view())?;
        let critic = &self.agents[k].critic;
        let cache = critic.forward_cached(input.view())?;
        let diff = &cache.output.column(0) - targets;
        let n = diff.len() as f64;
        let loss = diff.mapv(|d| d * d).sum() / n;
        let grad_out = diff.mapv(|d| 2.0 * d / n).insert_axis(Axis(1));
        let (grads, _) = critic.backward(&cache, grad_out.view());
        Ok((loss, grads))
    }

    /// One Adam step on critic `k`. Returns the loss before the step.
    pub fn critic_update(&mut self, k: usize, batch: &Batch) -> Result<f64, LearnerError> {
        let targets = self.td_targets(k, batch)?;
        let (loss, mut grads) = self.critic_loss_gradient(k, batch, &targets)?;
        if !loss.is_finite() || !grads.is_finite() {
            return Err(LearnerError::Diverged(format!("critic {k} loss {loss}")));
        }
        grads.clip_global_norm(self.grad_clip_norm);
        let agent = &mut self.agents[k];
        agent.critic_opt.step(&mut agent.critic, &grads);
        Ok(loss)
    }

    /// Joint action of the batch with agent `k`'s block replaced by its
    /// current policy, plus the actor cache for backpropagation.
    fn policy_joint_action(&self, k: usize, batch: &Batch) -> Result<(ForwardCache, Array2<f64>), LearnerError> {
        let own = self.agent_block(&batch.states.view(), k);
        let cache = self.agents[k].actor.forward_cached(own.view())?;
        let mut actions = batch.actions.clone();
        actions
            .slice_mut(s![.., k * self.act_dim..(k + 1) * self.act_dim])
            .assign(&cache.output);
        Ok((cache, actions))
    }

    /// `(1/X) sum_j Q_k(S_j, a_1, ..., mu_k(s_k), ..., a_K)`.
    pub fn actor_objective(&self, k: usize, batch: &Batch) -> Result<f64, LearnerError> {
        let (_, actions) = self.policy_joint_action(k, batch)?;
        Ok(self.critic_forward_batch(k, batch.states.view(), actions.view())?.mean().unwrap_or(0.0))
    }

    /// Sampled deterministic policy gradient of [`Self::actor_objective`]
    /// with respect to actor `k`'s parameters (ascent direction).
    pub fn actor_gradient(&self, k: usize, batch: &Batch) -> Result<Gradients, LearnerError> {
        let (actor_cache, actions) = self.policy_joint_action(k, batch)?;
        let input = joint_input(batch.states.view(), actions.view())?;
        let critic = &self.agents[k].critic;
        let critic_cache = critic.forward_cached(input.view())?;
        let n = batch.len() as f64;
        let grad_q = Array2::from_elem((batch.len(), 1), 1.0 / n);
        let grad_input = critic.backward_input(&critic_cache, grad_q.view());
        let offset = self.n_agents() * self.obs_dim + k * self.act_dim;
        let grad_action = grad_input.slice(s![.., offset..offset + self.act_dim]);
        let (grads, _) = self.agents[k].actor.backward(&actor_cache, grad_action);
        Ok(grads)
    }

    /// One Adam ascent step on actor `k`. Returns the gradient norm before clipping.
    pub fn actor_update(&mut self, k: usize, batch: &Batch) -> Result<f64, LearnerError> {
        let mut grads = self.actor_gradient(k, batch)?;
        if !grads.is_finite() {
            return Err(LearnerError::Diverged(format!("actor {k} gradient")));
        }
        // ascent on the objective = descent on its negation
        grads.scale(-1.0);
        let norm = grads.clip_global_norm(self.grad_clip_norm);
        let agent = &mut self.agents[k];
        agent.actor_opt.step(&mut agent.actor, &grads);
        Ok(norm)
    }

    pub fn soft_update_targets(&mut self) {
        let rate = self.soft_update_rate;
        for a in &mut self.agents {
            a.target_actor
                .soft_update_from(&a.actor, rate)
                .expect("target and online share shapes");
            a.target_critic
                .soft_update_from(&a.critic, rate)
                .expect("target and online share shapes");
        }
    }
}

fn joint_input(states: ArrayView2<f64>, actions: ArrayView2<f64>) -> Result<Array2<f64>, LearnerError> {
    if states.nrows() != actions.nrows() {
        return Err(LearnerError::ShapeMismatch {
            expected: states.nrows(),
            got: actions.nrows(),
        });
    }
    Ok(concatenate(Axis(1), &[states, actions]).expect("row counts checked"))
}
