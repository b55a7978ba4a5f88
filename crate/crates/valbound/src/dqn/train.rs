//! DQN training on MountainCar with double-sided target bounds and the four
//! clipping methods.
//!
//! Bounds come from the standard-RL delta with the batch-extrema
//! substitution: for each network `N` (online and target), `V_N(s) = max_a
//! N(s)[a]`, the residual `delta'_N = r + gamma V_N(s') - V_N(s)` is
//! extremized over the batch's non-terminal rows, and each sample gets
//! `r + gamma (V_N(s') + min/max delta' * H)`. The two networks' bounds are
//! intersected; when they cross, the network with the smaller residual
//! spread wins. Terminal rows bootstrap nothing, so their target and both
//! bounds are exactly `r`.

use serde::Deserialize;

use ndarray::Array2;

use crate::clipping::{smoothed_target, ClipMethod};
use crate::dqn::mlp::{gradients_from_cache, ClipPenalty, MlpParams};
use crate::dqn::replay::{ReplayBuffer, Transition};
use crate::envs::mountain_car::{MountainCar, MountainCarParams, MOUNTAIN_CAR_ACTIONS};
use crate::error::{Error, Result};
use crate::rng::Stream;

/// Training hyperparameters. Defaults are the shared MountainCar values:
/// learning rate 0.004, batch 128, buffer 10k, gamma 0.98, 8 gradient steps
/// every 16 environment steps after 1000 warmup steps, hard target sync
/// (polyak 1.0) every 600 steps, architecture (256, 256), epsilon linear
/// from 1.0 to 0.07 over the first 20% of training.
#[derive(Clone, Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DqnConfig {
    pub learning_rate: f64,
    pub batch_size: usize,
    pub buffer_size: usize,
    pub gamma: f64,
    pub gradient_steps: usize,
    pub learning_starts: usize,
    pub polyak: f64,
    pub target_update_interval: usize,
    pub train_frequency: usize,
    pub total_steps: usize,
    pub epsilon_start: f64,
    pub epsilon_end: f64,
    pub epsilon_fraction: f64,
    pub hidden_sizes: Vec<usize>,
    pub max_grad_norm: f64,
    pub eval_interval: usize,
    pub eval_episodes: usize,
    #[serde(skip)]
    pub clip_method: ClipMethod,
    pub eta: f64,
    pub seed: u64,
}

impl Default for DqnConfig {
    fn default() -> Self {
        DqnConfig {
            learning_rate: 0.004,
            batch_size: 128,
            buffer_size: 10_000,
            gamma: 0.98,
            gradient_steps: 8,
            learning_starts: 1000,
            polyak: 1.0,
            target_update_interval: 600,
            train_frequency: 16,
            total_steps: 150_000,
            epsilon_start: 1.0,
            epsilon_end: 0.07,
            epsilon_fraction: 0.2,
            hidden_sizes: vec![256, 256],
            max_grad_norm: 10.0,
            eval_interval: 5000,
            eval_episodes: 10,
            clip_method: ClipMethod::None,
            eta: 1e-5,
            seed: 0,
        }
    }
}

impl DqnConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("learning_rate", self.learning_rate),
            ("gamma", self.gamma),
            ("polyak", self.polyak),
            ("epsilon_start", self.epsilon_start),
            ("epsilon_end", self.epsilon_end),
            ("eta", self.eta),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Precondition(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if !(self.gamma < 1.0) {
            return Err(Error::Precondition(format!(
                "gamma must be below 1 for bounded targets, got {}",
                self.gamma
            )));
        }
        if !(self.epsilon_fraction > 0.0 && self.epsilon_fraction <= 1.0) {
            return Err(Error::Precondition(format!(
                "epsilon_fraction must lie in (0, 1], got {}",
                self.epsilon_fraction
            )));
        }
        for (name, v) in [
            ("batch_size", self.batch_size),
            ("buffer_size", self.buffer_size),
            ("gradient_steps", self.gradient_steps),
            ("target_update_interval", self.target_update_interval),
            ("train_frequency", self.train_frequency),
            ("total_steps", self.total_steps),
            ("eval_interval", self.eval_interval),
            ("eval_episodes", self.eval_episodes),
        ] {
            if v == 0 {
                return Err(Error::Precondition(format!("{name} must be positive")));
            }
        }
        Ok(())
    }

    /// Exploration rate at environment step `t`: linear from start to end
    /// over `epsilon_fraction` of the run, then flat. Endpoints are exact.
    pub fn epsilon_at(&self, t: usize) -> f64 {
        let ramp = self.epsilon_fraction * self.total_steps as f64;
        let t = t as f64;
        if t <= 0.0 {
            self.epsilon_start
        } else if t >= ramp {
            self.epsilon_end
        } else {
            self.epsilon_start + (self.epsilon_end - self.epsilon_start) * (t / ramp)
        }
    }
}

/// One evaluation-cadence row of the training log.
#[derive(Clone, Copy, Debug)]
pub struct TrainLogRow {
    pub env_step: usize,
    pub mean_eval_reward: f64,
    /// Mean squared Bellman error per gradient step in the window.
    pub bellman_loss: f64,
    /// Mean clipping penalty per gradient step in the window.
    pub clip_loss: f64,
    /// Mean per-gradient-step sum of target bound violations in the window.
    pub violation_sum: f64,
    pub epsilon: f64,
}

/// Training log plus safety counters.
#[derive(Clone, Debug, Default)]
pub struct TrainLog {
    pub rows: Vec<TrainLogRow>,
    /// Applied targets that escaped their bounds under hard clipping;
    /// asserted to stay zero.
    pub hard_clip_breaches: usize,
}

/// A finished training run: the log and the final online network.
#[derive(Clone, Debug)]
pub struct DqnRun {
    pub log: TrainLog,
    pub network: MlpParams,
}

/// Per-sample double-sided bounds from the online and target networks over a
/// batch of transitions.
pub fn fa_bounds(
    batch: &[&Transition],
    online: &MlpParams,
    target: &MlpParams,
    gamma: f64,
) -> Result<Vec<(f64, f64)>> {
    if batch.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let dim = online.input_dim();
    let mut states = Array2::zeros((batch.len(), dim));
    let mut next_states = Array2::zeros((batch.len(), dim));
    for (i, t) in batch.iter().enumerate() {
        for (j, &x) in t.state.iter().enumerate() {
            states[[i, j]] = x;
        }
        for (j, &x) in t.next_state.iter().enumerate() {
            next_states[[i, j]] = x;
        }
    }
    let rewards: Vec<f64> = batch.iter().map(|t| t.reward).collect();
    let dones: Vec<bool> = batch.iter().map(|t| t.done).collect();
    let v_onl_s = row_max(&online.forward_batch(&states)?);
    let v_onl_sp = row_max(&online.forward_batch(&next_states)?);
    let v_tgt_s = row_max(&target.forward_batch(&states)?);
    let v_tgt_sp = row_max(&target.forward_batch(&next_states)?);
    Ok(bounds_from_values(
        &rewards, &dones, &v_onl_s, &v_onl_sp, &v_tgt_s, &v_tgt_sp, gamma,
    ))
}

fn row_max(values: &Array2<f64>) -> Vec<f64> {
    values
        .outer_iter()
        .map(|row| row.iter().copied().fold(f64::NEG_INFINITY, f64::max))
        .collect()
}

/// Bound combination given precomputed per-network state values.
#[allow(clippy::too_many_arguments)]
fn bounds_from_values(
    rewards: &[f64],
    dones: &[bool],
    v_onl_s: &[f64],
    v_onl_sp: &[f64],
    v_tgt_s: &[f64],
    v_tgt_sp: &[f64],
    gamma: f64,
) -> Vec<(f64, f64)> {
    let n = rewards.len();
    let h = 1.0 / (1.0 - gamma);
    // Residual extrema per network over non-terminal rows.
    let spread = |v_s: &[f64], v_sp: &[f64]| -> Option<(f64, f64)> {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            if dones[i] {
                continue;
            }
            let d = rewards[i] + gamma * v_sp[i] - v_s[i];
            lo = lo.min(d);
            hi = hi.max(d);
        }
        (lo <= hi).then_some((lo, hi))
    };
    let onl = spread(v_onl_s, v_onl_sp);
    let tgt = spread(v_tgt_s, v_tgt_sp);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        if dones[i] {
            out.push((rewards[i], rewards[i]));
            continue;
        }
        let (onl_lo, onl_hi) = onl.expect("non-terminal row implies extrema");
        let (tgt_lo, tgt_hi) = tgt.expect("non-terminal row implies extrema");
        let bound_onl = (
            rewards[i] + gamma * (v_onl_sp[i] + onl_lo * h),
            rewards[i] + gamma * (v_onl_sp[i] + onl_hi * h),
        );
        let bound_tgt = (
            rewards[i] + gamma * (v_tgt_sp[i] + tgt_lo * h),
            rewards[i] + gamma * (v_tgt_sp[i] + tgt_hi * h),
        );
        let lower = bound_onl.0.max(bound_tgt.0);
        let upper = bound_onl.1.min(bound_tgt.1);
        if lower <= upper {
            out.push((lower, upper));
        } else if onl_hi - onl_lo <= tgt_hi - tgt_lo {
            out.push(bound_onl);
        } else {
            out.push(bound_tgt);
        }
    }
    out
}

fn greedy_action(net: &MlpParams, obs: &[f64]) -> Result<usize> {
    let q = net.forward(obs)?;
    let mut best = 0;
    for a in 1..q.len() {
        if q[a] > q[best] {
            best = a;
        }
    }
    Ok(best)
}

fn evaluate(
    net: &MlpParams,
    env_params: &MountainCarParams,
    rng: &mut Stream,
    episodes: usize,
) -> Result<f64> {
    let mut total = 0.0;
    for _ in 0..episodes {
        let mut env = MountainCar::new(*env_params);
        env.reset(rng);
        loop {
            let obs = env.normalized_observation();
            let action = greedy_action(net, &obs)?;
            let (reward, done) = env.step(action)?;
            total += reward;
            if done {
                break;
            }
        }
    }
    Ok(total / episodes as f64)
}

/// Seeded end-to-end DQN training run. Identical configs produce
/// bitwise-identical logs.
pub fn dqn_train(env_params: &MountainCarParams, config: &DqnConfig) -> Result<DqnRun> {
    config.validate()?;
    let sizes: Vec<usize> = std::iter::once(2)
        .chain(config.hidden_sizes.iter().copied())
        .chain(std::iter::once(MOUNTAIN_CAR_ACTIONS))
        .collect();
    let mut init_rng = Stream::for_component(config.seed, "init");
    let mut env_rng = Stream::for_component(config.seed, "env");
    let mut explore_rng = Stream::for_component(config.seed, "explore");
    let mut replay_rng = Stream::for_component(config.seed, "replay");
    let mut eval_rng = Stream::for_component(config.seed, "eval");

    let mut online = MlpParams::init(&sizes, &mut init_rng)?;
    let mut target = online.clone();
    let mut buffer = ReplayBuffer::new(config.buffer_size);
    let mut env = MountainCar::new(*env_params);
    env.reset(&mut env_rng);

    let mut log = TrainLog::default();
    let mut window_bellman = 0.0;
    let mut window_clip = 0.0;
    let mut window_violation = 0.0;
    let mut window_grad_steps = 0usize;

    let mut states = Array2::zeros((config.batch_size, 2));
    let mut next_states = Array2::zeros((config.batch_size, 2));

    for t in 0..config.total_steps {
        let obs = env.normalized_observation();
        let epsilon = config.epsilon_at(t);
        let action = if explore_rng.uniform() < epsilon {
            explore_rng.index(MOUNTAIN_CAR_ACTIONS)
        } else {
            greedy_action(&online, &obs)?
        };
        let (reward, done) = env.step(action)?;
        let next_obs = env.normalized_observation();
        buffer.push(Transition {
            state: obs.to_vec(),
            action,
            reward,
            next_state: next_obs.to_vec(),
            done,
        });
        if done {
            env.reset(&mut env_rng);
        }

        let step = t + 1;
        if step >= config.learning_starts && step % config.train_frequency == 0 {
            for _ in 0..config.gradient_steps {
                let idx = buffer.sample_indices(&mut replay_rng, config.batch_size);
                let mut rewards = Vec::with_capacity(config.batch_size);
                let mut dones = Vec::with_capacity(config.batch_size);
                let mut actions = Vec::with_capacity(config.batch_size);
                for (i, &k) in idx.iter().enumerate() {
                    let tr = buffer.get(k);
                    for j in 0..2 {
                        states[[i, j]] = tr.state[j];
                        next_states[[i, j]] = tr.next_state[j];
                    }
                    rewards.push(tr.reward);
                    dones.push(tr.done);
                    actions.push(tr.action);
                }
                let acts = online.forward_batch_cached(&states)?;
                let v_onl_s = row_max(acts.last().unwrap());
                let v_onl_sp = row_max(&online.forward_batch(&next_states)?);
                let q_tgt_s = target.forward_batch(&states)?;
                let q_tgt_sp = target.forward_batch(&next_states)?;
                let v_tgt_s = row_max(&q_tgt_s);
                let v_tgt_sp = row_max(&q_tgt_sp);

                let bounds = bounds_from_values(
                    &rewards,
                    &dones,
                    &v_onl_s,
                    &v_onl_sp,
                    &v_tgt_s,
                    &v_tgt_sp,
                    config.gamma,
                );
                let mut targets = Vec::with_capacity(config.batch_size);
                let mut lows = Vec::with_capacity(config.batch_size);
                let mut highs = Vec::with_capacity(config.batch_size);
                for i in 0..config.batch_size {
                    let raw = if dones[i] {
                        rewards[i]
                    } else {
                        rewards[i] + config.gamma * v_tgt_sp[i]
                    };
                    let (lo, hi) = bounds[i];
                    let clipped = raw.max(lo).min(hi);
                    let violation = (raw - clipped).abs();
                    window_violation += violation;
                    let applied = match config.clip_method {
                        ClipMethod::None | ClipMethod::Soft => raw,
                        ClipMethod::Hard => {
                            if clipped < lo || clipped > hi {
                                log.hard_clip_breaches += 1;
                            }
                            clipped
                        }
                        ClipMethod::Smoothed => smoothed_target(raw, clipped, violation),
                    };
                    targets.push(applied);
                    lows.push(lo);
                    highs.push(hi);
                }
                let penalty = ClipPenalty {
                    lower: &lows,
                    upper: &highs,
                    eta: config.eta,
                };
                let clip_arg = (config.clip_method == ClipMethod::Soft).then_some(&penalty);
                let (grads, bellman_loss, clip_loss) =
                    gradients_from_cache(&online, &acts, &actions, &targets, clip_arg)?;
                online.sgd_step(&grads, config.learning_rate, config.max_grad_norm);
                window_bellman += bellman_loss;
                window_clip += clip_loss;
                window_grad_steps += 1;
            }
        }

        if step % config.target_update_interval == 0 {
            target.polyak_from(&online, config.polyak);
        }

        if step % config.eval_interval == 0 {
            let mean_eval_reward =
                evaluate(&online, env_params, &mut eval_rng, config.eval_episodes)?;
            let denom = window_grad_steps.max(1) as f64;
            log.rows.push(TrainLogRow {
                env_step: step,
                mean_eval_reward,
                bellman_loss: window_bellman / denom,
                clip_loss: window_clip / denom,
                violation_sum: window_violation / denom,
                epsilon,
            });
            window_bellman = 0.0;
            window_clip = 0.0;
            window_violation = 0.0;
            window_grad_steps = 0;
        }
    }
    Ok(DqnRun {
        log,
        network: online,
    })
}
