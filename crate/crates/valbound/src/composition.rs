//! Value-function composition: the exact weighted log-sum-exp rule for
//! absorbing-reward task families, standard-RL composition with a corrective
//! task, potential-based shaping transfer, and inverse-reward extraction.

use std::sync::Arc;

use ndarray::{Array1, Array2};
use serde::Serialize;

use crate::bounds::delta_standard;
use crate::error::{Error, Result};
use crate::mdp::{
    self, hard_state_value, soft_state_value, Beta, QTable, RegularizationSpec, TabularMdp,
    DEFAULT_MAX_ITER,
};

const SHARE_TOL: f64 = 1e-12;

/// How subtask values (and absorbing rewards) are combined.
#[derive(Clone)]
pub enum CompositionRule {
    /// `tau log sum_j w_j exp(x_j / tau)` — the exact rule.
    LogSumExpWeighted,
    Max,
    Mean,
    /// Arbitrary pure function of the M subtask values.
    Custom(Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>),
}

impl std::fmt::Debug for CompositionRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CompositionRule::LogSumExpWeighted => write!(f, "LogSumExpWeighted"),
            CompositionRule::Max => write!(f, "Max"),
            CompositionRule::Mean => write!(f, "Mean"),
            CompositionRule::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

/// Weights, temperature, and rule for a composition.
#[derive(Clone, Debug)]
pub struct CompositionSpec {
    pub weights: Vec<f64>,
    pub tau: f64,
    pub rule: CompositionRule,
}

impl CompositionSpec {
    pub fn logsumexp(weights: Vec<f64>, tau: f64) -> Self {
        CompositionSpec {
            weights,
            tau,
            rule: CompositionRule::LogSumExpWeighted,
        }
    }

    /// Weights must be strictly positive and the temperature positive; the
    /// log-sum-exp rule additionally needs one weight per subtask.
    pub fn validate(&self, num_tasks: usize) -> Result<()> {
        if !(self.tau > 0.0) || !self.tau.is_finite() {
            return Err(Error::Precondition(format!(
                "tau must be positive, got {}",
                self.tau
            )));
        }
        for (j, w) in self.weights.iter().enumerate() {
            if !(*w > 0.0) || !w.is_finite() {
                return Err(Error::Precondition(format!(
                    "weights[{j}] must be positive, got {w}"
                )));
            }
        }
        if matches!(self.rule, CompositionRule::LogSumExpWeighted)
            && self.weights.len() != num_tasks
        {
            return Err(Error::Precondition(format!(
                "weights has {} entries for {num_tasks} subtasks",
                self.weights.len()
            )));
        }
        Ok(())
    }

    /// Apply the rule to one tuple of subtask values.
    pub fn apply(&self, values: &[f64]) -> f64 {
        match &self.rule {
            CompositionRule::LogSumExpWeighted => {
                logsumexp_weighted(values, &self.weights, self.tau)
            }
            CompositionRule::Max => values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            CompositionRule::Mean => values.iter().sum::<f64>() / values.len() as f64,
            CompositionRule::Custom(f) => f(values),
        }
    }
}

/// Overflow-safe `tau log sum_j w_j exp(x_j / tau)`.
///
/// A single value with unit weight passes through bitwise.
pub fn logsumexp_weighted(values: &[f64], weights: &[f64], tau: f64) -> f64 {
    debug_assert_eq!(values.len(), weights.len());
    let m = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = values
        .iter()
        .zip(weights)
        .map(|(x, w)| w * ((x - m) / tau).exp())
        .sum();
    m + tau * sum.ln()
}

/// Compose solved subtask Q-tables by the weighted log-sum-exp rule.
pub fn compose_q_logsumexp(q_tables: &[QTable], spec: &CompositionSpec) -> Result<QTable> {
    if q_tables.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if !matches!(spec.rule, CompositionRule::LogSumExpWeighted) {
        return Err(Error::Precondition(
            "compose_q_logsumexp requires the logsumexp_weighted rule".into(),
        ));
    }
    spec.validate(q_tables.len())?;
    let dim = q_tables[0].values.dim();
    for (j, q) in q_tables.iter().enumerate() {
        if q.values.dim() != dim {
            return Err(Error::Shape(format!(
                "q_tables[{j}] is {:?}, expected {dim:?}",
                q.values.dim()
            )));
        }
    }
    let mut out = Array2::zeros(dim);
    let mut tuple = vec![0.0; q_tables.len()];
    for s in 0..dim.0 {
        for a in 0..dim.1 {
            for (j, q) in q_tables.iter().enumerate() {
                tuple[j] = q.values[[s, a]];
            }
            out[[s, a]] = logsumexp_weighted(&tuple, &spec.weights, spec.tau);
        }
    }
    QTable::from_array(out)
}

/// Compose reward tables (typically absorbing-row entries) by the weighted
/// log-sum-exp rule.
pub fn compose_rewards_logsumexp(
    rewards: &[Array2<f64>],
    spec: &CompositionSpec,
) -> Result<Array2<f64>> {
    if rewards.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if !matches!(spec.rule, CompositionRule::LogSumExpWeighted) {
        return Err(Error::Precondition(
            "compose_rewards_logsumexp requires the logsumexp_weighted rule".into(),
        ));
    }
    spec.validate(rewards.len())?;
    let dim = rewards[0].dim();
    for (j, r) in rewards.iter().enumerate() {
        if r.dim() != dim {
            return Err(Error::Shape(format!(
                "rewards[{j}] is {:?}, expected {dim:?}",
                r.dim()
            )));
        }
    }
    let mut out = Array2::zeros(dim);
    let mut tuple = vec![0.0; rewards.len()];
    for s in 0..dim.0 {
        for a in 0..dim.1 {
            for (j, r) in rewards.iter().enumerate() {
                tuple[j] = r[[s, a]];
            }
            out[[s, a]] = logsumexp_weighted(&tuple, &spec.weights, spec.tau);
        }
    }
    Ok(out)
}

fn check_shared_structure(subtasks: &[TabularMdp]) -> Result<()> {
    let first = &subtasks[0];
    for (j, t) in subtasks.iter().enumerate().skip(1) {
        if t.num_states != first.num_states {
            return Err(Error::Precondition(format!(
                "num_states: subtask {j} has {}, subtask 0 has {}",
                t.num_states, first.num_states
            )));
        }
        if t.num_actions != first.num_actions {
            return Err(Error::Precondition(format!(
                "num_actions: subtask {j} has {}, subtask 0 has {}",
                t.num_actions, first.num_actions
            )));
        }
        if t.discount != first.discount {
            return Err(Error::Precondition(format!(
                "gamma: subtask {j} has {}, subtask 0 has {}",
                t.discount, first.discount
            )));
        }
        if t.absorbing() != first.absorbing() {
            return Err(Error::Precondition(format!(
                "absorbing: subtask {j} differs from subtask 0"
            )));
        }
        let dyn_diff = t
            .transition
            .iter()
            .zip(first.transition.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if dyn_diff > SHARE_TOL {
            return Err(Error::Precondition(format!(
                "transition: subtask {j} differs from subtask 0 by {dyn_diff:.3e}"
            )));
        }
    }
    Ok(())
}

/// Build the composite of an absorbing task family: shared
/// deterministic dynamics and interior rewards, gamma = 1, absorbing rewards
/// combined by the spec's rule.
pub fn build_composite_task(subtasks: &[TabularMdp], spec: &CompositionSpec) -> Result<TabularMdp> {
    if subtasks.is_empty() {
        return Err(Error::EmptyDataset);
    }
    spec.validate(subtasks.len())?;
    check_shared_structure(subtasks)?;
    let first = &subtasks[0];
    if first.discount != 1.0 {
        return Err(Error::Precondition(format!(
            "gamma: composite construction requires gamma = 1, got {}",
            first.discount
        )));
    }
    if first.absorbing().is_empty() {
        return Err(Error::Precondition(
            "absorbing: the shared absorbing set must be nonempty".into(),
        ));
    }
    for s in 0..first.num_states {
        for a in 0..first.num_actions {
            let row_max = (0..first.num_states)
                .map(|sp| first.transition[[s, a, sp]])
                .fold(f64::NEG_INFINITY, f64::max);
            if (row_max - 1.0).abs() > SHARE_TOL {
                return Err(Error::Precondition(format!(
                    "transition: row ({s}, {a}) is stochastic; the composite construction requires deterministic dynamics"
                )));
            }
        }
    }
    for (j, t) in subtasks.iter().enumerate().skip(1) {
        for s in 0..first.num_states {
            if first.is_absorbing(s) {
                continue;
            }
            for a in 0..first.num_actions {
                if (t.reward[[s, a]] - first.reward[[s, a]]).abs() > SHARE_TOL {
                    return Err(Error::Precondition(format!(
                        "reward: interior reward ({s}, {a}) differs between subtask {j} and subtask 0"
                    )));
                }
            }
        }
    }
    let mut reward = first.reward.clone();
    let mut tuple = vec![0.0; subtasks.len()];
    for &g in first.absorbing() {
        for a in 0..first.num_actions {
            for (j, t) in subtasks.iter().enumerate() {
                tuple[j] = t.reward[[g, a]];
            }
            reward[[g, a]] = spec.apply(&tuple);
        }
    }
    TabularMdp::new(
        first.transition.clone(),
        reward,
        1.0,
        first.absorbing().to_vec(),
    )
}

/// Outcome of an exact-composition check.
#[derive(Clone, Debug, Serialize)]
pub struct CompositionReport {
    pub residual: f64,
    pub tol: f64,
    pub pass: bool,
    pub weights: Vec<f64>,
    pub tau: f64,
}

/// Solve each subtask (soft, beta = 1/tau, uniform prior), compose the
/// Q-tables by the spec's rule, and report the composed table's soft Bellman
/// residual on the composite task's interior states. The log-sum-exp rule is
/// exact: its residual is zero up to the subtask solver tolerance.
pub fn verify_exact_composition(
    subtasks: &[TabularMdp],
    spec: &CompositionSpec,
    tol: f64,
) -> Result<CompositionReport> {
    let composite = build_composite_task(subtasks, spec)?;
    let ns = composite.num_states;
    let na = composite.num_actions;
    let reg = RegularizationSpec::soft_uniform(1.0 / spec.tau, ns, na)?;
    let mut q_tables = Vec::with_capacity(subtasks.len());
    for t in subtasks {
        q_tables.push(mdp::solve(t, &reg, 1e-12, DEFAULT_MAX_ITER)?.q);
    }
    let composed = match spec.rule {
        CompositionRule::LogSumExpWeighted => compose_q_logsumexp(&q_tables, spec)?,
        _ => {
            let mut out = Array2::zeros((ns, na));
            let mut tuple = vec![0.0; q_tables.len()];
            for s in 0..ns {
                for a in 0..na {
                    for (j, q) in q_tables.iter().enumerate() {
                        tuple[j] = q.values[[s, a]];
                    }
                    out[[s, a]] = spec.apply(&tuple);
                }
            }
            QTable::from_array(out)?
        }
    };
    let backed = mdp::soft_backup(&composite, &reg, &composed)?;
    let mut residual = 0.0f64;
    for s in 0..ns {
        if composite.is_absorbing(s) {
            continue;
        }
        for a in 0..na {
            residual = residual.max((backed.values[[s, a]] - composed.values[[s, a]]).abs());
        }
    }
    Ok(CompositionReport {
        residual,
        tol,
        pass: residual <= tol,
        weights: spec.weights.clone(),
        tau: spec.tau,
    })
}

/// Corrective reward, potential, corrective value, and the reconstructed
/// optimal table `potential + K*`.
#[derive(Clone, Debug)]
pub struct ShapingArtifacts {
    pub kappa: Array2<f64>,
    pub potential: Array1<f64>,
    pub corrective_value: QTable,
    pub reconstructed: QTable,
}

fn solve_corrective(
    dynamics_of: &TabularMdp,
    kappa: Array2<f64>,
    potential: Array1<f64>,
) -> Result<ShapingArtifacts> {
    let k_task = TabularMdp::new(
        dynamics_of.transition.clone(),
        kappa.clone(),
        dynamics_of.discount,
        dynamics_of.absorbing().to_vec(),
    )?;
    let reg = RegularizationSpec::standard(k_task.num_states, k_task.num_actions);
    let k_star = mdp::solve(&k_task, &reg, 1e-12, DEFAULT_MAX_ITER)?.q;
    let mut reconstructed = k_star.values.clone();
    for s in 0..k_task.num_states {
        for a in 0..k_task.num_actions {
            reconstructed[[s, a]] += potential[s];
        }
    }
    Ok(ShapingArtifacts {
        kappa,
        potential,
        corrective_value: k_star,
        reconstructed: QTable {
            values: reconstructed,
        },
    })
}

/// Standard-RL composition with correction: the composite of subtasks under
/// `f` has optimal values `V_f(s) + K*(s, a)`, where `V_f(s) = max_a
/// f({Q_j})` and `K*` solves the task with the shaped reward
/// `kappa = f({r_j}) + gamma E V_f(s') - V_f(s)`.
pub fn std_composition_correction(
    subtasks: &[TabularMdp],
    q_tables: &[QTable],
    spec: &CompositionSpec,
) -> Result<ShapingArtifacts> {
    if subtasks.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if q_tables.len() != subtasks.len() {
        return Err(Error::Shape(format!(
            "{} Q tables for {} subtasks",
            q_tables.len(),
            subtasks.len()
        )));
    }
    spec.validate(subtasks.len())?;
    check_shared_structure(subtasks)?;
    let first = &subtasks[0];
    first.horizon()?; // gamma < 1 required
    let (ns, na) = (first.num_states, first.num_actions);
    for (j, q) in q_tables.iter().enumerate() {
        if q.values.dim() != (ns, na) {
            return Err(Error::Shape(format!(
                "q_tables[{j}] is {:?}, expected ({ns}, {na})",
                q.values.dim()
            )));
        }
    }
    // Composite reward f({r_j}) elementwise and potential V_f = max_a f({Q_j}).
    let mut composite_reward = Array2::zeros((ns, na));
    let mut f_of_q = Array2::zeros((ns, na));
    let mut tuple = vec![0.0; subtasks.len()];
    for s in 0..ns {
        for a in 0..na {
            for (j, t) in subtasks.iter().enumerate() {
                tuple[j] = t.reward[[s, a]];
            }
            composite_reward[[s, a]] = spec.apply(&tuple);
            for (j, q) in q_tables.iter().enumerate() {
                tuple[j] = q.values[[s, a]];
            }
            f_of_q[[s, a]] = spec.apply(&tuple);
        }
    }
    let potential = hard_state_value(&QTable::from_array(f_of_q)?)?;
    let composite = TabularMdp::new(
        first.transition.clone(),
        composite_reward,
        first.discount,
        first.absorbing().to_vec(),
    )?;
    let kappa = delta_standard(&composite, &potential)?.delta;
    solve_corrective(&composite, kappa, potential)
}

/// Potential-based shaping transfer: with any potential `v`, the target
/// task's optimal values are `v(s) + K*(s, a)` for the corrective task with
/// reward `kappa = r + gamma E v(s') - v(s)`.
pub fn shaping_kappa(target: &TabularMdp, v_star: &Array1<f64>) -> Result<ShapingArtifacts> {
    target.horizon()?; // gamma < 1 required
    if v_star.len() != target.num_states {
        return Err(Error::Shape(format!(
            "potential has {} entries, MDP has {} states",
            v_star.len(),
            target.num_states
        )));
    }
    let kappa = delta_standard(target, v_star)?.delta;
    solve_corrective(target, kappa, v_star.clone())
}

/// Reward function for which `q` is the optimal value under the given
/// dynamics: `R = q - gamma E V(s')` at interior rows (V soft or hard per the
/// regularization), `R = q` at absorbing rows. Solving the resulting task
/// returns `q` as its fixed point.
pub fn inverse_reward(
    q: &QTable,
    mdp: &TabularMdp,
    reg: &RegularizationSpec,
) -> Result<Array2<f64>> {
    if q.values.dim() != (mdp.num_states, mdp.num_actions) {
        return Err(Error::Shape(format!(
            "QTable is {:?}, MDP is ({}, {})",
            q.values.dim(),
            mdp.num_states,
            mdp.num_actions
        )));
    }
    let v = match reg.beta {
        Beta::Finite(_) => soft_state_value(q, reg)?,
        Beta::Infinite => hard_state_value(q)?,
    };
    let ev = mdp.expected_successor_value(&v);
    let mut r = Array2::zeros((mdp.num_states, mdp.num_actions));
    for s in 0..mdp.num_states {
        for a in 0..mdp.num_actions {
            r[[s, a]] = if mdp.is_absorbing(s) {
                q.values[[s, a]]
            } else {
                q.values[[s, a]] - mdp.discount * ev[[s, a]]
            };
        }
    }
    Ok(r)
}
