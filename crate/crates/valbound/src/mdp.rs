//! Finite-MDP data model, soft and standard Bellman backups, fixed-point
//! solvers, policy extraction, and policy evaluation.
//!
//! # Absorbing-state convention
//!
//! States in the absorbing set are boundary states: the backup pins
//! `Q(s, a) = r(s, a)` there, and when a backup of an interior state looks at
//! an absorbing successor it uses the state value of the *reward row* at that
//! successor, never a stale estimate. Value never propagates beyond the
//! absorbing set. This is the boundary convention that makes undiscounted
//! absorbing-chain tasks well-posed and exact value composition hold.

use ndarray::{Array1, Array2, Array3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::Stream;

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 100_000;

const ROW_SUM_TOL: f64 = 1e-12;

/// Inverse temperature of the entropy-regularized objective. `Infinite` is
/// the sentinel for standard (un-regularized) RL.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Beta {
    Finite(f64),
    Infinite,
}

impl Beta {
    pub fn is_finite(self) -> bool {
        matches!(self, Beta::Finite(_))
    }
}

/// Regularization: inverse temperature and the prior policy the KL penalty is
/// taken against. With `Beta::Infinite` the prior is unused and every
/// operation falls back to the standard (hard-max) forms.
#[derive(Clone, Debug)]
pub struct RegularizationSpec {
    pub beta: Beta,
    pub prior: PolicyTable,
}

impl RegularizationSpec {
    pub fn soft(beta: f64, prior: PolicyTable) -> Result<Self> {
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::InvalidRegularization(format!(
                "beta must be a positive finite real, got {beta}"
            )));
        }
        Ok(RegularizationSpec {
            beta: Beta::Finite(beta),
            prior,
        })
    }

    /// Soft regularization with a uniform prior.
    pub fn soft_uniform(beta: f64, num_states: usize, num_actions: usize) -> Result<Self> {
        Self::soft(beta, PolicyTable::uniform(num_states, num_actions))
    }

    /// Standard (un-regularized) RL.
    pub fn standard(num_states: usize, num_actions: usize) -> Self {
        RegularizationSpec {
            beta: Beta::Infinite,
            prior: PolicyTable::uniform(num_states, num_actions),
        }
    }
}

/// Action-value table `q[s][a]`.
#[derive(Clone, Debug, PartialEq)]
pub struct QTable {
    pub values: Array2<f64>,
}

impl QTable {
    pub fn zeros(num_states: usize, num_actions: usize) -> Self {
        QTable {
            values: Array2::zeros((num_states, num_actions)),
        }
    }

    pub fn from_array(values: Array2<f64>) -> Result<Self> {
        if values.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("QTable entries must be finite".into()));
        }
        Ok(QTable { values })
    }

    /// Uniform random entries in [lo, hi).
    pub fn random(
        rng: &mut Stream,
        num_states: usize,
        num_actions: usize,
        lo: f64,
        hi: f64,
    ) -> Self {
        let values = Array2::from_shape_fn((num_states, num_actions), |_| rng.uniform_in(lo, hi));
        QTable { values }
    }

    pub fn num_states(&self) -> usize {
        self.values.nrows()
    }

    pub fn num_actions(&self) -> usize {
        self.values.ncols()
    }

    pub fn linf_distance(&self, other: &QTable) -> f64 {
        self.values
            .iter()
            .zip(other.values.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn mean(&self) -> f64 {
        self.values.mean().unwrap_or(0.0)
    }
}

/// Row-stochastic policy table `pi[s][a]`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolicyTable {
    pub probs: Array2<f64>,
}

impl PolicyTable {
    pub fn uniform(num_states: usize, num_actions: usize) -> Self {
        let p = 1.0 / num_actions as f64;
        PolicyTable {
            probs: Array2::from_elem((num_states, num_actions), p),
        }
    }

    pub fn from_array(probs: Array2<f64>) -> Result<Self> {
        for (s, row) in probs.outer_iter().enumerate() {
            let mut sum = 0.0;
            for (a, &p) in row.iter().enumerate() {
                if !p.is_finite() || p < 0.0 {
                    return Err(Error::InvalidPolicy(format!(
                        "probability at state {s}, action {a} is {p}"
                    )));
                }
                sum += p;
            }
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::InvalidPolicy(format!(
                    "row {s} sums to {sum}, expected 1 within {ROW_SUM_TOL:e}"
                )));
            }
        }
        Ok(PolicyTable { probs })
    }

    /// Random row-stochastic table (normalized uniforms).
    pub fn random(rng: &mut Stream, num_states: usize, num_actions: usize) -> Self {
        let mut probs = Array2::zeros((num_states, num_actions));
        for s in 0..num_states {
            let mut sum = 0.0;
            for a in 0..num_actions {
                let x = rng.uniform() + 1e-3;
                probs[[s, a]] = x;
                sum += x;
            }
            for a in 0..num_actions {
                probs[[s, a]] /= sum;
            }
        }
        PolicyTable { probs }
    }
}

/// Finite MDP with dense transition tensor `P[s][a][s']` and reward `r[s][a]`.
#[derive(Clone, Debug)]
pub struct TabularMdp {
    pub num_states: usize,
    pub num_actions: usize,
    pub transition: Array3<f64>,
    pub reward: Array2<f64>,
    pub discount: f64,
    absorbing: Vec<usize>,
    absorbing_mask: Vec<bool>,
}

impl TabularMdp {
    pub fn new(
        transition: Array3<f64>,
        reward: Array2<f64>,
        discount: f64,
        absorbing: Vec<usize>,
    ) -> Result<Self> {
        let (num_states, num_actions, succ) = transition.dim();
        if num_states == 0 || num_actions == 0 {
            return Err(Error::InvalidMdp(
                "state and action sets must be nonempty".into(),
            ));
        }
        if succ != num_states {
            return Err(Error::Shape(format!(
                "transition tensor is {num_states}x{num_actions}x{succ}, successor axis must have {num_states} entries"
            )));
        }
        if reward.dim() != (num_states, num_actions) {
            return Err(Error::Shape(format!(
                "reward table is {:?}, expected ({num_states}, {num_actions})",
                reward.dim()
            )));
        }
        if reward.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("rewards must be finite".into()));
        }
        for s in 0..num_states {
            for a in 0..num_actions {
                let mut sum = 0.0;
                for sp in 0..num_states {
                    let p = transition[[s, a, sp]];
                    if !p.is_finite() || p < 0.0 {
                        return Err(Error::InvalidMdp(format!(
                            "P[{s}][{a}][{sp}] = {p} is not a probability"
                        )));
                    }
                    sum += p;
                }
                if (sum - 1.0).abs() > ROW_SUM_TOL {
                    return Err(Error::InvalidMdp(format!(
                        "transition row ({s}, {a}) sums to {sum}, expected 1 within {ROW_SUM_TOL:e}"
                    )));
                }
            }
        }
        let mut absorbing = absorbing;
        absorbing.sort_unstable();
        absorbing.dedup();
        let mut absorbing_mask = vec![false; num_states];
        for &g in &absorbing {
            if g >= num_states {
                return Err(Error::InvalidMdp(format!(
                    "absorbing state {g} out of range (num_states = {num_states})"
                )));
            }
            absorbing_mask[g] = true;
            for a in 0..num_actions {
                if (transition[[g, a, g]] - 1.0).abs() > ROW_SUM_TOL {
                    return Err(Error::InvalidMdp(format!(
                        "absorbing state {g} must self-loop with probability 1 under action {a}, got {}",
                        transition[[g, a, g]]
                    )));
                }
            }
        }
        if !(discount > 0.0 && discount <= 1.0) {
            return Err(Error::InvalidMdp(format!(
                "discount must lie in (0, 1], got {discount}"
            )));
        }
        if discount == 1.0 && absorbing.is_empty() {
            return Err(Error::InvalidMdp(
                "discount = 1 requires a nonempty absorbing set".into(),
            ));
        }
        Ok(TabularMdp {
            num_states,
            num_actions,
            transition,
            reward,
            discount,
            absorbing,
            absorbing_mask,
        })
    }

    pub fn absorbing(&self) -> &[usize] {
        &self.absorbing
    }

    pub fn is_absorbing(&self, state: usize) -> bool {
        self.absorbing_mask[state]
    }

    /// Effective horizon 1/(1-gamma); errors at gamma = 1.
    pub fn horizon(&self) -> Result<f64> {
        if self.discount >= 1.0 {
            return Err(Error::UndiscountedHorizon);
        }
        Ok(1.0 / (1.0 - self.discount))
    }

    fn check_q_shape(&self, q: &QTable) -> Result<()> {
        if q.values.dim() != (self.num_states, self.num_actions) {
            return Err(Error::Shape(format!(
                "QTable is {:?}, MDP is ({}, {})",
                q.values.dim(),
                self.num_states,
                self.num_actions
            )));
        }
        Ok(())
    }

    /// Expected successor value per (s, a): `sum_{s'} P(s'|s,a) v(s')`.
    pub fn expected_successor_value(&self, v: &Array1<f64>) -> Array2<f64> {
        let flat = self
            .transition
            .view()
            .into_shape_with_order((self.num_states * self.num_actions, self.num_states))
            .expect("transition tensor is contiguous");
        flat.dot(v)
            .into_shape_with_order((self.num_states, self.num_actions))
            .expect("shape product unchanged")
    }

    /// Serialize to the single-document JSON interchange format.
    pub fn to_json_string(&self) -> Result<String> {
        let doc = MdpDocument::from(self);
        Ok(crate::io::to_json_string_pretty(&doc)?)
    }

    /// Parse the JSON interchange format, re-validating all invariants.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let doc: MdpDocument = serde_json::from_str(text)?;
        doc.try_into()
    }
}

/// JSON interchange layout: row-major nested arrays, floats at 17 significant
/// digits when written by this crate.
#[derive(Serialize, Deserialize)]
struct MdpDocument {
    num_states: usize,
    num_actions: usize,
    gamma: f64,
    absorbing: Vec<usize>,
    reward: Vec<Vec<f64>>,
    transition: Vec<Vec<Vec<f64>>>,
}

impl From<&TabularMdp> for MdpDocument {
    fn from(m: &TabularMdp) -> Self {
        let reward = (0..m.num_states)
            .map(|s| (0..m.num_actions).map(|a| m.reward[[s, a]]).collect())
            .collect();
        let transition = (0..m.num_states)
            .map(|s| {
                (0..m.num_actions)
                    .map(|a| {
                        (0..m.num_states)
                            .map(|sp| m.transition[[s, a, sp]])
                            .collect()
                    })
                    .collect()
            })
            .collect();
        MdpDocument {
            num_states: m.num_states,
            num_actions: m.num_actions,
            gamma: m.discount,
            absorbing: m.absorbing.clone(),
            reward,
            transition,
        }
    }
}

impl TryFrom<MdpDocument> for TabularMdp {
    type Error = Error;

    fn try_from(doc: MdpDocument) -> Result<Self> {
        let ns = doc.num_states;
        let na = doc.num_actions;
        let mut reward = Array2::zeros((ns, na));
        if doc.reward.len() != ns {
            return Err(Error::Shape(format!(
                "reward has {} rows, expected {ns}",
                doc.reward.len()
            )));
        }
        for (s, row) in doc.reward.iter().enumerate() {
            if row.len() != na {
                return Err(Error::Shape(format!(
                    "reward row {s} has {} entries, expected {na}",
                    row.len()
                )));
            }
            for (a, &x) in row.iter().enumerate() {
                reward[[s, a]] = x;
            }
        }
        let mut transition = Array3::zeros((ns, na, ns));
        if doc.transition.len() != ns {
            return Err(Error::Shape(format!(
                "transition has {} state rows, expected {ns}",
                doc.transition.len()
            )));
        }
        for (s, per_action) in doc.transition.iter().enumerate() {
            if per_action.len() != na {
                return Err(Error::Shape(format!(
                    "transition[{s}] has {} action rows, expected {na}",
                    per_action.len()
                )));
            }
            for (a, row) in per_action.iter().enumerate() {
                if row.len() != ns {
                    return Err(Error::Shape(format!(
                        "transition[{s}][{a}] has {} entries, expected {ns}",
                        row.len()
                    )));
                }
                for (sp, &p) in row.iter().enumerate() {
                    transition[[s, a, sp]] = p;
                }
            }
        }
        TabularMdp::new(transition, reward, doc.gamma, doc.absorbing)
    }
}

/// Result of a fixed-point solve.
#[derive(Clone, Debug)]
pub struct SolveReport {
    pub q: QTable,
    pub iterations: usize,
    /// l-infinity distance between the final consecutive iterates.
    pub residual: f64,
}

/// Soft state value `V(s) = (1/beta) log E_{a ~ pi0} exp(beta Q(s, a))`,
/// computed with a max shift for overflow safety. A row of identical entries
/// returns that constant exactly.
pub fn soft_state_value(q: &QTable, reg: &RegularizationSpec) -> Result<Array1<f64>> {
    let beta = match reg.beta {
        Beta::Finite(b) => b,
        Beta::Infinite => {
            return Err(Error::InvalidRegularization(
                "soft_state_value needs finite beta; use hard_state_value for standard RL".into(),
            ))
        }
    };
    if q.values.dim() != reg.prior.probs.dim() {
        return Err(Error::Shape(format!(
            "QTable is {:?} but prior is {:?}",
            q.values.dim(),
            reg.prior.probs.dim()
        )));
    }
    if q.values.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("QTable entries must be finite".into()));
    }
    let ns = q.num_states();
    let mut v = Array1::zeros(ns);
    for s in 0..ns {
        v[s] = soft_value_of_row(
            q.values.row(s).as_slice().expect("row-major"),
            reg.prior.probs.row(s).as_slice().expect("row-major"),
            beta,
        );
    }
    Ok(v)
}

/// Soft value of a single row under a prior row.
fn soft_value_of_row(q_row: &[f64], prior_row: &[f64], beta: f64) -> f64 {
    // Shift by the max over the prior's support.
    let mut m = f64::NEG_INFINITY;
    let mut lo = f64::INFINITY;
    for (&q, &p) in q_row.iter().zip(prior_row) {
        if p > 0.0 {
            m = m.max(q);
            lo = lo.min(q);
        }
    }
    if m == lo {
        // Constant over the support: the value is that constant, exactly.
        return m;
    }
    let mut sum = 0.0;
    for (&q, &p) in q_row.iter().zip(prior_row) {
        if p > 0.0 {
            sum += p * (beta * (q - m)).exp();
        }
    }
    m + sum.ln() / beta
}

/// Hard state value `V(s) = max_a q(s, a)`.
pub fn hard_state_value(q: &QTable) -> Result<Array1<f64>> {
    if q.num_actions() == 0 {
        return Err(Error::Shape("empty action set".into()));
    }
    if q.values.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("QTable entries must be finite".into()));
    }
    Ok(Array1::from_iter(q.values.outer_iter().map(|row| {
        row.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    })))
}

/// State values as the backup sees them: derived from `q` at interior states
/// and from the reward row at absorbing states.
pub fn pinned_state_values(
    mdp: &TabularMdp,
    reg: &RegularizationSpec,
    q: &QTable,
) -> Result<Array1<f64>> {
    let mut v = match reg.beta {
        Beta::Finite(_) => soft_state_value(q, reg)?,
        Beta::Infinite => hard_state_value(q)?,
    };
    for &g in mdp.absorbing() {
        let r_row = mdp.reward.row(g);
        v[g] = match reg.beta {
            Beta::Finite(b) => soft_value_of_row(
                r_row.as_slice().expect("row-major"),
                reg.prior.probs.row(g).as_slice().expect("row-major"),
                b,
            ),
            Beta::Infinite => r_row.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        };
    }
    Ok(v)
}

/// One application of the backup given already-pinned state values.
fn apply_backup(mdp: &TabularMdp, v_pinned: &Array1<f64>) -> QTable {
    let ev = mdp.expected_successor_value(v_pinned);
    let mut out = Array2::zeros((mdp.num_states, mdp.num_actions));
    for s in 0..mdp.num_states {
        if mdp.is_absorbing(s) {
            for a in 0..mdp.num_actions {
                out[[s, a]] = mdp.reward[[s, a]];
            }
        } else {
            for a in 0..mdp.num_actions {
                out[[s, a]] = mdp.reward[[s, a]] + mdp.discount * ev[[s, a]];
            }
        }
    }
    QTable { values: out }
}

/// Soft Bellman backup: `r + gamma E_{s'} V(s')` at interior states with the
/// soft state value, `r` at absorbing states.
pub fn soft_backup(mdp: &TabularMdp, reg: &RegularizationSpec, q: &QTable) -> Result<QTable> {
    mdp.check_q_shape(q)?;
    let v = pinned_state_values(mdp, reg, q)?;
    Ok(apply_backup(mdp, &v))
}

/// Standard Bellman backup with the hard max in place of the soft value.
pub fn hard_backup(mdp: &TabularMdp, q: &QTable) -> Result<QTable> {
    mdp.check_q_shape(q)?;
    let reg = RegularizationSpec::standard(mdp.num_states, mdp.num_actions);
    let v = pinned_state_values(mdp, &reg, q)?;
    Ok(apply_backup(mdp, &v))
}

/// Backup dispatched on the regularization mode.
pub fn backup(mdp: &TabularMdp, reg: &RegularizationSpec, q: &QTable) -> Result<QTable> {
    match reg.beta {
        Beta::Finite(_) => soft_backup(mdp, reg, q),
        Beta::Infinite => hard_backup(mdp, q),
    }
}

/// Value iteration from Q = 0 to an l-infinity residual of `tol`.
///
/// Errors with [`Error::NonConvergence`] if `max_iter` passes first, which is
/// expected for gamma = 1 MDPs in which some policy never reaches the
/// absorbing set.
pub fn solve(
    mdp: &TabularMdp,
    reg: &RegularizationSpec,
    tol: f64,
    max_iter: usize,
) -> Result<SolveReport> {
    if !(tol > 0.0) {
        return Err(Error::Precondition(format!(
            "tol must be positive, got {tol}"
        )));
    }
    let mut q = QTable::zeros(mdp.num_states, mdp.num_actions);
    let mut residual = f64::INFINITY;
    for iteration in 1..=max_iter {
        let next = backup(mdp, reg, &q)?;
        residual = next.linf_distance(&q);
        q = next;
        if residual <= tol {
            return Ok(SolveReport {
                q,
                iterations: iteration,
                residual,
            });
        }
    }
    Err(Error::NonConvergence {
        iterations: max_iter,
        residual,
    })
}

/// Boltzmann policy `pi ~ pi0 exp(beta q)`; the infinite-beta sentinel yields
/// the greedy one-hot policy with lowest-index tie-break.
pub fn boltzmann_policy(q: &QTable, reg: &RegularizationSpec) -> Result<PolicyTable> {
    let (ns, na) = q.values.dim();
    match reg.beta {
        Beta::Infinite => {
            let mut probs = Array2::zeros((ns, na));
            for s in 0..ns {
                let row = q.values.row(s);
                let mut best = 0;
                for a in 1..na {
                    if row[a] > row[best] {
                        best = a;
                    }
                }
                probs[[s, best]] = 1.0;
            }
            Ok(PolicyTable { probs })
        }
        Beta::Finite(beta) => {
            if q.values.dim() != reg.prior.probs.dim() {
                return Err(Error::Shape(format!(
                    "QTable is {:?} but prior is {:?}",
                    q.values.dim(),
                    reg.prior.probs.dim()
                )));
            }
            let mut probs = Array2::zeros((ns, na));
            for s in 0..ns {
                let q_row = q.values.row(s);
                let p_row = reg.prior.probs.row(s);
                let m = q_row
                    .iter()
                    .zip(p_row.iter())
                    .filter(|(_, &p)| p > 0.0)
                    .map(|(&q, _)| q)
                    .fold(f64::NEG_INFINITY, f64::max);
                let mut sum = 0.0;
                for a in 0..na {
                    let w = if p_row[a] > 0.0 {
                        p_row[a] * (beta * (q_row[a] - m)).exp()
                    } else {
                        0.0
                    };
                    probs[[s, a]] = w;
                    sum += w;
                }
                for a in 0..na {
                    probs[[s, a]] /= sum;
                }
            }
            Ok(PolicyTable { probs })
        }
    }
}

/// Entropy-regularized policy evaluation: the fixed point of
/// `Q = r + gamma E_{s'} E_{a' ~ pi}[Q - (1/beta) log(pi/pi0)]`,
/// with the KL term dropped in standard mode. Absorbing rows are pinned to
/// their reward, and the terminal state value takes the policy's last action
/// there.
pub fn policy_evaluation(
    mdp: &TabularMdp,
    reg: &RegularizationSpec,
    pi: &PolicyTable,
    tol: f64,
) -> Result<QTable> {
    if !(tol > 0.0) {
        return Err(Error::Precondition(format!(
            "tol must be positive, got {tol}"
        )));
    }
    if pi.probs.dim() != (mdp.num_states, mdp.num_actions) {
        return Err(Error::Shape(format!(
            "policy is {:?}, MDP is ({}, {})",
            pi.probs.dim(),
            mdp.num_states,
            mdp.num_actions
        )));
    }
    // Per-state KL(pi || pi0) / beta, zero in standard mode.
    let mut kl_over_beta = Array1::zeros(mdp.num_states);
    if let Beta::Finite(beta) = reg.beta {
        for s in 0..mdp.num_states {
            let mut kl = 0.0;
            for a in 0..mdp.num_actions {
                let p = pi.probs[[s, a]];
                if p > 0.0 {
                    let p0 = reg.prior.probs[[s, a]];
                    if p0 <= 0.0 {
                        return Err(Error::InfiniteKl {
                            state: s,
                            action: a,
                        });
                    }
                    kl += p * (p / p0).ln();
                }
            }
            kl_over_beta[s] = kl / beta;
        }
    }

    let policy_state_value = |q: &QTable| -> Array1<f64> {
        let mut w = Array1::zeros(mdp.num_states);
        for s in 0..mdp.num_states {
            let mut ev = 0.0;
            for a in 0..mdp.num_actions {
                ev += pi.probs[[s, a]] * q.values[[s, a]];
            }
            w[s] = ev - kl_over_beta[s];
        }
        w
    };

    let mut q = QTable::zeros(mdp.num_states, mdp.num_actions);
    // Pin absorbing rows once; they never change.
    for &g in mdp.absorbing() {
        for a in 0..mdp.num_actions {
            q.values[[g, a]] = mdp.reward[[g, a]];
        }
    }
    let mut residual = f64::INFINITY;
    for _ in 0..DEFAULT_MAX_ITER {
        let w = policy_state_value(&q);
        let ev = mdp.expected_successor_value(&w);
        let mut next = q.clone();
        for s in 0..mdp.num_states {
            if mdp.is_absorbing(s) {
                continue;
            }
            for a in 0..mdp.num_actions {
                next.values[[s, a]] = mdp.reward[[s, a]] + mdp.discount * ev[[s, a]];
            }
        }
        residual = next.linf_distance(&q);
        q = next;
        if residual <= tol {
            return Ok(q);
        }
    }
    Err(Error::NonConvergence {
        iterations: DEFAULT_MAX_ITER,
        residual,
    })
}

/// Random dense MDP for tests and benchmarks: row-stochastic transitions from
/// normalized uniforms, rewards uniform in [-1, 1], no absorbing states.
pub fn random_mdp(
    rng: &mut Stream,
    num_states: usize,
    num_actions: usize,
    discount: f64,
) -> TabularMdp {
    let mut transition = Array3::zeros((num_states, num_actions, num_states));
    for s in 0..num_states {
        for a in 0..num_actions {
            let mut sum = 0.0;
            for sp in 0..num_states {
                let x = rng.uniform() + 1e-3;
                transition[[s, a, sp]] = x;
                sum += x;
            }
            for sp in 0..num_states {
                transition[[s, a, sp]] /= sum;
            }
        }
    }
    let reward = Array2::from_shape_fn((num_states, num_actions), |_| rng.uniform_in(-1.0, 1.0));
    TabularMdp::new(transition, reward, discount, Vec::new()).expect("construction is valid")
}
