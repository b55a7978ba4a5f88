//! Delta fields and double-sided bounds on the optimal action-value function
//! derived from arbitrary value estimates, plus suboptimality bounds for
//! policies with known values.
//!
//! The delta field of an estimate is its Bellman residual, and the bounds are
//!
//! ```text
//! r + gamma (E_{s'} V(s') + H inf delta) <= Q* <= r + gamma (E_{s'} V(s') + H sup delta)
//! ```
//!
//! with `H = 1/(1-gamma)`. The gap between the two sides is
//! `gamma H (sup delta - inf delta)` at every interior entry, so it shrinks
//! linearly with the Bellman residual and is tight at the fixed point.
//!
//! Absorbing rows are boundary rows: their optimal value is pinned to the
//! reward, so both bounds return the reward there exactly rather than the
//! interior formula.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::mdp::{self, pinned_state_values, Beta, QTable, RegularizationSpec, TabularMdp};

/// Which estimate the residual subtracts: the action-value estimate itself
/// (soft mode) or the state-value estimate (standard mode).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeltaMode {
    Soft,
    Standard,
}

/// Bellman residual of a value estimate, with its extrema.
///
/// `base` is the backup of the estimate (`r + gamma E V` at interior rows,
/// `r` at absorbing rows); bounds are `base + gamma H inf/sup delta`.
#[derive(Clone, Debug)]
pub struct DeltaField {
    pub delta: Array2<f64>,
    pub base: Array2<f64>,
    pub mode: DeltaMode,
    pub inf_delta: f64,
    pub sup_delta: f64,
}

impl DeltaField {
    fn from_parts(delta: Array2<f64>, base: Array2<f64>, mode: DeltaMode) -> Result<Self> {
        if delta.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("delta field must be finite".into()));
        }
        let inf_delta = delta.iter().copied().fold(f64::INFINITY, f64::min);
        let sup_delta = delta.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(DeltaField {
            delta,
            base,
            mode,
            inf_delta,
            sup_delta,
        })
    }
}

/// Lower and upper tables sandwiching the optimal action-value function.
#[derive(Clone, Debug)]
pub struct BoundPair {
    pub lower: Array2<f64>,
    pub upper: Array2<f64>,
    pub inf_delta: f64,
    pub sup_delta: f64,
    /// Effective horizon H = 1/(1-gamma).
    pub horizon: f64,
}

/// Per-state identity action, verified to self-loop deterministically.
#[derive(Clone, Debug)]
pub struct IdentityActionMap {
    pub identity_action: Vec<usize>,
    verified: bool,
}

impl IdentityActionMap {
    /// Verify that `P(s | s, a(s)) = 1` for every state and return the map.
    pub fn verify(mdp: &TabularMdp, identity_action: Vec<usize>) -> Result<Self> {
        if identity_action.len() != mdp.num_states {
            return Err(Error::Shape(format!(
                "identity map has {} entries, MDP has {} states",
                identity_action.len(),
                mdp.num_states
            )));
        }
        for (s, &a) in identity_action.iter().enumerate() {
            if a >= mdp.num_actions {
                return Err(Error::Shape(format!(
                    "identity action {a} out of range at state {s}"
                )));
            }
            if (mdp.transition[[s, a, s]] - 1.0).abs() > 1e-12 {
                return Err(Error::StochasticTransition {
                    state: s,
                    action: a,
                });
            }
        }
        Ok(IdentityActionMap {
            identity_action,
            verified: true,
        })
    }

    /// An unverified map; `identity_lower_bound` will refuse it.
    pub fn unverified(identity_action: Vec<usize>) -> Self {
        IdentityActionMap {
            identity_action,
            verified: false,
        }
    }

    pub fn is_verified(&self) -> bool {
        self.verified
    }
}

/// Suboptimality rate field and its horizon-scaled extremes:
/// `lo <= Q*(s,a) - Q^pi(s,a) <= hi` at every entry.
#[derive(Clone, Debug)]
pub struct SuboptimalityReport {
    pub d: Array2<f64>,
    pub lo: f64,
    pub hi: f64,
}

/// Soft-mode delta: `B Q - Q` under the soft backup, exactly.
pub fn delta_soft(mdp: &TabularMdp, reg: &RegularizationSpec, q: &QTable) -> Result<DeltaField> {
    if !reg.beta.is_finite() {
        return Err(Error::InvalidRegularization(
            "delta_soft needs finite beta; use delta_standard for standard RL".into(),
        ));
    }
    let base = mdp::soft_backup(mdp, reg, q)?.values;
    let delta = &base - &q.values;
    DeltaField::from_parts(delta, base, DeltaMode::Soft)
}

/// Standard-mode delta from a state-value estimate:
/// `r + gamma E_{s'} v(s') - v(s)` at interior rows, `r - v(s)` at absorbing
/// rows. This is the potential-based shaped reward with potential `v`.
pub fn delta_standard(mdp: &TabularMdp, v: &ndarray::Array1<f64>) -> Result<DeltaField> {
    if v.len() != mdp.num_states {
        return Err(Error::Shape(format!(
            "state-value estimate has {} entries, MDP has {} states",
            v.len(),
            mdp.num_states
        )));
    }
    let ev = mdp.expected_successor_value(v);
    let mut base = Array2::zeros((mdp.num_states, mdp.num_actions));
    let mut delta = Array2::zeros((mdp.num_states, mdp.num_actions));
    for s in 0..mdp.num_states {
        for a in 0..mdp.num_actions {
            let b = if mdp.is_absorbing(s) {
                mdp.reward[[s, a]]
            } else {
                mdp.reward[[s, a]] + mdp.discount * ev[[s, a]]
            };
            base[[s, a]] = b;
            delta[[s, a]] = b - v[s];
        }
    }
    DeltaField::from_parts(delta, base, DeltaMode::Standard)
}

/// Delta field for an action-value estimate in whichever mode `reg` selects.
pub fn delta_for(mdp: &TabularMdp, reg: &RegularizationSpec, q: &QTable) -> Result<DeltaField> {
    match reg.beta {
        Beta::Finite(_) => delta_soft(mdp, reg, q),
        Beta::Infinite => {
            let v = pinned_state_values(mdp, reg, q)?;
            delta_standard(mdp, &v)
        }
    }
}

fn form_bound_pair(mdp: &TabularMdp, delta: &DeltaField) -> Result<BoundPair> {
    let h = mdp.horizon()?;
    let gamma = mdp.discount;
    let lo_term = gamma * (h * delta.inf_delta);
    let hi_term = gamma * (h * delta.sup_delta);
    let mut lower = delta.base.clone();
    let mut upper = delta.base.clone();
    for s in 0..mdp.num_states {
        if mdp.is_absorbing(s) {
            // Boundary rows: the optimum is the reward, known exactly.
            continue;
        }
        for a in 0..mdp.num_actions {
            lower[[s, a]] += lo_term;
            upper[[s, a]] += hi_term;
        }
    }
    Ok(BoundPair {
        lower,
        upper,
        inf_delta: delta.inf_delta,
        sup_delta: delta.sup_delta,
        horizon: h,
    })
}

/// Double-sided bounds from a delta field. Errors at gamma = 1.
pub fn bounds_from_delta(mdp: &TabularMdp, delta: &DeltaField) -> Result<BoundPair> {
    form_bound_pair(mdp, delta)
}

/// Estimate-free bounds from reward extrema alone:
/// `r + gamma H inf r <= Q* <= r + gamma H sup r`.
pub fn reward_only_bounds(mdp: &TabularMdp) -> Result<BoundPair> {
    let delta =
        DeltaField::from_parts(mdp.reward.clone(), mdp.reward.clone(), DeltaMode::Standard)?;
    form_bound_pair(mdp, &delta)
}

/// Improved lower bound when every state has a deterministic self-loop
/// action: playing that action forever from the successor yields
/// `r(s,a) + gamma (V(s') + H delta(s', a0(s')))`.
///
/// Requires deterministic transitions out of every evaluated pair. The
/// rollout argument behind this bound is exact for standard RL; in soft mode
/// it ignores the prior-mismatch cost of the deterministic identity policy,
/// so soft-mode output can exceed the true optimum when the identity action
/// is far from the estimate's preferred one. Containment should be relied on
/// in standard mode.
pub fn identity_lower_bound(
    mdp: &TabularMdp,
    reg: &RegularizationSpec,
    q: &QTable,
    id_map: &IdentityActionMap,
) -> Result<Array2<f64>> {
    if !id_map.is_verified() {
        return Err(Error::UnverifiedIdentityMap);
    }
    let h = mdp.horizon()?;
    let delta = delta_for(mdp, reg, q)?;
    let mut lower = Array2::zeros((mdp.num_states, mdp.num_actions));
    for s in 0..mdp.num_states {
        for a in 0..mdp.num_actions {
            if mdp.is_absorbing(s) {
                lower[[s, a]] = mdp.reward[[s, a]];
                continue;
            }
            let mut successor = None;
            for sp in 0..mdp.num_states {
                let p = mdp.transition[[s, a, sp]];
                if p >= 1.0 - 1e-9 {
                    successor = Some(sp);
                    break;
                }
            }
            let sp = successor.ok_or(Error::StochasticTransition {
                state: s,
                action: a,
            })?;
            let a0 = id_map.identity_action[sp];
            lower[[s, a]] = delta.base[[s, a]] + mdp.discount * (h * delta.delta[[sp, a0]]);
        }
    }
    Ok(lower)
}

/// Horizon-scaled extremes of the suboptimality rate
/// `d = r + gamma E V^pi - Q^pi`, bounding `Q* - Q^pi` on both sides.
pub fn suboptimality_bounds(
    mdp: &TabularMdp,
    reg: &RegularizationSpec,
    q_pi: &QTable,
) -> Result<SuboptimalityReport> {
    let h = mdp.horizon()?;
    let delta = delta_for(mdp, reg, q_pi)?;
    let d = delta.delta;
    let lo = h * d.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = h * d.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(SuboptimalityReport { d, lo, hi })
}
