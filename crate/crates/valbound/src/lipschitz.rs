//! Continuous-space error machinery: dataset extrema bounds for Lipschitz
//! functions, Lipschitz constants of entropy-regularized value functions
//! under Gaussian policies, one-point state-value estimation with its error
//! bound, and fully propagated double-sided bounds.
//!
//! The metric is the 1-product metric on a single-dimensional state and
//! action space; the space diameter is `D = D_S + D_A`.

use crate::error::{Error, Result};

/// Problem constants: reward and dynamics Lipschitz constants, the state and
/// action diameters, and the policy's standard-deviation floor.
#[derive(Clone, Copy, Debug)]
pub struct LipschitzSpec {
    pub l_r: f64,
    pub l_p: f64,
    pub d_s: f64,
    pub d_a: f64,
    pub sigma_min: f64,
}

impl LipschitzSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("l_r", self.l_r),
            ("l_p", self.l_p),
            ("d_s", self.d_s),
            ("d_a", self.d_a),
            ("sigma_min", self.sigma_min),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Precondition(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// Diameter of the product space in the 1-norm.
    pub fn diameter(&self) -> f64 {
        self.d_s + self.d_a
    }

    /// Lipschitz constant of the Gaussian density at the variance floor.
    pub fn gaussian_density_constant(&self) -> f64 {
        self.sigma_min.powi(-2)
            * (2.0 * std::f64::consts::PI * std::f64::consts::E)
                .sqrt()
                .recip()
    }
}

/// Derived Lipschitz constants of the value machinery.
#[derive(Clone, Copy, Debug)]
pub struct LipschitzConstants {
    /// Gaussian density constant at the variance floor.
    pub l_n: f64,
    /// State-value constant.
    pub l_v: f64,
    /// Action-value constant.
    pub l_q: f64,
    /// Constant of the delta (residual) field.
    pub l_delta: f64,
}

/// One observed sample of a scalar function on the state-action space.
#[derive(Clone, Copy, Debug)]
pub struct SamplePoint {
    pub state: f64,
    pub action: f64,
    pub value: f64,
}

/// Gaussian policy heads at the queried states plus the sup-norm optimality
/// of the value estimate they belong to.
#[derive(Clone, Debug)]
pub struct GaussianPolicyField {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    pub epsilon: f64,
}

impl GaussianPolicyField {
    pub fn validate(&self, sigma_min: f64) -> Result<()> {
        if self.mean.len() != self.std.len() {
            return Err(Error::Shape(format!(
                "{} means vs {} stds",
                self.mean.len(),
                self.std.len()
            )));
        }
        if self.epsilon < 0.0 {
            return Err(Error::Precondition(format!(
                "epsilon must be nonnegative, got {}",
                self.epsilon
            )));
        }
        for (i, &s) in self.std.iter().enumerate() {
            if s < sigma_min {
                return Err(Error::Precondition(format!(
                    "std[{i}] = {s} is below sigma_min = {sigma_min}"
                )));
            }
        }
        Ok(())
    }
}

/// Which one-point error formula to evaluate. The published formula carries a
/// factor `exp(-mu^2 / 2 sigma^2)` that is inconsistent with the Gaussian
/// mean absolute deviation (which has no mu dependence) and can be violated
/// for mu != 0; the corrected variant drops the factor. Containment-style
/// guarantees hold for the corrected variant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorVariant {
    Published,
    Corrected,
}

/// Per-state one-point estimation error bound `A(s)`.
#[derive(Clone, Debug)]
pub struct ErrorProfile {
    pub a: Vec<f64>,
    pub variant: ErrorVariant,
}

impl ErrorProfile {
    /// Evaluate `A(s)` at each queried state of the policy field.
    pub fn new(
        constants: &LipschitzConstants,
        field: &GaussianPolicyField,
        variant: ErrorVariant,
    ) -> Self {
        let a = field
            .mean
            .iter()
            .zip(&field.std)
            .map(|(&mu, &sigma)| v_error_bound(constants, mu, sigma, field.epsilon, variant))
            .collect();
        ErrorProfile { a, variant }
    }
}

/// One dataset row for the propagated bounds: the observed residual estimate
/// and the expected one-point error over that row's successors.
#[derive(Clone, Copy, Debug)]
pub struct DeltaSample {
    pub delta_bar: f64,
    /// `E_{s' ~ p(.|s,a)} A(s')` for this row.
    pub expected_a: f64,
}

/// Dataset bounds on the global extrema of an `L`-Lipschitz function over a
/// space of diameter `D`:
/// `sup f <= min over the dataset + L D` and `inf f >= max over the dataset - L D`.
/// Returns `(sup_upper, inf_lower)`.
pub fn extrema_bounds(samples: &[SamplePoint], l: f64, d: f64) -> Result<(f64, f64)> {
    if samples.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if !(l > 0.0) || !(d > 0.0) {
        return Err(Error::Precondition(format!(
            "Lipschitz constant and diameter must be positive, got L = {l}, D = {d}"
        )));
    }
    let min = samples
        .iter()
        .map(|p| p.value)
        .fold(f64::INFINITY, f64::min);
    let max = samples
        .iter()
        .map(|p| p.value)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok((min + l * d, max - l * d))
}

fn check_feasibility(spec: &LipschitzSpec, gamma: f64) -> Result<f64> {
    spec.validate()?;
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::Precondition(format!(
            "gamma must lie in (0, 1), got {gamma}"
        )));
    }
    let l_n = spec.gaussian_density_constant();
    let product = gamma * spec.l_p * (1.0 + l_n);
    if product >= 1.0 {
        return Err(Error::Infeasible(format!(
            "gamma * L_p * (1 + L_N) = {product} >= 1 (gamma = {gamma}, L_p = {}, L_N = {l_n})",
            spec.l_p
        )));
    }
    Ok(l_n)
}

/// Closed-form Lipschitz constants for the entropy-regularized value
/// machinery under a Gaussian policy with variance floor `sigma_min`:
///
/// ```text
/// L_N = sigma_min^-2 (2 pi e)^-1/2
/// L_Q = (L_r + gamma L_p / (beta sigma_min)) / (1 - gamma L_p (1 + L_N))
/// L_V = L_Q (1 + L_N) + 1 / (beta sigma_min)
/// L_Delta = max(L_r, L_Q, gamma L_p L_V)
/// ```
///
/// `L_Q` is the fixed point of the finite-horizon recurrence
/// `L_{n+1} = L_r + gamma ((1 + L_N) L_n + 1/(beta sigma_min)) L_p`.
pub fn lipschitz_constants(
    spec: &LipschitzSpec,
    gamma: f64,
    beta: f64,
) -> Result<LipschitzConstants> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::Precondition(format!(
            "beta must be positive and finite, got {beta}"
        )));
    }
    let l_n = check_feasibility(spec, gamma)?;
    let inv_beta_sigma = 1.0 / (beta * spec.sigma_min);
    let l_q =
        (spec.l_r + gamma * spec.l_p * inv_beta_sigma) / (1.0 - gamma * spec.l_p * (1.0 + l_n));
    let l_v = l_q * (1.0 + l_n) + inv_beta_sigma;
    let l_delta = spec.l_r.max(l_q).max(gamma * spec.l_p * l_v);
    Ok(LipschitzConstants {
        l_n,
        l_v,
        l_q,
        l_delta,
    })
}

/// One-point state-value estimate for a Gaussian policy: the Q-value at the
/// mean action plus the closed-form Gaussian entropy over beta (the prior
/// term is dropped, the usual MaxEnt convention):
/// `V = Q(s, mu) + (1/beta)(log(2 pi sigma^2)/2 + 1/2)`.
pub fn gaussian_v_estimate(q_at_mean: f64, sigma: f64, beta: f64) -> f64 {
    debug_assert!(sigma > 0.0 && beta > 0.0);
    let entropy = 0.5 * (2.0 * std::f64::consts::PI * sigma * sigma).ln() + 0.5;
    q_at_mean + entropy / beta
}

/// Upper bound on the one-point estimation error `|V_bar(s) - V^pi(s)|`.
pub fn v_error_bound(
    constants: &LipschitzConstants,
    mu: f64,
    sigma: f64,
    epsilon: f64,
    variant: ErrorVariant,
) -> f64 {
    debug_assert!(sigma > 0.0);
    let base = (2.0 / std::f64::consts::PI).sqrt() * constants.l_q * sigma;
    match variant {
        ErrorVariant::Published => base * (-mu * mu / (2.0 * sigma * sigma)).exp() + epsilon,
        ErrorVariant::Corrected => base + epsilon,
    }
}

/// Error in replacing the true residual with its one-point estimate:
/// `|delta - delta_bar| <= gamma E_{s'} A(s')`.
pub fn delta_error_bound(
    gamma: f64,
    profile: &ErrorProfile,
    successor: &[(usize, f64)],
) -> Result<f64> {
    let mut expectation = 0.0;
    for &(state, prob) in successor {
        let a = profile
            .a
            .get(state)
            .ok_or_else(|| Error::Shape(format!("no profile entry for state {state}")))?;
        expectation += prob * a;
    }
    Ok(gamma * expectation)
}

/// Fully propagated double-sided bounds at one query point:
///
/// ```text
/// upper = r + gamma E[V_bar + A] + (gamma/(1-gamma)) (min_D (delta_bar + gamma E A) + L_Delta D)
/// lower = r + gamma E[V_bar - A] + (gamma/(1-gamma)) (max_D (delta_bar - gamma E A) - L_Delta D)
/// ```
///
/// `successor` is the query point's successor distribution over the states
/// indexing `v_bar` and the profile; each dataset row carries its own
/// expected error (see [`DeltaSample`]).
#[allow(clippy::too_many_arguments)]
pub fn propagated_bounds(
    r_value: f64,
    successor: &[(usize, f64)],
    v_bar: &[f64],
    profile: &ErrorProfile,
    samples: &[DeltaSample],
    constants: &LipschitzConstants,
    spec: &LipschitzSpec,
    gamma: f64,
) -> Result<(f64, f64)> {
    if samples.is_empty() {
        return Err(Error::EmptyDataset);
    }
    check_feasibility(spec, gamma)?;
    let mut ev = 0.0;
    let mut ea = 0.0;
    for &(state, prob) in successor {
        let v = v_bar
            .get(state)
            .ok_or_else(|| Error::Shape(format!("no value estimate for state {state}")))?;
        let a = profile
            .a
            .get(state)
            .ok_or_else(|| Error::Shape(format!("no profile entry for state {state}")))?;
        ev += prob * v;
        ea += prob * a;
    }
    let h = gamma / (1.0 - gamma);
    let slack = constants.l_delta * spec.diameter();
    let min_up = samples
        .iter()
        .map(|s| s.delta_bar + gamma * s.expected_a)
        .fold(f64::INFINITY, f64::min);
    let max_lo = samples
        .iter()
        .map(|s| s.delta_bar - gamma * s.expected_a)
        .fold(f64::NEG_INFINITY, f64::max);
    let upper = r_value + gamma * (ev + ea) + h * (min_up + slack);
    let lower = r_value + gamma * (ev - ea) + h * (max_lo - slack);
    Ok((lower, upper))
}
