//! The MountainCar classic-control task with the canonical constants, fixed
//! here for reproducibility.

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::rng::Stream;

/// Physics and episode constants.
#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MountainCarParams {
    pub min_position: f64,
    pub max_position: f64,
    pub max_speed: f64,
    pub force: f64,
    pub gravity: f64,
    pub goal_position: f64,
    pub reward_per_step: f64,
    pub max_episode_steps: usize,
    pub start_position_low: f64,
    pub start_position_high: f64,
}

impl Default for MountainCarParams {
    fn default() -> Self {
        MountainCarParams {
            min_position: -1.2,
            max_position: 0.6,
            max_speed: 0.07,
            force: 0.001,
            gravity: 0.0025,
            goal_position: 0.5,
            reward_per_step: -1.0,
            max_episode_steps: 200,
            start_position_low: -0.6,
            start_position_high: -0.4,
        }
    }
}

pub const MOUNTAIN_CAR_ACTIONS: usize = 3; // push_left, no_push, push_right

/// One deterministic physics step. `done` reflects reaching the goal; the
/// episode step cap is tracked by [`MountainCar`].
pub fn mountaincar_step(
    state: (f64, f64),
    action: usize,
    params: &MountainCarParams,
) -> Result<((f64, f64), f64, bool)> {
    if action >= MOUNTAIN_CAR_ACTIONS {
        return Err(Error::Precondition(format!(
            "action index {action} out of range (3 actions)"
        )));
    }
    let (position, velocity) = state;
    let mut v = velocity
        + (action as f64 - 1.0) * params.force
        + (3.0 * position).cos() * (-params.gravity);
    v = v.clamp(-params.max_speed, params.max_speed);
    let mut p = position + v;
    p = p.clamp(params.min_position, params.max_position);
    if p <= params.min_position && v < 0.0 {
        v = 0.0;
    }
    let done = p >= params.goal_position;
    Ok(((p, v), params.reward_per_step, done))
}

/// A single episode-owning environment instance.
#[derive(Clone, Debug)]
pub struct MountainCar {
    pub params: MountainCarParams,
    pub position: f64,
    pub velocity: f64,
    pub steps: usize,
}

impl MountainCar {
    pub fn new(params: MountainCarParams) -> Self {
        MountainCar {
            params,
            position: -0.5,
            velocity: 0.0,
            steps: 0,
        }
    }

    /// Start a new episode: position uniform in the start window, velocity 0.
    pub fn reset(&mut self, rng: &mut Stream) -> (f64, f64) {
        self.position = rng.uniform_in(
            self.params.start_position_low,
            self.params.start_position_high,
        );
        self.velocity = 0.0;
        self.steps = 0;
        (self.position, self.velocity)
    }

    pub fn observation(&self) -> (f64, f64) {
        (self.position, self.velocity)
    }

    /// Step the episode; `done` includes the step cap.
    pub fn step(&mut self, action: usize) -> Result<(f64, bool)> {
        let ((p, v), reward, goal) =
            mountaincar_step((self.position, self.velocity), action, &self.params)?;
        self.position = p;
        self.velocity = v;
        self.steps += 1;
        let done = goal || self.steps >= self.params.max_episode_steps;
        Ok((reward, done))
    }

    /// Network input features: both coordinates scaled to [-1, 1].
    pub fn normalized_observation(&self) -> [f64; 2] {
        let p = &self.params;
        let pos = 2.0 * (self.position - p.min_position) / (p.max_position - p.min_position) - 1.0;
        let vel = self.velocity / p.max_speed;
        [pos, vel]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn near_valley_bottom_residual_force_is_small() {
        let params = MountainCarParams::default();
        let ((_, v), _, done) = mountaincar_step((-0.5, 0.0), 1, &params).unwrap();
        assert!(v.abs() <= params.gravity);
        assert!(!done);
    }

    #[test]
    fn left_wall_clamps_position_and_zeroes_velocity() {
        let params = MountainCarParams::default();
        let ((p, v), _, _) = mountaincar_step((-1.19, -0.07), 0, &params).unwrap();
        assert_eq!(p, params.min_position);
        assert_eq!(v, 0.0);
    }

    #[test]
    fn reaching_the_goal_ends_the_episode_with_step_reward() {
        let params = MountainCarParams::default();
        let ((p, _), reward, done) = mountaincar_step((0.45, 0.07), 2, &params).unwrap();
        assert!(p >= params.goal_position);
        assert!(done);
        assert_eq!(reward, -1.0);
    }

    #[test]
    fn episodes_are_deterministic_given_start_and_actions() {
        let params = MountainCarParams::default();
        let mut a = MountainCar::new(params);
        let mut b = MountainCar::new(params);
        let mut rng_a = Stream::seed_from_u64(7);
        let mut rng_b = Stream::seed_from_u64(7);
        a.reset(&mut rng_a);
        b.reset(&mut rng_b);
        for t in 0..200 {
            let action = t % 3;
            let (ra, da) = a.step(action).unwrap();
            let (rb, db) = b.step(action).unwrap();
            assert_eq!(ra.to_bits(), rb.to_bits());
            assert_eq!(da, db);
            assert_eq!(a.position.to_bits(), b.position.to_bits());
            if da {
                break;
            }
        }
    }

    #[test]
    fn step_cap_terminates_episodes() {
        let params = MountainCarParams::default();
        let mut env = MountainCar::new(params);
        let mut rng = Stream::seed_from_u64(9);
        env.reset(&mut rng);
        let mut done = false;
        let mut steps = 0;
        while !done {
            let (_, d) = env.step(1).unwrap();
            done = d;
            steps += 1;
            assert!(steps <= 200);
        }
        assert_eq!(steps, 200);
    }

    #[test]
    fn invalid_actions_are_rejected() {
        let params = MountainCarParams::default();
        assert!(mountaincar_step((-0.5, 0.0), 3, &params).is_err());
    }
}
