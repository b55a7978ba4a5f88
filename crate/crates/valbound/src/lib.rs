//! Double-sided bounds on optimal value functions in entropy-regularized and
//! standard reinforcement learning, the clipped Bellman operators they
//! license, and exact value-function composition.
//!
//! Any bounded table `Q` yields a sandwich on the unknown optimum: with the
//! Bellman residual `delta = B Q - Q` and horizon `H = 1/(1-gamma)`,
//!
//! ```text
//! r + gamma (E V + H inf delta)  <=  Q*  <=  r + gamma (E V + H sup delta)
//! ```
//!
//! The crate provides
//!
//! - [`mdp`]: the finite-MDP substrate — soft and standard backups,
//!   fixed-point solvers, Boltzmann policies, policy evaluation;
//! - [`bounds`]: residual fields, the double-sided bounds, the
//!   identity-action refinement, and suboptimality bounds;
//! - [`clipping`]: the clipped Bellman operator and clipped value iteration
//!   with hard, soft, and smoothed rules;
//! - [`composition`]: exact weighted log-sum-exp composition over absorbing
//!   task families, standard-RL composition with a corrective task,
//!   potential-based shaping transfer, and inverse rewards;
//! - [`lipschitz`]: dataset extrema bounds and fully propagated bounds for
//!   continuous spaces under Lipschitz assumptions;
//! - [`envs`]: the gridworld maze, MountainCar, and the identity-action
//!   augmentation;
//! - [`dqn`]: a from-scratch DQN whose targets are clipped to the derived
//!   bounds;
//! - [`runner`]: the config-driven experiment CLI behind the `valbound`
//!   binary.
//!
//! Start with the `examples/` directory: each example is a runnable tour of
//! one capability.

pub mod bounds;
pub mod clipping;
pub mod composition;
pub mod dqn;
pub mod envs;
pub mod error;
pub mod io;
pub mod lipschitz;
pub mod mdp;
pub mod rng;
pub mod runner;

pub use bounds::{bounds_from_delta, delta_soft, delta_standard, BoundPair, DeltaField};
pub use clipping::{clipped_backup, clipped_value_iteration, ClipConfig, ClipMethod};
pub use error::{Error, Result};
pub use mdp::{
    hard_backup, soft_backup, solve, Beta, QTable, RegularizationSpec, SolveReport, TabularMdp,
};
