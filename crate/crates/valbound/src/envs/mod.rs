//! Environment builders: the stochastic gridworld maze, MountainCar, and the
//! identity-action augmentation.

pub mod maze;
pub mod mountain_car;

pub use maze::{build_maze, maze_to_mdp, BuiltMaze, MazeSpec, DEFAULT_MAZE};
pub use mountain_car::{mountaincar_step, MountainCar, MountainCarParams, MOUNTAIN_CAR_ACTIONS};

use ndarray::{Array2, Array3};

use crate::bounds::IdentityActionMap;
use crate::error::Result;
use crate::mdp::TabularMdp;

/// Add one deterministic self-loop action to every state, with the given
/// reward, and return the augmented MDP with its verified identity map.
pub fn add_identity_action(
    mdp: &TabularMdp,
    identity_reward: f64,
) -> Result<(TabularMdp, IdentityActionMap)> {
    let ns = mdp.num_states;
    let na = mdp.num_actions;
    let mut transition = Array3::zeros((ns, na + 1, ns));
    let mut reward = Array2::zeros((ns, na + 1));
    for s in 0..ns {
        for a in 0..na {
            for sp in 0..ns {
                transition[[s, a, sp]] = mdp.transition[[s, a, sp]];
            }
            reward[[s, a]] = mdp.reward[[s, a]];
        }
        transition[[s, na, s]] = 1.0;
        reward[[s, na]] = identity_reward;
    }
    let augmented = TabularMdp::new(transition, reward, mdp.discount, mdp.absorbing().to_vec())?;
    let map = IdentityActionMap::verify(&augmented, vec![na; ns])?;
    Ok((augmented, map))
}
