//! From-scratch DQN: multilayer perceptron with explicit backpropagation,
//! replay buffer, target network, and the clipped training loop.

pub mod mlp;
pub mod replay;
pub mod train;

pub use mlp::{mlp_gradients, ClipPenalty, Gradients, MlpParams};
pub use replay::{ReplayBuffer, Transition};
pub use train::{dqn_train, fa_bounds, DqnConfig, DqnRun, TrainLog, TrainLogRow};
