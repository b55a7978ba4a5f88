//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Array dimensions do not line up between operands.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// An MDP failed a structural invariant (row sums, absorbing self-loops, ...).
    #[error("invalid MDP: {0}")]
    InvalidMdp(String),

    /// A policy or prior table failed an invariant.
    #[error("invalid policy: {0}")]
    InvalidPolicy(String),

    /// A regularization spec failed an invariant.
    #[error("invalid regularization: {0}")]
    InvalidRegularization(String),

    /// Non-finite values where finite ones are required.
    #[error("non-finite value: {0}")]
    NonFinite(String),

    /// A fixed-point solve hit its iteration cap before reaching tolerance.
    #[error("did not converge in {iterations} iterations (residual {residual:.3e})")]
    NonConvergence { iterations: usize, residual: f64 },

    /// Lower bound exceeds upper bound.
    #[error("invalid bounds: lower {lower} > upper {upper}")]
    InvalidBounds { lower: f64, upper: f64 },

    /// Bounds require a finite horizon; gamma = 1 has none.
    #[error("bounds require gamma < 1 (horizon 1/(1-gamma) is undefined at gamma = 1)")]
    UndiscountedHorizon,

    /// A policy puts mass where the prior has none, making the KL term infinite.
    #[error(
        "policy assigns probability to action {action} in state {state} where the prior is zero"
    )]
    InfiniteKl { state: usize, action: usize },

    /// An identity-action map was not verified against the transition tensor.
    #[error("identity action map is not verified")]
    UnverifiedIdentityMap,

    /// A deterministic transition was required but the row is stochastic.
    #[error("stochastic transition at state {state}, action {action} where a deterministic one is required")]
    StochasticTransition { state: usize, action: usize },

    /// A Lipschitz feasibility condition failed; names the violated inequality.
    #[error("infeasible constants: {0}")]
    Infeasible(String),

    /// An operation needed at least one sample.
    #[error("empty dataset")]
    EmptyDataset,

    /// A composition or solver precondition failed; names the offending field.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Config validation failure, with the offending field path.
    #[error("invalid config field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the CLI: 2 for config/schema problems, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::Json(_) => 2,
            _ => 1,
        }
    }
}
