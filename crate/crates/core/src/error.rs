use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    /// The document parsed but violates a model invariant.
    #[error("invalid game: {0}")]
    Invalid(String),

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("invalid rational {0:?}")]
    BadRational(String),

    #[error("unknown state {0:?}")]
    UnknownState(String),

    #[error("unknown player {0:?}")]
    UnknownPlayer(String),

    #[error("action {action:?} is not allowed for player {player:?} in state {state:?}")]
    DisallowedAction {
        state: String,
        player: String,
        action: String,
    },

    #[error("strategies belong to different players or arenas")]
    Mismatch,

    #[error("lower bounds at state {state:?} for player {player:?} sum to more than 1")]
    Infeasible { state: String, player: String },

    #[error("{what} limit exceeded: {count} > {limit}")]
    CapExceeded {
        what: &'static str,
        count: u128,
        limit: u128,
    },

    #[error("game is not cycle-free (cycling states: {0:?})")]
    NotCycleFree(Vec<String>),

    #[error("epsilon {epsilon} outside the admissible range (0, {max}]")]
    EpsilonOutOfRange { epsilon: String, max: String },

    #[error("player {player:?} has {count} actions at state {state:?}; at most {max} supported")]
    TooManyActions {
        player: String,
        state: String,
        count: usize,
        max: usize,
    },

    #[error("negative terminal rewards are not supported here (shift them first)")]
    NegativeRewards,

    #[error("set of states is not a strong component")]
    NotStrongComponent,

    #[error("strategies are further apart than the imprecision bound")]
    DistancePrecondition,

    #[error("singular linear system")]
    Singular,

    #[error("external solver: {0}")]
    Solver(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
