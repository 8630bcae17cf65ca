use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter `{name}` must be positive, got {value}")]
    NonPositiveParameter { name: &'static str, value: f64 },

    #[error("a relay network needs at least 2 hops, got {0}")]
    TooFewHops(usize),

    #[error("relay stage {stage} has {relays} usable relays but {pairs} S-D pairs need distinct relays")]
    TooFewRelays {
        stage: usize,
        relays: usize,
        pairs: usize,
    },

    #[error("expected {expected} SINR thresholds (one per S-D pair), got {got}")]
    ThresholdCountMismatch { expected: usize, got: usize },

    #[error("expected 1 or {expected} per-stage relay counts, got {got}")]
    RelayCountMismatch { expected: usize, got: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("trellis has no states")]
    EmptyStateSpace,

    #[error("exhaustive search needs {paths} paths, above the budget of {budget}")]
    BudgetExceeded { paths: u128, budget: u128 },

    #[error("no free relay left in stage {stage} for user {user}")]
    InfeasibleResidual { stage: usize, user: usize },

    #[error("unknown selection scheme `{0}`")]
    UnknownScheme(String),

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("{0}")]
    Invalid(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
