use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Everything that can go wrong when building or querying an auction.
///
/// Every variant is a caller-side validation failure; there are no internal
/// error states in the numerical code.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("probability list is empty")]
    EmptyProbabilities,

    #[error("probability at position {index} is {value}, outside [0, 1]")]
    ProbabilityOutOfRange { index: usize, value: f64 },

    #[error("no potential participants")]
    NoParticipants,

    #[error("degenerate auction: the equilibrium needs at least two bidders, got {0}")]
    DegenerateAuction(usize),

    #[error("bidder {bidder} outside 1..={count}")]
    BidderOutOfRange { bidder: usize, count: usize },

    #[error("caller index {0} refers to a bidder that never participates")]
    DroppedBidder(usize),

    #[error("piece {piece} outside 1..={last}")]
    PieceOutOfRange { piece: usize, last: usize },

    #[error("unused piece {0}: its prefix product of failure probabilities is zero")]
    UnusedPiece(usize),

    #[error("atom has no density")]
    AtomHasNoDensity,

    #[error("probability level {0} outside [0, 1]")]
    LevelOutOfRange(f64),

    #[error("bid {bid} outside [{low}, {high}]")]
    BidOutOfRange { bid: f64, low: f64, high: f64 },

    #[error("saboteur and target must be different bidders (both {0})")]
    SelfSabotage(usize),

    #[error("true target probability {actual} must lie in [0, {announced})")]
    NotASabotage { actual: f64, announced: f64 },

    #[error("trial count must be at least 1")]
    NoTrials,

    #[error("expected {expected} participation flags and {participants} levels, got {levels} levels")]
    DrawCountMismatch { expected: usize, participants: usize, levels: usize },

    #[error("could not start worker threads: {0}")]
    ThreadPool(String),

    #[error("audit grid needs at least 2 points, got {0}")]
    GridTooSmall(usize),

    #[error("uniform case needs n >= 2 and p in (0, 1], got n={n}, p={p}")]
    InvalidUniformCase { n: usize, p: f64 },

    #[error("invalid config: {0}")]
    Parse(String),
}
