use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("not a permutation of 1..={m}: {images:?}")]
    NotAPermutation { m: usize, images: Vec<usize> },

    #[error("player index {index} outside 1..={m}")]
    PlayerOutOfRange { index: usize, m: usize },

    #[error("expected {expected} coordinates, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("utility table for player {player} has {actual} entries, expected {expected}")]
    TableSize {
        player: usize,
        expected: usize,
        actual: usize,
    },

    #[error("sigma^{j} does not fix {j} (sigma^{j}({j}) = {image})")]
    SigmaMovesOwnIndex { j: usize, image: usize },

    #[error("sign vector entry v_{index} = {value} is not 0 or 1")]
    BadSign { index: usize, value: u8 },

    #[error("coefficient a^{i}_{j} = {value} not strictly inside (0,1)")]
    CoefficientOutOfRange { i: usize, j: usize, value: String },

    #[error("coefficients a^{i1}_{j} and a^{i2}_{j} coincide")]
    CoefficientCollision { i1: usize, i2: usize, j: usize },

    #[error("coefficient a^{i}_{j} is missing")]
    MissingCoefficient { i: usize, j: usize },

    #[error(
        "coefficients for column {j} order as {found:?}, characteristic tuple says {expected:?}"
    )]
    CoefficientOrder {
        j: usize,
        expected: Vec<usize>,
        found: Vec<usize>,
    },

    #[error("{i} is not a fixed point of the candidate permutation")]
    NotAFixedPoint { i: usize },

    #[error("profile coordinate {index} = {value} outside [0,1]")]
    ProbabilityOutOfRange { index: usize, value: String },

    #[error("invalid epsilon {0}")]
    BadEpsilon(f64),

    #[error("game file: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
