use thiserror::Error;

/// Errors produced anywhere in the pipeline.
///
/// Item and cell positions carried by variants are 0-based; `Display`
/// renders them 1-based.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("empty generator list")]
    EmptyGenerators,

    #[error("vector has no finite entry")]
    AllBottom,

    #[error("matrix is not square: row {} has {found} entries, expected {expected}", .row + 1)]
    NotSquare {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("empty matrix")]
    EmptyMatrix,

    #[error("asymmetry at ({}, {}): {a} vs {b}", .i + 1, .j + 1)]
    Asymmetric {
        i: usize,
        j: usize,
        a: String,
        b: String,
    },

    #[error("nonzero diagonal at ({pos}, {pos}): {1}", pos = .0 + 1)]
    NonzeroDiagonal(usize, String),

    #[error("nonpositive off-diagonal entry at ({}, {}): {value}", .i + 1, .j + 1)]
    NonPositive { i: usize, j: usize, value: String },

    #[error("not an ultrametric: triple ({}, {}, {}) violates the strengthened triangle inequality", .0 + 1, .1 + 1, .2 + 1)]
    NotUltrametric(usize, usize, usize),

    #[error("invalid tree: {0}")]
    InvalidTree(String),

    #[error("need at least {needed} items, got {found}")]
    TooFewItems { needed: usize, found: usize },

    #[error("q must be nonnegative, got {0}")]
    NegativeQ(String),

    #[error("homogenizing coordinate is bottom")]
    BottomHomogenizer,

    #[error("coordinate {0} is bottom")]
    BottomCoordinate(usize),

    #[error("vector is not in the cone: inequality row {} violated", .0 + 1)]
    NotInCone(usize),

    #[error("node {0} is not an internal node")]
    NotInternal(usize),

    #[error("node {node} is immobile (floor {floor} equals weight)")]
    Immobile { node: usize, floor: String },

    #[error("epsilon must be positive, got {0}")]
    NonPositiveEpsilon(String),

    #[error("ultrametric is at distance {found} from the input, nearest distance is {q}")]
    NotNearest { found: String, q: String },

    #[error("no witness: {0}")]
    NoWitness(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("unknown dataset `{0}`")]
    UnknownDataset(String),
}

pub type Result<T> = std::result::Result<T, Error>;
