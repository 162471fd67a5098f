use thiserror::Error;

/// Errors raised while reading TSPLIB problem or tour files.
#[derive(Debug, Error, PartialEq)]
pub enum TsplibError {
    #[error("line {line}: malformed header entry `{text}`")]
    MalformedHeader { line: usize, text: String },
    #[error("missing required header field {0}")]
    MissingField(&'static str),
    #[error("unsupported TYPE `{0}` (only symmetric TSP is handled)")]
    UnsupportedType(String),
    #[error("unsupported EDGE_WEIGHT_TYPE `{0}`")]
    UnsupportedWeightType(String),
    #[error("unsupported EDGE_WEIGHT_FORMAT `{0}`")]
    UnsupportedWeightFormat(String),
    #[error("line {line}: cannot parse `{text}` as a number")]
    BadNumber { line: usize, text: String },
    #[error("expected {expected} {what}, found {found}")]
    CountMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("node id {id} out of range 1..={dimension}")]
    NodeOutOfRange { id: i64, dimension: usize },
    #[error(transparent)]
    Instance(#[from] Error),
}

/// Domain errors for instances, tours and the search and statistics routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("an instance needs at least 3 cities, got {0}")]
    TooFewCities(usize),
    #[error("distance matrix is not symmetric at ({0}, {1})")]
    AsymmetricMatrix(usize, usize),
    #[error("distance matrix row {row} has {found} entries, expected {expected}")]
    MatrixShape { row: usize, expected: usize, found: usize },
    #[error("negative distance at ({0}, {1})")]
    NegativeDistance(usize, usize),
    #[error("tour is not a permutation of 0..{0}")]
    NotAPermutation(usize),
    #[error("tour has {found} cities but the instance has {expected}")]
    SizeMismatch { expected: usize, found: usize },
    #[error("2-opt move ({i}, {j}) removes adjacent edges or is out of range")]
    InvalidMove { i: usize, j: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("optimal cost {optimal} exceeds observed best cost {best}; optimum registry is wrong")]
    BrokenOptimum { best: i64, optimal: i64 },
    #[error("statistic undefined: {0}")]
    Degenerate(&'static str),
    #[error("empty sample")]
    EmptySample,
    #[error("optima pool is empty")]
    EmptyPool,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
