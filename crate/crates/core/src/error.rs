use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("a lattice needs at least two cells, got {rows}x{cols}")]
    TooFewCells { rows: usize, cols: usize },
    #[error("at least two observations are required, got {0}")]
    TooFewObservations(usize),
    #[error("all values are equal; Moran's I is undefined")]
    ZeroVariance,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("location index {index} out of range for {n} locations")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("invalid weight {value} at ({row}, {col}); weights must be finite and positive")]
    InvalidWeight { row: usize, col: usize, value: f64 },
    #[error("location {0} lists itself as a neighbor")]
    SelfNeighbor(usize),
    #[error("location {row} lists neighbor {col} more than once")]
    DuplicateNeighbor { row: usize, col: usize },
    #[error("weights must be row-standardized for this operation")]
    NotRowStandardized,
    #[error("empty or inverted range")]
    EmptyRange,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("linear system (I - rho W) is singular or failed to converge")]
    SingularSystem,
    #[error("quadrature did not reach tolerance {tolerance:e} (estimated error {estimate:e})")]
    QuadratureFailure { tolerance: f64, estimate: f64 },
    #[error("GAL line {line}: {message}")]
    Gal { line: usize, message: String },
    #[error("column `{0}` not found in header")]
    MissingColumn(String),
    #[error("row {row}: value `{value}` in column `{column}` is not a number")]
    NonNumericValue { row: usize, column: String, value: String },
    #[error("{count} row(s) have a missing value (first at row {first_row})")]
    MissingValues { count: usize, first_row: usize },
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("dataset has no data rows")]
    EmptyDataset,
    #[error("id `{0}` is present in one input but not the other")]
    UnknownId(String),
    #[error("malformed GeoJSON: {0}")]
    MalformedGeoJson(String),
    #[error("feature {feature} has no `{key}` property")]
    JoinKeyMissing { feature: usize, key: String },
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::ZeroVariance | Error::SingularSystem | Error::QuadratureFailure { .. })
    }
}
