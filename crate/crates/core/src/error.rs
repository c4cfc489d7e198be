use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("row {row}: expected {expected} fields, found {found}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("schema error: {0}")]
    Schema(String),
    #[error("cell (row {row}, column {column}): cannot read {value:?} as a number")]
    Cell {
        row: usize,
        column: String,
        value: String,
    },
    #[error("row {row}: response indicator {column} must be observed and coded 0/1")]
    ResponseIndicator { row: usize, column: String },
    #[error("{0} must not be empty")]
    Empty(&'static str),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("no usable rows for the fit")]
    NoUsableRows,
    #[error("singular fit: {rows} usable rows for {columns} retained columns")]
    Singular { rows: usize, columns: usize },
    #[error("response has a single class; logistic fit is degenerate")]
    DegenerateResponse,
    #[error("column {column}: level {level:?} was not seen when fitting")]
    UnseenLevel { column: String, level: String },
    #[error("column {column}: row {row} is missing a value required by the model")]
    MissingPredictor { column: String, row: usize },
    #[error("perfect fit (rss = 0): AIC is unbounded below")]
    PerfectFit,
    #[error("zero variance: {0}")]
    ZeroVariance(&'static str),
    #[error("insufficient data: need at least {needed} {what}, found {found}")]
    InsufficientData {
        what: &'static str,
        needed: usize,
        found: usize,
    },
    #[error("variance undefined: stratum {stratum} has a single PSU")]
    SinglePsu { stratum: u64 },
    #[error("weighting classes without respondents: {classes:?}")]
    EmptyClasses { classes: Vec<u64> },
    #[error("raking infeasible: {0}")]
    Infeasible(String),
}
