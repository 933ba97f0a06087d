//! File formats: DIMACS CNF, OR-Library set covering, plain-text TSP
//! matrices, and the CSV outputs.

pub mod csv;
pub mod dimacs;
pub mod orlib;
pub mod tsp_text;

use thiserror::Error;

pub use csv::{
    format_g6, parse_run_csv, write_histogram_csv, write_run_csv, write_trace_csv,
    HISTOGRAM_CSV_HEADER, RUN_CSV_HEADER, TRACE_CSV_HEADER,
};
pub use dimacs::{parse_dimacs, parse_dimacs_lenient, write_dimacs};
pub use orlib::{parse_orlib_scp, write_orlib_scp};
pub use tsp_text::{parse_tsp_matrix, write_tsp_matrix};

#[derive(Debug, Error, PartialEq)]
pub enum ParseError {
    #[error("missing header")]
    MissingHeader,
    #[error("bad header: {0}")]
    BadHeader(String),
    #[error("literal {literal} out of range for {n_vars} variables")]
    LiteralOutOfRange { literal: i32, n_vars: usize },
    #[error("clause {index} is empty")]
    EmptyClause { index: usize },
    #[error("last clause is not zero-terminated")]
    UnterminatedClause,
    #[error("header declares {header} clauses but the body has {actual}")]
    ClauseCountMismatch { header: usize, actual: usize },
    #[error("header declares {header} variables but the maximum referenced is {actual}")]
    MaxVariableMismatch { header: usize, actual: usize },
    #[error("row {row} lists column {column}, valid range is 1..={n_cols}")]
    ColumnOutOfRange { row: usize, column: i64, n_cols: usize },
    #[error("row {row} has no covering columns")]
    EmptyRow { row: usize },
    #[error("file ends early: expected {0}")]
    Truncated(String),
    #[error("unexpected trailing content: '{0}'")]
    TrailingGarbage(String),
    #[error("bad token: {0}")]
    BadToken(String),
}
