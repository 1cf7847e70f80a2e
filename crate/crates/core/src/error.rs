use thiserror::Error;

use crate::symbolic::Witness;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid class: {0}")]
    InvalidClass(String),

    #[error("out of range: {0}")]
    OutOfRange(String),

    #[error("missing value for symbol {0}")]
    MissingSymbol(String),

    #[error("r = {0} does not have the parity of c1·d - 1")]
    ParityInadmissible(i64),

    #[error("seed conflict: {message}")]
    SeedConflict {
        message: String,
        witness: Option<Box<Witness>>,
    },

    #[error("invalid seed: {0}")]
    InvalidSeed(String),

    #[error("coefficient still depends on unknowns: {0}")]
    SymbolicCoefficient(String),

    #[error("illegal move: {0}")]
    IllegalMove(String),

    #[error("curve record is not marked")]
    UnmarkedRecord,

    #[error("seed file {path}: {source}")]
    SeedFile {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("seed file parse error: {0}")]
    SeedParse(#[from] serde_json::Error),
}
