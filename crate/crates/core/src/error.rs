use thiserror::Error;

/// Errors produced by the simulation, dataset and training layers.
///
/// The variants line up with the exit-code classes of the command-line
/// driver: configuration and usage problems are caller mistakes, generation
/// and parse failures concern data, numerical failures come from the solver.
#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("generation error: {0}")]
    Generation(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
