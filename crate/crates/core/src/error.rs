use thiserror::Error;

/// Errors produced by the filtering library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A pivot of the banded factorization fell below the admissible floor.
    #[error("banded factorization failed at pivot {index} (value {pivot:e})")]
    Factorization { index: usize, pivot: f64 },

    /// Inner solve failure raised from inside the ADMM loop.
    #[error("solver failed at iteration {iteration} (primal {primal:e}, dual {dual:e}): {source}")]
    Solver {
        iteration: usize,
        primal: f64,
        dual: f64,
        #[source]
        source: Box<Error>,
    },

    /// Streaming solve failure, tagged with the stream position of the sample.
    #[error("stream solve failed at position {position}: {source}")]
    Stream {
        position: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("external baseline not bundled: {0}")]
    NotBundled(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

pub(crate) fn check_len(what: &str, got: usize, want: usize) -> Result<()> {
    if got == want {
        Ok(())
    } else {
        Err(invalid(format!("{what}: expected length {want}, got {got}")))
    }
}
