use std::fmt;

/// Errors shared by every module of the crate.
///
/// The coarse variants map onto distinct failure families: bad caller input,
/// a bounded search that ran out of room, an internal consistency check that
/// tripped, and the network/cache failures of the LMFDB client.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// The input violates a documented precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A bounded search finished without finding what it was asked for.
    /// Absence within the bound is never proof of absence.
    #[error("search exhausted: no {what} found within bound {bound}")]
    SearchExhausted { what: String, bound: u64 },

    /// A computation grew past its configured safety bound.
    #[error("{what} exceeded configured bound {bound}")]
    BoundExceeded { what: String, bound: u64 },

    /// Two independent computations of the same quantity disagreed.
    /// This always indicates a bug, never bad input.
    #[error("internal consistency check failed: {0}")]
    Inconsistency(String),

    /// The HTTP transport failed before a response arrived.
    #[error("network: {0}")]
    Network(String),

    /// The remote answered with a non-success status.
    #[error("http status {status} fetching {url}")]
    HttpStatus { status: u16, url: String },

    /// The remote payload did not match the expected shape.
    #[error("malformed response ({context}): {excerpt}")]
    MalformedResponse { context: String, excerpt: String },

    /// Reading or writing the response cache failed.
    #[error("cache {path}: {source}")]
    Cache {
        path: String,
        #[source]
        source: std::io::Error,
    },

    /// No cached copy exists and the network path is unavailable.
    #[error("no cached response for `{query}` and fetching failed: {reason}")]
    FetchUnavailable { query: String, reason: String },
}

impl Error {
    pub fn invalid_input(msg: impl fmt::Display) -> Self {
        Error::InvalidInput(msg.to_string())
    }

    pub fn search_exhausted(what: impl fmt::Display, bound: u64) -> Self {
        Error::SearchExhausted {
            what: what.to_string(),
            bound,
        }
    }

    pub fn bound_exceeded(what: impl fmt::Display, bound: u64) -> Self {
        Error::BoundExceeded {
            what: what.to_string(),
            bound,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
