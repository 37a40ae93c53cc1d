use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("schema error: {0}")]
    Schema(String),
    #[error("dangling identifier `{id}` referenced from {context}")]
    Dangling { id: String, context: String },
    #[error("duplicate identifier `{0}`")]
    Duplicate(String),
    #[error("unknown curve `{0}`")]
    UnknownCurve(String),
    #[error("curve `{0}` is a core curve and cannot belong to a multicurve")]
    CoreInMulticurve(String),
    #[error("matrix shape error: {0}")]
    Shape(String),
    #[error("matrix is not contracting (spectral radius >= 1)")]
    NotContracting,
    #[error("rational entry exceeds the {limit}-bit size guard")]
    BitSizeExceeded { limit: u64 },
    #[error("multicurve is not stable: preimage of `{curve}` is homotopic to `{target}`, which is outside the multicurve")]
    Unstable { curve: String, target: String },
    #[error("enumeration cap exceeded: {count} curves > cap {cap}")]
    CapExceeded { count: usize, cap: usize },
    #[error("piece dynamics error: {0}")]
    Dynamics(String),
    #[error("renormalization error: {0}")]
    Renormalization(String),
    #[error("weight construction error: {0}")]
    Weights(String),
    #[error("missing Grötzsch constant for annular piece `{0}`")]
    MissingConstant(String),
    #[error("reduction identity failed in {block}: {detail}")]
    Reduction { block: String, detail: String },
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Errors caused by the input itself rather than by a failed check.
    pub fn is_input(&self) -> bool {
        matches!(
            self,
            Error::Syntax { .. }
                | Error::Schema(_)
                | Error::Dangling { .. }
                | Error::Duplicate(_)
                | Error::UnknownCurve(_)
                | Error::CoreInMulticurve(_)
                | Error::Unstable { .. }
                | Error::CapExceeded { .. }
                | Error::MissingConstant(_)
                | Error::Argument(_)
                | Error::Io(_)
        )
    }
}
