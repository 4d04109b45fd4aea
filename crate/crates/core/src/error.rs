use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
    #[error("name collision: `{0}` is already a free variable")]
    NameCollision(String),
    #[error("malformed rational `{0}`")]
    BadRational(String),
    #[error("invalid joint distribution: {0}")]
    InvalidJoint(String),
    #[error("variable limit exceeded: {got} > {limit}")]
    LimitExceeded { got: usize, limit: usize },
    #[error("arity mismatch for {gadget}: expected {expected}, got {got}")]
    Arity { gadget: String, expected: usize, got: usize },
    #[error("invalid parameter for {gadget}: {reason}")]
    Parameter { gadget: String, reason: String },
    #[error("free-variable mismatch: {0}")]
    FreeVarMismatch(String),
    #[error("invalid tile set: {0}")]
    InvalidTileSet(String),
    #[error("invalid tiling: {0}")]
    InvalidTiling(String),
    #[error("instance too large: {0}")]
    InstanceTooLarge(String),
    #[error("row `{tag}` is not a conditional-independence row or cardinality bound")]
    NotLintClean { tag: String },
    #[error("system lacks a designated first variable")]
    MissingDesignated,
    #[error("invalid CI system: {0}")]
    InvalidCiSystem(String),
    #[error("witness construction refused: {0}")]
    WitnessRefused(String),
    #[error("roster mismatch: {0}")]
    RosterMismatch(String),
    #[error("certificate does not replay: {0}")]
    BadCertificate(String),
    #[error("json: {0}")]
    Json(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
