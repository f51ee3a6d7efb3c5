use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the library can report.
///
/// The variants are split along the line the CLI cares about: `Input`-like
/// problems (malformed descriptions, mismatched oracles, caps) versus
/// mathematical failures (a law that does not hold, an infeasible filling).
#[derive(Debug, Error)]
pub enum Error {
    #[error("group axiom violated: {0}")]
    GroupAxiom(String),
    #[error("homomorphism law violated: {0}")]
    HomLaw(String),
    #[error("element {element} does not belong to group {group}")]
    NotAMember { element: String, group: String },
    #[error("oracle mismatch: {0}")]
    OracleMismatch(String),
    #[error("degree error: {0}")]
    Degree(String),
    #[error("too large: {what} has dimension {dimension} (cap {cap})")]
    TooLarge {
        what: String,
        dimension: u128,
        cap: u128,
    },
    #[error("group is not finite: {0}")]
    NotFinite(String),
    #[error("not a boundary over this support")]
    NotABoundary,
    #[error("support exhausted at word-length radius {0}")]
    SupportExhausted(usize),
    #[error("linear program: {0}")]
    Lp(String),
    #[error("mitosis: {0}")]
    Mitosis(String),
    #[error("pipeline check failed: {0}")]
    Pipeline(String),
    #[error("certificate: {0}")]
    Certificate(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Whether this error reports a mathematical failure (exit code 1 in the
    /// CLI) rather than a malformed input (exit code 2).
    pub fn is_mathematical(&self) -> bool {
        matches!(
            self,
            Error::HomLaw(_)
                | Error::NotABoundary
                | Error::SupportExhausted(_)
                | Error::Mitosis(_)
                | Error::Pipeline(_)
                | Error::Certificate(_)
                | Error::GroupAxiom(_)
        )
    }
}
