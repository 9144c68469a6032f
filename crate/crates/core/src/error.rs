use thiserror::Error;

use crate::profile::Violation;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid profile: {}", join_violations(.0))]
    InvalidProfile(Vec<Violation>),

    #[error("malformed matching: {0}")]
    MalformedMatching(String),

    #[error("instance too large: more than {cap} candidate matchings")]
    InstanceTooLarge { cap: u64 },

    #[error("search space too large: {size} candidates exceeds cap {cap}")]
    SearchSpaceTooLarge { size: u128, cap: u64 },

    #[error("scenario mismatch: {0}")]
    ScenarioMismatch(String),

    #[error("map mismatch: {0}")]
    MapMismatch(String),

    #[error("certificate unavailable: {0}")]
    CertificateUnavailable(String),

    #[error("invalid lie scenario: {0}")]
    InvalidScenario(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}
