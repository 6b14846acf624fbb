use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid density matrix: {invariant} violated ({detail})")]
    InvalidState { invariant: &'static str, detail: String },

    #[error("unphysical decomposition: smallest eigenvalue {min_eigenvalue:.3e} is negative")]
    Unphysical { min_eigenvalue: f64 },

    #[error("parameter {name} = {value} out of range (expected {expected})")]
    Parameter {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("condition not applicable: {0}")]
    NotApplicable(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("underdetermined: {0}")]
    Underdetermined(String),
}

impl Error {
    pub(crate) fn parameter(name: &'static str, value: f64, expected: &'static str) -> Self {
        Error::Parameter { name, value, expected }
    }
}
