use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("value {value} outside domain {domain}")]
    Domain { value: f64, domain: &'static str },

    #[error("invalid probability vector: {0}")]
    InvalidProbabilities(String),

    #[error("invalid joint distribution: total mass {0}")]
    InvalidMass(f64),

    #[error("record has zero likelihood under every ensemble member")]
    ImpossibleRecord,

    #[error("protocol invariant violated: {0}")]
    Invariant(String),

    #[error("residual of member {0} was annihilated")]
    Annihilated(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unknown ensemble {0:?}")]
    UnknownEnsemble(String),

    #[error("operation requires pure product members")]
    MixedMembers,

    #[error("no root of the matching condition below the pole for epsilon = {0}")]
    NoRoot(f64),

    #[error("pole crossed: nu * sqrt(1 - delta^2) = {0} >= 1")]
    Pole(f64),

    #[error("advice plan infeasible: {0}")]
    Infeasible(String),

    #[error(
        "protocol does not identify the ensemble perfectly (information deficit {0:.3e} bits)"
    )]
    Imperfect(f64),

    #[error("tree document: {0}")]
    Format(String),
}
