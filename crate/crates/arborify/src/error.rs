//! Error types shared across the algebra, evaluation and IO layers.

use thiserror::Error;

use crate::freq::Frequency;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum AlgebraError {
    #[error("invalid decoration: {0}")]
    InvalidDecoration(String),

    #[error("Kirchhoff relation violated at inner node decorated {node}: signed child sum {expected} does not match the signed node decoration")]
    Kirchhoff { node: Frequency, expected: Frequency },

    #[error("model mismatch: expected {expected:?}, got {got:?}")]
    ModelMismatch {
        expected: crate::pairing::Model,
        got: crate::pairing::Model,
    },

    #[error("invalid pairing: {0}")]
    InvalidPairing(String),

    #[error("invalid letter: {0}")]
    InvalidLetter(String),

    #[error("cannot add coefficients with distinct mu powers ({0} vs {1})")]
    MuMismatch(u32, u32),

    #[error("size guard exceeded: {0}")]
    SizeGuard(String),

    #[error("no slot decorated with frequency {0}")]
    NoSuchFrequency(Frequency),

    #[error("green switch needs uniform hat flags on each frequency class: {0}")]
    MixedHats(String),

    #[error("integration by parts: {0}")]
    Ibp(String),

    #[error("{0}")]
    Other(String),
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum EvalError {
    #[error("unpaired leaf (frequency {0}) in fully-paired evaluation mode")]
    UnpairedLeaf(Frequency),

    #[error("algebra error during evaluation: {0}")]
    Algebra(#[from] AlgebraError),

    #[error("evaluation parameters invalid: {0}")]
    BadParams(String),

    #[error("word is not evaluable: {0}")]
    BadWord(String),
}

pub type AlgebraResult<T> = Result<T, AlgebraError>;
pub type EvalResult<T> = Result<T, EvalError>;
