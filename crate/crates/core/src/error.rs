//! Error type shared by every layer of the kernel.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at offset {offset}: {msg}")]
    Parse { offset: usize, msg: String },

    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),

    #[error("unknown corpus id `{0}`")]
    UnknownId(String),

    #[error("division by a symbolically zero expression")]
    DivisionByZero,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("jet order {order} exceeds the pinned truncation order {max}")]
    TruncationOverflow { order: usize, max: usize },

    #[error("on-shell substitution did not reach a fixpoint within {0} passes")]
    NonTermination(usize),

    #[error("unsupported form: {0}")]
    UnsupportedForm(String),

    #[error("symbolically singular Jacobian")]
    SingularJacobian,

    #[error("flux Jacobian rank is deficient: {0}")]
    RankDeficient(String),

    #[error("fluxes depend on derivatives; use the linearization route")]
    NonFunctionFluxes,

    #[error("divergence does not vanish on solutions; residual: {0}")]
    NotAConservationLaw(String),

    #[error("field is not a sub-symmetry of the law's sub-system; residual: {0}")]
    NotASubsymmetry(String),

    #[error("unknown `{0}` occurs nonlinearly")]
    NonlinearUnknown(String),

    #[error("invalid system: {0}")]
    InvalidSystem(String),

    #[error("invalid definition file: {0}")]
    InvalidFile(String),
}

pub type Result<T> = std::result::Result<T, Error>;
