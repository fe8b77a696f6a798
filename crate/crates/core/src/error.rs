use thiserror::Error;

use crate::expr::ParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("variable count mismatch: {left} vs {right}")]
    VarMismatch { left: usize, right: usize },

    #[error("too many variables: {0} (at most {max} supported)", max = crate::series::MAX_VARS)]
    TooManyVars(usize),

    #[error("truncation order {0} exceeds the supported maximum {max}", max = crate::series::MAX_ORDER)]
    OrderTooLarge(u32),

    #[error("variable index {index} out of range for {nvars} variables")]
    BadIndex { index: usize, nvars: usize },

    #[error("component {index} of the coordinate change has a nonzero constant term")]
    NonzeroConstant { index: usize },

    #[error("linear part of the coordinate change is singular")]
    SingularLinearPart,

    #[error("series has zero constant term")]
    ZeroConstantTerm,

    #[error("constant term {value} has no rational {n}-th root")]
    NoRationalRoot { value: String, n: u32 },

    #[error("not a Landau-Ginzburg pair: {0}")]
    NotLgPair(String),

    #[error("fiber Hessian block is singular (not relatively Morse)")]
    DegenerateFiberHessian,

    #[error("quadratic form is degenerate")]
    DegenerateForm,

    #[error("non-isolated or undecided singularity: no certificate up to order {0}")]
    NonIsolated(u32),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("insufficient precision: need order {needed}, series known to order {have}")]
    Precision { needed: u32, have: u32 },

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("integer {0} too large for square-class reduction")]
    Overflow(String),

    #[error("internal contract violated: {0}")]
    Contract(String),

    #[error(transparent)]
    Parse(#[from] ParseError),
}

impl Error {
    /// Stable machine-readable code, used in JSON reports.
    pub fn code(&self) -> &'static str {
        match self {
            Error::VarMismatch { .. } => "var_mismatch",
            Error::TooManyVars(_) => "too_many_vars",
            Error::OrderTooLarge(_) => "order_too_large",
            Error::BadIndex { .. } => "bad_index",
            Error::NonzeroConstant { .. } => "nonzero_constant",
            Error::SingularLinearPart => "singular_linear_part",
            Error::ZeroConstantTerm => "zero_constant_term",
            Error::NoRationalRoot { .. } => "no_rational_root",
            Error::NotLgPair(_) => "not_lg_pair",
            Error::DegenerateFiberHessian => "degenerate_fiber_hessian",
            Error::DegenerateForm => "degenerate_form",
            Error::NonIsolated(_) => "non_isolated",
            Error::Dimension(_) => "dimension_mismatch",
            Error::Precision { .. } => "insufficient_precision",
            Error::Resource(_) => "resource_limit",
            Error::Overflow(_) => "overflow",
            Error::Contract(_) => "contract_violation",
            Error::Parse(_) => "parse_error",
        }
    }
}
