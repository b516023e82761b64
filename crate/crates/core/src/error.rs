use thiserror::Error;

/// Errors raised by the analysis routines.
///
/// Numeric payloads are carried as `f64` so the error type stays independent
/// of the scalar the computation ran in.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("evaluation point {x} outside domain [{lo}, {hi}]")]
    Domain { x: f64, lo: f64, hi: f64 },

    #[error("invalid argument `{name}`: {reason}")]
    Argument { name: &'static str, reason: String },

    #[error("schedule underflow: increment {eps} at x = {x} is below the resolvable floor {floor}")]
    ScheduleUnderflow { eps: f64, x: f64, floor: f64 },

    #[error("function is locally constant at x = {x}; Hölder exponent undefined")]
    LocallyConstant { x: f64 },

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("function is not {beta}-differentiable at {x}: velocity status {status}")]
    NotBetaDifferentiable { x: f64, beta: f64, status: String },

    #[error("quadrature did not converge at x = {x}: relative change {change:e} at {nodes} nodes")]
    Quadrature { x: f64, change: f64, nodes: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn argument(name: &'static str, reason: impl Into<String>) -> Error {
    Error::Argument {
        name,
        reason: reason.into(),
    }
}
