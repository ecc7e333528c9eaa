use alloc::string::String;

/// Errors produced by the radial solvers and reconstruction routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument violates an operation precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// Two fields (or a field and a grid) do not share the same nodes.
    #[error("fields are defined on different grids")]
    GridMismatch,
    /// A coefficient discontinuity does not coincide with a grid node.
    #[error("coefficient breakpoint r = {0} is not a grid node")]
    BreakpointOffGrid(f64),
    /// Elimination met a pivot that is numerically zero.
    #[error("singular system at k = {k}: pivot magnitude {pivot:e} at row {row}")]
    SingularSystem { k: f64, pivot: f64, row: usize },
    /// A computation produced NaN or infinity.
    #[error("non-finite value produced in {0}")]
    NonFinite(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
