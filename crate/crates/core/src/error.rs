use crate::kernel::KernelError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("no triangles left after removing degenerate and duplicate elements")]
    EmptyInput,
    #[error("internal invariant violated: {0}")]
    InvariantViolation(String),
    #[error("result has {0} unmatched boundary edges")]
    OpenBoundary(usize),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

impl Error {
    pub(crate) fn invariant(msg: impl Into<String>) -> Error {
        Error::InvariantViolation(msg.into())
    }
}
