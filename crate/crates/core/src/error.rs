use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KdecError {
    #[error("complex dimension must be at least 1")]
    ZeroDimension,
    #[error("expected a {expected}x{expected} matrix, got {rows}x{cols}")]
    BadMatrixShape { expected: usize, rows: usize, cols: usize },
    #[error("matrix is not invertible")]
    NotInvertible,
    #[error("matrix neither commutes nor anticommutes with J")]
    NotInGroup,
    #[error("operands live on spaces of different real dimension ({0} vs {1})")]
    SpaceMismatch(usize, usize),
    #[error("operands have different element kinds")]
    KindMismatch,
    #[error("tensor is not an affine Kähler curvature tensor: {0}")]
    NotKaehler(String),
    #[error("bilinear form is not in the family {0}")]
    WrongParity(&'static str),
    #[error("outside the projector domain: {0}")]
    DomainViolation(String),
    #[error("the Ricci splitting is singular in real dimension {0}")]
    DegenerateDimension(usize),
    #[error("real dimension {actual} is below the required minimum {required}")]
    DimensionTooSmall { required: usize, actual: usize },
    #[error("unknown bilinear family `{0}`")]
    UnknownFamily(String),
    #[error("unknown W-space index {0}")]
    UnknownWSpace(u8),
    #[error("interpolation residual is nonzero; the degree bound {0} was too small")]
    DegreeBoundExceeded(String),
    #[error("invalid group family: {0}")]
    InvalidFamily(String),
    #[error("unknown section `{0}`")]
    UnknownSection(String),
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error("invalid tensor document: {0}")]
    Document(String),
}

pub type Result<T> = std::result::Result<T, KdecError>;
