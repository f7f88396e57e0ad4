use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Everything that can go wrong in the numerical core.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A scalar parameter is outside the range the operation accepts.
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    /// Grid construction failed.
    InvalidGrid(&'static str),
    /// Two fields (or a field and a grid) have different lengths.
    ShapeMismatch { expected: usize, found: usize },
    /// The explicit wave step violates `dt <= 0.5 dr`.
    Cfl { dt: f64, limit: f64 },
    /// A solver produced NaN or infinity.
    NonFinite(&'static str),
    /// No admissible shift `c0 <= 2^64` satisfies the potential bound.
    InadmissibleProfile,
    /// A decay fit does not have enough samples or span.
    InsufficientSpan { samples: usize, span: f64 },
    /// Initial data violate the Dirichlet or support requirements.
    InvalidData(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter { name, value, reason } => {
                write!(f, "invalid parameter {name} = {value}: {reason}")
            }
            Error::InvalidGrid(msg) => write!(f, "invalid grid: {msg}"),
            Error::ShapeMismatch { expected, found } => {
                write!(f, "shape mismatch: expected {expected} nodes, found {found}")
            }
            Error::Cfl { dt, limit } => {
                write!(f, "time step {dt} exceeds the stability limit {limit}")
            }
            Error::NonFinite(what) => write!(f, "non-finite value in {what}"),
            Error::InadmissibleProfile => {
                write!(f, "no shift c0 <= 2^64 bounds |A'|^2/(aA) by h_a + eps")
            }
            Error::InsufficientSpan { samples, span } => write!(
                f,
                "insufficient data for a slope fit: {samples} samples spanning a factor {span}"
            ),
            Error::InvalidData(msg) => write!(f, "invalid initial data: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

pub(crate) fn check_param(name: &'static str, value: f64, ok: bool, reason: &'static str) -> Result<()> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name, value, reason })
    }
}
