use alloc::string::String;
use core::fmt;

/// Failure modes shared by every module in the crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Operand shapes do not fit the requested operation.
    Dimension(String),
    /// An input violates an operation's precondition.
    Contract(String),
    /// An iterative kernel did not converge.
    Numeric(String),
    /// A Choi matrix has an eigenvalue below the PSD tolerance.
    NotCompletelyPositive { min_eigenvalue: f64 },
    /// `Φ(I)` is not safely invertible.
    Unitalization(String),
}

impl Error {
    /// Short machine-readable tag, used by the CLI's error objects.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Dimension(_) => "dimension",
            Error::Contract(_) => "contract",
            Error::Numeric(_) => "numeric",
            Error::NotCompletelyPositive { .. } => "not_cp",
            Error::Unitalization(_) => "unitalization",
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Dimension(msg) => write!(f, "dimension error: {msg}"),
            Error::Contract(msg) => write!(f, "contract violated: {msg}"),
            Error::Numeric(msg) => write!(f, "numerical failure: {msg}"),
            Error::NotCompletelyPositive { min_eigenvalue } => write!(
                f,
                "map is not completely positive (min Choi eigenvalue {min_eigenvalue:e})"
            ),
            Error::Unitalization(msg) => write!(f, "cannot unitalize map: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;

macro_rules! bail {
    ($kind:ident, $($arg:tt)*) => {
        return Err($crate::error::Error::$kind(alloc::format!($($arg)*)))
    };
}
pub(crate) use bail;
