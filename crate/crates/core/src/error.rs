use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Errors raised by the algorithmic core.
///
/// The variants mirror the exit-code classes of the command-line driver:
/// configuration and argument problems are usage errors, `Resource` is the
/// 2^n memory wall.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Invalid circuit distribution or gate structure.
    Config(&'static str),
    /// An argument does not fit the operation (length mismatch, k too large, ...).
    Argument(alloc::string::String),
    /// A numeric parameter is outside the domain where the formula holds.
    Domain(alloc::string::String),
    /// Simulation would exceed the configured qubit cap.
    Resource { qubits: usize, max_qubits: usize, bytes: u128 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Config(msg) => write!(f, "configuration error: {msg}"),
            Error::Argument(msg) => write!(f, "argument error: {msg}"),
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Resource { qubits, max_qubits, bytes } => write!(
                f,
                "resource error: {qubits} qubits exceeds the cap of {max_qubits} \
                 (statevector would need {bytes} bytes)"
            ),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}

macro_rules! argument {
    ($($arg:tt)*) => { $crate::error::Error::Argument(alloc::format!($($arg)*)) };
}

macro_rules! domain {
    ($($arg:tt)*) => { $crate::error::Error::Domain(alloc::format!($($arg)*)) };
}

pub(crate) use argument;
pub(crate) use domain;
