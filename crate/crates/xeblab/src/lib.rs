//! File formats, reports and the command-line front end for `xeblab-core`.

pub mod cli;
pub mod error;
pub mod format;
pub mod report;

pub use error::{FileError, ParseError};
pub use format::{parse_circuit, parse_samples, serialize_circuit, serialize_samples};
