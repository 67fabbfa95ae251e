//! Output plumbing shared between the `fluidlim` binary and its
//! integration tests: CSV writers/readers, JSON report shapes, and the
//! SVG plot writer.

pub mod csvout;
pub mod report;
pub mod svg;

/// Failure with the exit code it maps to: 2 usage, 3 I/O, 4 invariant.
pub struct CliError {
    pub code: u8,
    pub message: String,
}

pub type CliResult<T> = Result<T, CliError>;

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError {
        code: 2,
        message: msg.into(),
    }
}

impl From<fluidlim::Error> for CliError {
    fn from(e: fluidlim::Error) -> Self {
        use fluidlim::Error::*;
        let code = match e {
            InvalidParameter(_) | DimensionMismatch { .. } | OutOfRange(_) => 2,
            OutsideDomain { .. } | ModelInconsistency(_) | MaxJumpsExceeded { .. }
            | NonFinite(_) => 4,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError {
            code: 3,
            message: e.to_string(),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError {
            code: 3,
            message: e.to_string(),
        }
    }
}
