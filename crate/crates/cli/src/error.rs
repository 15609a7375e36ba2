use std::fmt;

/// Failure of a run, mapped onto the process exit status.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(bh_core::Error),
    Io(std::io::Error),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn category(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Core(e) => e.category(),
            CliError::Io(_) => "io",
        }
    }

    /// 2 for invalid input, 3 for numerical or output failures.
    pub fn exit_code(&self) -> u8 {
        use bh_core::Error as E;
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(
                E::Capacity(_)
                | E::Representation(_)
                | E::Dimension(_)
                | E::UnsupportedRepresentation(_)
                | E::SymmetryBroken(_)
                | E::Domain(_)
                | E::Provenance(_),
            ) => 2,
            CliError::Core(_) | CliError::Io(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<bh_core::Error> for CliError {
    fn from(e: bh_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.into())
    }
}
