use thiserror::Error;

/// Failure categories shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("wrong representation: {0}")]
    Representation(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("unsupported in this representation: {0}")]
    UnsupportedRepresentation(String),
    #[error("symmetry broken: {0}")]
    SymmetryBroken(String),
    #[error("integrity violation: {0}")]
    Integrity(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("degenerate model: {0}")]
    Model(String),
    #[error("outside domain: {0}")]
    Domain(String),
    #[error("integrator failure: {0}")]
    Integrator(String),
    #[error("provenance mismatch: {0}")]
    Provenance(String),
    #[error("degenerate profile: {0}")]
    DegenerateProfile(String),
    #[error("eigensolver failed: {0}")]
    Eigensolver(String),
}

impl Error {
    /// Short machine-readable category name.
    pub fn category(&self) -> &'static str {
        match self {
            Error::Capacity(_) => "capacity",
            Error::Representation(_) => "representation",
            Error::Dimension(_) => "dimension",
            Error::UnsupportedRepresentation(_) => "unsupported-representation",
            Error::SymmetryBroken(_) => "symmetry-broken",
            Error::Integrity(_) => "integrity",
            Error::InsufficientData(_) => "insufficient-data",
            Error::Model(_) => "model",
            Error::Domain(_) => "domain",
            Error::Integrator(_) => "integrator",
            Error::Provenance(_) => "provenance",
            Error::DegenerateProfile(_) => "degenerate-profile",
            Error::Eigensolver(_) => "eigensolver",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
