use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{value} lies on the spectral cut at angle {theta}")]
    OnCut { value: Complex64, theta: f64 },

    #[error("zero has no logarithm")]
    ZeroInput,

    #[error("angle {theta} is not an Agmon angle: eigenvalue {witness} lies in the cut sector")]
    NotAgmon { witness: Complex64, theta: f64 },

    #[error("graded component {index} (parity {parity}) is not admissible: {source}")]
    ComponentNotAgmon {
        index: usize,
        parity: u32,
        #[source]
        source: Box<Error>,
    },

    #[error("Hurwitz zeta has a pole at s = 1")]
    PoleAtOne,

    #[error("spectral zeta function has a pole at s = {0}")]
    PoleAt(Complex64),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("hypothesis violated: eigenvalue {witness} lies in {sector}")]
    HypothesisViolated { sector: String, witness: Complex64 },

    #[error("infinitely many eigenvalues lie between angles {theta1} and {theta2}")]
    InfiniteCrossing { theta1: f64, theta2: f64 },

    #[error("spectrum is not symmetric about the real axis")]
    NotSymmetric,

    #[error("{quantity} should be real but has imaginary part {imag:e}")]
    RealityViolated { quantity: &'static str, imag: f64 },

    #[error("connection is not acyclic: log-parameter {0} is an integer")]
    NonAcyclic(Complex64),

    #[error("eigenvalue computation failed: {0}")]
    EigenFailure(String),

    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("schema error: {0}")]
    Schema(String),
}

impl Error {
    /// Stable machine-readable code used in CLI output.
    pub fn code(&self) -> &'static str {
        match self {
            Error::OnCut { .. } => "OnCut",
            Error::ZeroInput => "ZeroInput",
            Error::NotAgmon { .. } | Error::ComponentNotAgmon { .. } => "NotAgmon",
            Error::PoleAtOne => "PoleAtOne",
            Error::PoleAt(_) => "PoleAt",
            Error::Domain(_) => "DomainError",
            Error::HypothesisViolated { .. } => "HypothesisViolated",
            Error::InfiniteCrossing { .. } => "InfiniteCrossing",
            Error::NotSymmetric => "NotSymmetric",
            Error::RealityViolated { .. } => "RealityViolated",
            Error::NonAcyclic(_) => "NonAcyclic",
            Error::EigenFailure(_) => "EigenFailure",
            Error::InvalidSpectrum(_) => "InvalidSpectrum",
            Error::InvalidInput(_) => "InvalidInput",
            Error::Unsupported(_) => "Unsupported",
            Error::Schema(_) => "SchemaError",
        }
    }
}
