use thiserror::Error;

/// Errors raised by group construction, evaluation and the verification harnesses.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("generator {index} is not orthogonal (max |MᵀM - I| = {deviation:.3e})")]
    NonOrthogonalGenerator { index: usize, deviation: f64 },

    #[error("group closure exceeded the cap of {cap} elements")]
    GroupTooLarge { cap: usize },

    #[error("no Haar sampler for {group}")]
    UnsupportedSampler { group: String },

    #[error("input matrix is not unitary (max |AᴴA - I| = {deviation:.3e})")]
    NonUnitaryInput { deviation: f64 },

    #[error("no exact orbit criterion for {group}; compare fingerprints instead")]
    OrbitTestUnsupported { group: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("exponent magnitude {exponent:.1} exceeds the overflow guard")]
    OverflowRisk { exponent: f64 },

    #[error("|φ(x)| = {magnitude:.3e} is too small for an eigenvalue probe; choose another point")]
    ProbeAtZero { magnitude: f64 },

    #[error("lattice basis is degenerate (rank {rank} < {count})")]
    DegenerateBasis { rank: usize, count: usize },

    #[error("Bessel series did not converge within {terms} terms")]
    SeriesNotConverged { terms: usize },

    #[error("quadrature did not converge with {nodes} nodes")]
    QuadratureNotConverged { nodes: usize },

    #[error("group is not finite")]
    NotFinite,

    #[error("monomial count {count} exceeds the cap {cap}")]
    DegreeCapExceeded { count: usize, cap: usize },

    #[error("no invariant basis implemented for {group}")]
    FingerprintUnsupported { group: String },

    #[error("fingerprints use different bases ({left} vs {right})")]
    BasisMismatch { left: String, right: String },

    #[error("estimated quadrature error {estimate:.3e} exceeds tolerance {tol:.3e}")]
    GridTooCoarse { estimate: f64, tol: f64 },

    #[error("invalid group spec: {0}")]
    InvalidSpec(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Short machine-readable tag, used in CLI error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonOrthogonalGenerator { .. } => "NonOrthogonalGenerator",
            Error::GroupTooLarge { .. } => "GroupTooLarge",
            Error::UnsupportedSampler { .. } => "UnsupportedSampler",
            Error::NonUnitaryInput { .. } => "NonUnitaryInput",
            Error::OrbitTestUnsupported { .. } => "OrbitTestUnsupported",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::OverflowRisk { .. } => "OverflowRisk",
            Error::ProbeAtZero { .. } => "ProbeAtZero",
            Error::DegenerateBasis { .. } => "DegenerateBasis",
            Error::SeriesNotConverged { .. } => "SeriesNotConverged",
            Error::QuadratureNotConverged { .. } => "QuadratureNotConverged",
            Error::NotFinite => "NotFinite",
            Error::DegreeCapExceeded { .. } => "DegreeCapExceeded",
            Error::FingerprintUnsupported { .. } => "FingerprintUnsupported",
            Error::BasisMismatch { .. } => "BasisMismatch",
            Error::GridTooCoarse { .. } => "GridTooCoarse",
            Error::InvalidSpec(_) => "InvalidSpec",
            Error::InvalidArgument(_) => "InvalidArgument",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
