use thiserror::Error;

/// Errors surfaced by the engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("point {0:?} lies outside the admissible domain (boundary margin included)")]
    PointOutsideDomain(Vec<f64>),
    #[error("differential is rank deficient at {0:?}: not an immersed point")]
    RankDeficient(Vec<f64>),
    #[error("umbilic point: rho^2 = {rho2:.3e} below threshold {threshold:.3e}")]
    UmbilicPoint { rho2: f64, threshold: f64 },
    #[error("finite-difference step {0} too large: stencil leaves the domain")]
    StepTooLarge(f64),
    #[error("degenerate spectrum: all eigenvalues fall in a single cluster")]
    DegenerateSpectrum,
    #[error("indeterminate spectrum: {0}")]
    IndeterminateSpectrum(String),
    #[error("mu is not real: radicand {0:.3e} <= 0")]
    NonRealMu(f64),
    #[error("parameter out of range: {0}")]
    ParamOutOfRange(String),
    #[error("surface lives in the wrong model: expected c = {expected}, got c = {got}")]
    SurfaceModelMismatch { expected: i8, got: i8 },
    #[error("unknown catalog entry: {0}")]
    UnknownCatalogEntry(String),
    #[error("insufficient samples: {0}")]
    InsufficientSamples(String),
    #[error("integrator step too large: local error estimate {0:.3e} exceeds 1e-10")]
    IntegratorStepTooLarge(f64),
    #[error("invalid spec file: {0}")]
    InvalidSpecFile(String),
}

pub type Result<T> = std::result::Result<T, Error>;
