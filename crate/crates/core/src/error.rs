use thiserror::Error;

/// Errors raised by the imaging toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("speed ratio {v} is not admissible for this reflector (negative radicand {radicand:.3e})")]
    AdmissibilityViolated { v: f64, radicand: f64 },
    #[error("zero vector where a direction is required")]
    ZeroVector,
    #[error("point has no preimage under the focusing map for v = {v}")]
    NotInvertible { v: f64 },
    #[error("source density vanishes on its bounding box")]
    DegenerateDensity,
    #[error("circulant embedding is not nonnegative definite (min eigenvalue {min_eigenvalue:.3e})")]
    EmbeddingFailure { min_eigenvalue: f64 },
    #[error("point lies outside the medium domain")]
    OutOfDomain,
    #[error("coincident points in the Green function")]
    CoincidentPoints,
    #[error("frequency step {step} exceeds the alias-free bound {bound}")]
    QuadratureUnderresolved { step: f64, bound: f64 },
    #[error("search grid is not spherical with uniform radial sampling")]
    GridNotRadial,
    #[error("second-moment truncation did not converge (last shell fraction {shell_fraction:.3e})")]
    TruncationNotConverged { shell_fraction: f64 },
    #[error("every candidate point is masked")]
    AllPointsMasked,
    #[error("averaging lattice has {count} points, at least 27 are required")]
    InsufficientAveraging { count: usize },
    #[error("averaged profile is identically zero")]
    InsufficientSignal,
    #[error("adaptive quadrature did not converge (estimated error {estimate:.3e})")]
    NonConvergent { estimate: f64 },
    #[error("trial {index} failed: {source}")]
    TrialFailed { index: usize, source: Box<Error> },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("i/o failure: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
