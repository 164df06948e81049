use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// How a failure should be reported to a caller that maps errors onto exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad input: parameters, field amplitudes, size limits.
    Config,
    /// A numerical procedure could not produce a result.
    Numerical,
    /// A result was produced but failed its own verification.
    Consistency,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("gamma index {0} is outside 0..=15")]
    GammaIndex(usize),
    #[error("matrix is singular (|det| = {det:e})")]
    Singular { det: f64 },
    #[error("multi-index {0:?} has an odd coordinate sum")]
    OddParity([i32; 4]),
    #[error("{0:?} is not a stencil shift")]
    NotAShift([i32; 4]),
    #[error("g_max must be at least 1, got {0}")]
    GMax(u32),
    #[error("node {0:?} is outside the model")]
    OutsideModel([i32; 4]),
    #[error("field constraint violated: {0}")]
    FieldConstraint(String),
    #[error("field intensity I_A is zero")]
    ZeroIntensity,
    #[error("free-field resonance at node {0:?}")]
    Resonance([i32; 4]),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("dependent equations at node {0:?}")]
    RankDeficient([i32; 4]),
    #[error("solution check failed at node {node:?}: residual {residual:e}")]
    Verification { node: [i32; 4], residual: f64 },
    #[error("inner-product matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("model too large for the dense oracle: dimension {dim} exceeds {limit}")]
    SizeGuard { dim: usize, limit: usize },
    #[error("no bracketing minimum in the scan")]
    NoBracket,
    #[error("minimum R1 = {r0:e} does not reach the level {level:e}")]
    ShallowMinimum { r0: f64, level: f64 },
    #[error("amplitude has zero norm")]
    ZeroNorm,
    #[error("at xi = {xi:e}: {source}")]
    AtXi {
        xi: f64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::GammaIndex(_)
            | Error::OddParity(_)
            | Error::NotAShift(_)
            | Error::GMax(_)
            | Error::OutsideModel(_)
            | Error::FieldConstraint(_)
            | Error::ZeroIntensity
            | Error::InvalidParameter(_)
            | Error::SizeGuard { .. } => ErrorKind::Config,
            Error::Singular { .. }
            | Error::Resonance(_)
            | Error::RankDeficient(_)
            | Error::NotPositiveDefinite
            | Error::NoBracket
            | Error::ShallowMinimum { .. }
            | Error::ZeroNorm => ErrorKind::Numerical,
            Error::Verification { .. } => ErrorKind::Consistency,
            Error::AtXi { source, .. } => source.kind(),
        }
    }

    /// Stable machine-readable identifier.
    pub fn code(&self) -> &'static str {
        match self {
            Error::GammaIndex(_) => "gamma.index",
            Error::Singular { .. } => "algebra.singular",
            Error::OddParity(_) => "lattice.parity",
            Error::NotAShift(_) => "lattice.shift",
            Error::GMax(_) => "lattice.g_max",
            Error::OutsideModel(_) => "lattice.outside",
            Error::FieldConstraint(_) => "field.constraint",
            Error::ZeroIntensity => "field.zero_intensity",
            Error::Resonance(_) => "field.resonance",
            Error::InvalidParameter(_) => "config.parameter",
            Error::RankDeficient(_) => "projector.rank",
            Error::Verification { .. } => "projector.verification",
            Error::NotPositiveDefinite => "spectral.indefinite",
            Error::SizeGuard { .. } => "oracle.size_guard",
            Error::NoBracket => "spectral.no_bracket",
            Error::ShallowMinimum { .. } => "spectral.shallow_minimum",
            Error::ZeroNorm => "evolution.zero_norm",
            Error::AtXi { source, .. } => source.code(),
        }
    }

    pub(crate) fn at_xi(self, xi: f64) -> Self {
        match self {
            e @ Error::AtXi { .. } => e,
            e => Error::AtXi { xi, source: Box::new(e) },
        }
    }
}
