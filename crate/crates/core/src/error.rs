use thiserror::Error;

/// Every failure the library reports. Variant names double as the stable
/// `kind` string in the CLI's error JSON.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("energy E must be positive, got {0}")]
    NonPositiveE(f64),
    #[error("field bounds must be nonnegative and not both zero (M1={m1}, M2={m2})")]
    InvalidBounds { m1: f64, m2: f64 },
    #[error("alpha={0} outside (0, pi/4)")]
    AlphaOutOfRange(f64),
    #[error("beta={0} outside (0, pi/4]")]
    BetaOutOfRange(f64),
    #[error("control component outside [-1, 1]: ({0}, {1})")]
    ControlOutOfRange(f64, f64),
    #[error("negative or non-finite arc duration {0}")]
    InvalidDuration(f64),
    #[error("schedule has no arcs")]
    EmptySchedule,
    #[error("amplitudes not normalized: |psi|^2 = {0}")]
    NotNormalized(f64),
    #[error("point is not on the unit sphere: |x| = {0}")]
    NotOnSphere(f64),
    #[error("sampling step must be positive, got {0}")]
    InvalidStep(f64),
    #[error("no switching: both switching functions stay away from zero")]
    NoSwitching,
    #[error("degenerate covector: phi1(0) = phi2(0) = 0")]
    DegenerateCovector,
    #[error("no root of the first-switching equation on [0, pi]")]
    NoRoot,
    #[error("inter-switching root outside (0, pi]")]
    RootOutsideRange,
    #[error("closed form requires beta = pi/4, got {0}")]
    BetaNotQuarterPi(f64),
    #[error("arccos argument {0} outside [-1, 1]")]
    DomainError(f64),
    #[error("incoming and outgoing fields are parallel")]
    DegenerateFields,
    #[error("target within {radius} of the south pole (distance {distance})")]
    TargetInCutLocusNeighborhood { distance: f64, radius: f64 },
    #[error("shooting did not converge (best residual {0:e})")]
    NoConvergence(f64),
    #[error("bisection bracket invalid")]
    SolveFailed,
    #[error("reachable-set sweep exceeded {0} steps")]
    BudgetExceeded(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Variant name, used as a machine-readable error kind.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonPositiveE(_) => "NonPositiveE",
            Error::InvalidBounds { .. } => "InvalidBounds",
            Error::AlphaOutOfRange(_) => "AlphaOutOfRange",
            Error::BetaOutOfRange(_) => "BetaOutOfRange",
            Error::ControlOutOfRange(..) => "ControlOutOfRange",
            Error::InvalidDuration(_) => "InvalidDuration",
            Error::EmptySchedule => "EmptySchedule",
            Error::NotNormalized(_) => "NotNormalized",
            Error::NotOnSphere(_) => "NotOnSphere",
            Error::InvalidStep(_) => "InvalidStep",
            Error::NoSwitching => "NoSwitching",
            Error::DegenerateCovector => "DegenerateCovector",
            Error::NoRoot => "NoRoot",
            Error::RootOutsideRange => "RootOutsideRange",
            Error::BetaNotQuarterPi(_) => "BetaNotQuarterPi",
            Error::DomainError(_) => "DomainError",
            Error::DegenerateFields => "DegenerateFields",
            Error::TargetInCutLocusNeighborhood { .. } => "TargetInCutLocusNeighborhood",
            Error::NoConvergence(_) => "NoConvergence",
            Error::SolveFailed => "SolveFailed",
            Error::BudgetExceeded(_) => "BudgetExceeded",
            Error::InvalidArgument(_) => "InvalidArgument",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
