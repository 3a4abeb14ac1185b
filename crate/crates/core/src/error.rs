use thiserror::Error;

/// Errors raised by the numerical routines.
///
/// Variants split into input-validation failures and numerical failures
/// (see [`Error::is_numerical`]); front-ends map them to different exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("grid of size {size} cannot resolve bandlimit {bandlimit} (need at least {required} points)")]
    GridTooSmall {
        size: usize,
        bandlimit: usize,
        required: usize,
    },

    #[error("quadrature grid has zero offset; the product grid would hit the diagonal")]
    ZeroOffset,

    #[error("radius {0} is outside [0, 1)")]
    RadiusOutOfRange(f64),

    #[error(
        "function has nonzero negative-index coefficient at n = -{0}; expected an element of W+"
    )]
    NotInPositiveSpace(usize),

    #[error("lift is not strictly increasing: minimum forward difference {min_step:e} at theta = {at:.6}")]
    NonMonotone { min_step: f64, at: f64 },

    #[error("moebius parameter has |a| = {0} >= 1")]
    InvalidMoebius(f64),

    #[error("operation requires a degree-1 map, got degree {0}")]
    DegreeNotOne(u32),

    #[error("invalid map descriptor: {0}")]
    InvalidDescriptor(String),

    #[error("map is not a smooth descriptor (sampled lifts carry no derivative guarantee)")]
    NonSmooth,

    #[error("aliasing guard: spectral tail {tail:e} exceeds {limit:e} on a grid of size {grid}; refine the grid")]
    Aliasing { tail: f64, limit: f64, grid: usize },

    #[error("matrix A is ill-conditioned (condition number {0:e})")]
    IllConditioned(f64),

    #[error("A + B Z is singular or ill-conditioned (condition number {0:e})")]
    SingularAction(f64),

    #[error("kernel evaluated on the diagonal x = y")]
    OnDiagonal,

    #[error("trial function bandlimit {bandlimit} exceeds half the cutoff {cutoff}")]
    BandlimitOverflow { bandlimit: usize, cutoff: usize },

    #[error("ambient cutoff {cutoff} too small for a generator of bandlimit {bandlimit} (need {required})")]
    CutoffTooSmall {
        cutoff: usize,
        bandlimit: usize,
        required: usize,
    },

    #[error("step sizes too large: kernel values do not converge monotonically ({0})")]
    DeltasTooLarge(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of the numerics (conditioning, aliasing), false for
    /// rejected inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Aliasing { .. }
                | Error::IllConditioned(_)
                | Error::SingularAction(_)
                | Error::DeltasTooLarge(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
