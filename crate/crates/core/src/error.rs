use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("spectral parameter must have positive imaginary part (got {0})")]
    NonPositiveImaginary(f64),
    #[error("band width {width} exceeds dimension {n}")]
    BandTooWide { width: usize, n: usize },
    #[error("moments m3={m3}, m4={m4} are not feasible for a standardized variable")]
    InfeasibleMoments { m3: f64, m4: f64 },
    #[error("matrix is not Hermitian at ({i}, {j})")]
    NotHermitian { i: usize, j: usize },
    #[error("eigensolver did not converge")]
    NoConvergence,
    #[error("singular system: {0}")]
    Singular(String),
    #[error("index collision: {0}")]
    IndexCollision(String),
    #[error("near-singular resolvent diagonal at index {index} (|G_ii| = {modulus:e})")]
    SmallDiagonal { index: usize, modulus: f64 },
    #[error("operation requires a flat variance profile")]
    NotFlat,
    #[error("operation requires a circulant variance profile")]
    NotCirculant,
    #[error("collision between particles {i} and {j} at t = {time}: step-size floor reached")]
    StepFloor { i: usize, j: usize, time: f64 },
    #[error("window [{first}, {last}] touches the edge band of a spectrum of size {n}")]
    EdgeWindow { first: usize, last: usize, n: usize },
    #[error("empty configuration interval")]
    EmptyInterval,
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("solver did not converge: {0}")]
    NotConverged(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
