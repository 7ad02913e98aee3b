use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("non-finite value at sample {index}")]
    NonFinite { index: usize },

    #[error("{name} = {value} is outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },

    #[error("symbol is not finite at wavevector {k:?}")]
    NonFiniteSymbol { k: [f64; 3] },

    #[error("dyadic range [{j_min}, {j_max}] does not cover the spectrum; need [{need_min}, {need_max}]")]
    DyadicRange {
        j_min: i32,
        j_max: i32,
        need_min: i32,
        need_max: i32,
    },

    #[error("quadrature did not converge: estimated error {estimate:e} exceeds tolerance {tol:e}")]
    Quadrature { estimate: f64, tol: f64 },

    #[error("modulus is not concave near {at}: second difference {second_difference:e}")]
    NotConcave { at: f64, second_difference: f64 },

    #[error("blow-up at t = {t}: {reason}")]
    BlowUp { t: f64, reason: String },

    #[error("CFL condition violated: dt = {dt} exceeds {limit} (cfl = {cfl})")]
    Cfl { dt: f64, limit: f64, cfl: f64 },

    #[error("time {t} is outside the sampled range [{start}, {end}]")]
    TimeOutOfRange { t: f64, start: f64, end: f64 },

    #[error("trajectory is empty")]
    EmptyTrajectory,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
