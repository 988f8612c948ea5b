use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("evaluation point {location} coincides with an atom (pole of the initial Green's function)")]
    Pole { location: f64 },

    #[error("time step underflow at t = {time}: step {dt:e} fell below the minimum {dt_min:e}")]
    DtUnderflow { time: f64, dt: f64, dt_min: f64 },

    #[error("particle {index} at position {position} lies outside the grid [{x_min}, {x_max}]")]
    OutOfRange {
        index: usize,
        position: f64,
        x_min: f64,
        x_max: f64,
    },

    #[error("no admissible root of the functional-equation polynomial at z = {z}; candidates: {candidates:?}")]
    NoAdmissibleRoot {
        z: Complex64,
        candidates: Vec<Complex64>,
    },

    #[error("boundary-limit extrapolation did not converge at x = {x}: last two extrapolants {prev} and {last}")]
    Extrapolation { x: f64, prev: f64, last: f64 },

    #[error("sampled function does not decay at the grid ends (|f| = {left:e}, {right:e} vs tolerance {tol:e}); enlarge the domain")]
    DomainTooSmall { left: f64, right: f64, tol: f64 },

    #[error("adaptive quadrature did not converge: last estimates {prev} and {last}")]
    Quadrature { prev: f64, last: f64 },

    #[error("grid too coarse: {fraction:e} of the flux spectral energy sits in the top quarter band (limit {limit:e})")]
    Resolution { fraction: f64, limit: f64 },

    #[error("root finder failed to converge for a degree-{degree} polynomial")]
    RootFinder { degree: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }
}
