//! Error type shared by the numeric modules.

use crate::C64;

#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// A bidegree was constructed whose component difference is not an integer.
    #[error("bidegree difference {0} is not an integer")]
    InvalidBidegree(C64),

    /// A series was asked to converge with a variable too close to the unit
    /// circle (this happens only near the two corner points `e^{±iπ/3}`).
    #[error("series variable has modulus {0:.4}, too close to 1")]
    SlowConvergence(f64),

    /// The requested evaluation point sits on (or too near) a singular locus.
    #[error("evaluation too close to a singular point: {0}")]
    NearSingular(String),

    /// An integrand was declared with exponents that make it non-integrable.
    #[error("integrand is not integrable: {0}")]
    Divergent(String),

    /// A malformed argument outside the numeric domain of the routine.
    #[error("invalid argument: {0}")]
    Invalid(String),

    /// An adaptive routine exhausted its cell budget before reaching the
    /// requested accuracy; the partial value and its estimate are attached.
    #[error("cell budget exhausted: partial value {value} with error estimate {error:.3e}")]
    Budget { value: C64, error: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
