//! Numerics for the hypergeometric function of the complex field and the
//! index transform built on it.
//!
//! The building blocks, bottom to top:
//!
//! * [`gamma`] — complex log-gamma, the gamma function `Γ^ℂ` of bidegree
//!   arguments, and the beta function assembled from it;
//! * [`gauss`] — the classical Gauss series `₂F₁` inside the unit disk;
//! * [`hyp`] — the single-valued function `₂F₁^ℂ` on the plane, via six
//!   overlapping series representations with automatic region selection;
//! * [`spectral`] — the kernel `𝒦`, the Plancherel density `κ`, the
//!   differential operator pair and its difference-operator counterpart on
//!   the spectral lattice, and the discrete spectral point;
//! * [`transform`] — forward and adjoint index-transform sweeps over
//!   log-polar planar grids and trapezoid spectral grids, with a batched
//!   kernel evaluator;
//! * [`quad`] — plane quadrature with power-law singular patches, used as an
//!   independent cross-check of the closed forms.
//!
//! All grid sweeps are deterministic: results are bit-identical between the
//! sequential and parallel execution modes (see [`par`]).

pub mod bidegree;
pub mod error;
pub mod gamma;
pub mod gauss;
pub mod hyp;
pub mod par;
pub mod quad;
pub mod spectral;
pub mod transform;

pub use bidegree::{gpow, Bidegree, LambdaPoint};
pub use error::{Error, Result};

/// The complex scalar type used throughout.
pub type C64 = num_complex::Complex64;

/// Shorthand for `C64::new`.
#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}
