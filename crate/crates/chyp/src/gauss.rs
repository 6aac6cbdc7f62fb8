//! The classical Gauss hypergeometric series `₂F₁(a,b;c;z)` inside the unit
//! disk, with the Euler and Pfaff transformations.
//!
//! This is deliberately minimal: the plane-wide continuation happens one
//! level up, where values of `₂F₁^ℂ` are assembled from pairs of these
//! series, each evaluated with a mapped variable of modulus `< 1`.

use crate::error::{Error, Result};
use crate::C64;

/// Hard cap on series length; reached only within ~1e-2 of the unit circle.
pub(crate) const MAX_TERMS: usize = 4000;
/// Relative term size under which we start counting towards termination.
pub(crate) const TERM_EPS: f64 = 1e-17;

/// Sum the Gauss series.  Requires `|z| < 1`; fails with
/// [`Error::SlowConvergence`] at `|z| ≥ 0.995` and with
/// [`Error::NearSingular`] if `c` collides with a nonpositive integer during
/// the recurrence.
pub fn series(a: C64, b: C64, c: C64, z: C64) -> Result<C64> {
    let m = z.norm();
    if m >= 0.995 {
        return Err(Error::SlowConvergence(m));
    }
    let mut term = C64::new(1.0, 0.0);
    let mut acc = term;
    let mut small = 0u32;
    for n in 0..MAX_TERMS {
        let nf = n as f64;
        let den = c + nf;
        if den.norm() < 1e-12 {
            return Err(Error::NearSingular(format!("series denominator c+{n} ~ 0")));
        }
        term *= (a + nf) * (b + nf) / (den * (nf + 1.0)) * z;
        acc += term;
        if term.norm() <= TERM_EPS * acc.norm() {
            small += 1;
            if small >= 3 {
                return Ok(acc);
            }
        } else {
            small = 0;
        }
    }
    // Conditional convergence this close to the circle is not worth waiting
    // for; the caller should have chosen a better representation.
    Err(Error::SlowConvergence(m))
}

/// Principal power `(1−z)^{−e}`.
fn omz_pow(z: C64, e: C64) -> C64 {
    ((C64::new(1.0, 0.0) - z).ln() * -e).exp()
}

/// Pfaff transformation: `F(a,b;c;z) = (1−z)^{−a} F(a, c−b; c; z/(z−1))`.
pub fn pfaff(a: C64, b: C64, c: C64, z: C64) -> Result<C64> {
    Ok(omz_pow(z, a) * series(a, c - b, c, z / (z - 1.0))?)
}

/// Euler transformation: `F(a,b;c;z) = (1−z)^{c−a−b} F(c−a, c−b; c; z)`.
pub fn euler(a: C64, b: C64, c: C64, z: C64) -> Result<C64> {
    Ok(omz_pow(z, a + b - c) * series(c - a, c - b, c, z)?)
}

/// `d/dz F(a,b;c;z) = (ab/c) F(a+1,b+1;c+1;z)`.
pub fn derivative(a: C64, b: C64, c: C64, z: C64) -> Result<C64> {
    Ok(a * b / c * series(a + 1.0, b + 1.0, c + 1.0, z)?)
}
