//! Bidegrees and generalized powers.
//!
//! A bidegree `(u|u′)` is a pair of complex exponents with `u − u′ ∈ ℤ`.  It
//! indexes the single-valued character `z ↦ z^u z̄^{u′}` of the multiplicative
//! plane; single-valuedness is exactly the integrality condition.  Spectral
//! parameters live on the lattice-times-line `Λ = {λ = (k+is)/2 : k ∈ ℤ}`,
//! represented by [`LambdaPoint`] with the companion value `λ′ = (−k+is)/2`.

use crate::error::{Error, Result};
use crate::C64;
use std::fmt;
use std::ops::{Add, Neg, Sub};

/// Tolerance for deciding that a computed exponent difference is an integer.
const INT_TOL: f64 = 1e-9;

/// A pair of complex exponents `(u|u′)` with integer difference.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bidegree {
    pub u: C64,
    pub up: C64,
}

impl Bidegree {
    /// Build a bidegree, checking that `u − u′` is an integer.
    pub fn new(u: C64, up: C64) -> Result<Self> {
        let d = u - up;
        if (d.re - d.re.round()).abs() > INT_TOL || d.im.abs() > INT_TOL {
            return Err(Error::InvalidBidegree(d));
        }
        Ok(Self { u, up })
    }

    /// Build without the integrality check (for internal arithmetic whose
    /// inputs are already valid bidegrees).
    #[inline]
    pub const fn raw(u: C64, up: C64) -> Self {
        Self { u, up }
    }

    /// The diagonal bidegree `(x|x)`.
    #[inline]
    pub fn diag(x: C64) -> Self {
        Self { u: x, up: x }
    }

    /// The real diagonal bidegree `(x|x)`.
    #[inline]
    pub fn diag_re(x: f64) -> Self {
        Self::diag(C64::new(x, 0.0))
    }

    /// The integer difference `u − u′`.
    #[inline]
    pub fn n(&self) -> i64 {
        (self.u - self.up).re.round() as i64
    }

    /// The bracket `[𝐮] = ½ Re(u + u′)`, which controls growth of the
    /// character `|z^{u|u′}| = |z|^{2[𝐮]}`.
    #[inline]
    pub fn bracket(&self) -> f64 {
        0.5 * (self.u + self.up).re
    }

    /// Shift both components by the same complex amount (keeps the bidegree
    /// valid).
    #[inline]
    pub fn shift(&self, d: C64) -> Self {
        Self { u: self.u + d, up: self.up + d }
    }

    /// Shift only the unprimed component by an integer.
    #[inline]
    pub fn shift_u(&self, m: i64) -> Self {
        Self { u: self.u + m as f64, up: self.up }
    }

    /// Shift only the primed component by an integer.
    #[inline]
    pub fn shift_p(&self, m: i64) -> Self {
        Self { u: self.u, up: self.up + m as f64 }
    }

    /// Swap the two components.
    #[inline]
    pub fn swap(&self) -> Self {
        Self { u: self.up, up: self.u }
    }

    /// Componentwise complex conjugate.  Note this swaps the roles the two
    /// components play under conjugation identities rather than producing the
    /// conjugate character; see `conj_character`.
    #[inline]
    pub fn conj_each(&self) -> Self {
        Self { u: self.u.conj(), up: self.up.conj() }
    }

    /// The bidegree of the conjugated character: `conj(z^{u|u′}) = z^{ū′|ū}`.
    #[inline]
    pub fn conj_character(&self) -> Self {
        Self { u: self.up.conj(), up: self.u.conj() }
    }
}

impl Add for Bidegree {
    type Output = Bidegree;
    fn add(self, o: Bidegree) -> Bidegree {
        Bidegree { u: self.u + o.u, up: self.up + o.up }
    }
}

impl Sub for Bidegree {
    type Output = Bidegree;
    fn sub(self, o: Bidegree) -> Bidegree {
        Bidegree { u: self.u - o.u, up: self.up - o.up }
    }
}

impl Neg for Bidegree {
    type Output = Bidegree;
    fn neg(self) -> Bidegree {
        Bidegree { u: -self.u, up: -self.up }
    }
}

impl fmt::Display for Bidegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}|{})", self.u, self.up)
    }
}

/// The generalized power `z^{u|u′} = |z|^{u+u′} e^{i(u−u′) arg z}`.
///
/// Returns `0` at `z = 0`; callers only evaluate there when the bracket is
/// positive, where the zero limit is the correct value.
pub fn gpow(z: C64, d: Bidegree) -> C64 {
    if z == C64::new(0.0, 0.0) {
        return C64::new(0.0, 0.0);
    }
    let ln_r = z.norm().ln();
    let th = z.arg();
    ((d.u + d.up) * ln_r + C64::i() * (d.u - d.up) * th).exp()
}

/// A point of the spectral set: integer `k` and the continuous coordinate
/// `σ`, encoding `λ = (k+σ)/2`, `λ′ = (−k+σ)/2`.  On the unitary axis `Λ`
/// the coordinate is purely imaginary, `σ = is`; difference operators also
/// evaluate at integer-shifted (hence complex) `σ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LambdaPoint {
    pub k: i64,
    pub sigma: C64,
}

impl LambdaPoint {
    /// The on-axis point with `σ = is`.
    #[inline]
    pub fn on_axis(k: i64, s: f64) -> Self {
        Self { k, sigma: C64::new(0.0, s) }
    }

    #[inline]
    pub fn new(k: i64, sigma: C64) -> Self {
        Self { k, sigma }
    }

    /// `λ = (k+σ)/2`.
    #[inline]
    pub fn lam(&self) -> C64 {
        (self.sigma + self.k as f64) * 0.5
    }

    /// `λ′ = (−k+σ)/2`.
    #[inline]
    pub fn lamp(&self) -> C64 {
        (self.sigma - self.k as f64) * 0.5
    }

    /// `|λ|`, the modulus used by asymptotic switches.
    #[inline]
    pub fn lam_abs(&self) -> f64 {
        self.lam().norm()
    }

    /// Whether the point lies on the unitary axis (σ purely imaginary).
    #[inline]
    pub fn on_axis_p(&self) -> bool {
        self.sigma.re.abs() < 1e-14
    }

    /// The spectral parameter as a bidegree `(λ|λ′)`.
    #[inline]
    pub fn bidegree(&self) -> Bidegree {
        Bidegree { u: self.lam(), up: self.lamp() }
    }

    /// The mirror point `−λ` (negates both `k` and `σ`).
    #[inline]
    pub fn mirror(&self) -> Self {
        Self { k: -self.k, sigma: -self.sigma }
    }
}

impl fmt::Display for LambdaPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(k={}, sigma={})", self.k, self.sigma)
    }
}
