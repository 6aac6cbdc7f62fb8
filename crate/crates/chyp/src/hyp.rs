//! The hypergeometric function of the complex field, `₂F₁^ℂ[𝐚,𝐛;𝐜;z]`.
//!
//! The function is single-valued on the plane.  Each value is assembled as a
//! two-term bilinear combination of classical Gauss series in a mapped
//! variable and its conjugate; six overlapping representations cover ℂ:
//!
//! | region           | series variable |
//! |------------------|-----------------|
//! | `Z`              | `z`             |
//! | `OneMinusZ`      | `1 − z`         |
//! | `InvZ`           | `1/z`           |
//! | `Zeta`           | `ζ = z/(z−1)`   |
//! | `OneMinusInvZ`   | `1 − 1/z`       |
//! | `InvOneMinusZ`   | `1/(1−z)`       |
//!
//! The last three are the first three composed with the Pfaff transformation
//! `F[𝐚,𝐛;𝐜;z] = (1−z)^{−𝐚} F[𝐚,𝐜−𝐛;𝐜;ζ]`.  [`select_region`] picks the
//! representation with the smallest variable modulus; the minimum is `< 1`
//! everywhere except the two corner points `e^{±iπ/3}`, where all six equal 1.
//!
//! Connection coefficients are assembled in log space (individual gamma
//! factors overflow long before their combinations do).  Parameter sets
//! within `1e-6` of a representation's integer-lattice degeneracy are
//! evaluated at paired `±1e-5` offsets and averaged; the average cancels the
//! simple pole the two offset evaluations share, recovering the removable
//! limit to roughly `1e-6` relative accuracy in double precision.

use crate::bidegree::{gpow, Bidegree};
use crate::error::{Error, Result};
use crate::gamma::{i_pow, lgamma_c, m1_pow};
use crate::gauss;
use crate::C64;

/// Parameter triple of `₂F₁^ℂ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Params {
    pub a: Bidegree,
    pub b: Bidegree,
    pub c: Bidegree,
}

impl Params {
    pub fn new(a: Bidegree, b: Bidegree, c: Bidegree) -> Self {
        Self { a, b, c }
    }

    /// The parameters of the conjugated function:
    /// `conj F[𝐚,𝐛;𝐜;z] = F[conj 𝐚,…;z]` with each bidegree conjugated *and*
    /// slot-swapped.
    pub fn conj(self) -> Self {
        Self {
            a: self.a.conj_character(),
            b: self.b.conj_character(),
            c: self.c.conj_character(),
        }
    }

    /// Shift every parameter's unprimed component by 1 (the `∂_z` direction).
    fn shift_all_u(self, m: i64) -> Self {
        Self { a: self.a.shift_u(m), b: self.b.shift_u(m), c: self.c.shift_u(m) }
    }

    fn shift_all_p(self, m: i64) -> Self {
        Self { a: self.a.shift_p(m), b: self.b.shift_p(m), c: self.c.shift_p(m) }
    }
}

/// The six series representations, named by their variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Region {
    Z,
    OneMinusZ,
    InvZ,
    Zeta,
    OneMinusInvZ,
    InvOneMinusZ,
}

pub const REGIONS: [Region; 6] = [
    Region::Z,
    Region::OneMinusZ,
    Region::InvZ,
    Region::Zeta,
    Region::OneMinusInvZ,
    Region::InvOneMinusZ,
];

/// Moduli of the six series variables at `z`, in [`REGIONS`] order.
pub fn region_moduli(z: C64) -> [f64; 6] {
    let az = z.norm();
    let a1z = (C64::new(1.0, 0.0) - z).norm();
    [az, a1z, 1.0 / az, az / a1z, (1.0 - 1.0 / z).norm(), 1.0 / a1z]
}

/// The representation with the smallest variable modulus (ties break towards
/// the earlier entry of [`REGIONS`]).
pub fn select_region(z: C64) -> Region {
    let m = region_moduli(z);
    let mut best = 0;
    for i in 1..6 {
        if m[i] < m[best] {
            best = i;
        }
    }
    REGIONS[best]
}

/// The series variable of a region.
pub fn region_variable(region: Region, z: C64) -> C64 {
    let one = C64::new(1.0, 0.0);
    match region {
        Region::Z => z,
        Region::OneMinusZ => one - z,
        Region::InvZ => one / z,
        Region::Zeta => z / (z - one),
        Region::OneMinusInvZ => one - one / z,
        Region::InvOneMinusZ => one / (one - z),
    }
}

/// Log-space coefficient accumulator: `value = sign · i^{ip} · e^{log}`.
#[derive(Clone, Copy)]
struct Coef {
    log: C64,
    ip: i64,
    sign: f64,
}

impl Coef {
    fn one() -> Self {
        Self { log: C64::new(0.0, 0.0), ip: 0, sign: 1.0 }
    }

    /// Multiply by `Γ^ℂ(d)`.
    fn mul(mut self, d: Bidegree) -> Self {
        let (l, n) = lgamma_c(d);
        self.log += l;
        self.ip += n;
        self
    }

    /// Divide by `Γ^ℂ(d)`.
    fn div(mut self, d: Bidegree) -> Self {
        let (l, n) = lgamma_c(d);
        self.log -= l;
        self.ip -= n;
        self
    }

    fn neg_if(mut self, m: i64) -> Self {
        self.sign *= m1_pow(m);
        self
    }

    fn val(self) -> C64 {
        self.sign * i_pow(self.ip) * self.log.exp()
    }
}

const ONE: Bidegree = Bidegree::raw(C64::new(1.0, 0.0), C64::new(1.0, 0.0));

/// Bilinear series pair: `S(args; w) · S(args′; w̄-side)`.
fn spair(
    au: C64,
    bu: C64,
    cu: C64,
    ap: C64,
    bp: C64,
    cp: C64,
    w: C64,
    wb: C64,
) -> Result<C64> {
    Ok(gauss::series(au, bu, cu, w)? * gauss::series(ap, bp, cp, wb)?)
}

/// Representation in powers of `z` (variable `w = z`, conjugate side `z̄`).
fn eval_z(p: &Params, z: C64, reg: bool) -> Result<C64> {
    let Params { a, b, c } = *p;
    let zb = z.conj();
    let t0 = spair(a.u, b.u, c.u, a.up, b.up, c.up, z, zb)?;
    let t0c = if reg { Coef::one().div(c).val() } else { C64::new(1.0, 0.0) };

    let mut k1 = Coef::one()
        .neg_if((c - a - b).n())
        .mul(c - ONE)
        .div(a)
        .div(b)
        .div(c - a)
        .div(c - b);
    if !reg {
        k1 = k1.mul(c);
    }
    let d = ONE - c;
    let s1 = spair(
        a.u + d.u,
        b.u + d.u,
        C64::new(2.0, 0.0) - c.u,
        a.up + d.up,
        b.up + d.up,
        C64::new(2.0, 0.0) - c.up,
        z,
        zb,
    )?;
    Ok(t0c * t0 + k1.val() * gpow(z, d) * s1)
}

/// Representation in powers of `1 − z`.
fn eval_omz(p: &Params, z: C64, reg: bool) -> Result<C64> {
    let Params { a, b, c } = *p;
    let w = C64::new(1.0, 0.0) - z;
    let wb = w.conj();
    let mut k0 = Coef::one().mul(c - a - b).div(c - a).div(c - b);
    let mut k1 = Coef::one().mul(a + b - c).div(a).div(b);
    if !reg {
        k0 = k0.mul(c);
        k1 = k1.mul(c);
    }
    let g = c - a - b;
    let s0 = spair(
        a.u,
        b.u,
        a.u + b.u + 1.0 - c.u,
        a.up,
        b.up,
        a.up + b.up + 1.0 - c.up,
        w,
        wb,
    )?;
    let s1 = spair(
        c.u - a.u,
        c.u - b.u,
        c.u + 1.0 - a.u - b.u,
        c.up - a.up,
        c.up - b.up,
        c.up + 1.0 - a.up - b.up,
        w,
        wb,
    )?;
    Ok(k0.val() * s0 + k1.val() * gpow(w, g) * s1)
}

/// Representation in powers of `1/z`.
fn eval_inv(p: &Params, z: C64, reg: bool) -> Result<C64> {
    let Params { a, b, c } = *p;
    let w = 1.0 / z;
    let wb = w.conj();
    let mut k0 = Coef::one().mul(b - a).div(b).div(c - a);
    let mut k1 = Coef::one().mul(a - b).div(a).div(c - b);
    if !reg {
        k0 = k0.mul(c);
        k1 = k1.mul(c);
    }
    let s0 = spair(
        a.u,
        a.u + 1.0 - c.u,
        a.u + 1.0 - b.u,
        a.up,
        a.up + 1.0 - c.up,
        a.up + 1.0 - b.up,
        w,
        wb,
    )?;
    let s1 = spair(
        b.u,
        b.u + 1.0 - c.u,
        b.u + 1.0 - a.u,
        b.up,
        b.up + 1.0 - c.up,
        b.up + 1.0 - a.up,
        w,
        wb,
    )?;
    Ok(k0.val() * gpow(-z, -a) * s0 + k1.val() * gpow(-z, -b) * s1)
}

/// Pfaff companion parameters `(𝐚, 𝐜−𝐛, 𝐜)`.
pub(crate) fn pfaff_faces(p: &Params) -> Params {
    Params { a: p.a, b: p.c - p.b, c: p.c }
}

/// The base representation a region reduces to, and whether the reduction
/// goes through the Pfaff map (evaluate the base route at `ζ = z/(z−1)` with
/// companion parameters and prefactor `(1−z)^{−𝐚}`).
pub(crate) fn base_region(region: Region) -> (Region, bool) {
    match region {
        Region::Z => (Region::Z, false),
        Region::OneMinusZ => (Region::OneMinusZ, false),
        Region::InvZ => (Region::InvZ, false),
        Region::Zeta => (Region::Z, true),
        Region::OneMinusInvZ => (Region::InvZ, true),
        Region::InvOneMinusZ => (Region::OneMinusZ, true),
    }
}

/// Connection data of one base representation, exploded for batch use:
///
/// `F = k0 · base^{(d0)} · S(s0u; w)·S(s0p; w̄) + k1 · base^{(d1)} · S(s1u; w)·S(s1p; w̄)`
///
/// where `S` is the classical Gauss series with the given `(a, b, c)` triple,
/// `w` the series variable and `base` the power base — `(z, z)` for `Z`,
/// `(1−z, 1−z)` for `OneMinusZ`, `(1/z, −z)` for `InvZ`.  A `None` exponent
/// means the power factor is 1.  The coefficients depend only on parameters,
/// so one `RouteTerms` serves every evaluation point sharing a region.
#[derive(Clone, Copy)]
pub(crate) struct RouteTerms {
    pub k0: C64,
    pub k1: C64,
    pub s0u: [C64; 3],
    pub s0p: [C64; 3],
    pub s1u: [C64; 3],
    pub s1p: [C64; 3],
    pub d0: Option<Bidegree>,
    pub d1: Option<Bidegree>,
}

/// Explode a base representation's two-term structure.  Panics on the Pfaff
/// regions: map those through [`base_region`] and [`pfaff_faces`] first.
pub(crate) fn route_terms(p: &Params, region: Region, reg: bool) -> RouteTerms {
    let Params { a, b, c } = *p;
    let two = C64::new(2.0, 0.0);
    match region {
        Region::Z => {
            let k0 = if reg { Coef::one().div(c).val() } else { C64::new(1.0, 0.0) };
            let mut k1 = Coef::one()
                .neg_if((c - a - b).n())
                .mul(c - ONE)
                .div(a)
                .div(b)
                .div(c - a)
                .div(c - b);
            if !reg {
                k1 = k1.mul(c);
            }
            let d = ONE - c;
            RouteTerms {
                k0,
                k1: k1.val(),
                s0u: [a.u, b.u, c.u],
                s0p: [a.up, b.up, c.up],
                s1u: [a.u + d.u, b.u + d.u, two - c.u],
                s1p: [a.up + d.up, b.up + d.up, two - c.up],
                d0: None,
                d1: Some(d),
            }
        }
        Region::OneMinusZ => {
            let mut k0 = Coef::one().mul(c - a - b).div(c - a).div(c - b);
            let mut k1 = Coef::one().mul(a + b - c).div(a).div(b);
            if !reg {
                k0 = k0.mul(c);
                k1 = k1.mul(c);
            }
            RouteTerms {
                k0: k0.val(),
                k1: k1.val(),
                s0u: [a.u, b.u, a.u + b.u + 1.0 - c.u],
                s0p: [a.up, b.up, a.up + b.up + 1.0 - c.up],
                s1u: [c.u - a.u, c.u - b.u, c.u + 1.0 - a.u - b.u],
                s1p: [c.up - a.up, c.up - b.up, c.up + 1.0 - a.up - b.up],
                d0: None,
                d1: Some(c - a - b),
            }
        }
        Region::InvZ => {
            let mut k0 = Coef::one().mul(b - a).div(b).div(c - a);
            let mut k1 = Coef::one().mul(a - b).div(a).div(c - b);
            if !reg {
                k0 = k0.mul(c);
                k1 = k1.mul(c);
            }
            RouteTerms {
                k0: k0.val(),
                k1: k1.val(),
                s0u: [a.u, a.u + 1.0 - c.u, a.u + 1.0 - b.u],
                s0p: [a.up, a.up + 1.0 - c.up, a.up + 1.0 - b.up],
                s1u: [b.u, b.u + 1.0 - c.u, b.u + 1.0 - a.u],
                s1p: [b.up, b.up + 1.0 - c.up, b.up + 1.0 - a.up],
                d0: Some(-a),
                d1: Some(-b),
            }
        }
        _ => panic!("route_terms takes base representations only"),
    }
}

/// Evaluate in a fixed representation, without degeneracy handling.
/// `reg` divides the value by `Γ^ℂ(𝐜)` at the coefficient level.
fn eval_region(p: &Params, z: C64, region: Region, reg: bool) -> Result<C64> {
    match region {
        Region::Z => eval_z(p, z, reg),
        Region::OneMinusZ => eval_omz(p, z, reg),
        Region::InvZ => eval_inv(p, z, reg),
        _ => {
            let zeta = z / (z - 1.0);
            let pref = gpow(C64::new(1.0, 0.0) - z, -p.a);
            let faces = pfaff_faces(p);
            let inner = match region {
                Region::Zeta => eval_z(&faces, zeta, reg)?,
                Region::OneMinusInvZ => eval_inv(&faces, zeta, reg)?,
                Region::InvOneMinusZ => eval_omz(&faces, zeta, reg)?,
                _ => unreachable!(),
            };
            Ok(pref * inner)
        }
    }
}

/// Which parameter a degenerate representation is regularized through.
#[derive(Clone, Copy, Debug)]
pub(crate) enum EpsShift {
    /// Shift `𝐜` diagonally.
    C,
    /// Shift `𝐚` diagonally.
    A,
}

// Offsets below 1e-5 look attractive (smaller averaging bias ~ O(ε²)) but
// lose to double precision: the offset evaluations cancel a 1/ε pole, so the
// ~1e-16 · |parameter| wobble in how each factor recomputes the degenerate
// combination is amplified by 1/ε².  Total error ~ 2.5e-17/ε² + O(1e2)·ε² is
// minimized near ε = 1e-5, giving ~1e-6 relative accuracy on the lattice.
const LATTICE_NEAR: f64 = 1e-6;
pub(crate) const EPS: f64 = 1e-5;

fn near_int(x: C64) -> Option<f64> {
    let n = x.re.round();
    if (x - n).norm() < LATTICE_NEAR {
        Some(n)
    } else {
        None
    }
}

/// Detect the representation's integer-lattice degeneracy.  Returns the shift
/// target and the complex offset that lands the degenerate combination
/// exactly on the lattice (so the paired `±ε` evaluations straddle it
/// symmetrically).
///
/// Covered degeneracies: `𝐜` integral (`Z`/`Zeta`), `𝐜−𝐚−𝐛` integral
/// (`OneMinusZ`), `𝐛−𝐚` integral (`InvZ`/`InvOneMinusZ`), `𝐚+𝐛−𝐜` integral
/// (`OneMinusInvZ`).  Integer-diagonal numerator parameters beyond these are
/// not rerouted automatically.
pub(crate) fn degeneracy(p: &Params, region: Region) -> Option<(EpsShift, C64)> {
    match region {
        Region::Z | Region::Zeta => {
            near_int(p.c.u).map(|n| (EpsShift::C, C64::new(n, 0.0) - p.c.u))
        }
        Region::OneMinusZ => {
            let gap = p.c.u - p.a.u - p.b.u;
            near_int(gap).map(|n| (EpsShift::C, C64::new(n, 0.0) - gap))
        }
        Region::OneMinusInvZ => {
            // Faces (𝐚, 𝐜−𝐛): the inverse-variable coefficient degenerates
            // when 𝐚 − (𝐜−𝐛) = 𝐚+𝐛−𝐜 is integral; a 𝐜-shift moves it.
            let gap = p.a.u + p.b.u - p.c.u;
            near_int(gap).map(|n| (EpsShift::C, gap - C64::new(n, 0.0)))
        }
        Region::InvZ | Region::InvOneMinusZ => {
            // Γ^ℂ(±(𝐛−𝐚)) degenerate; move 𝐚.
            let gap = p.b.u - p.a.u;
            near_int(gap).map(|n| (EpsShift::A, gap - C64::new(n, 0.0)))
        }
    }
}

pub(crate) fn apply_shift(p: &Params, shift: EpsShift, d: C64) -> Params {
    match shift {
        EpsShift::C => Params { a: p.a, b: p.b, c: p.c.shift(d) },
        EpsShift::A => Params { a: p.a.shift(d), b: p.b, c: p.c },
    }
}

fn f21c_with(p: &Params, z: C64, region: Region, reg: bool) -> Result<C64> {
    match degeneracy(p, region) {
        None => eval_region(p, z, region, reg),
        Some((shift, d0)) => {
            let hi = eval_region(&apply_shift(p, shift, d0 + EPS), z, region, reg)?;
            let lo = eval_region(&apply_shift(p, shift, d0 - EPS), z, region, reg)?;
            Ok(0.5 * (hi + lo))
        }
    }
}

/// `₂F₁^ℂ[𝐚,𝐛;𝐜;z]`, representation chosen automatically.
pub fn f21c(p: &Params, z: C64) -> Result<C64> {
    f21c_with(p, z, select_region(z), false)
}

/// `₂F₁^ℂ` evaluated in a fixed representation (degeneracy handling
/// included).  Converges only where that representation's variable has
/// modulus `< 1`.
pub fn f21c_in(p: &Params, z: C64, region: Region) -> Result<C64> {
    f21c_with(p, z, region, false)
}

/// The regularized value `₂F₁^ℂ / Γ^ℂ(𝐜)`, finite across the `𝐜` lattice.
pub fn f21c_reg(p: &Params, z: C64) -> Result<C64> {
    f21c_with(p, z, select_region(z), true)
}

/// The regularized value in a fixed representation.
pub fn f21c_reg_in(p: &Params, z: C64, region: Region) -> Result<C64> {
    f21c_with(p, z, region, true)
}

/// The `z → 1` limit, `Γ^ℂ(𝐜)Γ^ℂ(𝐜−𝐚−𝐛) / (Γ^ℂ(𝐜−𝐚)Γ^ℂ(𝐜−𝐛))`.
/// Finite (and the limit statement valid) for `[𝐜−𝐚−𝐛] > 0`.
pub fn gauss_limit(p: &Params) -> C64 {
    Coef::one()
        .mul(p.c)
        .mul(p.c - p.a - p.b)
        .div(p.c - p.a)
        .div(p.c - p.b)
        .val()
}

/// The six Kummer-type solutions, `j = 1..=6`, expressed through `₂F₁^ℂ` at
/// mapped arguments with their connection coefficients.  All six equal
/// `₂F₁^ℂ` itself on their domains.
pub fn kummer_u(j: usize, p: &Params, z: C64) -> Result<C64> {
    let Params { a, b, c } = *p;
    match j {
        1 => f21c(p, z),
        2 => {
            let k = Coef::one().mul(c).mul(c - a - b).div(c - a).div(c - b);
            let q = Params::new(a, b, a + b + ONE - c);
            Ok(k.val() * f21c(&q, C64::new(1.0, 0.0) - z)?)
        }
        3 => {
            let k = Coef::one().mul(c).mul(b - a).div(b).div(c - a);
            let q = Params::new(a, a - c + ONE, a - b + ONE);
            Ok(k.val() * gpow(-z, -a) * f21c(&q, 1.0 / z)?)
        }
        4 => {
            let k = Coef::one().mul(c).mul(a - b).div(a).div(c - b);
            let q = Params::new(b, b - c + ONE, b - a + ONE);
            Ok(k.val() * gpow(-z, -b) * f21c(&q, 1.0 / z)?)
        }
        5 => {
            let m = c.n() - a.n() - b.n();
            let k = Coef::one()
                .neg_if(m)
                .mul(c)
                .mul(c - ONE)
                .div(a)
                .div(b)
                .div(c - a)
                .div(c - b);
            let two = ONE + ONE;
            let q = Params::new(b - c + ONE, a - c + ONE, two - c);
            Ok(k.val() * gpow(z, ONE - c) * f21c(&q, z)?)
        }
        6 => {
            let k = Coef::one().mul(c).mul(a + b - c).div(a).div(b);
            let q = Params::new(c - a, c - b, c - a - b + ONE);
            Ok(k.val() * gpow(C64::new(1.0, 0.0) - z, c - a - b) * f21c(&q, C64::new(1.0, 0.0) - z)?)
        }
        _ => Err(Error::Invalid(format!("kummer solution index {j}, expected 1..=6"))),
    }
}

/// `∂_z F = (a b / c) F[𝐚+(1|0), 𝐛+(1|0); 𝐜+(1|0); z]` (contiguous form,
/// exact up to series truncation).
pub fn dz(p: &Params, z: C64) -> Result<C64> {
    let q = p.shift_all_u(1);
    Ok(p.a.u * p.b.u / p.c.u * f21c(&q, z)?)
}

/// `∂_z̄ F = (a′ b′ / c′) F[𝐚+(0|1), …; z]`.
pub fn dzbar(p: &Params, z: C64) -> Result<C64> {
    let q = p.shift_all_p(1);
    Ok(p.a.up * p.b.up / p.c.up * f21c(&q, z)?)
}

/// Residual of the holomorphic and antiholomorphic hypergeometric equations,
/// computed through exact contiguous derivatives and normalized by the value.
/// Returns the larger of the two relative residuals.
pub fn pde_residual(p: &Params, z: C64) -> Result<f64> {
    let f = f21c(p, z)?;
    let scale = f.norm().max(1e-30);

    let fz = dz(p, z)?;
    let fzz = {
        let q2 = p.shift_all_u(2);
        p.a.u * p.b.u / p.c.u * (p.a.u + 1.0) * (p.b.u + 1.0) / (p.c.u + 1.0) * f21c(&q2, z)?
    };
    let r1 = z * (1.0 - z) * fzz + (p.c.u - (p.a.u + p.b.u + 1.0) * z) * fz - p.a.u * p.b.u * f;

    let fzb = dzbar(p, z)?;
    let fzbzb = {
        let q2 = p.shift_all_p(2);
        p.a.up * p.b.up / p.c.up * (p.a.up + 1.0) * (p.b.up + 1.0) / (p.c.up + 1.0)
            * f21c(&q2, z)?
    };
    let zb = z.conj();
    let r2 = zb * (1.0 - zb) * fzbzb + (p.c.up - (p.a.up + p.b.up + 1.0) * zb) * fzb
        - p.a.up * p.b.up * f;

    let denom = scale * (1.0 + (p.a.u * p.b.u).norm().max((p.a.up * p.b.up).norm()));
    Ok(r1.norm().max(r2.norm()) / denom)
}

/// Residual of the unprimed-shift three-term parameter recurrence
/// `−α (F[𝐚+1ᵤ, 𝐛−1ᵤ] − F) − β (F[𝐚−1ᵤ, 𝐛+1ᵤ] − F) = z F`,
/// with `α = a(c−b)/((a−b)(1+a−b))`, `β = b(c−a)/((b−a)(1+b−a))`, and the
/// mirrored primed-shift recurrence producing `z̄ F`.  Returns the larger
/// relative residual.
pub fn difference_residual(p: &Params, z: C64) -> Result<f64> {
    let f = f21c(p, z)?;
    let scale = (z.norm() + 1.0) * f.norm().max(1e-30);

    let (au, bu, cu) = (p.a.u, p.b.u, p.c.u);
    let al = au * (cu - bu) / ((au - bu) * (1.0 + au - bu));
    let be = bu * (cu - au) / ((bu - au) * (1.0 + bu - au));
    let fpm = f21c(&Params::new(p.a.shift_u(1), p.b.shift_u(-1), p.c), z)?;
    let fmp = f21c(&Params::new(p.a.shift_u(-1), p.b.shift_u(1), p.c), z)?;
    let r1 = -al * (fpm - f) - be * (fmp - f) - z * f;

    let (ap, bp, cp) = (p.a.up, p.b.up, p.c.up);
    let alp = ap * (cp - bp) / ((ap - bp) * (1.0 + ap - bp));
    let bep = bp * (cp - ap) / ((bp - ap) * (1.0 + bp - ap));
    let fpm = f21c(&Params::new(p.a.shift_p(1), p.b.shift_p(-1), p.c), z)?;
    let fmp = f21c(&Params::new(p.a.shift_p(-1), p.b.shift_p(1), p.c), z)?;
    let r2 = -alp * (fpm - f) - bep * (fmp - f) - z.conj() * f;

    Ok(r1.norm().max(r2.norm()) / scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;

    fn bd(u: C64, up: C64) -> Bidegree {
        Bidegree::new(u, up).unwrap()
    }

    /// A generic parameter triple with one nonzero index difference,
    /// exercising the `i`-power bookkeeping.
    fn p1() -> Params {
        Params::new(
            bd(c64(0.31, 0.4), c64(-0.69, 0.4)),
            bd(c64(0.42, -0.15), c64(0.42, -0.15)),
            bd(c64(1.15, 0.12), c64(0.15, 0.12)),
        )
    }

    fn rel(x: C64, want: C64) -> f64 {
        (x - want).norm() / want.norm()
    }

    #[test]
    fn six_region_reference_values() {
        let p = p1();
        let cases = [
            (c64(0.2, 0.15), Region::Z, c64(0.94174075303433366, -0.86311616996428148)),
            (c64(0.85, 0.1), Region::OneMinusZ, c64(1.5232125758938389, -1.4919132010266231)),
            (c64(3.0, 2.0), Region::InvZ, c64(-2.1814762151234935, -0.23029224149587176)),
            (c64(-0.25, 0.05), Region::Zeta, c64(0.45562960063170679, 0.65652145244407002)),
            (c64(1.05, 0.3), Region::OneMinusInvZ, c64(0.82721607410532115, -1.7159086705878509)),
            (c64(-1.2, 2.5), Region::InvOneMinusZ, c64(-0.13161329785051033, 2.0728317524222935)),
        ];
        for (z, want_region, want) in cases {
            assert_eq!(select_region(z), want_region, "region at {z}");
            let got = f21c(&p, z).unwrap();
            assert!(rel(got, want) < 1e-11, "z={z}: got {got}, want {want}");
        }
    }

    #[test]
    fn representations_agree_on_overlap() {
        let p = p1();
        // All of Z, OneMinusZ, Zeta have variable modulus < 1 here.
        let z = c64(0.4, 0.55);
        let fz = f21c_in(&p, z, Region::Z).unwrap();
        let fo = f21c_in(&p, z, Region::OneMinusZ).unwrap();
        let fp = f21c_in(&p, z, Region::Zeta).unwrap();
        assert!(rel(fz, fo) < 1e-9);
        assert!(rel(fz, fp) < 1e-9);
    }

    #[test]
    fn value_at_one_is_the_gamma_ratio() {
        let p = p1();
        let want = c64(1.7850902093686161, -1.4000336040916289);
        assert!(rel(gauss_limit(&p), want) < 1e-12);
        // At z = 1 the `1−z` expansion collapses to its constant term.
        assert!(rel(f21c(&p, c64(1.0, 0.0)).unwrap(), want) < 1e-12);
        // Just short of 1 the value has moved by ~|1−z|^{2[𝐜−𝐚−𝐛]}.
        let near = f21c(&p, c64(1.0 - 1e-6, 0.0)).unwrap();
        let want_near = c64(1.7851002894696152, -1.4000251440796244);
        assert!(rel(near, want_near) < 1e-10);
    }

    #[test]
    fn kummer_solutions_agree() {
        let p = p1();
        let z = c64(0.3, 0.6);
        let u1 = kummer_u(1, &p, z).unwrap();
        for j in 2..=6 {
            let uj = kummer_u(j, &p, z).unwrap();
            assert!(rel(uj, u1) < 1e-9, "u{j} = {uj} vs u1 = {u1}");
        }
        assert!(kummer_u(7, &p, z).is_err());
    }

    #[test]
    fn pfaff_and_euler_transformations() {
        let p = p1();
        let z = c64(0.35, 0.4);
        let f = f21c(&p, z).unwrap();
        let one = c64(1.0, 0.0);
        let zeta = z / (z - 1.0);

        let pf1 = gpow(one - z, -p.a)
            * f21c(&Params::new(p.a, p.c - p.b, p.c), zeta).unwrap();
        let pf2 = gpow(one - z, -p.b)
            * f21c(&Params::new(p.c - p.a, p.b, p.c), zeta).unwrap();
        let euler = gpow(one - z, p.c - p.a - p.b)
            * f21c(&Params::new(p.c - p.a, p.c - p.b, p.c), z).unwrap();
        assert!(rel(pf1, f) < 1e-10);
        assert!(rel(pf2, f) < 1e-10);
        assert!(rel(euler, f) < 1e-10);
    }

    #[test]
    fn lattice_offsets_recover_degenerate_parameters() {
        let a = bd(c64(0.31, 0.4), c64(-0.69, 0.4));
        let b = bd(c64(0.42, -0.15), c64(0.42, -0.15));

        // 𝐜 on the integer lattice: the z-power representation needs the
        // paired-offset average; the 1−z representation is untouched.
        // (𝐜 = (2|0) keeps Γ^ℂ(𝐜) away from its zeros, so the value is
        // nonzero and the comparison meaningful.)
        let p = Params::new(a, b, bd(c64(2.0, 0.0), c64(0.0, 0.0)));
        let z = c64(0.45, 0.3);
        let via_z = f21c_in(&p, z, Region::Z).unwrap();
        let via_omz = f21c_in(&p, z, Region::OneMinusZ).unwrap();
        assert!(rel(via_z, via_omz) < 1e-5, "{via_z} vs {via_omz}");

        // 𝐛−𝐚 integral: the 1/z representation degenerates.
        let p = Params::new(
            a,
            bd(c64(1.31, 0.4), c64(0.31, 0.4)),
            bd(c64(1.15, 0.12), c64(0.15, 0.12)),
        );
        let z = c64(3.0, 2.0);
        let via_inv = f21c_in(&p, z, Region::InvZ).unwrap();
        let via_ominv = f21c_in(&p, z, Region::OneMinusInvZ).unwrap();
        assert!(rel(via_inv, via_ominv) < 1e-5, "{via_inv} vs {via_ominv}");
    }

    #[test]
    fn differential_and_difference_relations() {
        let p = p1();
        for z in [c64(0.35, 0.55), c64(-0.4, 0.3)] {
            assert!(pde_residual(&p, z).unwrap() < 1e-9);
            assert!(difference_residual(&p, z).unwrap() < 1e-9);
        }
    }

    #[test]
    fn route_terms_reassemble_the_regions() {
        let p = p1();
        let one = c64(1.0, 0.0);
        let cases = [
            (c64(0.2, 0.15), Region::Z),
            (c64(0.85, 0.1), Region::OneMinusZ),
            (c64(3.0, 2.0), Region::InvZ),
            (c64(-0.25, 0.05), Region::Zeta),
            (c64(1.05, 0.3), Region::OneMinusInvZ),
            (c64(-1.2, 2.5), Region::InvOneMinusZ),
        ];
        for (z, region) in cases {
            for reg in [false, true] {
                let (base, pfaff) = base_region(region);
                let (q, zz, pref) = if pfaff {
                    (pfaff_faces(&p), z / (z - one), gpow(one - z, -p.a))
                } else {
                    (p, z, one)
                };
                let t = route_terms(&q, base, reg);
                let (w, pw) = match base {
                    Region::Z => (zz, zz),
                    Region::OneMinusZ => (one - zz, one - zz),
                    Region::InvZ => (one / zz, -zz),
                    _ => unreachable!(),
                };
                let s = |u: [C64; 3], v: C64| gauss::series(u[0], u[1], u[2], v).unwrap();
                let powed = |d: Option<Bidegree>| d.map_or(one, |d| gpow(pw, d));
                let got = pref
                    * (t.k0 * powed(t.d0) * s(t.s0u, w) * s(t.s0p, w.conj())
                        + t.k1 * powed(t.d1) * s(t.s1u, w) * s(t.s1p, w.conj()));
                let want = f21c_with(&p, z, region, reg).unwrap();
                assert!(rel(got, want) < 1e-12, "region {region:?} reg={reg}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn conjugation_swaps_the_character()  {
        let p = p1();
        for z in [c64(0.3, 0.25), c64(-1.1, 0.7)] {
            let f = f21c(&p, z).unwrap();
            let g = f21c(&p.conj(), z).unwrap();
            assert!((f.conj() - g).norm() < 1e-11 * f.norm());
        }
    }
}
