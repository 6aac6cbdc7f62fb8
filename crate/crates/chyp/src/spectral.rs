//! The spectral layer over `₂F₁^ℂ`: the two-parameter deformation, its
//! Plancherel objects (kernel, density, weight, discrete point), and the
//! commuting differential / difference operator pairs.
//!
//! A *deformation* is a real pair `(a, b)` in the open square
//! `Π = {0 < a+b < 2, −1 < a−b < 1}`; spectral points are [`LambdaPoint`]s
//! with `λ = (k+σ)/2`, `λ′ = (−k+σ)/2`.  The kernel is the regularized
//! hypergeometric value
//!
//! `𝒦(z; k, σ) = ₂F₁^ℂ[(a+λ|a+λ′), (a−λ|a−λ′); (a+b|a+b); z] / Γ^ℂ(a+b|a+b)`,
//!
//! real on the unitary axis `σ = is` and invariant under the mirror
//! `(k, σ) → (−k, −σ)`.  It is a simultaneous eigenfunction twice over: of
//! the hypergeometric differential pair in `z` (eigenvalues `λ²`, `λ′²`,
//! see [`apply_d`]) and of a three-term difference pair acting on `(k, σ)`
//! (eigenvalues `z`, `z̄`, see [`apply_l`]).
//!
//! For the index transform built on this kernel see the `transform` module;
//! the weight `μ_{a,b}` and the density `κ_{a,b}` here are its two sides'
//! integration measures.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::bidegree::{gpow, Bidegree, LambdaPoint};
use crate::error::{Error, Result};
use crate::gamma::{g_ratio, gamma_c};
use crate::hyp::{self, Params, Region};
use crate::quad::{integrate_plane, QuadSpec, Quadrature, Singularity};
use crate::{c64, C64};

/// `(a, b)` lies in the open parameter square `Π`:
/// `0 < a+b < 2` and `−1 < a−b < 1`.
pub fn in_pi(a: f64, b: f64) -> bool {
    let (s, d) = (a + b, a - b);
    0.0 < s && s < 2.0 && -1.0 < d && d < 1.0
}

/// `(a, b)` lies in the closed unit square minus its four corners — the part
/// of `Π` whose spectrum is purely continuous.
pub fn in_pi_cont(a: f64, b: f64) -> bool {
    let corner = (a == 0.0 || a == 1.0) && (b == 0.0 || b == 1.0);
    (0.0..=1.0).contains(&a) && (0.0..=1.0).contains(&b) && !corner
}

/// A deformation: a validated parameter pair in `Π`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParamsAB {
    pub a: f64,
    pub b: f64,
}

impl ParamsAB {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if in_pi(a, b) {
            Ok(Self { a, b })
        } else {
            Err(Error::Invalid(format!(
                "parameters (a, b) = ({a}, {b}) outside the open square 0 < a+b < 2, −1 < a−b < 1"
            )))
        }
    }

    /// Hypergeometric parameter triple of the kernel at a spectral point:
    /// `𝐚 = (a+λ|a+λ′)`, `𝐛 = (a−λ|a−λ′)`, `𝐜 = (a+b|a+b)`.
    pub fn kernel_params(&self, lp: LambdaPoint) -> Result<Params> {
        let a = c64(self.a, 0.0);
        Ok(Params::new(
            Bidegree::new(a + lp.lam(), a + lp.lamp())?,
            Bidegree::new(a - lp.lam(), a - lp.lamp())?,
            Bidegree::diag_re(self.a + self.b),
        ))
    }

    /// Spectral radius beyond which [`kernel`] abandons the automatic series
    /// representation in favor of the inverse-variable reroutes and the
    /// asymptotic form.  On the wall `a+b = 1` the `z`-power representation
    /// sits permanently on its integer-lattice regularization, whose
    /// paired-offset noise grows with `|λ|`, so the switch comes down.
    pub fn lam_switch(&self) -> f64 {
        if (self.a + self.b - 1.0).abs() < 1e-12 {
            5.5
        } else {
            8.0
        }
    }

    /// Whether the deformation carries a discrete spectral point on top of
    /// the continuous band (see [`discrete_point`]).
    pub fn has_discrete_point(&self) -> bool {
        !in_pi_cont(self.a, self.b)
    }
}

/// The weight `μ_{a,b}(z) = |z|^{2(a+b−1)} |1−z|^{2(a−b)}` of the planar side.
pub fn mu_weight(p: ParamsAB, z: C64) -> Result<f64> {
    let w = z.norm().powf(2.0 * (p.a + p.b) - 2.0)
        * (1.0 - z).norm().powf(2.0 * (p.a - p.b));
    if w.is_finite() {
        Ok(w)
    } else {
        Err(Error::NearSingular(format!("weight at z = {z}")))
    }
}

/// How a kernel value gets computed at one point: through a series
/// representation, or through the closed asymptotic form.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum KernelRoute {
    Exact(Region),
    Asym,
}

/// Largest series-variable modulus trusted at large spectral parameter.
/// Beyond the switch the connection coefficients grow like `e^{π|s|/2}` and
/// the series needs this much slack to keep full cancellation headroom; the
/// two inverse-variable representations are the only ones whose coefficient
/// degeneracies stay clear of the kernel's parameter walls.
const BIG_ROUTE_MAX: f64 = 0.82;

pub(crate) fn kernel_route(z: C64, big: bool) -> KernelRoute {
    let r = hyp::select_region(z);
    if !big {
        return KernelRoute::Exact(r);
    }
    match r {
        Region::InvZ | Region::OneMinusInvZ => KernelRoute::Exact(r),
        _ => {
            let m = hyp::region_moduli(z);
            if m[2] <= BIG_ROUTE_MAX {
                KernelRoute::Exact(Region::InvZ)
            } else if m[4] <= BIG_ROUTE_MAX {
                KernelRoute::Exact(Region::OneMinusInvZ)
            } else {
                KernelRoute::Asym
            }
        }
    }
}

/// The spectral kernel `𝒦(z; k, σ)`.
///
/// Up to `|λ| ≤ lam_switch` this is the regularized `₂F₁^ℂ` in the
/// representation picked by modulus; past the switch, points are rerouted to
/// an inverse-variable representation when one converges comfortably and to
/// [`kernel_asym`] otherwise (relative error `≲ 1/|λ|` there).
pub fn kernel(p: ParamsAB, lp: LambdaPoint, z: C64) -> Result<C64> {
    kernel_with(p, lp, z, p.lam_switch())
}

pub(crate) fn kernel_with(p: ParamsAB, lp: LambdaPoint, z: C64, lam_switch: f64) -> Result<C64> {
    let q = p.kernel_params(lp)?;
    match kernel_route(z, lp.lam_abs() > lam_switch) {
        KernelRoute::Exact(r) => hyp::f21c_reg_in(&q, z, r),
        KernelRoute::Asym => kernel_asym(p, lp, z),
    }
}

/// Leading asymptotic form of the kernel for large `|λ|`, valid for `z` away
/// from the segment `[0, 1]`:
///
/// `𝒦°(z; λ) = |1−1/z|^{−1/2} |1−z|^{b−a} |z|^{−a−b}
///             · (w^{(λ|−λ̄)} + w^{−(λ|−λ̄)}) / (2|λ| Γ^ℂ(a−λ|a+λ̄) Γ^ℂ(b+λ|b−λ̄))`
///
/// where `w = (1−√(1−1/z)) / (1+√(1−1/z))` with the principal root.  On the
/// unitary axis the oscillating pair is `2cos(s·ln|w| + k·arg w)`, real; the
/// packaged value keeps the complex gamma pair as is.
pub fn kernel_asym(p: ParamsAB, lp: LambdaPoint, z: C64) -> Result<C64> {
    let lam = lp.lam();
    let labs = lam.norm();
    if labs < 1e-12 {
        return Err(Error::NearSingular("asymptotic kernel at λ = 0".into()));
    }
    let one = c64(1.0, 0.0);
    let inv = one - one / z;
    let rt = inv.sqrt();
    let w = (one - rt) / (one + rt);
    let front = inv.norm().powf(-0.5)
        * (one - z).norm().powf(p.b - p.a)
        * z.norm().powf(-(p.a + p.b));
    let deg = Bidegree::new(lam, -lam.conj())?;
    let main = gpow(w, deg) + gpow(one / w, deg);
    let a = c64(p.a, 0.0);
    let b = c64(p.b, 0.0);
    let pi = gamma_c(Bidegree::new(a - lam, a + lam.conj())?)
        * gamma_c(Bidegree::new(b + lam, b - lam.conj())?);
    Ok(front * main / (2.0 * labs * pi))
}

/// Plancherel density of the continuous band on the unitary axis,
///
/// `κ_{a,b}(k, s) = |λ Γ^ℂ(a−λ|a+λ̄) Γ^ℂ(b+λ|b−λ̄)|² / (2π²)`,
///
/// normalized so that `Σ_k w_k ∫ |Jf|² κ ds` with row weights `w_0 = 1`,
/// `w_{k≥1} = 2` recovers `‖f‖²_μ` (plus the discrete term when present).
/// Grows like `|λ|^{4(a+b)−2} / 2π²` at large `|λ|`.
pub fn plancherel_density(p: ParamsAB, lp: LambdaPoint) -> Result<f64> {
    if !lp.on_axis_p() {
        return Err(Error::Invalid(format!(
            "density needs an on-axis spectral point, got σ = {}",
            lp.sigma
        )));
    }
    let lam = lp.lam();
    let a = c64(p.a, 0.0);
    let b = c64(p.b, 0.0);
    let v = lam
        * gamma_c(Bidegree::new(a - lam, a + lam.conj())?)
        * gamma_c(Bidegree::new(b + lam, b - lam.conj())?);
    let kappa = v.norm_sqr() / (2.0 * PI * PI);
    if kappa.is_finite() {
        Ok(kappa)
    } else {
        Err(Error::NearSingular(format!("density pole at {lp}")))
    }
}

// ---------------------------------------------------------------------------
// The differential pair 𝔇, 𝔇̄.

/// Step factor for the Wirtinger stencils; the actual step is
/// `h = FD_STEP · max(1, |z|)`.  Second-derivative stencils divide the
/// evaluation noise of `f` by `h²`, so for series-evaluated functions
/// (noise ~1e-13 absolute) the optimum sits near `noise^(1/6)` — far larger
/// than the steps one would pick for first derivatives alone.
const FD_STEP: f64 = 5e-3;

struct Jet {
    f: C64,
    fz: C64,
    fzb: C64,
    fzz: C64,
    fzbzb: C64,
}

/// Wirtinger derivatives through fourth-order central stencils at step `h`
/// (the mixed `∂_x∂_y` uses the tensor square of the first-derivative
/// stencil, also fourth order).
fn jet<F>(f: &F, z: C64, h: f64) -> Result<Jet>
where
    F: Fn(C64) -> Result<C64>,
{
    let e = |dx: f64, dy: f64| f(z + c64(dx * h, dy * h));
    let f0 = f(z)?;
    let (px, mx, px2, mx2) = (e(1.0, 0.0)?, e(-1.0, 0.0)?, e(2.0, 0.0)?, e(-2.0, 0.0)?);
    let (py, my, py2, my2) = (e(0.0, 1.0)?, e(0.0, -1.0)?, e(0.0, 2.0)?, e(0.0, -2.0)?);
    let fx = (mx2 - 8.0 * mx + 8.0 * px - px2) / (12.0 * h);
    let fy = (my2 - 8.0 * my + 8.0 * py - py2) / (12.0 * h);
    let fxx = (-px2 + 16.0 * px - 30.0 * f0 + 16.0 * mx - mx2) / (12.0 * h * h);
    let fyy = (-py2 + 16.0 * py - 30.0 * f0 + 16.0 * my - my2) / (12.0 * h * h);
    const D1: [(f64, f64); 4] = [(-2.0, 1.0), (-1.0, -8.0), (1.0, 8.0), (2.0, -1.0)];
    let mut fxy = c64(0.0, 0.0);
    for (ox, cx) in D1 {
        for (oy, cy) in D1 {
            fxy += cx * cy * e(ox, oy)?;
        }
    }
    fxy /= 144.0 * h * h;
    let i = c64(0.0, 1.0);
    Ok(Jet {
        f: f0,
        fz: 0.5 * (fx - i * fy),
        fzb: 0.5 * (fx + i * fy),
        fzz: 0.25 * (fxx - fyy - 2.0 * i * fxy),
        fzbzb: 0.25 * (fxx - fyy + 2.0 * i * fxy),
    })
}

fn fd_step_checked(z: C64) -> Result<f64> {
    let h = FD_STEP * z.norm().max(1.0);
    if z.norm().min((z - 1.0).norm()) < 10.0 * h {
        return Err(Error::NearSingular(format!(
            "differential operator at z = {z}, inside the stencil guard around 0 and 1"
        )));
    }
    Ok(h)
}

/// The hypergeometric differential operator
///
/// `𝔇f = a²f − (a+b − (2a+1)z) ∂_z f − z(1−z) ∂_z² f`,
///
/// applied through finite differences with one Richardson level.  Signs are
/// chosen so that `𝔇𝒦 = λ²𝒦` and `𝔇1 = a²`.  Errors when `z` is within ten
/// stencil steps of a regular-singular point `0`, `1`.
pub fn apply_d<F>(p: ParamsAB, f: F, z: C64) -> Result<C64>
where
    F: Fn(C64) -> Result<C64>,
{
    let h = fd_step_checked(z)?;
    let at = |h: f64| -> Result<C64> {
        let j = jet(&f, z, h)?;
        let a2 = p.a * p.a;
        Ok(a2 * j.f - ((p.a + p.b) - (2.0 * p.a + 1.0) * z) * j.fz - z * (1.0 - z) * j.fzz)
    };
    Ok((16.0 * at(0.5 * h)? - at(h)?) / 15.0)
}

/// The conjugate operator `𝔇̄f = a²f − (a+b − (2a+1)z̄) ∂_z̄ f − z̄(1−z̄) ∂_z̄² f`,
/// with `𝔇̄𝒦 = λ′²𝒦`.
pub fn apply_dbar<F>(p: ParamsAB, f: F, z: C64) -> Result<C64>
where
    F: Fn(C64) -> Result<C64>,
{
    let h = fd_step_checked(z)?;
    let zb = z.conj();
    let at = |h: f64| -> Result<C64> {
        let j = jet(&f, z, h)?;
        let a2 = p.a * p.a;
        Ok(a2 * j.f - ((p.a + p.b) - (2.0 * p.a + 1.0) * zb) * j.fzb - zb * (1.0 - zb) * j.fzbzb)
    };
    Ok((16.0 * at(0.5 * h)? - at(h)?) / 15.0)
}

// ---------------------------------------------------------------------------
// The difference pair 𝔏, 𝔏̄.

/// Pole guard radius for the difference coefficients, and the paired offset
/// used inside it.  Near a coefficient pole the operator value is the
/// average of the two offset evaluations — the removable limit when the pole
/// cancels (as on every joint eigenfunction), the finite part otherwise.
const L_NEAR: f64 = 1e-6;
const L_EPS: f64 = 1e-6;

fn l_raw<F>(p: ParamsAB, f: &F, lp: LambdaPoint) -> Result<C64>
where
    F: Fn(LambdaPoint) -> Result<C64>,
{
    let lam = lp.lam();
    let (a, b) = (c64(p.a, 0.0), c64(p.b, 0.0));
    let two = 2.0 * lam;
    let al = (a + lam) * (b + lam) / (two * (1.0 + two));
    let be = (a - lam) * (b - lam) / (-two * (1.0 - two));
    let f0 = f(lp)?;
    let fp = f(LambdaPoint::new(lp.k + 1, lp.sigma + 1.0))?;
    let fm = f(LambdaPoint::new(lp.k - 1, lp.sigma - 1.0))?;
    Ok(-al * (fp - f0) - be * (fm - f0))
}

fn lbar_raw<F>(p: ParamsAB, f: &F, lp: LambdaPoint) -> Result<C64>
where
    F: Fn(LambdaPoint) -> Result<C64>,
{
    let lamp = lp.lamp();
    let (a, b) = (c64(p.a, 0.0), c64(p.b, 0.0));
    let two = 2.0 * lamp;
    let al = (a + lamp) * (b + lamp) / (two * (1.0 + two));
    let be = (a - lamp) * (b - lamp) / (-two * (1.0 - two));
    let f0 = f(lp)?;
    let fp = f(LambdaPoint::new(lp.k - 1, lp.sigma + 1.0))?;
    let fm = f(LambdaPoint::new(lp.k + 1, lp.sigma - 1.0))?;
    Ok(-al * (fp - f0) - be * (fm - f0))
}

fn near_pole(sigma: C64, pole_base: f64) -> Option<f64> {
    for m in [-1.0, 0.0, 1.0] {
        let sp = pole_base + m;
        if (sigma - sp).norm() < L_NEAR {
            return Some(sp);
        }
    }
    None
}

/// The difference operator in the `λ` direction,
///
/// `𝔏F(k, σ) = −α (F(k+1, σ+1) − F) − β (F(k−1, σ−1) − F)`,
/// `α = (a+λ)(b+λ) / (2λ(1+2λ))`, `β = (a−λ)(b−λ) / (−2λ(1−2λ))`,
///
/// with `𝔏𝒦(z; ·) = z·𝒦(z; ·)`.  Coefficient poles at `2λ ∈ {0, ±1}`
/// (σ within [`L_NEAR`] of `−k−1, −k, −k+1`) are handled by paired-offset
/// averaging in σ.
pub fn apply_l<F>(p: ParamsAB, f: F, lp: LambdaPoint) -> Result<C64>
where
    F: Fn(LambdaPoint) -> Result<C64>,
{
    if let Some(sp) = near_pole(lp.sigma, -(lp.k as f64)) {
        let hi = l_raw(p, &f, LambdaPoint::new(lp.k, c64(sp + L_EPS, 0.0)))?;
        let lo = l_raw(p, &f, LambdaPoint::new(lp.k, c64(sp - L_EPS, 0.0)))?;
        return Ok(0.5 * (hi + lo));
    }
    l_raw(p, &f, lp)
}

/// The conjugate difference operator (shifts `λ′` instead of `λ`), with
/// `𝔏̄𝒦(z; ·) = z̄·𝒦(z; ·)`; poles at `2λ′ ∈ {0, ±1}`.
pub fn apply_lbar<F>(p: ParamsAB, f: F, lp: LambdaPoint) -> Result<C64>
where
    F: Fn(LambdaPoint) -> Result<C64>,
{
    if let Some(sp) = near_pole(lp.sigma, lp.k as f64) {
        let hi = lbar_raw(p, &f, LambdaPoint::new(lp.k, c64(sp + L_EPS, 0.0)))?;
        let lo = lbar_raw(p, &f, LambdaPoint::new(lp.k, c64(sp - L_EPS, 0.0)))?;
        return Ok(0.5 * (hi + lo));
    }
    lbar_raw(p, &f, lp)
}

// ---------------------------------------------------------------------------
// Test functions on the plane.

/// A planar function with a declared support annulus
/// (`f(z) = 0` for `|z|` outside `[r_inner, r_outer]`).
#[derive(Clone)]
pub struct PlanarFunction {
    f: Arc<dyn Fn(C64) -> C64 + Send + Sync>,
    pub r_inner: f64,
    pub r_outer: f64,
}

impl PlanarFunction {
    pub fn new<F>(f: F, r_inner: f64, r_outer: f64) -> Self
    where
        F: Fn(C64) -> C64 + Send + Sync + 'static,
    {
        Self { f: Arc::new(f), r_inner, r_outer }
    }

    pub fn eval(&self, z: C64) -> C64 {
        (self.f)(z)
    }
}

/// A `C^∞` bump in log-polar coordinates about `center`: with
/// `u = ln|z| − ln|center|` and `v = arg(z / center)` (principal),
///
/// `g(z) = exp(−α u²/(1 − (u/w)²) − β v²/(1 − (v/w)²))`
///
/// inside `|u| < w, |v| < w` and `0` outside.  Compactly supported away from
/// `0`, `1` for generic centers, value `1` at the center.
#[derive(Clone, Copy, Debug)]
pub struct LogPolarBump {
    pub center: C64,
    /// Radial decay rate `α`.
    pub radial_sharpness: f64,
    /// Angular decay rate `β`.
    pub angular_sharpness: f64,
    /// Half-width `w` of the log-polar support square.
    pub half_width: f64,
}

impl LogPolarBump {
    pub fn new(center: C64) -> Self {
        Self { center, radial_sharpness: 6.0, angular_sharpness: 6.0, half_width: 1.3 }
    }

    pub fn eval(&self, z: C64) -> f64 {
        if z.norm() == 0.0 {
            return 0.0;
        }
        let u = z.norm().ln() - self.center.norm().ln();
        let v = (z * C64::from_polar(1.0, -self.center.arg())).arg();
        let w = self.half_width;
        let (tu, tv) = ((u / w) * (u / w), (v / w) * (v / w));
        if tu >= 1.0 || tv >= 1.0 {
            return 0.0;
        }
        (-self.radial_sharpness * u * u / (1.0 - tu)
            - self.angular_sharpness * v * v / (1.0 - tv))
            .exp()
    }

    /// Radial support interval `[|center| e^{−w}, |center| e^{w}]`.
    pub fn support(&self) -> (f64, f64) {
        let r0 = self.center.norm();
        (r0 * (-self.half_width).exp(), r0 * self.half_width.exp())
    }

    pub fn planar(&self) -> PlanarFunction {
        let bump = *self;
        let (lo, hi) = self.support();
        PlanarFunction::new(move |z| c64(bump.eval(z), 0.0), lo, hi)
    }
}

/// Singularity charts of the weighted integrand `𝒦·f·μ`: the product's power
/// at `0` is `min(a+b−1, 0)` and at `1` is `min(a−b, 0)` (in diagonal units,
/// `|z−c|^{2e}`); a chart is declared only when the power is negative.
fn mu_singularities(p: ParamsAB) -> Vec<Singularity> {
    let mut v = Vec::new();
    let e0 = (p.a + p.b - 1.0).min(0.0);
    if e0 < -1e-9 {
        v.push(Singularity::new(c64(0.0, 0.0), e0));
    }
    let e1 = (p.a - p.b).min(0.0);
    if e1 < -1e-9 {
        v.push(Singularity::new(c64(1.0, 0.0), e1));
    }
    v
}

/// One point of the index transform by adaptive quadrature:
/// `(Jf)(k, σ) = ∫_ℂ f(z) 𝒦(z; k, σ) μ_{a,b}(z) dz`.
///
/// For gridded spectral sweeps use the `transform` module; this entry point
/// is the accuracy oracle for single points.
pub fn forward_transform(
    p: ParamsAB,
    f: &PlanarFunction,
    lp: LambdaPoint,
    spec: &QuadSpec,
) -> Result<Quadrature> {
    let sing = mu_singularities(p);
    let f = f.clone();
    let g = move |z: C64| {
        let fv = f.eval(z);
        if fv == c64(0.0, 0.0) {
            return fv;
        }
        match kernel(p, lp, z).and_then(|kv| mu_weight(p, z).map(|m| kv * fv * m)) {
            Ok(v) => v,
            Err(_) => c64(f64::NAN, f64::NAN),
        }
    };
    integrate_plane(g, &sing, spec)
}

// ---------------------------------------------------------------------------
// The discrete spectral point.

/// The single discrete point a deformation in `Π ∖ Π_cont` carries.
#[derive(Clone, Copy, Debug)]
pub struct DiscreteSpectrumPoint {
    /// Spectral location `(a₀|a₀)` in the normalized chamber `a₀ < 0`; its
    /// mirror `(−a₀|−a₀)` is implied.
    pub location: Bidegree,
    /// Plancherel mass `W` of the location.  Each of the mirror pair carries
    /// `W`, so inner products pick up `2W` in total.
    pub mass: f64,
    /// The associated eigenfunction — constant on the plane.
    pub eigenfunction_value: C64,
}

/// Reflections of the parameter square moving every discrete-series strip
/// onto `{a < 0}` while preserving the weight geometry up to a multiplier
/// (compare [`homographic_map`] variants 1–4).
fn chamber(p: ParamsAB) -> ParamsAB {
    let (mut a, mut b) = (p.a, p.b);
    if a > 1.0 || b > 1.0 {
        a = 1.0 - a;
        b = 1.0 - b;
    }
    if b < 0.0 {
        std::mem::swap(&mut a, &mut b);
    }
    ParamsAB { a, b }
}

/// The discrete spectral point of the deformation, or `None` when the
/// spectrum is purely continuous.  In the normalized chamber `a₀ < 0` the
/// point sits at `λ = a₀` with
///
/// `W = G(a₀+b₀) G(b₀−a₀) G(2a₀+1) / 2π`,  `G(x) = Γ(x)/Γ(1−x)`,
///
/// and eigenfunction `v ≡ 1/Γ^ℂ(a₀+b₀|a₀+b₀)`; mass and value refer to that
/// chamber.
pub fn discrete_point(p: ParamsAB) -> Option<DiscreteSpectrumPoint> {
    if !p.has_discrete_point() {
        return None;
    }
    let q = chamber(p);
    let mass = g_ratio(q.a + q.b) * g_ratio(q.b - q.a) * g_ratio(2.0 * q.a + 1.0) / (2.0 * PI);
    Some(DiscreteSpectrumPoint {
        location: Bidegree::diag_re(q.a),
        mass,
        eigenfunction_value: 1.0 / gamma_c(Bidegree::diag_re(q.a + q.b)),
    })
}

// ---------------------------------------------------------------------------
// Parameter symmetries of the weight family.

/// Multiplier descriptor of a parameter symmetry: the point map is
/// `τ(z) = 1−z` when `flip` is set (identity otherwise) and the weights obey
///
/// `μ_{a′,b′}(τ(z)) = γ(z)² · μ_{a,b}(z)`,  `γ(z) = |1−z|^{2u} |z|^{2v}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Multiplier {
    pub u: f64,
    pub v: f64,
    pub flip: bool,
}

impl Multiplier {
    pub fn map_point(&self, z: C64) -> C64 {
        if self.flip {
            C64::new(1.0, 0.0) - z
        } else {
            z
        }
    }

    /// `γ(z) = |1−z|^{2u} |z|^{2v}`.
    pub fn factor(&self, z: C64) -> f64 {
        (1.0 - z).norm().powf(2.0 * self.u) * z.norm().powf(2.0 * self.v)
    }
}

/// The eight parameter symmetries of the weight family, numbered `1..=8`:
/// identity, swap, point reflection, anti-transpose, then the same four
/// composed with the flip `z ↦ 1−z`.  All eight preserve the square `Π`;
/// the returned [`Multiplier`] ties the two weights together.
pub fn homographic_map(variant: usize, p: ParamsAB) -> (ParamsAB, Multiplier) {
    let (a, b) = (p.a, p.b);
    let (q, u, v, flip) = match variant {
        1 => ((a, b), 0.0, 0.0, false),
        2 => ((b, a), b - a, 0.0, false),
        3 => ((1.0 - a, 1.0 - b), b - a, 1.0 - a - b, false),
        4 => ((1.0 - b, 1.0 - a), 0.0, 1.0 - a - b, false),
        5 => ((a, 1.0 - b), 0.0, 0.0, true),
        6 => ((1.0 - b, a), 0.0, 1.0 - a - b, true),
        7 => ((b, 1.0 - a), b - a, 0.0, true),
        8 => ((1.0 - a, b), b - a, 1.0 - a - b, true),
        _ => panic!("homographic map variant {variant}, expected 1..=8"),
    };
    (ParamsAB { a: q.0, b: q.1 }, Multiplier { u, v, flip })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z1() -> C64 {
        c64(-0.38559993901602626, 0.23197561731965891)
    }

    fn z2() -> C64 {
        c64(-1.5423997560641050, -0.92790246927863562)
    }

    fn pab(a: f64, b: f64) -> ParamsAB {
        ParamsAB::new(a, b).unwrap()
    }

    #[test]
    fn parameter_square_membership() {
        assert!(in_pi(0.4, 0.7) && in_pi(-0.2, 0.7) && in_pi(1.3, 0.4));
        assert!(!in_pi(1.2, -0.3) && !in_pi(-0.2, -0.2) && !in_pi(1.5, 0.4));
        assert!(in_pi_cont(0.4, 0.7) && in_pi_cont(0.0, 0.5) && in_pi_cont(1.0, 0.5));
        assert!(!in_pi_cont(-0.2, 0.7) && !in_pi_cont(0.0, 1.0) && !in_pi_cont(1.0, 1.0));
        assert!(ParamsAB::new(2.5, 0.1).is_err());
    }

    #[test]
    fn weight_reference_values() {
        let w = mu_weight(pab(0.4, 0.7), c64(0.3, 0.4)).unwrap();
        assert!((w - 0.99064942974003677).abs() < 1e-14);
        let w = mu_weight(pab(-0.2, 0.7), z1()).unwrap();
        assert!((w - 1.2051316251111576).abs() < 1e-14);
        assert!(mu_weight(pab(0.4, 0.3), c64(0.0, 0.0)).is_err());
    }

    #[test]
    fn kernel_reference_values() {
        let cases = [
            (0.4, 0.7, z1(), 3, 2.5, -0.33758007100198248),
            (0.4, 0.7, z1(), 0, 1.7, -0.41890025725439268),
            (0.4, 0.7, z1(), 10, 7.0, 0.12994337608335310),
            (0.5, 0.5, z2(), 4, 3.0, -0.068260704501259165),
            (-0.2, 0.7, z1(), 2, 1.3, 0.53727409896026037),
        ];
        for (a, b, z, k, s, want) in cases {
            let got = kernel(pab(a, b), LambdaPoint::on_axis(k, s), z).unwrap();
            assert!(
                (got.re - want).abs() < 3e-6 * want.abs(),
                "K[{a},{b}]({z}; {k},{s}) = {got}, want {want}"
            );
            assert!(got.im.abs() < 3e-6 * want.abs(), "spurious imaginary part {}", got.im);
        }
    }

    #[test]
    fn kernel_rerouted_at_large_lambda() {
        // |λ| = 10, 20, 40 at a point whose inverse-variable representation
        // stays valid, so the values are exact, not asymptotic.
        let p = pab(0.4, 0.7);
        let zc = c64(2.0, 1.0);
        let cases = [
            (12, 16.0, 0.017845812238852729),
            (24, 32.0, -0.0084914931565356357),
            (48, 64.0, -0.0028394445306356911),
        ];
        for (k, s, want) in cases {
            assert_eq!(kernel_route(zc, true), KernelRoute::Exact(Region::InvZ));
            let got = kernel(p, LambdaPoint::on_axis(k, s), zc).unwrap();
            assert!(
                (got.re - want).abs() < 1e-7 * want.abs(),
                "K({k},{s}) = {got}, want {want}"
            );
        }
    }

    #[test]
    fn kernel_even_under_mirror_and_integer_swap() {
        let p = pab(0.4, 0.7);
        let lp = LambdaPoint::on_axis(3, 2.5);
        let k0 = kernel(p, lp, z1()).unwrap();
        let km = kernel(p, lp.mirror(), z1()).unwrap();
        assert!((k0 - km).norm() < 1e-10 * k0.norm());

        // At integer arguments the roles of k and σ can be exchanged:
        // 𝒦(·; p, q) = 𝒦(·; q, p) (λ stays, λ′ flips sign).
        let ka = kernel(p, LambdaPoint::new(2, c64(5.0, 0.0)), z1()).unwrap();
        let kb = kernel(p, LambdaPoint::new(5, c64(2.0, 0.0)), z1()).unwrap();
        assert!((ka - kb).norm() < 1e-10 * ka.norm(), "{ka} vs {kb}");
    }

    #[test]
    fn asymptotic_kernel_reference_values() {
        let p = pab(0.4, 0.7);
        let zc = c64(2.0, 1.0);
        let cases = [
            (12, 16.0, c64(0.017353112294232564, 4.1633675026973312e-5), 0.017845812238852729),
            (24, 32.0, c64(-0.0085948498041666329, -1.0312971803610895e-5), -0.0084914931565356357),
            (48, 64.0, c64(-0.0028150899094713603, -1.6890192909429808e-6), -0.0028394445306356911),
        ];
        let mut prev = f64::INFINITY;
        for (k, s, want, exact) in cases {
            let got = kernel_asym(p, LambdaPoint::on_axis(k, s), zc).unwrap();
            assert!((got - want).norm() < 1e-12 * want.norm(), "asym({k},{s}) = {got}");
            // The asymptotic error shrinks like 1/|λ|.
            let rel = (got.re - exact).abs() / exact.abs();
            assert!(rel < 0.03 && rel < 0.75 * prev, "rel {rel} after {prev}");
            prev = rel;
        }
    }

    #[test]
    fn density_reference_values() {
        let cases = [
            (0.4, 0.7, 3, 2.5, 0.25258917458850040),
            (0.4, 0.7, 12, 16.0, 12.724939708541543),
            (0.9, 0.2, 0, 5.0, 0.45740715210598214),
            (0.5, 0.5, 4, 3.0, 0.31662869888230554),
        ];
        for (a, b, k, s, want) in cases {
            let got = plancherel_density(pab(a, b), LambdaPoint::on_axis(k, s)).unwrap();
            assert!((got - want).abs() < 1e-12 * want, "κ[{a},{b}]({k},{s}) = {got}");
        }
        // Even, zero at the origin, axis-only.
        let p = pab(0.4, 0.7);
        let k1 = plancherel_density(p, LambdaPoint::on_axis(2, -3.0)).unwrap();
        let k2 = plancherel_density(p, LambdaPoint::on_axis(-2, 3.0)).unwrap();
        assert!((k1 - k2).abs() < 1e-14 * k1);
        assert_eq!(plancherel_density(p, LambdaPoint::on_axis(0, 0.0)).unwrap(), 0.0);
        assert!(plancherel_density(p, LambdaPoint::new(1, c64(0.3, 1.0))).is_err());
    }

    #[test]
    fn differential_pair_eigenvalues() {
        let p = pab(0.4, 0.7);
        let lp = LambdaPoint::on_axis(2, 1.3);
        let z = c64(0.3, 0.4);
        let f = |z: C64| kernel(p, lp, z);
        let kv = kernel(p, lp, z).unwrap();

        let lam2 = lp.lam() * lp.lam();
        let got = apply_d(p, f, z).unwrap();
        assert!(
            (got - lam2 * kv).norm() < 1e-6 * kv.norm(),
            "𝔇K = {got}, want {} (K = {kv})",
            lam2 * kv
        );

        let lamp2 = lp.lamp() * lp.lamp();
        let got = apply_dbar(p, f, z).unwrap();
        assert!((got - lamp2 * kv).norm() < 1e-6 * kv.norm(), "𝔇̄K = {got}");

        // Constants are eigenfunctions with eigenvalue a².
        let got = apply_d(p, |_| Ok(c64(1.0, 0.0)), z).unwrap();
        assert!((got - c64(p.a * p.a, 0.0)).norm() < 1e-8);

        // Stencil guard near the regular-singular points.
        assert!(apply_d(p, f, c64(1e-4, 0.0)).is_err());
    }

    #[test]
    fn difference_pair_eigenvalues() {
        let p = pab(0.4, 0.7);
        let z = z1();
        let f = |lp: LambdaPoint| kernel(p, lp, z);

        let lp = LambdaPoint::on_axis(2, 1.3);
        let kv = kernel(p, lp, z).unwrap();
        let got = apply_l(p, f, lp).unwrap();
        assert!((got - z * kv).norm() < 1e-9 * (z.norm() * kv.norm()), "𝔏K = {got}");
        let got = apply_lbar(p, f, lp).unwrap();
        assert!((got - z.conj() * kv).norm() < 1e-9 * (z.norm() * kv.norm()));

        // On a coefficient pole (2λ = 1 at k = 1, s = 0) the paired-offset
        // route recovers the eigen relation.
        let lp = LambdaPoint::on_axis(1, 0.0);
        let kv = kernel(p, lp, z).unwrap();
        let got = apply_l(p, f, lp).unwrap();
        assert!(
            (got - z * kv).norm() < 1e-8 * (z.norm() * kv.norm()),
            "𝔏K at the pole = {got}, want {}",
            z * kv
        );
        let got = apply_lbar(p, f, lp).unwrap();
        assert!((got - z.conj() * kv).norm() < 1e-8 * (z.norm() * kv.norm()));
    }

    #[test]
    fn bump_shape() {
        let bump = LogPolarBump::new(C64::from_polar(0.45, 2.6));
        assert!((bump.eval(C64::from_polar(0.45, 2.6)) - 1.0).abs() < 1e-15);
        assert_eq!(bump.eval(c64(0.0, 0.0)), 0.0);
        assert_eq!(bump.eval(C64::from_polar(0.45 * 3.7, 2.6)), 0.0);
        assert_eq!(bump.eval(C64::from_polar(0.45, 2.6 + 1.31)), 0.0);
        let inside = bump.eval(C64::from_polar(0.5, 2.2));
        assert!(inside > 0.0 && inside < 1.0);
        let (lo, hi) = bump.support();
        assert!(lo < 0.45 && hi > 0.45);
    }

    #[test]
    fn discrete_point_mass_and_eigenfunction() {
        let p = pab(-0.2, 0.7);
        let d = discrete_point(p).unwrap();
        assert!((d.mass - 0.012002294513171673).abs() < 1e-16);
        assert!((d.eigenfunction_value - c64(1.0, 0.0)).norm() < 1e-14);
        assert!((d.location.u - c64(-0.2, 0.0)).norm() < 1e-15);

        // The kernel at the discrete location is that constant.
        let lp = LambdaPoint::new(0, c64(-0.4, 0.0));
        let kv = kernel(p, lp, z1()).unwrap();
        assert!((kv - d.eigenfunction_value).norm() < 1e-10);

        // All four strips of Π ∖ Π_cont normalize to the same chamber.
        for (a, b) in [(0.7, -0.2), (1.2, 0.5), (0.5, 1.2)] {
            let q = chamber(pab(a, b));
            let want = if a == 0.7 { (-0.2, 0.7) } else { (-0.2, 0.5) };
            assert!((q.a - want.0).abs() < 1e-15 && (q.b - want.1).abs() < 1e-15, "{q:?}");
            assert!(discrete_point(pab(a, b)).is_some());
        }
        assert!(discrete_point(pab(0.4, 0.7)).is_none());
        assert!(discrete_point(pab(0.0, 0.5)).is_none());
    }

    #[test]
    fn homographic_maps_contract_the_weight() {
        for (a, b) in [(0.4, 0.7), (-0.2, 0.7)] {
            let p = pab(a, b);
            for z in [c64(0.3, 0.4), c64(-1.1, 0.6)] {
                let w = mu_weight(p, z).unwrap();
                for variant in 1..=8 {
                    let (q, m) = homographic_map(variant, p);
                    assert!(in_pi(q.a, q.b), "variant {variant} leaves Π");
                    let lhs = mu_weight(q, m.map_point(z)).unwrap();
                    let g = m.factor(z);
                    assert!(
                        (lhs - g * g * w).abs() < 1e-12 * lhs.abs(),
                        "variant {variant} at z = {z}: {lhs} vs {}",
                        g * g * w
                    );
                }
            }
        }
        // The point reflection is an involution.
        let p = pab(0.4, 0.7);
        let (q, _) = homographic_map(3, p);
        let (r, _) = homographic_map(3, q);
        assert_eq!(r, p);
    }

    #[test]
    fn adaptive_forward_transform_matches_midpoint_sum() {
        // The adaptive transform against a brute midpoint rule in log-polar
        // coordinates over the bump's support, same integrand.
        let p = pab(0.4, 0.7);
        let lp = LambdaPoint::on_axis(1, 0.8);
        let bump = LogPolarBump::new(C64::from_polar(0.45, 2.6));
        let spec = QuadSpec {
            tail_exponent: f64::INFINITY,
            target_rel_error: 1e-5,
            ..QuadSpec::default()
        };
        let got = forward_transform(p, &bump.planar(), lp, &spec).unwrap();

        let n = 220;
        let h = 2.0 * bump.half_width / n as f64;
        let (rho0, th0) = (0.45f64.ln(), 2.6);
        let mut want = c64(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                let rho = rho0 - bump.half_width + (i as f64 + 0.5) * h;
                let th = th0 - bump.half_width + (j as f64 + 0.5) * h;
                let z = C64::from_polar(rho.exp(), th);
                let fv = bump.eval(z);
                if fv > 1e-13 {
                    want += fv
                        * kernel(p, lp, z).unwrap()
                        * mu_weight(p, z).unwrap()
                        * (h * h * (2.0 * rho).exp());
                }
            }
        }
        assert!(
            (got.value - want).norm() < 5e-3 * want.norm(),
            "transform {} vs midpoint {want}",
            got.value
        );
    }
}
