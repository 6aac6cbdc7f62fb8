//! The index transform on grids: log-polar sampling of the plane side,
//! trapezoid sweeps of the spectral side, and a batched kernel evaluator
//! that makes full sweeps affordable.
//!
//! A sweep evaluates `𝒦(z; k, s)` for every pair of a few thousand grid
//! nodes and a few thousand spectral points.  Per spectral point, the
//! connection coefficients and the series coefficient arrays of each
//! representation depend only on the parameters, not on `z`, so
//! [`KernelBatch`] groups the nodes by representation once and shares that
//! work across the whole group; on the unitary axis the conjugate-side series
//! usually coincides with the conjugate of a direct-side one, halving the
//! series work again.  Batched rows match the scalar kernel to roundoff —
//! the scalar path stays the accuracy oracle.
//!
//! Row conventions: rows `k = 0..=k_max` carry weights `w_0 = 1`,
//! `w_{k≥1} = 2` (the mirror `(−k, −s)` of each point is folded in), and the
//! `s`-line is sampled on a symmetric fine-panel-plus-coarse-wings node set
//! with trapezoid weights.

use crate::bidegree::{Bidegree, LambdaPoint};
use crate::error::{Error, Result};
use crate::gamma::gamma_c;
use crate::gauss;
use crate::hyp::{self, Params, Region};
use crate::par::{map_indexed, tree_sum, tree_sum_re, ExecMode};
use crate::spectral::{
    discrete_point, kernel_route, kernel_with, mu_weight, plancherel_density,
    DiscreteSpectrumPoint, KernelRoute, ParamsAB, PlanarFunction,
};
use crate::{c64, C64};
use std::f64::consts::PI;

// ---------------------------------------------------------------------------
// Grids.

/// Layout of a spectral sweep: which `(k, s)` points to visit and how to
/// weight them in quadrature over the spectral set.
#[derive(Clone, Copy, Debug)]
pub struct SpectralGridSpec {
    /// Rows `k = 0..=k_max`.
    pub k_max: i64,
    /// The `s`-line is truncated to `[−s_max, s_max]`.
    pub s_max: f64,
    /// Extent of the fine central panel (clipped to `s_max`; wings are
    /// omitted when it already covers the line).
    pub fine_limit: f64,
    pub fine_step: f64,
    pub coarse_step: f64,
    /// Override of the kernel's asymptotic switch radius; `None` takes the
    /// parameter default.
    pub lam_switch: Option<f64>,
    pub mode: ExecMode,
}

impl Default for SpectralGridSpec {
    fn default() -> Self {
        Self {
            k_max: 32,
            s_max: 40.0,
            fine_limit: 16.0,
            fine_step: 0.16,
            coarse_step: 0.8,
            lam_switch: None,
            mode: ExecMode::default(),
        }
    }
}

impl SpectralGridSpec {
    /// Symmetric node set on `[−s_max, s_max]` hitting `0` exactly, with
    /// trapezoid weights for the irregular spacing.
    pub fn s_nodes(&self) -> (Vec<f64>, Vec<f64>) {
        assert!(
            self.s_max > 0.0 && self.fine_step > 0.0 && self.coarse_step > 0.0,
            "spectral grid needs positive extent and steps"
        );
        let lim = self.fine_limit.min(self.s_max);
        let m = (lim / self.fine_step + 1e-9).floor() as i64;
        let mut pos: Vec<f64> = (1..=m).map(|j| j as f64 * self.fine_step).collect();
        if self.fine_limit < self.s_max {
            let edge = m as f64 * self.fine_step;
            let jw = ((self.s_max - edge) / self.coarse_step + 1e-9).floor() as i64;
            pos.extend((1..=jw).map(|j| edge + j as f64 * self.coarse_step));
        }
        let mut xs = Vec::with_capacity(2 * pos.len() + 1);
        xs.extend(pos.iter().rev().map(|x| -x));
        xs.push(0.0);
        xs.extend(pos.iter().copied());
        let n = xs.len();
        let mut wt = vec![0.0; n];
        for i in 0..n {
            let lo = if i == 0 { xs[0] } else { xs[i - 1] };
            let hi = if i == n - 1 { xs[n - 1] } else { xs[i + 1] };
            wt[i] = 0.5 * (hi - lo);
        }
        (xs, wt)
    }
}

/// A planar function sampled on a log-polar midpoint grid, with the weight
/// `μ` and the area element baked in.  Nodes where the function is
/// negligible (below `1e-13` of its grid maximum) are dropped.
#[derive(Clone, Debug)]
pub struct TransformGrid {
    pub params: ParamsAB,
    pub z: Vec<C64>,
    pub f: Vec<C64>,
    pub mu: Vec<f64>,
    /// Area weight of the node's cell, `h_ρ h_θ e^{2ρ}`.
    pub w2: Vec<f64>,
}

impl TransformGrid {
    /// Sample `f` on an `n × n` midpoint grid in `(ln r, θ)` over the support
    /// annulus `[r_inner, r_outer] × [−π, π)`.
    pub fn sample(f: &PlanarFunction, n: usize, p: ParamsAB) -> Result<Self> {
        if n == 0 || !(f.r_inner > 0.0 && f.r_outer > f.r_inner) {
            return Err(Error::Invalid(format!(
                "log-polar sampling needs n ≥ 1 and 0 < r_inner < r_outer, got n = {n}, \
                 [{}, {}]",
                f.r_inner, f.r_outer
            )));
        }
        let rho0 = f.r_inner.ln();
        let h_rho = (f.r_outer.ln() - rho0) / n as f64;
        let h_th = 2.0 * PI / n as f64;
        let mut raw = Vec::with_capacity(n * n);
        let mut fmax = 0.0f64;
        for i in 0..n {
            let rho = rho0 + (i as f64 + 0.5) * h_rho;
            let r = rho.exp();
            for j in 0..n {
                let th = -PI + (j as f64 + 0.5) * h_th;
                let zz = C64::from_polar(r, th);
                let fv = f.eval(zz);
                fmax = fmax.max(fv.norm());
                raw.push((zz, fv, h_rho * h_th * r * r));
            }
        }
        if fmax == 0.0 {
            return Err(Error::Invalid("the function vanishes on the sampling grid".into()));
        }
        let mut g = Self {
            params: p,
            z: Vec::new(),
            f: Vec::new(),
            mu: Vec::new(),
            w2: Vec::new(),
        };
        for (zz, fv, w2) in raw {
            if fv.norm() <= 1e-13 * fmax {
                continue;
            }
            g.mu.push(mu_weight(p, zz)?);
            g.z.push(zz);
            g.f.push(fv);
            g.w2.push(w2);
        }
        Ok(g)
    }

    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    /// `‖f‖²_μ ≈ Σ |f|² μ w₂` over the kept nodes.
    pub fn norm_sq(&self) -> f64 {
        let terms: Vec<f64> = (0..self.len())
            .map(|m| self.f[m].norm_sqr() * self.mu[m] * self.w2[m])
            .collect();
        tree_sum_re(&terms)
    }

    /// `Σ f μ w₂ ≈ ∫ f dμ` over the kept nodes.
    fn integral_mu(&self) -> C64 {
        let terms: Vec<C64> =
            (0..self.len()).map(|m| self.f[m] * (self.mu[m] * self.w2[m])).collect();
        tree_sum(&terms)
    }
}

// ---------------------------------------------------------------------------
// The transformed function.

/// Transform value at the discrete spectral point.
#[derive(Clone, Copy, Debug)]
pub struct AtomValue {
    pub point: DiscreteSpectrumPoint,
    pub value: C64,
}

/// A function on the truncated spectral set: rows `k = 0..=k_max` over a
/// shared `s`-node line, with the Plancherel density tabulated alongside and
/// the discrete term when the deformation carries one.
#[derive(Clone, Debug)]
pub struct SpectralFunction {
    pub params: ParamsAB,
    /// Asymptotic switch radius the rows were computed with.
    pub lam_switch: f64,
    pub s: Vec<f64>,
    pub weights: Vec<f64>,
    /// `rows[k][i]` is the value at `(k, s[i])`.
    pub rows: Vec<Vec<C64>>,
    /// `kappa[k][i]` is the Plancherel density at `(k, s[i])`.
    pub kappa: Vec<Vec<f64>>,
    pub atom: Option<AtomValue>,
}

impl SpectralFunction {
    pub fn k_max(&self) -> i64 {
        self.rows.len() as i64 - 1
    }

    fn continuous_inner(&self, g: &SpectralFunction) -> C64 {
        assert!(
            self.params == g.params && self.s == g.s,
            "inner product needs matching spectral grids"
        );
        let mut total = c64(0.0, 0.0);
        for k in 0..self.rows.len().min(g.rows.len()) {
            let wk = if k == 0 { 1.0 } else { 2.0 };
            let terms: Vec<C64> = (0..self.s.len())
                .map(|i| {
                    self.rows[k][i]
                        * g.rows[k][i].conj()
                        * (self.weights[i] * self.kappa[k][i])
                })
                .collect();
            total += wk * tree_sum(&terms);
        }
        total
    }

    /// Spectral inner product `Σ_k w_k Σ_i wt_i F Ḡ κ`, plus `2W F_at Ḡ_at`
    /// when both sides carry the discrete term.
    pub fn inner(&self, g: &SpectralFunction) -> C64 {
        let mut total = self.continuous_inner(g);
        if let (Some(x), Some(y)) = (&self.atom, &g.atom) {
            total += 2.0 * x.point.mass * x.value * y.value.conj();
        }
        total
    }

    pub fn norm_sq(&self) -> f64 {
        self.inner(self).re
    }

    /// The norm restricted to the continuous band.
    pub fn continuous_norm_sq(&self) -> f64 {
        self.continuous_inner(self).re
    }

    /// Least-squares slope of `ln|F|` against `ln(k² + s²)` over the points
    /// with `k² + s² > q_min`, and how many went in.  Steeply negative slopes
    /// certify the decay that truncated sweeps rely on.
    pub fn decay_slope(&self, q_min: f64) -> (f64, usize) {
        let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
        let mut n = 0usize;
        for k in 0..self.rows.len() {
            let kk = (k * k) as f64;
            for i in 0..self.s.len() {
                let q = kk + self.s[i] * self.s[i];
                let m = self.rows[k][i].norm();
                if q <= q_min || m < 1e-300 {
                    continue;
                }
                let (x, y) = (q.ln(), m.ln());
                sx += x;
                sy += y;
                sxx += x * x;
                sxy += x * y;
                n += 1;
            }
        }
        if n < 2 {
            return (f64::NAN, n);
        }
        let nf = n as f64;
        ((nf * sxy - sx * sy) / (nf * sxx - sx * sx), n)
    }
}

// ---------------------------------------------------------------------------
// Forward and adjoint sweeps.

/// The transform of a sampled function over a full spectral sweep:
/// `(Jf)(k, s) = Σ_nodes 𝒦(z; k, s) f(z) μ(z) w₂`, with the density rows and
/// the discrete term filled in.
pub fn transform_grid(grid: &TransformGrid, gs: &SpectralGridSpec) -> Result<SpectralFunction> {
    assert!(gs.k_max >= 0, "k_max must be nonnegative");
    if grid.is_empty() {
        return Err(Error::Invalid("empty transform grid".into()));
    }
    let p = grid.params;
    let lam_switch = gs.lam_switch.unwrap_or_else(|| p.lam_switch());
    let (s, weights) = gs.s_nodes();
    let ns = s.len();
    let nk = (gs.k_max + 1) as usize;
    let batch = KernelBatch::new(p, &grid.z, lam_switch);
    let jobs = map_indexed(nk * ns, gs.mode, |j| -> Result<(C64, f64)> {
        let lp = LambdaPoint::on_axis((j / ns) as i64, s[j % ns]);
        let row = batch.row(lp)?;
        let mut acc = c64(0.0, 0.0);
        for (m, kv) in row.iter().enumerate() {
            acc += kv * grid.f[m] * (grid.mu[m] * grid.w2[m]);
        }
        Ok((acc, plancherel_density(p, lp)?))
    });
    let mut flat = Vec::with_capacity(nk * ns);
    for r in jobs {
        flat.push(r?);
    }
    let mut rows = Vec::with_capacity(nk);
    let mut kappa = Vec::with_capacity(nk);
    for k in 0..nk {
        let chunk = &flat[k * ns..(k + 1) * ns];
        rows.push(chunk.iter().map(|t| t.0).collect());
        kappa.push(chunk.iter().map(|t| t.1).collect());
    }
    let atom = discrete_point(p).map(|pt| AtomValue {
        point: pt,
        value: pt.eigenfunction_value * grid.integral_mu(),
    });
    Ok(SpectralFunction { params: p, lam_switch, s, weights, rows, kappa, atom })
}

/// The transform at a single (possibly off-axis) spectral point, summed with
/// the scalar kernel.  Off-axis points arise from difference operators acting
/// on the spectral side.
pub fn transform_at(grid: &TransformGrid, lp: LambdaPoint, lam_switch: Option<f64>) -> Result<C64> {
    let p = grid.params;
    let sw = lam_switch.unwrap_or_else(|| p.lam_switch());
    let mut acc = c64(0.0, 0.0);
    for m in 0..grid.len() {
        acc += kernel_with(p, lp, grid.z[m], sw)? * grid.f[m] * (grid.mu[m] * grid.w2[m]);
    }
    Ok(acc)
}

/// The adjoint sweep at one planar point:
/// `(J*F)(z) = Σ_k w_k Σ_i wt_i F(k, s_i) 𝒦̄(z; k, s_i) κ(k, s_i) + 2W F_at v̄`.
pub fn adjoint_transform(fs: &SpectralFunction, z: C64) -> Result<C64> {
    let p = fs.params;
    let mut total = c64(0.0, 0.0);
    for k in 0..fs.rows.len() {
        let wk = if k == 0 { 1.0 } else { 2.0 };
        let mut acc = c64(0.0, 0.0);
        for i in 0..fs.s.len() {
            let lp = LambdaPoint::on_axis(k as i64, fs.s[i]);
            let kv = kernel_with(p, lp, z, fs.lam_switch)?;
            acc += fs.rows[k][i] * kv.conj() * (fs.weights[i] * fs.kappa[k][i]);
        }
        total += wk * acc;
    }
    if let Some(x) = &fs.atom {
        total += 2.0 * x.point.mass * x.value * x.point.eigenfunction_value.conj();
    }
    Ok(total)
}

/// The adjoint sweep on a whole grid's nodes, through the batched kernel.
/// Accumulation is row by row in a fixed order, so the result is
/// deterministic.
pub fn adjoint_grid(fs: &SpectralFunction, grid: &TransformGrid) -> Result<Vec<C64>> {
    assert!(grid.params == fs.params, "adjoint needs the grid and sweep parameters to match");
    let batch = KernelBatch::new(fs.params, &grid.z, fs.lam_switch);
    let mut out = vec![c64(0.0, 0.0); grid.len()];
    for k in 0..fs.rows.len() {
        let wk = if k == 0 { 1.0 } else { 2.0 };
        for i in 0..fs.s.len() {
            let coef = fs.rows[k][i] * (wk * fs.weights[i] * fs.kappa[k][i]);
            if coef == c64(0.0, 0.0) {
                continue;
            }
            let row = batch.row(LambdaPoint::on_axis(k as i64, fs.s[i]))?;
            for (m, kv) in row.iter().enumerate() {
                out[m] += coef * kv.conj();
            }
        }
    }
    if let Some(x) = &fs.atom {
        let add = 2.0 * x.point.mass * x.value * x.point.eigenfunction_value.conj();
        for o in &mut out {
            *o += add;
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// The batched kernel evaluator.

/// Scalar fallback band about `s = 0`: there the inverse-variable
/// representations sit on their integer-lattice degeneracy, whose paired
/// offsets are parameter- (not node-) local, so the scalar path handles the
/// whole row.
const S_FALLBACK: f64 = 1e-4;

/// Node data of one representation group: the series variable, the power
/// base in log form, and the Pfaff prefactor base when the representation
/// goes through the Pfaff map.
struct Group {
    region: Region,
    idx: Vec<usize>,
    w: Vec<C64>,
    pw_ln: Vec<f64>,
    pw_arg: Vec<f64>,
    /// `ln|1−z|` and `arg(1−z)` for the prefactor `(1−z)^{−𝐚}`.
    pref: Option<(Vec<f64>, Vec<f64>)>,
}

impl Group {
    fn new(region: Region) -> Self {
        let pfaff = hyp::base_region(region).1;
        Self {
            region,
            idx: Vec::new(),
            w: Vec::new(),
            pw_ln: Vec::new(),
            pw_arg: Vec::new(),
            pref: pfaff.then(|| (Vec::new(), Vec::new())),
        }
    }

    fn push(&mut self, i: usize, z: C64) {
        let one = c64(1.0, 0.0);
        let (base, pfaff) = hyp::base_region(self.region);
        let zz = if pfaff { z / (z - one) } else { z };
        let w = match base {
            Region::Z => zz,
            Region::OneMinusZ => one - zz,
            Region::InvZ => one / zz,
            _ => unreachable!(),
        };
        let pw = match base {
            Region::Z => zz,
            Region::OneMinusZ => one - zz,
            Region::InvZ => -zz,
            _ => unreachable!(),
        };
        self.idx.push(i);
        self.w.push(w);
        self.pw_ln.push(pw.norm().ln());
        self.pw_arg.push(pw.arg());
        if let Some((ln, arg)) = &mut self.pref {
            let omz = one - z;
            ln.push(omz.norm().ln());
            arg.push(omz.arg());
        }
    }
}

/// Asymptotic-route node data: the front factor and the oscillation phase
/// pieces, all parameter-only or node-only.
struct AsymGroup {
    idx: Vec<usize>,
    front: Vec<f64>,
    ln_w: Vec<f64>,
    arg_w: Vec<f64>,
}

/// Kernel rows over a fixed node set.  Construction classifies every node
/// once for both the small-`|λ|` and large-`|λ|` routing regimes; each
/// [`row`](KernelBatch::row) call then shares connection coefficients and
/// series coefficient arrays across all nodes of a group.
pub(crate) struct KernelBatch {
    p: ParamsAB,
    lam_switch: f64,
    zs: Vec<C64>,
    small: Vec<Group>,
    big: Vec<Group>,
    asym: Option<AsymGroup>,
}

impl KernelBatch {
    pub(crate) fn new(p: ParamsAB, zs: &[C64], lam_switch: f64) -> Self {
        let mut small: Vec<Group> = Vec::new();
        let mut big: Vec<Group> = Vec::new();
        let mut asym: Option<AsymGroup> = None;
        let mut put = |groups: &mut Vec<Group>, r: Region, i: usize, z: C64| {
            match groups.iter_mut().find(|g| g.region == r) {
                Some(g) => g.push(i, z),
                None => {
                    let mut g = Group::new(r);
                    g.push(i, z);
                    groups.push(g);
                }
            }
        };
        for (i, &z) in zs.iter().enumerate() {
            match kernel_route(z, false) {
                KernelRoute::Exact(r) => put(&mut small, r, i, z),
                KernelRoute::Asym => unreachable!("small regime never routes to the asymptote"),
            }
            match kernel_route(z, true) {
                KernelRoute::Exact(r) => put(&mut big, r, i, z),
                KernelRoute::Asym => {
                    let g = asym.get_or_insert_with(|| AsymGroup {
                        idx: Vec::new(),
                        front: Vec::new(),
                        ln_w: Vec::new(),
                        arg_w: Vec::new(),
                    });
                    let one = c64(1.0, 0.0);
                    let inv = one - one / z;
                    let rt = inv.sqrt();
                    let w = (one - rt) / (one + rt);
                    g.idx.push(i);
                    g.front.push(
                        inv.norm().powf(-0.5)
                            * (one - z).norm().powf(p.b - p.a)
                            * z.norm().powf(-(p.a + p.b)),
                    );
                    g.ln_w.push(w.norm().ln());
                    g.arg_w.push(w.arg());
                }
            }
        }
        Self { p, lam_switch, zs: zs.to_vec(), small, big, asym }
    }

    /// Kernel values at every node for the on-axis spectral point.
    pub(crate) fn row(&self, lp: LambdaPoint) -> Result<Vec<C64>> {
        if !lp.on_axis_p() {
            return Err(Error::Invalid(format!(
                "batched rows live on the unitary axis, got σ = {}",
                lp.sigma
            )));
        }
        let s = lp.sigma.im;
        if s.abs() < S_FALLBACK {
            return self
                .zs
                .iter()
                .map(|&z| kernel_with(self.p, lp, z, self.lam_switch))
                .collect();
        }
        let q = self.p.kernel_params(lp)?;
        let big = lp.lam_abs() > self.lam_switch;
        let mut out = vec![c64(0.0, 0.0); self.zs.len()];
        let groups = if big { &self.big } else { &self.small };
        for g in groups {
            eval_group(&q, g, &mut out)?;
        }
        if big {
            if let Some(g) = &self.asym {
                self.eval_asym(lp, g, &mut out)?;
            }
        }
        Ok(out)
    }

    fn eval_asym(&self, lp: LambdaPoint, g: &AsymGroup, out: &mut [C64]) -> Result<()> {
        let lam = lp.lam();
        let a = c64(self.p.a, 0.0);
        let b = c64(self.p.b, 0.0);
        let pi = gamma_c(Bidegree::new(a - lam, a + lam.conj())?)
            * gamma_c(Bidegree::new(b + lam, b - lam.conj())?);
        let coef = 1.0 / (2.0 * lam.norm() * pi);
        let (k, s) = (lp.k as f64, lp.sigma.im);
        for (j, &i) in g.idx.iter().enumerate() {
            out[i] = g.front[j] * 2.0 * (s * g.ln_w[j] + k * g.arg_w[j]).cos() * coef;
        }
        Ok(())
    }
}

/// One group's contribution to a row: resolve the degeneracy variants, build
/// each variant's connection data once, evaluate, and average.
fn eval_group(q: &Params, g: &Group, out: &mut [C64]) -> Result<()> {
    let (base, pfaff) = hyp::base_region(g.region);
    let variants = match hyp::degeneracy(q, g.region) {
        None => vec![*q],
        Some((shift, d0)) => vec![
            hyp::apply_shift(q, shift, d0 + hyp::EPS),
            hyp::apply_shift(q, shift, d0 - hyp::EPS),
        ],
    };
    let scale = 1.0 / variants.len() as f64;
    for qv in &variants {
        let faces = if pfaff { hyp::pfaff_faces(qv) } else { *qv };
        let rt = hyp::route_terms(&faces, base, true);
        let vals = eval_terms(&rt, g)?;
        match &g.pref {
            Some((ln, arg)) => {
                // Pfaff prefactor (1−z)^{−𝐚} of the (possibly shifted) 𝐚.
                let d = -qv.a;
                let (du, dn) = (d.u + d.up, d.u - d.up);
                for (j, v) in vals.into_iter().enumerate() {
                    let pref = (du * ln[j] + C64::i() * dn * arg[j]).exp();
                    out[g.idx[j]] += scale * pref * v;
                }
            }
            None => {
                for (j, v) in vals.into_iter().enumerate() {
                    out[g.idx[j]] += scale * v;
                }
            }
        }
    }
    Ok(())
}

/// Evaluate the two-term representation at every node of a group, sharing
/// series coefficient arrays and exploiting conjugate pairing.
fn eval_terms(rt: &hyp::RouteTerms, g: &Group) -> Result<Vec<C64>> {
    let us = [rt.s0u, rt.s1u];
    let src = [prime_source(rt.s0p, &us), prime_source(rt.s1p, &us)];
    let mut bank_u = [SeriesBank::new(rt.s0u), SeriesBank::new(rt.s1u)];
    let mut bank_p = [
        src[0].is_none().then(|| SeriesBank::new(rt.s0p)),
        src[1].is_none().then(|| SeriesBank::new(rt.s1p)),
    ];
    let mut vals = Vec::with_capacity(g.idx.len());
    for j in 0..g.idx.len() {
        let w = g.w[j];
        let u0 = bank_u[0].eval(w)?;
        let u1 = bank_u[1].eval(w)?;
        let uu = [u0, u1];
        let mut prime = |t: usize| -> Result<C64> {
            match src[t] {
                Some(m) => Ok(uu[m].conj()),
                None => bank_p[t].as_mut().unwrap().eval(w.conj()),
            }
        };
        let p0 = prime(0)?;
        let p1 = prime(1)?;
        let f0 = powfac(rt.d0, g.pw_ln[j], g.pw_arg[j]);
        let f1 = powfac(rt.d1, g.pw_ln[j], g.pw_arg[j]);
        vals.push(rt.k0 * f0 * u0 * p0 + rt.k1 * f1 * u1 * p1);
    }
    Ok(vals)
}

/// `base^{(d)}` from the stored `ln|base|`, `arg base` — the generalized
/// power `exp((u+u′) ln|base| + i (u−u′) arg base)`, with the `base = 0`
/// limit pinned to `0` as in [`crate::gpow`].
fn powfac(d: Option<Bidegree>, ln: f64, arg: f64) -> C64 {
    match d {
        None => c64(1.0, 0.0),
        Some(d) => {
            if ln == f64::NEG_INFINITY {
                return c64(0.0, 0.0);
            }
            ((d.u + d.up) * ln + C64::i() * (d.u - d.up) * arg).exp()
        }
    }
}

/// Which direct-side series the conjugate of a primed triple coincides with
/// (the Gauss series is symmetric in its first two parameters).  On-axis
/// kernel parameters pair up in every non-Pfaff representation and in some
/// Pfaff ones; when nothing matches, the primed series is summed directly.
fn prime_source(sp: [C64; 3], us: &[[C64; 3]; 2]) -> Option<usize> {
    let c = [sp[0].conj(), sp[1].conj(), sp[2].conj()];
    let eq = |x: C64, y: C64| (x - y).norm() < 1e-12;
    us.iter().position(|u| {
        eq(c[2], u[2])
            && ((eq(c[0], u[0]) && eq(c[1], u[1])) || (eq(c[0], u[1]) && eq(c[1], u[0])))
    })
}

/// The Gauss series with its coefficient array shared across evaluation
/// points; coefficients extend on demand.  Same recurrence, termination rule
/// and guards as [`gauss::series`].
struct SeriesBank {
    al: C64,
    be: C64,
    ga: C64,
    coef: Vec<C64>,
}

impl SeriesBank {
    fn new(t: [C64; 3]) -> Self {
        Self { al: t[0], be: t[1], ga: t[2], coef: vec![c64(1.0, 0.0)] }
    }

    fn extend(&mut self) -> Result<()> {
        let n = self.coef.len() - 1;
        let nf = n as f64;
        let den = self.ga + nf;
        if den.norm() < 1e-12 {
            return Err(Error::NearSingular(format!("series denominator c+{n} ~ 0")));
        }
        let next = self.coef[n] * (self.al + nf) * (self.be + nf) / (den * (nf + 1.0));
        self.coef.push(next);
        Ok(())
    }

    fn eval(&mut self, w: C64) -> Result<C64> {
        let m = w.norm();
        if m >= 0.995 {
            return Err(Error::SlowConvergence(m));
        }
        let eps2 = gauss::TERM_EPS * gauss::TERM_EPS;
        let mut acc = self.coef[0];
        let mut wp = c64(1.0, 0.0);
        let mut small = 0u32;
        for n in 1..=gauss::MAX_TERMS {
            if n >= self.coef.len() {
                self.extend()?;
            }
            wp *= w;
            let term = self.coef[n] * wp;
            acc += term;
            if term.norm_sqr() <= eps2 * acc.norm_sqr() {
                small += 1;
                if small >= 3 {
                    return Ok(acc);
                }
            } else {
                small = 0;
            }
        }
        Err(Error::SlowConvergence(m))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::LogPolarBump;

    fn pab(a: f64, b: f64) -> ParamsAB {
        ParamsAB::new(a, b).unwrap()
    }

    fn bump1() -> LogPolarBump {
        LogPolarBump::new(C64::from_polar(0.45, 2.6))
    }

    #[test]
    fn spectral_nodes_and_weights() {
        let gs = SpectralGridSpec::default();
        let (x, w) = gs.s_nodes();
        assert_eq!(x.len(), 261);
        let n = x.len();
        for i in 0..n {
            assert_eq!(x[i], -x[n - 1 - i]);
        }
        assert_eq!(x[n / 2], 0.0);
        // Fine panel reaches ±16, wings step 0.8 up to ±40.
        assert!((x[n - 1] - 40.0).abs() < 1e-9 && (x[n / 2 + 100] - 16.0).abs() < 1e-9);
        let span: f64 = w.iter().sum();
        assert!((span - 80.0).abs() < 1e-9);
        // Trapezoid weights: plateau values inside each panel, the average at
        // the junction, half-panels at the ends.
        assert!((w[n / 2] - 0.16).abs() < 1e-12);
        assert!((w[n / 2 + 100] - 0.48).abs() < 1e-12);
        assert!((w[n - 2] - 0.8).abs() < 1e-12 && (w[n - 1] - 0.4).abs() < 1e-12);

        // Fine panel covering the whole line: no wings.
        let gs = SpectralGridSpec { s_max: 4.0, fine_limit: 4.0, fine_step: 0.5, ..gs };
        let (x, w) = gs.s_nodes();
        assert_eq!(x.len(), 17);
        assert_eq!(x[16], 4.0);
        assert!((w[0] - 0.25).abs() < 1e-12 && (w[8] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn batch_rows_match_the_scalar_kernel() {
        // One node in each of the six representations, plus extra coverage
        // of the rerouting and asymptotic cells at large |λ|.
        let zs = [
            c64(0.2, 0.15),
            c64(0.85, 0.1),
            c64(3.0, 2.0),
            c64(-0.25, 0.05),
            c64(1.05, 0.3),
            c64(-1.2, 2.5),
            c64(-0.38559993901602626, 0.23197561731965891),
            c64(0.3, 0.4),
            c64(2.0, 1.0),
            c64(0.6, 0.8),
        ];
        // Walls included: a+b = 1 and a = b at (0.5, 0.5).
        for p in [pab(0.4, 0.7), pab(0.5, 0.5), pab(0.9, 0.2)] {
            let batch = KernelBatch::new(p, &zs, p.lam_switch());
            for (k, s) in [
                (0i64, 0.37),
                (2, 1.3),
                (3, 0.0),
                (1, 3e-5),
                (12, 7.3),
                (21, 0.16),
                (0, 16.0),
            ] {
                let lp = LambdaPoint::on_axis(k, s);
                let row = batch.row(lp).unwrap();
                // The two paths share the formulas but associate the
                // arithmetic differently, so they agree only up to roundoff
                // times the coefficient-cancellation condition number:
                // ~e^{π|s|/2} in the small-|λ| representations.  On the
                // rerouted inverse-variable representations the series climb
                // through terms of degree ~|λ| against an O(1) bottom
                // parameter before cancelling, which near the unit segment
                // costs both paths ~1e-7 absolute by |λ| ≈ 10 (checked
                // against a 50-digit reference at z = 1.05+0.3i, k = 21).
                let amp = if lp.lam_abs() > p.lam_switch() {
                    1e7
                } else {
                    (0.5 * PI * s.abs()).exp().max(1e2)
                };
                for (m, &z) in zs.iter().enumerate() {
                    let want = kernel_with(p, lp, z, p.lam_switch()).unwrap();
                    assert!(
                        (row[m] - want).norm() <= 1e-13 * amp * (1.0 + want.norm()),
                        "p=({},{}) (k,s)=({k},{s}) z={z}: {} vs {want}",
                        p.a,
                        p.b,
                        row[m]
                    );
                }
            }
        }
    }

    #[test]
    fn rows_are_real_on_the_axis() {
        let p = pab(0.4, 0.7);
        let zs = [c64(0.3, 0.4), c64(-0.38559993901602626, 0.23197561731965891), c64(2.0, 1.0)];
        let batch = KernelBatch::new(p, &zs, p.lam_switch());
        let row = batch.row(LambdaPoint::on_axis(3, 2.5)).unwrap();
        for kv in &row {
            assert!(kv.im.abs() < 1e-10 * (1.0 + kv.re.abs()), "kernel row value {kv}");
        }
        assert!((row[1].re - -0.33758007100198248).abs() < 1e-10);
    }

    #[test]
    fn log_polar_sampling_converges_fast() {
        let p = pab(0.4, 0.7);
        let f = bump1().planar();
        let n1 = TransformGrid::sample(&f, 64, p).unwrap().norm_sq();
        let n2 = TransformGrid::sample(&f, 128, p).unwrap().norm_sq();
        assert!(n1 > 0.0);
        assert!((n1 - n2).abs() < 1e-6 * n2, "{n1} vs {n2}");
        assert!(TransformGrid::sample(&f, 0, p).is_err());
    }

    #[test]
    fn truncated_sweep_is_nearly_unitary_and_invertible() {
        let p = pab(0.4, 0.7);
        let grid = TransformGrid::sample(&bump1().planar(), 48, p).unwrap();
        let gs = SpectralGridSpec {
            k_max: 14,
            s_max: 16.0,
            fine_limit: 16.0,
            fine_step: 0.2,
            coarse_step: 0.8,
            lam_switch: None,
            mode: ExecMode::Sequential,
        };
        let fs = transform_grid(&grid, &gs).unwrap();
        assert!(fs.atom.is_none());

        // Truncated unitarity.
        let ratio = fs.norm_sq() / grid.norm_sq();
        assert!((ratio - 1.0).abs() < 0.05, "norm ratio {ratio}");

        // Sequential and parallel sweeps agree bitwise.
        let fs2 = transform_grid(&grid, &SpectralGridSpec { mode: ExecMode::Parallel, ..gs })
            .unwrap();
        assert_eq!(fs.rows, fs2.rows);

        // Adjoint round trip at interior points of the support.
        for z in [grid.z[grid.len() / 2], grid.z[grid.len() / 3]] {
            let back = adjoint_transform(&fs, z).unwrap();
            let bump = bump1();
            let want = c64(bump.eval(z), 0.0);
            assert!((back - want).norm() < 0.05, "J*Jf({z}) = {back}, f = {want}");
        }

        // Batched adjoint agrees with the scalar one.
        let mini = TransformGrid {
            params: p,
            z: grid.z[..3].to_vec(),
            f: grid.f[..3].to_vec(),
            mu: grid.mu[..3].to_vec(),
            w2: grid.w2[..3].to_vec(),
        };
        let rec = adjoint_grid(&fs, &mini).unwrap();
        for (m, &z) in mini.z.iter().enumerate() {
            let want = adjoint_transform(&fs, z).unwrap();
            assert!((rec[m] - want).norm() < 1e-10 * (1.0 + want.norm()));
        }

        // Spectral decay of a smooth bump.
        let (slope, n) = fs.decay_slope(64.0);
        assert!(n > 50 && slope < -2.0, "decay slope {slope} over {n} points");
    }

    #[test]
    fn atom_parameters_attach_the_discrete_term() {
        let p = pab(-0.2, 0.7);
        let grid = TransformGrid::sample(&bump1().planar(), 32, p).unwrap();
        let gs = SpectralGridSpec {
            k_max: 4,
            s_max: 4.0,
            fine_limit: 4.0,
            fine_step: 0.5,
            coarse_step: 0.5,
            lam_switch: None,
            mode: ExecMode::Sequential,
        };
        let fs = transform_grid(&grid, &gs).unwrap();
        let atom = fs.atom.expect("deformation carries a discrete point");
        let want = atom.point.eigenfunction_value * grid.integral_mu();
        assert!((atom.value - want).norm() < 1e-14 * (1.0 + want.norm()));
        assert!(fs.norm_sq() > fs.continuous_norm_sq());
    }
}
