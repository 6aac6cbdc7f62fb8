//! Adaptive quadrature over the complex plane for integrands with isolated
//! power singularities and power-law decay at infinity, plus a Mellin
//! coefficient utility on the multiplicative plane.
//!
//! [`integrate_plane`] covers the disk `|z| ≤ outer_radius` with log-polar
//! charts: a bulk chart around the origin and one local chart per declared
//! singularity.  A smooth partition of unity splits the integrand between the
//! charts, and the log-polar substitution `r = e^ρ` turns a `|z−c|^{2e}`
//! singularity into a clean exponential radial profile, uniformly in the
//! exponent `e > −1`.  Each chart starts as a coarse grid of cells; every
//! cell carries a 2×2/4×4/8×8 midpoint ladder whose Richardson difference
//! drives a refinement queue ordered by absolute error contribution with the
//! cell index as the deterministic tie-break.  The region beyond
//! `outer_radius` is bounded analytically from the declared decay rate and
//! added to the error budget.
//!
//! Cell evaluations inside a sweep are independent and may run in parallel;
//! all reductions are deterministic tree sums, so results are bitwise
//! reproducible across thread counts.

use crate::bidegree::Bidegree;
use crate::error::{Error, Result};
use crate::par::{map_indexed, tree_sum, tree_sum_re, ExecMode};
use crate::{c64, C64};
use std::collections::BinaryHeap;
use std::f64::consts::PI;
use std::sync::atomic::{AtomicBool, Ordering};

/// An isolated power singularity of the integrand:
/// `|f(z)| ~ |z−center|^{2·exponent}` near `center`, integrable for
/// `exponent > −1`.  The factor 2 matches the diagonal power convention
/// `gpow(z, (e|e)) = |z|^{2e}`.
#[derive(Clone, Copy, Debug)]
pub struct Singularity {
    pub center: C64,
    pub exponent: f64,
}

impl Singularity {
    pub fn new(center: C64, exponent: f64) -> Self {
        Self { center, exponent }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct QuadSpec {
    /// Refine until the total error estimate drops below
    /// `target_rel_error · |value|`.
    pub target_rel_error: f64,
    /// Budget of cells ever created; exhausting it fails with
    /// [`Error::Budget`] carrying the partial value.
    pub max_cells: usize,
    /// Radius of the local chart around each singularity (shrunk
    /// automatically when singularities crowd each other).
    pub inner_radius: f64,
    /// Truncation radius `R`: the covered disk ends here and the tail bound
    /// takes over.
    pub outer_radius: f64,
    /// Decay rate `p` in `|f(z)| ≤ C·|z|^{−p}` for `|z| ≥ R`, with `C`
    /// estimated by sampling the outer circle; must exceed 2 for the tail to
    /// converge.  `f64::INFINITY` declares the integrand supported inside
    /// the covered disk (no tail term).
    pub tail_exponent: f64,
    pub mode: ExecMode,
}

impl Default for QuadSpec {
    fn default() -> Self {
        Self {
            target_rel_error: 1e-7,
            max_cells: 40_000,
            inner_radius: 0.2,
            outer_radius: 8.0,
            tail_exponent: 3.0,
            mode: ExecMode::default(),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Quadrature {
    pub value: C64,
    /// Total absolute error estimate: cell estimates + tail bound + the
    /// truncated chart cores.
    pub error: f64,
    /// Cells created over the whole refinement.
    pub cells: usize,
}

/// Inner truncation of the bulk chart; the omitted core contributes
/// `O(|f(0)|·R_IN²)` which is folded into the error estimate.
const R_IN: f64 = 1e-8;
/// Cells refined per coordinator sweep.
const BATCH: usize = 16;

/// `C^∞` cutoff: 1 for `r ≤ 0.45·radius`, 0 for `r ≥ 0.95·radius`.
fn cutoff(r: f64, radius: f64) -> f64 {
    let x = (0.95 - r / radius) * 2.0;
    if x >= 1.0 {
        1.0
    } else if x <= 0.0 {
        0.0
    } else {
        let q = (-1.0 / x).exp();
        q / (q + (-1.0 / (1.0 - x)).exp())
    }
}

#[derive(Clone, Copy)]
struct Chart {
    center: C64,
    rho_lo: f64,
    rho_hi: f64,
    /// Index into the singularity list, or `usize::MAX` for the bulk chart.
    which: usize,
}

#[derive(Clone, Copy)]
struct Cell {
    id: usize,
    chart: usize,
    r0: f64,
    r1: f64,
    p0: f64,
    p1: f64,
    value: C64,
    err: f64,
    split_rho: bool,
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Cell {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // Max-heap: largest error first, then the smaller (older) index.
        self.err
            .total_cmp(&other.err)
            .then_with(|| other.id.cmp(&self.id))
    }
}

struct Ctx<'a, F> {
    f: &'a F,
    sing: &'a [Singularity],
    radii: &'a [f64],
    charts: &'a [Chart],
    bad: &'a AtomicBool,
}

impl<F: Fn(C64) -> C64 + Sync> Ctx<'_, F> {
    fn weight(&self, which: usize, z: C64) -> f64 {
        if which == usize::MAX {
            let mut w = 1.0;
            for (s, &r) in self.sing.iter().zip(self.radii) {
                w -= cutoff((z - s.center).norm(), r);
            }
            w.max(0.0)
        } else {
            cutoff((z - self.sing[which].center).norm(), self.radii[which])
        }
    }

    /// Chart integrand `f(z)·weight·e^{2ρ}` at log-polar coordinates.
    fn g(&self, ch: &Chart, rho: f64, phi: f64) -> C64 {
        let z = ch.center + C64::from_polar(rho.exp(), phi);
        let w = self.weight(ch.which, z);
        if w <= 0.0 {
            return c64(0.0, 0.0);
        }
        let v = (self.f)(z);
        if !(v.re.is_finite() && v.im.is_finite()) {
            self.bad.store(true, Ordering::Relaxed);
            return c64(0.0, 0.0);
        }
        v * (w * (2.0 * rho).exp())
    }

    /// `m×m` midpoint rule on the cell; `keep` captures the 4×4 samples for
    /// the split-direction hint.
    fn mid(&self, ch: &Chart, c: (f64, f64, f64, f64), m: usize, keep: Option<&mut [C64; 16]>) -> C64 {
        let (r0, r1, p0, p1) = c;
        let hr = (r1 - r0) / m as f64;
        let hp = (p1 - p0) / m as f64;
        let mut acc = c64(0.0, 0.0);
        let mut buf = keep;
        for i in 0..m {
            let rho = r0 + (i as f64 + 0.5) * hr;
            for j in 0..m {
                let v = self.g(ch, rho, p0 + (j as f64 + 0.5) * hp);
                if let Some(b) = buf.as_deref_mut() {
                    b[i * 4 + j] = v;
                }
                acc += v;
            }
        }
        acc * (hr * hp)
    }

    fn eval_cell(&self, id: usize, chart: usize, c: (f64, f64, f64, f64)) -> Cell {
        let ch = &self.charts[chart];
        let mut s4 = [c64(0.0, 0.0); 16];
        let i2 = self.mid(ch, c, 2, None);
        let i4 = self.mid(ch, c, 4, Some(&mut s4));
        let i8 = self.mid(ch, c, 8, None);
        let r12 = i4 + (i4 - i2) / 3.0;
        let r23 = i8 + (i8 - i4) / 3.0;
        let (mut var_r, mut var_p) = (0.0, 0.0);
        for i in 0..4 {
            for j in 0..4 {
                if i < 3 {
                    var_r += (s4[(i + 1) * 4 + j] - s4[i * 4 + j]).norm();
                }
                if j < 3 {
                    var_p += (s4[i * 4 + j + 1] - s4[i * 4 + j]).norm();
                }
            }
        }
        Cell {
            id,
            chart,
            r0: c.0,
            r1: c.1,
            p0: c.2,
            p1: c.3,
            value: r23,
            err: (r23 - r12).norm(),
            split_rho: var_r >= var_p,
        }
    }
}

/// Integrate `f` over the whole plane.  See the module docs for the scheme.
///
/// Fails with [`Error::Divergent`] when the declared exponents make the
/// integral diverge, [`Error::Invalid`] on a malformed spec or a non-finite
/// sample in an active region, and [`Error::Budget`] (carrying the partial
/// value) when `max_cells` runs out before the target is met.
pub fn integrate_plane<F>(f: F, singularities: &[Singularity], spec: &QuadSpec) -> Result<Quadrature>
where
    F: Fn(C64) -> C64 + Sync,
{
    if !(spec.target_rel_error > 0.0) {
        return Err(Error::Invalid("target_rel_error must be positive".into()));
    }
    if !(spec.inner_radius > 0.0 && spec.inner_radius < 0.25) {
        return Err(Error::Invalid("inner_radius must lie in (0, 0.25)".into()));
    }
    if !(spec.outer_radius > 4.0) {
        return Err(Error::Invalid("outer_radius must exceed 4".into()));
    }
    if !(spec.tail_exponent > 2.0) {
        return Err(Error::Divergent(format!(
            "tail decay exponent {} does not dominate the area measure",
            spec.tail_exponent
        )));
    }
    for s in singularities {
        if !(s.exponent > -1.0) {
            return Err(Error::Divergent(format!(
                "singularity at {} with exponent {} is not integrable",
                s.center, s.exponent
            )));
        }
        if s.center.norm() > 0.5 * spec.outer_radius {
            return Err(Error::Invalid(format!(
                "singularity at {} too close to the truncation radius {}",
                s.center, spec.outer_radius
            )));
        }
    }

    // Local chart radii: keep the cutoff supports pairwise disjoint.
    let radii: Vec<f64> = singularities
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let mut r = spec.inner_radius;
            for (j, t) in singularities.iter().enumerate() {
                if i != j {
                    r = r.min(0.4 * (s.center - t.center).norm());
                }
            }
            r
        })
        .collect();

    let mut charts = vec![Chart {
        center: c64(0.0, 0.0),
        rho_lo: R_IN.ln(),
        rho_hi: spec.outer_radius.ln(),
        which: usize::MAX,
    }];
    // Relative mass of each chart's truncated core.  The depth aims at
    // e^{-28}; for exponents very close to −1 it is capped so that the raw
    // power |z−c|^{2e} stays inside f64 range, and the larger remainder is
    // charged to the error estimate instead.
    let mut core_rel = vec![0.0f64];
    for (i, (s, &r)) in singularities.iter().zip(&radii).enumerate() {
        let e = s.exponent;
        let depth = (28.0 / (2.0 * e + 2.0))
            .min(540.0 / (2.0 * e.abs()).max(1.0))
            .max(10.0);
        charts.push(Chart {
            center: s.center,
            rho_lo: r.ln() - depth,
            rho_hi: r.ln(),
            which: i,
        });
        core_rel.push((-(2.0 * e + 2.0) * depth).exp());
    }

    let bad = AtomicBool::new(false);
    let ctx = Ctx {
        f: &f,
        sing: singularities,
        radii: &radii,
        charts: &charts,
        bad: &bad,
    };

    // Tail bound beyond the covered disk.
    let tail = if spec.tail_exponent.is_finite() {
        let p = spec.tail_exponent;
        let mut c_est: f64 = 0.0;
        for j in 0..64 {
            let m = f(C64::from_polar(spec.outer_radius, (j as f64 + 0.5) * PI / 32.0)).norm();
            if m.is_finite() {
                c_est = c_est.max(m * spec.outer_radius.powf(p));
            }
        }
        2.0 * PI * c_est * spec.outer_radius.powf(2.0 - p) / (p - 2.0)
    } else {
        0.0
    };
    // Bulk core below R_IN, weighted by how much of it the bulk chart owns.
    let crumb = {
        let z0 = C64::from_polar(R_IN, 0.7);
        let w0 = ctx.weight(usize::MAX, z0);
        if w0 > 0.0 {
            let m = f(z0).norm();
            if !m.is_finite() {
                return Err(Error::Invalid(
                    "integrand is singular at the origin but no singularity was declared there"
                        .into(),
                ));
            }
            m * w0 * PI * R_IN * R_IN
        } else {
            0.0
        }
    };

    // Initial cells: aspect-balanced panels per chart.
    let mut rects: Vec<(usize, (f64, f64, f64, f64))> = Vec::new();
    for (ci, ch) in charts.iter().enumerate() {
        let span = ch.rho_hi - ch.rho_lo;
        let n_r = ((span / 1.2).ceil() as usize).clamp(6, 48);
        let n_p = 8usize;
        for i in 0..n_r {
            let r0 = ch.rho_lo + span * i as f64 / n_r as f64;
            let r1 = ch.rho_lo + span * (i + 1) as f64 / n_r as f64;
            for j in 0..n_p {
                let p0 = -PI + 2.0 * PI * j as f64 / n_p as f64;
                let p1 = -PI + 2.0 * PI * (j + 1) as f64 / n_p as f64;
                rects.push((ci, (r0, r1, p0, p1)));
            }
        }
    }
    let cells0 = map_indexed(rects.len(), spec.mode, |t| {
        ctx.eval_cell(t, rects[t].0, rects[t].1)
    });

    let mut heap: BinaryHeap<Cell> = BinaryHeap::with_capacity(4 * cells0.len());
    let mut sum_val = c64(0.0, 0.0);
    let mut sum_err = 0.0f64;
    // Absolute per-chart mass, for charging the truncated cores.
    let mut chart_abs = vec![0.0f64; charts.len()];
    for cell in cells0 {
        sum_val += cell.value;
        sum_err += cell.err;
        chart_abs[cell.chart] += cell.value.norm();
        heap.push(cell);
    }
    let mut created = rects.len();
    let mut next_id = created;

    let assemble = |heap: BinaryHeap<Cell>, created: usize| -> Quadrature {
        let mut leaves = heap.into_vec();
        leaves.sort_by_key(|c| c.id);
        let vals: Vec<C64> = leaves.iter().map(|c| c.value).collect();
        let errs: Vec<f64> = leaves.iter().map(|c| c.err).collect();
        let mut abs = vec![0.0f64; charts.len()];
        for c in &leaves {
            abs[c.chart] += c.value.norm();
        }
        let core: f64 = abs.iter().zip(&core_rel).map(|(a, r)| 2.0 * a * r).sum();
        Quadrature {
            value: tree_sum(&vals),
            error: tree_sum_re(&errs) + tail + crumb + core,
            cells: created,
        }
    };

    loop {
        let core: f64 = chart_abs.iter().zip(&core_rel).map(|(a, r)| 2.0 * a * r).sum();
        let fixed = tail + crumb + core;
        let allowed = spec.target_rel_error * sum_val.norm();
        if sum_err.max(0.0) + fixed <= allowed {
            break;
        }
        // Refinement only shrinks the cell estimates; a dominating fixed
        // part (tail/core) can never be repaired by more cells.
        if fixed > allowed || created + 2 > spec.max_cells {
            let q = assemble(heap, created);
            return Err(Error::Budget {
                value: q.value,
                error: q.error,
            });
        }

        let mut batch = Vec::with_capacity(BATCH);
        while batch.len() < BATCH
            && created + 2 * (batch.len() + 1) <= spec.max_cells
            && !heap.is_empty()
        {
            batch.push(heap.pop().unwrap());
        }
        let kids: Vec<(usize, (f64, f64, f64, f64))> = batch
            .iter()
            .flat_map(|c| {
                if c.split_rho {
                    let rm = 0.5 * (c.r0 + c.r1);
                    [
                        (c.chart, (c.r0, rm, c.p0, c.p1)),
                        (c.chart, (rm, c.r1, c.p0, c.p1)),
                    ]
                } else {
                    let pm = 0.5 * (c.p0 + c.p1);
                    [
                        (c.chart, (c.r0, c.r1, c.p0, pm)),
                        (c.chart, (c.r0, c.r1, pm, c.p1)),
                    ]
                }
            })
            .collect();
        let new_cells = map_indexed(kids.len(), spec.mode, |t| {
            ctx.eval_cell(next_id + t, kids[t].0, kids[t].1)
        });
        for c in &batch {
            sum_val -= c.value;
            sum_err -= c.err;
            chart_abs[c.chart] -= c.value.norm();
        }
        for cell in new_cells {
            sum_val += cell.value;
            sum_err += cell.err;
            chart_abs[cell.chart] += cell.value.norm();
            heap.push(cell);
        }
        created += kids.len();
        next_id += kids.len();
    }

    if bad.load(Ordering::Relaxed) {
        return Err(Error::Invalid(
            "non-finite integrand sample in an active region".into(),
        ));
    }
    Ok(assemble(heap, created))
}

#[derive(Clone, Copy, Debug)]
pub struct RefinedQuadrature {
    pub value: C64,
    pub error: f64,
    /// Convergence order measured from the three resolutions; near 2 for an
    /// integrand smooth on the rectangle.
    pub order: f64,
    pub cells: usize,
}

/// Independent reference integrator: plain cartesian midpoint rule on the
/// rectangle `[lo.re, hi.re] × [lo.im, hi.im]` at `n`, `2n`, `4n` points per
/// side, Richardson-extrapolated when the measured order supports it.
pub fn oracle_integrate<F>(f: F, lo: C64, hi: C64, n: usize, mode: ExecMode) -> RefinedQuadrature
where
    F: Fn(C64) -> C64 + Sync,
{
    let eval = |m: usize| -> C64 {
        let hx = (hi.re - lo.re) / m as f64;
        let hy = (hi.im - lo.im) / m as f64;
        let rows = map_indexed(m, mode, |i| {
            let y = lo.im + (i as f64 + 0.5) * hy;
            let mut acc = c64(0.0, 0.0);
            for j in 0..m {
                acc += f(C64::new(lo.re + (j as f64 + 0.5) * hx, y));
            }
            acc
        });
        tree_sum(&rows) * (hx * hy)
    };
    let i1 = eval(n);
    let i2 = eval(2 * n);
    let i3 = eval(4 * n);
    let d12 = (i2 - i1).norm();
    let d23 = (i3 - i2).norm();
    // Boundary-vanishing smooth integrands converge superalgebraically, so
    // the differences sit at rounding level and carry no order information.
    let converged = d23 <= 1e-14 * i3.norm();
    let order = if converged || d12 == 0.0 || d23 == 0.0 {
        f64::INFINITY
    } else {
        (d12 / d23).log2()
    };
    let (value, error) = if converged {
        (i3, d23 + 1e-15 * i3.norm())
    } else if order >= 1.9 {
        let r12 = i2 + (i2 - i1) / 3.0;
        let r23 = i3 + (i3 - i2) / 3.0;
        (r23, d23 / 3.0 + (r23 - r12).norm())
    } else {
        (i3, 4.0 * d23)
    };
    RefinedQuadrature {
        value,
        error,
        order,
        cells: 21 * n * n,
    }
}

/// A point of the unitary dual of the multiplicative group of ℂ:
/// the character `z ↦ gpow(z, μ|μ′)` with `μ|μ′ = ((k+is)/2 | (−k+is)/2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MellinPoint {
    pub k: i64,
    pub s: f64,
}

impl MellinPoint {
    pub fn new(k: i64, s: f64) -> Self {
        Self { k, s }
    }

    /// The bidegree `μ|μ′` of the character.
    pub fn mu(&self) -> Bidegree {
        let k = self.k as f64;
        Bidegree::raw(c64(k / 2.0, self.s / 2.0), c64(-k / 2.0, self.s / 2.0))
    }
}

/// Mellin coefficient `(1/2π) ∫ g(z)·gpow(z, μ−1|μ′−1) d²z` of a smooth
/// function supported in the annulus `r0 ≤ |z| ≤ r1`.  In log-polar
/// coordinates this is the plain 2D Fourier coefficient
/// `(1/2π) ∫∫ g(e^{ρ+iφ}) e^{i(sρ+kφ)} dρ dφ`, computed by midpoint rules
/// which converge superalgebraically for smooth compactly supported `g`.
pub fn mellin_c<G>(g: G, r0: f64, r1: f64, pt: MellinPoint) -> Result<C64>
where
    G: Fn(C64) -> C64 + Sync,
{
    if !(r0 > 0.0 && r1 > r0 && r1.is_finite()) {
        return Err(Error::Invalid(
            "support must be an annulus 0 < r0 < r1 < inf".into(),
        ));
    }
    let span = (r1 / r0).ln();
    let n_r = ((span * (pt.s.abs() + 16.0)).ceil() as usize).max(64);
    let n_p = (8 * (pt.k.unsigned_abs() as usize + 4)).max(64);
    let hr = span / n_r as f64;
    let hp = 2.0 * PI / n_p as f64;
    let rho0 = r0.ln();
    let rows = map_indexed(n_r, ExecMode::default(), |i| {
        let rho = rho0 + (i as f64 + 0.5) * hr;
        let r = rho.exp();
        let mut acc = c64(0.0, 0.0);
        for j in 0..n_p {
            let phi = -PI + (j as f64 + 0.5) * hp;
            acc += g(C64::from_polar(r, phi)) * C64::new(0.0, pt.s * rho + pt.k as f64 * phi).exp();
        }
        acc
    });
    Ok(tree_sum(&rows) * (hr * hp / (2.0 * PI)))
}

/// Change-of-variable weight for decay diagnostics: `ζ(p) = (p+1)²/(4p)`,
/// equal to 1 at the symmetric point `p = 1` and growing linearly in `p`.
pub fn zeta_p(p: f64) -> f64 {
    (p + 1.0) * (p + 1.0) / (4.0 * p)
}
