//! Spectral synthesis of radial profiles
//! K(r) = C ∫₀^∞ M(λ) φ_λ(r) |c(λ)|⁻² dλ
//! for multipliers M that are even and analytic off the imaginary axis.
//!
//! Small radii use φ_λ on the real axis. Larger radii use the Harish-Chandra
//! split, K(r) = C ∫_ℝ M(λ) Φ_λ(r)/c(−λ) dλ, on a horizontal line through the
//! saddle of the integrand; when the saddle lies past the branch point iρ of a
//! fractional multiplier the line is replaced by a V-shaped contour with its
//! vertex at iρ. Every value carries its own log scale, so profiles stay
//! meaningful hundreds of orders of magnitude below their peak.

use crate::error::{Error, Result};
use crate::geometry::{ln_two_sinh, LebesgueExponent, RankOneSpace};
use crate::quadrature::{gauss_legendre, log_sum_exp, simpson_weights};
use crate::specialfn::hypergeometric::SeriesCoeffs;
use crate::specialfn::spherical::{hc_sinh_params, ln_c_reduced, PhiTable, RadialPoint, R_SWITCH};
use crate::testfn::TestFunction;
use crate::transform::{Calibration, RadialFunction, RadialGrid};
use num_complex::Complex64;
use rayon::prelude::*;
use std::collections::BTreeMap;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
/// ln(1e17): target relative accuracy of every contour quadrature.
const ACCURACY_NATS: f64 = 39.1;
/// ln(1e18): integrand magnitude below which a contour is truncated.
const CUTOFF_NATS: f64 = 41.5;
const MAX_NODES: usize = 400_000;
const V_ANGLE: f64 = std::f64::consts::PI / 6.0;
const V_ORDER: usize = 16;
/// Largest change of ln g across one V panel; 16-point Gauss–Legendre is exact
/// to rounding for e^{κx} on a panel when |κ|·width ≤ 8.
const V_PANEL_NATS: f64 = 8.0;
/// Largest excess of the V vertex over the saddle bound, in nats.
const VEE_GAP_NATS: f64 = 6.0;
/// Spacing of contour lines in the coordinate N(y).
const LEVEL_STEP: f64 = 0.5;

/// The time evolution in a multiplier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Semigroup {
    /// e^{−t(λ²+ρ²)}.
    Heat { t: f64 },
    /// e^{−t(λ²+ρ²)^α}, principal branch, 0 < α < 1.
    Fractional { t: f64, alpha: f64 },
}

impl Semigroup {
    /// Builds the semigroup for α ∈ (0, 1]; α = 1 is the heat semigroup.
    pub fn new(t: f64, alpha: f64) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::Domain(format!("time must be positive (got {t})")));
        }
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::Domain(format!("alpha must lie in (0, 1] (got {alpha})")));
        }
        Ok(if alpha == 1.0 { Self::Heat { t } } else { Self::Fractional { t, alpha } })
    }

    pub fn t(&self) -> f64 {
        match self {
            Self::Heat { t } | Self::Fractional { t, .. } => *t,
        }
    }

    pub fn alpha(&self) -> f64 {
        match self {
            Self::Heat { .. } => 1.0,
            Self::Fractional { alpha, .. } => *alpha,
        }
    }

    /// ln of the multiplier given w = λ² + ρ².
    pub fn ln_value(&self, w: Complex64) -> Complex64 {
        match self {
            Self::Heat { t } => -*t * w,
            Self::Fractional { t, alpha } => {
                if w == Complex64::new(0.0, 0.0) {
                    Complex64::new(0.0, 0.0)
                } else {
                    -*t * (*alpha * w.ln()).exp()
                }
            }
        }
    }
}

/// M(λ) = e^{semigroup}(λ) · f̂(λ) for an optional test function f.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Multiplier {
    pub semigroup: Semigroup,
    pub test: Option<TestFunction>,
}

impl Multiplier {
    pub fn kernel(semigroup: Semigroup) -> Self {
        Self { semigroup, test: None }
    }

    pub fn convolved(semigroup: Semigroup, test: TestFunction) -> Self {
        Self { semigroup, test: Some(test) }
    }

    fn gaussian_time(&self) -> f64 {
        let s = self.test.map_or(0.0, |f| f.gaussian_time());
        match self.semigroup {
            Semigroup::Heat { t } => t + s,
            Semigroup::Fractional { .. } => s,
        }
    }

    fn exp_type(&self) -> f64 {
        self.test.map_or(0.0, |f| f.exp_type())
    }

    fn has_branch(&self) -> bool {
        matches!(self.semigroup, Semigroup::Fractional { .. })
    }

    /// ln M(λ), with w = λ² + ρ² supplied by the caller; None where M vanishes.
    pub fn ln_value(&self, space: &RankOneSpace, lambda: Complex64, w: Complex64) -> Result<Option<Complex64>> {
        let s = self.semigroup.ln_value(w);
        match &self.test {
            None => Ok(Some(s)),
            Some(f) => Ok(f.ln_transform(space, lambda, w)?.map(|l| l + s)),
        }
    }

    /// M(λ) for complex λ.
    pub fn value(&self, space: &RankOneSpace, lambda: Complex64) -> Result<Complex64> {
        let w = lambda * lambda + space.rho() * space.rho();
        Ok(self.ln_value(space, lambda, w)?.map_or(Complex64::new(0.0, 0.0), |l| l.exp()))
    }
}

/// A complex number stored as mantissa·e^{ln_scale}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled {
    pub re: f64,
    pub im: f64,
    pub ln_scale: f64,
}

impl Scaled {
    pub const ZERO: Scaled = Scaled { re: 0.0, im: 0.0, ln_scale: 0.0 };

    pub fn real(value: f64) -> Self {
        Self { re: value, im: 0.0, ln_scale: 0.0 }
    }

    pub fn ln_abs(&self) -> f64 {
        self.re.hypot(self.im).ln() + self.ln_scale
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im) * self.ln_scale.exp()
    }

    /// a·self + b·other.
    pub fn combine(&self, a: Complex64, other: &Scaled, b: Complex64) -> Scaled {
        let x = Complex64::new(self.re, self.im);
        let y = Complex64::new(other.re, other.im);
        let l = if x == Complex64::new(0.0, 0.0) {
            other.ln_scale
        } else if y == Complex64::new(0.0, 0.0) {
            self.ln_scale
        } else {
            self.ln_scale.max(other.ln_scale)
        };
        let v = a * x * (self.ln_scale - l).exp() + b * y * (other.ln_scale - l).exp();
        Scaled { re: v.re, im: v.im, ln_scale: l }
    }

    fn normalized(v: Complex64, ln_scale: f64) -> Scaled {
        let m = v.norm();
        if m == 0.0 || !m.is_finite() {
            return Scaled { re: v.re, im: v.im, ln_scale };
        }
        let e = m.ln();
        let w = v / m;
        Scaled { re: w.re, im: w.im, ln_scale: ln_scale + e }
    }
}

/// A profile on a radial grid with one log scale per node.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledProfile {
    space: RankOneSpace,
    grid: RadialGrid,
    points: Vec<Scaled>,
}

impl ScaledProfile {
    pub fn new(space: RankOneSpace, grid: RadialGrid, points: Vec<Scaled>) -> Result<Self> {
        if points.len() != grid.n_points() {
            return Err(Error::Domain(format!(
                "profile has {} values for {} grid nodes",
                points.len(),
                grid.n_points()
            )));
        }
        Ok(Self { space, grid, points })
    }

    pub fn from_radial(f: &RadialFunction) -> Self {
        let l = f.log_scale();
        let points = f.mantissas().iter().map(|&v| Scaled { re: v, im: 0.0, ln_scale: l }).collect();
        Self { space: *f.space(), grid: *f.grid(), points }
    }

    pub fn space(&self) -> &RankOneSpace {
        &self.space
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn points(&self) -> &[Scaled] {
        &self.points
    }

    /// Real parts with a common log scale (values far below the peak underflow to 0).
    pub fn to_radial(&self) -> Result<RadialFunction> {
        let l = self.points.iter().map(|p| p.ln_abs()).fold(f64::NEG_INFINITY, f64::max);
        let l = if l.is_finite() { l } else { 0.0 };
        let values = self.points.iter().map(|p| p.re * (p.ln_scale - l).exp()).collect();
        RadialFunction::with_log_scale(self.space, self.grid, values, l)
    }

    /// a·self + b·other.
    pub fn combine(&self, a: Complex64, other: &ScaledProfile, b: Complex64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::Domain("profiles live on different grids".into()));
        }
        let points = self.points.iter().zip(&other.points).map(|(x, y)| x.combine(a, y, b)).collect();
        Ok(Self { points, ..self.clone() })
    }

    /// ln ‖f‖_p over the grid; p = ∞ is the grid maximum.
    pub fn ln_lp_norm(&self, p: LebesgueExponent) -> f64 {
        if p.is_infinite() {
            return self.points.iter().map(|x| x.ln_abs()).fold(f64::NEG_INFINITY, f64::max);
        }
        let pp = p.p();
        let w = self.grid.weights_for(&self.space);
        let terms: Vec<f64> = (1..self.points.len())
            .map(|i| w[i].ln() + pp * self.points[i].ln_abs() + self.space.ln_density(self.grid.node(i)))
            .collect();
        log_sum_exp(terms) / pp
    }
}

/// Nodes and weights of ∫_{r₀}^∞ g(r) dr under r = r₀e^u, u ∈ [0, 40].
pub fn tail_nodes(r_start: f64) -> Vec<(f64, f64)> {
    let n = 401;
    let h = 40.0 / (n - 1) as f64;
    let w = simpson_weights(n, h);
    (0..n)
        .map(|k| {
            let r = r_start * (k as f64 * h).exp();
            (r, w[k] * r)
        })
        .collect()
}

/// ln ∫_{r₀}^∞ |g(r)| J(r) dr from values of g·J sampled at `tail_nodes(r₀)`.
pub fn ln_tail_l1(nodes: &[(f64, f64)], weighted: &[Scaled]) -> f64 {
    let terms: Vec<f64> = nodes.iter().zip(weighted).map(|(&(_, w), v)| w.ln() + v.ln_abs()).collect();
    log_sum_exp(terms)
}

/// Synthesizes K on every node of a radial grid.
pub fn synthesize(space: &RankOneSpace, grid: &RadialGrid, cal: &Calibration, m: &Multiplier) -> Result<ScaledProfile> {
    let points = synthesize_points(space, cal, m, &grid.nodes())?;
    ScaledProfile::new(*space, *grid, points)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Route {
    Real,
    Line(u32),
    Vee,
}

struct Plan {
    rho: f64,
    /// t of a fractional semigroup, 0 for heat.
    t_frac: f64,
    alpha: f64,
    /// Total Gaussian time: the heat semigroup plus a heat test function.
    t_gauss: f64,
    exp_type: f64,
    branch: bool,
    gl: Vec<(f64, f64)>,
}

impl Plan {
    fn new(space: &RankOneSpace, m: &Multiplier) -> Self {
        let (t_frac, alpha) = match m.semigroup {
            Semigroup::Fractional { t, alpha } => (t, alpha),
            Semigroup::Heat { .. } => (0.0, 1.0),
        };
        Self {
            rho: space.rho(),
            t_frac,
            alpha,
            t_gauss: m.gaussian_time(),
            exp_type: m.exp_type(),
            branch: m.has_branch(),
            gl: gauss_legendre(24),
        }
    }

    /// ln|M(iy)| without the oscillating part of the test function.
    fn ln_mag(&self, y: f64) -> f64 {
        let w = self.rho * self.rho - y * y;
        let frac = if self.branch { -self.t_frac * w.max(0.0).powf(self.alpha) } else { 0.0 };
        frac - self.t_gauss * w
    }

    /// d/dy ln|M(iy)|.
    fn slope(&self, y: f64) -> f64 {
        let w = self.rho * self.rho - y * y;
        let frac = if self.branch { 2.0 * self.alpha * self.t_frac * y * w.powf(self.alpha - 1.0) } else { 0.0 };
        frac + 2.0 * self.t_gauss * y
    }

    /// T(y) with ln|M(x+iy)| ≈ ln|M(iy)| − T(y)x² near x = 0.
    fn curvature(&self, y: f64) -> f64 {
        let w = self.rho * self.rho - y * y;
        let frac = if self.branch {
            let a = self.alpha;
            a * self.t_frac * w.powf(a - 1.0) + 2.0 * a * (1.0 - a) * self.t_frac * y * y * w.powf(a - 2.0)
        } else {
            0.0
        };
        frac + self.t_gauss
    }

    /// Height y minimizing ln|M(iy)| − y(ℓ − E), below ρ when M branches at iρ.
    fn saddle(&self, ell: f64) -> f64 {
        let target = ell - self.exp_type;
        if target <= 0.0 {
            return 0.0;
        }
        if !self.branch {
            return target / (2.0 * self.t_gauss);
        }
        let (mut lo, mut hi) = (0.0, self.rho);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.slope(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    /// Nats by which the V vertex at iρ sits above the saddle bound.
    fn vee_gap(&self, ell: f64, y: f64) -> f64 {
        let target = ell - self.exp_type;
        (self.ln_mag(self.rho) - self.rho * target) - (self.ln_mag(y) - y * target)
    }

    /// N(y) = ∫₀^y √T(u) du; lines one unit of N/LEVEL_STEP apart lose at most a fraction of a nat.
    fn level_coordinate(&self, y: f64) -> f64 {
        if !self.branch {
            return self.t_gauss.sqrt() * y;
        }
        let half = 0.5 * y;
        self.gl.iter().map(|&(x, w)| half * w * self.curvature(half * (x + 1.0)).sqrt()).sum()
    }

    fn level_height(&self, k: u32) -> f64 {
        let target = k as f64 * LEVEL_STEP;
        if !self.branch {
            return target / self.t_gauss.sqrt();
        }
        let (mut lo, mut hi) = (0.0, self.rho);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.level_coordinate(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    fn route(&self, r: f64) -> Route {
        if r < R_SWITCH {
            return Route::Real;
        }
        let ell = ln_two_sinh(r);
        let y = self.saddle(ell);
        if self.branch
            && self.vee_gap(ell, y) <= VEE_GAP_NATS
            && r >= 2.0 * self.rho * self.t_gauss + self.exp_type + 2.0
        {
            return Route::Vee;
        }
        Route::Line((self.level_coordinate(y) / LEVEL_STEP).floor() as u32)
    }

    /// Step of a trapezoid sum whose integrand is analytic in a strip of
    /// half-width δ, has curvature T and oscillates with frequency up to `freq`.
    fn step(delta: f64, curvature: f64, freq: f64) -> f64 {
        2.0 * std::f64::consts::PI * delta / (ACCURACY_NATS + curvature * delta * delta + freq.abs() * delta)
    }
}

/// Distance from the real axis to the nearest pole of |c(λ)|⁻².
fn plancherel_strip(space: &RankOneSpace) -> f64 {
    space.rho().min(space.m_alpha() as f64 / 2.0 + 1.0)
}

/// K at arbitrary radii, as mantissa·e^{scale} per radius.
pub fn synthesize_points(
    space: &RankOneSpace,
    cal: &Calibration,
    m: &Multiplier,
    radii: &[f64],
) -> Result<Vec<Scaled>> {
    synthesize_inner(space, cal, m, radii, false)
}

/// K(r)·J(r) at arbitrary radii. The growth of J cancels the decay of K
/// analytically, so radii far beyond 1e10 keep full accuracy.
pub fn synthesize_weighted(
    space: &RankOneSpace,
    cal: &Calibration,
    m: &Multiplier,
    radii: &[f64],
) -> Result<Vec<Scaled>> {
    synthesize_inner(space, cal, m, radii, true)
}

/// ln J(r) − 2ρ ln(2 sinh r) = m_2α ln coth r.
fn ln_density_excess(space: &RankOneSpace, r: f64) -> f64 {
    let q = (-2.0 * r).exp();
    space.m_2alpha() as f64 * (q.ln_1p() - (-q).ln_1p())
}

fn synthesize_inner(
    space: &RankOneSpace,
    cal: &Calibration,
    m: &Multiplier,
    radii: &[f64],
    weighted: bool,
) -> Result<Vec<Scaled>> {
    if radii.iter().any(|r| !(r >= &0.0) || !r.is_finite()) {
        return Err(Error::Domain("synthesis radii must be finite and non-negative".into()));
    }
    let plan = Plan::new(space, m);
    let mut groups: BTreeMap<Route, Vec<usize>> = BTreeMap::new();
    for (i, &r) in radii.iter().enumerate() {
        groups.entry(plan.route(r)).or_default().push(i);
    }
    let mut out = vec![Scaled::ZERO; radii.len()];
    for (route, idx) in groups {
        let rs: Vec<f64> = idx.iter().map(|&i| radii[i]).collect();
        let vals = match route {
            Route::Real => real_axis(space, &plan, m, &rs)?,
            Route::Line(k) => line(space, &plan, m, plan.level_height(k), &rs)?,
            Route::Vee => vee(space, &plan, m, &rs, weighted)?,
        };
        for (&i, mut v) in idx.iter().zip(vals) {
            if weighted && route != Route::Vee {
                v.ln_scale += space.ln_density(radii[i]);
            }
            out[i] = v;
        }
    }
    let c = cal.inversion_constant.ln();
    for v in &mut out {
        v.ln_scale += c;
    }
    Ok(out)
}

/// Number of nodes k·h (k = 0, 1, …) before ln|g| stays below its peak minus the cutoff.
fn extent(h: f64, ln_mag: impl Fn(f64) -> Result<f64> + Sync) -> Result<usize> {
    const BATCH: usize = 64;
    let mut peak = f64::NEG_INFINITY;
    let mut start = 0;
    loop {
        let vals: Vec<f64> =
            (start..start + BATCH).into_par_iter().map(|k| ln_mag(k as f64 * h)).collect::<Result<_>>()?;
        let batch_peak = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let before = peak;
        peak = peak.max(batch_peak);
        let quiet = batch_peak < peak - CUTOFF_NATS && batch_peak < before;
        start += BATCH;
        if quiet && peak.is_finite() {
            return Ok(start);
        }
        if start > MAX_NODES {
            return Err(Error::NonConvergence(format!(
                "spectral integrand not decayed after {start} nodes (step {h})"
            )));
        }
    }
}

// Half-line trapezoid on the real axis with φ_λ.
fn real_axis(space: &RankOneSpace, plan: &Plan, m: &Multiplier, rs: &[f64]) -> Result<Vec<Scaled>> {
    let rho = plan.rho;
    let curv = plan.curvature(0.0);
    let mut delta = 0.5f64.min(0.5 * plancherel_strip(space));
    if curv > 0.0 {
        delta = delta.min(1.0 / curv.sqrt());
    }
    let r_hi = rs.iter().cloned().fold(0.0, f64::max);
    let h = Plan::step(delta, curv, r_hi + plan.exp_type + 1.0);
    // ln(M(λ)|c(λ)|⁻²) for real λ > 0
    let ln_g = |x: f64| -> Result<Option<Complex64>> {
        if x == 0.0 {
            return Ok(None);
        }
        let lam = Complex64::new(x, 0.0);
        let lc = match ln_c_reduced(space, lam)? {
            Some(l) => l.re,
            None => return Ok(None),
        };
        let w = Complex64::new(x * x + rho * rho, 0.0);
        Ok(m.ln_value(space, lam, w)?.map(|l| l - 2.0 * lc))
    };
    let n = extent(h, |x| Ok(ln_g(x)?.map_or(f64::NEG_INFINITY, |l| l.re)))?;
    let nodes: Vec<Option<(Complex64, PhiTable)>> = (1..n)
        .into_par_iter()
        .map(|k| -> Result<Option<(Complex64, PhiTable)>> {
            let x = k as f64 * h;
            match ln_g(x)? {
                None => Ok(None),
                Some(l) => Ok(Some((l, PhiTable::new(space, Complex64::new(x, 0.0))?))),
            }
        })
        .collect::<Result<_>>()?;
    let nodes: Vec<(Complex64, PhiTable)> = nodes.into_iter().flatten().collect();
    let peak = nodes.iter().map(|n| n.0.re).fold(f64::NEG_INFINITY, f64::max);
    let coef: Vec<f64> = nodes.iter().map(|n| (n.0 - peak).exp().re).collect();
    let pts: Vec<RadialPoint> = rs.iter().map(|&r| RadialPoint::new(r)).collect();
    pts.par_iter()
        .map(|pt| -> Result<Scaled> {
            let mut acc = 0.0;
            for ((_, table), &c) in nodes.iter().zip(&coef) {
                acc += c * table.eval(pt)?.re;
            }
            Ok(Scaled::normalized(Complex64::new(acc * h, 0.0), peak))
        })
        .collect()
}

struct ContourNode {
    /// ln(M(λ)/c(−λ)) plus the log of the quadrature weight.
    ln_a: Complex64,
    lambda: Complex64,
    series: SeriesCoeffs,
}

fn ln_a(space: &RankOneSpace, m: &Multiplier, lambda: Complex64, w: Complex64) -> Result<Option<Complex64>> {
    if lambda == Complex64::new(0.0, 0.0) {
        return Ok(None);
    }
    let lm = match m.ln_value(space, lambda, w)? {
        Some(l) => l,
        None => return Ok(None),
    };
    match ln_c_reduced(space, -lambda)? {
        Some(lc) => Ok(Some(lm - lc)),
        None => Err(Error::Domain(format!("c(−λ) vanishes on the contour at λ = {lambda}"))),
    }
}

fn series_for(space: &RankOneSpace, lambda: Complex64, w_max: f64) -> Result<SeriesCoeffs> {
    let (a, b, c) = hc_sinh_params(space, lambda);
    SeriesCoeffs::new(a, b, c, w_max)
}

// Full-line trapezoid on Im λ = y using the symmetry g(−λ̄) = conj g(λ).
fn line(space: &RankOneSpace, plan: &Plan, m: &Multiplier, y: f64, rs: &[f64]) -> Result<Vec<Scaled>> {
    let rho = plan.rho;
    let curv = plan.curvature(y);
    let mut delta = 0.5f64.min(y + plancherel_strip(space).min(1.0));
    if curv > 0.0 {
        delta = delta.min(1.0 / curv.sqrt());
    }
    if plan.branch {
        delta = delta.min(0.75 * (rho - y));
    }
    let ells: Vec<f64> = rs.iter().map(|&r| ln_two_sinh(r)).collect();
    let slope = plan.slope(y);
    let freq = ells.iter().map(|l| (l - slope).abs()).fold(0.0, f64::max) + plan.exp_type + 2.0;
    let h = Plan::step(delta, curv, freq);
    let w_of = |x: f64| {
        let lam = Complex64::new(x, y);
        (lam, lam * lam + rho * rho)
    };
    let ln_mag = |x: f64| -> Result<f64> {
        let (lam, w) = w_of(x);
        Ok(ln_a(space, m, lam, w)?.map_or(f64::NEG_INFINITY, |l| l.re))
    };
    let n = extent(h, ln_mag)?;
    let r_lo = rs.iter().cloned().fold(f64::INFINITY, f64::min);
    let w_max = 1.0 / r_lo.sinh().powi(2);
    let nodes: Vec<Option<ContourNode>> = (0..n)
        .into_par_iter()
        .map(|k| -> Result<Option<ContourNode>> {
            let (lam, w) = w_of(k as f64 * h);
            match ln_a(space, m, lam, w)? {
                None => Ok(None),
                Some(l) => {
                    let weight = if k == 0 { 0.5 } else { 1.0 };
                    Ok(Some(ContourNode {
                        ln_a: l + (weight * h * 2.0f64).ln(),
                        lambda: lam,
                        series: series_for(space, lam, w_max)?,
                    }))
                }
            }
        })
        .collect::<Result<_>>()?;
    let nodes: Vec<ContourNode> = nodes.into_iter().flatten().collect();
    let peak = nodes.iter().map(|n| n.ln_a.re).fold(f64::NEG_INFINITY, f64::max);
    let coef: Vec<Complex64> = nodes.iter().map(|n| (n.ln_a - peak).exp()).collect();
    rs.par_iter()
        .zip(&ells)
        .map(|(&r, &ell)| -> Result<Scaled> {
            let w = -RadialPoint::new(r).inv_sinh2();
            let mut acc = Complex64::new(0.0, 0.0);
            for (node, c) in nodes.iter().zip(&coef) {
                let phase = Complex64::from_polar(1.0, node.lambda.re * ell);
                acc += c * phase * node.series.eval(w);
            }
            // Φ_λ = e^{(iλ−ρ)ℓ}·S with |e^{iλℓ}| = e^{−yℓ} taken out of the sum
            let scale = peak - (y + rho) * ell;
            Ok(Scaled::normalized(Complex64::new(acc.re, 0.0), scale))
        })
        .collect()
}

/// Bound on |d ln g/dσ| along the V arm between σ_lo and σ_hi, where g is the
/// integrand including the phase e^{iλℓ} for every ℓ ≤ ℓ_hi still above the cutoff.
fn vee_log_derivative(plan: &Plan, e1: Complex64, ell_hi: f64, sigma_lo: f64, sigma_hi: f64) -> f64 {
    let lam = I * plan.rho + sigma_hi * e1;
    let w = lam * lam + plan.rho * plan.rho;
    let dw = 2.0 * lam.norm();
    let frac = if plan.branch { plan.alpha * plan.t_frac * w.norm().powf(plan.alpha - 1.0) } else { 0.0 };
    let ell = ell_hi.min(2.0 * CUTOFF_NATS / (sigma_lo.max(f64::MIN_POSITIVE) * V_ANGLE.sin()));
    (frac + plan.t_gauss) * dw + ell + plan.exp_type + 1.0
}

// Gauss–Legendre panels in τ = √σ that double in width near the vertex and are
// capped further out so that ln g changes by at most V_PANEL_NATS per panel.
fn vee_panels(plan: &Plan, e1: Complex64, ell_hi: f64, first: f64, b: f64) -> Vec<(f64, f64)> {
    let gl = gauss_legendre(V_ORDER);
    let mut out = Vec::new();
    let mut lo = 0.0;
    let mut hi = first.min(b);
    loop {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        for &(x, w) in &gl {
            out.push((mid + half * x, half * w));
        }
        if hi >= b {
            break;
        }
        lo = hi;
        let cand = (2.0 * hi).min(b);
        let omega = vee_log_derivative(plan, e1, ell_hi, lo * lo, cand * cand);
        // dσ = 2τ dτ
        hi = cand.min(lo + V_PANEL_NATS / (2.0 * cand * omega));
    }
    out
}

// V-shaped contour λ = iρ + σe^{±iθ}, σ = τ², on geometric Gauss–Legendre panels in τ.
fn vee(space: &RankOneSpace, plan: &Plan, m: &Multiplier, rs: &[f64], weighted: bool) -> Result<Vec<Scaled>> {
    let rho = plan.rho;
    let e1 = Complex64::from_polar(1.0, V_ANGLE);
    let e2 = e1 * e1;
    let node_at = |sigma: f64| {
        let lam = I * rho + sigma * e1;
        let w = 2.0 * I * rho * sigma * e1 + sigma * sigma * e2;
        (lam, w)
    };
    let ells: Vec<f64> = rs.iter().map(|&r| ln_two_sinh(r)).collect();
    let ell_lo = ells.iter().cloned().fold(f64::INFINITY, f64::min);
    let ell_hi = ells.iter().cloned().fold(0.0, f64::max);
    let decay = V_ANGLE.sin();
    // extent in σ from a doubling scan at the smallest radius
    let ln_mag = |sigma: f64| -> Result<f64> {
        let (lam, w) = node_at(sigma);
        Ok(ln_a(space, m, lam, w)?.map_or(f64::NEG_INFINITY, |l| l.re) - sigma * decay * ell_lo)
    };
    let mut sigma = 1e-6 / ell_hi;
    let mut peak = ln_mag(0.0)?;
    let sigma_max = loop {
        let v = ln_mag(sigma)?;
        peak = peak.max(v);
        if v < peak - CUTOFF_NATS && sigma * ell_lo > 1.0 {
            break sigma;
        }
        sigma *= 1.25;
        if sigma > 1e6 {
            return Err(Error::NonConvergence("V-contour integrand does not decay".into()));
        }
    };
    let tau_first = 1e-8 / ell_hi.sqrt();
    let panels = vee_panels(plan, e1, ell_hi, tau_first, sigma_max.sqrt());
    let w_max = rs.iter().map(|&r| RadialPoint::new(r).inv_sinh2()).fold(0.0, f64::max);
    let nodes: Vec<Option<(ContourNode, f64)>> = panels
        .par_iter()
        .map(|&(tau, wt)| -> Result<Option<(ContourNode, f64)>> {
            let s = tau * tau;
            let (lam, w) = node_at(s);
            match ln_a(space, m, lam, w)? {
                None => Ok(None),
                // dλ = e^{iθ}·2τ dτ, and the mirrored arm doubles the real part
                Some(l) => Ok(Some((
                    ContourNode {
                        ln_a: l + (4.0 * tau * wt).ln() + I * V_ANGLE,
                        lambda: lam,
                        series: series_for(space, lam, w_max.max(1e-300))?,
                    },
                    s,
                ))),
            }
        })
        .collect::<Result<_>>()?;
    let nodes: Vec<(ContourNode, f64)> = nodes.into_iter().flatten().collect();
    rs.par_iter()
        .zip(&ells)
        .map(|(&r, &ell)| -> Result<Scaled> {
            let w = -RadialPoint::new(r).inv_sinh2();
            // e^{(iλ−ρ)ℓ} = e^{−2ρℓ}·e^{iσe^{iθ}ℓ}; the first factor goes into the scale
            let expo: Vec<Complex64> = nodes.iter().map(|(n, s)| n.ln_a + I * *s * e1 * ell).collect();
            let top = expo.iter().map(|e| e.re).fold(f64::NEG_INFINITY, f64::max);
            let mut acc = Complex64::new(0.0, 0.0);
            for ((n, _), e) in nodes.iter().zip(&expo) {
                if e.re > top - 2.0 * CUTOFF_NATS {
                    acc += (e - top).exp() * n.series.eval(w);
                }
            }
            let outer = if weighted { ln_density_excess(space, r) } else { -2.0 * rho * ell };
            Ok(Scaled::normalized(Complex64::new(acc.re, 0.0), top + outer))
        })
        .collect()
}
