//! Heat kernels, fractional heat kernels, the α = 1/2 subordinator and the
//! ball-average kernel, with their envelope checks.

use crate::error::{Error, Result};
use crate::geometry::RankOneSpace;
use crate::quadrature::simpson_weights;
use crate::specialfn::spherical::{ball_integral, ln_c_reduced, PhiTable, RadialPoint};
use crate::synthesis::{synthesize, synthesize_points, Multiplier, ScaledProfile, Semigroup};
use crate::transform::{Calibration, Grids, RadialFunction, RadialGrid};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::fmt;

/// A kernel family member.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelSpec {
    Heat { t: f64 },
    Fractional { t: f64, alpha: f64 },
    Ball { r: f64 },
}

impl KernelSpec {
    pub fn heat(t: f64) -> Result<Self> {
        Semigroup::new(t, 1.0)?;
        Ok(Self::Heat { t })
    }

    pub fn fractional(t: f64, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Domain(format!("fractional kernels need alpha in (0, 1) (got {alpha})")));
        }
        Semigroup::new(t, alpha)?;
        Ok(Self::Fractional { t, alpha })
    }

    pub fn ball(r: f64) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::Domain(format!("ball radius must be positive (got {r})")));
        }
        Ok(Self::Ball { r })
    }

    /// The semigroup of a heat or fractional kernel.
    pub fn semigroup(&self) -> Option<Semigroup> {
        match *self {
            Self::Heat { t } => Semigroup::new(t, 1.0).ok(),
            Self::Fractional { t, alpha } => Semigroup::new(t, alpha).ok(),
            Self::Ball { .. } => None,
        }
    }

    /// The profile on the radial grid of `grids`.
    pub fn profile(&self, space: &RankOneSpace, grids: &Grids, cal: &Calibration) -> Result<RadialFunction> {
        match *self {
            Self::Heat { t } => heat_kernel(space, t, grids, cal),
            Self::Fractional { t, alpha } => frac_heat_kernel(space, t, alpha, grids, cal),
            Self::Ball { r } => ball_kernel(space, r, &grids.radial),
        }
    }
}

impl fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Heat { t } => write!(f, "heat(t={t})"),
            Self::Fractional { t, alpha } => write!(f, "fractional(t={t}, alpha={alpha})"),
            Self::Ball { r } => write!(f, "ball(r={r})"),
        }
    }
}

/// h_t with per-node log scales.
pub fn heat_profile(space: &RankOneSpace, t: f64, grid: &RadialGrid, cal: &Calibration) -> Result<ScaledProfile> {
    synthesize(space, grid, cal, &Multiplier::kernel(Semigroup::new(t, 1.0)?))
}

/// The heat kernel h_t, transform e^{−t(λ²+ρ²)}.
pub fn heat_kernel(space: &RankOneSpace, t: f64, grids: &Grids, cal: &Calibration) -> Result<RadialFunction> {
    heat_profile(space, t, &grids.radial, cal)?.to_radial()
}

/// The fractional heat kernel h_t^α, transform e^{−t(λ²+ρ²)^α}.
pub fn frac_heat_kernel(
    space: &RankOneSpace,
    t: f64,
    alpha: f64,
    grids: &Grids,
    cal: &Calibration,
) -> Result<RadialFunction> {
    KernelSpec::fractional(t, alpha)?;
    synthesize(space, &grids.radial, cal, &Multiplier::kernel(Semigroup::new(t, alpha)?))?.to_radial()
}

/// η_t^{1/2}(u) = t(4π)^{−1/2} u^{−3/2} e^{−t²/4u}.
pub fn subordinator_half(t: f64, u: f64) -> f64 {
    ln_subordinator_half(t, u).exp()
}

fn ln_subordinator_half(t: f64, u: f64) -> f64 {
    t.ln() - 0.5 * (4.0 * PI).ln() - 1.5 * u.ln() - t * t / (4.0 * u)
}

/// Two-regime envelope of η_t^α: t^{1/2(1−α)} u^{−(2−α)/2(1−α)} e^{−c_α t^{1/(1−α)} u^{−α/(1−α)}}
/// for u ≤ t^{1/α}, and t u^{−(1+α)} e^{−c_α t^{1/(1−α)} u^{−α/(1−α)}} beyond,
/// with c_α = (1−α) α^{α/(1−α)}.
pub fn subordinator_envelope(t: f64, alpha: f64, u: f64) -> f64 {
    let q = 1.0 - alpha;
    let c = q * alpha.powf(alpha / q);
    let e = (-c * t.powf(1.0 / q) * u.powf(-alpha / q)).exp();
    if u <= t.powf(1.0 / alpha) {
        t.powf(0.5 / q) * u.powf(-(2.0 - alpha) / (2.0 * q)) * e
    } else {
        t * u.powf(-(1.0 + alpha)) * e
    }
}

/// Nodes and Simpson weights of the log-spaced u-grid [t²·1e−3, t²·1e3].
pub fn subordination_grid(t: f64, n: usize) -> Vec<(f64, f64)> {
    let (a, b) = ((t * t * 1e-3).ln(), (t * t * 1e3).ln());
    let h = (b - a) / (n - 1) as f64;
    let w = simpson_weights(n, h);
    (0..n)
        .map(|k| {
            let u = (a + k as f64 * h).exp();
            (u, w[k] * u)
        })
        .collect()
}

/// ∫ e^{−su} η_t^{1/2}(u) du on the subordination grid.
pub fn subordinator_laplace(t: f64, s: f64) -> f64 {
    let mut nodes = subordination_grid(t, 2048);
    // extend the grid downward so the s = 0 mass is not cut at t²·1e−3
    let lo = subordination_grid(t * 1e-3, 2048);
    nodes.retain(|&(u, _)| u > t * t * 1e-3);
    let lower: f64 = lo
        .iter()
        .filter(|&&(u, _)| u <= t * t * 1e-3)
        .map(|&(u, w)| w * (-s * u).exp() * subordinator_half(t, u))
        .sum();
    let main: f64 = nodes.iter().map(|&(u, w)| w * (-s * u).exp() * subordinator_half(t, u)).sum();
    // u^{−3/2} tail beyond t²·1e3, integrated in closed form for s = 0 and dropped otherwise
    let tail = if s == 0.0 {
        let u = t * t * 1e3;
        t / (4.0 * PI).sqrt() * 2.0 / u.sqrt()
    } else {
        0.0
    };
    lower + main + tail
}

/// max over r ∈ [0, 8] (step 0.05) of the relative difference between
/// ∫ h_u(r) η_t^{1/2}(u) du and the spectrally synthesized h_t^{1/2}(r).
///
/// The inner h_u come from the real-axis inversion integral with φ_λ, not from the
/// contour synthesis, so the two sides share no quadrature.
pub fn subordination_crosscheck(space: &RankOneSpace, t: f64, _grids: &Grids, cal: &Calibration) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("time must be positive (got {t})")));
    }
    let rho = space.rho();
    let n_half = space.dim_n() as f64 / 2.0;
    let radii: Vec<f64> = (0..=160).map(|i| i as f64 * 0.05).collect();
    // bound on each u-node's contribution: η(u)·u·h_u(0), h_u(0) ≲ e^{−ρ²u}·min(u,1)^{−n/2}
    let nodes = subordination_grid(t, 2048);
    let bound = |u: f64, w: f64| ln_subordinator_half(t, u) + w.ln() - rho * rho * u - n_half * u.min(1.0).ln();
    let peak = nodes.iter().map(|&(u, w)| bound(u, w)).fold(f64::NEG_INFINITY, f64::max);
    let keep: Vec<(f64, f64)> = nodes.iter().cloned().filter(|&(u, w)| bound(u, w) > peak - 41.5).collect();
    let &(u_last, w_last) = nodes.last().expect("non-empty grid");
    if bound(u_last, w_last) > peak - 41.5 {
        return Err(Error::NonConvergence(format!("subordination integrand not negligible at u = {u_last:.3e}")));
    }
    let u_lo = keep.first().map(|x| x.0).unwrap_or(t * t);
    let u_hi = keep.last().map(|x| x.0).unwrap_or(t * t);
    // spectral grid resolving e^{−uλ²}φ_λ(r) for every kept u and r ≤ 8
    let lambda_max = (41.5 / u_lo).sqrt() + 2.0;
    let strip = 0.5f64.min(0.5 * rho.min(space.m_alpha() as f64 / 2.0 + 1.0));
    let step = |u: f64| {
        let d = strip.min(1.0 / u.sqrt());
        2.0 * PI * d / (39.1 + u * d * d + 9.0 * d)
    };
    let h = step(u_lo).min(step(u_hi));
    let n = ((lambda_max / h).ceil() as usize + 1).max(3);
    let h = lambda_max / (n - 1) as f64;
    let wl = simpson_weights(n, h);
    // Σ_k W_k η(u_k) e^{−u_k(λ_j²+ρ²)}: the u-sum for every λ node
    let coef: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|j| {
            let l = j as f64 * h;
            if j == 0 {
                return 0.0;
            }
            let dens = match ln_c_reduced(space, Complex64::new(l, 0.0)) {
                Ok(Some(c)) => (-2.0 * c.re).exp(),
                _ => 0.0,
            };
            let s: f64 =
                keep.iter().map(|&(u, w)| w * (ln_subordinator_half(t, u) - u * (l * l + rho * rho)).exp()).sum();
            wl[j] * dens * s
        })
        .collect();
    let pts: Vec<RadialPoint> = radii.iter().map(|&r| RadialPoint::new(r)).collect();
    let columns: Vec<Vec<f64>> = (1..n)
        .into_par_iter()
        .map(|j| -> Result<Vec<f64>> {
            let table = PhiTable::new(space, Complex64::new(j as f64 * h, 0.0))?;
            pts.iter().map(|p| Ok(coef[j] * table.eval(p)?.re)).collect()
        })
        .collect::<Result<_>>()?;
    let subordinated: Vec<f64> =
        (0..radii.len()).map(|i| cal.inversion_constant * columns.iter().map(|c| c[i]).sum::<f64>()).collect();
    let direct = synthesize_points(space, cal, &Multiplier::kernel(Semigroup::new(t, 0.5)?), &radii)?;
    Ok(subordinated
        .iter()
        .zip(&direct)
        .map(|(a, b)| {
            let b = b.value().re;
            (a - b).abs() / b.abs()
        })
        .fold(0.0, f64::max))
}

/// m_r = χ_{B(o,r)}/|B(o,r)| on the grid. Nodes inside the ball carry 1/|B|; the
/// cells straddling the boundary carry the fraction that makes the discrete mass exactly 1.
pub fn ball_kernel(space: &RankOneSpace, r: f64, grid: &RadialGrid) -> Result<RadialFunction> {
    KernelSpec::ball(r)?;
    if r >= grid.r_max() {
        return Err(Error::GridInadequate(format!("ball radius {r} does not fit in r_max = {}", grid.r_max())));
    }
    let vol = ball_volume(space, r)?;
    let w = grid.weights_for(space);
    let n = grid.n_points();
    let cell = |i: usize| w[i] * space.ln_density(grid.node(i)).exp() / vol;
    let mut values = vec![0.0; n];
    let mut mass = 0.0;
    let mut i = 0;
    while i < n && grid.node(i) < r {
        values[i] = 1.0;
        if i > 0 {
            mass += cell(i);
        }
        i += 1;
    }
    // the Simpson weights alternate, so the inside nodes alone can overshoot
    let mut j = i;
    while mass > 1.0 && j > 1 {
        j -= 1;
        let c = cell(j);
        let cut = (mass - 1.0).min(c);
        values[j] = 1.0 - cut / c;
        mass -= cut;
    }
    while mass < 1.0 && i < n {
        let c = cell(i);
        let frac = ((1.0 - mass) / c).min(1.0);
        values[i] = frac;
        mass += frac * c;
        i += 1;
    }
    let values = values.into_iter().map(|v| v / vol).collect();
    RadialFunction::new(*space, *grid, values)
}

/// |B(o,r)| = ∫₀^r J.
pub fn ball_volume(space: &RankOneSpace, r: f64) -> Result<f64> {
    Ok(ball_integral(space, Complex64::new(0.0, -space.rho()), r)?.re)
}

/// ln of the two-sided heat envelope
/// t^{−n/2}(1+r)(1+t+r)^{(m_α+m_2α)/2−1} e^{−ρ²t−ρr−r²/4t}.
pub fn ln_heat_envelope(space: &RankOneSpace, t: f64, r: f64) -> f64 {
    let rho = space.rho();
    let k = (space.m_alpha() + space.m_2alpha()) as f64 / 2.0 - 1.0;
    -(space.dim_n() as f64) / 2.0 * t.ln() + (1.0 + r).ln() + k * (1.0 + t + r).ln()
        - rho * rho * t
        - rho * r
        - r * r / (4.0 * t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subordinator_laplace_identity() {
        let v = subordinator_laplace(1.0, 4.0);
        assert!((v - (-2.0f64).exp()).abs() < 1e-6, "{v}");
        let m = subordinator_laplace(1.0, 0.0);
        assert!((m - 1.0).abs() < 1e-5, "{m}");
    }

    #[test]
    fn subordinator_envelope_is_exact_at_half() {
        for &u in &[0.04, 1.0, 4.0, 400.0] {
            let ratio = subordinator_half(2.0, u) / subordinator_envelope(2.0, 0.5, u);
            assert!((ratio - 1.0 / (4.0 * PI).sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn ball_kernel_mass_and_sup() {
        for (name, r) in [("CH2", 5.0), ("H3", 5.0), ("H3", 10.0), ("H3", 20.0), ("CH2", 20.0)] {
            let s = RankOneSpace::preset(name).unwrap();
            let grid = RadialGrid::new(40.0, 8192).unwrap();
            let m = ball_kernel(&s, r, &grid).unwrap();
            let w = grid.weights_for(&s);
            let mass: f64 = (1..grid.n_points()).map(|i| w[i] * m.value(i) * s.ln_density(grid.node(i)).exp()).sum();
            assert!((mass - 1.0).abs() < 1e-12, "{name} r={r}: mass {mass}");
            let sup = m.values().into_iter().fold(0.0, f64::max);
            assert!((sup * ball_volume(&s, r).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn kernel_spec_validation() {
        assert!(KernelSpec::fractional(1.0, 1.0).is_err());
        assert!(KernelSpec::heat(-1.0).is_err());
        assert!(KernelSpec::ball(0.0).is_err());
        assert_eq!(KernelSpec::fractional(1.0, 0.5).unwrap().to_string(), "fractional(t=1, alpha=0.5)");
    }
}
