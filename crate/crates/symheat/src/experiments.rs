//! The asymptotic statements as measurable experiments: convolution ratios,
//! concentration, extremizer limits, sharpness, ball averages and norm fits.

use crate::error::{Error, Result};
use crate::geometry::{concentration_region, LebesgueExponent, RankOneSpace};
use crate::kernels::{ball_kernel, ball_volume};
use crate::quadrature::{log_sum_exp, simpson_weights};
use crate::specialfn::spherical::plancherel_density;
use crate::synthesis::{synthesize, synthesize_weighted, tail_nodes, Multiplier, Scaled, ScaledProfile, Semigroup};
use crate::testfn::TestFunction;
use crate::transform::{Calibration, Grids, RadialGrid, SpectralGrid};
use num_complex::Complex64;
use std::fmt::Write as _;

/// Nats below the peak at which an integrand counts as negligible at the grid edge.
const EDGE_NATS: f64 = 18.0;

/// A table of parameter points and measured values. The leading `key_columns`
/// columns hold the parameter tuple that orders the rows.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub experiment: String,
    pub space: String,
    pub columns: Vec<String>,
    pub key_columns: usize,
    pub rows: Vec<Vec<f64>>,
    pub metadata: Vec<(String, String)>,
}

impl ExperimentReport {
    pub fn new(experiment: &str, space: &RankOneSpace, keys: &[&str], values: &[&str]) -> Self {
        Self {
            experiment: experiment.to_string(),
            space: format!("m_alpha={},m_2alpha={}", space.m_alpha(), space.m_2alpha()),
            columns: keys.iter().chain(values).map(|c| c.to_string()).collect(),
            key_columns: keys.len(),
            rows: Vec::new(),
            metadata: Vec::new(),
        }
    }

    /// Appends a row. Parameters may be infinite (p = ∞); measured values must be finite.
    pub fn push(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::Domain(format!("row has {} values for {} columns", row.len(), self.columns.len())));
        }
        let bad = row.iter().enumerate().find(|(j, v)| v.is_nan() || (*j >= self.key_columns && v.is_infinite()));
        if let Some((j, v)) = bad {
            return Err(Error::NonConvergence(format!(
                "non-finite {} = {v} in {} report",
                self.columns[j], self.experiment
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) {
        self.metadata.push((key.to_string(), value.to_string()));
    }

    /// Orders rows lexicographically by their parameter tuple.
    pub fn sort_rows(&mut self) {
        let k = self.key_columns;
        self.rows.sort_by(|a, b| {
            a[..k]
                .iter()
                .zip(&b[..k])
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    /// Comma-separated, header first, 17 significant digits, LF endings.
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format_float(*v)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// Metadata as `key = value` lines.
    pub fn metadata_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "experiment = {}", self.experiment);
        let _ = writeln!(out, "space = {}", self.space);
        for (k, v) in &self.metadata {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }
}

/// A float with 17 significant digits, locale independent; ∞ prints as `inf`
/// and −0 as 0.
pub fn format_float(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.16e}")
}

/// ζ = f̂(iγ_pρ) for p ≤ 2 and f̂(0) for p > 2.
pub fn theorem_constant(space: &RankOneSpace, f: &TestFunction, p: LebesgueExponent) -> Result<Complex64> {
    let y = if p.p() <= 2.0 { p.gamma_p() * space.rho() } else { 0.0 };
    f.transform(space, Complex64::new(0.0, y))
}

/// Grids for an experiment at time t: the radial grid covers the p = 1
/// concentration point 2ρt with a 12√t margin.
pub fn experiment_grids(space: &RankOneSpace, t: f64) -> Grids {
    Grids::defaults(space, 1.0, t, t)
}

/// Grid choice per ladder time: the experiment defaults with optional overrides.
/// The spectral overrides also apply to the calibration grids.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GridPolicy {
    pub r_max: Option<f64>,
    pub n_r: Option<usize>,
    pub lambda_max: Option<f64>,
    pub n_lambda: Option<usize>,
}

impl GridPolicy {
    pub fn grids(&self, space: &RankOneSpace, t: f64) -> Result<Grids> {
        self.apply(experiment_grids(space, t))
    }

    pub fn calibration_grids(&self) -> Result<Grids> {
        let base = Grids::calibration();
        Ok(Grids {
            radial: base.radial,
            spectral: SpectralGrid::new(
                self.lambda_max.unwrap_or(base.spectral.lambda_max()),
                self.n_lambda.unwrap_or(base.spectral.n_points()),
            )?,
        })
    }

    fn apply(&self, g: Grids) -> Result<Grids> {
        Ok(Grids {
            radial: RadialGrid::new(self.r_max.unwrap_or(g.radial.r_max()), self.n_r.unwrap_or(g.radial.n_points()))?,
            spectral: SpectralGrid::new(
                self.lambda_max.unwrap_or(g.spectral.lambda_max()),
                self.n_lambda.unwrap_or(g.spectral.n_points()),
            )?,
        })
    }
}

/// h_t^α and f ∗ h_t^α on one grid, with their far tails for p = 1 when α < 1.
#[derive(Debug, Clone)]
pub struct ConvolutionPair {
    space: RankOneSpace,
    semigroup: Semigroup,
    test: TestFunction,
    scale: f64,
    kernel: ScaledProfile,
    convolved: ScaledProfile,
    tail: Option<Tail>,
}

#[derive(Debug, Clone)]
struct Tail {
    weights: Vec<f64>,
    kernel: Vec<Scaled>,
    convolved: Vec<Scaled>,
}

impl ConvolutionPair {
    pub fn new(
        space: &RankOneSpace,
        test: TestFunction,
        semigroup: Semigroup,
        grid: &RadialGrid,
        cal: &Calibration,
    ) -> Result<Self> {
        let kernel = synthesize(space, grid, cal, &Multiplier::kernel(semigroup))?;
        let convolved = synthesize(space, grid, cal, &Multiplier::convolved(semigroup, test))?;
        // the subordinated kernels have an r^{−3/2} L¹ tail reaching far past any grid
        let tail = if matches!(semigroup, Semigroup::Fractional { .. }) {
            let nodes = tail_nodes(grid.r_max());
            let radii: Vec<f64> = nodes.iter().map(|n| n.0).collect();
            Some(Tail {
                weights: nodes.iter().map(|n| n.1).collect(),
                kernel: synthesize_weighted(space, cal, &Multiplier::kernel(semigroup), &radii)?,
                convolved: synthesize_weighted(space, cal, &Multiplier::convolved(semigroup, test), &radii)?,
            })
        } else {
            None
        };
        Ok(Self { space: *space, semigroup, test, scale: 1.0, kernel, convolved, tail })
    }

    /// The same pair with f replaced by c·f.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::Domain(format!("scale must be positive (got {c})")));
        }
        let up = |v: &Scaled| Scaled { ln_scale: v.ln_scale + c.ln(), ..*v };
        let mut out = self.clone();
        out.scale *= c;
        out.convolved =
            ScaledProfile::new(self.space, *self.convolved.grid(), self.convolved.points().iter().map(up).collect())?;
        if let Some(t) = &mut out.tail {
            t.convolved = t.convolved.iter().map(up).collect();
        }
        Ok(out)
    }

    pub fn semigroup(&self) -> Semigroup {
        self.semigroup
    }

    pub fn kernel(&self) -> &ScaledProfile {
        &self.kernel
    }

    pub fn convolved(&self) -> &ScaledProfile {
        &self.convolved
    }

    /// ζ for c·f.
    pub fn zeta(&self, p: LebesgueExponent) -> Result<Complex64> {
        Ok(self.scale * theorem_constant(&self.space, &self.test, p)?)
    }

    /// ln ‖h_t^α‖_p.
    pub fn ln_kernel_norm(&self, p: LebesgueExponent) -> Result<f64> {
        let tail = self.tail.as_ref().map(|t| (t.weights.as_slice(), t.kernel.clone()));
        ln_norm_checked(&self.kernel, tail, p)
    }

    /// ln ‖f ∗ h_t^α − z h_t^α‖_p.
    pub fn ln_residual_norm(&self, p: LebesgueExponent, z: Complex64) -> Result<f64> {
        let one = Complex64::new(1.0, 0.0);
        let n = self.convolved.combine(one, &self.kernel, -z)?;
        let tail = self.tail.as_ref().map(|t| {
            let v = t.convolved.iter().zip(&t.kernel).map(|(a, b)| a.combine(one, b, -z)).collect();
            (t.weights.as_slice(), v)
        });
        ln_norm_checked(&n, tail, p)
    }

    /// ln ‖f ∗ h_t^α‖_p.
    pub fn ln_convolved_norm(&self, p: LebesgueExponent) -> Result<f64> {
        self.ln_residual_norm(p, Complex64::new(0.0, 0.0))
    }

    /// ‖f ∗ h_t^α − z h_t^α‖_p / ‖h_t^α‖_p, with the theorem's ζ unless z is given.
    pub fn ratio(&self, p: LebesgueExponent, z: Option<Complex64>) -> Result<f64> {
        let z = match z {
            Some(z) => z,
            None => self.zeta(p)?,
        };
        Ok((self.ln_residual_norm(p, z)? - self.ln_kernel_norm(p)?).exp())
    }
}

// ln ‖g‖_p over the grid plus, for p = 1, the far tail given as g·J on tail nodes.
// Without a tail the integrand at the grid edge must be negligible.
fn ln_norm_checked(g: &ScaledProfile, tail: Option<(&[f64], Vec<Scaled>)>, p: LebesgueExponent) -> Result<f64> {
    let core = g.ln_lp_norm(p);
    if p.is_infinite() {
        return Ok(core);
    }
    if let (Some((w, v)), true) = (&tail, p.p() == 1.0) {
        let t = log_sum_exp(w.iter().zip(v).map(|(w, v)| w.ln() + v.ln_abs()));
        return Ok(log_sum_exp([core, t]));
    }
    let grid = g.grid();
    let space = g.space();
    let pp = p.p();
    let ln_integrand = |i: usize| pp * g.points()[i].ln_abs() + space.ln_density(grid.node(i));
    let peak = (1..grid.n_points()).map(ln_integrand).fold(f64::NEG_INFINITY, f64::max);
    let edge = ln_integrand(grid.n_points() - 1);
    if edge > peak - EDGE_NATS {
        return Err(Error::GridInadequate(format!(
            "L^{p} integrand at r_max = {} is only {:.1} nats below its peak",
            grid.r_max(),
            peak - edge
        )));
    }
    Ok(core)
}

pub fn check_coverage(space: &RankOneSpace, p: LebesgueExponent, t: f64, grid: &RadialGrid) -> Result<()> {
    let need = 2.0 * t * p.gamma_p().max(0.0) * space.rho() + 6.0 * t.sqrt();
    if need > grid.r_max() {
        return Err(Error::GridInadequate(format!(
            "concentration region for p = {p}, t = {t} reaches r = {need:.1} beyond r_max = {}",
            grid.r_max()
        )));
    }
    Ok(())
}

/// ‖f ∗ h_t^α − ζ h_t^α‖_p / ‖h_t^α‖_p; α = 1 is the heat kernel.
#[allow(clippy::too_many_arguments)]
pub fn theorem_ratio(
    space: &RankOneSpace,
    f: &TestFunction,
    p: LebesgueExponent,
    t: f64,
    alpha: f64,
    z_override: Option<Complex64>,
    grids: &Grids,
    cal: &Calibration,
) -> Result<f64> {
    let sg = Semigroup::new(t, alpha)?;
    check_coverage(space, p, t, &grids.radial)?;
    ConvolutionPair::new(space, *f, sg, &grids.radial, cal)?.ratio(p, z_override)
}

/// The p = 2 ratio from the Plancherel side:
/// (∫|f̂−z|² |e^{−t(λ²+ρ²)^α}|² |c|⁻² dλ / ∫|e^{−t(λ²+ρ²)^α}|² |c|⁻² dλ)^{1/2}.
pub fn p2_spectral_ratio(space: &RankOneSpace, f: &TestFunction, t: f64, alpha: f64, z: Complex64) -> Result<f64> {
    let sg = Semigroup::new(t, alpha)?;
    let rho2 = space.rho() * space.rho();
    let ln_k2 =
        |l: f64| 2.0 * (sg.ln_value(Complex64::new(l * l + rho2, 0.0)).re - sg.ln_value(Complex64::new(rho2, 0.0)).re);
    // extend until the weight is 50 nats down after the polynomial growth of |c|⁻²
    let growth = space.dim_n() as f64 - 1.0;
    let mut lmax = 1.0;
    while ln_k2(lmax) + growth * (1.0 + lmax).ln() > -50.0 {
        lmax *= 1.25;
    }
    let n = 8193;
    let h = lmax / (n - 1) as f64;
    let w = simpson_weights(n, h);
    let (mut num, mut den) = (0.0, 0.0);
    for (k, wk) in w.iter().enumerate().skip(1) {
        let l = k as f64 * h;
        let weight = wk * ln_k2(l).exp() * plancherel_density(space, l);
        let d = f.transform(space, Complex64::new(l, 0.0))? - z;
        num += weight * d.norm_sqr();
        den += weight;
    }
    Ok((num / den).sqrt())
}

/// Fraction of ‖h_t‖_p^p lying outside the concentration region.
pub fn concentration_mass(
    space: &RankOneSpace,
    p: LebesgueExponent,
    t: f64,
    radius_exponent: f64,
    grids: &Grids,
    cal: &Calibration,
) -> Result<f64> {
    let (lo, hi) = concentration_region(space, p, t, radius_exponent)?;
    let grid = &grids.radial;
    if hi + 6.0 * t.sqrt() > grid.r_max() {
        return Err(Error::GridInadequate(format!(
            "concentration region [{lo:.2}, {hi:.2}] plus margin exceeds r_max = {}",
            grid.r_max()
        )));
    }
    let h = synthesize(space, grid, cal, &Multiplier::kernel(Semigroup::new(t, 1.0)?))?;
    let w = grid.weights_for(space);
    let pp = p.p();
    let terms: Vec<(f64, f64)> = (1..grid.n_points())
        .map(|i| {
            let r = grid.node(i);
            (r, w[i].ln() + pp * h.points()[i].ln_abs() + space.ln_density(r))
        })
        .collect();
    let all = log_sum_exp(terms.iter().map(|x| x.1));
    let outside = log_sum_exp(terms.iter().filter(|x| x.0 < lo || x.0 > hi).map(|x| x.1));
    Ok((outside - all).exp())
}

/// Checks tail(t) ≤ C (r(t)/√t)^{−2} with C fitted at the first ladder point;
/// returns C and whether every later point obeys the bound.
pub fn concentration_envelope(ladder: &[(f64, f64)], radius_exponent: f64) -> (f64, bool) {
    let x = |t: f64| t.powf(radius_exponent) / t.sqrt();
    let Some(&(t0, m0)) = ladder.first() else {
        return (0.0, true);
    };
    let c = m0 * x(t0).powi(2);
    (c, ladder.iter().all(|&(t, m)| m <= c * x(t).powi(-2) * (1.0 + 1e-12)))
}

/// ‖f ∗ h_t^α‖_p / ‖h_t^α‖_p along a t-ladder.
pub fn extremizer_limit(
    space: &RankOneSpace,
    f: &TestFunction,
    p: LebesgueExponent,
    alpha: f64,
    t_ladder: &[f64],
    policy: &GridPolicy,
    cal: &Calibration,
) -> Result<Vec<f64>> {
    if p.p() > 2.0 {
        return Err(Error::Domain(format!("extremizer limit needs p in [1, 2] (got {p})")));
    }
    t_ladder
        .iter()
        .map(|&t| {
            let grids = policy.grids(space, t)?;
            check_coverage(space, p, t, &grids.radial)?;
            let pair = ConvolutionPair::new(space, *f, Semigroup::new(t, alpha)?, &grids.radial, cal)?;
            Ok((pair.ln_convolved_norm(p)? - pair.ln_kernel_norm(p)?).exp())
        })
        .collect()
}

/// t^θ·‖h_1 ∗ h_t − ĥ_1(0) h_t‖₂/‖h_t‖₂ along a t-ladder.
pub fn sharpness_rate(
    space: &RankOneSpace,
    t_ladder: &[f64],
    theta: f64,
    policy: &GridPolicy,
    cal: &Calibration,
) -> Result<Vec<f64>> {
    let f = TestFunction::heat(1.0)?;
    let p = LebesgueExponent::new(2.0)?;
    t_ladder
        .iter()
        .map(|&t| Ok(t.powf(theta) * theorem_ratio(space, &f, p, t, 1.0, None, &policy.grids(space, t)?, cal)?))
        .collect()
}

/// f ∗ m_r synthesized from f̂·m̂_r, and m_r itself, for a heat test function f.
#[derive(Debug, Clone)]
pub struct BallPair {
    space: RankOneSpace,
    test: TestFunction,
    radius: f64,
    convolved: ScaledProfile,
    ball: ScaledProfile,
}

impl BallPair {
    pub fn new(space: &RankOneSpace, f: &TestFunction, r: f64, grid: &RadialGrid, cal: &Calibration) -> Result<Self> {
        let TestFunction::Heat { s } = *f else {
            return Err(Error::Domain(format!("ball averages are computed for heat test functions (got {f})")));
        };
        if r + 12.0 * s.sqrt() + 4.0 > grid.r_max() {
            return Err(Error::GridInadequate(format!(
                "ball radius {r} leaves no margin inside r_max = {}",
                grid.r_max()
            )));
        }
        let m = Multiplier::convolved(Semigroup::new(s, 1.0)?, TestFunction::ball(r)?);
        Ok(Self {
            space: *space,
            test: *f,
            radius: r,
            convolved: synthesize(space, grid, cal, &m)?,
            ball: ScaledProfile::from_radial(&ball_kernel(space, r, grid)?),
        })
    }

    /// ln ‖f ∗ m_r − z m_r‖_p.
    pub fn ln_residual_norm(&self, p: LebesgueExponent, z: Complex64) -> Result<f64> {
        let n = self.convolved.combine(Complex64::new(1.0, 0.0), &self.ball, -z)?;
        ln_norm_checked(&n, None, p)
    }

    /// ‖f ∗ m_r − z m_r‖_p / ‖m_r‖_p.
    pub fn ratio(&self, p: LebesgueExponent, z: Complex64) -> Result<f64> {
        Ok((self.ln_residual_norm(p, z)? - self.ball.ln_lp_norm(p)).exp())
    }

    /// The p = 1 lower bound |f̂(a−iρ) − z|·|m̂_r(a−iρ)| and ‖f ∗ m_r − z m_r‖₁.
    pub fn witness(&self, a: f64, z: Complex64) -> Result<(f64, f64)> {
        let lambda = Complex64::new(a, -self.space.rho());
        let lower = (self.test.transform(&self.space, lambda)? - z).norm()
            * TestFunction::ball(self.radius)?.transform(&self.space, lambda)?.norm();
        Ok((lower, self.ln_residual_norm(LebesgueExponent::new(1.0)?, z)?.exp()))
    }
}

/// ‖f ∗ m_r − z m_r‖_p / ‖m_r‖_p along an r-ladder, for a heat test function f.
pub fn ball_average_ratio(
    space: &RankOneSpace,
    f: &TestFunction,
    p: LebesgueExponent,
    r_ladder: &[f64],
    z: Complex64,
    grid: &RadialGrid,
    cal: &Calibration,
) -> Result<Vec<f64>> {
    r_ladder.iter().map(|&r| BallPair::new(space, f, r, grid, cal)?.ratio(p, z)).collect()
}

/// The p = 1 witness bound and norm at one (r, a, z); see `BallPair::witness`.
pub fn ball_witness(
    space: &RankOneSpace,
    f: &TestFunction,
    r: f64,
    a: f64,
    z: Complex64,
    grid: &RadialGrid,
    cal: &Calibration,
) -> Result<(f64, f64)> {
    BallPair::new(space, f, r, grid, cal)?.witness(a, z)
}

/// Least-squares slope of ln ‖m_r‖_p against r, with m_r sampled on the grid.
pub fn ball_norm_slope(space: &RankOneSpace, p: LebesgueExponent, r_ladder: &[f64], grid: &RadialGrid) -> Result<f64> {
    let pts: Vec<(f64, f64)> = r_ladder
        .iter()
        .map(|&r| Ok((r, ScaledProfile::from_radial(&ball_kernel(space, r, grid)?).ln_lp_norm(p))))
        .collect::<Result<_>>()?;
    let rows: Vec<Vec<f64>> = pts.iter().map(|&(r, _)| vec![1.0, r]).collect();
    let y: Vec<f64> = pts.iter().map(|x| x.1).collect();
    Ok(least_squares(&rows, &y)?[1])
}

/// ln |B(o,r)|, the exact log-norm scale: ‖m_r‖_p = |B|^{−1/p′}.
pub fn ln_ball_volume(space: &RankOneSpace, r: f64) -> Result<f64> {
    Ok(ball_volume(space, r)?.ln())
}

/// Exponential rate and polynomial order of ‖h_t^α‖_p predicted by the norm estimates.
pub fn predicted_norm_exponents(space: &RankOneSpace, p: LebesgueExponent, alpha: f64) -> (f64, f64) {
    let rho = space.rho();
    let nu = space.dim_nu() as f64;
    let inv_pc = p.inv_p_conj();
    if p.p() < 2.0 {
        let inv_p = 1.0 - inv_pc;
        ((4.0 * rho * rho * inv_p * inv_pc).powf(alpha), -0.5 * inv_pc)
    } else if p.p() == 2.0 {
        (rho.powf(2.0 * alpha), -nu / 4.0)
    } else {
        (rho.powf(2.0 * alpha), -nu / 2.0)
    }
}

/// One row of the norm-exponent fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormFit {
    pub p: f64,
    pub alpha: f64,
    /// Slope of ln‖h_t^α‖_p + (predicted rate)·t against ln t.
    pub slope: f64,
    pub slope_expected: f64,
    /// c in the fit ln‖h_t^α‖_p = a + b ln t − c t.
    pub rate: f64,
    pub rate_expected: f64,
}

/// Fits ‖h_t^α‖_p along a geometric t-ladder for every p.
pub fn heat_norm_exponent_fit(
    space: &RankOneSpace,
    p_list: &[LebesgueExponent],
    t_ladder: &[f64],
    alpha: f64,
    policy: &GridPolicy,
    cal: &Calibration,
) -> Result<Vec<NormFit>> {
    if t_ladder.len() < 4 {
        return Err(Error::DegenerateFit(format!("norm fit needs at least 4 times (got {})", t_ladder.len())));
    }
    let mut ln_norms = vec![Vec::with_capacity(t_ladder.len()); p_list.len()];
    for &t in t_ladder {
        let grid = policy.grids(space, t)?.radial;
        let sg = Semigroup::new(t, alpha)?;
        let h = synthesize(space, &grid, cal, &Multiplier::kernel(sg))?;
        let tail = if alpha < 1.0 {
            let nodes = tail_nodes(grid.r_max());
            let radii: Vec<f64> = nodes.iter().map(|n| n.0).collect();
            let w: Vec<f64> = nodes.iter().map(|n| n.1).collect();
            Some((w, synthesize_weighted(space, cal, &Multiplier::kernel(sg), &radii)?))
        } else {
            None
        };
        for (k, &p) in p_list.iter().enumerate() {
            let tail = tail.as_ref().map(|(w, v)| (w.as_slice(), v.clone()));
            ln_norms[k].push(ln_norm_checked(&h, tail, p)?);
        }
    }
    p_list
        .iter()
        .zip(&ln_norms)
        .map(|(&p, y)| {
            let (rate_expected, slope_expected) = predicted_norm_exponents(space, p, alpha);
            let two: Vec<Vec<f64>> = t_ladder.iter().map(|t| vec![1.0, t.ln()]).collect();
            let shifted: Vec<f64> = y.iter().zip(t_ladder).map(|(y, t)| y + rate_expected * t).collect();
            let slope = least_squares(&two, &shifted)?[1];
            let three: Vec<Vec<f64>> = t_ladder.iter().map(|t| vec![1.0, t.ln(), -t]).collect();
            let rate = least_squares(&three, y)?[2];
            Ok(NormFit { p: p.p(), alpha, slope, slope_expected, rate, rate_expected })
        })
        .collect()
}

/// Least-squares coefficients of y ≈ Σ_j x_j·rows[.][j] via the normal equations.
pub fn least_squares(rows: &[Vec<f64>], y: &[f64]) -> Result<Vec<f64>> {
    let k = rows.first().map_or(0, |r| r.len());
    if k == 0 || rows.len() < k || rows.len() != y.len() {
        return Err(Error::DegenerateFit(format!("{} observations for {k} unknowns", rows.len())));
    }
    // columns are rescaled to unit norm so the pivot test is scale free
    let norms: Vec<f64> = (0..k).map(|j| rows.iter().map(|r| r[j] * r[j]).sum::<f64>().sqrt()).collect();
    if norms.contains(&0.0) {
        return Err(Error::DegenerateFit("a regressor column is identically zero".into()));
    }
    let mut a = vec![vec![0.0; k + 1]; k];
    for (r, &yv) in rows.iter().zip(y) {
        for i in 0..k {
            for j in 0..k {
                a[i][j] += r[i] / norms[i] * r[j] / norms[j];
            }
            a[i][k] += r[i] / norms[i] * yv;
        }
    }
    for c in 0..k {
        let piv = (c..k).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap_or(c);
        if a[piv][c].abs() < 1e-12 {
            return Err(Error::DegenerateFit("singular normal matrix".into()));
        }
        a.swap(c, piv);
        let pivot = a[c].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i != c {
                let f = row[c] / pivot[c];
                for (x, p) in row[c..].iter_mut().zip(&pivot[c..]) {
                    *x -= f * p;
                }
            }
        }
    }
    Ok((0..k).map(|i| a[i][k] / a[i][i] / norms[i]).collect())
}
