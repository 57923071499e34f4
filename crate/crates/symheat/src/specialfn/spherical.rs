//! Harish-Chandra c-function, Plancherel density, spherical functions φ_λ and
//! the Harish-Chandra functions Φ_λ of a rank-one space.
//!
//! φ_λ(r) = ₂F₁((ρ+iλ)/2, (ρ−iλ)/2; α_J+1; −sinh²r), and for r > 0 away from
//! the poles of c, φ_λ = c(λ)Φ_λ + c(−λ)Φ_{−λ} with Φ_λ(r) ~ e^{(iλ−ρ)r}.

use super::gamma::{is_gamma_pole, ln_gamma};
use super::hypergeometric::{gauss_2f1_neg_axis, gauss_2f1_neg_log, SeriesCoeffs};
use crate::error::{Error, Result};
use crate::geometry::{ln_two_cosh, ln_two_sinh, LebesgueExponent, RankOneSpace};
use num_complex::Complex64;

/// Radius where z/(z−1) = 0.8 for z = −sinh²r, i.e. asinh(2).
pub const R_SWITCH: f64 = 1.443_635_475_178_810_3;

/// Above this value of |λ|·r the Pfaff series loses too many digits and the
/// Harish-Chandra split in sech²r is used instead.
pub const PFAFF_LAMBDA_R: f64 = 8.0;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn cplx(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Distance from iλ to the nearest integer; small values make the two-term split singular.
pub fn split_defect(lambda: Complex64) -> f64 {
    let il = I * lambda;
    Complex64::new(il.re - il.re.round(), il.im).norm()
}

fn ln_v(space: &RankOneSpace) -> f64 {
    let ma = space.m_alpha() as f64;
    let m2a = space.m_2alpha() as f64;
    let rho = space.rho();
    let lg = |x: f64| ln_gamma(cplx(x)).re;
    lg(rho + ma / 2.0) - lg(rho) + lg(rho / 2.0 + ma / 4.0 + m2a / 2.0) - lg(rho / 2.0 + ma / 4.0)
}

/// ln c(λ) from the duplication-reduced Gamma quotient
/// c(λ) = 2^{ρ−iλ} Γ(α_J+1) Γ(iλ) / (Γ((iλ+ρ)/2) Γ((iλ+m_α/2+1)/2)).
/// Returns None where c vanishes; errors at the poles iλ ∈ −ℕ₀.
pub fn ln_c_reduced(space: &RankOneSpace, lambda: Complex64) -> Result<Option<Complex64>> {
    let il = I * lambda;
    if is_gamma_pole(il) {
        return Err(Error::Domain(format!("c-function has a pole at λ = {lambda}")));
    }
    let d1 = (il + space.rho()) / 2.0;
    let d2 = (il + space.m_alpha() as f64 / 2.0 + 1.0) / 2.0;
    if is_gamma_pole(d1) || is_gamma_pole(d2) {
        return Ok(None);
    }
    let rho = space.rho();
    Ok(Some(
        (rho - il) * std::f64::consts::LN_2 + ln_gamma(cplx(space.alpha_j() + 1.0)) + ln_gamma(il)
            - ln_gamma(d1)
            - ln_gamma(d2),
    ))
}

/// The Gindikin–Karpelevič c-function
/// c(λ) = v Γ(iλ)/Γ(iλ+m_α/2) · Γ(iλ/2+m_α/4)/Γ(iλ/2+m_α/4+m_2α/2),
/// normalized by c(−iρ) = 1.
pub fn c_function(space: &RankOneSpace, lambda: Complex64) -> Result<Complex64> {
    let ma = space.m_alpha() as f64;
    let m2a = space.m_2alpha() as f64;
    let il = I * lambda;
    let n1 = il;
    let d1 = il + ma / 2.0;
    let n2 = il / 2.0 + ma / 4.0;
    let d2 = n2 + m2a / 2.0;
    if is_gamma_pole(n1) {
        return Err(Error::Domain(format!("c-function has a pole at λ = {lambda}")));
    }
    if is_gamma_pole(n2) {
        if is_gamma_pole(d1) {
            // removable: the duplication formula cancels the two poles
            return Ok(ln_c_reduced(space, lambda)?.map_or(cplx(0.0), |l| l.exp()));
        }
        return Err(Error::Domain(format!("c-function has a pole at λ = {lambda}")));
    }
    if is_gamma_pole(d1) || is_gamma_pole(d2) {
        return Ok(cplx(0.0));
    }
    Ok((ln_v(space) + ln_gamma(n1) - ln_gamma(d1) + ln_gamma(n2) - ln_gamma(d2)).exp())
}

/// 1/c(λ); zero at the poles of c, error at its zeros.
pub fn inv_c_function(space: &RankOneSpace, lambda: Complex64) -> Result<Complex64> {
    let il = I * lambda;
    if is_gamma_pole(il) {
        return Ok(cplx(0.0));
    }
    match ln_c_reduced(space, lambda)? {
        Some(l) => Ok((-l).exp()),
        None => Err(Error::Domain(format!("c-function vanishes at λ = {lambda}"))),
    }
}

/// Plancherel density |c(λ)|⁻² for real λ, extended by 0 at λ = 0.
pub fn plancherel_density(space: &RankOneSpace, lambda: f64) -> f64 {
    if lambda == 0.0 {
        return 0.0;
    }
    match ln_c_reduced(space, cplx(lambda)) {
        Ok(Some(l)) => (-2.0 * l.re).exp(),
        _ => f64::NAN,
    }
}

/// Elementary spherical function φ_λ(r).
pub fn spherical_function(space: &RankOneSpace, lambda: Complex64, r: f64) -> Result<Complex64> {
    let rho = space.rho();
    if lambda.im.abs() > rho * (1.0 + 1e-12) {
        return Err(Error::Domain(format!("spherical function needs |Im λ| <= ρ (λ = {lambda}, ρ = {rho})")));
    }
    if r.is_nan() || r < 0.0 {
        return Err(Error::Domain(format!("spherical function needs r >= 0 (got {r})")));
    }
    if r == 0.0 {
        return Ok(cplx(1.0));
    }
    if r < R_SWITCH && lambda.norm() * r > PFAFF_LAMBDA_R && split_defect(lambda) > 0.25 {
        return hc_split_cosh(space, lambda, r);
    }
    let a = (rho + I * lambda) / 2.0;
    let b = (rho - I * lambda) / 2.0;
    let c = cplx(space.alpha_j() + 1.0);
    if r > 300.0 {
        return gauss_2f1_neg_log(a, b, c, 2.0 * (ln_two_sinh(r) - std::f64::consts::LN_2));
    }
    gauss_2f1_neg_axis(a, b, c, -r.sinh().powi(2))
}

fn hc_split_cosh(space: &RankOneSpace, lambda: Complex64, r: f64) -> Result<Complex64> {
    let cp = ln_c_reduced(space, lambda)?;
    let cm = ln_c_reduced(space, -lambda)?;
    let mut v = cplx(0.0);
    if let Some(l) = cp {
        v += l.exp() * harish_chandra_phi(space, lambda, r)?;
    }
    if let Some(l) = cm {
        v += l.exp() * harish_chandra_phi(space, -lambda, r)?;
    }
    Ok(v)
}

/// Parameters of the series factor of Φ_λ in the variable −1/sinh²r.
pub fn hc_sinh_params(space: &RankOneSpace, lambda: Complex64) -> (Complex64, Complex64, Complex64) {
    let b = (space.rho() - I * lambda) / 2.0;
    (b, b - space.alpha_j(), 1.0 - I * lambda)
}

/// Parameters of the series factor of Φ_λ in the variable sech²r.
fn hc_cosh_params(space: &RankOneSpace, lambda: Complex64) -> (Complex64, Complex64, Complex64) {
    let il = I * lambda;
    ((space.rho() - il) / 2.0, (space.alpha_j() - space.beta_j() + 1.0 - il) / 2.0, 1.0 - il)
}

/// Harish-Chandra function Φ_λ(r) = e^{(iλ−ρ)r}(1 + o(1)) for r > 0.
pub fn harish_chandra_phi(space: &RankOneSpace, lambda: Complex64, r: f64) -> Result<Complex64> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("Harish-Chandra function needs r > 0 (got {r})")));
    }
    let third = 1.0 - I * lambda;
    if is_gamma_pole(third) {
        return Err(Error::Domain(format!("Harish-Chandra function has a pole at λ = {lambda}")));
    }
    let shift = I * lambda - space.rho();
    if r >= R_SWITCH {
        let (a, b, c) = hc_sinh_params(space, lambda);
        let w = -1.0 / r.sinh().powi(2);
        let s = super::hypergeometric::hyp2f1_series(a, b, c, cplx(w))?;
        Ok((shift * ln_two_sinh(r)).exp() * s)
    } else {
        let (a, b, c) = hc_cosh_params(space, lambda);
        let z = 1.0 / r.cosh().powi(2);
        let s = super::hypergeometric::hyp2f1_series(a, b, c, cplx(z))?;
        Ok((shift * ln_two_cosh(r)).exp() * s)
    }
}

/// ∫₀^R φ_λ(r) J(r) dr in closed form:
/// J(R) sinh(2R) / (4(α_J+1)) · ₂F₁(a+1, b+1; α_J+2; −sinh²R).
pub fn ball_integral(space: &RankOneSpace, lambda: Complex64, radius: f64) -> Result<Complex64> {
    if !(radius > 0.0) {
        return Err(Error::Domain(format!("ball radius must be positive (got {radius})")));
    }
    let rho = space.rho();
    let a = (rho + I * lambda) / 2.0;
    let b = (rho - I * lambda) / 2.0;
    let c = space.alpha_j() + 1.0;
    let ln_pre = space.ln_density(radius) + (2.0 * radius).sinh().ln() - (4.0 * c).ln();
    let f = if radius > 300.0 {
        gauss_2f1_neg_log(a + 1.0, b + 1.0, cplx(c + 1.0), 2.0 * radius.sinh().ln())?
    } else {
        gauss_2f1_neg_axis(a + 1.0, b + 1.0, cplx(c + 1.0), -radius.sinh().powi(2))?
    };
    let v = ln_pre.exp() * f;
    if !(v.re.is_finite() && v.im.is_finite()) {
        return Err(Error::Domain(format!("ball integral overflows at R = {radius}")));
    }
    Ok(v)
}

/// Bracket [min, max] of φ_{−iγ_pρ}(r) against its envelope on a grid of [0, r_max]:
/// (1+r)e^{−2ρr/p′} for p < 2 and (1+r)e^{−ρr} for p = 2.
pub fn spherical_estimate_check(space: &RankOneSpace, p: LebesgueExponent, r_max: f64) -> Result<(f64, f64)> {
    if p.p() > 2.0 {
        return Err(Error::Domain(format!("estimate check needs p in [1, 2] (got {p})")));
    }
    if !(r_max >= 10.0) {
        return Err(Error::Domain(format!("estimate check needs r_max >= 10 (got {r_max})")));
    }
    let rho = space.rho();
    let lambda = Complex64::new(0.0, -p.gamma_p() * rho);
    let rate = if p.p() == 2.0 { rho } else { 2.0 * rho * p.inv_p_conj() };
    let n = (r_max / 0.05).ceil() as usize;
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    for i in 0..=n {
        let r = r_max * i as f64 / n as f64;
        let phi = spherical_function(space, lambda, r)?.re;
        let ratio = phi / ((1.0 + r) * (-rate * r).exp());
        lo = lo.min(ratio);
        hi = hi.max(ratio);
    }
    Ok((lo, hi))
}

/// Geometry of one radial node, shared by every spectral parameter.
#[derive(Debug, Clone, Copy)]
pub struct RadialPoint {
    pub r: f64,
    ln_cosh: f64,
    tanh2: f64,
    ln_2sinh: f64,
    inv_sinh2: f64,
    ln_2cosh: f64,
    sech2: f64,
}

impl RadialPoint {
    pub fn new(r: f64) -> Self {
        let (ln_2sinh, inv_sinh2) = if r > 0.0 {
            (ln_two_sinh(r), if r > 20.0 { 4.0 * (-2.0 * r).exp() } else { 1.0 / r.sinh().powi(2) })
        } else {
            (f64::NEG_INFINITY, f64::INFINITY)
        };
        let ln_2cosh = ln_two_cosh(r);
        Self {
            r,
            ln_cosh: ln_2cosh - std::f64::consts::LN_2,
            tanh2: r.tanh().powi(2),
            ln_2sinh,
            inv_sinh2,
            ln_2cosh,
            sech2: if r > 20.0 { 4.0 * (-2.0 * r).exp() } else { 1.0 / r.cosh().powi(2) },
        }
    }

    pub fn ln_two_sinh(&self) -> f64 {
        self.ln_2sinh
    }

    pub fn inv_sinh2(&self) -> f64 {
        self.inv_sinh2
    }
}

#[derive(Debug, Clone)]
struct Split {
    c_plus: Complex64,
    c_minus: Complex64,
    sinh_plus: SeriesCoeffs,
    sinh_minus: SeriesCoeffs,
    cosh: Option<(SeriesCoeffs, SeriesCoeffs)>,
}

/// φ_λ(r) for one λ at many radii, with all series coefficients precomputed.
#[derive(Debug, Clone)]
pub struct PhiTable {
    space: RankOneSpace,
    lambda: Complex64,
    r_pfaff: f64,
    pfaff: SeriesCoeffs,
    split: Option<Split>,
}

impl PhiTable {
    pub fn new(space: &RankOneSpace, lambda: Complex64) -> Result<Self> {
        let rho = space.rho();
        let degenerate = split_defect(lambda) < 0.05;
        let r_pfaff = if degenerate || lambda.norm() * R_SWITCH <= PFAFF_LAMBDA_R {
            R_SWITCH
        } else {
            PFAFF_LAMBDA_R / lambda.norm()
        };
        let a = (rho + I * lambda) / 2.0;
        let b = (rho - I * lambda) / 2.0;
        let c = cplx(space.alpha_j() + 1.0);
        let pfaff = SeriesCoeffs::new(a, c - b, c, r_pfaff.tanh().powi(2))?;
        let split = if degenerate {
            None
        } else {
            let cp = ln_c_reduced(space, lambda)?.map_or(cplx(0.0), |l| l.exp());
            let cm = ln_c_reduced(space, -lambda)?.map_or(cplx(0.0), |l| l.exp());
            let (a1, b1, c1) = hc_sinh_params(space, lambda);
            let (a2, b2, c2) = hc_sinh_params(space, -lambda);
            let w_max = 1.0 / R_SWITCH.sinh().powi(2);
            let cosh = if r_pfaff < R_SWITCH {
                let z_max = 1.0 / r_pfaff.cosh().powi(2);
                let (a3, b3, c3) = hc_cosh_params(space, lambda);
                let (a4, b4, c4) = hc_cosh_params(space, -lambda);
                Some((SeriesCoeffs::new(a3, b3, c3, z_max)?, SeriesCoeffs::new(a4, b4, c4, z_max)?))
            } else {
                None
            };
            Some(Split {
                c_plus: cp,
                c_minus: cm,
                sinh_plus: SeriesCoeffs::new(a1, b1, c1, w_max)?,
                sinh_minus: SeriesCoeffs::new(a2, b2, c2, w_max)?,
                cosh,
            })
        };
        Ok(Self { space: *space, lambda, r_pfaff, pfaff, split })
    }

    pub fn lambda(&self) -> Complex64 {
        self.lambda
    }

    /// φ_λ at a precomputed radial point.
    pub fn eval(&self, pt: &RadialPoint) -> Result<Complex64> {
        let r = pt.r;
        if r == 0.0 {
            return Ok(cplx(1.0));
        }
        let rho = self.space.rho();
        let il = I * self.lambda;
        if r < self.r_pfaff {
            let pre = (-(rho + il) * pt.ln_cosh).exp();
            return Ok(pre * self.pfaff.eval(pt.tanh2));
        }
        let split = match &self.split {
            Some(s) => s,
            None => return spherical_function(&self.space, self.lambda, r),
        };
        if r >= R_SWITCH {
            let w = -pt.inv_sinh2;
            let ep = ((il - rho) * pt.ln_2sinh).exp();
            let em = ((-il - rho) * pt.ln_2sinh).exp();
            Ok(split.c_plus * ep * split.sinh_plus.eval(w) + split.c_minus * em * split.sinh_minus.eval(w))
        } else {
            let (cp, cm) = split.cosh.as_ref().expect("cosh series present below R_SWITCH");
            let ep = ((il - rho) * pt.ln_2cosh).exp();
            let em = ((-il - rho) * pt.ln_2cosh).exp();
            Ok(split.c_plus * ep * cp.eval(pt.sech2) + split.c_minus * em * cm.eval(pt.sech2))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h3() -> RankOneSpace {
        RankOneSpace::preset("H3").unwrap()
    }

    fn h3_phi(lambda: f64, r: f64) -> f64 {
        (lambda * r).sin() / (lambda * r.sinh())
    }

    #[test]
    fn c_normalized_at_minus_i_rho() {
        for name in ["H2", "H3", "CH2", "HHn:2", "Hn:6"] {
            let s = RankOneSpace::preset(name).unwrap();
            let v = c_function(&s, Complex64::new(0.0, -s.rho())).unwrap();
            assert!((v - 1.0).norm() < 1e-12, "{name}: {v}");
        }
    }

    #[test]
    fn gk_matches_reduced_form() {
        for name in ["H2", "H3", "CH2", "HHn:3"] {
            let s = RankOneSpace::preset(name).unwrap();
            for &(re, im) in &[(0.3, 0.0), (2.0, -0.5), (7.0, -1.0), (0.1, 0.4), (15.0, 0.0)] {
                let l = Complex64::new(re, im);
                let gk = c_function(&s, l).unwrap();
                let red = ln_c_reduced(&s, l).unwrap().unwrap().exp();
                assert!((gk - red).norm() / gk.norm() < 1e-12, "{name} {l}");
            }
        }
    }

    #[test]
    fn h3_c_function_is_one_over_i_lambda() {
        for &l in &[0.5, 1.0, 5.0, 20.0] {
            let v = c_function(&h3(), cplx(l)).unwrap();
            assert!((v - 1.0 / (I * l)).norm() < 1e-12);
            assert!((plancherel_density(&h3(), l) / (l * l) - 1.0).abs() < 1e-10);
        }
        assert_eq!(plancherel_density(&h3(), 0.0), 0.0);
    }

    #[test]
    fn spherical_function_h3_oracle() {
        for &l in &[0.2, 1.0, 2.0, 5.0, 10.0, 40.0] {
            for &r in &[0.1, 1.0, 1.44, 1.45, 3.0, 10.0, 25.0] {
                let v = spherical_function(&h3(), cplx(l), r).unwrap();
                let e = h3_phi(l, r);
                assert!((v.re - e).abs() <= 1e-9 * e.abs().max(1e-300), "λ={l} r={r}: {v} vs {e}");
            }
        }
        let v = spherical_function(&h3(), cplx(1.0), 2.0).unwrap();
        assert!((v.re - 0.2507).abs() < 1e-4);
    }

    #[test]
    fn phi_at_lambda_zero_far_out() {
        // φ_0(r) = r / sinh r on H³; the split is singular at λ = 0.
        for &r in &[2.0, 10.0, 50.0, 400.0] {
            let v = spherical_function(&h3(), cplx(0.0), r).unwrap();
            let e = if r > 300.0 { (r.ln() + (2.0f64).ln() - r).exp() } else { r / r.sinh() };
            assert!((v.re - e).abs() / e < 1e-10, "r={r}: {v} vs {e}");
        }
    }

    #[test]
    fn unit_at_minus_i_rho() {
        for name in ["H3", "CH2", "HHn:2"] {
            let s = RankOneSpace::preset(name).unwrap();
            for &r in &[0.0, 0.5, 2.0, 12.0] {
                let v = spherical_function(&s, Complex64::new(0.0, -s.rho()), r).unwrap();
                assert!((v - 1.0).norm() < 1e-10, "{name} r={r}: {v}");
            }
        }
    }

    #[test]
    fn harish_chandra_decomposition() {
        let s = RankOneSpace::preset("CH2").unwrap();
        for &l in &[Complex64::new(0.7, 0.0), Complex64::new(2.0, 0.3), Complex64::new(1.5, -1.1)] {
            for &r in &[0.7, 1.2, 2.5, 6.0] {
                let phi = spherical_function(&s, l, r).unwrap();
                let split = c_function(&s, l).unwrap() * harish_chandra_phi(&s, l, r).unwrap()
                    + c_function(&s, -l).unwrap() * harish_chandra_phi(&s, -l, r).unwrap();
                assert!((phi - split).norm() / phi.norm() < 1e-11, "λ={l} r={r}");
            }
        }
        // H³: Φ_λ(r) = e^{iλr}/(2 sinh r)
        let l = Complex64::new(1.3, 0.8);
        for &r in &[0.5, 2.0, 9.0] {
            let v = harish_chandra_phi(&h3(), l, r).unwrap();
            let e = (I * l * r).exp() / (2.0 * r.sinh());
            assert!((v - e).norm() / e.norm() < 1e-12);
        }
    }

    #[test]
    fn ball_integral_matches_volume() {
        // H³: ∫₀^R 4 sinh² r dr = sinh 2R − 2R
        for &radius in &[0.3, 3.0, 10.0] {
            let v = ball_integral(&h3(), Complex64::new(0.0, -1.0), radius).unwrap();
            let e = (2.0 * radius).sinh() - 2.0 * radius;
            assert!((v.re - e).abs() / e < 1e-11, "R={radius}: {v} vs {e}");
        }
        // H³: ∫₀^R sin(λr)/(λ sinh r) 4 sinh² r dr = 4 ∫ sin(λr) sinh r dr / λ
        let (l, radius) = (1.7f64, 2.5f64);
        let e =
            4.0 / l * (((l * radius).sin() * radius.cosh() - l * (l * radius).cos() * radius.sinh()) / (1.0 + l * l));
        let v = ball_integral(&h3(), cplx(l), radius).unwrap();
        assert!((v.re - e).abs() / e.abs() < 1e-11, "{v} vs {e}");
    }

    #[test]
    fn table_matches_direct_evaluation() {
        let s = RankOneSpace::preset("CH2").unwrap();
        for &l in &[
            cplx(0.0),
            cplx(1e-3),
            cplx(0.8),
            cplx(9.0),
            cplx(35.0),
            Complex64::new(-3.0, 2.0),
            Complex64::new(0.0, 2.0),
            Complex64::new(0.0, 1.0),
        ] {
            let table = PhiTable::new(&s, l).unwrap();
            for &r in &[0.0, 0.05, 0.4, 1.0, 1.44, 1.45, 3.0, 20.0, 90.0] {
                let t = table.eval(&RadialPoint::new(r)).unwrap();
                let d = spherical_function(&s, l, r).unwrap();
                let scale = d.norm().max(1e-300);
                assert!((t - d).norm() / scale < 1e-8, "λ={l} r={r}: {t} vs {d}");
            }
        }
    }
}
