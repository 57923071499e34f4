//! Non-negative K-biinvariant test functions with spherical transforms that
//! extend to entire functions of λ: the heat kernel h_s, the normalized ball
//! indicator m_R and a truncated exponential e^{−βr}·1_{r≤R}.

use crate::error::{Error, Result};
use crate::geometry::RankOneSpace;
use crate::quadrature::gauss_legendre;
use crate::specialfn::gauss_2f1_neg_axis;
use crate::specialfn::spherical::ball_integral;
use num_complex::Complex64;
use std::fmt;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TestFunction {
    /// h_s, with transform e^{−s(λ²+ρ²)}.
    Heat { s: f64 },
    /// m_R = χ_{B(o,R)}/|B(o,R)|.
    Ball { radius: f64 },
    /// e^{−βr} on [0, R], zero beyond.
    TruncExp { beta: f64, radius: f64 },
}

impl TestFunction {
    pub fn heat(s: f64) -> Result<Self> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::Domain(format!("heat test function needs s > 0 (got {s})")));
        }
        Ok(Self::Heat { s })
    }

    pub fn ball(radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Domain(format!("ball test function needs R > 0 (got {radius})")));
        }
        Ok(Self::Ball { radius })
    }

    pub fn trunc_exp(beta: f64, radius: f64) -> Result<Self> {
        if !(beta >= 0.0 && beta.is_finite()) {
            return Err(Error::Domain(format!("truncated exponential needs beta >= 0 (got {beta})")));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Domain(format!("truncated exponential needs R > 0 (got {radius})")));
        }
        Ok(Self::TruncExp { beta, radius })
    }

    /// Parses "heat:s", "ball:R" or "exp:beta:R".
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.trim().split(':').map(str::trim).collect();
        let num = |s: &str| -> Result<f64> {
            s.parse::<f64>().map_err(|_| Error::Domain(format!("malformed number '{s}' in '{text}'")))
        };
        match parts.as_slice() {
            ["heat", s] => Self::heat(num(s)?),
            ["ball", r] => Self::ball(num(r)?),
            ["exp", b, r] => Self::trunc_exp(num(b)?, num(r)?),
            _ => Err(Error::Domain(format!("unknown test function '{text}' (expected heat:s, ball:R or exp:beta:R)"))),
        }
    }

    /// Time of the Gaussian factor e^{−sλ²} in the transform.
    pub fn gaussian_time(&self) -> f64 {
        match self {
            Self::Heat { s } => *s,
            _ => 0.0,
        }
    }

    /// Support radius: |f̂(x+iy)| grows at most like e^{R|y|}.
    pub fn exp_type(&self) -> f64 {
        match self {
            Self::Heat { .. } => 0.0,
            Self::Ball { radius } | Self::TruncExp { radius, .. } => *radius,
        }
    }

    /// f̂(λ) = ∫ f φ_{−λ} J dr for complex λ.
    pub fn transform(&self, space: &RankOneSpace, lambda: Complex64) -> Result<Complex64> {
        let w = lambda * lambda + space.rho() * space.rho();
        Ok(self.ln_transform(space, lambda, w)?.map_or(Complex64::new(0.0, 0.0), |l| l.exp()))
    }

    /// ln f̂(λ), given w = λ² + ρ² computed by the caller; None where f̂ vanishes.
    pub fn ln_transform(&self, space: &RankOneSpace, lambda: Complex64, w: Complex64) -> Result<Option<Complex64>> {
        let v = match self {
            Self::Heat { s } => return Ok(Some(-*s * w)),
            Self::Ball { radius } => {
                let vol = ball_integral(space, Complex64::new(0.0, -space.rho()), *radius)?.re;
                ball_integral(space, lambda, *radius)? / vol
            }
            Self::TruncExp { beta, radius } => trunc_exp_transform(space, lambda, *beta, *radius)?,
        };
        if v == Complex64::new(0.0, 0.0) {
            Ok(None)
        } else {
            Ok(Some(v.ln()))
        }
    }

    /// Profile value f(r) for the closed-form members; None for the heat kernel,
    /// whose profile comes from spectral synthesis.
    pub fn closed_profile(&self, space: &RankOneSpace, r: f64) -> Result<Option<f64>> {
        match self {
            Self::Heat { .. } => Ok(None),
            Self::Ball { radius } => {
                let vol = ball_integral(space, Complex64::new(0.0, -space.rho()), *radius)?.re;
                Ok(Some(if r <= *radius { 1.0 / vol } else { 0.0 }))
            }
            Self::TruncExp { beta, radius } => Ok(Some(if r <= *radius { (-beta * r).exp() } else { 0.0 })),
        }
    }
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Heat { s } => write!(f, "heat:{s}"),
            Self::Ball { radius } => write!(f, "ball:{radius}"),
            Self::TruncExp { beta, radius } => write!(f, "exp:{beta}:{radius}"),
        }
    }
}

// Gauss–Legendre panels over [0, R] fine enough for the oscillation of φ_λ.
fn trunc_exp_transform(space: &RankOneSpace, lambda: Complex64, beta: f64, radius: f64) -> Result<Complex64> {
    let rho = space.rho();
    let a = (rho + I * lambda) / 2.0;
    let b = (rho - I * lambda) / 2.0;
    let c = Complex64::new(space.alpha_j() + 1.0, 0.0);
    let width = 0.5f64.min(3.0 / lambda.norm().max(1e-12));
    let panels = (radius / width).ceil().max(1.0) as usize;
    let h = radius / panels as f64;
    let gl = gauss_legendre(20);
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..panels {
        let mid = (k as f64 + 0.5) * h;
        for &(x, w) in &gl {
            let r = mid + 0.5 * h * x;
            let phi = gauss_2f1_neg_axis(a, b, c, -r.sinh().powi(2))?;
            acc += 0.5 * h * w * (-beta * r + space.ln_density(r)).exp() * phi;
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heat_transform_is_gaussian() {
        let s = RankOneSpace::preset("CH2").unwrap();
        let f = TestFunction::heat(1.5).unwrap();
        let l = Complex64::new(0.7, -0.4);
        let v = f.transform(&s, l).unwrap();
        let exact = (-1.5 * (l * l + s.rho() * s.rho())).exp();
        assert!((v - exact).norm() < 1e-15);
    }

    #[test]
    fn ball_transform_is_one_at_minus_i_rho() {
        let s = RankOneSpace::preset("H3").unwrap();
        let f = TestFunction::ball(3.0).unwrap();
        let v = f.transform(&s, Complex64::new(0.0, -s.rho())).unwrap();
        assert!((v - 1.0).norm() < 1e-12);
    }

    #[test]
    fn trunc_exp_matches_h3_closed_form() {
        // H³: ∫₀^R e^{−βr} sin(λr)/(λ sinh r) · 4 sinh²r dr
        let s = RankOneSpace::preset("H3").unwrap();
        let (beta, radius) = (1.0, 3.0);
        let f = TestFunction::trunc_exp(beta, radius).unwrap();
        for &l in &[0.5, 2.0, 6.0] {
            let v = f.transform(&s, Complex64::new(l, 0.0)).unwrap();
            let n = 20000;
            let h = radius / n as f64;
            let mut e = 0.0;
            for k in 0..=n {
                let r = k as f64 * h;
                let w = if k == 0 || k == n { 0.5 } else { 1.0 };
                e += w * h * (-beta * r).exp() * (l * r).sin() / l * 4.0 * r.sinh();
            }
            assert!((v.re - e).abs() < 1e-6 * e.abs().max(1.0), "λ={l}: {v} vs {e}");
        }
    }

    #[test]
    fn parse_round_trip() {
        for text in ["heat:1", "ball:3", "exp:0.5:4"] {
            let f = TestFunction::parse(text).unwrap();
            assert_eq!(f.to_string(), text);
        }
        assert!(TestFunction::parse("ball:-1").is_err());
        assert!(TestFunction::parse("gauss:1").is_err());
    }
}
