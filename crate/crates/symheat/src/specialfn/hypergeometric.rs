//! Gauss hypergeometric function ₂F₁ on the negative real axis.
//!
//! Near the origin the Pfaff transformation maps z ≤ 0 into [0, 1); far out the
//! two-term connection formula at z = ∞ is used. When a − b is close to an
//! integer the connection coefficients have cancelling poles; there the value is
//! recovered as the mean over a small circle in b (mean-value property).

use super::gamma::{is_gamma_pole, ln_gamma};
use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Largest Pfaff argument z/(z − 1) handled by the direct series.
pub const PFAFF_LIMIT: f64 = 0.8;

const SERIES_EPS: f64 = 1e-17;
const MAX_TERMS: usize = 50_000;
const CIRCLE_POINTS: usize = 16;

/// Power series of ₂F₁(a, b; c; x) for |x| < 1.
pub fn hyp2f1_series(a: Complex64, b: Complex64, c: Complex64, x: Complex64) -> Result<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    let mut term = one;
    let mut sum = one;
    let guard = a.norm() + b.norm() + c.norm() + 2.0;
    let mut quiet = 0;
    for k in 0..MAX_TERMS {
        let kf = k as f64;
        term *= (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0)) * x;
        sum += term;
        if term.norm() == 0.0 {
            return Ok(sum);
        }
        if kf > guard && term.norm() <= SERIES_EPS * sum.norm() {
            quiet += 1;
            if quiet >= 2 {
                return Ok(sum);
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::NonConvergence(format!("2F1 series ({a}, {b}; {c}; {x}) exceeded {MAX_TERMS} terms")))
}

/// ₂F₁(a, b; c; z) for real z ≤ 0.
pub fn gauss_2f1_neg_axis(a: Complex64, b: Complex64, c: Complex64, z: f64) -> Result<Complex64> {
    if z.is_nan() || z > 0.0 || z.is_infinite() {
        return Err(Error::Domain(format!("2F1 needs finite z <= 0 (got {z})")));
    }
    if is_gamma_pole(c) {
        return Err(Error::Domain(format!("2F1 third parameter {c} is a non-positive integer")));
    }
    if z == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let x = z / (z - 1.0);
    if x <= PFAFF_LIMIT {
        pfaff(a, b, c, z)
    } else {
        connection(a, b, c, (-z).ln())
    }
}

/// ₂F₁(a, b; c; −e^{ln_mz}), usable when −z overflows a double.
pub fn gauss_2f1_neg_log(a: Complex64, b: Complex64, c: Complex64, ln_mz: f64) -> Result<Complex64> {
    if is_gamma_pole(c) {
        return Err(Error::Domain(format!("2F1 third parameter {c} is a non-positive integer")));
    }
    // z/(z − 1) ≤ 0.8 exactly when −z ≤ 4.
    if ln_mz <= 4f64.ln() {
        return gauss_2f1_neg_axis(a, b, c, -ln_mz.exp());
    }
    connection(a, b, c, ln_mz)
}

fn pfaff(a: Complex64, b: Complex64, c: Complex64, z: f64) -> Result<Complex64> {
    let x = z / (z - 1.0);
    let pre = (-a * (1.0 - z).ln()).exp();
    Ok(pre * hyp2f1_series(a, c - b, c, Complex64::new(x, 0.0))?)
}

fn connection(a: Complex64, b: Complex64, c: Complex64, ln_mz: f64) -> Result<Complex64> {
    let d = a - b;
    let dist = Complex64::new(d.re - d.re.round(), d.im).norm();
    let delta = 0.1f64.min(1.0 / ln_mz.max(1.0));
    if dist >= 0.5 * delta {
        return connection_direct(a, b, c, ln_mz);
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..CIRCLE_POINTS {
        let theta = 2.0 * PI * (k as f64 + 0.5) / CIRCLE_POINTS as f64;
        let bk = b + Complex64::from_polar(delta, theta);
        acc += connection_direct(a, bk, c, ln_mz)?;
    }
    Ok(acc / CIRCLE_POINTS as f64)
}

fn connection_direct(a: Complex64, b: Complex64, c: Complex64, ln_mz: f64) -> Result<Complex64> {
    let w = Complex64::new(-(-ln_mz).exp(), 0.0);
    Ok(connection_term(a, b, c, ln_mz, w)? + connection_term(b, a, c, ln_mz, w)?)
}

// Γ(c)Γ(b−a)/(Γ(b)Γ(c−a)) (−z)^{−a} ₂F₁(a, a−c+1; a−b+1; 1/z)
fn connection_term(a: Complex64, b: Complex64, c: Complex64, ln_mz: f64, w: Complex64) -> Result<Complex64> {
    if is_gamma_pole(b) || is_gamma_pole(c - a) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let ln_coef = ln_gamma(c) + ln_gamma(b - a) - ln_gamma(b) - ln_gamma(c - a) - a * ln_mz;
    let series = hyp2f1_series(a, a - c + 1.0, a - b + 1.0, w)?;
    Ok(ln_coef.exp() * series)
}

/// Precomputed power-series coefficients of ₂F₁(a, b; c; x) for repeated evaluation
/// at many arguments |x| ≤ x_max.
#[derive(Debug, Clone)]
pub struct SeriesCoeffs {
    coef: Vec<Complex64>,
    guard: usize,
}

impl SeriesCoeffs {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, x_max: f64) -> Result<Self> {
        let guard = (a.norm() + b.norm() + c.norm() + 2.0).ceil() as usize;
        let mut coef = vec![Complex64::new(1.0, 0.0)];
        let mut term = Complex64::new(1.0, 0.0);
        let mut peak: f64 = 1.0;
        let mut scale = 1.0;
        for k in 0..MAX_TERMS {
            let kf = k as f64;
            term *= (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0));
            coef.push(term);
            scale *= x_max;
            let mag = term.norm() * scale;
            peak = peak.max(mag);
            if mag == 0.0 || (k > guard && mag <= 1e-19 * peak) {
                return Ok(Self { coef, guard });
            }
        }
        Err(Error::NonConvergence(format!(
            "2F1 coefficients ({a}, {b}; {c}) at |x| <= {x_max} exceeded {MAX_TERMS} terms"
        )))
    }

    /// Sum of the series at x (|x| ≤ x_max).
    pub fn eval(&self, x: f64) -> Complex64 {
        let mut sum = Complex64::new(0.0, 0.0);
        let mut xk = 1.0;
        for (k, c) in self.coef.iter().enumerate() {
            let t = c * xk;
            sum += t;
            if k > self.guard && t.norm() <= SERIES_EPS * sum.norm() {
                break;
            }
            xk *= x;
        }
        sum
    }

    pub fn len(&self) -> usize {
        self.coef.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coef.is_empty()
    }
}
