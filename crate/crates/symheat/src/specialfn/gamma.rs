//! Complex Gamma function: Lanczos approximation (g = 7, 9 terms) with reflection.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;

// published to more digits than an f64 holds
#[allow(clippy::excessive_precision)]
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

// 0.5 * ln(2π)
const HALF_LN_TWO_PI: f64 = 0.918_938_533_204_672_8;

/// True when z is a non-positive integer, where Γ has a pole.
pub fn is_gamma_pole(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

fn ln_gamma_right(z: Complex64) -> Complex64 {
    let z = z - 1.0;
    let mut x = Complex64::new(LANCZOS_COEF[0], 0.0);
    for (i, &c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    HALF_LN_TWO_PI + (z + 0.5) * t.ln() - t + x.ln()
}

/// A logarithm of sin(πz) that stays finite for large |Im z|.
fn ln_sin_pi(z: Complex64) -> Complex64 {
    if z.im < 0.0 {
        return ln_sin_pi(z.conj()).conj();
    }
    // sin(πz) = e^{−iπz} (e^{2iπz} − 1) / (2i), with |e^{2iπz}| ≤ 1 here.
    let i = Complex64::i();
    let e = (2.0 * PI * i * z).exp();
    -i * PI * z + ((e - 1.0) / (2.0 * i)).ln()
}

/// A logarithm of Γ(z); the branch is not normalized, only exp(ln_gamma) is meaningful.
/// Poles give a non-finite result; callers check `is_gamma_pole` first.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        Complex64::new(PI.ln(), 0.0) - ln_sin_pi(z) - ln_gamma_right(1.0 - z)
    } else {
        ln_gamma_right(z)
    }
}

/// Γ(z) for complex z.
pub fn complex_gamma(z: Complex64) -> Result<Complex64> {
    if is_gamma_pole(z) {
        return Err(Error::Domain(format!("Gamma has a pole at {z}")));
    }
    if z.re < 0.5 {
        // Direct reflection keeps full relative accuracy near the poles.
        let s = (PI * z).sin();
        return Ok(PI / (s * ln_gamma_right(1.0 - z).exp()));
    }
    Ok(ln_gamma_right(z).exp())
}

/// 1/Γ(z), an entire function; exactly zero at the poles of Γ.
pub fn recip_gamma(z: Complex64) -> Complex64 {
    if is_gamma_pole(z) {
        Complex64::new(0.0, 0.0)
    } else {
        (-ln_gamma(z)).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        let one = complex_gamma(Complex64::new(1.0, 0.0)).unwrap();
        assert!((one - 1.0).norm() < 1e-14);
        let half = complex_gamma(Complex64::new(0.5, 0.0)).unwrap();
        assert!((half.re - PI.sqrt()).abs() < 1e-14);
        assert!((half.re - 1.772_453_850_9).abs() < 1e-10);
        let five = complex_gamma(Complex64::new(5.0, 0.0)).unwrap();
        assert!((five.re - 24.0).abs() < 1e-12);
        let m_half = complex_gamma(Complex64::new(-0.5, 0.0)).unwrap();
        assert!((m_half.re + 2.0 * PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn poles_rejected() {
        assert!(complex_gamma(Complex64::new(0.0, 0.0)).is_err());
        assert!(complex_gamma(Complex64::new(-3.0, 0.0)).is_err());
        assert_eq!(recip_gamma(Complex64::new(-2.0, 0.0)), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn reflection_and_recurrence() {
        let z = Complex64::new(0.3, 2.1);
        let lhs = complex_gamma(z).unwrap() * complex_gamma(1.0 - z).unwrap();
        let rhs = PI / (PI * z).sin();
        assert!((lhs - rhs).norm() / rhs.norm() < 1e-13);
        let g = complex_gamma(z).unwrap();
        let g1 = complex_gamma(z + 1.0).unwrap();
        assert!((g1 - z * g).norm() / g1.norm() < 1e-13);
    }

    #[test]
    fn ln_gamma_large_imaginary_stays_finite() {
        let z = Complex64::new(-3.3, 400.0);
        let v = ln_gamma(z);
        assert!(v.re.is_finite() && v.im.is_finite());
        // Stirling: Re ln Γ(x+iy) ≈ (x − 1/2) ln|y| − π|y|/2 + ln √(2π)
        let approx = (z.re - 0.5) * 400f64.ln() - PI * 200.0 + HALF_LN_TWO_PI;
        assert!((v.re - approx).abs() < 1e-2);
    }
}
