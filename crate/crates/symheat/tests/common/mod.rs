#![allow(dead_code)]

use std::f64::consts::PI;
use std::sync::OnceLock;
use symheat::geometry::ln_two_sinh;
use symheat::transform::{calibrate, Calibration, Grids};
use symheat::RankOneSpace;

pub fn h3() -> RankOneSpace {
    RankOneSpace::preset("H3").unwrap()
}

pub fn ch2() -> RankOneSpace {
    RankOneSpace::preset("CH2").unwrap()
}

/// Calibration on the compact grids, computed once per test binary and space.
pub fn cal(space: &RankOneSpace) -> Calibration {
    static H3: OnceLock<Calibration> = OnceLock::new();
    static CH2: OnceLock<Calibration> = OnceLock::new();
    let cell = match (space.m_alpha(), space.m_2alpha()) {
        (2, 0) => &H3,
        (2, 1) => &CH2,
        _ => return calibrate(space, &Grids::calibration()).unwrap(),
    };
    *cell.get_or_init(|| calibrate(space, &Grids::calibration()).unwrap())
}

/// sin(λr)/(λ sinh r).
pub fn h3_phi(lambda: f64, r: f64) -> f64 {
    if r == 0.0 {
        1.0
    } else {
        (lambda * r).sin() / (lambda * r.sinh())
    }
}

fn ln_r_over_sinh(r: f64) -> f64 {
    if r == 0.0 {
        0.0
    } else {
        r.ln() - (ln_two_sinh(r) - std::f64::consts::LN_2)
    }
}

/// ln of the unit-mass H³ heat kernel for J = 4 sinh² r:
/// π (4πt)^{−3/2} e^{−t} (r/sinh r) e^{−r²/4t}.
pub fn ln_h3_heat(t: f64, r: f64) -> f64 {
    PI.ln() - 1.5 * (4.0 * PI * t).ln() - t + ln_r_over_sinh(r) - r * r / (4.0 * t)
}

/// ln(e^x K_ν(x)) from K_ν(x) = ∫₀^∞ e^{−x cosh u} cosh(νu) du by the trapezoid
/// rule, which converges geometrically for this integrand.
pub fn ln_scaled_bessel_k(nu: f64, x: f64) -> f64 {
    let h = (0.5 / x.sqrt()).min(0.05) / 4.0;
    let mut sum = 0.5;
    let mut k = 1;
    loop {
        let u = k as f64 * h;
        let e = -x * (u.cosh() - 1.0);
        if e < -745.0 {
            break;
        }
        sum += e.exp() * (nu * u).cosh();
        k += 1;
    }
    (sum * h).ln()
}

/// ln h_t^{1/2}(r) on H³ by subordination of the closed-form heat kernel:
/// ∫ η_t(u) h_u(r) du with η_t(u) = t/(2√π) u^{−3/2} e^{−t²/4u}, which gives
/// t/(2√π)·π(4π)^{−3/2}(r/sinh r)·(8/s²)K₂(s), s = √(t² + r²).
pub fn ln_h3_half(t: f64, r: f64) -> f64 {
    let s = t.hypot(r);
    (t / (2.0 * PI.sqrt())).ln() + PI.ln() - 1.5 * (4.0 * PI).ln() + ln_r_over_sinh(r) + 8f64.ln() - 2.0 * s.ln()
        + ln_scaled_bessel_k(2.0, s)
        - s
}
