//! Closed-form oracles on H³ and special-function spot values.

mod common;

use common::*;
use num_complex::Complex64;
use symheat::kernels::heat_kernel;
use symheat::specialfn::gamma::complex_gamma;
use symheat::specialfn::hypergeometric::gauss_2f1_neg_axis;
use symheat::specialfn::spherical::{c_function, plancherel_density, spherical_function};
use symheat::synthesis::{synthesize_points, Multiplier, Semigroup};
use symheat::transform::Grids;

#[test]
fn h3_spherical_function_matches_closed_form() {
    let s = h3();
    for lambda in [0.2, 1.0, 2.0, 5.0, 10.0] {
        for r in [0.1, 1.0, 3.0, 10.0] {
            let v = spherical_function(&s, Complex64::new(lambda, 0.0), r).unwrap();
            let exact = h3_phi(lambda, r);
            assert!((v.re - exact).abs() <= 1e-8 * exact.abs(), "lambda={lambda} r={r}: {} vs {exact}", v.re);
            assert!(v.im.abs() <= 1e-8 * exact.abs());
        }
    }
}

#[test]
fn h3_c_function_and_plancherel_density() {
    let s = h3();
    for lambda in [0.3, 1.0, 4.0] {
        let c = c_function(&s, Complex64::new(lambda, 0.0)).unwrap();
        let exact = Complex64::new(0.0, -1.0 / lambda);
        assert!((c - exact).norm() < 1e-12 * exact.norm());
        assert!((plancherel_density(&s, lambda) - lambda * lambda).abs() < 1e-12 * lambda * lambda);
    }
}

#[test]
fn h3_heat_kernel_on_default_grid() {
    let s = h3();
    let grids = Grids::defaults(&s, 1.0, 1.0, 1.0);
    let h = heat_kernel(&s, 1.0, &grids, &cal(&s)).unwrap();
    let g = grids.radial;
    let mut worst: f64 = 0.0;
    for i in 0..g.n_points() {
        let r = g.node(i);
        if (0.1..=10.0).contains(&r) {
            let exact = ln_h3_heat(1.0, r).exp();
            worst = worst.max((h.value(i) - exact).abs() / exact);
        }
    }
    assert!(worst <= 1e-5, "max relative error {worst:e}");
}

#[test]
fn h3_heat_kernel_far_out_and_long_times() {
    let s = h3();
    for t in [0.25, 4.0, 100.0] {
        let radii = [0.0, 2.0, 50.0, 400.0, 2000.0];
        let v = synthesize_points(&s, &cal(&s), &Multiplier::kernel(Semigroup::new(t, 1.0).unwrap()), &radii).unwrap();
        for (r, x) in radii.iter().zip(&v) {
            let d = (x.ln_abs() - ln_h3_heat(t, *r)).abs();
            assert!(d < 1e-8, "t={t} r={r}: ln difference {d:e}");
        }
    }
}

#[test]
fn h3_half_fractional_kernel_matches_subordinated_closed_form() {
    let s = h3();
    for t in [1.0, 40.0, 256.0] {
        let radii = [0.0, 1.0, 10.0, 100.0, 1e3, 1e5, 1e6];
        let m = Multiplier::kernel(Semigroup::new(t, 0.5).unwrap());
        let v = synthesize_points(&s, &cal(&s), &m, &radii).unwrap();
        for (r, x) in radii.iter().zip(&v) {
            let exact = ln_h3_half(t, *r);
            let d = (x.ln_abs() - exact).abs();
            assert!(x.re > 0.0);
            assert!(d < 5e-8 + 1e-13 * exact.abs(), "t={t} r={r}: ln difference {d:e}");
        }
    }
}

#[test]
fn gamma_and_hypergeometric_spot_values() {
    let g = complex_gamma(Complex64::new(0.5, 0.0)).unwrap();
    assert!((g.re - std::f64::consts::PI.sqrt()).abs() < 1e-14);
    let g = complex_gamma(Complex64::new(5.0, 0.0)).unwrap();
    assert!((g.re - 24.0).abs() < 1e-12);
    // |Γ(iy)|² = π / (y sinh πy)
    let y = 1.7;
    let g = complex_gamma(Complex64::new(0.0, y)).unwrap();
    let exact = std::f64::consts::PI / (y * (std::f64::consts::PI * y).sinh());
    assert!((g.norm_sqr() - exact).abs() < 1e-13 * exact);
    // ₂F₁(1, 1; 2; −x) = ln(1 + x)/x
    let one = Complex64::new(1.0, 0.0);
    for x in [0.3, 5.0, 1e4] {
        let v = gauss_2f1_neg_axis(one, one, Complex64::new(2.0, 0.0), -x).unwrap();
        assert!((v.re - (1.0 + x).ln() / x).abs() < 1e-13 * v.re.abs(), "x={x}");
    }
}
