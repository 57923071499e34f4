//! Heat, fractional heat, subordinator and ball kernels.

mod common;

use common::*;
use symheat::experiments::ball_norm_slope;
use symheat::kernels::{
    ball_kernel, ball_volume, frac_heat_kernel, heat_kernel, heat_profile, ln_heat_envelope, subordinator_envelope,
    subordinator_half, subordinator_laplace, KernelSpec,
};
use symheat::specialfn::spherical::ball_integral;
use symheat::synthesis::{synthesize_points, Multiplier, Semigroup};
use symheat::transform::{convolve, inverse_at, lp_norm, Grids, RadialGrid, SpectralFunction, SpectralGrid};
use symheat::{Complex64, LebesgueExponent};

fn p(v: f64) -> LebesgueExponent {
    LebesgueExponent::new(v).unwrap()
}

#[test]
fn heat_mass_is_one() {
    for s in [h3(), ch2()] {
        let g = Grids::defaults(&s, 1.0, 1.0, 10.0);
        for t in [1.0, 10.0] {
            let h = heat_kernel(&s, t, &g, &cal(&s)).unwrap();
            let mass = lp_norm(&h, p(1.0));
            assert!((mass - 1.0).abs() < 1e-5, "{s} t={t}: {mass}");
        }
    }
}

#[test]
fn heat_kernel_is_positive_and_decreasing() {
    for s in [h3(), ch2()] {
        let grid = RadialGrid::default_for(&s, 1.0, 20.0);
        for t in [1.0, 5.0, 20.0] {
            let h = heat_profile(&s, t, &grid, &cal(&s)).unwrap();
            let pts = h.points();
            assert!(pts.iter().all(|x| x.re > 0.0), "{s} t={t}");
            assert!(pts.windows(2).all(|w| w[1].ln_abs() < w[0].ln_abs()), "{s} t={t}");
        }
    }
}

#[test]
fn heat_kernel_within_its_global_envelope() {
    for s in [h3(), ch2()] {
        let radii: Vec<f64> = (1..=40).map(|k| k as f64 * 0.5).collect();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for t in [1.0, 5.0, 20.0] {
            let m = Multiplier::kernel(Semigroup::new(t, 1.0).unwrap());
            let v = synthesize_points(&s, &cal(&s), &m, &radii).unwrap();
            for (r, x) in radii.iter().zip(&v) {
                let d = x.ln_abs() - ln_heat_envelope(&s, t, *r);
                lo = lo.min(d);
                hi = hi.max(d);
            }
        }
        assert!(hi - lo < 3.0, "{s}: ln ratio spans [{lo}, {hi}]");
    }
}

#[test]
fn fractional_mass_and_semigroup() {
    let s = h3();
    let g = Grids { radial: RadialGrid::new(60.0, 8193).unwrap(), spectral: SpectralGrid::new(60.0, 3073).unwrap() };
    let c = cal(&s);
    let h1 = frac_heat_kernel(&s, 1.0, 0.5, &g, &c).unwrap();
    let h2 = frac_heat_kernel(&s, 2.0, 0.5, &g, &c).unwrap();
    let h3_ = frac_heat_kernel(&s, 3.0, 0.5, &g, &c).unwrap();
    assert!(h1.values().iter().all(|&x| x > 0.0));
    let conv = convolve(&h1, &h2, &g.spectral, &c).unwrap();
    let worst = (0..g.radial.n_points())
        .filter(|&i| g.radial.node(i) <= 10.0)
        .map(|i| (conv.value(i) - h3_.value(i)).abs() / h3_.value(i))
        .fold(0.0, f64::max);
    assert!(worst < 1e-4, "semigroup error {worst:e}");
}

#[test]
fn fractional_kernel_tends_to_heat_kernel() {
    let s = h3();
    let g = Grids::calibration();
    let h = heat_kernel(&s, 1.0, &g, &cal(&s)).unwrap();
    let f = frac_heat_kernel(&s, 1.0, 0.999, &g, &cal(&s)).unwrap();
    let worst = (0..g.radial.n_points())
        .filter(|&i| g.radial.node(i) <= 5.0)
        .map(|i| (f.value(i) - h.value(i)).abs() / h.value(i))
        .fold(0.0, f64::max);
    assert!(worst < 1e-2, "{worst:e}");
}

#[test]
fn fractional_synthesis_matches_real_axis_inversion() {
    // α near 1 and large t stress the contour quadrature hardest
    let radii = [1.0, 2.0, 2.5, 3.0, 4.0, 5.0];
    let sg = SpectralGrid::new(60.0, 12001).unwrap();
    for s in [h3(), ch2()] {
        let rho2 = s.rho() * s.rho();
        for alpha in [0.5, 0.75, 0.9, 0.999] {
            for t in [1.0, 3.0, 10.0] {
                let m =
                    SpectralFunction::from_fn(s, sg, |l| Complex64::new((-t * (l * l + rho2).powf(alpha)).exp(), 0.0))
                        .unwrap();
                let direct = inverse_at(&m, &radii, &cal(&s)).unwrap();
                let mult = Multiplier::kernel(Semigroup::new(t, alpha).unwrap());
                let synth = synthesize_points(&s, &cal(&s), &mult, &radii).unwrap();
                for (k, r) in radii.iter().enumerate() {
                    let e = (synth[k].value().re - direct[k]).abs() / direct[k];
                    assert!(e < 1e-8, "{s} alpha={alpha} t={t} r={r}: {e:e}");
                }
            }
        }
    }
}

#[test]
fn kernel_specs_validate() {
    assert!(KernelSpec::fractional(1.0, 1.0).is_err());
    assert!(KernelSpec::fractional(1.0, 0.0).is_err());
    assert!(KernelSpec::heat(0.0).is_err());
    assert!(KernelSpec::ball(-1.0).is_err());
    assert_eq!(KernelSpec::fractional(2.0, 0.5).unwrap().to_string(), "fractional(t=2, alpha=0.5)");
}

#[test]
fn subordinator_identities() {
    assert!((subordinator_laplace(1.0, 4.0) - (-2.0f64).exp()).abs() < 1e-6);
    assert!((subordinator_laplace(3.0, 0.0) - 1.0).abs() < 1e-5);
    let t = 2.0;
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    for k in 0..=80 {
        let u = t * t / 100.0 * 10f64.powf(k as f64 / 20.0);
        let q = subordinator_half(t, u) / subordinator_envelope(t, 0.5, u);
        lo = lo.min(q);
        hi = hi.max(q);
    }
    assert!(lo > 0.0 && hi / lo < 10.0, "bracket [{lo}, {hi}]");
}

#[test]
fn ball_kernel_mass_sup_and_norm_slopes() {
    let grid = RadialGrid::new(40.0, 8192).unwrap();
    for s in [h3(), ch2()] {
        let m = ball_kernel(&s, 5.0, &grid).unwrap();
        assert!((lp_norm(&m, p(1.0)) - 1.0).abs() < 1e-6);
        let vol = ball_volume(&s, 5.0).unwrap();
        assert!((lp_norm(&m, LebesgueExponent::infinity()) * vol - 1.0).abs() < 1e-12);
        for q in [1.5, 2.0, 4.0] {
            let slope = ball_norm_slope(&s, p(q), &[5.0, 10.0, 20.0], &grid).unwrap();
            let expected = -2.0 * s.rho() / p(q).p_conj();
            assert!((slope / expected - 1.0).abs() < 0.05, "{s} p={q}: {slope} vs {expected}");
        }
    }
}

#[test]
fn ball_transform_follows_jacobi_asymptotics() {
    let lambda = Complex64::new(1.0, -0.3);
    for s in [h3(), ch2()] {
        let rho = s.rho();
        let psi: Vec<Complex64> = [10.0, 15.0, 20.0]
            .iter()
            .map(|&r| {
                let m_hat = ball_integral(&s, lambda, r).unwrap() / ball_volume(&s, r).unwrap();
                (-(Complex64::i() * lambda - rho) * r).exp() * m_hat
            })
            .collect();
        assert!(psi[2].norm() > 1e-3);
        for w in psi.windows(2) {
            assert!((w[1] - w[0]).norm() < 0.05 * w[1].norm(), "{s}: {w:?}");
        }
    }
}
