//! Invariants checked on randomly drawn inputs.

mod common;

use common::*;
use proptest::prelude::*;
use std::f64::consts::PI;
use symheat::experiments::{format_float, least_squares, ExperimentReport};
use symheat::geometry::concentration_region;
use symheat::specialfn::gamma::complex_gamma;
use symheat::specialfn::spherical::{c_function, plancherel_density, spherical_function};
use symheat::testfn::TestFunction;
use symheat::transform::{lp_norm, RadialFunction, RadialGrid};
use symheat::{Complex64, LebesgueExponent, RankOneSpace};

fn space() -> impl Strategy<Value = RankOneSpace> {
    prop_oneof![
        Just(h3()),
        Just(ch2()),
        Just(RankOneSpace::preset("H2").unwrap()),
        Just(RankOneSpace::preset("HHn:2").unwrap()),
    ]
}

fn exponent() -> impl Strategy<Value = LebesgueExponent> {
    prop_oneof![(1.0f64..8.0).prop_map(|p| LebesgueExponent::new(p).unwrap()), Just(LebesgueExponent::infinity()),]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn spherical_function_is_even_and_bounded(s in space(), l in 0.0f64..20.0, r in 0.0f64..30.0) {
        let a = spherical_function(&s, Complex64::new(l, 0.0), r).unwrap();
        let b = spherical_function(&s, Complex64::new(-l, 0.0), r).unwrap();
        prop_assert!((a - b).norm() <= 1e-10 * (1.0 + a.norm()));
        prop_assert!(a.norm() <= 1.0 + 1e-10);
    }

    #[test]
    fn spherical_function_at_i_rho_is_one(s in space(), r in 0.0f64..30.0) {
        let v = spherical_function(&s, Complex64::new(0.0, s.rho()), r).unwrap();
        prop_assert!((v - 1.0).norm() < 1e-10, "{v}");
    }

    #[test]
    fn c_function_is_conjugate_symmetric(s in space(), l in 0.01f64..50.0) {
        let a = c_function(&s, Complex64::new(l, 0.0)).unwrap();
        let b = c_function(&s, Complex64::new(-l, 0.0)).unwrap();
        prop_assert!((a.conj() - b).norm() <= 1e-12 * a.norm());
        let d = plancherel_density(&s, l);
        prop_assert!(d > 0.0);
        prop_assert!((d - plancherel_density(&s, -l)).abs() <= 1e-12 * d);
        prop_assert!((d * a.norm_sqr() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn gamma_reflection(x in 0.05f64..0.95, y in -5.0f64..5.0) {
        let z = Complex64::new(x, y);
        let lhs = complex_gamma(z).unwrap() * complex_gamma(1.0 - z).unwrap();
        let rhs = PI / (z * PI).sin();
        prop_assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm());
    }

    #[test]
    fn exponent_identities(p in exponent()) {
        prop_assert!((1.0 / p.p() + p.inv_p_conj() - 1.0).abs() < 1e-15);
        if !p.is_infinite() && p.p() > 1.0 {
            prop_assert!((1.0 / p.p_conj() - p.inv_p_conj()).abs() < 1e-15);
        }
        prop_assert!((p.gamma_p() - (2.0 / p.p() - 1.0)).abs() < 1e-15);
        prop_assert!((-1.0..=1.0).contains(&p.gamma_p()));
        prop_assert_eq!(p.gamma_p() >= 0.0, p.p() <= 2.0);
    }

    #[test]
    fn lp_norm_is_absolutely_homogeneous(s in space(), p in exponent(), c in -50.0f64..50.0, w in 0.2f64..3.0) {
        let grid = RadialGrid::new(30.0, 3001).unwrap();
        let f = RadialFunction::from_fn(s, grid, |r| (-w * r * r).exp()).unwrap();
        let a = lp_norm(&f.scaled(c), p);
        let b = c.abs() * lp_norm(&f, p);
        prop_assert!((a - b).abs() <= 1e-12 * b.max(f64::MIN_POSITIVE));
    }

    #[test]
    fn concentration_region_brackets_the_center(
        s in space(),
        p in 1.01f64..1.99,
        t in 0.1f64..1e4,
        e in 0.51f64..0.99,
    ) {
        let p = LebesgueExponent::new(p).unwrap();
        let (lo, hi) = concentration_region(&s, p, t, e).unwrap();
        let center = 2.0 * t * p.gamma_p() * s.rho();
        prop_assert!(lo >= 0.0 && lo <= center && center < hi);
        prop_assert!((hi - center - t.powf(e)).abs() <= 1e-12 * hi);
    }

    #[test]
    fn concentration_region_rejects_bad_parameters(s in space(), p in 2.0f64..10.0, e in 1.0f64..3.0) {
        let q = LebesgueExponent::new(1.5).unwrap();
        prop_assert!(concentration_region(&s, LebesgueExponent::new(p).unwrap(), 1.0, 0.75).is_err());
        prop_assert!(concentration_region(&s, q, 1.0, e).is_err());
        prop_assert!(concentration_region(&s, q, 1.0, 1.0 - e / 2.0).is_err());
        prop_assert!(concentration_region(&s, q, -1.0, 0.75).is_err());
    }

    #[test]
    fn test_functions_round_trip_through_text(
        kind in 0usize..3,
        a in 1e-3f64..1e3,
        b in 1e-3f64..1e3,
    ) {
        let f = match kind {
            0 => TestFunction::heat(a),
            1 => TestFunction::ball(a),
            _ => TestFunction::trunc_exp(b, a),
        }
        .unwrap();
        prop_assert_eq!(TestFunction::parse(&f.to_string()).unwrap(), f);
    }

    #[test]
    fn format_float_round_trips(v in any::<f64>().prop_filter("finite", |v| v.is_finite())) {
        let back: f64 = format_float(v).parse().unwrap();
        prop_assert_eq!(back, if v == 0.0 { 0.0 } else { v });
    }

    #[test]
    fn reports_sort_by_their_keys(rows in prop::collection::vec((0u8..4, 0u8..4, -1e3f64..1e3), 0..40)) {
        let mut r = ExperimentReport::new("probe", &h3(), &["a", "b"], &["v"]);
        for (a, b, v) in &rows {
            r.push(vec![*a as f64, *b as f64, *v]).unwrap();
        }
        r.sort_rows();
        prop_assert!(r.rows.windows(2).all(|w| (w[0][0], w[0][1]) <= (w[1][0], w[1][1])));
        let csv = r.to_csv();
        prop_assert_eq!(csv.lines().count(), rows.len() + 1);
        prop_assert!(csv.lines().skip(1).all(|l| l.split(',').count() == 3));
        prop_assert!(csv.ends_with('\n') && !csv.contains('\r'));
        prop_assert!(r.push(vec![0.0, 0.0, f64::NAN]).is_err());
        prop_assert!(r.push(vec![0.0, 0.0, f64::INFINITY]).is_err());
        prop_assert!(r.push(vec![f64::INFINITY, 0.0, 1.0]).is_ok());
    }

    #[test]
    fn least_squares_recovers_a_line(a in -10.0f64..10.0, b in -10.0f64..10.0, n in 3usize..20) {
        let xs: Vec<f64> = (0..n).map(|k| (k as f64 + 1.0).ln()).collect();
        let rows: Vec<Vec<f64>> = xs.iter().map(|x| vec![1.0, *x]).collect();
        let y: Vec<f64> = xs.iter().map(|x| a + b * x).collect();
        let c = least_squares(&rows, &y).unwrap();
        prop_assert!((c[0] - a).abs() < 1e-9 && (c[1] - b).abs() < 1e-9, "{c:?}");
    }
}
