//! Quick invariant suite run by the `selftest` subcommand.

use num_complex::Complex64;
use symheat::experiments::{p2_spectral_ratio, theorem_ratio, ConvolutionPair};
use symheat::kernels::{heat_kernel, subordination_crosscheck};
use symheat::specialfn::spherical::{c_function, plancherel_density, spherical_function};
use symheat::synthesis::Semigroup;
use symheat::testfn::TestFunction;
use symheat::transform::{
    abel_transform_oracle, convolve, inverse_transform, spherical_transform, Calibration, Grids, RadialGrid,
};
use symheat::{LebesgueExponent, RankOneSpace};

use crate::config::RunConfig;
use crate::runner::calibration_for;

/// Outcome of one invariant.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

type Outcome = symheat::Result<(bool, String)>;

fn within(name: &str, err: f64, tol: f64) -> (bool, String) {
    (err <= tol, format!("{name} = {err:.3e} (tolerance {tol:.0e})"))
}

const LAMBDAS: [f64; 5] = [0.2, 1.0, 2.0, 5.0, 10.0];
const RADII: [f64; 4] = [0.1, 1.0, 3.0, 10.0];

/// Runs every invariant on the configured space.
pub fn run_selftest(cfg: &RunConfig) -> Vec<Check> {
    let s = cfg.space;
    let mut out = Vec::new();
    let mut record = |name: &'static str, o: Outcome| {
        let (passed, detail) = o.unwrap_or_else(|e| (false, e.to_string()));
        out.push(Check { name, passed, detail });
    };

    record("phi_even_in_lambda", phi_even(&s));
    record("phi_bounded_by_one", phi_bounded(&s));
    record("phi_one_at_i_rho", phi_trivial(&s));
    record("c_function_reflection", c_reflection(&s));
    record("plancherel_density_positive_even", plancherel_even(&s));

    let cal = match calibration_for(cfg) {
        Ok(c) => {
            record("calibration_residual", Ok(within("residual", c.residual, 1e-6)));
            c
        }
        Err(e) => {
            record("calibration_residual", Ok((false, e.to_string())));
            return out;
        }
    };
    let grids = Grids::calibration();
    record("heat_mass_one", heat_mass(&s, &cal));
    record("round_trip", round_trip(&s, &Grids::defaults(&s, 1.0, 1.0, 1.0), &cal));
    record("heat_semigroup", semigroup(&s, &grids, &cal));
    record("abel_cross_check", abel(&s, &grids, &cal));
    record("spatial_vs_spectral_p2", spatial_spectral(&s, &cal));
    record("ratio_homogeneity", scale_invariance(&s, &cal));
    record("subordination_half", subordination(&s, &grids, &cal));
    out
}

fn phi_even(s: &RankOneSpace) -> Outcome {
    let mut worst: f64 = 0.0;
    for l in LAMBDAS {
        for r in RADII {
            let a = spherical_function(s, Complex64::new(l, 0.0), r)?;
            let b = spherical_function(s, Complex64::new(-l, 0.0), r)?;
            worst = worst.max((a - b).norm() / a.norm().max(1e-300));
        }
    }
    Ok(within("max relative |phi(l) - phi(-l)|", worst, 1e-10))
}

fn phi_bounded(s: &RankOneSpace) -> Outcome {
    let mut worst: f64 = 0.0;
    for l in LAMBDAS {
        for r in RADII {
            worst = worst.max(spherical_function(s, Complex64::new(l, 0.0), r)?.norm());
        }
    }
    Ok((worst <= 1.0 + 1e-12, format!("max |phi| = {worst:.15}")))
}

fn phi_trivial(s: &RankOneSpace) -> Outcome {
    let mut worst: f64 = 0.0;
    for r in RADII {
        worst = worst.max((spherical_function(s, Complex64::new(0.0, s.rho()), r)? - 1.0).norm());
    }
    Ok(within("max |phi_{i rho} - 1|", worst, 1e-10))
}

fn c_reflection(s: &RankOneSpace) -> Outcome {
    let mut worst: f64 = 0.0;
    for l in LAMBDAS {
        let a = c_function(s, Complex64::new(l, 0.0))?;
        let b = c_function(s, Complex64::new(-l, 0.0))?;
        worst = worst.max((a.conj() - b).norm() / a.norm());
    }
    Ok(within("max relative |conj c(l) - c(-l)|", worst, 1e-12))
}

fn plancherel_even(s: &RankOneSpace) -> Outcome {
    let ok = LAMBDAS.iter().all(|&l| {
        let d = plancherel_density(s, l);
        d > 0.0 && (d - plancherel_density(s, -l)).abs() <= 1e-12 * d
    });
    Ok((ok, "density positive and even on the probe set".into()))
}

fn heat_mass(s: &RankOneSpace, cal: &Calibration) -> Outcome {
    let grid = RadialGrid::default_for(s, 1.0, 1.0);
    let mut worst: f64 = 0.0;
    for alpha in [1.0, 0.5] {
        let pair = ConvolutionPair::new(s, TestFunction::heat(1.0)?, Semigroup::new(1.0, alpha)?, &grid, cal)?;
        let mass = pair.ln_kernel_norm(LebesgueExponent::new(1.0)?)?.exp();
        worst = worst.max((mass - 1.0).abs());
    }
    Ok(within("max |mass - 1| at t = 1, alpha in {1, 1/2}", worst, 1e-4))
}

fn round_trip(s: &RankOneSpace, g: &Grids, cal: &Calibration) -> Outcome {
    let h = heat_kernel(s, 1.0, g, cal)?;
    let back = inverse_transform(&spherical_transform(&h, &g.spectral, 0.0)?, &g.radial, cal)?;
    let worst = (0..g.radial.n_points())
        .filter(|&i| g.radial.node(i) <= 10.0)
        .map(|i| (back.value(i) - h.value(i)).abs() / h.value(i).abs())
        .fold(0.0, f64::max);
    Ok(within("max relative error on [0, 10]", worst, 1e-5))
}

fn semigroup(s: &RankOneSpace, g: &Grids, cal: &Calibration) -> Outcome {
    let h1 = heat_kernel(s, 1.0, g, cal)?;
    let h2 = heat_kernel(s, 2.0, g, cal)?;
    let conv = convolve(&h1, &h1, &g.spectral, cal)?;
    let worst = (0..g.radial.n_points())
        .filter(|&i| g.radial.node(i) <= 10.0)
        .map(|i| (conv.value(i) - h2.value(i)).abs() / h2.value(i).abs())
        .fold(0.0, f64::max);
    Ok(within("max relative |h1*h1 - h2| on [0, 10]", worst, 1e-4))
}

fn abel(s: &RankOneSpace, g: &Grids, cal: &Calibration) -> Outcome {
    let h = heat_kernel(s, 1.0, g, cal)?;
    let check = abel_transform_oracle(&h, 1.0, &[0.0, 1.0, 2.0], &[0.0, 0.5, 1.0, 2.0, 4.0])?;
    let scale = (-s.rho() * s.rho()).exp();
    Ok(within("max |F(A h) - h^| / h^(0)", check.max_abs_error / scale, 1e-5))
}

fn spatial_spectral(s: &RankOneSpace, cal: &Calibration) -> Outcome {
    let f = TestFunction::heat(1.0)?;
    let p = LebesgueExponent::new(2.0)?;
    let z = f.transform(s, Complex64::new(0.0, 0.0))?;
    let t = 10.0;
    let grids = symheat::experiments::experiment_grids(s, t);
    let a = theorem_ratio(s, &f, p, t, 1.0, Some(z), &grids, cal)?;
    let b = p2_spectral_ratio(s, &f, t, 1.0, z)?;
    Ok(within("relative difference at t = 10", (a - b).abs() / b, 1e-3))
}

fn scale_invariance(s: &RankOneSpace, cal: &Calibration) -> Outcome {
    let f = TestFunction::heat(1.0)?;
    let t = 5.0;
    let grid = symheat::experiments::experiment_grids(s, t).radial;
    let pair = ConvolutionPair::new(s, f, Semigroup::new(t, 1.0)?, &grid, cal)?;
    let c = 3.7;
    let scaled = pair.scaled(c)?;
    let mut worst: f64 = 0.0;
    for p in [1.0, 1.5, 2.0, 4.0] {
        let p = LebesgueExponent::new(p)?;
        let z = pair.zeta(p)? + 0.1;
        let a = pair.ratio(p, Some(z))?;
        let b = scaled.ratio(p, Some(z * c))? / c;
        worst = worst.max((a - b).abs() / a);
    }
    Ok(within("max relative |ratio(c f, c z)/c - ratio(f, z)|", worst, 1e-10))
}

fn subordination(s: &RankOneSpace, g: &Grids, cal: &Calibration) -> Outcome {
    let err = subordination_crosscheck(s, 1.0, g, cal)?;
    Ok(within("max relative error on [0, 8] at t = 1", err, 1e-3))
}
