//! Runs one configured experiment and assembles its reports.

use num_complex::Complex64;
use rayon::prelude::*;
use symheat::experiments::{
    ball_norm_slope, check_coverage, concentration_envelope, concentration_mass, format_float, heat_norm_exponent_fit,
    ln_ball_volume, sharpness_rate, theorem_constant, BallPair, ConvolutionPair, ExperimentReport,
};
use symheat::specialfn::spherical::{plancherel_density, spherical_function};
use symheat::synthesis::{synthesize_points, Multiplier, Semigroup};
use symheat::testfn::TestFunction;
use symheat::transform::{calibrate, Calibration, RadialGrid, DEFAULT_N_R};
use symheat::LebesgueExponent;

use crate::config::{CalibrationMode, Experiment, RunConfig, ZChoice};
use crate::error::CliError;
use crate::output::{Output, PlotSpec};

type Result<T> = std::result::Result<T, CliError>;

/// The inversion constant for a run.
pub fn calibration_for(cfg: &RunConfig) -> Result<Calibration> {
    Ok(match cfg.calibration {
        CalibrationMode::Auto => calibrate(&cfg.space, &cfg.grids.calibration_grids()?)?,
        CalibrationMode::Full => calibrate(&cfg.space, &cfg.grids.grids(&cfg.space, 1.0)?)?,
        CalibrationMode::Fixed(c) => Calibration::fixed(c),
    })
}

/// Computes every report of the configured experiment.
pub fn run_experiment(cfg: &RunConfig) -> Result<Vec<Output>> {
    if cfg.experiment == Experiment::Spherical {
        return Ok(vec![spherical(cfg)?]);
    }
    let cal = calibration_for(cfg)?;
    let mut outputs = match cfg.experiment {
        Experiment::Heat => vec![heat(cfg, &cal)?],
        Experiment::Ratio => vec![ratio(cfg, &cal)?],
        Experiment::Extremizer => vec![extremizer(cfg, &cal)?],
        Experiment::Concentration => vec![concentration(cfg, &cal)?],
        Experiment::Sharpness => vec![sharpness(cfg, &cal)?],
        Experiment::Ball => ball(cfg, &cal)?,
        Experiment::Normfit => vec![normfit(cfg, &cal)?],
        Experiment::Spherical | Experiment::Selftest => {
            unreachable!("handled before calibration")
        }
    };
    for o in &mut outputs {
        o.report.meta("space_preset", &cfg.space_label);
        o.report.meta("inversion_constant", format_float(cal.inversion_constant));
        o.report.meta("calibration_residual", format_float(cal.residual));
        o.report.sort_rows();
    }
    Ok(outputs)
}

fn plot(x: &'static str, y: &'static str, group: &[&'static str], log_y: bool) -> PlotSpec {
    PlotSpec { x, y, group: group.to_vec(), log_y }
}

fn spherical(cfg: &RunConfig) -> Result<Output> {
    let s = &cfg.space;
    let mut rep = ExperimentReport::new("spherical", s, &["lambda", "r"], &["phi_re", "phi_im", "plancherel"]);
    for &l in &cfg.lambda {
        let density = plancherel_density(s, l);
        for &r in &cfg.r {
            let phi = spherical_function(s, Complex64::new(l, 0.0), r)?;
            rep.push(vec![l, r, phi.re, phi.im, density])?;
        }
    }
    rep.meta("space_preset", &cfg.space_label);
    rep.sort_rows();
    Ok(Output { report: rep, plot: plot("r", "phi_re", &["lambda"], false) })
}

// Every (t, α) pair of the config, in config order.
fn time_alpha_pairs(cfg: &RunConfig) -> Vec<(f64, f64)> {
    cfg.t.iter().flat_map(|&t| cfg.alpha.iter().map(move |&a| (t, a))).collect()
}

fn heat(cfg: &RunConfig, cal: &Calibration) -> Result<Output> {
    let s = &cfg.space;
    let rows: Vec<Vec<Vec<f64>>> = time_alpha_pairs(cfg)
        .into_par_iter()
        .map(|(t, alpha)| -> Result<Vec<Vec<f64>>> {
            let m = Multiplier::kernel(Semigroup::new(t, alpha)?);
            let vals = synthesize_points(s, cal, &m, &cfg.r)?;
            Ok(cfg.r.iter().zip(&vals).map(|(&r, v)| vec![t, alpha, r, v.value().re, v.ln_abs()]).collect())
        })
        .collect::<Result<_>>()?;
    let mut rep = ExperimentReport::new("heat", s, &["t", "alpha", "r"], &["value", "ln_abs_value"]);
    for row in rows.into_iter().flatten() {
        rep.push(row)?;
    }
    Ok(Output { report: rep, plot: plot("r", "value", &["t", "alpha"], true) })
}

fn pick_z(choice: ZChoice, zeta: Complex64) -> Complex64 {
    match choice {
        ZChoice::Theorem => zeta,
        ZChoice::Fixed(z) => z,
        ZChoice::Offset(o) => zeta + o,
    }
}

fn ratio(cfg: &RunConfig, cal: &Calibration) -> Result<Output> {
    let s = &cfg.space;
    let rows: Vec<Vec<Vec<f64>>> = time_alpha_pairs(cfg)
        .into_par_iter()
        .map(|(t, alpha)| -> Result<Vec<Vec<f64>>> {
            let grids = cfg.grids.grids(s, t)?;
            for &p in &cfg.p {
                check_coverage(s, p, t, &grids.radial)?;
            }
            let pair = ConvolutionPair::new(s, cfg.f, Semigroup::new(t, alpha)?, &grids.radial, cal)?;
            cfg.p
                .iter()
                .map(|&p| {
                    let z = pick_z(cfg.z, pair.zeta(p)?);
                    let ln_norm = pair.ln_kernel_norm(p)?;
                    let ratio = (pair.ln_residual_norm(p, z)? - ln_norm).exp();
                    Ok(vec![t, p.p(), alpha, z.re, z.im, ratio, ln_norm.exp()])
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let mut rep = ExperimentReport::new("ratio", s, &["t", "p", "alpha"], &["zeta_re", "zeta_im", "ratio", "norm_ht"]);
    for row in rows.into_iter().flatten() {
        rep.push(row)?;
    }
    rep.meta("f", cfg.f);
    Ok(Output { report: rep, plot: plot("t", "ratio", &["p", "alpha"], true) })
}

fn extremizer(cfg: &RunConfig, cal: &Calibration) -> Result<Output> {
    let s = &cfg.space;
    let rows: Vec<Vec<Vec<f64>>> = time_alpha_pairs(cfg)
        .into_par_iter()
        .map(|(t, alpha)| -> Result<Vec<Vec<f64>>> {
            let grids = cfg.grids.grids(s, t)?;
            for &p in &cfg.p {
                check_coverage(s, p, t, &grids.radial)?;
            }
            let pair = ConvolutionPair::new(s, cfg.f, Semigroup::new(t, alpha)?, &grids.radial, cal)?;
            cfg.p
                .iter()
                .map(|&p| {
                    let zeta = theorem_constant(s, &cfg.f, p)?.re;
                    let value = (pair.ln_convolved_norm(p)? - pair.ln_kernel_norm(p)?).exp();
                    Ok(vec![p.p(), alpha, t, zeta, value, zeta - value])
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let mut rep = ExperimentReport::new("extremizer", s, &["p", "alpha", "t"], &["zeta", "value", "gap"]);
    for row in rows.into_iter().flatten() {
        rep.push(row)?;
    }
    rep.meta("f", cfg.f);
    Ok(Output { report: rep, plot: plot("t", "value", &["p", "alpha"], false) })
}

fn concentration(cfg: &RunConfig, cal: &Calibration) -> Result<Output> {
    let s = &cfg.space;
    let e = cfg.radius_exponent;
    let mut rep = ExperimentReport::new("concentration", s, &["p", "t"], &["tail", "envelope"]);
    for &p in &cfg.p {
        let tails: Vec<f64> = cfg
            .t
            .par_iter()
            .map(|&t| Ok(concentration_mass(s, p, t, e, &cfg.grids.grids(s, t)?, cal)?))
            .collect::<Result<_>>()?;
        let ladder: Vec<(f64, f64)> = cfg.t.iter().cloned().zip(tails).collect();
        let (c, holds) = concentration_envelope(&ladder, e);
        for &(t, m) in &ladder {
            rep.push(vec![p.p(), t, m, c * (t.sqrt() / t.powf(e)).powi(2)])?;
        }
        rep.meta(&format!("envelope_constant_p={p}"), format_float(c));
        rep.meta(&format!("envelope_holds_p={p}"), holds);
    }
    rep.meta("radius_exponent", e);
    Ok(Output { report: rep, plot: plot("t", "tail", &["p"], true) })
}

fn sharpness(cfg: &RunConfig, cal: &Calibration) -> Result<Output> {
    let s = &cfg.space;
    let ratios = sharpness_rate(s, &cfg.t, 0.0, &cfg.grids, cal)?;
    let mut rep = ExperimentReport::new("sharpness", s, &["theta", "t"], &["ratio", "scaled"]);
    for &theta in &cfg.theta {
        for (&t, &r) in cfg.t.iter().zip(&ratios) {
            rep.push(vec![theta, t, r, t.powf(theta) * r])?;
        }
    }
    Ok(Output { report: rep, plot: plot("t", "scaled", &["theta"], false) })
}

// Ball radii r need r + 12√s + 4 inside the grid for f = h_s.
fn ball_grid(cfg: &RunConfig) -> Result<RadialGrid> {
    let s = match cfg.f {
        TestFunction::Heat { s } => s,
        _ => 0.0,
    };
    let r_top = cfg.r.iter().cloned().fold(0.0, f64::max);
    let r_max = cfg.grids.r_max.unwrap_or_else(|| 40f64.max(r_top + 12.0 * s.sqrt() + 8.0));
    Ok(RadialGrid::new(r_max, cfg.grids.n_r.unwrap_or(DEFAULT_N_R))?)
}

// z = f̂(0) and z = f̂(iγ_pρ) unless the config fixes or offsets z.
fn ball_candidates(cfg: &RunConfig, p: LebesgueExponent) -> Result<Vec<Complex64>> {
    let s = &cfg.space;
    let zeta = theorem_constant(s, &cfg.f, p)?;
    Ok(match cfg.z {
        ZChoice::Theorem => {
            let origin = cfg.f.transform(s, Complex64::new(0.0, 0.0))?;
            if origin == zeta {
                vec![zeta]
            } else {
                vec![origin, zeta]
            }
        }
        other => vec![pick_z(other, zeta)],
    })
}

fn ball(cfg: &RunConfig, cal: &Calibration) -> Result<Vec<Output>> {
    let s = &cfg.space;
    let grid = ball_grid(cfg)?;
    let one = LebesgueExponent::new(1.0)?;
    let pairs: Vec<BallPair> =
        cfg.r.par_iter().map(|&r| Ok(BallPair::new(s, &cfg.f, r, &grid, cal)?)).collect::<Result<_>>()?;

    let mut rep = ExperimentReport::new("ball", s, &["p", "z_re", "z_im", "r"], &["ratio", "ln_ball_norm"]);
    let mut slopes = ExperimentReport::new("ball_slope", s, &["p"], &["slope", "slope_expected"]);
    for &p in &cfg.p {
        for z in ball_candidates(cfg, p)? {
            for (&r, pair) in cfg.r.iter().zip(&pairs) {
                let ln_norm = -p.inv_p_conj() * ln_ball_volume(s, r)?;
                rep.push(vec![p.p(), z.re, z.im, r, pair.ratio(p, z)?, ln_norm])?;
            }
        }
        if cfg.r.len() >= 2 {
            let slope = ball_norm_slope(s, p, &cfg.r, &grid)?;
            slopes.push(vec![p.p(), slope, -2.0 * s.rho() * p.inv_p_conj()])?;
        }
    }

    let mut witness = ExperimentReport::new("ball_witness", s, &["z_re", "z_im", "a", "r"], &["lower", "norm1"]);
    for z in ball_candidates(cfg, one)? {
        for &a in &cfg.a {
            for (&r, pair) in cfg.r.iter().zip(&pairs) {
                let (lower, norm1) = pair.witness(a, z)?;
                witness.push(vec![z.re, z.im, a, r, lower, norm1])?;
            }
        }
    }

    for r in [&mut rep, &mut slopes, &mut witness] {
        r.meta("f", cfg.f);
        r.meta("r_max", grid.r_max());
        r.meta("n_r", grid.n_points());
    }
    let mut out = vec![
        Output { report: rep, plot: plot("r", "ratio", &["p", "z_re", "z_im"], true) },
        Output { report: witness, plot: plot("r", "norm1", &["z_re", "z_im", "a"], true) },
    ];
    if !slopes.rows.is_empty() {
        out.push(Output { report: slopes, plot: plot("p", "slope", &[], false) });
    }
    Ok(out)
}

fn normfit(cfg: &RunConfig, cal: &Calibration) -> Result<Output> {
    let s = &cfg.space;
    let mut rep =
        ExperimentReport::new("normfit", s, &["p", "alpha"], &["slope", "slope_expected", "rate", "rate_expected"]);
    for &alpha in &cfg.alpha {
        for fit in heat_norm_exponent_fit(s, &cfg.p, &cfg.t, alpha, &cfg.grids, cal)? {
            rep.push(vec![fit.p, fit.alpha, fit.slope, fit.slope_expected, fit.rate, fit.rate_expected])?;
        }
    }
    let ladder: Vec<String> = cfg.t.iter().map(|t| t.to_string()).collect();
    rep.meta("t_ladder", ladder.join(","));
    Ok(Output { report: rep, plot: plot("p", "slope", &["alpha"], false) })
}
