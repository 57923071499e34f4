//! Flat `key = value` run configuration with per-experiment defaults and
//! validation against each experiment's preconditions.

use num_complex::Complex64;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use symheat::experiments::GridPolicy;
use symheat::testfn::TestFunction;
use symheat::{LebesgueExponent, RankOneSpace};

use crate::error::CliError;

/// One experiment per subcommand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Experiment {
    Spherical,
    Heat,
    Ratio,
    Extremizer,
    Concentration,
    Sharpness,
    Ball,
    Normfit,
    Selftest,
}

impl Experiment {
    pub const ALL: [Experiment; 9] = [
        Self::Spherical,
        Self::Heat,
        Self::Ratio,
        Self::Extremizer,
        Self::Concentration,
        Self::Sharpness,
        Self::Ball,
        Self::Normfit,
        Self::Selftest,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Spherical => "spherical",
            Self::Heat => "heat",
            Self::Ratio => "ratio",
            Self::Extremizer => "extremizer",
            Self::Concentration => "concentration",
            Self::Sharpness => "sharpness",
            Self::Ball => "ball",
            Self::Normfit => "normfit",
            Self::Selftest => "selftest",
        }
    }

    /// Experiment-specific keys accepted in the config.
    fn keys(&self) -> &'static [&'static str] {
        match self {
            Self::Spherical => &["lambda", "r"],
            Self::Heat => &["t", "alpha", "r"],
            Self::Ratio => &["f", "p", "t", "alpha", "z", "z_offset"],
            Self::Extremizer => &["f", "p", "t", "alpha"],
            Self::Concentration => &["p", "t", "radius_exponent"],
            Self::Sharpness => &["t", "theta"],
            Self::Ball => &["f", "p", "r", "z", "z_offset", "a"],
            Self::Normfit => &["p", "t", "alpha"],
            Self::Selftest => &[],
        }
    }
}

impl FromStr for Experiment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL.into_iter().find(|e| e.name() == s).ok_or_else(|| {
            let names: Vec<&str> = Self::ALL.iter().map(|e| e.name()).collect();
            format!("unknown experiment '{s}' (expected one of {})", names.join(", "))
        })
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The complex constant subtracted in the ratio experiments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ZChoice {
    /// The theorem's constant for each p.
    Theorem,
    /// A fixed value for every p.
    Fixed(Complex64),
    /// The theorem's constant plus an offset.
    Offset(Complex64),
}

/// How the inversion constant is obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CalibrationMode {
    /// Calibrate on compact grids.
    Auto,
    /// Calibrate on the default experiment grids at t = 1.
    Full,
    /// Use the given constant.
    Fixed(f64),
}

/// A validated run configuration with every default filled in.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub space: RankOneSpace,
    pub space_label: String,
    pub f: TestFunction,
    pub p: Vec<LebesgueExponent>,
    pub t: Vec<f64>,
    pub r: Vec<f64>,
    pub alpha: Vec<f64>,
    pub lambda: Vec<f64>,
    pub z: ZChoice,
    pub radius_exponent: f64,
    pub theta: Vec<f64>,
    pub a: Vec<f64>,
    pub grids: GridPolicy,
    pub calibration: CalibrationMode,
}

const COMMON_KEYS: [&str; 9] =
    ["space", "m_alpha", "m_2alpha", "experiment", "r_max", "n_r", "lambda_max", "n_lambda", "calibration"];

const LADDER: [f64; 5] = [2.0, 5.0, 10.0, 20.0, 40.0];

fn err(key: &str, message: impl Into<String>) -> CliError {
    CliError::Config { key: key.to_string(), message: message.into() }
}

/// Parses a config; the experiment defaults to `ratio`.
pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    parse_config_for(text, None)
}

/// Parses a config for a given subcommand. An `experiment` key, if present,
/// must agree with the subcommand.
pub fn parse_config_for(text: &str, subcommand: Option<Experiment>) -> Result<RunConfig, CliError> {
    let mut map = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| CliError::ConfigSyntax {
            line: n + 1,
            message: format!("expected 'key = value', found '{line}'"),
        })?;
        let k = k.trim().to_string();
        if k.is_empty() {
            return Err(CliError::ConfigSyntax { line: n + 1, message: "empty key".into() });
        }
        if map.insert(k.clone(), v.trim().to_string()).is_some() {
            return Err(err(&k, "given more than once"));
        }
    }

    let experiment = match (map.get("experiment"), subcommand) {
        (Some(v), sub) => {
            let e: Experiment = v.parse().map_err(|m| err("experiment", m))?;
            if let Some(sub) = sub.filter(|s| *s != e) {
                return Err(err("experiment", format!("config names '{e}' but the subcommand is '{sub}'")));
            }
            e
        }
        (None, Some(sub)) => sub,
        (None, None) => Experiment::Ratio,
    };
    for k in map.keys() {
        if !COMMON_KEYS.contains(&k.as_str()) && !experiment.keys().contains(&k.as_str()) {
            let known = Experiment::ALL.iter().any(|e| e.keys().contains(&k.as_str()));
            return Err(err(
                k,
                if known { format!("not used by the {experiment} experiment") } else { "unknown key".to_string() },
            ));
        }
    }
    let get = |k: &str| map.get(k).map(String::as_str);

    let (space, space_label) = parse_space(get("space"), get("m_alpha"), get("m_2alpha"))?;

    let f = match get("f") {
        Some(v) => TestFunction::parse(v).map_err(|e| err("f", strip(e)))?,
        None => TestFunction::heat(1.0).expect("valid default"),
    };
    if experiment == Experiment::Ball && !matches!(f, TestFunction::Heat { .. }) {
        return Err(err("f", "ball averages support heat:s test functions only"));
    }

    let p_default: &[f64] = match experiment {
        Experiment::Ratio => &[1.0, 1.5, 2.0, 4.0, f64::INFINITY],
        Experiment::Extremizer => &[1.0, 1.5],
        Experiment::Concentration => &[1.5],
        Experiment::Ball => &[1.0, 2.0],
        Experiment::Normfit => &[1.5, 2.0, 4.0],
        _ => &[],
    };
    let p = match get("p") {
        Some(v) => parse_list(v, "p")?.into_iter().map(exponent).collect::<Result<Vec<_>, _>>()?,
        None => p_default.iter().map(|&x| exponent(x)).collect::<Result<Vec<_>, _>>()?,
    };
    match experiment {
        Experiment::Extremizer => {
            if let Some(x) = p.iter().find(|x| x.p() > 2.0) {
                return Err(err("p", format!("extremizer needs p in [1, 2] (got {x})")));
            }
        }
        Experiment::Concentration => {
            if let Some(x) = p.iter().find(|x| !(x.p() > 1.0 && x.p() < 2.0)) {
                return Err(err("p", format!("concentration needs p in (1, 2) (got {x})")));
            }
        }
        _ => {}
    }

    let t_default: &[f64] = match experiment {
        Experiment::Heat => &[1.0],
        Experiment::Sharpness => &[10.0, 20.0, 40.0],
        Experiment::Normfit => &[8.0, 16.0, 32.0, 64.0],
        _ => &LADDER,
    };
    let t = list_or(get("t"), "t", t_default)?;
    check_all(&t, "t", "t > 0", |x| x > 0.0)?;
    if experiment == Experiment::Normfit {
        if t.len() < 4 {
            return Err(err("t", format!("the norm fit needs at least 4 times (got {})", t.len())));
        }
        if t.windows(2).any(|w| w[1] <= w[0]) {
            return Err(err("t", "the norm fit needs an increasing ladder"));
        }
    }

    let r_default: &[f64] = match experiment {
        Experiment::Spherical => &[0.1, 1.0, 3.0, 10.0],
        Experiment::Heat => &[0.1, 0.5, 1.0, 2.0, 5.0, 10.0],
        Experiment::Ball => &[5.0, 10.0, 20.0],
        _ => &[],
    };
    let r = list_or(get("r"), "r", r_default)?;
    if experiment == Experiment::Ball {
        check_all(&r, "r", "r > 0", |x| x > 0.0)?;
    } else {
        check_all(&r, "r", "r >= 0", |x| x >= 0.0)?;
    }

    let alpha_default: &[f64] = match experiment {
        Experiment::Ratio | Experiment::Extremizer | Experiment::Normfit => &[0.5, 1.0],
        Experiment::Heat => &[1.0],
        _ => &[],
    };
    let alpha = list_or(get("alpha"), "alpha", alpha_default)?;
    check_all(&alpha, "alpha", "0 < alpha <= 1", |x| x > 0.0 && x <= 1.0)?;

    let lambda = list_or(get("lambda"), "lambda", &[0.2, 1.0, 2.0, 5.0, 10.0])?;
    check_all(&lambda, "lambda", "lambda >= 0", |x| x >= 0.0)?;

    let z = match (get("z"), get("z_offset")) {
        (Some(_), Some(_)) => return Err(err("z_offset", "give either z or z_offset, not both")),
        (Some(v), None) => ZChoice::Fixed(parse_complex(v, "z")?),
        (None, Some(v)) => ZChoice::Offset(parse_complex(v, "z_offset")?),
        (None, None) => ZChoice::Theorem,
    };

    let radius_exponent = match get("radius_exponent") {
        Some(v) => number(v, "radius_exponent")?,
        None => 0.75,
    };
    if !(radius_exponent > 0.5 && radius_exponent < 1.0) {
        return Err(err("radius_exponent", format!("must lie in (1/2, 1) (got {radius_exponent})")));
    }

    let theta = list_or(get("theta"), "theta", &[1.0, 0.9])?;
    check_all(&theta, "theta", "theta >= 0", |x| x >= 0.0)?;
    let a = list_or(get("a"), "a", &[0.5, 1.0, 2.0])?;
    check_all(&a, "a", "a real", |_| true)?;

    let grids = GridPolicy {
        r_max: get("r_max").map(|v| positive(v, "r_max")).transpose()?,
        n_r: get("n_r").map(|v| count(v, "n_r", 3)).transpose()?,
        lambda_max: get("lambda_max").map(|v| positive(v, "lambda_max")).transpose()?,
        n_lambda: get("n_lambda").map(|v| count(v, "n_lambda", 3)).transpose()?,
    };

    let calibration = match get("calibration") {
        None | Some("auto") => CalibrationMode::Auto,
        Some("full") => CalibrationMode::Full,
        Some(v) => CalibrationMode::Fixed(
            positive(v, "calibration")
                .map_err(|_| err("calibration", format!("expected auto, full or a positive number (got '{v}')")))?,
        ),
    };

    Ok(RunConfig {
        experiment,
        space,
        space_label,
        f,
        p,
        t,
        r,
        alpha,
        lambda,
        z,
        radius_exponent,
        theta,
        a,
        grids,
        calibration,
    })
}

fn strip(e: symheat::Error) -> String {
    match e {
        symheat::Error::Domain(m) => m,
        other => other.to_string(),
    }
}

fn parse_space(
    preset: Option<&str>,
    m_alpha: Option<&str>,
    m_2alpha: Option<&str>,
) -> Result<(RankOneSpace, String), CliError> {
    match (preset, m_alpha, m_2alpha) {
        (Some(_), Some(_), _) => Err(err("m_alpha", "give either space or m_alpha/m_2alpha, not both")),
        (Some(_), None, Some(_)) => Err(err("m_2alpha", "give either space or m_alpha/m_2alpha, not both")),
        (Some(name), None, None) => {
            RankOneSpace::preset(name).map(|s| (s, name.to_string())).map_err(|e| err("space", strip(e)))
        }
        (None, Some(a), b) => {
            let ma =
                a.parse::<u32>().map_err(|_| err("m_alpha", format!("expected a positive integer (got '{a}')")))?;
            let mb = match b {
                Some(b) => b
                    .parse::<u32>()
                    .map_err(|_| err("m_2alpha", format!("expected a non-negative integer (got '{b}')")))?,
                None => 0,
            };
            let s = RankOneSpace::new(ma, mb).map_err(|e| err("m_alpha", strip(e)))?;
            Ok((s, format!("m_alpha={ma},m_2alpha={mb}")))
        }
        (None, None, Some(_)) => Err(err("m_2alpha", "needs m_alpha as well")),
        (None, None, None) => Ok((RankOneSpace::preset("H3").expect("valid preset"), "H3".to_string())),
    }
}

fn number(v: &str, key: &str) -> Result<f64, CliError> {
    let x = match v.trim() {
        "inf" | "infinity" | "∞" => f64::INFINITY,
        s => s.parse::<f64>().map_err(|_| err(key, format!("malformed number '{s}'")))?,
    };
    if x.is_nan() {
        return Err(err(key, "NaN is not a valid value"));
    }
    Ok(x)
}

fn positive(v: &str, key: &str) -> Result<f64, CliError> {
    let x = number(v, key)?;
    if !(x > 0.0 && x.is_finite()) {
        return Err(err(key, format!("must be a positive finite number (got {v})")));
    }
    Ok(x)
}

fn count(v: &str, key: &str, min: usize) -> Result<usize, CliError> {
    let n = v.trim().parse::<usize>().map_err(|_| err(key, format!("expected an integer (got '{v}')")))?;
    if n < min {
        return Err(err(key, format!("must be at least {min} (got {n})")));
    }
    Ok(n)
}

fn parse_list(v: &str, key: &str) -> Result<Vec<f64>, CliError> {
    let items: Vec<&str> = v.split(',').map(str::trim).collect();
    if items.iter().any(|s| s.is_empty()) {
        return Err(err(key, format!("empty entry in list '{v}'")));
    }
    items.into_iter().map(|s| number(s, key)).collect()
}

fn list_or(v: Option<&str>, key: &str, default: &[f64]) -> Result<Vec<f64>, CliError> {
    match v {
        Some(v) => parse_list(v, key),
        None => Ok(default.to_vec()),
    }
}

fn check_all(xs: &[f64], key: &str, rule: &str, ok: impl Fn(f64) -> bool) -> Result<(), CliError> {
    match xs.iter().find(|&&x| !x.is_finite() || !ok(x)) {
        Some(x) => Err(err(key, format!("every value must satisfy {rule} (got {x})"))),
        None => Ok(()),
    }
}

fn exponent(x: f64) -> Result<LebesgueExponent, CliError> {
    if x.is_infinite() && x > 0.0 {
        return Ok(LebesgueExponent::infinity());
    }
    LebesgueExponent::new(x).map_err(|_| err("p", format!("every value must satisfy p >= 1 (got {x})")))
}

fn parse_complex(v: &str, key: &str) -> Result<Complex64, CliError> {
    let z = Complex64::from_str(&v.replace(' ', ""))
        .map_err(|_| err(key, format!("malformed complex number '{v}' (expected e.g. 0.1 or 0.1+0.2i)")))?;
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(err(key, "must be finite"));
    }
    Ok(z)
}

/// The effective configuration as `key = value` lines, parseable by `parse_config`.
pub fn echo(cfg: &RunConfig) -> String {
    let list = |xs: &[f64]| xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
    let mut out = vec![
        format!("experiment = {}", cfg.experiment),
        if cfg.space_label.starts_with("m_alpha=") {
            format!("m_alpha = {}\nm_2alpha = {}", cfg.space.m_alpha(), cfg.space.m_2alpha())
        } else {
            format!("space = {}", cfg.space_label)
        },
    ];
    for key in cfg.experiment.keys() {
        let line = match *key {
            "lambda" => list(&cfg.lambda),
            "r" => list(&cfg.r),
            "t" => list(&cfg.t),
            "alpha" => list(&cfg.alpha),
            "theta" => list(&cfg.theta),
            "a" => list(&cfg.a),
            "f" => cfg.f.to_string(),
            "p" => cfg.p.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(", "),
            "radius_exponent" => cfg.radius_exponent.to_string(),
            "z" => match cfg.z {
                ZChoice::Fixed(z) => complex_text(z),
                _ => continue,
            },
            "z_offset" => match cfg.z {
                ZChoice::Offset(z) => complex_text(z),
                _ => continue,
            },
            _ => continue,
        };
        out.push(format!("{key} = {line}"));
    }
    let g = &cfg.grids;
    if let Some(v) = g.r_max {
        out.push(format!("r_max = {v}"));
    }
    if let Some(v) = g.n_r {
        out.push(format!("n_r = {v}"));
    }
    if let Some(v) = g.lambda_max {
        out.push(format!("lambda_max = {v}"));
    }
    if let Some(v) = g.n_lambda {
        out.push(format!("n_lambda = {v}"));
    }
    out.push(format!(
        "calibration = {}",
        match cfg.calibration {
            CalibrationMode::Auto => "auto".to_string(),
            CalibrationMode::Full => "full".to_string(),
            CalibrationMode::Fixed(c) => c.to_string(),
        }
    ));
    out.join("\n") + "\n"
}

fn complex_text(z: Complex64) -> String {
    if z.im == 0.0 {
        z.re.to_string()
    } else {
        format!("{}{:+}i", z.re, z.im)
    }
}
