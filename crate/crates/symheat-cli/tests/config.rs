//! Config parsing: defaults, validation messages and the echo round trip.

use symheat::testfn::TestFunction;
use symheat::{LebesgueExponent, RankOneSpace};
use symheat_cli::config::{echo, parse_config, parse_config_for, CalibrationMode, Experiment, ZChoice};
use symheat_cli::error::{CliError, EXIT_CONFIG};

fn config_error(text: &str) -> (String, String) {
    match parse_config(text) {
        Err(CliError::Config { key, message }) => (key, message),
        other => panic!("expected a config error for {text:?}, got {other:?}"),
    }
}

#[test]
fn empty_config_gives_ratio_defaults() {
    let c = parse_config("").unwrap();
    assert_eq!(c.experiment, Experiment::Ratio);
    assert_eq!(c.space, RankOneSpace::preset("H3").unwrap());
    assert_eq!(c.f, TestFunction::heat(1.0).unwrap());
    let p: Vec<f64> = c.p.iter().map(LebesgueExponent::p).collect();
    assert_eq!(p, [1.0, 1.5, 2.0, 4.0, f64::INFINITY]);
    assert_eq!(c.t, [2.0, 5.0, 10.0, 20.0, 40.0]);
    assert_eq!(c.alpha, [0.5, 1.0]);
    assert_eq!(c.z, ZChoice::Theorem);
    assert_eq!(c.calibration, CalibrationMode::Auto);
}

#[test]
fn p_below_one_names_the_key_and_the_rule() {
    let (key, message) = config_error("p = 0.5");
    assert_eq!(key, "p");
    assert!(message.contains("p >= 1"), "{message}");
    let e = parse_config("p = 0.5").unwrap_err();
    assert_eq!(e.exit_code(), EXIT_CONFIG);
    assert!(e.to_string().contains("p:"));
}

#[test]
fn malformed_values_are_rejected() {
    for (text, key) in [
        ("t = 0", "t"),
        ("t = 1, , 2", "t"),
        ("alpha = 1.5", "alpha"),
        ("f = gauss:1", "f"),
        ("f = heat:-1", "f"),
        ("space = S2", "space"),
        ("space = H3\nm_alpha = 2", "m_alpha"),
        ("z = 1\nz_offset = 0.1", "z_offset"),
        ("z = 1+", "z"),
        ("n_r = 2", "n_r"),
        ("r_max = -4", "r_max"),
        ("calibration = sometimes", "calibration"),
        ("experiment = nonsense", "experiment"),
    ] {
        assert_eq!(config_error(text).0, key, "{text}");
    }
}

#[test]
fn unknown_duplicate_and_unused_keys_are_errors() {
    assert_eq!(config_error("colour = red"), ("colour".into(), "unknown key".into()));
    assert_eq!(config_error("t = 1\nt = 2").0, "t");
    let (key, message) = config_error("theta = 1");
    assert_eq!(key, "theta");
    assert!(message.contains("ratio"), "{message}");
    assert!(matches!(parse_config("just words"), Err(CliError::ConfigSyntax { line: 1, .. })));
}

#[test]
fn experiment_preconditions_are_checked() {
    let e = parse_config_for("p = 3", Some(Experiment::Extremizer)).unwrap_err();
    assert!(matches!(e, CliError::Config { ref key, .. } if key == "p"));
    assert!(parse_config_for("p = 2", Some(Experiment::Concentration)).is_err());
    assert!(parse_config_for("radius_exponent = 0.5", Some(Experiment::Concentration)).is_err());
    assert!(parse_config_for("t = 1, 2, 4", Some(Experiment::Normfit)).is_err());
    assert!(parse_config_for("t = 8, 4, 16, 32", Some(Experiment::Normfit)).is_err());
    assert!(parse_config_for("f = ball:2", Some(Experiment::Ball)).is_err());
    assert!(parse_config_for("experiment = heat", Some(Experiment::Ratio)).is_err());
    assert_eq!(parse_config_for("experiment = heat", Some(Experiment::Heat)).unwrap().experiment, Experiment::Heat);
}

#[test]
fn values_parse_in_their_own_syntax() {
    let c = parse_config("space = CH2\np = 1, inf\nz_offset = 0.1+0.2i # comment\ncalibration = 0.159").unwrap();
    assert_eq!(c.space.rho(), 2.0);
    assert!(c.p[1].is_infinite());
    assert_eq!(c.z, ZChoice::Offset(num_complex::Complex64::new(0.1, 0.2)));
    assert_eq!(c.calibration, CalibrationMode::Fixed(0.159));
    let c = parse_config("m_alpha = 4\nm_2alpha = 3").unwrap();
    assert_eq!(c.space, RankOneSpace::preset("HHn:2").unwrap());
}

#[test]
fn echo_parses_back_to_the_same_config() {
    let texts = [
        "",
        "space = CH2\nf = exp:0.5:2\np = 1.5, inf\nz = 0.25-1i\nr_max = 90\nn_lambda = 2001",
        "experiment = ball\nm_alpha = 6\nm_2alpha = 1\nf = heat:2\nz_offset = 0.1\na = 0, 1",
        "experiment = normfit\nt = 4, 8, 16, 32\nalpha = 0.5\ncalibration = full",
        "experiment = concentration\nradius_exponent = 0.6\np = 1.25",
    ];
    for text in texts {
        let c = parse_config(text).unwrap();
        let again = parse_config(&echo(&c)).unwrap();
        assert_eq!(again, c, "{text}");
    }
}
