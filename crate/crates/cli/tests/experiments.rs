use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, PI};

use berryphase::phase_deviation;
use berryphase_cli::output::write_records_csv;
use berryphase_cli::{run_experiment, sweep, ExperimentConfig, LoopSpec, Method};

fn circle(family: &str, method: Method, flag: &str) -> ExperimentConfig {
    ExperimentConfig::new(family, method, LoopSpec::parse_flag(flag).unwrap())
}

#[test]
fn spin_half_all_methods_agree() {
    let cfg = circle("su2-spin-half", Method::All, "sweep=phi,theta=pi/2");
    let records = run_experiment(&cfg).unwrap();
    assert_eq!(records.len(), 4 + 6);
    let methods: Vec<&str> = records.iter().map(|r| r.method.as_str()).collect();
    assert_eq!(&methods[..4], ["line", "overlap", "surface", "schrodinger"]);
    for r in &records[..4] {
        assert!((r.reference.unwrap() + PI).abs() < 1e-15);
    }
    for r in &records[4..] {
        let d = r.deviation.unwrap();
        let tol = if r.method.contains("schrodinger") { 2e-2 } else { 1e-4 };
        assert!(d <= tol, "{}: {d}", r.method);
        assert!(r.canonical_phase > -PI && r.canonical_phase <= PI);
    }
}

#[test]
fn spin_one_line_phase_over_theta() {
    let cfg = circle("su2-spin-1", Method::Line, "sweep=phi,theta=0");
    let thetas = [FRAC_PI_6, FRAC_PI_4, FRAC_PI_3, FRAC_PI_2, 2.0 * FRAC_PI_3];
    let records = sweep(&cfg, "theta", &thetas).unwrap();
    assert_eq!(records.len(), thetas.len());
    for (r, t) in records.iter().zip(thetas) {
        assert!(phase_deviation(r.raw_phase, -2.0 * PI * (1.0 - t.cos())) <= 1e-4);
        assert!(r.experiment_id.ends_with(&format!("theta={t}")));
    }
}

#[test]
fn su3_surface_over_g_gamma_patch() {
    let text = r#"
family = "su3-spin-1"
method = "surface"
[loop]
kind = "circle"
sweep = "gamma"
radial = "g"
radial_from = 0
fixed = { theta = 1.0, phi = 0.0, g = "pi/6" }
"#;
    let cfg = ExperimentConfig::from_toml_str(text).unwrap();
    let r = &run_experiment(&cfg).unwrap()[0];
    assert!(phase_deviation(r.raw_phase, -PI) <= 1e-4, "{}", r.raw_phase);
    assert!(r.deviation.unwrap() <= 1e-4);
}

#[test]
fn spin_half_theta_table() {
    let cfg = circle("su2-spin-half", Method::Line, "sweep=phi,theta=1");
    let values: Vec<f64> = (0..33).map(|i| 0.1 + (PI - 0.2) * i as f64 / 32.0).collect();
    let records = sweep(&cfg, "theta", &values).unwrap();
    assert_eq!(records.len(), 33);
    for (r, t) in records.iter().zip(&values) {
        assert!(phase_deviation(r.raw_phase, -PI * (1.0 - t.cos())) <= 1e-4);
        let LoopSpec::Circle { fixed, .. } = &r.config.loop_spec else { panic!("circle") };
        assert_eq!(fixed["theta"].0, *t);
    }
}

#[test]
fn su3_gamma_loop_over_g() {
    let cfg = circle("su3-spin-1", Method::Line, "sweep=gamma,theta=1,phi=0.3,g=0");
    let values: Vec<f64> = (0..=16).map(|i| FRAC_PI_2 * i as f64 / 16.0).collect();
    let records = sweep(&cfg, "g", &values).unwrap();
    for (r, g) in records.iter().zip(&values) {
        assert!(phase_deviation(r.raw_phase, 2.0 * PI * (2.0 * g).cos()) <= 1e-4, "g={g}");
    }
}

#[test]
fn empty_sweep_is_empty() {
    let cfg = circle("su3-spin-1", Method::Line, "sweep=gamma,theta=1,phi=0.3,g=0");
    assert!(sweep(&cfg, "g", &[]).unwrap().is_empty());
}

#[test]
fn identical_configs_give_identical_bytes() {
    let mut cfg = circle("su3-spin-1", Method::All, "sweep=gamma,theta=1,phi=0.3,g=0.4");
    cfg.oracle.total_time = 50.0;
    let render = |c: &ExperimentConfig| {
        let mut buf = Vec::new();
        write_records_csv(&run_experiment(c).unwrap(), &mut buf).unwrap();
        buf
    };
    assert_eq!(render(&cfg), render(&cfg));

    // A parallel sweep matches the same experiments run one by one.
    let values = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6];
    let mut line = circle("su3-spin-1", Method::Line, "sweep=gamma,theta=1,phi=0.3,g=0");
    line.seed = 9;
    let swept = sweep(&line, "g", &values).unwrap();
    for (r, g) in swept.iter().zip(values) {
        let mut single = line.clone();
        if let LoopSpec::Circle { fixed, .. } = &mut single.loop_spec {
            fixed.insert("g".into(), berryphase_cli::Angle(g));
        }
        single.id = r.config.id.clone();
        assert_eq!(run_experiment(&single).unwrap(), vec![r.clone()]);
    }
}

#[test]
fn records_carry_enough_config_to_rerun() {
    let cfg = circle("su2-spin-1", Method::Overlap, "sweep=phi,theta=2*pi/3,turns=2");
    let first = run_experiment(&cfg).unwrap();
    let embedded = &first[0].config;
    let json: ExperimentConfig = serde_json::from_str(&embedded.to_json()).unwrap();
    let toml = ExperimentConfig::from_toml_str(&embedded.to_toml()).unwrap();
    assert_eq!(run_experiment(&json).unwrap(), first);
    assert_eq!(run_experiment(&toml).unwrap(), first);
}

#[test]
fn numerical_errors_name_the_experiment() {
    // 16 samples over 8 turns: neighbouring states are orthogonal.
    let mut cfg = circle("su2-spin-half", Method::Overlap, "sweep=phi,theta=pi/2,turns=8");
    cfg.id = Some("coarse".into());
    cfg.resolution.samples = 16;
    let err = run_experiment(&cfg).unwrap_err();
    assert!(err.to_string().contains("coarse"), "{err}");
    assert_eq!(err.exit_code(), 3);
}
