//! Built-in reproduction suite: closed-form connections, curvatures and loop
//! phases of the three coherent-state families, run through the same
//! experiment pipeline as user configs.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, FRAC_PI_8, PI};

use berryphase::sampling::halton_points;
use berryphase::{
    berry_connection_fd, berry_curvature_fd, family_by_id, norm, StateFamily, SU2_SPIN_HALF, SU2_SPIN_ONE, SU3_SPIN_ONE,
};

use crate::config::{ExperimentConfig, LoopSpec, Method};
use crate::error::CliError;
use crate::run::run_experiment;

const CONNECTION_TOL: f64 = 5e-9;
const CURVATURE_TOL: f64 = 1e-6;
const LOOP_TOL: f64 = 1e-4;
const ORACLE_TOL: f64 = 2e-2;
const THETAS: [f64; 5] = [FRAC_PI_6, FRAC_PI_4, FRAC_PI_3, FRAC_PI_2, 2.0 * FRAC_PI_3];

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl std::fmt::Display for Check {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} {} ({})", self.name, self.detail)
    }
}

fn check(name: &str, worst: f64, tol: f64) -> Check {
    Check { name: name.to_string(), passed: worst <= tol, detail: format!("worst {worst:.3e}, tolerance {tol:.0e}") }
}

fn family(id: &str) -> std::sync::Arc<dyn StateFamily> {
    family_by_id(id).expect("built-in family")
}

/// Interior sample points (theta kept 1e-3 away from the poles).
fn sample(f: &dyn StateFamily, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let bounds: Vec<(f64, f64)> = f
        .chart()
        .coordinates()
        .iter()
        .map(|c| if c.name == "theta" { (1e-3, PI - 1e-3) } else { (c.lower, c.upper) })
        .collect();
    halton_points(&bounds, count, seed)
}

fn connection_error(id: &str, seed: u64) -> Result<f64, CliError> {
    let f = family(id);
    let mut worst: f64 = 0.0;
    for p in sample(f.as_ref(), 20, seed) {
        let fd = berry_connection_fd(f.as_ref(), &p, 1e-5).map_err(|e| CliError::from_core(id, e))?;
        let exact = f.analytic_connection(&p).expect("closed form");
        for (a, b) in fd.components().iter().zip(&exact) {
            worst = worst.max((a - b).abs());
        }
    }
    Ok(worst)
}

fn curvature_error(id: &str, seed: u64) -> Result<f64, CliError> {
    let f = family(id);
    let m = f.chart().dim();
    let mut worst: f64 = 0.0;
    for p in sample(f.as_ref(), 20, seed) {
        let fd = berry_curvature_fd(f.as_ref(), &p, 1e-4).map_err(|e| CliError::from_core(id, e))?;
        for k in 0..m {
            for l in k + 1..m {
                worst = worst.max((fd.get(k, l) - f.analytic_curvature(&p, k, l).expect("closed form")).abs());
            }
        }
    }
    Ok(worst)
}

/// Worst deviation from the closed-form reference over every record.
fn loop_error(configs: &[ExperimentConfig]) -> Result<f64, CliError> {
    let mut worst: f64 = 0.0;
    for cfg in configs {
        for r in run_experiment(cfg)? {
            if !r.method.contains('|') {
                worst = worst.max(r.deviation.expect("circle loops of built-in families have references"));
            }
        }
    }
    Ok(worst)
}

fn circle(id: &str, method: Method, flag: &str, seed: u64) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(id, method, LoopSpec::parse_flag(flag).expect("valid loop flag"));
    cfg.seed = seed;
    cfg
}

fn sphere_loops(id: &str, seed: u64) -> Vec<ExperimentConfig> {
    THETAS
        .iter()
        .flat_map(|&t| {
            [Method::Line, Method::Overlap, Method::Surface]
                .map(|m| circle(id, m, &format!("sweep=phi,theta={t}"), seed))
        })
        .collect()
}

pub fn run_suite(seed: u64) -> Result<Vec<Check>, CliError> {
    let mut checks = vec![
        check("spin-1/2 connection A_phi = cos^2(theta/2)", connection_error(SU2_SPIN_HALF, seed)?, CONNECTION_TOL),
        check("spin-1/2 curvature F = -sin(theta)/2", curvature_error(SU2_SPIN_HALF, seed)?, CURVATURE_TOL),
        check("spin-1/2 loop phase -pi(1 - cos theta)", loop_error(&sphere_loops(SU2_SPIN_HALF, seed))?, LOOP_TOL),
        check("spin-1 connection A_phi = cos(theta)", connection_error(SU2_SPIN_ONE, seed)?, CONNECTION_TOL),
        check("spin-1 curvature F = -sin(theta)", curvature_error(SU2_SPIN_ONE, seed)?, CURVATURE_TOL),
        check("spin-1 loop phase -2pi(1 - cos theta)", loop_error(&sphere_loops(SU2_SPIN_ONE, seed))?, LOOP_TOL),
    ];

    let su3 = family(SU3_SPIN_ONE);
    let bounds: Vec<_> = su3.chart().coordinates().iter().map(|c| (c.lower, c.upper)).collect();
    let mut norm_err: f64 = 0.0;
    for p in halton_points(&bounds, 10_000, seed) {
        let v = su3.evaluate(&p).map_err(|e| CliError::from_core(SU3_SPIN_ONE, e))?;
        norm_err = norm_err.max((norm(&v) - 1.0).abs());
    }
    checks.push(check("SU(3) normalization", norm_err, 1e-12));
    checks.push(check("SU(3) connection A_phi, A_gamma", connection_error(SU3_SPIN_ONE, seed)?, CONNECTION_TOL));
    checks.push(check("SU(3) curvature", curvature_error(SU3_SPIN_ONE, seed)?, CURVATURE_TOL));
    let su3_loops: Vec<_> = [FRAC_PI_8, FRAC_PI_6, FRAC_PI_4]
        .iter()
        .flat_map(|&g| {
            [Method::Line, Method::Overlap, Method::Surface]
                .map(|m| circle(SU3_SPIN_ONE, m, &format!("sweep=gamma,theta=1,phi=0.5,g={g}"), seed))
        })
        .collect();
    checks.push(check("SU(3) gamma-loop phase 2pi cos 2g", loop_error(&su3_loops)?, LOOP_TOL));

    let spin1 = family(SU2_SPIN_ONE);
    let mut reduction: f64 = 0.0;
    for i in 0..50 {
        for j in 0..50 {
            let (t, p) = (PI * i as f64 / 49.0, 2.0 * PI * j as f64 / 50.0);
            let a = su3.evaluate(&[t, p, 0.0, 0.0]).map_err(|e| CliError::from_core(SU3_SPIN_ONE, e))?;
            let b = spin1.evaluate(&[t, p]).map_err(|e| CliError::from_core(SU2_SPIN_ONE, e))?;
            reduction = reduction.max(a.max_abs_diff(&b).map_err(|e| CliError::from_core(SU3_SPIN_ONE, e))?);
        }
    }
    checks.push(check("SU(3) -> SU(2) spin-1 reduction at g = gamma = 0", reduction, 1e-15));

    let mut oracle = circle(SU2_SPIN_HALF, Method::All, "sweep=phi,theta=pi/2", seed);
    oracle.oracle.total_time = 2000.0;
    let mut worst_geometric: f64 = 0.0;
    let mut worst_oracle: f64 = 0.0;
    for r in run_experiment(&oracle)? {
        if r.method.contains('|') {
            let d = r.deviation.expect("pairwise");
            if r.method.contains("schrodinger") {
                worst_oracle = worst_oracle.max(d);
            } else {
                worst_geometric = worst_geometric.max(d);
            }
        }
    }
    checks.push(check("spin-1/2 cross-method agreement (geometric)", worst_geometric, LOOP_TOL));
    checks.push(check("spin-1/2 cross-method agreement (Schrodinger, T = 2000)", worst_oracle, ORACLE_TOL));

    Ok(checks)
}
