use std::f64::consts::PI;
use std::time::Instant;

use berryphase::{
    canonical_phase, inner_product, line_integral_phase_with, overlap_product_phase, phase_deviation,
    projector_loop_phase, surface_integral_phase_with, ConnectionSource, FdSteps, Loop, SurfacePatch, SU2_SPIN_HALF,
    SU2_SPIN_ONE, SU3_SPIN_ONE,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{Angle, ExperimentConfig, LoopKind, LoopSpec, Method, ValidatedLoop};
use crate::error::CliError;

/// Samples used to confirm the inner edge of a surface patch is a single state.
const INNER_EDGE_SAMPLES: usize = 64;
const INNER_EDGE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Record wall-clock seconds per method. Off by default so that output
    /// is byte-identical across runs.
    pub timing: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub experiment_id: String,
    pub family: String,
    /// A method name, or `a|b` for a pairwise comparison whose `raw_phase`
    /// is method `a` and `reference` is method `b`.
    pub method: String,
    #[serde(rename = "loop")]
    pub loop_description: String,
    pub raw_phase: f64,
    pub canonical_phase: f64,
    pub reference: Option<f64>,
    /// `|exp(i(raw - reference)) - 1|`
    pub deviation: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_clock_s: Option<f64>,
    pub config: ExperimentConfig,
}

impl ResultRecord {
    fn new(cfg: &ExperimentConfig, method: String, raw: f64, reference: Option<f64>, elapsed: Option<f64>) -> Self {
        Self {
            experiment_id: cfg.experiment_id(),
            family: cfg.family.clone(),
            method,
            loop_description: cfg.loop_spec.describe(),
            raw_phase: raw,
            canonical_phase: canonical_phase(raw),
            reference,
            deviation: reference.map(|r| phase_deviation(raw, r)),
            wall_clock_s: elapsed,
            config: cfg.clone(),
        }
    }
}

/// Closed-form loop phase for a built-in family on a constant-coordinate
/// circle, when one is known.
pub fn closed_form_reference(family: &str, sweep_name: &str, base: &[f64], turns: i32) -> Option<f64> {
    let turns = f64::from(turns);
    let value = match (family, sweep_name) {
        (SU2_SPIN_HALF, "phi") => -PI * (1.0 - base[0].cos()),
        (SU2_SPIN_ONE, "phi") => -2.0 * PI * (1.0 - base[0].cos()),
        (SU3_SPIN_ONE, "phi") => 2.0 * PI * base[0].cos() * (2.0 * base[2]).cos(),
        (SU3_SPIN_ONE, "gamma") => -2.0 * PI * (1.0 - (2.0 * base[2]).cos()),
        _ => return None,
    };
    Some(value * turns)
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ResultRecord>, CliError> {
    run_experiment_with(cfg, RunOptions::default())
}

pub fn run_experiment_with(cfg: &ExperimentConfig, opts: RunOptions) -> Result<Vec<ResultRecord>, CliError> {
    let v = cfg.validate()?;
    let id = cfg.experiment_id();
    let path = build_loop(&v).map_err(|e| CliError::from_core(&id, e))?;
    path.check_closed().map_err(|e| CliError::from_core(&id, e))?;
    let reference = match &v.kind {
        LoopKind::Circle { base, sweep, turns, .. } => {
            closed_form_reference(&cfg.family, &v.chart.coordinate(*sweep).name, base, *turns)
        }
        LoopKind::Csv(_) => None,
    };

    let methods: Vec<Method> = match cfg.method {
        Method::All => Method::SINGLE.to_vec(),
        m => vec![m],
    };
    let mut records = Vec::new();
    for &m in &methods {
        let start = Instant::now();
        let raw = run_method(cfg, &v, &path, m).map_err(|e| match e {
            MethodError::Core(e) => CliError::from_core(&id, e),
            MethodError::Cli(e) => e,
        })?;
        let elapsed = opts.timing.then(|| start.elapsed().as_secs_f64());
        records.push(ResultRecord::new(cfg, m.as_str().to_string(), raw, reference, elapsed));
    }
    if cfg.method == Method::All {
        let n = records.len();
        for i in 0..n {
            for j in i + 1..n {
                let (a, b) = (&records[i], &records[j]);
                let method = format!("{}|{}", a.method, b.method);
                let pair = ResultRecord::new(cfg, method, a.raw_phase, Some(b.raw_phase), None);
                records.push(pair);
            }
        }
    }
    Ok(records)
}

enum MethodError {
    Core(berryphase::Error),
    Cli(CliError),
}

impl From<berryphase::Error> for MethodError {
    fn from(e: berryphase::Error) -> Self {
        MethodError::Core(e)
    }
}

fn build_loop(v: &ValidatedLoop) -> berryphase::Result<Loop> {
    match &v.kind {
        LoopKind::Circle { base, sweep, turns, .. } => Loop::circle(v.chart.clone(), base.clone(), *sweep, *turns),
        LoopKind::Csv(path) => Loop::from_csv_path(v.chart.clone(), path),
    }
}

fn run_method(cfg: &ExperimentConfig, v: &ValidatedLoop, path: &Loop, m: Method) -> Result<f64, MethodError> {
    let family = v.family.as_ref();
    let res = &cfg.resolution;
    let steps = FdSteps { connection: res.connection_step, curvature: res.curvature_step };
    Ok(match m {
        Method::Line => {
            let source = ConnectionSource::FiniteDifference { step: res.connection_step };
            line_integral_phase_with(family, path, res.samples, source)?.raw()
        }
        Method::Overlap => overlap_product_phase(family, path, res.samples)?.raw(),
        Method::Surface => {
            let LoopKind::Circle { base, sweep, turns, surface: Some((radial, from)) } = &v.kind else {
                unreachable!("validated: surface needs a circle with a radial coordinate")
            };
            let chart = &v.chart;
            let sweep_c = chart.coordinate(*sweep);
            let radial_c = chart.coordinate(*radial);
            let period = sweep_c.period().expect("validated periodic sweep");
            let outer = base[*radial];
            if outer == *from {
                return Ok(0.0);
            }
            check_inner_edge(v, base, *sweep, *radial, *from)?;
            // Boundary of (radial, sweep) runs +sweep along the upper radial edge.
            let (lo, hi, sign) = if *from < outer { (*from, outer, 1.0) } else { (outer, *from, -1.0) };
            let patch = SurfacePatch::new(
                chart.clone(),
                base.clone(),
                (radial_c.name.as_str(), lo, hi),
                (sweep_c.name.as_str(), base[*sweep], base[*sweep] + period),
            )?;
            let flux = surface_integral_phase_with(family, &patch, res.grid, res.grid, steps)?.raw();
            sign * flux * f64::from(*turns)
        }
        Method::Schrodinger => {
            let report = projector_loop_phase(family, path, cfg.oracle.total_time, cfg.oracle.steps)?;
            report.geometric_phase
        }
        Method::All => unreachable!("expanded by caller"),
    })
}

/// Stokes over the patch gives the loop phase only if the patch's inner edge
/// collapses to a single physical state (e.g. the pole of the sphere).
fn check_inner_edge(
    v: &ValidatedLoop,
    base: &[f64],
    sweep: usize,
    radial: usize,
    from: f64,
) -> Result<(), MethodError> {
    let period = v.chart.coordinate(sweep).period().expect("periodic");
    let at = |t: f64| {
        let mut p = base.to_vec();
        p[radial] = from;
        p[sweep] += period * t;
        v.family.evaluate(&p)
    };
    let first = at(0.0)?;
    for j in 1..INNER_EDGE_SAMPLES {
        let s = at(j as f64 / INNER_EDGE_SAMPLES as f64)?;
        let overlap = inner_product(&first, &s)?.norm();
        if overlap < 1.0 - INNER_EDGE_TOL {
            return Err(MethodError::Cli(CliError::Config(format!(
                "surface patch: the states along {} = {from} still vary with {} (|overlap| = {overlap:.6}), so the \
                 patch does not bound the loop alone; choose another loop.radial or loop.radial_from",
                v.chart.coordinate(radial).name,
                v.chart.coordinate(sweep).name,
            ))));
        }
    }
    Ok(())
}

/// Runs `cfg` once per value of the fixed coordinate `coordinate`, in
/// parallel; records keep the order of `values`.
pub fn sweep(cfg: &ExperimentConfig, coordinate: &str, values: &[f64]) -> Result<Vec<ResultRecord>, CliError> {
    sweep_with(cfg, coordinate, values, RunOptions::default())
}

pub fn sweep_with(
    cfg: &ExperimentConfig,
    coordinate: &str,
    values: &[f64],
    opts: RunOptions,
) -> Result<Vec<ResultRecord>, CliError> {
    let v = cfg.validate()?;
    v.chart.index_of(coordinate).map_err(|_| {
        CliError::Config(format!(
            "unknown coordinate `{coordinate}` (chart has {})",
            v.chart.names().collect::<Vec<_>>().join(", ")
        ))
    })?;
    let LoopSpec::Circle { sweep: looped, .. } = &cfg.loop_spec else {
        return Err(CliError::Config("sweep needs a circle loop; a CSV loop has no fixed coordinates".into()));
    };
    if looped == coordinate {
        return Err(CliError::Config(format!("`{coordinate}` is swept by the loop itself")));
    }
    let base_id = cfg.experiment_id();
    let configs: Vec<ExperimentConfig> = values
        .iter()
        .map(|&x| {
            let mut c = cfg.clone();
            if let LoopSpec::Circle { fixed, .. } = &mut c.loop_spec {
                fixed.insert(coordinate.to_string(), Angle(x));
            }
            c.id = Some(format!("{base_id}/{coordinate}={x}"));
            c
        })
        .collect();
    let results: Vec<Result<Vec<ResultRecord>, CliError>> =
        configs.par_iter().map(|c| run_experiment_with(c, opts)).collect();
    let mut out = Vec::new();
    for r in results {
        out.extend(r?);
    }
    Ok(out)
}
