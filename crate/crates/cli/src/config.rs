//! Experiment configuration: a TOML file, optionally patched by CLI flags.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use berryphase::{family_by_id, ParameterChart, StateFamily, DEFAULT_CONNECTION_STEP, DEFAULT_CURVATURE_STEP};
use berryphase::{DEFAULT_LOOP_SAMPLES, DEFAULT_SURFACE_GRID};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize};

use crate::error::CliError;
use crate::expr::parse_angle;

pub const DEFAULT_TOTAL_TIME: f64 = 1000.0;

/// A real number that may be written as an expression (`"pi/3"`) in config
/// files; always serialized as a plain number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Angle(pub f64);

impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Angle;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number or an expression such as \"pi/2\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Angle, E> {
                Ok(Angle(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Angle, E> {
                Ok(Angle(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Angle, E> {
                Ok(Angle(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Angle, E> {
                parse_angle(v).map(Angle).map_err(E::custom)
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Line,
    Overlap,
    Surface,
    Schrodinger,
    All,
}

impl Method {
    pub const SINGLE: [Method; 4] = [Method::Line, Method::Overlap, Method::Surface, Method::Schrodinger];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Line => "line",
            Method::Overlap => "overlap",
            Method::Surface => "surface",
            Method::Schrodinger => "schrodinger",
            Method::All => "all",
        }
    }

    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "line" => Ok(Method::Line),
            "overlap" => Ok(Method::Overlap),
            "surface" => Ok(Method::Surface),
            "schrodinger" => Ok(Method::Schrodinger),
            "all" => Ok(Method::All),
            other => Err(CliError::Config(format!(
                "unknown method `{other}` (expected line, overlap, surface, schrodinger or all)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Record,
}

/// The loop to traverse.
///
/// `circle`: every coordinate fixed except `sweep`, which runs through
/// `turns` periods. For the surface method the loop bounds the patch
/// `radial ∈ [radial_from, fixed[radial]]` × `sweep ∈ [0, period]`.
///
/// `csv`: explicit samples (header naming the chart coordinates).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum LoopSpec {
    Circle {
        sweep: String,
        #[serde(default = "one")]
        turns: i32,
        #[serde(default)]
        fixed: BTreeMap<String, Angle>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        radial: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        radial_from: Option<Angle>,
    },
    Csv {
        path: PathBuf,
    },
}

fn one() -> i32 {
    1
}

impl LoopSpec {
    /// Parses the `--loop` flag: a path ending in `.csv`, or comma-separated
    /// `key=value` pairs such as `sweep=phi,theta=pi/2,turns=2`.
    pub fn parse_flag(s: &str) -> Result<Self, CliError> {
        let s = s.trim();
        if s.to_ascii_lowercase().ends_with(".csv") {
            return Ok(LoopSpec::Csv { path: PathBuf::from(s) });
        }
        let mut sweep = None;
        let mut turns = 1;
        let mut fixed = BTreeMap::new();
        let mut radial = None;
        let mut radial_from = None;
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("loop spec: expected key=value, got `{part}`")))?;
            let (key, value) = (key.trim(), value.trim());
            let angle = || parse_angle(value).map_err(|e| CliError::Config(format!("loop spec `{key}`: {e}")));
            match key {
                "sweep" => sweep = Some(value.to_string()),
                "turns" => {
                    turns = value
                        .parse()
                        .map_err(|_| CliError::Config(format!("loop spec: turns must be an integer, got `{value}`")))?
                }
                "radial" => radial = Some(value.to_string()),
                "radial_from" => radial_from = Some(Angle(angle()?)),
                coord => {
                    fixed.insert(coord.to_string(), Angle(angle()?));
                }
            }
        }
        let sweep =
            sweep.ok_or_else(|| CliError::Config("loop spec needs `sweep=<coordinate>` or a .csv path".into()))?;
        Ok(LoopSpec::Circle { sweep, turns, fixed, radial, radial_from })
    }

    pub fn describe(&self) -> String {
        match self {
            LoopSpec::Circle { sweep, turns, fixed, .. } => {
                let fixed: Vec<String> = fixed.iter().map(|(k, v)| format!("{k}={}", v.0)).collect();
                format!("{sweep}-circle x{turns} [{}]", fixed.join(" "))
            }
            LoopSpec::Csv { path } => format!("csv:{}", path.display()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Resolution {
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_grid")]
    pub grid: usize,
    #[serde(default = "default_connection_step")]
    pub connection_step: f64,
    #[serde(default = "default_curvature_step")]
    pub curvature_step: f64,
}

fn default_samples() -> usize {
    DEFAULT_LOOP_SAMPLES
}
fn default_grid() -> usize {
    DEFAULT_SURFACE_GRID
}
fn default_connection_step() -> f64 {
    DEFAULT_CONNECTION_STEP
}
fn default_curvature_step() -> f64 {
    DEFAULT_CURVATURE_STEP
}

impl Default for Resolution {
    fn default() -> Self {
        Self {
            samples: default_samples(),
            grid: default_grid(),
            connection_step: default_connection_step(),
            curvature_step: default_curvature_step(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSettings {
    #[serde(rename = "T", default = "default_total_time")]
    pub total_time: f64,
    /// Defaults to `max(1000, ceil(T / 1e-3))`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
}

fn default_total_time() -> f64 {
    DEFAULT_TOTAL_TIME
}

impl Default for OracleSettings {
    fn default() -> Self {
        Self { total_time: DEFAULT_TOTAL_TIME, steps: None }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSettings {
    /// Standard output when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub family: String,
    pub method: Method,
    #[serde(rename = "loop")]
    pub loop_spec: LoopSpec,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub resolution: Resolution,
    #[serde(default)]
    pub oracle: OracleSettings,
    #[serde(default, skip_serializing)]
    pub output: OutputSettings,
}

impl ExperimentConfig {
    pub fn new(family: &str, method: Method, loop_spec: LoopSpec) -> Self {
        Self {
            id: None,
            family: family.to_string(),
            method,
            loop_spec,
            seed: 0,
            resolution: Resolution::default(),
            oracle: OracleSettings::default(),
            output: OutputSettings::default(),
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(format!("config: {e}")))
    }

    /// Reads a config file; a relative CSV loop path is resolved against the
    /// file's directory.
    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::from_toml_str(&text)?;
        if let LoopSpec::Csv { path: csv } = &mut cfg.loop_spec {
            if csv.is_relative() {
                if let Some(dir) = path.parent() {
                    *csv = dir.join(&*csv);
                }
            }
        }
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Compact single-line form embedded in every result record.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn experiment_id(&self) -> String {
        self.id
            .clone()
            .unwrap_or_else(|| format!("{}:{}:{}", self.family, self.method.as_str(), self.loop_spec.describe()))
    }

    /// Checks everything that can be checked without computing.
    pub fn validate(&self) -> Result<ValidatedLoop, CliError> {
        let family = family_by_id(&self.family).map_err(|e| CliError::Config(e.to_string()))?;
        let r = &self.resolution;
        if r.samples < berryphase::loops::MIN_LOOP_SAMPLES {
            return Err(CliError::Config(format!(
                "resolution.samples must be at least {}",
                berryphase::loops::MIN_LOOP_SAMPLES
            )));
        }
        if r.grid < berryphase::loops::MIN_SURFACE_GRID {
            return Err(CliError::Config(format!(
                "resolution.grid must be at least {}",
                berryphase::loops::MIN_SURFACE_GRID
            )));
        }
        for (name, h) in [("connection_step", r.connection_step), ("curvature_step", r.curvature_step)] {
            if !(h > 0.0 && h.is_finite()) {
                return Err(CliError::Config(format!("resolution.{name} must be positive")));
            }
        }
        if matches!(self.method, Method::Schrodinger | Method::All) {
            if !(self.oracle.total_time > 0.0 && self.oracle.total_time.is_finite()) {
                return Err(CliError::Config("oracle.T must be positive".into()));
            }
            if let Some(steps) = self.oracle.steps {
                if steps < berryphase::oracle::MIN_STEPS {
                    return Err(CliError::Config(format!(
                        "oracle.steps must be at least {}",
                        berryphase::oracle::MIN_STEPS
                    )));
                }
            }
        }
        let chart = family.chart().clone();
        match &self.loop_spec {
            LoopSpec::Circle { sweep, turns, fixed, radial, radial_from } => {
                let sweep_idx = coordinate_index(&chart, sweep)?;
                if chart.coordinate(sweep_idx).period().is_none() {
                    return Err(CliError::Config(format!("cannot sweep `{sweep}`: it is not a periodic coordinate")));
                }
                if *turns == 0 {
                    return Err(CliError::Config("loop.turns must be non-zero".into()));
                }
                let mut base = vec![0.0; chart.dim()];
                for (name, value) in fixed {
                    let idx = coordinate_index(&chart, name)?;
                    if idx == sweep_idx {
                        return Err(CliError::Config(format!("`{name}` is swept by the loop and cannot be fixed")));
                    }
                    base[idx] = value.0;
                }
                for (idx, c) in chart.coordinates().iter().enumerate() {
                    if idx != sweep_idx && !fixed.contains_key(&c.name) {
                        return Err(CliError::Config(format!("loop leaves `{}` unset", c.name)));
                    }
                }
                let surface = if matches!(self.method, Method::Surface | Method::All) {
                    let name = match radial {
                        Some(r) => r.clone(),
                        None => default_radial(&chart, sweep_idx)?,
                    };
                    let ridx = coordinate_index(&chart, &name)?;
                    if ridx == sweep_idx {
                        return Err(CliError::Config("loop.radial must differ from loop.sweep".into()));
                    }
                    let from = radial_from.map_or(chart.coordinate(ridx).lower, |a| a.0);
                    Some((ridx, from))
                } else {
                    None
                };
                Ok(ValidatedLoop {
                    family,
                    chart,
                    kind: LoopKind::Circle { base, sweep: sweep_idx, turns: *turns, surface },
                })
            }
            LoopSpec::Csv { path } => {
                if matches!(self.method, Method::Surface | Method::All) {
                    return Err(CliError::Config(
                        "the surface method needs a circle loop (a CSV loop does not define a patch)".into(),
                    ));
                }
                Ok(ValidatedLoop { family, chart, kind: LoopKind::Csv(path.clone()) })
            }
        }
    }
}

fn coordinate_index(chart: &ParameterChart, name: &str) -> Result<usize, CliError> {
    chart.index_of(name).map_err(|_| {
        CliError::Config(format!(
            "unknown coordinate `{name}` (chart has {})",
            chart.names().collect::<Vec<_>>().join(", ")
        ))
    })
}

/// The polar partner of each periodic coordinate: theta for phi, g for gamma.
fn default_radial(chart: &ParameterChart, sweep: usize) -> Result<String, CliError> {
    let partner = match chart.coordinate(sweep).name.as_str() {
        "phi" => "theta",
        "gamma" => "g",
        other => {
            return Err(CliError::Config(format!(
                "no default radial coordinate for a `{other}` sweep; set loop.radial"
            )))
        }
    };
    Ok(partner.to_string())
}

pub struct ValidatedLoop {
    pub family: std::sync::Arc<dyn StateFamily>,
    pub chart: ParameterChart,
    pub kind: LoopKind,
}

pub enum LoopKind {
    Circle {
        base: Vec<f64>,
        sweep: usize,
        turns: i32,
        /// Radial coordinate index and inner edge, when a patch is needed.
        surface: Option<(usize, f64)>,
    },
    Csv(PathBuf),
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    const SAMPLE: &str = r#"
family = "su3-spin-1"
method = "surface"
seed = 7

[loop]
kind = "circle"
sweep = "gamma"
radial = "g"
radial_from = 0
fixed = { theta = "pi/3", phi = 0.5, g = "pi/6" }

[resolution]
grid = 128

[oracle]
T = 500
"#;

    #[test]
    fn parses_expressions_and_defaults() {
        let cfg = ExperimentConfig::from_toml_str(SAMPLE).unwrap();
        assert_eq!(cfg.method, Method::Surface);
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.resolution.grid, 128);
        assert_eq!(cfg.resolution.samples, DEFAULT_LOOP_SAMPLES);
        assert_eq!(cfg.oracle.total_time, 500.0);
        match &cfg.loop_spec {
            LoopSpec::Circle { fixed, turns, .. } => {
                assert_eq!(fixed["theta"].0, PI / 3.0);
                assert_eq!(fixed["g"].0, PI / 6.0);
                assert_eq!(*turns, 1);
            }
            _ => panic!("expected circle"),
        }
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn toml_round_trip_is_exact() {
        let cfg = ExperimentConfig::from_toml_str(SAMPLE).unwrap();
        let again = ExperimentConfig::from_toml_str(&cfg.to_toml()).unwrap();
        assert_eq!(cfg, again);
        let json: ExperimentConfig = serde_json::from_str(&cfg.to_json()).unwrap();
        assert_eq!(cfg, json);
    }

    #[test]
    fn loop_flag() {
        let spec = LoopSpec::parse_flag("sweep=phi, theta=pi/2, turns=-2").unwrap();
        assert_eq!(
            spec,
            LoopSpec::Circle {
                sweep: "phi".into(),
                turns: -2,
                fixed: [("theta".to_string(), Angle(PI / 2.0))].into(),
                radial: None,
                radial_from: None,
            }
        );
        assert_eq!(LoopSpec::parse_flag("data/loop.CSV").unwrap(), LoopSpec::Csv { path: "data/loop.CSV".into() });
        assert!(LoopSpec::parse_flag("theta=1").is_err());
        assert!(LoopSpec::parse_flag("sweep=phi,theta").is_err());
        assert!(LoopSpec::parse_flag("sweep=phi,theta=pi/").is_err());
    }

    fn circle(family: &str, method: Method, flag: &str) -> ExperimentConfig {
        ExperimentConfig::new(family, method, LoopSpec::parse_flag(flag).unwrap())
    }

    #[test]
    fn validation_errors_are_config_errors() {
        let bad = [
            circle("su4-spin-1", Method::Line, "sweep=phi,theta=1"),
            circle("su2-spin-half", Method::Line, "sweep=theta,phi=1"),
            circle("su2-spin-half", Method::Line, "sweep=phi"),
            circle("su2-spin-half", Method::Line, "sweep=phi,theta=1,phi=2"),
            circle("su2-spin-half", Method::Line, "sweep=phi,theta=1,turns=0"),
            circle("su2-spin-half", Method::Line, "sweep=phi,theta=1,psi=2"),
            circle("su3-spin-1", Method::Surface, "sweep=gamma,theta=1,phi=0,g=0.3,radial=gamma"),
            ExperimentConfig::new("su2-spin-1", Method::All, LoopSpec::Csv { path: "x.csv".into() }),
        ];
        for cfg in bad {
            let err = cfg.validate().err().unwrap_or_else(|| panic!("{cfg:?} validated"));
            assert_eq!(err.exit_code(), 2, "{err}");
        }
        let mut cfg = circle("su2-spin-half", Method::Line, "sweep=phi,theta=1");
        cfg.resolution.samples = 4;
        assert!(cfg.validate().is_err());
        let mut cfg = circle("su2-spin-half", Method::Schrodinger, "sweep=phi,theta=1");
        cfg.oracle.total_time = -1.0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn unknown_method_and_keys_rejected() {
        assert!(Method::parse("wilson").is_err());
        let text =
            "family = \"su2-spin-1\"\nmethod = \"line\"\ncolour = 1\n[loop]\nkind = \"circle\"\nsweep = \"phi\"\n";
        assert!(ExperimentConfig::from_toml_str(text).is_err());
        let text = "family = \"su2-spin-1\"\nmethod = \"wilson\"\n[loop]\nkind = \"circle\"\nsweep = \"phi\"\n";
        assert!(ExperimentConfig::from_toml_str(text).is_err());
    }
}
