//! Closed loops, rectangular surface patches, and the three loop-phase
//! integrators: connection line integral, curvature surface integral, and
//! the discrete overlap (Pancharatnam) product.

use std::f64::consts::PI;
use std::fmt;
use std::io::Read;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::chart::ParameterChart;
use crate::error::{Error, Result};
use crate::family::StateFamily;
use crate::geometry::{berry_connection_fd, curvature_component_fd, FdSteps, DEFAULT_CONNECTION_STEP};
use crate::state::{dot, StateVector};

pub const DEFAULT_LOOP_SAMPLES: usize = 2048;
pub const DEFAULT_SURFACE_GRID: usize = 256;
pub const MIN_LOOP_SAMPLES: usize = 16;
pub const MIN_SURFACE_GRID: usize = 8;
pub const DEFAULT_CLOSURE_TOL: f64 = 1e-12;
/// Consecutive overlaps smaller than this mean the sampling is too coarse.
pub const MIN_OVERLAP: f64 = 1e-10;

const TWO_PI: f64 = 2.0 * PI;

/// A phase in radians. Only `e^{i raw}` is physical.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseValue {
    raw: f64,
}

impl PhaseValue {
    pub fn new(raw: f64) -> Self {
        Self { raw }
    }

    pub fn raw(&self) -> f64 {
        self.raw
    }

    /// Representative in `(-pi, pi]`.
    pub fn canonical(&self) -> f64 {
        canonical_phase(self.raw)
    }

    pub fn deviation_from(&self, other: f64) -> f64 {
        phase_deviation(self.raw, other)
    }
}

impl From<PhaseValue> for f64 {
    fn from(p: PhaseValue) -> f64 {
        p.raw
    }
}

impl fmt::Display for PhaseValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.12} (mod 2pi: {:.12})", self.raw, self.canonical())
    }
}

pub fn canonical_phase(x: f64) -> f64 {
    let r = x - TWO_PI * (x / TWO_PI).round();
    if r <= -PI {
        r + TWO_PI
    } else if r > PI {
        r - TWO_PI
    } else {
        r
    }
}

/// `|e^{i(a-b)} - 1|`
pub fn phase_deviation(a: f64, b: f64) -> f64 {
    2.0 * (0.5 * (a - b)).sin().abs()
}

pub fn phases_equal_mod_2pi(a: f64, b: f64, tol: f64) -> bool {
    assert!(tol > 0.0, "tolerance must be positive");
    phase_deviation(a, b) <= tol
}

type Sampler = dyn Fn(f64) -> Vec<f64> + Send + Sync;

#[derive(Clone)]
enum Path_ {
    Function(Arc<Sampler>),
    Samples(Arc<Vec<Vec<f64>>>),
}

/// A closed curve in parameter space, given either by a sampler over
/// `t in [0, 1]` or by an explicit list of points whose last entry repeats
/// the first.
#[derive(Clone)]
pub struct Loop {
    chart: ParameterChart,
    path: Path_,
    closure_tol: f64,
}

impl fmt::Debug for Loop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.path {
            Path_::Function(_) => "function".to_string(),
            Path_::Samples(s) => format!("{} samples", s.len()),
        };
        f.debug_struct("Loop")
            .field("chart", &self.chart.names().collect::<Vec<_>>())
            .field("path", &kind)
            .field("closure_tol", &self.closure_tol)
            .finish()
    }
}

impl Loop {
    pub fn from_fn<F>(chart: ParameterChart, sampler: F) -> Self
    where
        F: Fn(f64) -> Vec<f64> + Send + Sync + 'static,
    {
        Self { chart, path: Path_::Function(Arc::new(sampler)), closure_tol: DEFAULT_CLOSURE_TOL }
    }

    /// Circle sweeping the periodic coordinate `sweep` through `turns` full
    /// periods, starting at `base`, with every other coordinate held fixed.
    pub fn circle(chart: ParameterChart, base: Vec<f64>, sweep: usize, turns: i32) -> Result<Self> {
        chart.check_dim(&base)?;
        let coord = chart
            .coordinates()
            .get(sweep)
            .ok_or_else(|| Error::InvalidLoop(format!("no coordinate with index {sweep}")))?;
        let period = coord.period().ok_or_else(|| {
            Error::InvalidLoop(format!("coordinate `{}` is not periodic, so a sweep cannot close", coord.name))
        })?;
        if turns == 0 {
            return Err(Error::InvalidLoop("a circle needs a non-zero number of turns".into()));
        }
        let span = f64::from(turns) * period;
        Ok(Self::from_fn(chart, move |t| {
            let mut p = base.clone();
            p[sweep] += span * t;
            p
        }))
    }

    pub fn from_samples(chart: ParameterChart, samples: Vec<Vec<f64>>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidLoop("a sampled loop needs at least two rows".into()));
        }
        for s in &samples {
            chart.check_dim(s)?;
            if s.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidLoop("non-finite coordinate in loop samples".into()));
            }
        }
        Ok(Self { chart, path: Path_::Samples(Arc::new(samples)), closure_tol: DEFAULT_CLOSURE_TOL })
    }

    /// Reads a loop from CSV: a header row naming every chart coordinate
    /// (any order), then one row per sample, the first row repeated last.
    pub fn from_csv_reader<R: Read>(chart: ParameterChart, reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers().map_err(|e| Error::Csv(e.to_string()))?.clone();
        if headers.len() != chart.dim() {
            return Err(Error::Csv(format!(
                "header has {} columns but the chart has {} coordinates",
                headers.len(),
                chart.dim()
            )));
        }
        let mut column_of = vec![usize::MAX; chart.dim()];
        for (col, name) in headers.iter().enumerate() {
            let idx = chart.index_of(name).map_err(|e| Error::Csv(e.to_string()))?;
            if column_of[idx] != usize::MAX {
                return Err(Error::Csv(format!("coordinate `{name}` appears twice in the header")));
            }
            column_of[idx] = col;
        }
        let mut samples = Vec::new();
        for (row, record) in rdr.records().enumerate() {
            let record = record.map_err(|e| Error::Csv(e.to_string()))?;
            let mut point = Vec::with_capacity(chart.dim());
            for &col in &column_of {
                let field = record.get(col).unwrap_or("");
                let value: f64 =
                    field.parse().map_err(|_| Error::Csv(format!("row {}: `{field}` is not a number", row + 1)))?;
                point.push(value);
            }
            samples.push(point);
        }
        let lp = Self::from_samples(chart, samples)?;
        lp.check_closed()?;
        Ok(lp)
    }

    pub fn from_csv_path(chart: ParameterChart, path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::Csv(format!("{}: {e}", path.display())))?;
        Self::from_csv_reader(chart, file)
    }

    pub fn with_closure_tolerance(mut self, tol: f64) -> Self {
        self.closure_tol = tol;
        self
    }

    pub fn chart(&self) -> &ParameterChart {
        &self.chart
    }

    pub fn is_sampled(&self) -> bool {
        matches!(self.path, Path_::Samples(_))
    }

    /// Same curve traversed backwards.
    pub fn reversed(&self) -> Self {
        let path = match &self.path {
            Path_::Function(f) => {
                let f = f.clone();
                Path_::Function(Arc::new(move |t| f(1.0 - t)))
            }
            Path_::Samples(s) => Path_::Samples(Arc::new(s.iter().rev().cloned().collect())),
        };
        Self { chart: self.chart.clone(), path, closure_tol: self.closure_tol }
    }

    /// Same curve with `t -> g(t)`; `g` must map `[0,1]` onto itself with
    /// `g(0) = 0`, `g(1) = 1`.
    pub fn reparameterized<G>(&self, g: G) -> Self
    where
        G: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let inner = self.clone();
        Self {
            chart: self.chart.clone(),
            path: Path_::Function(Arc::new(move |t| inner.point_at(g(t)))),
            closure_tol: self.closure_tol,
        }
    }

    /// Point at `t in [0, 1]`. Sampled loops are interpolated linearly
    /// (periodic coordinates along the short way round).
    pub fn point_at(&self, t: f64) -> Vec<f64> {
        match &self.path {
            Path_::Function(f) => f(t),
            Path_::Samples(s) => {
                let segments = s.len() - 1;
                let x = t.clamp(0.0, 1.0) * segments as f64;
                let j = (x.floor() as usize).min(segments - 1);
                let frac = x - j as f64;
                (0..self.chart.dim())
                    .map(|i| s[j][i] + frac * self.chart.displacement(i, s[j][i], s[j + 1][i]))
                    .collect()
            }
        }
    }

    pub fn check_closed(&self) -> Result<()> {
        let (start, end) = match &self.path {
            Path_::Function(f) => (f(0.0), f(1.0)),
            Path_::Samples(s) => (s[0].clone(), s[s.len() - 1].clone()),
        };
        self.chart.check_dim(&start)?;
        self.chart.check_dim(&end)?;
        let gap = self.chart.distance_max(&start, &end);
        if !(gap <= self.closure_tol) {
            return Err(Error::OpenLoop { gap, tolerance: self.closure_tol });
        }
        Ok(())
    }

    /// `n + 1` nodes at `t_j = j/n` (the given rows for a sampled loop), after
    /// checking closure and the minimum resolution.
    pub fn nodes(&self, n: usize) -> Result<Vec<Vec<f64>>> {
        self.check_closed()?;
        let nodes = match &self.path {
            Path_::Function(f) => {
                if n < MIN_LOOP_SAMPLES {
                    return Err(Error::TooFewSamples { min: MIN_LOOP_SAMPLES, actual: n });
                }
                (0..=n).map(|j| f(j as f64 / n as f64)).collect::<Vec<_>>()
            }
            Path_::Samples(s) => {
                if s.len() - 1 < MIN_LOOP_SAMPLES {
                    return Err(Error::TooFewSamples { min: MIN_LOOP_SAMPLES, actual: s.len() - 1 });
                }
                s.as_ref().clone()
            }
        };
        for p in &nodes {
            self.chart.check_dim(p)?;
        }
        Ok(nodes)
    }

    fn displacement(&self, a: &[f64], b: &[f64]) -> Vec<f64> {
        (0..self.chart.dim()).map(|i| self.chart.displacement(i, a[i], b[i])).collect()
    }
}

fn check_family_chart(family: &dyn StateFamily, chart: &ParameterChart) -> Result<()> {
    if family.chart() != chart {
        return Err(Error::InvalidLoop(format!(
            "loop chart ({}) does not match family `{}`",
            chart.names().collect::<Vec<_>>().join(", "),
            family.id()
        )));
    }
    Ok(())
}

/// How the line integral obtains the connection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConnectionSource {
    FiniteDifference { step: f64 },
    Analytic,
}

impl Default for ConnectionSource {
    fn default() -> Self {
        ConnectionSource::FiniteDifference { step: DEFAULT_CONNECTION_STEP }
    }
}

/// `∮ A_k dλ^k` by the composite trapezoid rule on the loop's chords.
pub fn line_integral_phase(family: &dyn StateFamily, lp: &Loop, n_samples: usize) -> Result<PhaseValue> {
    line_integral_phase_with(family, lp, n_samples, ConnectionSource::default())
}

pub fn line_integral_phase_with(
    family: &dyn StateFamily,
    lp: &Loop,
    n_samples: usize,
    source: ConnectionSource,
) -> Result<PhaseValue> {
    check_family_chart(family, lp.chart())?;
    let nodes = lp.nodes(n_samples)?;
    let connections: Vec<Vec<f64>> = nodes
        .par_iter()
        .map(|p| match source {
            ConnectionSource::FiniteDifference { step } => {
                berry_connection_fd(family, p, step).map(|a| a.components().to_vec())
            }
            ConnectionSource::Analytic => crate::family::analytic_connection(family, p),
        })
        .collect::<Result<_>>()?;
    let mut total = 0.0;
    for j in 0..nodes.len() - 1 {
        let d = lp.displacement(&nodes[j], &nodes[j + 1]);
        let a = &connections[j];
        let b = &connections[j + 1];
        total += (0..d.len()).map(|k| 0.5 * (a[k] + b[k]) * d[k]).sum::<f64>();
    }
    if !total.is_finite() {
        return Err(Error::Evaluation { coords: nodes[0].clone(), reason: "non-finite line integral".into() });
    }
    Ok(PhaseValue::new(total))
}

/// `-arg prod_j <phi_j|phi_{j+1}>` over a closed cycle of states (the last
/// state connects back to the first). Independent of any per-state phase.
pub fn overlap_phase_of_states(states: &[StateVector]) -> Result<PhaseValue> {
    if states.is_empty() {
        return Err(Error::InvalidLoop("no states".into()));
    }
    let n = states.len();
    let mut overlaps = Vec::with_capacity(n);
    for j in 0..n {
        let next = (j + 1) % n;
        let (a, b) = (&states[j], &states[next]);
        if a.len() != b.len() {
            return Err(Error::Dimension { expected: a.len(), actual: b.len() });
        }
        let z = dot(a.as_slice(), b.as_slice());
        if !(z.norm() >= MIN_OVERLAP) {
            return Err(Error::PathTooCoarse { index: j, next, magnitude: z.norm() });
        }
        overlaps.push(z);
    }
    let product = mirror_product(&overlaps);
    Ok(PhaseValue::new(-product.im.atan2(product.re)))
}

/// Product over a balanced tree whose shape is mirror-symmetric, so a
/// reversed list gives the same rounding.
fn mirror_product(z: &[Complex64]) -> Complex64 {
    match z.len() {
        0 => Complex64::new(1.0, 0.0),
        1 => z[0],
        n => {
            let half = n / 2;
            if n % 2 == 0 {
                mirror_product(&z[..half]) * mirror_product(&z[half..])
            } else {
                (mirror_product(&z[..half]) * mirror_product(&z[half + 1..])) * z[half]
            }
        }
    }
}

pub fn overlap_product_phase(family: &dyn StateFamily, lp: &Loop, n_samples: usize) -> Result<PhaseValue> {
    check_family_chart(family, lp.chart())?;
    let nodes = lp.nodes(n_samples)?;
    let states: Vec<StateVector> =
        nodes[..nodes.len() - 1].par_iter().map(|p| family.evaluate(p)).collect::<Result<_>>()?;
    overlap_phase_of_states(&states)
}

/// Axis-aligned rectangle in two chart coordinates, the others held fixed.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfacePatch {
    chart: ParameterChart,
    base: Vec<f64>,
    first: usize,
    second: usize,
    first_range: (f64, f64),
    second_range: (f64, f64),
}

impl SurfacePatch {
    pub fn new(
        chart: ParameterChart,
        base: Vec<f64>,
        first: (&str, f64, f64),
        second: (&str, f64, f64),
    ) -> Result<Self> {
        chart.check_dim(&base)?;
        let i = chart.index_of(first.0)?;
        let j = chart.index_of(second.0)?;
        if i == j {
            return Err(Error::InvalidPatch("the two coordinates must differ".into()));
        }
        for (name, a, b) in [first, second] {
            if !(a.is_finite() && b.is_finite() && b > a) {
                return Err(Error::InvalidPatch(format!("degenerate range [{a}, {b}] for `{name}`")));
            }
        }
        Ok(Self {
            chart,
            base,
            first: i,
            second: j,
            first_range: (first.1, first.2),
            second_range: (second.1, second.2),
        })
    }

    pub fn chart(&self) -> &ParameterChart {
        &self.chart
    }

    pub fn coordinates(&self) -> (usize, usize) {
        (self.first, self.second)
    }

    pub fn ranges(&self) -> ((f64, f64), (f64, f64)) {
        (self.first_range, self.second_range)
    }

    fn point(&self, u: f64, v: f64) -> Vec<f64> {
        let mut p = self.base.clone();
        p[self.first] = u;
        p[self.second] = v;
        p
    }

    /// Counterclockwise boundary in the ordered pair (first, second).
    pub fn boundary_loop(&self) -> Loop {
        let patch = self.clone();
        let ((a1, b1), (a2, b2)) = (self.first_range, self.second_range);
        Loop::from_fn(self.chart.clone(), move |t| {
            let s = 4.0 * t.clamp(0.0, 1.0);
            let (u, v) = if s < 1.0 {
                (a1 + (b1 - a1) * s, a2)
            } else if s < 2.0 {
                (b1, a2 + (b2 - a2) * (s - 1.0))
            } else if s < 3.0 {
                (b1 - (b1 - a1) * (s - 2.0), b2)
            } else {
                (a1, b2 - (b2 - a2) * (s - 3.0))
            };
            patch.point(u, v)
        })
    }
}

/// `∬ F_{first,second} d(first) d(second)` by the midpoint rule.
pub fn surface_integral_phase(
    family: &dyn StateFamily,
    patch: &SurfacePatch,
    n1: usize,
    n2: usize,
) -> Result<PhaseValue> {
    surface_integral_phase_with(family, patch, n1, n2, FdSteps::default())
}

pub fn surface_integral_phase_with(
    family: &dyn StateFamily,
    patch: &SurfacePatch,
    n1: usize,
    n2: usize,
    steps: FdSteps,
) -> Result<PhaseValue> {
    check_family_chart(family, patch.chart())?;
    for n in [n1, n2] {
        if n < MIN_SURFACE_GRID {
            return Err(Error::TooFewSamples { min: MIN_SURFACE_GRID, actual: n });
        }
    }
    let ((a1, b1), (a2, b2)) = (patch.first_range, patch.second_range);
    let (du, dv) = ((b1 - a1) / n1 as f64, (b2 - a2) / n2 as f64);
    let (k, l) = (patch.first, patch.second);
    // Rows in parallel, then summed in ascending order for reproducibility.
    let rows: Vec<f64> = (0..n1)
        .into_par_iter()
        .map(|i| {
            let u = a1 + (i as f64 + 0.5) * du;
            let mut row = 0.0;
            for j in 0..n2 {
                let v = a2 + (j as f64 + 0.5) * dv;
                row += curvature_component_fd(family, &patch.point(u, v), k, l, steps)?;
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    Ok(PhaseValue::new(rows.iter().sum::<f64>() * du * dv))
}

/// Solid angle `∮ (1 - cos theta) dphi` of a loop on the sphere.
pub fn solid_angle(lp: &Loop) -> Result<f64> {
    solid_angle_with(lp, DEFAULT_LOOP_SAMPLES)
}

pub fn solid_angle_with(lp: &Loop, n_samples: usize) -> Result<f64> {
    let theta = lp.chart().index_of("theta")?;
    let phi = lp.chart().index_of("phi")?;
    let nodes = lp.nodes(n_samples)?;
    let mut total = 0.0;
    for w in nodes.windows(2) {
        let dphi = lp.chart().displacement(phi, w[0][phi], w[1][phi]);
        total += 0.5 * ((1.0 - w[0][theta].cos()) + (1.0 - w[1][theta].cos())) * dphi;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{SpinHalf, SpinOne, Su3SpinOne};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_6};

    fn theta_circle(theta: f64) -> Loop {
        Loop::circle(ParameterChart::sphere(), vec![theta, 0.0], 1, 1).unwrap()
    }

    #[test]
    fn phase_comparison_examples() {
        assert!(phases_equal_mod_2pi(PI, -PI, 1e-9));
        assert!(phases_equal_mod_2pi(0.0, 2.0 * PI * 5.0, 1e-9));
        assert!(!phases_equal_mod_2pi(0.1, 0.2, 1e-3));
        assert_eq!(canonical_phase(-PI), PI);
        assert!((canonical_phase(3.0 * PI / 2.0) + FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn line_integral_examples() {
        let half = SpinHalf::new();
        let raw = line_integral_phase(&half, &theta_circle(FRAC_PI_2), 2048).unwrap();
        assert!((raw.raw() - PI).abs() < 1e-8);
        assert!(raw.deviation_from(-PI) < 1e-8);

        let one = SpinOne::new();
        let raw = line_integral_phase(&one, &theta_circle(FRAC_PI_3), 2048).unwrap();
        assert!((raw.raw() - PI).abs() < 1e-8);
        assert!(raw.deviation_from(-2.0 * PI * (1.0 - FRAC_PI_3.cos())) < 1e-8);

        let su3 = Su3SpinOne::new();
        let lp = Loop::circle(ParameterChart::su3(), vec![0.9, 0.4, FRAC_PI_6, 0.0], 3, 1).unwrap();
        let raw = line_integral_phase(&su3, &lp, 2048).unwrap();
        assert!((raw.raw() - PI).abs() < 1e-8);
    }

    #[test]
    fn analytic_and_fd_line_integrals_agree() {
        let lp = theta_circle(1.0);
        let fd = line_integral_phase(&SpinOne::new(), &lp, 512).unwrap();
        let an = line_integral_phase_with(&SpinOne::new(), &lp, 512, ConnectionSource::Analytic).unwrap();
        assert!((fd.raw() - an.raw()).abs() < 1e-8);
    }

    #[test]
    fn overlap_examples() {
        let half = SpinHalf::new();
        let p = overlap_product_phase(&half, &theta_circle(FRAC_PI_2), 4096).unwrap();
        assert!(p.deviation_from(-PI) < 1e-5);

        let constant = Loop::from_fn(ParameterChart::sphere(), |_| vec![1.0, 2.0]);
        let p = overlap_product_phase(&half, &constant, 64).unwrap();
        assert_eq!(p.raw(), 0.0);
    }

    #[test]
    fn overlap_detects_coarse_path() {
        // Orthogonal neighbours: (1,0) -> (0,1) at theta = 0 -> pi.
        let states = vec![StateVector::from_real(&[1.0, 0.0]).unwrap(), StateVector::from_real(&[0.0, 1.0]).unwrap()];
        assert!(matches!(overlap_phase_of_states(&states), Err(Error::PathTooCoarse { index: 0, .. })));
    }

    #[test]
    fn surface_examples() {
        let half = SpinHalf::new();
        let patch = SurfacePatch::new(
            ParameterChart::sphere(),
            vec![0.0, 0.0],
            ("theta", 0.0, FRAC_PI_2),
            ("phi", 0.0, 2.0 * PI),
        )
        .unwrap();
        let s = surface_integral_phase(&half, &patch, 64, 16).unwrap();
        assert!((s.raw() + PI).abs() < 1e-3);

        let su3 = Su3SpinOne::new();
        let patch = SurfacePatch::new(
            ParameterChart::su3(),
            vec![0.8, 0.3, 0.0, 0.0],
            ("g", 0.0, FRAC_PI_6),
            ("gamma", 0.0, 2.0 * PI),
        )
        .unwrap();
        let s = surface_integral_phase(&su3, &patch, 64, 8).unwrap();
        assert!((s.raw() + PI).abs() < 1e-3);
    }

    #[test]
    fn patch_validation() {
        let chart = ParameterChart::sphere();
        let base = vec![0.0, 0.0];
        assert!(SurfacePatch::new(chart.clone(), base.clone(), ("theta", 1.0, 1.0), ("phi", 0.0, 1.0)).is_err());
        assert!(SurfacePatch::new(chart.clone(), base.clone(), ("theta", 0.0, 1.0), ("theta", 0.0, 1.0)).is_err());
        assert!(SurfacePatch::new(chart, base, ("theta", 0.0, 1.0), ("psi", 0.0, 1.0)).is_err());
    }

    #[test]
    fn boundary_loop_is_closed_and_matches_stokes() {
        let patch = SurfacePatch::new(ParameterChart::sphere(), vec![0.0, 0.0], ("theta", 0.4, 1.2), ("phi", 0.5, 2.0))
            .unwrap();
        let lp = patch.boundary_loop();
        lp.check_closed().unwrap();
        let line = line_integral_phase(&SpinOne::new(), &lp, 4096).unwrap();
        // -∫∫ sin(theta) = -(cos 0.4 - cos 1.2) * 1.5
        let exact = -(0.4f64.cos() - 1.2f64.cos()) * 1.5;
        assert!((line.raw() - exact).abs() < 1e-8);
        let surf = surface_integral_phase(&SpinOne::new(), &patch, 128, 8).unwrap();
        assert!((surf.raw() - exact).abs() < 1e-5);
    }

    #[test]
    fn solid_angle_examples() {
        assert!((solid_angle(&theta_circle(FRAC_PI_2)).unwrap() - 2.0 * PI).abs() < 1e-12);
        assert!((solid_angle(&theta_circle(PI)).unwrap() - 4.0 * PI).abs() < 1e-12);
        assert!((solid_angle(&theta_circle(FRAC_PI_3)).unwrap() - PI).abs() < 1e-12);
    }

    #[test]
    fn open_loop_and_resolution_errors() {
        let open = Loop::from_fn(ParameterChart::sphere(), |t| vec![1.0 + t, 0.0]);
        let half = SpinHalf::new();
        assert!(matches!(line_integral_phase(&half, &open, 64), Err(Error::OpenLoop { .. })));
        assert!(matches!(overlap_product_phase(&half, &open, 64), Err(Error::OpenLoop { .. })));
        assert!(matches!(line_integral_phase(&half, &theta_circle(1.0), 8), Err(Error::TooFewSamples { .. })));
        assert!(Loop::circle(ParameterChart::sphere(), vec![1.0, 0.0], 0, 1).is_err());
        assert!(Loop::circle(ParameterChart::sphere(), vec![1.0, 0.0], 1, 0).is_err());
    }

    #[test]
    fn chart_mismatch_is_rejected() {
        let su3 = Su3SpinOne::new();
        assert!(matches!(line_integral_phase(&su3, &theta_circle(1.0), 64), Err(Error::InvalidLoop(_))));
    }

    #[test]
    fn csv_loop_round_trip() {
        let mut text = String::from("phi,theta\n");
        let n = 64;
        for j in 0..=n {
            let phi = if j == n { 0.0 } else { 2.0 * PI * j as f64 / n as f64 };
            text.push_str(&format!("{phi},{}\n", FRAC_PI_3));
        }
        let lp = Loop::from_csv_reader(ParameterChart::sphere(), text.as_bytes()).unwrap();
        assert!(lp.is_sampled());
        let phase = line_integral_phase(&SpinOne::new(), &lp, 0).unwrap();
        assert!((phase.raw() - PI).abs() < 1e-8);
        let mid = lp.point_at(0.5);
        assert!((mid[1] - PI).abs() < 1e-12);
    }

    #[test]
    fn csv_errors() {
        let chart = ParameterChart::sphere();
        let bad_header = "theta,psi\n0,0\n0,0\n";
        assert!(matches!(Loop::from_csv_reader(chart.clone(), bad_header.as_bytes()), Err(Error::Csv(_))));
        let open = "theta,phi\n1,0\n1,1\n1,2\n";
        assert!(matches!(Loop::from_csv_reader(chart.clone(), open.as_bytes()), Err(Error::OpenLoop { .. })));
        let junk = "theta,phi\n1,x\n1,0\n";
        assert!(matches!(Loop::from_csv_reader(chart, junk.as_bytes()), Err(Error::Csv(_))));
    }
}
