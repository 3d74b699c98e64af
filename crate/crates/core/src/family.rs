//! Parameterized families of unit state vectors.
//!
//! The three built-in families are the spin-1/2 and spin-1 coherent states
//! on the sphere and the spin-1 coherent state of SU(3) in real
//! parameterization. Their amplitudes are written out exactly as given, with
//! no gauge fixing, so the spin-1/2 section is singular at `theta = 0`.

use std::f64::consts::FRAC_1_SQRT_2;
use std::sync::Arc;

use num_complex::Complex64;

use crate::chart::ParameterChart;
use crate::error::{Error, Result};
use crate::state::StateVector;

pub const SU2_SPIN_HALF: &str = "su2-spin-half";
pub const SU2_SPIN_ONE: &str = "su2-spin-1";
pub const SU3_SPIN_ONE: &str = "su3-spin-1";

pub const BUILTIN_FAMILIES: [&str; 3] = [SU2_SPIN_HALF, SU2_SPIN_ONE, SU3_SPIN_ONE];

/// A smooth map from chart coordinates to state vectors.
///
/// Implementations must be pure: the same coordinates always give the same
/// amplitudes, and evaluation may happen from several threads at once.
pub trait StateFamily: Send + Sync {
    fn id(&self) -> &str;

    fn chart(&self) -> &ParameterChart;

    fn dimension(&self) -> usize;

    /// Raw amplitudes at `coords`. Callers normally go through [`StateFamily::evaluate`].
    fn amplitudes(&self, coords: &[f64]) -> Vec<Complex64>;

    /// Closed-form connection components in chart order, if known.
    fn analytic_connection(&self, _coords: &[f64]) -> Option<Vec<f64>> {
        None
    }

    /// Closed-form curvature component `F_kl`, if known.
    fn analytic_curvature(&self, _coords: &[f64], _k: usize, _l: usize) -> Option<f64> {
        None
    }

    fn evaluate(&self, coords: &[f64]) -> Result<StateVector> {
        self.chart().check_dim(coords)?;
        let amps = self.amplitudes(coords);
        if amps.len() != self.dimension() {
            return Err(Error::Dimension { expected: self.dimension(), actual: amps.len() });
        }
        StateVector::new(amps).map_err(|e| Error::Evaluation { coords: coords.to_vec(), reason: e.to_string() })
    }
}

/// Connection covector of a family with a closed form.
pub fn analytic_connection(family: &dyn StateFamily, coords: &[f64]) -> Result<Vec<f64>> {
    family.chart().check_dim(coords)?;
    family.analytic_connection(coords).ok_or_else(|| Error::UnsupportedFamily(family.id().to_string()))
}

pub fn family_by_id(id: &str) -> Result<Arc<dyn StateFamily>> {
    match id {
        SU2_SPIN_HALF => Ok(Arc::new(SpinHalf::new())),
        SU2_SPIN_ONE => Ok(Arc::new(SpinOne::new())),
        SU3_SPIN_ONE => Ok(Arc::new(Su3SpinOne::new())),
        other => Err(Error::UnknownFamily(other.to_string())),
    }
}

fn half_angle_squares(theta: f64) -> (f64, f64) {
    let (s, c) = (0.5 * theta).sin_cos();
    (s * s, c * c)
}

fn unit(angle: f64) -> Complex64 {
    Complex64::new(angle.cos(), angle.sin())
}

fn unit_conj(angle: f64) -> Complex64 {
    Complex64::new(angle.cos(), -angle.sin())
}

fn antisym(k: usize, l: usize, a: usize, b: usize, value: f64) -> Option<f64> {
    if (k, l) == (a, b) {
        Some(value)
    } else if (k, l) == (b, a) {
        Some(-value)
    } else {
        None
    }
}

/// `(cos(theta/2) e^{-i phi}, sin(theta/2))`.
#[derive(Debug, Clone)]
pub struct SpinHalf {
    chart: ParameterChart,
}

impl SpinHalf {
    pub fn new() -> Self {
        Self { chart: ParameterChart::sphere() }
    }
}

impl Default for SpinHalf {
    fn default() -> Self {
        Self::new()
    }
}

impl StateFamily for SpinHalf {
    fn id(&self) -> &str {
        SU2_SPIN_HALF
    }

    fn chart(&self) -> &ParameterChart {
        &self.chart
    }

    fn dimension(&self) -> usize {
        2
    }

    fn amplitudes(&self, p: &[f64]) -> Vec<Complex64> {
        let (theta, phi) = (p[0], p[1]);
        let (s, c) = (0.5 * theta).sin_cos();
        vec![unit_conj(phi) * c, Complex64::new(s, 0.0)]
    }

    fn analytic_connection(&self, p: &[f64]) -> Option<Vec<f64>> {
        let (_, c2) = half_angle_squares(p[0]);
        Some(vec![0.0, c2])
    }

    fn analytic_curvature(&self, p: &[f64], k: usize, l: usize) -> Option<f64> {
        if k == l {
            return Some(0.0);
        }
        antisym(k, l, 0, 1, -0.5 * p[0].sin())
    }
}

/// `(e^{i phi} sin^2(theta/2), sin(theta)/sqrt2, e^{-i phi} cos^2(theta/2))`.
#[derive(Debug, Clone)]
pub struct SpinOne {
    chart: ParameterChart,
}

impl SpinOne {
    pub fn new() -> Self {
        Self { chart: ParameterChart::sphere() }
    }
}

impl Default for SpinOne {
    fn default() -> Self {
        Self::new()
    }
}

impl StateFamily for SpinOne {
    fn id(&self) -> &str {
        SU2_SPIN_ONE
    }

    fn chart(&self) -> &ParameterChart {
        &self.chart
    }

    fn dimension(&self) -> usize {
        3
    }

    fn amplitudes(&self, p: &[f64]) -> Vec<Complex64> {
        let (theta, phi) = (p[0], p[1]);
        let (s2, c2) = half_angle_squares(theta);
        vec![unit(phi) * s2, Complex64::new(theta.sin() * FRAC_1_SQRT_2, 0.0), unit_conj(phi) * c2]
    }

    fn analytic_connection(&self, p: &[f64]) -> Option<Vec<f64>> {
        Some(vec![0.0, p[0].cos()])
    }

    fn analytic_curvature(&self, p: &[f64], k: usize, l: usize) -> Option<f64> {
        if k == l {
            return Some(0.0);
        }
        antisym(k, l, 0, 1, -p[0].sin())
    }
}

/// Spin-1 coherent state of SU(3) over `(theta, phi, g, gamma)`. At
/// `g = gamma = 0` the amplitudes coincide bit for bit with [`SpinOne`].
#[derive(Debug, Clone)]
pub struct Su3SpinOne {
    chart: ParameterChart,
}

impl Su3SpinOne {
    pub fn new() -> Self {
        Self { chart: ParameterChart::su3() }
    }
}

impl Default for Su3SpinOne {
    fn default() -> Self {
        Self::new()
    }
}

impl StateFamily for Su3SpinOne {
    fn id(&self) -> &str {
        SU3_SPIN_ONE
    }

    fn chart(&self) -> &ParameterChart {
        &self.chart
    }

    fn dimension(&self) -> usize {
        3
    }

    fn amplitudes(&self, p: &[f64]) -> Vec<Complex64> {
        let (theta, phi, g, gamma) = (p[0], p[1], p[2], p[3]);
        let (s2, c2) = half_angle_squares(theta);
        let (sg, cg) = g.sin_cos();
        let minus = unit_conj(gamma);
        let plus = unit(gamma);
        vec![
            unit(phi) * (minus * (s2 * cg) - plus * (c2 * sg)),
            (minus * cg + plus * sg) * (theta.sin() * FRAC_1_SQRT_2),
            unit_conj(phi) * (minus * (c2 * cg) - plus * (s2 * sg)),
        ]
    }

    fn analytic_connection(&self, p: &[f64]) -> Option<Vec<f64>> {
        let cos2g = (2.0 * p[2]).cos();
        Some(vec![0.0, p[0].cos() * cos2g, 0.0, cos2g])
    }

    fn analytic_curvature(&self, p: &[f64], k: usize, l: usize) -> Option<f64> {
        if k == l {
            return Some(0.0);
        }
        let (theta, g) = (p[0], p[2]);
        let sin2g = (2.0 * g).sin();
        antisym(k, l, 0, 1, -theta.sin() * (2.0 * g).cos())
            .or_else(|| antisym(k, l, 1, 2, 2.0 * theta.cos() * sin2g))
            .or_else(|| antisym(k, l, 2, 3, -2.0 * sin2g))
            .or(Some(0.0))
    }
}

type AmplitudeFn = dyn Fn(&[f64]) -> Vec<Complex64> + Send + Sync;
type ConnectionFn = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;

/// A user-supplied family given as a black-box evaluator over a chart.
pub struct CustomFamily {
    id: String,
    chart: ParameterChart,
    dimension: usize,
    eval: Box<AmplitudeFn>,
    connection: Option<Box<ConnectionFn>>,
}

impl CustomFamily {
    pub fn new<F>(id: &str, chart: ParameterChart, dimension: usize, eval: F) -> Self
    where
        F: Fn(&[f64]) -> Vec<Complex64> + Send + Sync + 'static,
    {
        Self { id: id.to_string(), chart, dimension, eval: Box::new(eval), connection: None }
    }

    pub fn with_connection<F>(mut self, connection: F) -> Self
    where
        F: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        self.connection = Some(Box::new(connection));
        self
    }
}

impl StateFamily for CustomFamily {
    fn id(&self) -> &str {
        &self.id
    }

    fn chart(&self) -> &ParameterChart {
        &self.chart
    }

    fn dimension(&self) -> usize {
        self.dimension
    }

    fn amplitudes(&self, coords: &[f64]) -> Vec<Complex64> {
        (self.eval)(coords)
    }

    fn analytic_connection(&self, coords: &[f64]) -> Option<Vec<f64>> {
        self.connection.as_ref().map(|f| f(coords))
    }
}

type GaugeFn = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// The section `e^{i alpha(lambda)} phi(lambda)` of another family.
pub struct GaugeTransformed {
    id: String,
    inner: Arc<dyn StateFamily>,
    alpha: Box<GaugeFn>,
}

impl GaugeTransformed {
    pub fn new<F>(inner: Arc<dyn StateFamily>, alpha: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        let id = format!("{}+gauge", inner.id());
        Self { id, inner, alpha: Box::new(alpha) }
    }
}

impl StateFamily for GaugeTransformed {
    fn id(&self) -> &str {
        &self.id
    }

    fn chart(&self) -> &ParameterChart {
        self.inner.chart()
    }

    fn dimension(&self) -> usize {
        self.inner.dimension()
    }

    fn amplitudes(&self, coords: &[f64]) -> Vec<Complex64> {
        let phase = unit((self.alpha)(coords));
        self.inner.amplitudes(coords).into_iter().map(|z| z * phase).collect()
    }
}
