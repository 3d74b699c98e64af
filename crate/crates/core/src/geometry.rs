//! Berry connection and curvature by central finite differences.
//!
//! The connection is `A_k = i <phi | d_k phi>`. For an exactly normalized
//! family it is real; the real part is taken as the value and the imaginary
//! residue is kept as a diagnostic. The curvature `F_kl = d_k A_l - d_l A_k`
//! is a central difference of the finite-difference connection.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::family::StateFamily;
use crate::state::{dot, StateVector};

pub const DEFAULT_CONNECTION_STEP: f64 = 1e-5;
pub const DEFAULT_CURVATURE_STEP: f64 = 1e-4;

/// Step sizes for the two levels of differencing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdSteps {
    pub connection: f64,
    pub curvature: f64,
}

impl Default for FdSteps {
    fn default() -> Self {
        Self { connection: DEFAULT_CONNECTION_STEP, curvature: DEFAULT_CURVATURE_STEP }
    }
}

impl FdSteps {
    fn validate(&self) -> Result<()> {
        check_step(self.connection)?;
        check_step(self.curvature)
    }
}

fn check_step(h: f64) -> Result<()> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidArgument(format!("finite-difference step must be positive, got {h}")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionCovector {
    components: Vec<f64>,
    imaginary: Vec<f64>,
}

impl ConnectionCovector {
    pub fn from_components(components: Vec<f64>) -> Self {
        let imaginary = vec![0.0; components.len()];
        Self { components, imaginary }
    }

    pub fn components(&self) -> &[f64] {
        &self.components
    }

    pub fn component(&self, k: usize) -> f64 {
        self.components[k]
    }

    /// Imaginary part of `i <phi|d_k phi>` per coordinate.
    pub fn imaginary_residue(&self) -> &[f64] {
        &self.imaginary
    }

    pub fn reality_defect(&self) -> f64 {
        self.imaginary.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// `sum_k A_k d_k`
    pub fn pair(&self, displacement: &[f64]) -> f64 {
        self.components.iter().zip(displacement).map(|(a, d)| a * d).sum()
    }
}

/// Antisymmetric curvature two-form. Only `k < l` entries are stored.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureForm {
    dim: usize,
    upper: Vec<f64>,
}

impl CurvatureForm {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, upper: vec![0.0; dim * dim.saturating_sub(1) / 2] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn slot(&self, k: usize, l: usize) -> usize {
        debug_assert!(k < l && l < self.dim);
        k * (2 * self.dim - k - 1) / 2 + (l - k - 1)
    }

    pub fn get(&self, k: usize, l: usize) -> f64 {
        assert!(k < self.dim && l < self.dim, "curvature index out of range");
        match k.cmp(&l) {
            std::cmp::Ordering::Less => self.upper[self.slot(k, l)],
            std::cmp::Ordering::Greater => -self.upper[self.slot(l, k)],
            std::cmp::Ordering::Equal => 0.0,
        }
    }

    /// Sets `F_kl` (and hence `F_lk = -F_kl`).
    pub fn set(&mut self, k: usize, l: usize, value: f64) {
        assert!(k != l, "diagonal curvature entries are identically zero");
        if k < l {
            let s = self.slot(k, l);
            self.upper[s] = value;
        } else {
            let s = self.slot(l, k);
            self.upper[s] = -value;
        }
    }
}

fn shifted(p: &[f64], k: usize, delta: f64) -> Vec<f64> {
    let mut q = p.to_vec();
    q[k] += delta;
    q
}

/// `i <phi(p)| d_k phi(p)>` as a complex number, central difference in coordinate `k`.
fn raw_component(family: &dyn StateFamily, center: &StateVector, p: &[f64], k: usize, h: f64) -> Result<Complex64> {
    let fwd = family.evaluate(&shifted(p, k, h))?;
    let bwd = family.evaluate(&shifted(p, k, -h))?;
    let overlap = dot(center.as_slice(), fwd.as_slice()) - dot(center.as_slice(), bwd.as_slice());
    Ok(Complex64::i() * overlap / (2.0 * h))
}

pub fn berry_connection_fd(family: &dyn StateFamily, p: &[f64], h: f64) -> Result<ConnectionCovector> {
    check_step(h)?;
    let center = family.evaluate(p)?;
    let mut components = Vec::with_capacity(p.len());
    let mut imaginary = Vec::with_capacity(p.len());
    for k in 0..p.len() {
        let a = raw_component(family, &center, p, k, h)?;
        components.push(a.re);
        imaginary.push(a.im);
    }
    Ok(ConnectionCovector { components, imaginary })
}

/// Single real component `A_k`.
pub fn connection_component_fd(family: &dyn StateFamily, p: &[f64], k: usize, h: f64) -> Result<f64> {
    check_step(h)?;
    family.chart().check_dim(p)?;
    let center = family.evaluate(p)?;
    Ok(raw_component(family, &center, p, k, h)?.re)
}

/// `max_k |Im(i <phi|d_k phi>)|`; vanishes for normalized families.
pub fn connection_reality_defect(family: &dyn StateFamily, p: &[f64], h: f64) -> Result<f64> {
    Ok(berry_connection_fd(family, p, h)?.reality_defect())
}

pub fn berry_curvature_fd(family: &dyn StateFamily, p: &[f64], h: f64) -> Result<CurvatureForm> {
    berry_curvature_fd_with(family, p, FdSteps { curvature: h, ..FdSteps::default() })
}

pub fn berry_curvature_fd_with(family: &dyn StateFamily, p: &[f64], steps: FdSteps) -> Result<CurvatureForm> {
    steps.validate()?;
    family.chart().check_dim(p)?;
    let m = p.len();
    let h = steps.curvature;
    // dA[k][l] = d_k A_l
    let mut forward = Vec::with_capacity(m);
    let mut backward = Vec::with_capacity(m);
    for k in 0..m {
        forward.push(berry_connection_fd(family, &shifted(p, k, h), steps.connection)?);
        backward.push(berry_connection_fd(family, &shifted(p, k, -h), steps.connection)?);
    }
    let deriv = |k: usize, l: usize| (forward[k].component(l) - backward[k].component(l)) / (2.0 * h);
    let mut form = CurvatureForm::zeros(m);
    for k in 0..m {
        for l in k + 1..m {
            form.set(k, l, deriv(k, l) - deriv(l, k));
        }
    }
    Ok(form)
}

/// Single curvature component `F_kl`, with four connection evaluations.
pub fn curvature_component_fd(family: &dyn StateFamily, p: &[f64], k: usize, l: usize, steps: FdSteps) -> Result<f64> {
    steps.validate()?;
    family.chart().check_dim(p)?;
    if k == l {
        return Ok(0.0);
    }
    let h = steps.curvature;
    let a = |q: Vec<f64>, idx: usize| connection_component_fd(family, &q, idx, steps.connection);
    let d_k_al = a(shifted(p, k, h), l)? - a(shifted(p, k, -h), l)?;
    let d_l_ak = a(shifted(p, l, h), k)? - a(shifted(p, l, -h), k)?;
    Ok((d_k_al - d_l_ak) / (2.0 * h))
}
