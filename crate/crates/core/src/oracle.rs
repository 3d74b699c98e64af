//! Dynamical cross-check of loop phases.
//!
//! A Hamiltonian whose tracked eigenstate is the family state is driven
//! slowly around a loop by integrating `i dpsi/dt = H(lambda(t/T)) psi`
//! (hbar = 1) with classical RK4. The overlap of the final state with the
//! initial eigenstate, stripped of the dynamical phase `-E T`, leaves the
//! geometric phase.

use num_complex::Complex64;

use crate::chart::ParameterChart;
use crate::error::{Error, Result};
use crate::family::StateFamily;
use crate::loops::{canonical_phase, Loop};
use crate::state::{dot, inner_product, is_normalized, ComplexMatrix, StateVector};

/// Evolution must keep `|<phi_ref|psi>|` above this for the phase to mean anything.
pub const ADIABATIC_OVERLAP_MIN: f64 = 0.5;
pub const MIN_STEPS: usize = 1000;
/// Per-step `||H|| dt` used to pick a default number of steps.
pub const DEFAULT_STEP_BUDGET: f64 = 1e-3;
pub const MAX_STEP_NORM_DRIFT: f64 = 1e-6;

pub trait HamiltonianFamily: Send + Sync {
    fn chart(&self) -> &ParameterChart;

    fn dimension(&self) -> usize;

    fn matrix(&self, coords: &[f64]) -> Result<ComplexMatrix>;

    /// Energy of the tracked nondegenerate level.
    fn tracked_energy(&self, coords: &[f64]) -> f64;

    /// Eigenvector of the tracked level in the family's own gauge.
    fn tracked_state(&self, coords: &[f64]) -> Result<StateVector>;

    /// Upper bound on the operator norm, used to size time steps.
    fn norm_bound(&self) -> f64;
}

/// `H(lambda) = -|phi(lambda)><phi(lambda)|`: the family state is the only
/// eigenvector with energy -1, separated by a gap of 1 from the zero level.
pub struct ProjectorHamiltonian<'a> {
    family: &'a dyn StateFamily,
}

pub fn projector_hamiltonian(family: &dyn StateFamily) -> ProjectorHamiltonian<'_> {
    ProjectorHamiltonian { family }
}

impl HamiltonianFamily for ProjectorHamiltonian<'_> {
    fn chart(&self) -> &ParameterChart {
        self.family.chart()
    }

    fn dimension(&self) -> usize {
        self.family.dimension()
    }

    fn matrix(&self, coords: &[f64]) -> Result<ComplexMatrix> {
        let phi = self.family.evaluate(coords)?;
        ComplexMatrix::outer(&phi, &phi, Complex64::new(-1.0, 0.0))
    }

    fn tracked_energy(&self, _coords: &[f64]) -> f64 {
        -1.0
    }

    fn tracked_state(&self, coords: &[f64]) -> Result<StateVector> {
        self.family.evaluate(coords)
    }

    fn norm_bound(&self) -> f64 {
        1.0
    }
}

/// Parameter-independent Hamiltonian with a designated eigenpair.
pub struct ConstantHamiltonian {
    chart: ParameterChart,
    matrix: ComplexMatrix,
    energy: f64,
    state: StateVector,
}

impl ConstantHamiltonian {
    pub fn new(chart: ParameterChart, matrix: ComplexMatrix, energy: f64, state: StateVector) -> Result<Self> {
        if state.len() != matrix.dim() {
            return Err(Error::Dimension { expected: matrix.dim(), actual: state.len() });
        }
        Ok(Self { chart, matrix, energy, state })
    }
}

impl HamiltonianFamily for ConstantHamiltonian {
    fn chart(&self) -> &ParameterChart {
        &self.chart
    }

    fn dimension(&self) -> usize {
        self.matrix.dim()
    }

    fn matrix(&self, _coords: &[f64]) -> Result<ComplexMatrix> {
        Ok(self.matrix.clone())
    }

    fn tracked_energy(&self, _coords: &[f64]) -> f64 {
        self.energy
    }

    fn tracked_state(&self, _coords: &[f64]) -> Result<StateVector> {
        Ok(self.state.clone())
    }

    fn norm_bound(&self) -> f64 {
        // Frobenius norm bounds the operator norm.
        let n = self.matrix.dim();
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += self.matrix.get(i, j).norm_sqr();
            }
        }
        s.sqrt()
    }
}

/// Traversal of `loop` over total time `T` in `steps` equal RK4 steps.
#[derive(Debug, Clone)]
pub struct Schedule {
    path: Loop,
    total_time: f64,
    steps: usize,
}

impl Schedule {
    pub fn new(path: Loop, total_time: f64, steps: usize) -> Result<Self> {
        if !(total_time > 0.0 && total_time.is_finite()) {
            return Err(Error::InvalidArgument(format!("total time must be positive, got {total_time}")));
        }
        if steps < MIN_STEPS {
            return Err(Error::TooFewSamples { min: MIN_STEPS, actual: steps });
        }
        path.check_closed()?;
        Ok(Self { path, total_time, steps })
    }

    /// Steps chosen so that `norm_bound * dt <= 1e-3`.
    pub fn with_default_steps(path: Loop, total_time: f64, norm_bound: f64) -> Result<Self> {
        let steps = default_steps(total_time, norm_bound);
        Self::new(path, total_time, steps)
    }

    pub fn path(&self) -> &Loop {
        &self.path
    }

    pub fn total_time(&self) -> f64 {
        self.total_time
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn dt(&self) -> f64 {
        self.total_time / self.steps as f64
    }
}

pub fn default_steps(total_time: f64, norm_bound: f64) -> usize {
    let wanted = (total_time * norm_bound.max(f64::MIN_POSITIVE) / DEFAULT_STEP_BUDGET).ceil();
    if wanted.is_finite() {
        (wanted as usize).max(MIN_STEPS)
    } else {
        MIN_STEPS
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions {
    /// Rescale psi to unit norm after every step.
    pub renormalize: bool,
    /// Largest tolerated `| ||psi|| - 1 |` produced by a single step.
    pub max_step_drift: f64,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self { renormalize: true, max_step_drift: MAX_STEP_NORM_DRIFT }
    }
}

#[derive(Debug, Clone)]
pub struct Evolution {
    pub state: StateVector,
    /// Largest single-step norm drift seen.
    pub max_step_drift: f64,
    /// `| ||psi(T)|| - 1 |` before any final renormalization.
    pub final_norm_drift: f64,
}

pub fn evolve(h: &dyn HamiltonianFamily, schedule: &Schedule, psi0: &StateVector) -> Result<StateVector> {
    Ok(evolve_with(h, schedule, psi0, EvolveOptions::default())?.state)
}

pub fn evolve_with(
    h: &dyn HamiltonianFamily,
    schedule: &Schedule,
    psi0: &StateVector,
    options: EvolveOptions,
) -> Result<Evolution> {
    let n = h.dimension();
    if psi0.len() != n {
        return Err(Error::Dimension { expected: n, actual: psi0.len() });
    }
    if !is_normalized(psi0, 1e-10) {
        return Err(Error::InvalidArgument("initial state must be normalized".into()));
    }
    if h.chart() != schedule.path.chart() {
        return Err(Error::InvalidLoop("schedule loop chart does not match the Hamiltonian".into()));
    }

    let dt = schedule.dt();
    let steps = schedule.steps;
    let hamiltonian_at = |step_fraction: f64| -> Result<ComplexMatrix> {
        h.matrix(&schedule.path.point_at(step_fraction / steps as f64))
    };
    let zero = Complex64::new(0.0, 0.0);
    let minus_i = Complex64::new(0.0, -1.0);

    let mut psi = psi0.as_slice().to_vec();
    let mut k1 = vec![zero; n];
    let mut k2 = vec![zero; n];
    let mut k3 = vec![zero; n];
    let mut k4 = vec![zero; n];
    let mut tmp = vec![zero; n];
    let mut h_start = hamiltonian_at(0.0)?;
    let mut max_drift = 0.0_f64;
    let mut last_drift = 0.0;

    // f(t, psi) = -i H(t) psi
    let rhs = |m: &ComplexMatrix, v: &[Complex64], out: &mut [Complex64]| {
        m.mul_into(v, out);
        for o in out.iter_mut() {
            *o *= minus_i;
        }
    };

    for step in 0..steps {
        let s = step as f64;
        let h_mid = hamiltonian_at(s + 0.5)?;
        let h_end = hamiltonian_at(s + 1.0)?;

        rhs(&h_start, &psi, &mut k1);
        for i in 0..n {
            tmp[i] = psi[i] + k1[i] * (0.5 * dt);
        }
        rhs(&h_mid, &tmp, &mut k2);
        for i in 0..n {
            tmp[i] = psi[i] + k2[i] * (0.5 * dt);
        }
        rhs(&h_mid, &tmp, &mut k3);
        for i in 0..n {
            tmp[i] = psi[i] + k3[i] * dt;
        }
        rhs(&h_end, &tmp, &mut k4);
        for i in 0..n {
            psi[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (dt / 6.0);
        }

        let norm = dot(&psi, &psi).re.sqrt();
        if !norm.is_finite() {
            return Err(Error::Evaluation {
                coords: schedule.path.point_at(s / steps as f64),
                reason: "state became non-finite during evolution".into(),
            });
        }
        let drift = (norm - 1.0).abs();
        if options.renormalize {
            if drift > options.max_step_drift {
                return Err(Error::StepSize { drift, limit: options.max_step_drift });
            }
            for z in psi.iter_mut() {
                *z /= norm;
            }
            max_drift = max_drift.max(drift);
        } else {
            max_drift = max_drift.max((drift - last_drift).abs());
            last_drift = drift;
        }
        h_start = h_end;
    }

    let final_norm = dot(&psi, &psi).re.sqrt();
    Ok(Evolution {
        state: StateVector::new(psi)?,
        max_step_drift: max_drift,
        final_norm_drift: (final_norm - 1.0).abs(),
    })
}

/// Total, dynamical and geometric phases of an adiabatic run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseReport {
    /// `arg <phi_ref|psi(T)>`
    pub total_phase: f64,
    /// `-E T` reduced to `(-pi, pi]`.
    pub dynamical_phase: f64,
    /// `total - dynamical` reduced to `(-pi, pi]`.
    pub geometric_phase: f64,
    /// `1 - |<phi_ref|psi(T)>|`
    pub residual_overlap_deficit: f64,
}

pub fn extract_phases(
    psi_final: &StateVector,
    phi_ref: &StateVector,
    energy: f64,
    total_time: f64,
) -> Result<PhaseReport> {
    let overlap = inner_product(phi_ref, psi_final)?;
    let magnitude = overlap.norm();
    if !(magnitude > ADIABATIC_OVERLAP_MIN) {
        return Err(Error::AdiabaticityLost { overlap: magnitude, threshold: ADIABATIC_OVERLAP_MIN });
    }
    let total_phase = overlap.arg();
    let dynamical_phase = canonical_phase(-energy * total_time);
    Ok(PhaseReport {
        total_phase,
        dynamical_phase,
        geometric_phase: canonical_phase(total_phase - dynamical_phase),
        residual_overlap_deficit: (1.0 - magnitude).max(0.0),
    })
}

/// Evolves the tracked eigenstate around `path` and extracts its phases.
/// Requires a constant tracked energy along the loop.
pub fn adiabatic_loop_phase(h: &dyn HamiltonianFamily, schedule: &Schedule) -> Result<PhaseReport> {
    let start = schedule.path.point_at(0.0);
    let phi0 = h.tracked_state(&start)?;
    let energy = h.tracked_energy(&start);
    let psi = evolve(h, schedule, &phi0)?;
    // Same gauge at both ends of a closed loop.
    let phi_ref = h.tracked_state(&schedule.path.point_at(1.0))?;
    extract_phases(&psi, &phi_ref, energy, schedule.total_time)
}

/// Convenience: projector Hamiltonian of `family`, default step count.
pub fn projector_loop_phase(
    family: &dyn StateFamily,
    path: &Loop,
    total_time: f64,
    steps: Option<usize>,
) -> Result<PhaseReport> {
    let h = projector_hamiltonian(family);
    let steps = steps.unwrap_or_else(|| default_steps(total_time, h.norm_bound()));
    let schedule = Schedule::new(path.clone(), total_time, steps)?;
    adiabatic_loop_phase(&h, &schedule)
}
