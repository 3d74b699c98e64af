//! Berry phases of parameterized quantum states.
//!
//! Three geometric routes to the same loop phase are provided, each usable on
//! any [`StateFamily`]:
//!
//! * [`line_integral_phase`]: trapezoid rule for `∮ A_k dλ^k`, with the
//!   connection `A_k = i<φ|∂_kφ>` from central differences or a closed form;
//! * [`surface_integral_phase`]: midpoint rule for the curvature flux
//!   through a coordinate rectangle bounded by the loop;
//! * [`overlap_product_phase`]: `-arg Π <φ_j|φ_{j+1}>`, independent of the
//!   phase convention of the samples.
//!
//! The [`oracle`] module adds an independent dynamical check: it integrates
//! the Schrödinger equation around the loop under a projector Hamiltonian
//! and strips the dynamical phase.
//!
//! Loop phases are only defined modulo 2π; compare them with
//! [`phases_equal_mod_2pi`] or [`phase_deviation`].

// Negated comparisons below are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chart;
pub mod error;
pub mod family;
pub mod geometry;
pub mod loops;
pub mod oracle;
pub mod sampling;
pub mod state;

pub use chart::{BoundsWarning, Coordinate, ParameterChart};
pub use error::{Error, Result};
pub use family::{
    analytic_connection, family_by_id, CustomFamily, GaugeTransformed, SpinHalf, SpinOne, StateFamily, Su3SpinOne,
    BUILTIN_FAMILIES, SU2_SPIN_HALF, SU2_SPIN_ONE, SU3_SPIN_ONE,
};
pub use geometry::{
    berry_connection_fd, berry_curvature_fd, berry_curvature_fd_with, connection_component_fd,
    connection_reality_defect, curvature_component_fd, ConnectionCovector, CurvatureForm, FdSteps,
    DEFAULT_CONNECTION_STEP, DEFAULT_CURVATURE_STEP,
};
pub use loops::{
    canonical_phase, line_integral_phase, line_integral_phase_with, overlap_phase_of_states, overlap_product_phase,
    phase_deviation, phases_equal_mod_2pi, solid_angle, solid_angle_with, surface_integral_phase,
    surface_integral_phase_with, ConnectionSource, Loop, PhaseValue, SurfacePatch, DEFAULT_LOOP_SAMPLES,
    DEFAULT_SURFACE_GRID,
};
pub use oracle::{
    adiabatic_loop_phase, evolve, evolve_with, extract_phases, projector_hamiltonian, projector_loop_phase,
    ConstantHamiltonian, EvolveOptions, HamiltonianFamily, PhaseReport, Schedule,
};
pub use state::{inner_product, is_normalized, norm, ComplexMatrix, StateVector};
