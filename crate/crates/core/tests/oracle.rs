use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_6};

use berryphase::oracle::default_steps;
use berryphase::sampling::halton_points;
use berryphase::{
    evolve_with, line_integral_phase, phase_deviation, projector_hamiltonian, projector_loop_phase, EvolveOptions,
    HamiltonianFamily, Loop, ParameterChart, Schedule, SpinHalf, SpinOne, StateFamily, Su3SpinOne,
};
use num_complex::Complex64;

#[test]
fn projector_eigen_relation_at_random_points() {
    let families: Vec<Box<dyn StateFamily>> =
        vec![Box::new(SpinHalf::new()), Box::new(SpinOne::new()), Box::new(Su3SpinOne::new())];
    for family in &families {
        let h = projector_hamiltonian(family.as_ref());
        let bounds: Vec<_> = family.chart().coordinates().iter().map(|c| (c.lower, c.upper)).collect();
        for p in halton_points(&bounds, 1000, 5) {
            let m = h.matrix(&p).unwrap();
            assert!(m.hermiticity_defect() <= 1e-12);
            let phi = family.evaluate(&p).unwrap();
            let residual = m
                .apply(&phi)
                .unwrap()
                .max_abs_diff(&phi.scaled(Complex64::new(h.tracked_energy(&p), 0.0)).unwrap())
                .unwrap();
            assert!(residual <= 1e-12, "{} at {p:?}: {residual:e}", family.id());
        }
    }
}

#[test]
fn rk4_norm_drift_without_renormalization() {
    let family = SpinOne::new();
    let h = projector_hamiltonian(&family);
    let lp = Loop::circle(ParameterChart::sphere(), vec![FRAC_PI_3, 0.0], 1, 1).unwrap();
    let schedule = Schedule::with_default_steps(lp, 500.0, h.norm_bound()).unwrap();
    let psi0 = family.evaluate(&[FRAC_PI_3, 0.0]).unwrap();
    let run = evolve_with(&h, &schedule, &psi0, EvolveOptions { renormalize: false, ..Default::default() }).unwrap();
    assert!(run.final_norm_drift <= 1e-8, "drift {:e}", run.final_norm_drift);
}

#[test]
fn su3_oracle_matches_gamma_loop() {
    // gamma-circle at g = pi/6: ∮ A_gamma dgamma = 2pi cos(pi/3) = pi.
    let family = Su3SpinOne::new();
    let lp = Loop::circle(ParameterChart::su3(), vec![1.0, 0.5, FRAC_PI_6, 0.0], 3, 1).unwrap();
    let geometric = line_integral_phase(&family, &lp, 2048).unwrap().raw();
    let mut previous = f64::INFINITY;
    for t in [500.0, 1000.0, 2000.0] {
        let report = projector_loop_phase(&family, &lp, t, None).unwrap();
        let mismatch = phase_deviation(report.geometric_phase, geometric);
        assert!(mismatch < previous, "T={t}: {mismatch} !< {previous}");
        previous = mismatch;
        assert!(report.residual_overlap_deficit >= 0.0);
    }
    assert!(previous <= 2e-2);
}

#[test]
fn spin_half_oracle_stays_adiabatic() {
    let family = SpinHalf::new();
    let lp = Loop::circle(ParameterChart::sphere(), vec![FRAC_PI_2, 0.0], 1, 1).unwrap();
    assert_eq!(default_steps(2000.0, 1.0), 2_000_000);
    let report = projector_loop_phase(&family, &lp, 2000.0, Some(2_000_000)).unwrap();
    assert!(report.residual_overlap_deficit <= 1e-3);
    assert!(phase_deviation(report.geometric_phase, -std::f64::consts::PI) <= 2e-2);
    // E = -1: dynamical phase is +T mod 2pi.
    assert!(phase_deviation(report.dynamical_phase, 2000.0) <= 1e-12);
    assert!(phase_deviation(report.total_phase, report.dynamical_phase + report.geometric_phase) <= 1e-12);
}
