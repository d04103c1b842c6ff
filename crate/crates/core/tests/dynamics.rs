use std::f64::consts::FRAC_PI_2;

use nlberry::dynamics::{evolve_nonlinear, loschmidt_dynamical, DriveSchedule};
use nlberry::echo::{loschmidt_adiabatic, nonlinearity_witness};
use nlberry::model::{stationary_states, Eigenstate, ModelParams, DEFAULT_TOL};
use nlberry::C64;

fn up(base: &ModelParams) -> Eigenstate {
    Eigenstate::from_amplitudes(base, [C64::new(1.0, 0.0), C64::new(0.0, 0.0)], DEFAULT_TOL).unwrap()
}

#[test]
fn slow_equatorial_drive_reaches_adiabatic_echo() {
    let base = ModelParams::new(0.0, 0.0, 0.0, 0.0).unwrap();
    let target = loschmidt_adiabatic(FRAC_PI_2, 0.0);
    let errors: Vec<f64> = [50.0, 100.0, 200.0]
        .iter()
        .map(|&t| {
            let drive = DriveSchedule::adiabatic_loop(base, t, 1.0, FRAC_PI_2).unwrap();
            let trace = loschmidt_dynamical(&up(&base), &base, &drive, 0.01).unwrap();
            assert!(trace.values.iter().all(|l| (0.0..=1.0 + 1e-9).contains(l)));
            (trace.last().unwrap().1 - target).abs()
        })
        .collect();
    assert!(errors[2] < 0.05);
    assert!(errors[1] <= 0.5 * errors[0] && errors[2] <= 0.5 * errors[1], "{errors:?}");
}

#[test]
fn norm_is_kept_over_long_runs() {
    let base = ModelParams::new(0.3, 1.5, 0.8, 0.2).unwrap();
    let start = stationary_states(&base, DEFAULT_TOL).unwrap().states[0];
    let drive = DriveSchedule::adiabatic_loop(base, 200.0, 0.5, 1.0).unwrap();
    let traj = evolve_nonlinear(&start, &drive, 0.01).unwrap();
    let drift = traj.states.iter().map(|a| (a[0].norm_sqr() + a[1].norm_sqr() - 1.0).abs()).fold(0.0, f64::max);
    assert!(drift < 1e-9);
}

#[test]
fn witness_fades_at_large_coupling() {
    let w = |v: f64| nonlinearity_witness(&ModelParams::new(2.0, 1.0, v, 0.0).unwrap(), DEFAULT_TOL).unwrap().witness;
    let curve: Vec<f64> = (0..=40).map(|i| w(2.0 + 0.2 * i as f64)).collect();
    assert!(curve.windows(2).all(|p| p[1] < p[0]));
    assert!(w(50.0) < 0.01);
}
