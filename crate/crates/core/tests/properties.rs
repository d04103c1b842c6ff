use std::f64::consts::{PI, TAU};

use nalgebra::SymmetricEigen;
use nlberry::berry::{berry_phase_closed_form, berry_phase_discrete, discrete_loop_phase};
use nlberry::model::{continue_branch, stationary_states, ModelParams, ParamPath, DEFAULT_TOL};
use nlberry::perturbation::{berry_phase_perturbative, solid_angle, FrameLoop, PhasePair};
use nlberry::triple::{eigenvector, transport_sign, triple_eigensystem, triple_frame, Level, LoopAngle};
use nlberry::{angle_distance, C64};
use proptest::prelude::*;

fn params(r: f64, c: f64, v: f64, phi: f64) -> ModelParams {
    ModelParams::new(r, c, v, phi).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn states_are_stationary_and_normalized(r in -3.0..3.0f64, c in 0.0..4.0f64, v in 0.05..3.0f64, phi in 0.0..TAU) {
        let fam = stationary_states(&params(r, c, v, phi), DEFAULT_TOL).unwrap();
        prop_assert!(!fam.is_empty() && fam.len() <= 4);
        for s in &fam.states {
            let a = s.amplitudes();
            prop_assert!((a[0].norm_sqr() + a[1].norm_sqr() - 1.0).abs() < 1e-12);
            prop_assert!(s.residual() < DEFAULT_TOL);
            prop_assert!(4.0 * s.energy() * s.energy() >= v * v * (1.0 - 1e-9));
        }
    }

    #[test]
    fn energies_do_not_depend_on_phase(r in -3.0..3.0f64, c in 0.0..4.0f64, v in 0.05..3.0f64, phi in 0.0..TAU) {
        let a = stationary_states(&params(r, c, v, 0.0), DEFAULT_TOL).unwrap().energies();
        let b = stationary_states(&params(r, c, v, phi), DEFAULT_TOL).unwrap().energies();
        prop_assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_bias_spectrum(c in 0.0..4.0f64, v in 0.05..3.0f64) {
        prop_assume!((c - v).abs() > 1e-3);
        let e = stationary_states(&params(0.0, c, v, 0.4), DEFAULT_TOL).unwrap().energies();
        if c > v {
            prop_assert_eq!(e.len(), 4);
            prop_assert!((e[0] + 0.5 * c).abs() < 1e-9 && (e[1] + 0.5 * c).abs() < 1e-9);
            prop_assert!((e[2] + 0.5 * v).abs() < 1e-9 && (e[3] - 0.5 * v).abs() < 1e-9);
        } else {
            prop_assert_eq!(e.len(), 2);
            prop_assert!((e[0] + 0.5 * v).abs() < 1e-9 && (e[1] - 0.5 * v).abs() < 1e-9);
        }
    }

    #[test]
    fn linear_spectrum(r in -3.0..3.0f64, v in 0.05..3.0f64) {
        let e = stationary_states(&params(r, 0.0, v, 1.0), DEFAULT_TOL).unwrap().energies();
        let half = 0.5 * (r * r + v * v).sqrt();
        prop_assert_eq!(e.len(), 2);
        prop_assert!((e[0] + half).abs() < 1e-9 && (e[1] - half).abs() < 1e-9);
    }

    #[test]
    fn discrete_phase_is_gauge_invariant(r in -2.0..2.0f64, c in 0.0..2.0f64, v in 0.2..2.0f64, seed in any::<u64>()) {
        use rand::{Rng, SeedableRng};
        let base = params(r, c, v, 0.0);
        let lowest = *stationary_states(&base, DEFAULT_TOL).unwrap().lowest().unwrap();
        let branch = continue_branch(&ParamPath::phase_loop(base, 256), &lowest, DEFAULT_TOL).unwrap();
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        let regauged: Vec<_> = branch
            .iter()
            .map(|s| {
                let g = C64::from_polar(1.0, rng.gen_range(0.0..TAU));
                [s.amplitudes()[0] * g, s.amplitudes()[1] * g]
            })
            .collect();
        let a = berry_phase_discrete(&branch).unwrap();
        let b = discrete_loop_phase(regauged.iter()).unwrap();
        prop_assert!(angle_distance(a, b) < 1e-12);
    }

    #[test]
    fn lowest_branch_matches_closed_form(r in -2.0..2.0f64, c in 0.0..2.0f64, v in 0.2..2.0f64) {
        let base = params(r, c, v, 0.0);
        let lowest = *stationary_states(&base, DEFAULT_TOL).unwrap().lowest().unwrap();
        prop_assume!(lowest.imbalance() <= 0.0);
        let branch = continue_branch(&ParamPath::phase_loop(base, 1024), &lowest, DEFAULT_TOL).unwrap();
        let closed = berry_phase_closed_form(v, lowest.energy()).unwrap();
        prop_assert!(angle_distance(berry_phase_discrete(&branch).unwrap(), closed) < 1e-4);
    }

    #[test]
    fn perturbative_phase_reduces_to_solid_angle(a0 in 0.2..2.9f64, a1 in -0.1..0.1f64, a2 in -0.1..0.1f64, k in 0.0..TAU) {
        let profile = move |phi: f64| a0 + a1 * phi.cos() + a2 * (2.0 * phi + k).sin();
        let lp = FrameLoop::from_profile(profile, 0.0, 1024).unwrap();
        let omega = solid_angle(&lp);
        let pair = berry_phase_perturbative(&lp);
        prop_assert!(pair.distance(&PhasePair::new(0.5 * omega, -0.5 * omega)) < 1e-8);
    }

    #[test]
    fn reversed_loop_negates_phases(a0 in 0.2..2.9f64, a1 in -0.1..0.1f64, s in 0.0..0.9f64) {
        let lp = FrameLoop::from_profile(move |phi: f64| a0 + a1 * phi.sin(), s, 512).unwrap();
        let fwd = berry_phase_perturbative(&lp);
        let back = berry_phase_perturbative(&lp.reversed());
        prop_assert!(fwd.distance(&PhasePair::new(-back.gamma_n, -back.gamma_n1)) < 1e-9);
    }

    #[test]
    fn triple_spectrum_matches_eigensolver(d in -3.0..3.0f64, p in -3.0..3.0f64, q in -3.0..3.0f64) {
        prop_assume!(p.hypot(q) > 1e-6);
        let frame = triple_frame(d, p, q).unwrap();
        let sys = triple_eigensystem(&frame);
        prop_assert!(sys.max_residual(&frame) < 1e-10);
        let mut reference: Vec<f64> = SymmetricEigen::new(frame.matrix()).eigenvalues.iter().copied().collect();
        reference.sort_by(f64::total_cmp);
        for (pair, want) in sys.pairs.iter().zip(reference) {
            prop_assert!((pair.eigenvalue - want).abs() < 1e-10);
        }
        for i in 0..3 {
            for j in 0..3 {
                let dot = sys.pairs[i].vector.dot(&sys.pairs[j].vector);
                let want = f64::from(u8::from(i == j));
                prop_assert!((dot - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn half_theta_period(theta in 0.0..TAU, phi in 0.0..TAU) {
        let swap = eigenvector(Level::Lower, theta + PI, phi).dot(&eigenvector(Level::Upper, theta, phi));
        prop_assert!((swap.abs() - 1.0).abs() < 1e-12);
        let mid = eigenvector(Level::Middle, theta + PI, phi) - eigenvector(Level::Middle, theta, phi);
        prop_assert!(mid.norm() < 1e-12);
        for level in [Level::Lower, Level::Upper] {
            let turn = eigenvector(level, theta + TAU, phi) + eigenvector(level, theta, phi);
            prop_assert!(turn.norm() < 1e-12);
        }
    }

    #[test]
    fn sign_table_ignores_sampling(samples in 16usize..2048) {
        for level in Level::ALL {
            prop_assert_eq!(transport_sign(LoopAngle::Phi, level, samples).unwrap(), 1);
        }
        prop_assert_eq!(transport_sign(LoopAngle::Theta, Level::Lower, samples).unwrap(), -1);
        prop_assert_eq!(transport_sign(LoopAngle::Theta, Level::Middle, samples).unwrap(), 1);
        prop_assert_eq!(transport_sign(LoopAngle::Theta, Level::Upper, samples).unwrap(), -1);
    }
}
