//! First-order perturbation theory around a double degeneracy whose two
//! degenerate states may overlap (`s = |<n|n+1>|`, zero in linear systems).
//!
//! A [`FrameLoop`] samples the local chart `(theta, phi)` around a closed
//! loop; every loop integral is a composite trapezoid over those samples.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64 as C64;

use crate::{angle_distance, wrap_2pi, Error, Result};

/// Lower bound on `1 - sin(theta) s` and on `1 - sin(theta)` where they
/// appear as denominators.
pub const SINGULARITY_GUARD: f64 = 1e-6;

/// Default number of distinct samples on a loop.
pub const DEFAULT_LOOP_POINTS: usize = 1024;

/// The 2x2 perturbation block and its spherical chart at one loop point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbationFrame {
    /// `dH_{n,n}`
    pub dnn: f64,
    /// `dH_{n+1,n+1}`
    pub dn1n1: f64,
    /// `dH_{n,n+1}`
    pub doff: C64,
    /// `dE_{n+1}` (upper sign of the splitting).
    pub delta_e_plus: f64,
    /// `dE_n` (lower sign).
    pub delta_e_minus: f64,
    /// Polar angle in `[0, pi]`.
    pub theta: f64,
    /// Azimuth in `[0, 2pi)`.
    pub phi: f64,
    /// Overlap `s` of the degenerate states, in `[0, 1]`.
    pub overlap: f64,
}

fn check_overlap(s: f64) -> Result<()> {
    if (0.0..=1.0).contains(&s) {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("overlap s = {s} outside [0, 1]")))
    }
}

/// Build the frame from the perturbation matrix elements.
pub fn frame_from_deltas(dnn: f64, dn1n1: f64, doff: C64, s: f64) -> Result<PerturbationFrame> {
    check_overlap(s)?;
    let diff = dnn - dn1n1;
    let split = (diff * diff + 4.0 * doff.norm_sqr()).sqrt();
    if split == 0.0 {
        return Err(Error::DegenerateFrame);
    }
    let mean = 0.5 * (dnn + dn1n1);
    let theta = (diff / split).clamp(-1.0, 1.0).acos();
    let phi = if doff.norm() > 0.0 { wrap_2pi(doff.arg()) } else { 0.0 };
    Ok(PerturbationFrame {
        dnn,
        dn1n1,
        doff,
        delta_e_plus: mean + 0.5 * split,
        delta_e_minus: mean - 0.5 * split,
        theta,
        phi,
        overlap: s,
    })
}

impl PerturbationFrame {
    /// Unit-splitting frame at the given angles. The azimuth is kept even
    /// where `doff` vanishes (`theta = 0` or `pi`).
    pub fn from_angles(theta: f64, phi: f64, s: f64) -> Result<Self> {
        check_overlap(s)?;
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::InvalidParams(format!("theta = {theta} outside [0, pi]")));
        }
        let half = 0.5 * theta.cos();
        Ok(Self {
            dnn: half,
            dn1n1: -half,
            doff: C64::from_polar(0.5 * theta.sin(), phi),
            delta_e_plus: 0.5,
            delta_e_minus: -0.5,
            theta,
            phi: wrap_2pi(phi),
            overlap: s,
        })
    }

    /// `1 + sin(theta) s`
    pub fn delta_plus(&self) -> f64 {
        1.0 + self.theta.sin() * self.overlap
    }

    /// `1 - sin(theta) s`
    pub fn delta_minus(&self) -> f64 {
        1.0 - self.theta.sin() * self.overlap
    }

    fn approx_eq(&self, other: &Self) -> bool {
        const TOL: f64 = 1e-12;
        (self.dnn - other.dnn).abs() <= TOL
            && (self.dn1n1 - other.dn1n1).abs() <= TOL
            && (self.doff - other.doff).norm() <= TOL
            && (self.theta - other.theta).abs() <= TOL
            && angle_distance(self.phi, other.phi) <= TOL
    }
}

/// A closed loop of frames sharing one overlap `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameLoop {
    frames: Vec<PerturbationFrame>,
    overlap: f64,
}

impl FrameLoop {
    /// The first and last frames must coincide.
    pub fn new(frames: Vec<PerturbationFrame>) -> Result<Self> {
        if frames.len() < 4 {
            return Err(Error::TooFewPoints { got: frames.len(), need: 4 });
        }
        if !frames[0].approx_eq(frames.last().unwrap()) {
            return Err(Error::NotClosed);
        }
        let overlap = frames[0].overlap;
        if frames.iter().any(|f| (f.overlap - overlap).abs() > 1e-12) {
            return Err(Error::InvalidParams("overlap must be constant along the loop".into()));
        }
        for f in &frames {
            if f.delta_minus() < SINGULARITY_GUARD {
                return Err(Error::NearSingular(f.delta_minus()));
            }
        }
        Ok(Self { frames, overlap })
    }

    /// One turn in `phi` with `theta = profile(phi)`, `n` distinct samples.
    pub fn from_profile(profile: impl Fn(f64) -> f64, s: f64, n: usize) -> Result<Self> {
        let mut frames = (0..n)
            .map(|k| {
                let phi = TAU * k as f64 / n as f64;
                PerturbationFrame::from_angles(profile(phi), phi, s)
            })
            .collect::<Result<Vec<_>>>()?;
        frames.push(frames[0]);
        Self::new(frames)
    }

    pub fn constant_theta(theta: f64, s: f64, n: usize) -> Result<Self> {
        Self::from_profile(|_| theta, s, n)
    }

    pub fn frames(&self) -> &[PerturbationFrame] {
        &self.frames
    }

    pub fn overlap(&self) -> f64 {
        self.overlap
    }

    /// The same loop traversed backwards.
    pub fn reversed(&self) -> Self {
        let mut frames = self.frames.clone();
        frames.reverse();
        Self { frames, overlap: self.overlap }
    }

    /// Trapezoid rule for `oint f dphi` on the loop's own samples, with each
    /// azimuth step taken on the short arc.
    pub fn integrate(&self, f: impl Fn(&PerturbationFrame) -> f64) -> f64 {
        self.frames
            .windows(2)
            .map(|w| {
                let mut dphi = (w[1].phi - w[0].phi).rem_euclid(TAU);
                if dphi > PI {
                    dphi -= TAU;
                }
                0.5 * (f(&w[0]) + f(&w[1])) * dphi
            })
            .sum()
    }

    /// Net azimuth swept, `oint dphi` (2pi per positive turn).
    pub fn winding_angle(&self) -> f64 {
        self.integrate(|_| 1.0)
    }
}

/// Berry phases of the two perturbed levels, reduced to `[0, 2pi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePair {
    pub gamma_n: f64,
    pub gamma_n1: f64,
}

impl PhasePair {
    pub fn new(gamma_n: f64, gamma_n1: f64) -> Self {
        Self { gamma_n: wrap_2pi(gamma_n), gamma_n1: wrap_2pi(gamma_n1) }
    }

    /// Largest mod-2pi distance between matching components.
    pub fn distance(&self, other: &PhasePair) -> f64 {
        angle_distance(self.gamma_n, other.gamma_n).max(angle_distance(self.gamma_n1, other.gamma_n1))
    }
}

/// `Omega_c = oint (1 - cos theta) dphi`.
pub fn solid_angle(lp: &FrameLoop) -> f64 {
    lp.integrate(|f| 1.0 - f.theta.cos())
}

/// Both phases from the full first-order expression,
/// `gamma_{n,n+1} = 1/2 oint (1 -+ cos theta)/Delta_pm dphi
///                  +- 1/2 oint sin(theta) s / Delta_pm dphi`.
pub fn berry_phase_perturbative(lp: &FrameLoop) -> PhasePair {
    let s = lp.overlap;
    let gn = 0.5 * lp.integrate(|f| (1.0 - f.theta.cos() + f.theta.sin() * s) / f.delta_plus());
    let gn1 = 0.5 * lp.integrate(|f| (1.0 + f.theta.cos() - f.theta.sin() * s) / f.delta_minus());
    PhasePair::new(gn, gn1)
}

/// Closed forms for a loop at constant `theta` making one turn in `phi`.
pub fn berry_phase_constant_theta(theta: f64, s: f64) -> Result<PhasePair> {
    let frame = PerturbationFrame::from_angles(theta, 0.0, s)?;
    let (dp, dm) = (frame.delta_plus(), frame.delta_minus());
    if dm < SINGULARITY_GUARD {
        return Err(Error::NearSingular(dm));
    }
    let (sn, cs) = (theta.sin(), theta.cos());
    Ok(PhasePair::new(PI / dp * (1.0 - cs) + PI / dp * sn * s, PI / dm * (1.0 + cs) - PI / dm * sn * s))
}

/// `Omega_c' = -oint [1 - cos(pi/2 - 2 theta)] dphi`: minus the solid angle
/// traced by `theta' = pi/2 - 2 theta`.
pub fn shifted_solid_angle(lp: &FrameLoop) -> f64 {
    -lp.integrate(|f| 1.0 - (FRAC_PI_2 - 2.0 * f.theta).cos())
}

/// First order in a small overlap: `+-Omega_c/2 + (Omega_c'/4 + pi/2) s`.
///
/// The `pi/2` is a quarter of the azimuth swept by a single turn; the loop's
/// own winding angle is used so the correction stays `(s/4) oint sin 2theta dphi`.
pub fn berry_phase_small_overlap(lp: &FrameLoop) -> PhasePair {
    let omega = solid_angle(lp);
    let correction = 0.25 * (shifted_solid_angle(lp) + lp.winding_angle()) * lp.overlap;
    PhasePair::new(0.5 * omega + correction, -0.5 * omega + correction)
}

/// The `s -> 1` limit, `gamma_{n+1,n} = 1/2 oint (1 +- cos theta/(1 -+ sin theta)) dphi`.
pub fn berry_phase_unit_overlap(lp: &FrameLoop) -> Result<PhasePair> {
    for f in lp.frames() {
        let d = 1.0 - f.theta.sin();
        if d < SINGULARITY_GUARD {
            return Err(Error::SingularLimit(d));
        }
    }
    let gn = 0.5 * lp.integrate(|f| 1.0 - f.theta.cos() / (1.0 + f.theta.sin()));
    let gn1 = 0.5 * lp.integrate(|f| 1.0 + f.theta.cos() / (1.0 - f.theta.sin()));
    Ok(PhasePair::new(gn, gn1))
}

#[cfg(test)]
mod tests {
    use super::*;

    const N: usize = DEFAULT_LOOP_POINTS;

    #[test]
    fn diagonal_frame() {
        let f = frame_from_deltas(1.0, -1.0, C64::new(0.0, 0.0), 0.0).unwrap();
        assert_eq!(f.theta, 0.0);
        assert_eq!(f.phi, 0.0);
        assert_eq!((f.delta_e_plus, f.delta_e_minus), (1.0, -1.0));
    }

    #[test]
    fn off_diagonal_frame() {
        let f = frame_from_deltas(0.0, 0.0, C64::from_polar(0.5, PI / 3.0), 0.0).unwrap();
        assert!((f.theta - FRAC_PI_2).abs() < 1e-15);
        assert!((f.phi - PI / 3.0).abs() < 1e-15);
        assert!((f.delta_e_plus - 0.5).abs() < 1e-15 && (f.delta_e_minus + 0.5).abs() < 1e-15);
    }

    #[test]
    fn general_frame_matches_hermitian_eigensolve() {
        let f = frame_from_deltas(3.0, 1.0, C64::new(1.0, 0.0), 0.0).unwrap();
        assert!((f.theta.cos() - 1.0 / 2f64.sqrt()).abs() < 1e-12);
        let m = nalgebra::Matrix2::new(3.0, 1.0, 1.0, 1.0);
        let mut ev: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        assert!((f.delta_e_minus - ev[0]).abs() < 1e-12 && (f.delta_e_plus - ev[1]).abs() < 1e-12);
        assert!((f.delta_e_plus - (2.0 + 2f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn zero_splitting_is_degenerate() {
        assert_eq!(frame_from_deltas(0.5, 0.5, C64::new(0.0, 0.0), 0.0), Err(Error::DegenerateFrame));
    }

    #[test]
    fn solid_angles() {
        let eq = FrameLoop::constant_theta(FRAC_PI_2, 0.0, N).unwrap();
        assert!((solid_angle(&eq) - TAU).abs() < 1e-12);
        assert!(solid_angle(&FrameLoop::constant_theta(0.0, 0.0, N).unwrap()).abs() < 1e-15);
        let third = FrameLoop::constant_theta(PI / 3.0, 0.0, N).unwrap();
        assert!((solid_angle(&third) - PI).abs() < 1e-12);
    }

    #[test]
    fn perturbative_examples() {
        let eq = berry_phase_perturbative(&FrameLoop::constant_theta(FRAC_PI_2, 0.0, N).unwrap());
        assert!(eq.distance(&PhasePair::new(PI, PI)) < 1e-12);
        let third = berry_phase_perturbative(&FrameLoop::constant_theta(PI / 3.0, 0.0, N).unwrap());
        assert!(third.distance(&PhasePair::new(FRAC_PI_2, 1.5 * PI)) < 1e-12);
        let eq_s = berry_phase_perturbative(&FrameLoop::constant_theta(FRAC_PI_2, 0.5, N).unwrap());
        assert!(eq_s.distance(&PhasePair::new(PI, PI)) < 1e-12);
    }

    #[test]
    fn constant_theta_examples() {
        let eq = berry_phase_constant_theta(FRAC_PI_2, 0.0).unwrap();
        assert!(eq.distance(&PhasePair::new(PI, PI)) < 1e-15);
        let pole = berry_phase_constant_theta(0.0, 0.0).unwrap();
        assert!(pole.distance(&PhasePair::new(0.0, 0.0)) < 1e-15);
        let g = berry_phase_constant_theta(PI / 3.0, 1.0).unwrap();
        let s60 = (PI / 3.0).sin();
        let want = PI * (1.0 + s60 - 0.5) / (1.0 + s60);
        assert!((g.gamma_n - want).abs() < 1e-12);
        assert!((g.gamma_n / PI - 0.7321).abs() < 1e-4);
        assert!(matches!(berry_phase_constant_theta(FRAC_PI_2, 1.0), Err(Error::NearSingular(_))));
    }

    #[test]
    fn small_overlap_examples() {
        let eq = berry_phase_small_overlap(&FrameLoop::constant_theta(FRAC_PI_2, 0.3, N).unwrap());
        assert!(eq.distance(&PhasePair::new(PI, PI)) < 1e-12);
        let lp = FrameLoop::from_profile(|phi| 1.0 + 0.3 * phi.sin(), 0.0, N).unwrap();
        let omega = solid_angle(&lp);
        assert!(berry_phase_small_overlap(&lp).distance(&PhasePair::new(0.5 * omega, -0.5 * omega)) < 1e-15);
    }

    #[test]
    fn small_overlap_error_is_second_order() {
        let err = |s: f64| {
            let lp = FrameLoop::constant_theta(PI / 3.0, s, N).unwrap();
            berry_phase_small_overlap(&lp).distance(&berry_phase_perturbative(&lp))
        };
        let ratio = err(0.02) / err(0.01);
        assert!(ratio > 3.5 && ratio < 4.5, "{ratio}");
    }

    #[test]
    fn unit_overlap_examples() {
        let third = berry_phase_unit_overlap(&FrameLoop::constant_theta(PI / 3.0, 1.0, N).unwrap()).unwrap();
        let exact = berry_phase_constant_theta(PI / 3.0, 1.0).unwrap();
        assert!(third.distance(&exact) < 1e-10);
        let pole = berry_phase_unit_overlap(&FrameLoop::constant_theta(0.0, 1.0, N).unwrap()).unwrap();
        assert!(pole.distance(&PhasePair::new(0.0, 0.0)) < 1e-12);
        let q = berry_phase_unit_overlap(&FrameLoop::constant_theta(PI / 4.0, 0.0, N).unwrap()).unwrap();
        let r = 1.0 / 2f64.sqrt();
        assert!((q.gamma_n1 - wrap_2pi(PI * (1.0 + r / (1.0 - r)))).abs() < 1e-12);
        assert!(matches!(
            berry_phase_unit_overlap(&FrameLoop::constant_theta(FRAC_PI_2, 0.0, N).unwrap()),
            Err(Error::SingularLimit(_))
        ));
    }

    #[test]
    fn loop_validation() {
        assert!(matches!(FrameLoop::constant_theta(FRAC_PI_2, 1.0, N), Err(Error::NearSingular(_))));
        let f = PerturbationFrame::from_angles(1.0, 0.0, 0.0).unwrap();
        let g = PerturbationFrame::from_angles(1.0, 1.0, 0.0).unwrap();
        assert_eq!(FrameLoop::new(vec![f, g, g, g]), Err(Error::NotClosed));
        assert!(PerturbationFrame::from_angles(1.0, 0.0, 1.5).is_err());
    }

    #[test]
    fn reversal_negates_phases() {
        let lp = FrameLoop::from_profile(|phi| 1.2 + 0.2 * (2.0 * phi).cos(), 0.4, N).unwrap();
        let fwd = berry_phase_perturbative(&lp);
        let back = berry_phase_perturbative(&lp.reversed());
        assert!(back.distance(&PhasePair::new(-fwd.gamma_n, -fwd.gamma_n1)) < 1e-12);
    }
}
