//! Lambda-type perturbation around a threefold degeneracy.
//!
//! Basis order throughout is `(|n+1>, |n>, |n-1>)` of real, orthonormal
//! degenerate states. The perturbation couples `|n-1>` to the other two:
//!
//! ```text
//! dH = [ 0  0  q ]      d = dH_{n-1,n-1}
//!      [ 0  0  p ]      p = dH_{n-1,n}
//!      [ q  p  d ]      q = dH_{n-1,n+1}
//! ```

use std::f64::consts::{FRAC_PI_2, TAU};

use nalgebra::{Matrix3, Vector3};

use crate::{wrap_2pi, Error, Result};

/// Chart `(Omega, theta, phi)` of a triple perturbation, with
/// `Omega^2 = d^2 + 4p^2 + 4q^2`, `cos(theta) = d/Omega`,
/// `sin(theta) cos(phi) = 2p/Omega`, `sin(theta) sin(phi) = 2q/Omega`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TripleFrame {
    pub d: f64,
    pub p: f64,
    pub q: f64,
    pub omega: f64,
    pub theta: f64,
    pub phi: f64,
}

pub fn triple_frame(d: f64, p: f64, q: f64) -> Result<TripleFrame> {
    let omega = (d * d + 4.0 * p * p + 4.0 * q * q).sqrt();
    if omega == 0.0 {
        return Err(Error::AtDegeneracy("Omega = 0".into()));
    }
    let theta = (d / omega).clamp(-1.0, 1.0).acos();
    let phi = if p == 0.0 && q == 0.0 { 0.0 } else { wrap_2pi(q.atan2(p)) };
    Ok(TripleFrame { d, p, q, omega, theta, phi })
}

impl TripleFrame {
    /// Frame at arbitrary angles; `theta` may run over the full circle.
    pub fn from_angles(omega: f64, theta: f64, phi: f64) -> Result<Self> {
        if omega.is_nan() || omega <= 0.0 {
            return Err(Error::AtDegeneracy(format!("Omega = {omega}")));
        }
        let half = 0.5 * omega * theta.sin();
        Ok(Self { d: omega * theta.cos(), p: half * phi.cos(), q: half * phi.sin(), omega, theta, phi })
    }

    pub fn matrix(&self) -> Matrix3<f64> {
        Matrix3::new(0.0, 0.0, self.q, 0.0, 0.0, self.p, self.q, self.p, self.d)
    }
}

/// Which of the three perturbed levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Level {
    /// `Psi_{n-1}`, eigenvalue `(d - Omega)/2`.
    Lower,
    /// `Psi_n`, eigenvalue `0`.
    Middle,
    /// `Psi_{n+1}`, eigenvalue `(d + Omega)/2`.
    Upper,
}

impl Level {
    pub const ALL: [Level; 3] = [Level::Lower, Level::Middle, Level::Upper];
}

/// Eigenvector coefficients over `(|n+1>, |n>, |n-1>)` in the closed form
/// parametrized by `(theta, phi)`.
pub fn eigenvector(level: Level, theta: f64, phi: f64) -> Vector3<f64> {
    let (hs, hc) = (0.5 * theta).sin_cos();
    let (sp, cp) = phi.sin_cos();
    match level {
        Level::Lower => Vector3::new(-hc * sp, -hc * cp, hs),
        Level::Middle => Vector3::new(cp, -sp, 0.0),
        Level::Upper => Vector3::new(hs * sp, hs * cp, hc),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigenpair {
    pub level: Level,
    pub eigenvalue: f64,
    pub vector: Vector3<f64>,
}

/// The three eigenpairs of a triple perturbation, ordered lower, middle, upper.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TripleEigensystem {
    pub pairs: [Eigenpair; 3],
}

impl TripleEigensystem {
    /// Largest `||dH v - lambda v||` over the three pairs.
    pub fn max_residual(&self, frame: &TripleFrame) -> f64 {
        let m = frame.matrix();
        self.pairs.iter().map(|e| (m * e.vector - e.eigenvalue * e.vector).norm()).fold(0.0, f64::max)
    }
}

pub fn triple_eigensystem(frame: &TripleFrame) -> TripleEigensystem {
    let eig = |level: Level| match level {
        Level::Lower => 0.5 * (frame.d - frame.omega),
        Level::Middle => 0.0,
        Level::Upper => 0.5 * (frame.d + frame.omega),
    };
    let pair = |level| Eigenpair { level, eigenvalue: eig(level), vector: eigenvector(level, frame.theta, frame.phi) };
    TripleEigensystem { pairs: [pair(Level::Lower), pair(Level::Middle), pair(Level::Upper)] }
}

/// The angle advanced around a transport loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LoopAngle {
    /// Great circle through the poles at fixed azimuth.
    Theta,
    /// Equator, `theta = pi/2`.
    Phi,
}

/// Fixed azimuth used for theta-loops.
pub const THETA_LOOP_PHI: f64 = 0.7;
/// Starting point on each loop.
pub const LOOP_START: f64 = 0.25;

/// Sign acquired by a level after transport once around the loop.
pub fn transport_sign(loop_angle: LoopAngle, level: Level, samples: usize) -> Result<i8> {
    transport_sign_from(loop_angle, level, samples, LOOP_START)
}

/// [`transport_sign`] starting at angle `start`.
///
/// The eigenvector is followed step by step with its sign chosen to keep the
/// overlap with the previous step positive, and each step is checked to be an
/// eigenvector of the local perturbation.
pub fn transport_sign_from(loop_angle: LoopAngle, level: Level, samples: usize, start: f64) -> Result<i8> {
    if samples < 16 {
        return Err(Error::TooFewPoints { got: samples, need: 16 });
    }
    let angles = |alpha: f64| match loop_angle {
        LoopAngle::Theta => (alpha, THETA_LOOP_PHI),
        LoopAngle::Phi => (FRAC_PI_2, alpha),
    };
    let at = |alpha: f64| -> Result<Vector3<f64>> {
        let (theta, phi) = angles(alpha);
        let frame = TripleFrame::from_angles(1.0, theta, phi)?;
        let sys = triple_eigensystem(&frame);
        if sys.max_residual(&frame) > 1e-10 {
            return Err(Error::InvalidState("closed-form vector is not an eigenvector".into()));
        }
        Ok(eigenvector(level, theta, phi))
    };

    let first = at(start)?;
    let mut prev = first;
    for k in 1..=samples {
        let alpha = start + TAU * k as f64 / samples as f64;
        let mut next = at(alpha)?;
        let ov = prev.dot(&next);
        if ov.abs() < 0.5 {
            return Err(Error::LoopTooCoarse { index: k, overlap: ov.abs() });
        }
        if ov < 0.0 {
            next = -next;
        }
        prev = next;
    }
    Ok(if first.dot(&prev) < 0.0 { -1 } else { 1 })
}

/// Winding test: whether a planar loop of `(d, p, q)` points winds around
/// the degeneracy at the origin once projected onto the plane with the
/// given normal.
pub fn encloses_degeneracy(points: &[[f64; 3]], normal: [f64; 3]) -> Result<bool> {
    if points.len() < 3 {
        return Err(Error::TooFewPoints { got: points.len(), need: 3 });
    }
    let n = Vector3::from(normal);
    if n.norm() == 0.0 {
        return Err(Error::UnsupportedGeometry("zero plane normal".into()));
    }
    let n = n.normalize();
    let pts: Vec<Vector3<f64>> = points.iter().map(|&x| Vector3::from(x)).collect();
    let scale = pts.iter().map(|x| x.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let tol = 1e-9 * scale;
    let height = n.dot(&pts[0]);
    if pts.iter().any(|x| (n.dot(x) - height).abs() > tol) {
        return Err(Error::UnsupportedGeometry("loop points are not coplanar".into()));
    }

    // Orthonormal in-plane axes.
    let helper = if n.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() };
    let u = n.cross(&helper).normalize();
    let w = n.cross(&u);
    let flat: Vec<(f64, f64)> = pts.iter().map(|x| (u.dot(x), w.dot(x))).collect();

    let mut total = 0.0;
    for k in 0..flat.len() {
        let a = flat[k];
        let b = flat[(k + 1) % flat.len()];
        if segment_distance(a, b) <= tol {
            return Err(Error::AtDegeneracy("loop passes through the degeneracy".into()));
        }
        let mut d = b.1.atan2(b.0) - a.1.atan2(a.0);
        if d > std::f64::consts::PI {
            d -= TAU;
        } else if d <= -std::f64::consts::PI {
            d += TAU;
        }
        total += d;
    }
    Ok((total / TAU).round() as i64 != 0)
}

/// Distance from the origin to the segment `a`-`b`.
fn segment_distance(a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 { 0.0 } else { (-(a.0 * dx + a.1 * dy) / len2).clamp(0.0, 1.0) };
    (a.0 + t * dx).hypot(a.1 + t * dy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn frame_examples() {
        let f = triple_frame(0.0, 1.0, 0.0).unwrap();
        assert_eq!((f.omega, f.phi), (2.0, 0.0));
        assert!((f.theta - FRAC_PI_2).abs() < 1e-15);
        let g = triple_frame(2.0, 0.0, 0.0).unwrap();
        assert_eq!((g.omega, g.theta, g.phi), (2.0, 0.0, 0.0));
        let h = triple_frame(1.0, 1.0, 1.0).unwrap();
        assert!((h.omega - 3.0).abs() < 1e-15);
        assert!((h.theta.sin() * h.phi.cos() - 2.0 / 3.0).abs() < 1e-12);
        assert!((h.theta.sin() * h.phi.sin() - 2.0 / 3.0).abs() < 1e-12);
        assert!((h.theta.cos() - 1.0 / 3.0).abs() < 1e-12);
        assert!(matches!(triple_frame(0.0, 0.0, 0.0), Err(Error::AtDegeneracy(_))));
    }

    #[test]
    fn pole_eigenvectors() {
        let sys = triple_eigensystem(&TripleFrame::from_angles(1.0, 0.0, 0.0).unwrap());
        assert_eq!(sys.pairs[2].vector, Vector3::new(0.0, 0.0, 1.0));
        assert_eq!(sys.pairs[0].vector, Vector3::new(-0.0, -1.0, 0.0));
    }

    #[test]
    fn equator_spectrum_matches_eigensolve() {
        let frame = TripleFrame::from_angles(2.0, FRAC_PI_2, 0.0).unwrap();
        let sys = triple_eigensystem(&frame);
        let got: Vec<f64> = sys.pairs.iter().map(|e| e.eigenvalue).collect();
        assert!((got[0] + 1.0).abs() < 1e-12 && got[1] == 0.0 && (got[2] - 1.0).abs() < 1e-12);
        let mut ev: Vec<f64> = frame.matrix().symmetric_eigen().eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        for (a, b) in ev.iter().zip(&got) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn unit_frame_residuals() {
        let f = triple_frame(1.0, 1.0, 1.0).unwrap();
        assert!(triple_eigensystem(&f).max_residual(&f) < 1e-12);
    }

    #[test]
    fn sign_table() {
        for level in Level::ALL {
            assert_eq!(transport_sign(LoopAngle::Phi, level, 64).unwrap(), 1);
        }
        assert_eq!(transport_sign(LoopAngle::Theta, Level::Lower, 64).unwrap(), -1);
        assert_eq!(transport_sign(LoopAngle::Theta, Level::Middle, 64).unwrap(), 1);
        assert_eq!(transport_sign(LoopAngle::Theta, Level::Upper, 64).unwrap(), -1);
        assert!(matches!(transport_sign(LoopAngle::Theta, Level::Upper, 8), Err(Error::TooFewPoints { .. })));
    }

    #[test]
    fn half_theta_turn_swaps_outer_levels() {
        let (t, phi) = (0.4, 1.1);
        let swapped = eigenvector(Level::Lower, t + PI, phi);
        assert!(swapped.dot(&eigenvector(Level::Upper, t, phi)).abs() > 1.0 - 1e-12);
        assert!((eigenvector(Level::Middle, t + PI, phi) - eigenvector(Level::Middle, t, phi)).norm() < 1e-12);
    }

    #[test]
    fn winding() {
        let circle = |cx: f64, r: f64| -> Vec<[f64; 3]> {
            (0..64)
                .map(|k| {
                    let a = TAU * k as f64 / 64.0;
                    [0.0, cx + r * a.cos(), r * a.sin()]
                })
                .collect()
        };
        assert!(encloses_degeneracy(&circle(0.0, 1.0), [1.0, 0.0, 0.0]).unwrap());
        assert!(!encloses_degeneracy(&circle(3.0, 1.0), [1.0, 0.0, 0.0]).unwrap());
        assert!(matches!(encloses_degeneracy(&circle(1.0, 1.0), [1.0, 0.0, 0.0]), Err(Error::AtDegeneracy(_))));
        let mut bent = circle(0.0, 1.0);
        bent[5][0] = 0.3;
        assert!(matches!(encloses_degeneracy(&bent, [1.0, 0.0, 0.0]), Err(Error::UnsupportedGeometry(_))));
    }
}
