//! Time evolution under the nonlinear Schrodinger equation
//! `i d/dt psi = H(psi; X(t)) psi` and the dynamical Loschmidt echo.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64 as C64;

use crate::model::{apply_unchecked, inner, norm_sqr, Amplitudes, Eigenstate, ModelParams};
use crate::{Error, Result};

/// Largest pre-renormalization norm change tolerated in one step.
pub const MAX_STEP_DRIFT: f64 = 1e-6;

/// Offsets `(dR, dv, dphi)` added to the base parameters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ParamOffset {
    pub bias: f64,
    pub coupling: f64,
    pub phase: f64,
}

type OffsetFn = dyn Fn(f64) -> ParamOffset + Send + Sync;

/// Base parameters plus a time-dependent offset on `[0, T]`.
#[derive(Clone)]
pub struct DriveSchedule {
    base: ModelParams,
    duration: f64,
    perturbation: Arc<OffsetFn>,
}

impl fmt::Debug for DriveSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DriveSchedule")
            .field("base", &self.base)
            .field("duration", &self.duration)
            .finish_non_exhaustive()
    }
}

impl DriveSchedule {
    pub fn new(
        base: ModelParams,
        duration: f64,
        perturbation: impl Fn(f64) -> ParamOffset + Send + Sync + 'static,
    ) -> Result<Self> {
        if !(duration > 0.0 && duration.is_finite()) {
            return Err(Error::InvalidParams(format!("duration T = {duration} must be positive")));
        }
        Ok(Self { base, duration, perturbation: Arc::new(perturbation) })
    }

    /// No perturbation at all.
    pub fn constant(base: ModelParams, duration: f64) -> Result<Self> {
        Self::new(base, duration, |_| ParamOffset::default())
    }

    /// Slow transport around the degeneracy of `base`: the perturbation has
    /// magnitude `amplitude`, starts along the diagonal (`theta = 0`), tilts to
    /// `theta` with a `sin^2` ramp over the first quarter of the run and makes
    /// one turn in azimuth with vanishing angular speed at both ends.
    ///
    /// With the degenerate pair `(1, 0)`, `(0, 1)` the chart is
    /// `dR = amplitude cos(theta)`, `dv = amplitude sin(theta)`, `dphi = phi`.
    pub fn adiabatic_loop(base: ModelParams, duration: f64, amplitude: f64, theta: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::InvalidParams(format!("theta = {theta} outside [0, pi]")));
        }
        Self::new(base, duration, move |t| {
            let tau = (t / duration).clamp(0.0, 1.0);
            let tilt = theta * polar_ramp(tau);
            ParamOffset {
                bias: amplitude * tilt.cos(),
                coupling: amplitude * tilt.sin(),
                phase: TAU * tau - (TAU * tau).sin(),
            }
        })
    }

    pub fn base(&self) -> &ModelParams {
        &self.base
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn offset(&self, t: f64) -> ParamOffset {
        (self.perturbation)(t)
    }

    /// Parameters at time `t`; a negative total coupling is folded into the phase.
    pub fn params_at(&self, t: f64) -> Result<ModelParams> {
        let d = self.offset(t);
        ModelParams::from_signed(
            self.base.bias() + d.bias,
            self.base.nonlinearity(),
            self.base.coupling() + d.coupling,
            self.base.phase() + d.phase,
        )
    }

    /// Whether the offset returns to its start at `T`.
    pub fn is_closed(&self) -> bool {
        let (a, b) = (self.offset(0.0), self.offset(self.duration));
        (a.bias - b.bias).abs() < 1e-12
            && (a.coupling - b.coupling).abs() < 1e-12
            && crate::angle_distance(a.phase, b.phase) < 1e-12
    }

    /// Largest `(|R| + c + v)/2` seen on a coarse sample of the drive.
    fn energy_scale(&self) -> Result<f64> {
        (0..=64).try_fold(0.0f64, |acc, k| {
            let p = self.params_at(self.duration * k as f64 / 64.0)?;
            Ok(acc.max(0.5 * (p.bias().abs() + p.nonlinearity() + p.coupling())))
        })
    }
}

fn polar_ramp(tau: f64) -> f64 {
    const RAMP: f64 = 0.25;
    if tau >= RAMP {
        1.0
    } else {
        (0.5 * PI * tau / RAMP).sin().powi(2)
    }
}

/// Samples of a normalized trajectory, one per step including `t = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Amplitudes>,
    /// Largest `| |psi| - 1 |` seen before renormalizing a step.
    pub max_step_drift: f64,
}

fn rhs(params: &ModelParams, psi: &Amplitudes) -> Amplitudes {
    let h = apply_unchecked(params, psi);
    let mi = C64::new(0.0, -1.0);
    [mi * h[0], mi * h[1]]
}

fn axpy(y: &Amplitudes, h: f64, k: &Amplitudes) -> Amplitudes {
    [y[0] + h * k[0], y[1] + h * k[1]]
}

/// Fixed-step classical RK4, renormalized after every step. The step is
/// adjusted so an integer number of steps spans the drive exactly.
pub fn evolve_nonlinear(initial: &Eigenstate, drive: &DriveSchedule, dt: f64) -> Result<Trajectory> {
    evolve_amplitudes(*initial.amplitudes(), drive, dt)
}

/// [`evolve_nonlinear`] from arbitrary normalized amplitudes.
pub fn evolve_amplitudes(initial: Amplitudes, drive: &DriveSchedule, dt: f64) -> Result<Trajectory> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::StepSize(format!("dt = {dt} must be positive")));
    }
    let scale = drive.energy_scale()?;
    if dt * scale >= 0.1 {
        return Err(Error::StepSize(format!("dt * energy scale = {} >= 0.1", dt * scale)));
    }
    let n0 = norm_sqr(&initial).sqrt();
    if (n0 - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidState(format!("initial norm {n0} != 1")));
    }

    let steps = ((drive.duration / dt).round() as usize).max(1);
    let h = drive.duration / steps as f64;
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut y = [initial[0] / n0, initial[1] / n0];
    times.push(0.0);
    states.push(y);
    let mut max_step_drift = 0.0f64;

    for k in 0..steps {
        let t = k as f64 * h;
        let p0 = drive.params_at(t)?;
        let pm = drive.params_at(t + 0.5 * h)?;
        let p1 = drive.params_at(t + h)?;
        let k1 = rhs(&p0, &y);
        let k2 = rhs(&pm, &axpy(&y, 0.5 * h, &k1));
        let k3 = rhs(&pm, &axpy(&y, 0.5 * h, &k2));
        let k4 = rhs(&p1, &axpy(&y, h, &k3));
        let next = [
            y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        ];
        let norm = norm_sqr(&next).sqrt();
        let drift = (norm - 1.0).abs();
        if drift.is_nan() || drift > MAX_STEP_DRIFT {
            return Err(Error::StepSize(format!("norm drift {drift:.3e} at t = {t}")));
        }
        max_step_drift = max_step_drift.max(drift);
        y = [next[0] / norm, next[1] / norm];
        times.push((k + 1) as f64 * h);
        states.push(y);
    }
    Ok(Trajectory { times, states, max_step_drift })
}

/// Loschmidt echo samples `L(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EchoTrace {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl EchoTrace {
    pub fn last(&self) -> Option<(f64, f64)> {
        Some((*self.times.last()?, *self.values.last()?))
    }
}

/// `L(t) = |<psi_pert(t)|psi_base(t)>|^2` for two trajectories launched from
/// `initial`, one under constant `base`, one under `perturbed`.
pub fn loschmidt_dynamical(
    initial: &Eigenstate,
    base: &ModelParams,
    perturbed: &DriveSchedule,
    dt: f64,
) -> Result<EchoTrace> {
    if initial.residual_under(base) >= 1e-8 {
        return Err(Error::InvalidState("initial state is not stationary under the base parameters".into()));
    }
    let reference = DriveSchedule::constant(*base, perturbed.duration)?;
    let (a, b) = std::thread::scope(|scope| {
        let h = scope.spawn(|| evolve_nonlinear(initial, &reference, dt));
        let b = evolve_nonlinear(initial, perturbed, dt);
        (h.join().expect("reference trajectory panicked"), b)
    });
    let (a, b) = (a?, b?);
    let values = a.states.iter().zip(&b.states).map(|(x, y)| inner(y, x).norm_sqr().min(1.0)).collect();
    Ok(EchoTrace { times: a.times, values })
}
