//! The nonlinear two-level Hamiltonian and its stationary states.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::quartic::{quartic_coefficients, solve_quartic_real_roots};
use crate::{wrap_2pi, Error, Result};

/// Amplitudes `(psi1, psi2)` of a two-mode state.
pub type Amplitudes = [C64; 2];

/// Default validation tolerance for residuals and root polishing.
pub const DEFAULT_TOL: f64 = 1e-10;

const NORM_TOL: f64 = 1e-9;

/// Parameters `(R, c, v, phi)` of the dimer Hamiltonian.
///
/// `v` and `c` are non-negative; a negative coupling is absorbed into the
/// phase by [`ModelParams::from_signed`]. The phase is stored in `[0, 2pi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    bias: f64,
    nonlinearity: f64,
    coupling: f64,
    phase: f64,
}

impl ModelParams {
    pub fn new(bias: f64, nonlinearity: f64, coupling: f64, phase: f64) -> Result<Self> {
        if ![bias, nonlinearity, coupling, phase].iter().all(|x| x.is_finite()) {
            return Err(Error::InvalidParams("non-finite parameter".into()));
        }
        if nonlinearity < 0.0 {
            return Err(Error::InvalidParams(format!("nonlinearity c = {nonlinearity} < 0")));
        }
        if coupling < 0.0 {
            return Err(Error::InvalidParams(format!("coupling v = {coupling} < 0")));
        }
        Ok(Self { bias, nonlinearity, coupling, phase: wrap_2pi(phase) })
    }

    /// Like [`ModelParams::new`] but folds a negative coupling into the phase.
    pub fn from_signed(bias: f64, nonlinearity: f64, coupling: f64, phase: f64) -> Result<Self> {
        if coupling < 0.0 {
            Self::new(bias, nonlinearity, -coupling, phase + PI)
        } else {
            Self::new(bias, nonlinearity, coupling, phase)
        }
    }

    /// Level bias `R`.
    pub fn bias(&self) -> f64 {
        self.bias
    }

    /// Nonlinearity `c`.
    pub fn nonlinearity(&self) -> f64 {
        self.nonlinearity
    }

    /// Coupling magnitude `v`.
    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    /// Coupling phase `phi` in `[0, 2pi)`.
    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn with_phase(self, phase: f64) -> Self {
        Self { phase: wrap_2pi(phase), ..self }
    }

    pub fn with_bias(self, bias: f64) -> Self {
        Self { bias, ..self }
    }

    fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        (self.bias - other.bias).abs() <= tol
            && (self.nonlinearity - other.nonlinearity).abs() <= tol
            && (self.coupling - other.coupling).abs() <= tol
            && crate::angle_distance(self.phase, other.phase) <= tol
    }
}

pub fn inner(a: &Amplitudes, b: &Amplitudes) -> C64 {
    a[0].conj() * b[0] + a[1].conj() * b[1]
}

pub fn norm_sqr(a: &Amplitudes) -> f64 {
    a[0].norm_sqr() + a[1].norm_sqr()
}

/// Population imbalance `|psi2|^2 - |psi1|^2` of the normalized ray.
pub fn imbalance(a: &Amplitudes) -> f64 {
    (a[1].norm_sqr() - a[0].norm_sqr()) / norm_sqr(a)
}

/// `H(psi) psi` without the normalization check. The imbalance is taken
/// from the normalized ray so intermediate integrator stages stay on the
/// physical Hamiltonian.
pub(crate) fn apply_unchecked(params: &ModelParams, psi: &Amplitudes) -> Amplitudes {
    let m = imbalance(psi);
    let a = 0.5 * params.bias + 0.5 * params.nonlinearity * m;
    let off = C64::from_polar(0.5 * params.coupling, params.phase);
    [a * psi[0] + off * psi[1], off.conj() * psi[0] - a * psi[1]]
}

/// Apply the self-consistent Hamiltonian `H(psi)` to `psi`.
pub fn hamiltonian_apply(params: &ModelParams, psi: &Amplitudes) -> Result<Amplitudes> {
    let n = norm_sqr(psi);
    if (n.sqrt() - 1.0).abs() > NORM_TOL {
        return Err(Error::InvalidState(format!("amplitudes not normalized (|psi|^2 = {n})")));
    }
    Ok(apply_unchecked(params, psi))
}

fn residual(params: &ModelParams, psi: &Amplitudes, energy: f64) -> f64 {
    let h = apply_unchecked(params, psi);
    ((h[0] - energy * psi[0]).norm_sqr() + (h[1] - energy * psi[1]).norm_sqr()).sqrt()
}

/// Gauge convention: `psi1` real and non-negative, or `psi2` when `psi1`
/// vanishes.
fn fix_gauge(psi: Amplitudes) -> Amplitudes {
    let pivot = if psi[0].norm() < 1e-12 { psi[1] } else { psi[0] };
    if pivot.norm() == 0.0 {
        return psi;
    }
    let g = pivot.conj() / pivot.norm();
    let mut out = [psi[0] * g, psi[1] * g];
    if psi[0].norm() < 1e-12 {
        out[0] = C64::new(0.0, 0.0);
        out[1] = C64::new(out[1].re, 0.0);
    } else {
        out[0] = C64::new(out[0].re, 0.0);
    }
    out
}

/// A validated stationary state of the nonlinear Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigenstate {
    amplitudes: Amplitudes,
    energy: f64,
    imbalance: f64,
    residual: f64,
}

impl Eigenstate {
    /// Validate arbitrary normalized amplitudes as a stationary state of
    /// `params`. The energy is the Rayleigh quotient.
    pub fn from_amplitudes(params: &ModelParams, psi: Amplitudes, tol: f64) -> Result<Self> {
        let n = norm_sqr(&psi);
        if (n.sqrt() - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("amplitudes not normalized (|psi|^2 = {n})")));
        }
        let s = 1.0 / n.sqrt();
        let psi = fix_gauge([psi[0] * s, psi[1] * s]);
        let energy = inner(&psi, &apply_unchecked(params, &psi)).re;
        Self::validated(params, psi, energy, tol)
            .ok_or_else(|| Error::InvalidState("amplitudes are not stationary".into()))
    }

    fn validated(params: &ModelParams, psi: Amplitudes, energy: f64, tol: f64) -> Option<Self> {
        let res = residual(params, &psi, energy);
        let v = params.coupling;
        let energy_ok = 4.0 * energy * energy - v * v >= -tol * v.max(1.0).powi(2);
        (res < tol && energy_ok).then(|| Self { amplitudes: psi, energy, imbalance: imbalance(&psi), residual: res })
    }

    pub fn amplitudes(&self) -> &Amplitudes {
        &self.amplitudes
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    /// `m = |psi2|^2 - |psi1|^2`.
    pub fn imbalance(&self) -> f64 {
        self.imbalance
    }

    /// `||H(psi) psi - E psi||` under the parameters it was validated for.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn overlap(&self, other: &Eigenstate) -> C64 {
        inner(&self.amplitudes, &other.amplitudes)
    }

    /// Residual of this state's amplitudes and energy under other parameters.
    pub fn residual_under(&self, params: &ModelParams) -> f64 {
        residual(params, &self.amplitudes, self.energy)
    }
}

/// Rebuild a state with energy `energy` and imbalance `m`, or `None` when the
/// candidate is not stationary.
fn build_state(params: &ModelParams, energy: f64, m: f64, tol: f64) -> Option<Eigenstate> {
    if !m.is_finite() || m.abs() > 1.0 + 1e-12 {
        return None;
    }
    let m = m.clamp(-1.0, 1.0);
    let a = 0.5 * params.bias + 0.5 * params.nonlinearity * m;
    // psi2/psi1 = (E - a) e^{-i phi} / (v/2) = (v/2) e^{-i phi} / (E + a); the
    // two forms share their sign, take it from the better conditioned one.
    let lead = if (energy - a).abs() >= (energy + a).abs() { energy - a } else { energy + a };
    let sign = if lead < 0.0 { -1.0 } else { 1.0 };
    let psi1 = C64::new((0.5 * (1.0 - m)).sqrt(), 0.0);
    let psi2 = C64::from_polar(sign * (0.5 * (1.0 + m)).sqrt(), -params.phase);
    Eigenstate::validated(params, fix_gauge([psi1, psi2]), energy, tol)
}

/// Invert the self-consistency behind the quartic: all stationary states
/// with energy `energy` (zero, one or two of them).
pub fn reconstruct_states(params: &ModelParams, energy: f64, tol: f64) -> Vec<Eigenstate> {
    let (r, c, v) = (params.bias, params.nonlinearity, params.coupling);
    let denom = 2.0 * energy + c;
    if c > 0.0 && denom.abs() <= 1e-9 * c && r.abs() <= tol {
        // Self-trapping branch: c^2 m^2 = c^2 - v^2.
        if c < v {
            return Vec::new();
        }
        let m = (1.0 - (v / c).powi(2)).max(0.0).sqrt();
        let mut out: Vec<Eigenstate> = [-m, m].iter().filter_map(|&mm| build_state(params, energy, mm, tol)).collect();
        out.dedup_by(|a, b| (a.imbalance - b.imbalance).abs() <= 1e-9);
        return out;
    }
    build_state(params, energy, -r / denom, tol).into_iter().collect()
}

/// All stationary states at one parameter point, ordered by
/// `(energy, imbalance)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryFamily {
    pub params: ModelParams,
    pub states: Vec<Eigenstate>,
}

impl StationaryFamily {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn energies(&self) -> Vec<f64> {
        self.states.iter().map(Eigenstate::energy).collect()
    }

    pub fn lowest(&self) -> Option<&Eigenstate> {
        self.states.first()
    }
}

/// Every valid stationary state at `params`.
pub fn stationary_states(params: &ModelParams, tol: f64) -> Result<StationaryFamily> {
    if params.coupling == 0.0 && params.bias == 0.0 {
        return Err(Error::InvalidParams("need v > 0 or R != 0".into()));
    }
    let mut states: Vec<Eigenstate> = solve_quartic_real_roots(&quartic_coefficients(params), tol)
        .into_iter()
        .flat_map(|root| reconstruct_states(params, root.value, tol))
        .collect();
    states.sort_by(|a, b| a.energy.total_cmp(&b.energy).then(a.imbalance.total_cmp(&b.imbalance)));
    states.dedup_by(|a, b| (a.energy - b.energy).abs() <= 1e-9 && (a.imbalance - b.imbalance).abs() <= 1e-9);
    Ok(StationaryFamily { params: *params, states })
}

/// Parameters sampled along a curve.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamPath {
    points: Vec<ModelParams>,
    closed: bool,
}

impl ParamPath {
    pub fn new(points: Vec<ModelParams>, closed: bool) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::TooFewPoints { got: 0, need: 1 });
        }
        if closed && !points[0].approx_eq(points.last().unwrap(), 1e-12) {
            return Err(Error::NotClosed);
        }
        Ok(Self { points, closed })
    }

    /// Closed loop in the coupling phase at fixed `(R, c, v)`: `n` distinct
    /// points plus the repeated start.
    pub fn phase_loop(base: ModelParams, n: usize) -> Self {
        let mut points: Vec<ModelParams> =
            (0..n).map(|k| base.with_phase(base.phase + 2.0 * PI * k as f64 / n as f64)).collect();
        points.push(points[0]);
        Self { points, closed: true }
    }

    /// Straight open path from `from` to `to` with `n >= 2` points.
    pub fn linear(from: ModelParams, to: ModelParams, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::TooFewPoints { got: n, need: 2 });
        }
        let lerp = |a: f64, b: f64, t: f64| a + (b - a) * t;
        let points = (0..n)
            .map(|k| {
                let t = k as f64 / (n - 1) as f64;
                ModelParams::new(
                    lerp(from.bias, to.bias, t),
                    lerp(from.nonlinearity, to.nonlinearity, t),
                    lerp(from.coupling, to.coupling, t),
                    lerp(from.phase, to.phase, t),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { points, closed: false })
    }

    pub fn points(&self) -> &[ModelParams] {
        &self.points
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// The candidate with the largest overlap modulus against `prev`.
fn best_match(prev: &Eigenstate, candidates: &[Eigenstate], index: usize) -> Result<Eigenstate> {
    let (best, overlap) = candidates
        .iter()
        .map(|s| (s, prev.overlap(s).norm()))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or(Error::BranchLost { index, overlap: 0.0 })?;
    if overlap < 0.5 {
        return Err(Error::BranchLost { index, overlap });
    }
    Ok(*best)
}

/// Follow the branch of `seed` along `path` by maximal overlap.
pub fn continue_branch(path: &ParamPath, seed: &Eigenstate, tol: f64) -> Result<Vec<Eigenstate>> {
    if seed.residual_under(&path.points[0]) >= tol {
        return Err(Error::InvalidState("seed is not stationary at the path start".into()));
    }
    let mut branch: Vec<Eigenstate> = Vec::with_capacity(path.len());
    let mut prev = *seed;
    for (index, params) in path.points.iter().enumerate() {
        let family = stationary_states(params, tol)?;
        prev = best_match(&prev, &family.states, index)?;
        branch.push(prev);
    }
    Ok(branch)
}
