//! Nonlinearity witness and the adiabatic Loschmidt echo.

use crate::model::{stationary_states, ModelParams};
use crate::{Error, Result};

/// Overlap of the lowest pair of stationary states at one parameter point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitnessReport {
    pub params: ModelParams,
    pub pair_energies: [f64; 2],
    pub witness: f64,
}

/// `|<Psi_a|Psi_b>|` for the two lowest-energy stationary states: the
/// self-trapped pair at `R = 0, c > v`, the nearest pair otherwise. Zero for
/// any linear system.
pub fn nonlinearity_witness(params: &ModelParams, tol: f64) -> Result<WitnessReport> {
    let family = stationary_states(params, tol)?;
    if family.len() < 2 {
        return Err(Error::ModelDegenerate(family.len()));
    }
    let (a, b) = (&family.states[0], &family.states[1]);
    Ok(WitnessReport {
        params: *params,
        pair_energies: [a.energy(), b.energy()],
        witness: a.overlap(b).norm().min(1.0),
    })
}

/// Adiabatic echo `L = |cos(theta/2) + sin(theta/2) s|^2 / (1 + sin(theta) s)`
/// for a system started in the lower degenerate state. Independent of the
/// size of the perturbation.
pub fn loschmidt_adiabatic(theta: f64, s: f64) -> f64 {
    // Squared numerator expanded in full angles.
    let (sin, cos) = theta.sin_cos();
    let numerator = 0.5 * (1.0 + cos) + sin * s + 0.5 * (1.0 - cos) * s * s;
    numerator / (1.0 + sin * s)
}

/// Echo when the off-diagonal perturbation is negligible against the
/// diagonal splitting: `s^2` if `dH_{n,n} < dH_{n+1,n+1}`, `1` if greater.
/// `ordering` is `dH_{n,n} - dH_{n+1,n+1}` (only its sign is used).
pub fn loschmidt_adiabatic_limit(s: f64, ordering: f64) -> Result<f64> {
    if ordering < 0.0 {
        Ok(s * s)
    } else if ordering > 0.0 {
        Ok(1.0)
    } else {
        Err(Error::AmbiguousRegime)
    }
}
