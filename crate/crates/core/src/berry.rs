//! Berry phases of the dimer under a loop in the coupling phase.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::model::{inner, Amplitudes, Eigenstate};
use crate::{wrap_2pi, Error, Result};

/// Minimum number of loop points for the discrete phase.
pub const MIN_LOOP_POINTS: usize = 16;

/// Closed-form phase `pi (1 - sqrt(1 - v^2 / 4E^2))` for a loop in `phi` at
/// fixed `(R, c, v)`.
///
/// The formula only knows `|E|`, so it carries no orientation: on a branch
/// with imbalance `m > 0` the transported phase is its negative mod 2pi.
pub fn berry_phase_closed_form(v: f64, energy: f64) -> Result<f64> {
    let e2 = 4.0 * energy * energy;
    if e2 < v * v * (1.0 - 1e-12) || e2 == 0.0 {
        return Err(Error::InvalidState(format!("4E^2 = {e2} < v^2 = {}", v * v)));
    }
    Ok(PI * (1.0 - (1.0 - v * v / e2).max(0.0).sqrt()))
}

/// Phase of the cyclic product of successive overlaps, `-Arg prod <k|k+1>`,
/// reduced to `[0, 2pi)`. Independent of the per-point gauge.
pub fn discrete_loop_phase<'a, I>(states: I) -> Result<f64>
where
    I: IntoIterator<Item = &'a Amplitudes>,
{
    let states: Vec<&Amplitudes> = states.into_iter().collect();
    let n = states.len();
    if n < MIN_LOOP_POINTS {
        return Err(Error::TooFewPoints { got: n, need: MIN_LOOP_POINTS });
    }
    let mut product = C64::new(1.0, 0.0);
    for k in 0..n {
        let ov = inner(states[k], states[(k + 1) % n]);
        let modulus = ov.norm();
        if modulus < 0.5 {
            return Err(Error::LoopTooCoarse { index: k, overlap: modulus });
        }
        product *= ov / modulus;
    }
    Ok(wrap_2pi(-product.arg()))
}

/// Discrete Berry phase of a branch followed around a closed loop.
pub fn berry_phase_discrete(branch: &[Eigenstate]) -> Result<f64> {
    discrete_loop_phase(branch.iter().map(Eigenstate::amplitudes))
}
