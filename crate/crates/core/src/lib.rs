//! Stationary states, Berry phases, a nonlinearity witness and Loschmidt
//! echoes for nonlinear two-mode systems transported around double and
//! triple degeneracies.
//!
//! The nonlinear two-level (dimer) Hamiltonian is
//!
//! ```text
//! H(psi) = [ R/2 + c m/2        (v/2) e^{i phi} ]
//!          [ (v/2) e^{-i phi}   -R/2 - c m/2    ],   m = |psi2|^2 - |psi1|^2
//! ```
//!
//! Stationary states come from the real roots of a quartic in the energy,
//! validated by rebuilding each state and checking its residual.

pub mod berry;
pub mod dynamics;
pub mod echo;
mod error;
pub mod model;
pub mod perturbation;
pub mod quartic;
pub mod triple;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

use std::f64::consts::TAU;

/// Reduce an angle to `[0, 2pi)`.
pub fn wrap_2pi(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Distance between two angles on the circle, in `[0, pi]`.
pub fn angle_distance(a: f64, b: f64) -> f64 {
    let d = wrap_2pi(a - b);
    d.min(TAU - d)
}
