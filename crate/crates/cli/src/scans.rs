//! The five subcommands. Grid points run in parallel; rows are emitted in
//! grid order.

use std::f64::consts::PI;

use nlberry::berry::{berry_phase_closed_form, berry_phase_discrete};
use nlberry::dynamics::{loschmidt_dynamical, DriveSchedule};
use nlberry::echo::{loschmidt_adiabatic, nonlinearity_witness};
use nlberry::model::{continue_branch, stationary_states, Eigenstate, ModelParams, ParamPath};
use nlberry::triple::{transport_sign, Level, LoopAngle};
use nlberry::C64;
use rayon::prelude::*;

use crate::config::{Axis, BerryMethod, Mode, ScanConfig};
use crate::csv::{fmt_g, Csv};
use crate::error::{CliError, Result};

fn expect_mode(cfg: &ScanConfig, mode: Mode) -> Result<()> {
    if cfg.mode != mode {
        return Err(CliError::Usage(format!("config is for '{}', not '{}'", cfg.mode.name(), mode.name())));
    }
    Ok(())
}

fn params(cfg: &ScanConfig, r: f64, v: f64) -> Result<ModelParams> {
    ModelParams::new(r, cfg.nonlinearity, v, cfg.phase).map_err(CliError::compute(format!("R={r}, v={v}")))
}

/// `(R, v)` pairs, `R` outer.
fn grid(outer: &Axis, inner: &Axis) -> Vec<(f64, f64)> {
    let inner = inner.values();
    outer.values().into_iter().flat_map(|a| inner.iter().map(move |&b| (a, b))).collect()
}

fn fixed(axis: &Axis, key: &str) -> Result<f64> {
    match *axis {
        Axis::Fixed(x) => Ok(x),
        Axis::Range { .. } => Err(CliError::Usage(format!("{key} must be a single value in this mode"))),
    }
}

/// Energies of every stationary state per grid point, ordered as the family.
pub fn run_spectrum_scan(cfg: &ScanConfig) -> Result<String> {
    expect_mode(cfg, Mode::Spectrum)?;
    let rows = grid(&cfg.bias, &cfg.coupling)
        .into_par_iter()
        .map(|(r, v)| {
            let fam = stationary_states(&params(cfg, r, v)?, cfg.tol)
                .map_err(CliError::compute(format!("spectrum at R={r}, v={v}")))?;
            let mut cells = vec![fmt_g(r), fmt_g(v)];
            cells.extend((0..4).map(|i| fam.states.get(i).map_or_else(String::new, |s| fmt_g(s.energy()))));
            Ok(cells)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut csv = Csv::new("spectrum", &cfg.canonical(), &["R", "v", "E1", "E2", "E3", "E4"]);
    rows.into_iter().for_each(|r| csv.row(r));
    Ok(csv.into_string())
}

fn lowest_state(p: &ModelParams, tol: f64) -> Result<Eigenstate> {
    let fam = stationary_states(p, tol).map_err(CliError::compute(format!("states at {p:?}")))?;
    Ok(*fam.lowest().expect("stationary families are never empty"))
}

/// Berry phase of the lowest-energy state, in units of pi.
pub fn run_berry_scan(cfg: &ScanConfig) -> Result<String> {
    expect_mode(cfg, Mode::Berry)?;
    let rows = grid(&cfg.bias, &cfg.coupling)
        .into_par_iter()
        .map(|(r, v)| {
            let p = params(cfg, r, v)?;
            let lowest = lowest_state(&p, cfg.tol)?;
            let ctx = format!("berry phase at R={r}, v={v}");
            let gamma = match cfg.method {
                BerryMethod::Closed => berry_phase_closed_form(v, lowest.energy()).map_err(CliError::compute(ctx))?,
                BerryMethod::Discrete => {
                    let path = ParamPath::phase_loop(p, cfg.loop_points);
                    continue_branch(&path, &lowest, cfg.tol)
                        .and_then(|b| berry_phase_discrete(&b))
                        .map_err(CliError::compute(ctx))?
                }
            };
            Ok(vec![fmt_g(r), fmt_g(v), fmt_g(gamma / PI)])
        })
        .collect::<Result<Vec<_>>>()?;
    let mut csv = Csv::new("berry", &cfg.canonical(), &["R", "v", "gamma_over_pi"]);
    rows.into_iter().for_each(|r| csv.row(r));
    Ok(csv.into_string())
}

/// Witness per grid point, one contiguous curve per `R`.
pub fn run_witness_scan(cfg: &ScanConfig) -> Result<String> {
    expect_mode(cfg, Mode::Witness)?;
    let c = cfg.nonlinearity;
    let rows = grid(&cfg.bias, &cfg.coupling)
        .into_par_iter()
        .map(|(r, v)| {
            let w = nonlinearity_witness(&params(cfg, r, v)?, cfg.tol)
                .map_err(CliError::compute(format!("witness at R={r}, v={v}")))?;
            let ratio = if c == 0.0 { f64::INFINITY } else { v / c };
            Ok(vec![fmt_g(ratio), fmt_g(r), fmt_g(w.witness)])
        })
        .collect::<Result<Vec<_>>>()?;
    let mut csv = Csv::new("witness", &cfg.canonical(), &["v_over_c", "R", "witness"]);
    rows.into_iter().for_each(|r| csv.row(r));
    Ok(csv.into_string())
}

/// Dynamical echo from `(1, 0)` under the slow loop drive, every `stride`
/// steps plus the final step, then a summary with the adiabatic value.
pub fn run_echo(cfg: &ScanConfig) -> Result<String> {
    expect_mode(cfg, Mode::Echo)?;
    let base = params(cfg, fixed(&cfg.bias, "R")?, fixed(&cfg.coupling, "v")?)?;
    let start = Eigenstate::from_amplitudes(&base, [C64::new(1.0, 0.0), C64::new(0.0, 0.0)], cfg.tol)
        .map_err(CliError::compute("initial state (1, 0) under the base parameters"))?;
    let drive = DriveSchedule::adiabatic_loop(base, cfg.duration, cfg.amplitude, cfg.theta)
        .map_err(CliError::compute("drive"))?;
    let trace = loschmidt_dynamical(&start, &base, &drive, cfg.dt).map_err(CliError::compute("echo"))?;
    let mut csv = Csv::new("echo", &cfg.canonical(), &["t", "L"]);
    let n = trace.times.len();
    for (i, (t, l)) in trace.times.iter().zip(&trace.values).enumerate() {
        if i % cfg.stride == 0 || i + 1 == n {
            csv.row([fmt_g(*t), fmt_g(*l)]);
        }
    }
    csv.comment(&format!(
        "summary theta={} s={} L_adiabatic={}",
        fmt_g(cfg.theta),
        fmt_g(cfg.overlap),
        fmt_g(loschmidt_adiabatic(cfg.theta, cfg.overlap))
    ));
    Ok(csv.into_string())
}

fn sign(s: i8) -> String {
    if s > 0 {
        "+1".into()
    } else {
        "-1".into()
    }
}

/// Signs acquired after one turn along the phi- and theta-loops.
pub fn run_triple_table(cfg: &ScanConfig) -> Result<String> {
    expect_mode(cfg, Mode::Triple)?;
    let mut csv = Csv::new("triple", &cfg.canonical(), &["alpha", "n-1", "n", "n+1"]);
    for (name, angle) in [("phi", LoopAngle::Phi), ("theta", LoopAngle::Theta)] {
        let mut cells = vec![name.to_string()];
        for level in Level::ALL {
            let s = transport_sign(angle, level, cfg.samples).map_err(CliError::compute(format!("{name}-loop")))?;
            cells.push(sign(s));
        }
        csv.row(cells);
    }
    Ok(csv.into_string())
}

/// Dispatch on the configured mode.
pub fn run(cfg: &ScanConfig) -> Result<String> {
    match cfg.mode {
        Mode::Spectrum => run_spectrum_scan(cfg),
        Mode::Berry => run_berry_scan(cfg),
        Mode::Witness => run_witness_scan(cfg),
        Mode::Echo => run_echo(cfg),
        Mode::Triple => run_triple_table(cfg),
    }
}
