//! Scan configuration: flat `key = value` files merged with flags.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::csv::fmt_g;
use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Spectrum,
    Berry,
    Witness,
    Echo,
    Triple,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Spectrum => "spectrum",
            Mode::Berry => "berry",
            Mode::Witness => "witness",
            Mode::Echo => "echo",
            Mode::Triple => "triple",
        }
    }
}

impl FromStr for Mode {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "spectrum" => Mode::Spectrum,
            "berry" => Mode::Berry,
            "witness" => Mode::Witness,
            "echo" => Mode::Echo,
            "triple" => Mode::Triple,
            other => return Err(CliError::Usage(format!("unknown mode '{other}'"))),
        })
    }
}

/// Berry phase evaluation in `berry` scans.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BerryMethod {
    Closed,
    Discrete,
}

/// A scanned range `start:stop:count` (inclusive ends) or a fixed value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Axis {
    Fixed(f64),
    Range { start: f64, stop: f64, count: usize },
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        match *self {
            Axis::Fixed(x) => vec![x],
            Axis::Range { start, stop, count } => (0..count)
                .map(|i| if i + 1 == count { stop } else { start + (stop - start) * i as f64 / (count - 1) as f64 })
                .collect(),
        }
    }

    fn parse(key: &str, text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(':').map(str::trim).collect();
        match parts.as_slice() {
            [x] => Ok(Axis::Fixed(number(key, x)?)),
            [a, b, n] => {
                let count: usize = n.parse().map_err(|_| CliError::Usage(format!("{key}: bad point count '{n}'")))?;
                if count < 2 {
                    return Err(CliError::Usage(format!("{key}: axis needs at least 2 points")));
                }
                Ok(Axis::Range { start: number(key, a)?, stop: number(key, b)?, count })
            }
            _ => Err(CliError::Usage(format!("{key}: expected a number or start:stop:count, got '{text}'"))),
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Axis::Fixed(x) => write!(f, "{}", fmt_g(x)),
            Axis::Range { start, stop, count } => write!(f, "{}:{}:{count}", fmt_g(start), fmt_g(stop)),
        }
    }
}

fn number(key: &str, text: &str) -> Result<f64> {
    let x: f64 = text.trim().parse().map_err(|_| CliError::Usage(format!("{key}: '{text}' is not a number")))?;
    if !x.is_finite() {
        return Err(CliError::Usage(format!("{key}: value must be finite")));
    }
    Ok(x)
}

fn positive(key: &str, text: &str) -> Result<f64> {
    let x = number(key, text)?;
    if x <= 0.0 {
        return Err(CliError::Usage(format!("{key}: must be > 0, got {text}")));
    }
    Ok(x)
}

fn count(key: &str, text: &str) -> Result<usize> {
    text.trim().parse().map_err(|_| CliError::Usage(format!("{key}: '{text}' is not a non-negative integer")))
}

/// Keys accepted in config files and their flag spellings.
pub const KEYS: [&str; 16] = [
    "R",
    "v",
    "c",
    "phi",
    "loop-points",
    "dt",
    "T",
    "tol",
    "theta",
    "s",
    "amplitude",
    "samples",
    "stride",
    "method",
    "out",
    "mode",
];

/// Unparsed settings; later sources override earlier ones.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    values: BTreeMap<String, String>,
}

impl RawConfig {
    /// Parse a flat config text: one `key = value` per line, `#` comments.
    pub fn parse(text: &str) -> Result<Self> {
        let mut raw = RawConfig::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("config line {}: expected key = value", lineno + 1)))?;
            raw.set(key.trim(), value.trim())?;
        }
        Ok(raw)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if !KEYS.contains(&key) {
            return Err(CliError::Usage(format!("unknown config key '{key}'")));
        }
        self.values.insert(key.to_string(), value.to_string());
        Ok(())
    }

    pub fn merge(&mut self, other: &RawConfig) {
        for (k, v) in &other.values {
            self.values.insert(k.clone(), v.clone());
        }
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }
}

/// Fully resolved settings for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanConfig {
    pub mode: Mode,
    pub bias: Axis,
    pub coupling: Axis,
    pub nonlinearity: f64,
    pub phase: f64,
    pub loop_points: usize,
    pub dt: f64,
    pub duration: f64,
    pub tol: f64,
    pub theta: f64,
    pub overlap: f64,
    pub amplitude: f64,
    pub samples: usize,
    pub stride: usize,
    pub method: BerryMethod,
    pub out: Option<PathBuf>,
}

impl ScanConfig {
    /// Per-mode default grids and settings.
    pub fn defaults(mode: Mode) -> Self {
        let (bias, coupling, nonlinearity) = match mode {
            Mode::Spectrum => (Axis::Range { start: -2.0, stop: 2.0, count: 201 }, Axis::Fixed(2.0), 1.0),
            Mode::Berry => (
                Axis::Range { start: -2.0, stop: 2.0, count: 41 },
                Axis::Range { start: 0.05, stop: 2.0, count: 40 },
                1.0,
            ),
            Mode::Witness => (
                Axis::Range { start: 0.0, stop: 2.0, count: 11 },
                Axis::Range { start: 0.05, stop: 4.0, count: 80 },
                1.0,
            ),
            Mode::Echo => (Axis::Fixed(0.0), Axis::Fixed(0.0), 0.0),
            Mode::Triple => (Axis::Fixed(0.0), Axis::Fixed(0.0), 0.0),
        };
        ScanConfig {
            mode,
            bias,
            coupling,
            nonlinearity,
            phase: 0.0,
            loop_points: 1024,
            dt: 0.01,
            duration: 200.0,
            tol: nlberry::model::DEFAULT_TOL,
            theta: FRAC_PI_2,
            overlap: 0.0,
            amplitude: 1.0,
            samples: 256,
            stride: 100,
            method: BerryMethod::Closed,
            out: None,
        }
    }

    pub fn resolve(mode: Mode, raw: &RawConfig) -> Result<Self> {
        let mut cfg = Self::defaults(mode);
        if let Some(m) = raw.get("mode") {
            if m.parse::<Mode>()? != mode {
                return Err(CliError::Usage(format!("config mode '{m}' does not match '{}'", mode.name())));
            }
        }
        for (key, value) in &raw.values {
            let value = value.as_str();
            match key.as_str() {
                "R" => cfg.bias = Axis::parse(key, value)?,
                "v" => cfg.coupling = Axis::parse(key, value)?,
                "c" => cfg.nonlinearity = number(key, value)?,
                "phi" => cfg.phase = number(key, value)?,
                "loop-points" => cfg.loop_points = count(key, value)?,
                "dt" => cfg.dt = positive(key, value)?,
                "T" => cfg.duration = positive(key, value)?,
                "tol" => cfg.tol = positive(key, value)?,
                "theta" => cfg.theta = number(key, value)?,
                "s" => cfg.overlap = number(key, value)?,
                "amplitude" => cfg.amplitude = number(key, value)?,
                "samples" => cfg.samples = count(key, value)?,
                "stride" => cfg.stride = count(key, value)?.max(1),
                "method" => {
                    cfg.method = match value {
                        "closed" => BerryMethod::Closed,
                        "discrete" => BerryMethod::Discrete,
                        other => return Err(CliError::Usage(format!("method: unknown '{other}'"))),
                    }
                }
                "out" => cfg.out = Some(PathBuf::from(value)),
                _ => {}
            }
        }
        if cfg.nonlinearity < 0.0 {
            return Err(CliError::Usage("c must be >= 0".into()));
        }
        if !(0.0..=1.0).contains(&cfg.overlap) {
            return Err(CliError::Usage("s must lie in [0, 1]".into()));
        }
        Ok(cfg)
    }

    /// Stable text of every setting that affects the output; hashed into the
    /// CSV header.
    pub fn canonical(&self) -> String {
        let method = match self.method {
            BerryMethod::Closed => "closed",
            BerryMethod::Discrete => "discrete",
        };
        format!(
            "mode={}\nR={}\nv={}\nc={}\nphi={}\nloop-points={}\ndt={}\nT={}\ntol={}\ntheta={}\ns={}\namplitude={}\nsamples={}\nstride={}\nmethod={method}\n",
            self.mode.name(),
            self.bias,
            self.coupling,
            fmt_g(self.nonlinearity),
            fmt_g(self.phase),
            self.loop_points,
            fmt_g(self.dt),
            fmt_g(self.duration),
            fmt_g(self.tol),
            fmt_g(self.theta),
            fmt_g(self.overlap),
            fmt_g(self.amplitude),
            self.samples,
            self.stride,
        )
    }
}
