//! Line-oriented `key = value` run configuration.
//!
//! Unknown keys are rejected rather than ignored so that typos surface
//! immediately instead of silently running with defaults.

use std::fmt;
use std::path::PathBuf;

/// Which integrator drives the run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Implicit box scheme on the space-time grid.
    Polysymplectic,
    /// Fourier/RK4 baseline on a periodic grid.
    Pseudospectral,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scheme::Polysymplectic => write!(f, "polysymplectic"),
            Scheme::Pseudospectral => write!(f, "pseudospectral"),
        }
    }
}

/// Fully validated run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub scheme: Scheme,
    pub x_max: f64,
    pub n_x: usize,
    pub dt: f64,
    pub t_final: f64,
    pub soliton_m: f64,
    /// Physical times at which to write field snapshots (each in
    /// `[0, t_final]`; mapped to the nearest step index at run time).
    pub snapshot_times: Vec<f64>,
    pub output_dir: PathBuf,
    pub seed: u64,
    pub dealiasing: bool,
    /// Relative amplitude the initial profile may retain at the right
    /// boundary (where the marching scheme pins the fields to zero).
    pub boundary_tol: f64,
    /// Refinement levels used by the convergence subcommand.
    pub levels: usize,
}

/// Configuration failures, named after the offending key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConfigError {
    MissingKey(String),
    InvalidValue(String, String),
    UnknownKey(String),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::MissingKey(k) => write!(f, "missing required key `{k}`"),
            ConfigError::InvalidValue(k, why) => write!(f, "invalid value for `{k}`: {why}"),
            ConfigError::UnknownKey(k) => write!(f, "unknown key `{k}`"),
        }
    }
}

impl std::error::Error for ConfigError {}

const KNOWN_KEYS: &[&str] = &[
    "scheme",
    "x_max",
    "n_x",
    "dt",
    "t_final",
    "soliton_m",
    "snapshot_times",
    "output_dir",
    "seed",
    "dealiasing",
    "boundary_tol",
    "levels",
];

fn invalid(key: &str, why: &str) -> ConfigError {
    ConfigError::InvalidValue(key.to_string(), why.to_string())
}

fn parse_f64(key: &str, value: &str) -> Result<f64, ConfigError> {
    let v: f64 = value
        .parse()
        .map_err(|_| invalid(key, "not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(invalid(key, "must be finite"))
    }
}

fn parse_positive(key: &str, value: &str) -> Result<f64, ConfigError> {
    let v = parse_f64(key, value)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(invalid(key, "must be positive"))
    }
}

/// Parses and validates the text of a configuration file.
///
/// Grammar: one `key = value` pair per line, `#` starts a comment, blank
/// lines are ignored. Required keys: `scheme`, `x_max`, `n_x`, `dt`,
/// `t_final`. Optional keys and defaults: `soliton_m` 0.2,
/// `snapshot_times` "0,t_final", `output_dir` "out", `seed` 0,
/// `dealiasing` off, `boundary_tol` 1e-4, `levels` 3.
pub fn parse_config(text: &str) -> Result<SimConfig, ConfigError> {
    let mut pairs: Vec<(String, String)> = Vec::new();
    for raw in text.lines() {
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| ConfigError::UnknownKey(line.to_string()))?;
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(ConfigError::UnknownKey(key));
        }
        if pairs.iter().any(|(k, _)| *k == key) {
            return Err(invalid(&key, "specified more than once"));
        }
        pairs.push((key, value));
    }

    let get = |key: &str| pairs.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str());
    let require = |key: &str| get(key).ok_or_else(|| ConfigError::MissingKey(key.to_string()));

    let scheme = match require("scheme")? {
        "polysymplectic" => Scheme::Polysymplectic,
        "pseudospectral" => Scheme::Pseudospectral,
        _ => {
            return Err(invalid(
                "scheme",
                "must be `polysymplectic` or `pseudospectral`",
            ))
        }
    };
    let x_max = parse_positive("x_max", require("x_max")?)?;
    let n_x: usize = require("n_x")?
        .parse()
        .map_err(|_| invalid("n_x", "not a positive integer"))?;
    if n_x == 0 {
        return Err(invalid("n_x", "must be positive"));
    }
    if scheme == Scheme::Pseudospectral && !n_x.is_power_of_two() {
        return Err(invalid(
            "n_x",
            "must be a power of two for the pseudospectral scheme",
        ));
    }
    let dt = parse_positive("dt", require("dt")?)?;
    let t_final = parse_positive("t_final", require("t_final")?)?;

    let soliton_m = match get("soliton_m") {
        Some(v) => {
            let m = parse_positive("soliton_m", v)?;
            if m >= 1.0 {
                return Err(invalid("soliton_m", "must lie strictly between 0 and 1"));
            }
            m
        }
        None => 0.2,
    };

    let snapshot_times = match get("snapshot_times") {
        Some(v) => {
            let mut times = Vec::new();
            for part in v.split(',') {
                let t = parse_f64("snapshot_times", part.trim())?;
                if !(0.0..=t_final).contains(&t) {
                    return Err(invalid(
                        "snapshot_times",
                        "each time must lie in [0, t_final]",
                    ));
                }
                times.push(t);
            }
            times
        }
        None => vec![0.0, t_final],
    };

    let output_dir = PathBuf::from(get("output_dir").unwrap_or("out"));
    let seed = match get("seed") {
        Some(v) => v
            .parse()
            .map_err(|_| invalid("seed", "not an unsigned integer"))?,
        None => 0,
    };
    let dealiasing = match get("dealiasing") {
        Some("on") => true,
        Some("off") | None => false,
        Some(_) => return Err(invalid("dealiasing", "must be `on` or `off`")),
    };
    let boundary_tol = match get("boundary_tol") {
        Some(v) => parse_positive("boundary_tol", v)?,
        None => 1e-4,
    };
    let levels = match get("levels") {
        Some(v) => {
            let n: usize = v
                .parse()
                .map_err(|_| invalid("levels", "not a positive integer"))?;
            if n == 0 {
                return Err(invalid("levels", "must be positive"));
            }
            n
        }
        None => 3,
    };

    Ok(SimConfig {
        scheme,
        x_max,
        n_x,
        dt,
        t_final,
        soliton_m,
        snapshot_times,
        output_dir,
        seed,
        dealiasing,
        boundary_tol,
        levels,
    })
}

impl SimConfig {
    /// Number of time steps, `round(t_final / dt)`, at least one.
    pub fn n_t(&self) -> usize {
        ((self.t_final / self.dt).round() as usize).max(1)
    }

    /// Maps each requested snapshot time to its nearest step index and the
    /// time actually reached there. Ordered, deduplicated by index.
    pub fn snapshot_steps(&self) -> Vec<(f64, usize, f64)> {
        let n_t = self.n_t();
        let mut mapped: Vec<(f64, usize, f64)> = self
            .snapshot_times
            .iter()
            .map(|&t| {
                let j = ((t / self.dt).round() as usize).min(n_t);
                (t, j, j as f64 * self.dt)
            })
            .collect();
        mapped.sort_by(|a, b| a.1.cmp(&b.1));
        mapped.dedup_by_key(|e| e.1);
        mapped
    }
}
