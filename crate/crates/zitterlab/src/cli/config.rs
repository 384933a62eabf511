//! Run configuration: a flat `key = value` text format with `[section]`
//! headers, so configs can be read and written without any parser
//! dependency.
//!
//! ```text
//! # comment — everything after '#' is ignored
//! [params]
//! a = 1.0
//! A = -4.0
//!
//! [run]
//! mode = simulate          # optional; must match the subcommand if given
//! tau_end = 20.0
//! step = 0.001
//! seed = 42
//! sample_count = 1000      # check mode
//! out = results            # output directory, overridden by --out
//!
//! [initial]                # simulate mode: exactly one of the two forms
//! omega = 0.7071067811865476
//! phase = 0.0
//! # u0 = 1.7320508075688772, 0, 1.4142135623730951, 0
//! # udot0 = 0, -1, 0, 0
//! # uddot0 = 0, 0, -0.7071067811865476, 0
//!
//! [sweep]                  # sweep mode
//! A_values = -6, -4, -2, 0
//! omega_values = 0.5, 0.7071067811865476, 1.0
//! ```

use std::path::PathBuf;

use crate::lagrangians::BoppParams;
use crate::minkowski::FourVector;

/// Which front-end operation a run performs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Check,
    Simulate,
    Sweep,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Check => "check",
            Mode::Simulate => "simulate",
            Mode::Sweep => "sweep",
        }
    }

    pub fn from_name(s: &str) -> Option<Mode> {
        match s {
            "check" => Some(Mode::Check),
            "simulate" => Some(Mode::Simulate),
            "sweep" => Some(Mode::Sweep),
            _ => None,
        }
    }
}

/// Explicit unit-gauge initial jet for `simulate`.
#[derive(Debug, Clone, Copy)]
pub struct InitialData {
    pub u0: FourVector,
    pub udot0: FourVector,
    pub uddot0: FourVector,
}

/// Helical initial data for `simulate`: start on the closed-form helix of
/// this frequency and phase.
#[derive(Debug, Clone, Copy)]
pub struct HelixSpec {
    pub omega: f64,
    pub phase: f64,
}

/// A parsed configuration with defaults applied.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub params: BoppParams,
    /// Mode named in the file, if any; the subcommand is authoritative and
    /// a mismatch is a config error.
    pub mode: Option<Mode>,
    pub tau_end: f64,
    pub step: f64,
    pub seed: u64,
    pub sample_count: usize,
    pub out: Option<PathBuf>,
    pub initial: Option<InitialData>,
    pub helix: Option<HelixSpec>,
    pub sweep_big_a: Vec<f64>,
    pub sweep_omega: Vec<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            params: BoppParams { a: 1.0, big_a: 1.0 },
            mode: None,
            tau_end: 20.0,
            step: 1e-3,
            seed: 42,
            sample_count: 1000,
            out: None,
            initial: None,
            helix: None,
            sweep_big_a: Vec::new(),
            sweep_omega: Vec::new(),
        }
    }
}

fn parse_f64(value: &str, line: usize, key: &str) -> Result<f64, String> {
    value
        .parse()
        .map_err(|_| format!("line {line}: key '{key}': '{value}' is not a number"))
}

fn parse_vec4(value: &str, line: usize, key: &str) -> Result<FourVector, String> {
    let parts: Vec<&str> = value.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        return Err(format!(
            "line {line}: key '{key}': expected 4 comma-separated components, got {}",
            parts.len()
        ));
    }
    let mut c = [0.0; 4];
    for (slot, part) in c.iter_mut().zip(&parts) {
        *slot = parse_f64(part, line, key)?;
    }
    Ok(FourVector::from_array(c))
}

fn parse_list(value: &str, line: usize, key: &str) -> Result<Vec<f64>, String> {
    if value.is_empty() {
        return Ok(Vec::new());
    }
    value
        .split(',')
        .map(|part| parse_f64(part.trim(), line, key))
        .collect()
}

/// Parse a configuration file.  Unknown sections, unknown keys, duplicate
/// keys, and malformed values are all errors with the offending line number.
pub fn parse_config(text: &str) -> Result<RunConfig, String> {
    let mut cfg = RunConfig::default();
    let mut section: Option<String> = None;
    let mut seen = std::collections::HashSet::new();
    let (mut u0, mut udot0, mut uddot0) = (None, None, None);
    let (mut omega, mut phase) = (None, None);

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        if let Some(inner) = body.strip_prefix('[') {
            let Some(name) = inner.strip_suffix(']') else {
                return Err(format!("line {line}: malformed section header '{body}'"));
            };
            match name {
                "params" | "run" | "initial" | "sweep" => section = Some(name.to_string()),
                _ => return Err(format!("line {line}: unknown section '[{name}]'")),
            }
            continue;
        }
        let Some((key, value)) = body.split_once('=') else {
            return Err(format!("line {line}: expected 'key = value', got '{body}'"));
        };
        let (key, value) = (key.trim(), value.trim());
        let Some(sec) = section.as_deref() else {
            return Err(format!("line {line}: key '{key}' outside any [section]"));
        };
        if !seen.insert(format!("{sec}.{key}")) {
            return Err(format!("line {line}: duplicate key '{key}' in [{sec}]"));
        }
        match (sec, key) {
            ("params", "a") => cfg.params.a = parse_f64(value, line, key)?,
            ("params", "A") => cfg.params.big_a = parse_f64(value, line, key)?,
            ("run", "mode") => {
                cfg.mode = Some(Mode::from_name(value).ok_or_else(|| {
                    format!("line {line}: mode must be check, simulate or sweep, got '{value}'")
                })?)
            }
            ("run", "tau_end") => cfg.tau_end = parse_f64(value, line, key)?,
            ("run", "step") => cfg.step = parse_f64(value, line, key)?,
            ("run", "seed") => {
                cfg.seed = value.parse().map_err(|_| {
                    format!("line {line}: key 'seed': '{value}' is not an unsigned integer")
                })?
            }
            ("run", "sample_count") => {
                cfg.sample_count = value.parse().map_err(|_| {
                    format!("line {line}: key 'sample_count': '{value}' is not an unsigned integer")
                })?
            }
            ("run", "out") => cfg.out = Some(PathBuf::from(value)),
            ("initial", "u0") => u0 = Some(parse_vec4(value, line, key)?),
            ("initial", "udot0") => udot0 = Some(parse_vec4(value, line, key)?),
            ("initial", "uddot0") => uddot0 = Some(parse_vec4(value, line, key)?),
            ("initial", "omega") => omega = Some(parse_f64(value, line, key)?),
            ("initial", "phase") => phase = Some(parse_f64(value, line, key)?),
            ("sweep", "A_values") => cfg.sweep_big_a = parse_list(value, line, key)?,
            ("sweep", "omega_values") => cfg.sweep_omega = parse_list(value, line, key)?,
            _ => return Err(format!("line {line}: unknown key '{key}' in [{sec}]")),
        }
    }

    let explicit = u0.is_some() || udot0.is_some() || uddot0.is_some();
    match (explicit, omega) {
        (true, Some(_)) => {
            return Err(
                "[initial] gives both an explicit jet (u0/udot0/uddot0) and a helix (omega)"
                    .to_string(),
            )
        }
        (true, None) => {
            let (Some(u0), Some(udot0), Some(uddot0)) = (u0, udot0, uddot0) else {
                return Err(
                    "explicit initial data needs all three of u0, udot0, uddot0".to_string()
                );
            };
            cfg.initial = Some(InitialData { u0, udot0, uddot0 });
        }
        (false, Some(omega)) => {
            cfg.helix = Some(HelixSpec {
                omega,
                phase: phase.unwrap_or(0.0),
            });
        }
        (false, None) => {
            if phase.is_some() {
                return Err("[initial] gives phase without omega".to_string());
            }
        }
    }
    Ok(cfg)
}

impl RunConfig {
    /// Checks shared by every mode: couplings finite with a ≠ 0 (the
    /// momentum map loses rank at a = 0), a positive finite horizon and
    /// step.
    pub fn validate_common(&self) -> Result<(), String> {
        if self.params.a == 0.0 {
            return Err(
                "a = 0 violates the rank condition: the second-order momentum map degenerates"
                    .to_string(),
            );
        }
        if !self.params.a.is_finite() || !self.params.big_a.is_finite() {
            return Err("couplings a, A must be finite".to_string());
        }
        if !(self.tau_end > 0.0) || !self.tau_end.is_finite() {
            return Err(format!("tau_end must be positive, got {}", self.tau_end));
        }
        if !(self.step > 0.0) || !self.step.is_finite() {
            return Err(format!("step must be positive, got {}", self.step));
        }
        Ok(())
    }
}
