//! Scenario configuration: a line-oriented `section.key = value` format.
//!
//! ```text
//! simulation.duration = 3600
//! lambda.E.through = 0.25
//! controller.kind = fuzzy
//! ev.schedule = 600@W.through
//! ```
//!
//! Every key has a default, so a file only needs the values it changes.
//! `%` and `#` start comment lines.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use crate::sim::Movement;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{}{key}: {message}", line.map(|l| format!("line {l}: ")).unwrap_or_default())]
pub struct ConfigError {
    pub key: String,
    pub line: Option<usize>,
    pub message: String,
}

impl ConfigError {
    fn new(key: &str, message: impl Into<String>) -> Self {
        Self {
            key: key.to_string(),
            line: None,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ControllerKind {
    Fuzzy,
    FixedTime,
    Actuated,
}

impl ControllerKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ControllerKind::Fuzzy => "fuzzy",
            ControllerKind::FixedTime => "fixed-time",
            ControllerKind::Actuated => "actuated",
        }
    }
}

impl FromStr for ControllerKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fuzzy" => Ok(ControllerKind::Fuzzy),
            "fixed-time" => Ok(ControllerKind::FixedTime),
            "actuated" => Ok(ControllerKind::Actuated),
            other => Err(format!(
                "unknown controller '{other}' (expected fuzzy, fixed-time or actuated)"
            )),
        }
    }
}

/// How a queued vehicle's discharge time is drawn during green.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ServiceMode {
    /// Fixed saturation headway.
    Deterministic,
    /// Exponential headways with mean `service.mean_headway`.
    Exponential,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ControllerConfig {
    pub kind: ControllerKind,
    pub preemption: bool,
    /// `None` uses the built-in rule base.
    pub fis: Option<PathBuf>,
    pub extension_threshold: f64,
    pub starvation_factor: f64,
    /// Fixed-time greens for P1..P4.
    pub fixed_green: [f64; 4],
    pub unit_extension: f64,
    pub gap_time: f64,
}

impl Default for ControllerConfig {
    fn default() -> Self {
        Self {
            kind: ControllerKind::Fuzzy,
            preemption: true,
            fis: None,
            extension_threshold: 0.5,
            starvation_factor: 2.0,
            fixed_green: [15.0; 4],
            unit_extension: 3.0,
            gap_time: 3.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmergencyArrival {
    pub time: f64,
    pub movement: Movement,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub duration: f64,
    pub seed: u64,
    /// Arrival rate per movement in vehicles/second, indexed by
    /// [`Movement::index`].
    pub lambda: [f64; 8],
    pub saturation_headway: f64,
    pub service_mode: ServiceMode,
    pub mean_headway: f64,
    pub min_green: f64,
    pub max_green: f64,
    pub intergreen: f64,
    pub ev_schedule: Vec<EmergencyArrival>,
    pub controller: ControllerConfig,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            duration: 3600.0,
            seed: 1,
            lambda: [0.1; 8],
            saturation_headway: 2.0,
            service_mode: ServiceMode::Deterministic,
            mean_headway: 2.0,
            min_green: 5.0,
            max_green: 50.0,
            intergreen: 2.0,
            ev_schedule: Vec::new(),
            controller: ControllerConfig::default(),
        }
    }
}

fn parse_f64(key: &str, value: &str) -> Result<f64, ConfigError> {
    value
        .parse::<f64>()
        .ok()
        .filter(|v| !v.is_nan())
        .ok_or_else(|| ConfigError::new(key, format!("expected a number, got '{value}'")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool, ConfigError> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        other => Err(ConfigError::new(
            key,
            format!("expected true or false, got '{other}'"),
        )),
    }
}

fn parse_schedule(key: &str, value: &str) -> Result<Vec<EmergencyArrival>, ConfigError> {
    value
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|item| {
            let (time, movement) = item.split_once('@').ok_or_else(|| {
                ConfigError::new(key, format!("entry '{item}' must look like 600@W.through"))
            })?;
            Ok(EmergencyArrival {
                time: parse_f64(key, time)?,
                movement: movement.parse().map_err(|e| ConfigError::new(key, e))?,
            })
        })
        .collect()
}

/// Shortest decimal that parses back to the same value.
fn num(x: f64) -> String {
    format!("{x}")
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('%') || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError {
                key: line.to_string(),
                line: Some(i + 1),
                message: "expected key = value".into(),
            })?;
            cfg.set(key.trim(), value.trim()).map_err(|mut e| {
                e.line = Some(i + 1);
                e
            })?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Applies one `key=value` override, then re-validates.
    pub fn apply_override(&mut self, assignment: &str) -> Result<(), ConfigError> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| ConfigError::new(assignment, "override must look like key=value"))?;
        self.set(key.trim(), value.trim())?;
        self.validate()
    }

    /// Sets a single key without cross-field validation.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        if let Some(movement) = key.strip_prefix("lambda.") {
            let m: Movement = movement
                .parse()
                .map_err(|e: String| ConfigError::new(key, e))?;
            self.lambda[m.index()] = parse_f64(key, value)?;
            return Ok(());
        }
        if let Some(phase) = key.strip_prefix("fixed.green.") {
            let idx = match phase {
                "P1" => 0,
                "P2" => 1,
                "P3" => 2,
                "P4" => 3,
                _ => return Err(ConfigError::new(key, "unknown key")),
            };
            self.controller.fixed_green[idx] = parse_f64(key, value)?;
            return Ok(());
        }
        let c = &mut self.controller;
        match key {
            "simulation.duration" => self.duration = parse_f64(key, value)?,
            "simulation.seed" => {
                self.seed = value.parse().map_err(|_| {
                    ConfigError::new(key, format!("expected an integer, got '{value}'"))
                })?
            }
            "timing.saturation_headway" => self.saturation_headway = parse_f64(key, value)?,
            "timing.min_green" => self.min_green = parse_f64(key, value)?,
            "timing.max_green" => self.max_green = parse_f64(key, value)?,
            "timing.intergreen" => self.intergreen = parse_f64(key, value)?,
            "service.mode" => {
                self.service_mode = match value {
                    "deterministic" => ServiceMode::Deterministic,
                    "exponential" => ServiceMode::Exponential,
                    other => {
                        return Err(ConfigError::new(
                            key,
                            format!("expected deterministic or exponential, got '{other}'"),
                        ))
                    }
                }
            }
            "service.mean_headway" => self.mean_headway = parse_f64(key, value)?,
            "controller.kind" => c.kind = value.parse().map_err(|e| ConfigError::new(key, e))?,
            "controller.preemption" => c.preemption = parse_bool(key, value)?,
            "fuzzy.fis" => {
                c.fis = match value {
                    "" | "builtin" => None,
                    path => Some(PathBuf::from(path)),
                }
            }
            "fuzzy.extension_threshold" => c.extension_threshold = parse_f64(key, value)?,
            "fuzzy.starvation_factor" => c.starvation_factor = parse_f64(key, value)?,
            "actuated.unit_extension" => c.unit_extension = parse_f64(key, value)?,
            "actuated.gap_time" => c.gap_time = parse_f64(key, value)?,
            "ev.schedule" => self.ev_schedule = parse_schedule(key, value)?,
            _ => return Err(ConfigError::new(key, "unknown key")),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let positive = |key: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(ConfigError::new(key, format!("must be > 0, got {v}")))
            }
        };
        let non_negative = |key: &str, v: f64| {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(ConfigError::new(key, format!("must be >= 0, got {v}")))
            }
        };
        positive("simulation.duration", self.duration)?;
        for m in Movement::ALL {
            positive(&format!("lambda.{m}"), self.lambda[m.index()])?;
        }
        positive("timing.saturation_headway", self.saturation_headway)?;
        positive("service.mean_headway", self.mean_headway)?;
        non_negative("timing.min_green", self.min_green)?;
        non_negative("timing.max_green", self.max_green)?;
        non_negative("timing.intergreen", self.intergreen)?;
        if self.min_green > self.max_green {
            return Err(ConfigError::new(
                "timing.min_green",
                format!("must not exceed timing.max_green ({})", self.max_green),
            ));
        }
        if self.min_green == 0.0 && self.intergreen == 0.0 {
            return Err(ConfigError::new(
                "timing.intergreen",
                "timing.min_green and timing.intergreen cannot both be 0",
            ));
        }
        for ev in &self.ev_schedule {
            non_negative("ev.schedule", ev.time)?;
        }
        let c = &self.controller;
        for (i, g) in c.fixed_green.iter().enumerate() {
            positive(&format!("fixed.green.P{}", i + 1), *g)?;
        }
        non_negative("fuzzy.extension_threshold", c.extension_threshold)?;
        if c.starvation_factor.is_nan() || c.starvation_factor <= 0.0 {
            return Err(ConfigError::new(
                "fuzzy.starvation_factor",
                format!("must be > 0, got {}", c.starvation_factor),
            ));
        }
        positive("actuated.unit_extension", c.unit_extension)?;
        non_negative("actuated.gap_time", c.gap_time)?;
        Ok(())
    }

    /// Every effective parameter in canonical order; parsing the result
    /// yields an identical config.
    pub fn to_text(&self) -> String {
        let c = &self.controller;
        let mut out = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        kv("simulation.duration", num(self.duration));
        kv("simulation.seed", self.seed.to_string());
        for m in Movement::ALL {
            kv(&format!("lambda.{m}"), num(self.lambda[m.index()]));
        }
        kv("timing.saturation_headway", num(self.saturation_headway));
        kv("timing.min_green", num(self.min_green));
        kv("timing.max_green", num(self.max_green));
        kv("timing.intergreen", num(self.intergreen));
        kv(
            "service.mode",
            match self.service_mode {
                ServiceMode::Deterministic => "deterministic",
                ServiceMode::Exponential => "exponential",
            }
            .into(),
        );
        kv("service.mean_headway", num(self.mean_headway));
        kv("controller.kind", c.kind.as_str().into());
        kv("controller.preemption", c.preemption.to_string());
        kv(
            "fuzzy.fis",
            c.fis
                .as_ref()
                .map_or_else(|| "builtin".into(), |p| p.display().to_string()),
        );
        kv("fuzzy.extension_threshold", num(c.extension_threshold));
        kv("fuzzy.starvation_factor", num(c.starvation_factor));
        for (i, g) in c.fixed_green.iter().enumerate() {
            kv(&format!("fixed.green.P{}", i + 1), num(*g));
        }
        kv("actuated.unit_extension", num(c.unit_extension));
        kv("actuated.gap_time", num(c.gap_time));
        let schedule: Vec<String> = self
            .ev_schedule
            .iter()
            .map(|e| format!("{}@{}", num(e.time), e.movement))
            .collect();
        kv("ev.schedule", schedule.join(" "));
        out
    }

    pub fn lambda_of(&self, movement: Movement) -> f64 {
        self.lambda[movement.index()]
    }
}
