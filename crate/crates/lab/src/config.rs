//! Flat `key = value` experiment configuration.
//!
//! One key per line, `#` starts a comment, blank lines are ignored. Every key
//! except `experiment` and `id` has a default; `beta`, `t_start` and `output`
//! are optional.

use std::fmt::{self, Write as _};
use std::path::Path;
use std::str::FromStr;

use dampwave_core::{DampingProfile, ProfileKind};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: duplicate key `{key}`")]
    Duplicate { line: usize, key: String },
    #[error("missing required key `{0}`")]
    Missing(&'static str),
    #[error("key `{key}`: cannot parse `{value}`")]
    Value { key: &'static str, value: String },
    #[error("key `{key}`: {reason}")]
    Invalid { key: &'static str, reason: String },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExperimentKind {
    HeatDecay,
    HeatOptimality,
    WaveEnergy,
    DiffusionPhenomenon,
    PropertySuite,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 5] = [
        ExperimentKind::HeatDecay,
        ExperimentKind::HeatOptimality,
        ExperimentKind::WaveEnergy,
        ExperimentKind::DiffusionPhenomenon,
        ExperimentKind::PropertySuite,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::HeatDecay => "heat_decay",
            ExperimentKind::HeatOptimality => "heat_optimality",
            ExperimentKind::WaveEnergy => "wave_energy",
            ExperimentKind::DiffusionPhenomenon => "diffusion_phenomenon",
            ExperimentKind::PropertySuite => "property_suite",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = ();
    fn from_str(s: &str) -> Result<Self, ()> {
        Self::ALL.into_iter().find(|k| k.name() == s).ok_or(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileChoice {
    PurePower,
    PerturbedPower,
}

impl ProfileChoice {
    fn name(self) -> &'static str {
        match self {
            ProfileChoice::PurePower => "pure_power",
            ProfileChoice::PerturbedPower => "perturbed_power",
        }
    }
}

impl FromStr for ProfileChoice {
    type Err = ();
    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "pure_power" => Ok(ProfileChoice::PurePower),
            "perturbed_power" => Ok(ProfileChoice::PerturbedPower),
            _ => Err(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub id: String,
    pub dim: usize,
    pub alpha: f64,
    pub a0: f64,
    pub profile: ProfileChoice,
    pub delta: f64,
    pub r0: f64,
    pub support_radius: f64,
    pub amplitude: f64,
    pub velocity: f64,
    pub t_final: f64,
    /// Wave step as a fraction of `dr`.
    pub cfl: f64,
    pub dr: f64,
    pub theta: f64,
    /// Heat steps are capped at `dt_cap · (1 + t)`.
    pub dt_cap: f64,
    pub beta: Option<f64>,
    pub eps_shift: f64,
    pub samples: usize,
    /// First sample time; defaults to `T/10`.
    pub t_start: Option<f64>,
    pub seed: u64,
    /// CSV file stem; defaults to `id`.
    pub output: Option<String>,
}

#[derive(Clone, Copy)]
enum Kind {
    Word,
    Float,
    Int,
}

struct Key {
    name: &'static str,
    kind: Kind,
    /// `None` marks a key that is required or optional without default.
    default: Option<&'static str>,
    required: bool,
}

const fn key(name: &'static str, kind: Kind, default: Option<&'static str>, required: bool) -> Key {
    Key { name, kind, default, required }
}

/// Canonical key order.
const KEYS: &[Key] = &[
    key("experiment", Kind::Word, None, true),
    key("id", Kind::Word, None, true),
    key("N", Kind::Int, Some("3"), false),
    key("alpha", Kind::Float, Some("0.0"), false),
    key("a0", Kind::Float, Some("1.0"), false),
    key("profile", Kind::Word, Some("pure_power"), false),
    key("delta", Kind::Float, Some("0.0"), false),
    key("r0", Kind::Float, Some("1.0"), false),
    key("R0", Kind::Float, Some("3.0"), false),
    key("amplitude", Kind::Float, Some("1.0"), false),
    key("velocity", Kind::Float, Some("0.0"), false),
    key("T", Kind::Float, Some("2000.0"), false),
    key("cfl", Kind::Float, Some("0.5"), false),
    key("dr", Kind::Float, Some("0.05"), false),
    key("theta", Kind::Float, Some("0.5"), false),
    key("dt_cap", Kind::Float, Some("0.05"), false),
    key("beta", Kind::Float, None, false),
    key("eps_shift", Kind::Float, Some("0.05"), false),
    key("samples", Kind::Int, Some("40"), false),
    key("t_start", Kind::Float, None, false),
    key("seed", Kind::Int, Some("42"), false),
    key("output", Kind::Word, None, false),
];

/// Split into `(line number, key, value)` triples, rejecting unknown and
/// duplicate keys.
fn entries(text: &str) -> Result<Vec<(usize, &'static Key, &str)>, ConfigError> {
    let mut out: Vec<(usize, &'static Key, &str)> = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (k, v) = content.split_once('=').ok_or(ConfigError::Syntax { line })?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() || v.is_empty() {
            return Err(ConfigError::Syntax { line });
        }
        let spec = KEYS.iter().find(|s| s.name == k).ok_or_else(|| ConfigError::UnknownKey { line, key: k.into() })?;
        if out.iter().any(|(_, s, _)| s.name == k) {
            return Err(ConfigError::Duplicate { line, key: k.into() });
        }
        out.push((line, spec, v));
    }
    Ok(out)
}

fn canonical(spec: &Key, value: &str) -> Result<String, ConfigError> {
    let bad = || ConfigError::Value { key: spec.name, value: value.into() };
    Ok(match spec.kind {
        Kind::Word => {
            if value.chars().any(char::is_whitespace) {
                return Err(bad());
            }
            value.to_string()
        }
        Kind::Float => format!("{:?}", value.parse::<f64>().map_err(|_| bad())?),
        Kind::Int => value.parse::<u64>().map_err(|_| bad())?.to_string(),
    })
}

/// Comments and blank lines dropped, one `key = value` per line in canonical
/// order, numbers in shortest round-trip form, defaults filled in.
pub fn normalize(text: &str) -> Result<String, ConfigError> {
    let given = entries(text)?;
    let mut out = String::new();
    for spec in KEYS {
        let value = match given.iter().find(|(_, s, _)| s.name == spec.name) {
            Some((_, _, v)) => Some(canonical(spec, v)?),
            None if spec.required => return Err(ConfigError::Missing(spec.name)),
            None => spec.default.map(str::to_string),
        };
        if let Some(v) = value {
            writeln!(out, "{} = {}", spec.name, v).expect("writing to a String");
        }
    }
    Ok(out)
}

fn invalid(key: &'static str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { key, reason: reason.into() }
}

fn is_identifier(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-' || c == '.')
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let normalized = normalize(text)?;
        let mut map = std::collections::HashMap::new();
        for line in normalized.lines() {
            let (k, v) = line.split_once(" = ").expect("normalized line");
            map.insert(k, v);
        }
        let word = |k: &'static str| map.get(k).copied();
        let float = |k: &'static str| map.get(k).map(|v| v.parse::<f64>().expect("normalized float"));
        let int = |k: &'static str| map.get(k).map(|v| v.parse::<u64>().expect("normalized int"));
        let experiment = word("experiment")
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| ConfigError::Value { key: "experiment", value: word("experiment").unwrap_or("").into() })?;
        let profile = word("profile")
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| ConfigError::Value { key: "profile", value: word("profile").unwrap_or("").into() })?;
        let dim = int("N").expect("default");
        let config = ExperimentConfig {
            experiment,
            id: word("id").expect("required").to_string(),
            dim: usize::try_from(dim).map_err(|_| invalid("N", "too large"))?,
            alpha: float("alpha").expect("default"),
            a0: float("a0").expect("default"),
            profile,
            delta: float("delta").expect("default"),
            r0: float("r0").expect("default"),
            support_radius: float("R0").expect("default"),
            amplitude: float("amplitude").expect("default"),
            velocity: float("velocity").expect("default"),
            t_final: float("T").expect("default"),
            cfl: float("cfl").expect("default"),
            dr: float("dr").expect("default"),
            theta: float("theta").expect("default"),
            dt_cap: float("dt_cap").expect("default"),
            beta: float("beta"),
            eps_shift: float("eps_shift").expect("default"),
            samples: int("samples").expect("default") as usize,
            t_start: float("t_start"),
            seed: int("seed").expect("default"),
            output: word("output").map(str::to_string),
        };
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Io { path: path.display().to_string(), message: e.to_string() })?;
        Self::parse(&text)
    }

    /// Every key, canonical order and number format.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        let mut put = |k: &str, v: String| writeln!(out, "{k} = {v}").expect("writing to a String");
        put("experiment", self.experiment.name().into());
        put("id", self.id.clone());
        put("N", self.dim.to_string());
        put("alpha", format!("{:?}", self.alpha));
        put("a0", format!("{:?}", self.a0));
        put("profile", self.profile.name().into());
        put("delta", format!("{:?}", self.delta));
        put("r0", format!("{:?}", self.r0));
        put("R0", format!("{:?}", self.support_radius));
        put("amplitude", format!("{:?}", self.amplitude));
        put("velocity", format!("{:?}", self.velocity));
        put("T", format!("{:?}", self.t_final));
        put("cfl", format!("{:?}", self.cfl));
        put("dr", format!("{:?}", self.dr));
        put("theta", format!("{:?}", self.theta));
        put("dt_cap", format!("{:?}", self.dt_cap));
        if let Some(b) = self.beta {
            put("beta", format!("{b:?}"));
        }
        put("eps_shift", format!("{:?}", self.eps_shift));
        put("samples", self.samples.to_string());
        if let Some(t) = self.t_start {
            put("t_start", format!("{t:?}"));
        }
        put("seed", self.seed.to_string());
        if let Some(o) = &self.output {
            put("output", o.clone());
        }
        out
    }

    pub fn damping_profile(&self) -> DampingProfile {
        let kind = match self.profile {
            ProfileChoice::PurePower => ProfileKind::PurePower,
            ProfileChoice::PerturbedPower => ProfileKind::PerturbedPower { delta: self.delta },
        };
        DampingProfile::new(kind, self.a0, self.alpha).expect("validated profile")
    }

    pub fn output_stem(&self) -> &str {
        self.output.as_deref().unwrap_or(&self.id)
    }

    pub fn first_sample(&self) -> f64 {
        self.t_start.unwrap_or(0.1 * self.t_final)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let finite = [
            ("alpha", self.alpha),
            ("a0", self.a0),
            ("delta", self.delta),
            ("r0", self.r0),
            ("R0", self.support_radius),
            ("amplitude", self.amplitude),
            ("velocity", self.velocity),
            ("T", self.t_final),
            ("cfl", self.cfl),
            ("dr", self.dr),
            ("dt_cap", self.dt_cap),
            ("eps_shift", self.eps_shift),
        ];
        for (k, v) in finite {
            if !v.is_finite() {
                return Err(invalid(KEYS.iter().find(|s| s.name == k).expect("known key").name, "must be finite"));
            }
        }
        if !is_identifier(&self.id) {
            return Err(invalid("id", "use letters, digits, '_', '-' or '.'"));
        }
        if let Some(o) = &self.output {
            if !is_identifier(o) {
                return Err(invalid("output", "use letters, digits, '_', '-' or '.'"));
            }
        }
        if self.dim < 2 {
            return Err(invalid("N", "dimension must be at least 2"));
        }
        if !(0.0..1.0).contains(&self.alpha) {
            return Err(invalid("alpha", "must lie in [0, 1)"));
        }
        if self.a0 <= 0.0 {
            return Err(invalid("a0", "must be positive"));
        }
        match self.profile {
            ProfileChoice::PurePower if self.delta != 0.0 => {
                return Err(invalid("delta", "only meaningful for profile = perturbed_power"))
            }
            ProfileChoice::PerturbedPower if self.delta < 0.0 => return Err(invalid("delta", "must be nonnegative")),
            _ => {}
        }
        if self.r0 <= 0.0 {
            return Err(invalid("r0", "must be positive"));
        }
        if self.support_radius <= self.r0 {
            return Err(invalid("R0", "must exceed r0"));
        }
        if self.t_final < 10.0 {
            return Err(invalid("T", "fits need at least one decade; use T >= 10"));
        }
        if !(self.cfl > 0.0 && self.cfl <= dampwave_core::wave::CFL_LIMIT) {
            return Err(invalid("cfl", "must lie in (0, 0.5]"));
        }
        if self.dr <= 0.0 || self.dr >= self.support_radius - self.r0 {
            return Err(invalid("dr", "must be positive and resolve [r0, R0]"));
        }
        if self.dr > 2.0 * self.r0 / (self.dim as f64 - 1.0) {
            return Err(invalid("dr", "heat scheme needs dr <= 2 r0 / (N - 1)"));
        }
        if self.theta != 0.5 && self.theta != 1.0 {
            return Err(invalid("theta", "must be 0.5 or 1"));
        }
        if self.dt_cap <= 0.0 {
            return Err(invalid("dt_cap", "must be positive"));
        }
        if self.eps_shift <= 0.0 {
            return Err(invalid("eps_shift", "must be positive"));
        }
        if let Some(b) = self.beta {
            let h_a = (2.0 - self.alpha) / (self.dim as f64 - self.alpha);
            let limit = 1.0 / (h_a + 2.0 * self.eps_shift);
            if !(b > 0.0 && b < limit) {
                return Err(invalid("beta", format!("must lie in (0, {limit})")));
            }
        }
        if self.samples < dampwave_core::decay::MIN_SAMPLES {
            return Err(invalid("samples", "need at least 8 samples"));
        }
        if let Some(t) = self.t_start {
            if !(t > 0.0 && t <= 0.1 * self.t_final) {
                return Err(invalid("t_start", "must lie in (0, T/10] so the fit window is sampled"));
            }
        }
        Ok(())
    }
}
