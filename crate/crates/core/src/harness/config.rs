//! Run configuration: a TOML document with `[problem]`, `[oracle]`,
//! `[algorithm]` and `[target]` tables. Every key is optional and unknown keys
//! are rejected. Dotted `key=value` overrides are applied to the parsed
//! document before it is interpreted.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::algorithms::{rsgf_max_step, ScheduleKind, StepSchedule};
use crate::error::{Error, Result};
use crate::objectives::{default_init_radius, InnerFunction};
use crate::oracles::{ConfidenceKind, LinkFunction, LinkKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InnerKind {
    PureQuadratic,
    QuadraticCosine,
    BoundedWell,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProblemConfig {
    /// Ambient dimension.
    pub d: usize,
    /// Intrinsic dimension.
    pub k: usize,
    pub inner: InnerKind,
    pub amplitude: f64,
    pub frequency: f64,
    /// Nuisance leakage bound; 0 disables the nuisance term.
    pub tau: f64,
    /// Nuisance subspace dimension (needed when `tau > 0`).
    pub m: usize,
    /// Start radius inside the active subspace; defaults to `3√k`.
    pub init_radius: Option<f64>,
}

impl Default for ProblemConfig {
    fn default() -> Self {
        Self {
            d: 100,
            k: 10,
            inner: InnerKind::QuadraticCosine,
            amplitude: 1.0,
            frequency: 3.0,
            tau: 0.0,
            m: 0,
            init_radius: None,
        }
    }
}

impl ProblemConfig {
    pub fn inner_function(&self) -> InnerFunction {
        match self.inner {
            InnerKind::PureQuadratic => InnerFunction::PureQuadratic,
            InnerKind::QuadraticCosine => {
                InnerFunction::QuadraticCosine { amplitude: self.amplitude, frequency: self.frequency }
            }
            InnerKind::BoundedWell => InnerFunction::BoundedWell,
        }
    }

    pub fn init_radius(&self) -> f64 {
        self.init_radius.unwrap_or_else(|| default_init_radius(self.k))
    }

    /// Certified `L_f` of the objective this config builds.
    pub fn smoothness(&self) -> f64 {
        self.inner_function().smoothness() + if self.has_nuisance() { self.tau } else { 0.0 }
    }

    pub fn has_nuisance(&self) -> bool {
        self.tau > 0.0 && self.m > 0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleKind {
    /// Uniform-margin `{-1, +1}` comparisons.
    Sign,
    DeterministicLink,
    EngageAbstain,
    NoisyEngage,
    /// Exact function values (RSGF only).
    Value,
}

impl OracleKind {
    pub fn confidence_kind(self) -> Option<ConfidenceKind> {
        match self {
            OracleKind::DeterministicLink => Some(ConfidenceKind::DeterministicLink),
            OracleKind::EngageAbstain => Some(ConfidenceKind::EngageAbstain),
            OracleKind::NoisyEngage => Some(ConfidenceKind::NoisyEngage),
            OracleKind::Sign | OracleKind::Value => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleConfig {
    pub kind: OracleKind,
    /// Margin `p` of the sign oracle.
    pub p: f64,
    pub link: LinkKind,
    /// `τ` (logistic, arctan) or `σ₀` (probit).
    pub scale: f64,
    /// Comparisons per iteration for the vote variant.
    pub votes: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self { kind: OracleKind::Sign, p: 0.5, link: LinkKind::Logistic, scale: 1.0, votes: 1 }
    }
}

impl OracleConfig {
    pub fn link_function(&self) -> Result<LinkFunction> {
        LinkFunction::new(self.link, self.scale)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlgorithmKind {
    Ncrs,
    NcrsVote,
    Rsgf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleName {
    Constant,
    TheoryConstant,
    CosineDecay,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AlgorithmConfig {
    pub kind: AlgorithmKind,
    /// Iterations `T` (also the schedule horizon).
    pub iterations: usize,
    pub schedule: ScheduleName,
    pub alpha0: f64,
    pub max_rate: f64,
    pub min_rate: f64,
    pub decay_steps: usize,
    /// RSGF step; defaults to `1 / (4 L_f (k + 2))`.
    pub alpha: Option<f64>,
    /// RSGF smoothing radius.
    pub mu: f64,
}

impl Default for AlgorithmConfig {
    fn default() -> Self {
        Self {
            kind: AlgorithmKind::Ncrs,
            iterations: 10_000,
            schedule: ScheduleName::TheoryConstant,
            alpha0: 1.0,
            max_rate: 4e-2,
            min_rate: 4e-3,
            decay_steps: 480,
            alpha: None,
            mu: 1e-4,
        }
    }
}

/// Stationarity target for `iterations_to_target`. At most one field may be
/// set; `relative` is a fraction of `‖∇f(θ¹)‖`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TargetConfig {
    pub epsilon: Option<f64>,
    pub relative: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemConfig,
    pub oracle: OracleConfig,
    pub algorithm: AlgorithmConfig,
    pub target: TargetConfig,
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        Self::from_toml_with_overrides(text, &[])
    }

    pub fn from_toml_with_overrides(text: &str, overrides: &[String]) -> Result<Self> {
        let mut table = parse_table(text)?;
        apply_overrides(&mut table, overrides)?;
        Self::from_table(table)
    }

    pub fn load(path: &Path, overrides: &[String]) -> Result<Self> {
        let text = read_config(path)?;
        Self::from_toml_with_overrides(&text, overrides).map_err(|e| match e {
            Error::UnknownKey(_) => e,
            other => Error::config(format!("{}: {other}", path.display())),
        })
    }

    pub(crate) fn from_table(table: toml::Table) -> Result<Self> {
        let config: RunConfig = toml::Value::Table(table).try_into().map_err(de_error)?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Serialize(e.to_string()))
    }

    /// Checks every cross-field constraint; no run starts on an invalid config.
    pub fn validate(&self) -> Result<()> {
        let p = &self.problem;
        if p.k == 0 || p.k > p.d {
            return Err(Error::config(format!("need 1 <= k <= d, got k={} d={}", p.k, p.d)));
        }
        p.inner_function().validate()?;
        if !(p.tau >= 0.0 && p.tau.is_finite()) {
            return Err(Error::config(format!("tau must be finite and >= 0, got {}", p.tau)));
        }
        if p.m > p.d - p.k {
            return Err(Error::config(format!("need m <= d - k, got m={} d-k={}", p.m, p.d - p.k)));
        }
        if p.tau > 0.0 && p.m == 0 {
            return Err(Error::config("tau > 0 needs a nuisance dimension m >= 1"));
        }
        if let Some(r) = p.init_radius {
            if !(r >= 0.0 && r.is_finite()) {
                return Err(Error::config(format!("init_radius must be finite and >= 0, got {r}")));
            }
        }

        let o = &self.oracle;
        let a = &self.algorithm;
        match (a.kind, o.kind) {
            (AlgorithmKind::Ncrs, OracleKind::Sign) => {
                if !(o.p > 0.0 && o.p <= 0.5) {
                    return Err(Error::config(format!("oracle.p must lie in (0, 0.5], got {}", o.p)));
                }
            }
            (AlgorithmKind::NcrsVote, kind) if kind.confidence_kind().is_some() => {
                o.link_function()?;
                if o.votes == 0 {
                    return Err(Error::config("oracle.votes must be >= 1"));
                }
            }
            (AlgorithmKind::Rsgf, OracleKind::Value) => {
                if !(a.mu > 0.0 && a.mu.is_finite()) {
                    return Err(Error::config(format!("algorithm.mu must be > 0, got {}", a.mu)));
                }
                if let Some(alpha) = a.alpha {
                    if !(alpha > 0.0 && alpha.is_finite()) {
                        return Err(Error::config(format!("algorithm.alpha must be > 0, got {alpha}")));
                    }
                }
            }
            (alg, kind) => {
                return Err(Error::config(format!(
                    "algorithm {alg:?} cannot use a {kind:?} oracle (ncrs: sign; ncrs_vote: deterministic_link, \
                     engage_abstain or noisy_engage; rsgf: value)"
                )))
            }
        }
        if a.kind != AlgorithmKind::Rsgf {
            self.schedule()?;
        } else if a.iterations == 0 {
            return Err(Error::config("algorithm.iterations must be >= 1"));
        }

        let t = &self.target;
        match (t.epsilon, t.relative) {
            (Some(_), Some(_)) => return Err(Error::config("set target.epsilon or target.relative, not both")),
            (Some(e), None) | (None, Some(e)) if !(e > 0.0 && e.is_finite()) => {
                return Err(Error::config(format!("target must be finite and > 0, got {e}")))
            }
            _ => {}
        }
        Ok(())
    }

    pub fn schedule(&self) -> Result<StepSchedule> {
        let a = &self.algorithm;
        let kind = match a.schedule {
            ScheduleName::Constant => ScheduleKind::Constant { alpha0: a.alpha0 },
            ScheduleName::TheoryConstant => ScheduleKind::TheoryConstant { alpha0: a.alpha0, intrinsic_k: self.problem.k },
            ScheduleName::CosineDecay => ScheduleKind::CosineDecay {
                max_rate: a.max_rate,
                min_rate: a.min_rate,
                decay_steps: a.decay_steps,
            },
        };
        StepSchedule::new(kind, a.iterations)
    }

    /// RSGF step after applying the default.
    pub fn rsgf_alpha(&self) -> f64 {
        self.algorithm
            .alpha
            .unwrap_or_else(|| rsgf_max_step(self.problem.smoothness(), self.problem.k))
    }
}

/// Reads a config file; an unreadable file is a configuration error.
pub(crate) fn read_config(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::config(format!("cannot read {}: {e}", path.display())))
}

pub(crate) fn de_error(e: toml::de::Error) -> Error {
    let msg = e.message().to_string();
    if let Some(rest) = msg.strip_prefix("unknown field `") {
        if let Some(key) = rest.split('`').next() {
            return Error::UnknownKey(key.to_string());
        }
    }
    Error::config(msg.trim().to_string())
}

pub(crate) fn parse_table(text: &str) -> Result<toml::Table> {
    text.parse::<toml::Table>().map_err(|e| Error::config(e.to_string().trim().to_string()))
}

/// Applies `a.b.c=value` overrides in order; later ones win. The value is
/// read as a TOML literal when it parses as one, else as a bare string.
pub fn apply_overrides(table: &mut toml::Table, overrides: &[String]) -> Result<()> {
    for item in overrides {
        let (key, raw) = item
            .split_once('=')
            .ok_or_else(|| Error::config(format!("override `{item}` is not KEY=VALUE")))?;
        let path: Vec<&str> = key.trim().split('.').collect();
        if path.iter().any(|p| p.is_empty()) {
            return Err(Error::config(format!("override key `{key}` has an empty segment")));
        }
        let value = parse_literal(raw.trim());
        let (last, parents) = path.split_last().expect("split yields one segment");
        let mut cursor = &mut *table;
        for seg in parents {
            let entry = cursor
                .entry(seg.to_string())
                .or_insert_with(|| toml::Value::Table(toml::Table::new()));
            cursor = entry
                .as_table_mut()
                .ok_or_else(|| Error::config(format!("override `{key}`: `{seg}` is not a table")))?;
        }
        cursor.insert(last.to_string(), value);
    }
    Ok(())
}

fn parse_literal(raw: &str) -> toml::Value {
    format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}
