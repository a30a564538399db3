use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScheduleKind {
    Constant { alpha0: f64 },
    /// `α₀ / √(kT)` for every `t`.
    TheoryConstant { alpha0: f64, intrinsic_k: usize },
    /// Half-cosine from `max_rate` down to `min_rate` over `decay_steps`,
    /// then flat at `min_rate`.
    CosineDecay { max_rate: f64, min_rate: f64, decay_steps: usize },
}

/// Step sizes `α_t` for `t = 1..=horizon`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepSchedule {
    kind: ScheduleKind,
    horizon: usize,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::config(format!("{name} must be finite and > 0, got {v}")))
    }
}

impl StepSchedule {
    pub fn new(kind: ScheduleKind, horizon: usize) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::config("schedule horizon must be >= 1"));
        }
        match kind {
            ScheduleKind::Constant { alpha0 } => positive("alpha0", alpha0)?,
            ScheduleKind::TheoryConstant { alpha0, intrinsic_k } => {
                positive("alpha0", alpha0)?;
                if intrinsic_k == 0 {
                    return Err(Error::config("theory_constant schedule needs k >= 1"));
                }
            }
            ScheduleKind::CosineDecay { max_rate, min_rate, decay_steps } => {
                positive("max_rate", max_rate)?;
                positive("min_rate", min_rate)?;
                if min_rate > max_rate {
                    return Err(Error::config(format!(
                        "cosine min_rate {min_rate} exceeds max_rate {max_rate}"
                    )));
                }
                if decay_steps == 0 {
                    return Err(Error::config("cosine decay_steps must be >= 1"));
                }
            }
        }
        Ok(Self { kind, horizon })
    }

    pub fn constant(alpha0: f64, horizon: usize) -> Result<Self> {
        Self::new(ScheduleKind::Constant { alpha0 }, horizon)
    }

    pub fn theory_constant(alpha0: f64, intrinsic_k: usize, horizon: usize) -> Result<Self> {
        Self::new(ScheduleKind::TheoryConstant { alpha0, intrinsic_k }, horizon)
    }

    pub fn cosine_decay(max_rate: f64, min_rate: f64, decay_steps: usize, horizon: usize) -> Result<Self> {
        Self::new(ScheduleKind::CosineDecay { max_rate, min_rate, decay_steps }, horizon)
    }

    pub fn kind(&self) -> ScheduleKind {
        self.kind
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn step_at(&self, t: usize) -> Result<f64> {
        if t == 0 || t > self.horizon {
            return Err(Error::domain(format!("step index t={t} outside 1..={}", self.horizon)));
        }
        Ok(self.rate(t))
    }

    pub(crate) fn rate(&self, t: usize) -> f64 {
        match self.kind {
            ScheduleKind::Constant { alpha0 } => alpha0,
            ScheduleKind::TheoryConstant { alpha0, intrinsic_k } => {
                alpha0 / ((intrinsic_k as f64) * (self.horizon as f64)).sqrt()
            }
            ScheduleKind::CosineDecay { max_rate, min_rate, decay_steps } => {
                let progress = (t.min(decay_steps) as f64) / decay_steps as f64;
                min_rate + 0.5 * (max_rate - min_rate) * (1.0 + (PI * progress).cos())
            }
        }
    }
}

/// Free-function form of [`StepSchedule::step_at`].
pub fn step_at(schedule: &StepSchedule, t: usize) -> Result<f64> {
    schedule.step_at(t)
}
