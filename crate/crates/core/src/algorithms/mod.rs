//! NCRS, vote-NCRS and the two-point RSGF baseline, their step schedules,
//! and the closed-form vote parameter recipe.
//!
//! The optimizers take an oracle and the ambient dimension (implied by the
//! oracle); the intrinsic dimension only ever reaches them through a
//! [`StepSchedule`] built by the caller.

mod ncrs;
mod params;
mod rsgf;
mod schedule;
mod trajectory;

pub use ncrs::{ncrs_run, ncrs_vote_run};
pub use params::{vote_failure_factor, vote_params, VoteParams, VoteRecipeInput};
pub use rsgf::{rsgf_max_step, rsgf_run};
pub use schedule::{step_at, ScheduleKind, StepSchedule};
pub use trajectory::{
    log_stride, Instrument, NoInstrument, RunOutcome, StepRecord, Trajectory, TrajectoryRecorder, TrajectoryRow,
};
