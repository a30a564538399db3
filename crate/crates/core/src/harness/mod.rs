//! Declarative experiment runner: configs, single runs, seeded sweeps,
//! aggregation and persistence. Everything here works in `f64`.

mod config;
mod metrics;
mod output;
mod run;
mod sweep;

pub use config::{
    apply_overrides, AlgorithmConfig, AlgorithmKind, InnerKind, OracleConfig, OracleKind, ProblemConfig, RunConfig,
    ScheduleName, TargetConfig,
};
pub use metrics::{first_below, fit_scaling, iterations_to_target, mean_stderr, MeanStderr, ScalingCell, ScalingFit};
pub use output::{
    csv_view, parse_trajectory_csv, to_json, trajectory_csv, write_json, write_trajectory_csv, CsvRow, CSV_HEADER,
};
pub use run::{
    build_objective, expected_queries, run_one, RunSummary, ROLE_DIRECTIONS, ROLE_INIT, ROLE_NUISANCE, ROLE_ORACLE,
    ROLE_SUBSPACE,
};
pub use sweep::{cell_id, run_sweep, Aggregate, CellAggregate, RunFailure, RunRecord, SweepAxes, SweepPlan, SweepResult};
