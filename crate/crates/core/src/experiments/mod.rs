//! Batch experiments: MSE tables, trajectories and the invariant suite.
//!
//! Every path draws from its own RNG substream and results are reduced in
//! path order, so outputs depend only on the configuration and seed.

mod check;
mod config;
mod engine;
mod parallel;
mod tables;
mod trajectories;

pub use check::{
    ito_scaling, mean_and_se, moment_sums, run_check, CheckEntry, CheckOptions, CheckReport, MomentSums, SuiteKind,
    EXACT_TOLERANCE, MOMENT_TIMES, SUITE_STEPS,
};
pub use config::{ConfigFile, DelayScenario, ExperimentConfig, ModelId, ModelSet, HIGH_LEVEL};
pub use engine::{Engine, PathSeries};
pub use parallel::map_paths;
pub use tables::{delay_mse_table, mixture_mse_table, mse_table, rl_mse_table, table, MseTable, TableKind};
pub use trajectories::{simulate, simulation_engine, trajectories_csv, TrajectoryRecord};
