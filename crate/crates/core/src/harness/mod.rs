//! Experiment orchestration: repeated seeded runs, curvature sweeps, gap reports.

pub mod config;
pub mod experiment;
pub mod report;
pub mod stats;
pub mod sweep;

pub use config::{DataSource, ExperimentConfig, GmmSource, Method, SplitSizes};
pub use experiment::{
    aggregate, compute_values, run_experiment, run_experiment_with, DataScenario, ExperimentResult, FixedScenario,
    MethodSummary, RunInputs, RunRecord, Scenario,
};
pub use report::{gap_report, GapEntry, GapReport};
pub use stats::spearman;
pub use sweep::{curvature_sweep, MessageScope, SweepConfig, SweepEntry, SweepReport};
