//! Experiment orchestration: configuration, Monte Carlo scenarios, result
//! tables, sample I/O and the command-line interface.

pub mod cli;
pub mod config;
pub mod data;
pub mod scenarios;
pub mod table;

pub use config::{ExperimentConfig, Scenario};
pub use scenarios::{
    run_ma_experiment, run_ms_vs_hs, run_power_curve, run_risk_check, run_scenario,
    run_selection_risk, run_type1, run_verify_concentration, CalibrationCache,
};
pub use table::ResultTable;
