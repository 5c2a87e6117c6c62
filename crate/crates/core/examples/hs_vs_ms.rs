//! Power of MS, HS and the HS aggregate at a fixed signal level.

use sparse_toeplitz::harness::{run_scenario, ExperimentConfig, Scenario};
use sparse_toeplitz::procedures::AggregateCalibration;

fn main() -> sparse_toeplitz::Result<()> {
    let cfg = ExperimentConfig {
        n: 100,
        p: 100,
        horizon: Some(10),
        s_grid: Some(vec![1, 2, 4]),
        replications: 1000,
        aggregate_calibration: AggregateCalibration::Joint,
        master_seed: Some(8),
        ..ExperimentConfig::new(Scenario::MsVsHs)
    };
    print!("{}", run_scenario(&cfg)?);
    Ok(())
}
