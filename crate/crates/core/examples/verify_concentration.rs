//! Empirical tail of a lag functional against its Bernstein bound.

use sparse_toeplitz::harness::{run_scenario, ExperimentConfig, Scenario};

fn main() -> sparse_toeplitz::Result<()> {
    let cfg = ExperimentConfig {
        replications: 5000,
        n_grid: Some(vec![10, 50]),
        p_grid: Some(vec![20]),
        u_grid: Some(vec![1.0, 2.0, 4.0]),
        master_seed: Some(7),
        ..ExperimentConfig::new(Scenario::VerifyConcentration)
    };
    print!("{}", run_scenario(&cfg)?);
    Ok(())
}
