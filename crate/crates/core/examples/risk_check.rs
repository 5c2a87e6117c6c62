//! Type I plus worst-case type II error at the separation radius.

use sparse_toeplitz::harness::{run_scenario, ExperimentConfig, Scenario};
use sparse_toeplitz::{TestKind, ThresholdSource};

fn main() -> sparse_toeplitz::Result<()> {
    let cfg = ExperimentConfig {
        n: 100,
        p: 100,
        horizon: Some(10),
        sparsity: Some(2),
        kinds: TestKind::ALL.to_vec(),
        replications: 1000,
        threshold_source: ThresholdSource::Theoretical,
        master_seed: Some(9),
        ..ExperimentConfig::new(Scenario::RiskCheck)
    };
    print!("{}", run_scenario(&cfg)?);
    Ok(())
}
