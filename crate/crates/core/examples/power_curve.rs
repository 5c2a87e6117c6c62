//! Monte Carlo power curve of the MS test, written as CSV to stdout.

use sparse_toeplitz::harness::{run_scenario, ExperimentConfig, Scenario};
use sparse_toeplitz::TestKind;

fn main() -> sparse_toeplitz::Result<()> {
    let cfg = ExperimentConfig {
        n: 100,
        p: 50,
        replications: 500,
        grid_points: 8,
        kinds: vec![TestKind::Ms, TestKind::Hs],
        master_seed: Some(42),
        ..ExperimentConfig::new(Scenario::PowerCurve)
    };
    let table = run_scenario(&cfg)?;
    print!("{table}");
    Ok(())
}
