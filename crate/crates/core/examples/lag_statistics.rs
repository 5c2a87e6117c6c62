//! Lag functionals and the four test statistics on one sample.

use sparse_toeplitz::estimator::{lag_functionals, scan_support};
use sparse_toeplitz::sampler::sample_gaussian;
use sparse_toeplitz::{RngStream, TestKind, TestStatistic, ToeplitzSpec};

fn main() -> sparse_toeplitz::Result<()> {
    let (n, p, horizon) = (200, 60, 6);
    let spec = ToeplitzSpec::with_lags(p, 1.0, &[(2, 0.2), (5, -0.15)])?;
    let samples = sample_gaussian(&spec, n, RngStream::new(11, 0))?;

    let stats = lag_functionals(&samples, horizon)?;
    println!("xi_0 = {:.4}", stats.xi0);
    for (j, xi) in stats.xi.iter().enumerate() {
        println!("xi_{} = {xi:+.4}  (true {:+.2})", j + 1, spec.lag(j + 1));
    }

    for kind in TestKind::ALL {
        let stat = TestStatistic::new(kind, kind.is_scan().then_some(2))?;
        println!("{stat}: {:.4}", stat.evaluate(&stats)?);
    }
    println!("lags picked by the absolute scan: {:?}", scan_support(&stats, 2, true)?);
    Ok(())
}
