//! Recovers the significant lags with the thresholded selector.

use sparse_toeplitz::concentration::selector_threshold;
use sparse_toeplitz::procedures::{hamming_loss, select_lags};
use sparse_toeplitz::sampler::sample_gaussian;
use sparse_toeplitz::{RngStream, SparseAlternative};

fn main() -> sparse_toeplitz::Result<()> {
    let (p, horizon, s) = (36, 6, 2);
    for n in [50, 200, 1000] {
        let tau = selector_threshold(n, p, horizon, s, 2.0)?;
        let sigma = (2.0 * tau).min(0.2);
        let alt = SparseAlternative::new(p, horizon, sigma, vec![2, 5], vec![1, -1])?;
        let samples = sample_gaussian(alt.spec(), n, RngStream::new(9, n as u64))?;
        let result = select_lags(&samples, horizon, tau, false)?;
        println!(
            "n = {n:4}: tau {tau:.4}, signal {sigma:.3}, true {:?}, selected {:?}, hamming loss {}",
            alt.eta(),
            result.eta_hat,
            hamming_loss(&result.eta_hat, &alt.eta())?
        );
    }
    Ok(())
}
