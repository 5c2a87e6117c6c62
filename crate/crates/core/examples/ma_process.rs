//! Moving-average covariance model and its sampler.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sparse_toeplitz::estimator::lag_functionals;
use sparse_toeplitz::sampler::{ma_autocovariance, ma_covariance_spec, sample_ma_process};
use sparse_toeplitz::MaSpec;

fn main() -> sparse_toeplitz::Result<()> {
    let ma = MaSpec::new(0.6, 16)?;
    println!("order {}, coefficients {:?}", ma.order(), ma.coefficients());
    let spec = ma_covariance_spec(&ma);
    for h in 0..=6 {
        println!("lag {h}: raw {:.4} normalized {:.4}", ma_autocovariance(&ma, h), spec.lag(h));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let samples = sample_ma_process(&ma, 5000, &mut rng);
    let stats = lag_functionals(&samples, 6)?;
    let est: Vec<String> = stats.xi.iter().map(|x| format!("{x:.3}")).collect();
    println!("empirical xi_1..xi_6: [{}]", est.join(", "));
    Ok(())
}
