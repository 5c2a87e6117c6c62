//! Reproducible Gaussian sampling and the moving-average example process.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Result};
use crate::estimator::SampleSet;
use crate::linalg::BandedCholesky;
use crate::model::ToeplitzSpec;

/// A `(master_seed, stream_id)` pair naming an independent random stream.
///
/// Each pair maps to its own ChaCha8 stream, so draws are identical on every
/// platform and independent of how work is scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub master_seed: u64,
    pub stream_id: u64,
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl RngStream {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        Self { master_seed, stream_id }
    }

    /// Stream keyed by a task tag and a tuple of indices, e.g. (grid point,
    /// replication).
    pub fn keyed(master_seed: u64, tag: u64, indices: &[u64]) -> Self {
        let id = indices.iter().fold(splitmix(tag), |h, &i| splitmix(h ^ splitmix(i)));
        Self { master_seed, stream_id: id }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

/// Draws `𝒩_p(0, Σ)` vectors as `L z` with `L` the (banded) Cholesky factor.
#[derive(Debug, Clone)]
pub struct GaussianSampler {
    p: usize,
    factor: Option<BandedCholesky>,
    scale: f64,
}

impl GaussianSampler {
    /// Factors `spec` once; fails if it is not positive definite.
    pub fn new(spec: &ToeplitzSpec) -> Result<Self> {
        let factor = if spec.bandwidth() == 0 { None } else { Some(spec.cholesky()?) };
        Ok(Self { p: spec.dim(), factor, scale: spec.sigma0().sqrt() })
    }

    pub fn dim(&self) -> usize {
        self.p
    }

    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> SampleSet {
        let p = self.p;
        let mut data = vec![0.0; n * p];
        match &self.factor {
            None => {
                for x in data.iter_mut() {
                    *x = self.scale * rng.sample::<f64, _>(StandardNormal);
                }
            }
            Some(l) => {
                let mut z = vec![0.0; p];
                for row in data.chunks_exact_mut(p) {
                    for v in z.iter_mut() {
                        *v = rng.sample(StandardNormal);
                    }
                    l.mul_into(&z, row);
                }
            }
        }
        SampleSet::new(p, data).expect("sampler produces a well-formed sample set")
    }

    pub fn sample_stream(&self, n: usize, stream: RngStream) -> SampleSet {
        self.sample(n, &mut stream.rng())
    }
}

/// `n` independent draws from `𝒩_p(0, Σ)`.
pub fn sample_gaussian(spec: &ToeplitzSpec, n: usize, stream: RngStream) -> Result<SampleSet> {
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    Ok(GaussianSampler::new(spec)?.sample_stream(n, stream))
}

/// The process `X_t = Σ_{i=0}^{q} φ^i ε_{t−2i}` with `q = ⌊p/4⌋` and unit
/// white noise `ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaSpec {
    phi: f64,
    p: usize,
}

impl MaSpec {
    pub fn new(phi: f64, p: usize) -> Result<Self> {
        if !(phi.abs() < 1.0) {
            return Err(invalid(format!("MA coefficient must satisfy |phi| < 1, got {phi}")));
        }
        if p == 0 {
            return Err(invalid("dimension must be at least 1"));
        }
        Ok(Self { phi, p })
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn dim(&self) -> usize {
        self.p
    }

    /// Order `q = ⌊p/4⌋`.
    pub fn order(&self) -> usize {
        self.p / 4
    }

    /// Coefficients `φ^0, …, φ^q` applied at noise offsets `0, 2, …, 2q`.
    pub fn coefficients(&self) -> Vec<f64> {
        (0..=self.order()).map(|i| self.phi.powi(i as i32)).collect()
    }
}

/// `Cov(X_{t+h}, X_t)`: `φ^{h/2}(1 − φ^{2(q − h/2 + 1)})/(1 − φ²)` for even
/// `h ≤ 2q`, zero otherwise.
pub fn ma_autocovariance(spec: &MaSpec, h: usize) -> f64 {
    let q = spec.order();
    if h % 2 == 1 || h / 2 > q {
        return 0.0;
    }
    let m = h / 2;
    let phi = spec.phi;
    let phi2 = phi * phi;
    phi.powi(m as i32) * (1.0 - phi2.powi((q - m + 1) as i32)) / (1.0 - phi2)
}

/// Autocovariances `γ(0), …, γ(p−1)` as a Toeplitz spec (not normalized).
pub fn ma_raw_spec(spec: &MaSpec) -> ToeplitzSpec {
    let diagonals = (0..spec.p).map(|h| ma_autocovariance(spec, h)).collect();
    ToeplitzSpec::new(diagonals).expect("MA autocovariances form a valid Toeplitz spec")
}

/// Correlation form `γ(h)/γ(0)` of the MA covariance.
pub fn ma_covariance_spec(spec: &MaSpec) -> ToeplitzSpec {
    ma_raw_spec(spec).normalized()
}

/// `n` independent length-`p` windows of the MA process, each from fresh
/// white noise of length `p + 2q`, scaled by `1/√γ(0)` to unit variance.
pub fn sample_ma_process<R: Rng + ?Sized>(spec: &MaSpec, n: usize, rng: &mut R) -> SampleSet {
    let p = spec.p;
    let q = spec.order();
    let coef = spec.coefficients();
    let norm = 1.0 / ma_autocovariance(spec, 0).sqrt();
    let mut noise = vec![0.0; p + 2 * q];
    let mut data = vec![0.0; n * p];
    for row in data.chunks_exact_mut(p) {
        for e in noise.iter_mut() {
            *e = rng.sample(StandardNormal);
        }
        for (t, x) in row.iter_mut().enumerate() {
            let base = t + 2 * q;
            *x = norm * coef.iter().enumerate().map(|(i, c)| c * noise[base - 2 * i]).sum::<f64>();
        }
    }
    SampleSet::new(p, data).expect("MA sampler produces a well-formed sample set")
}
