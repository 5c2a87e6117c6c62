//! The sum and scan tests, aggregation over sparsity levels, empirical
//! calibration under the null and the lag selector.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::concentration::ThresholdKind;
use crate::error::{invalid, Error, Result};
use crate::estimator::{lag_functionals, scan_statistic, sum_statistic, DiagonalStats, SampleSet};
use crate::model::check_horizon;
use crate::sampler::{GaussianSampler, RngStream};
use crate::ToeplitzSpec;

/// The four test procedures. The `+` variants are one-sided.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TestKind {
    #[serde(rename = "ms+")]
    MsPlus,
    #[serde(rename = "ms")]
    Ms,
    #[serde(rename = "hs+")]
    HsPlus,
    #[serde(rename = "hs")]
    Hs,
}

impl TestKind {
    pub const ALL: [TestKind; 4] = [TestKind::MsPlus, TestKind::Ms, TestKind::HsPlus, TestKind::Hs];

    /// Whether the statistic uses `|ξ_j|`.
    pub fn is_absolute(self) -> bool {
        matches!(self, TestKind::Ms | TestKind::Hs)
    }

    /// Whether the statistic is a scan over size-`s` lag sets.
    pub fn is_scan(self) -> bool {
        matches!(self, TestKind::HsPlus | TestKind::Hs)
    }

    pub fn threshold_kind(self) -> ThresholdKind {
        match self {
            TestKind::MsPlus => ThresholdKind::MsPlus,
            TestKind::Ms => ThresholdKind::Ms,
            TestKind::HsPlus => ThresholdKind::HsPlus,
            TestKind::Hs => ThresholdKind::Hs,
        }
    }
}

impl fmt::Display for TestKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.threshold_kind().fmt(f)
    }
}

impl FromStr for TestKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match ThresholdKind::from_str(s)? {
            ThresholdKind::MsPlus => Ok(TestKind::MsPlus),
            ThresholdKind::Ms => Ok(TestKind::Ms),
            ThresholdKind::HsPlus => Ok(TestKind::HsPlus),
            ThresholdKind::Hs => Ok(TestKind::Hs),
            ThresholdKind::Selector => Err(Error::Config("the selector is not a test".into())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThresholdSource {
    Theoretical,
    #[default]
    Calibrated,
}

impl fmt::Display for ThresholdSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ThresholdSource::Theoretical => "theoretical",
            ThresholdSource::Calibrated => "calibrated",
        })
    }
}

impl FromStr for ThresholdSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "theoretical" => Ok(Self::Theoretical),
            "calibrated" => Ok(Self::Calibrated),
            other => Err(Error::Config(format!("unknown threshold source '{other}'"))),
        }
    }
}

/// A test statistic: its kind plus the scan size for HS kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TestStatistic {
    pub kind: TestKind,
    pub sparsity: Option<usize>,
}

impl TestStatistic {
    /// `sparsity` is required for scan kinds and ignored otherwise.
    pub fn new(kind: TestKind, sparsity: Option<usize>) -> Result<Self> {
        if kind.is_scan() {
            match sparsity {
                Some(s) if s >= 1 => Ok(Self { kind, sparsity }),
                Some(_) => Err(invalid("scan size s must be at least 1")),
                None => Err(invalid(format!("sparsity s is required for {kind}"))),
            }
        } else {
            Ok(Self { kind, sparsity: None })
        }
    }

    pub fn evaluate(&self, stats: &DiagonalStats) -> Result<f64> {
        let absolute = self.kind.is_absolute();
        match self.sparsity {
            Some(s) if self.kind.is_scan() => scan_statistic(stats, s, absolute),
            _ => Ok(sum_statistic(stats, absolute)),
        }
    }

    pub fn compute(&self, samples: &SampleSet, horizon: usize) -> Result<f64> {
        self.evaluate(&lag_functionals(samples, horizon)?)
    }
}

impl fmt::Display for TestStatistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sparsity {
            Some(s) => write!(f, "{}(s={s})", self.kind),
            None => write!(f, "{}", self.kind),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestOutcome {
    pub kind: TestKind,
    pub sparsity: Option<usize>,
    pub statistic: f64,
    pub threshold: f64,
    /// `statistic ≥ threshold`.
    pub reject: bool,
    pub threshold_source: ThresholdSource,
}

fn check_threshold(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("threshold must be finite and nonnegative, got {t}")))
    }
}

/// Applies one test with a given threshold; rejects iff statistic ≥ threshold.
pub fn run_test(
    kind: TestKind,
    samples: &SampleSet,
    horizon: usize,
    sparsity: Option<usize>,
    threshold: f64,
    source: ThresholdSource,
) -> Result<TestOutcome> {
    check_threshold(threshold)?;
    check_horizon(samples.p(), horizon)?;
    let stat = TestStatistic::new(kind, sparsity)?;
    let statistic = stat.compute(samples, horizon)?;
    Ok(TestOutcome {
        kind,
        sparsity: stat.sparsity,
        statistic,
        threshold,
        reject: statistic >= threshold,
        threshold_source: source,
    })
}

/// HS tests over a grid of scan sizes, rejecting when any member rejects.
///
/// The reported statistic is `max_s (HS_s − t_s)` against threshold 0.
pub fn aggregate_hs(
    samples: &SampleSet,
    horizon: usize,
    s_grid: &[usize],
    thresholds: &[f64],
    source: ThresholdSource,
) -> Result<TestOutcome> {
    if s_grid.is_empty() {
        return Err(invalid("the sparsity grid must be nonempty"));
    }
    if s_grid.len() != thresholds.len() {
        return Err(Error::LengthMismatch { expected: s_grid.len(), actual: thresholds.len() });
    }
    check_horizon(samples.p(), horizon)?;
    let stats = lag_functionals(samples, horizon)?;
    let mut excess = f64::NEG_INFINITY;
    for (&s, &t) in s_grid.iter().zip(thresholds) {
        check_threshold(t)?;
        excess = excess.max(scan_statistic(&stats, s, true)? - t);
    }
    Ok(TestOutcome {
        kind: TestKind::Hs,
        sparsity: None,
        statistic: excess,
        threshold: 0.0,
        reject: excess >= 0.0,
        threshold_source: source,
    })
}

fn check_calibration(n: usize, alpha: f64, replications: usize) -> Result<()> {
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(invalid(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    if replications == 0 {
        return Err(invalid("the number of replications must be at least 1"));
    }
    Ok(())
}

/// 1-based rank `⌈(1−α)R⌉` of the calibrated order statistic.
pub fn quantile_rank(alpha: f64, replications: usize) -> usize {
    let r = ((1.0 - alpha) * replications as f64 - 1e-9).ceil() as usize;
    r.clamp(1, replications)
}

/// The `⌈(1−α)R⌉`-th smallest value.
pub fn empirical_quantile(values: &[f64], alpha: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v[quantile_rank(alpha, v.len()) - 1]
}

/// Null statistics for several statistics from shared `𝒩(0, I_p)` samples.
/// Replication `r` uses the stream keyed by `(base, r)`; the output is
/// indexed `[statistic][replication]`.
pub fn null_statistics(
    stats: &[TestStatistic],
    n: usize,
    p: usize,
    horizon: usize,
    replications: usize,
    base: RngStream,
) -> Result<Vec<Vec<f64>>> {
    check_horizon(p, horizon)?;
    for st in stats {
        if let Some(s) = st.sparsity {
            if s > horizon {
                return Err(invalid(format!("scan size s = {s} exceeds S = {horizon}")));
            }
        }
    }
    let sampler = GaussianSampler::new(&ToeplitzSpec::identity(p))?;
    let per_rep: Vec<Vec<f64>> = (0..replications as u64)
        .into_par_iter()
        .map(|r| {
            let samples = sampler.sample_stream(n, replication_stream(base, r));
            let diag = lag_functionals(&samples, horizon).expect("horizon checked");
            stats.iter().map(|st| st.evaluate(&diag).expect("scan size checked")).collect()
        })
        .collect();
    Ok((0..stats.len()).map(|i| per_rep.iter().map(|row| row[i]).collect()).collect())
}

/// Stream for replication `r` derived from a base stream.
pub fn replication_stream(base: RngStream, r: u64) -> RngStream {
    RngStream::keyed(base.master_seed, base.stream_id, &[r])
}

/// Empirical `(1−α)`-quantile threshold of one statistic under `Σ = I_p`.
pub fn calibrate_threshold(
    stat: TestStatistic,
    n: usize,
    p: usize,
    horizon: usize,
    alpha: f64,
    replications: usize,
    base: RngStream,
) -> Result<f64> {
    Ok(calibrate_thresholds(&[stat], n, p, horizon, alpha, replications, base)?[0])
}

/// [`calibrate_threshold`] for several statistics from shared null samples.
pub fn calibrate_thresholds(
    stats: &[TestStatistic],
    n: usize,
    p: usize,
    horizon: usize,
    alpha: f64,
    replications: usize,
    base: RngStream,
) -> Result<Vec<f64>> {
    check_calibration(n, alpha, replications)?;
    let null = null_statistics(stats, n, p, horizon, replications, base)?;
    Ok(null.iter().map(|v| empirical_quantile(v, alpha)).collect())
}

/// How the members of an HS aggregate share the level `α`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AggregateCalibration {
    /// Each member at level `α / |grid|`.
    #[default]
    Bonferroni,
    /// A common order-statistic rank for all members, the smallest one whose
    /// family-wise null rejection rate is at most `α`.
    Joint,
}

impl FromStr for AggregateCalibration {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bonferroni" => Ok(Self::Bonferroni),
            "joint" => Ok(Self::Joint),
            other => Err(Error::Config(format!("unknown aggregate calibration '{other}'"))),
        }
    }
}

/// Per-member thresholds for [`aggregate_hs`].
#[allow(clippy::too_many_arguments)]
pub fn calibrate_aggregate(
    s_grid: &[usize],
    n: usize,
    p: usize,
    horizon: usize,
    alpha: f64,
    replications: usize,
    base: RngStream,
    mode: AggregateCalibration,
) -> Result<Vec<f64>> {
    check_calibration(n, alpha, replications)?;
    if s_grid.is_empty() {
        return Err(invalid("the sparsity grid must be nonempty"));
    }
    let stats = s_grid
        .iter()
        .map(|&s| TestStatistic::new(TestKind::Hs, Some(s)))
        .collect::<Result<Vec<_>>>()?;
    let null = null_statistics(&stats, n, p, horizon, replications, base)?;
    Ok(match mode {
        AggregateCalibration::Bonferroni => {
            let level = alpha / s_grid.len() as f64;
            null.iter().map(|v| empirical_quantile(v, level)).collect()
        }
        AggregateCalibration::Joint => joint_thresholds(&null, alpha),
    })
}

fn joint_thresholds(null: &[Vec<f64>], alpha: f64) -> Vec<f64> {
    let r = null[0].len();
    let sorted: Vec<Vec<f64>> = null
        .iter()
        .map(|v| {
            let mut v = v.clone();
            v.sort_by(f64::total_cmp);
            v
        })
        .collect();
    let at = |k: usize| -> Vec<f64> { sorted.iter().map(|v| v[k - 1]).collect() };
    let rate = |t: &[f64]| -> f64 {
        (0..r).filter(|&i| null.iter().zip(t).any(|(v, &ti)| v[i] >= ti)).count() as f64
            / r as f64
    };
    let (mut lo, mut hi) = (1usize, r);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if rate(&at(mid)) <= alpha {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    at(lo)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectorResult {
    /// `η̂_j` for lags `1..=S`.
    pub eta_hat: Vec<u8>,
    pub tau: f64,
    pub one_sided: bool,
}

/// `η̂_j = 1(|ξ_j| > τ)`, or `1(ξ_j > τ)` when one-sided.
pub fn select_from_stats(stats: &DiagonalStats, tau: f64, one_sided: bool) -> Result<SelectorResult> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(invalid(format!("selector threshold must be positive, got {tau}")));
    }
    let eta_hat = stats
        .xi
        .iter()
        .map(|&x| u8::from(if one_sided { x > tau } else { x.abs() > tau }))
        .collect();
    Ok(SelectorResult { eta_hat, tau, one_sided })
}

pub fn select_lags(samples: &SampleSet, horizon: usize, tau: f64, one_sided: bool) -> Result<SelectorResult> {
    select_from_stats(&lag_functionals(samples, horizon)?, tau, one_sided)
}

/// Number of coordinates where the indicators differ.
pub fn hamming_loss(eta_hat: &[u8], eta: &[u8]) -> Result<usize> {
    if eta_hat.len() != eta.len() {
        return Err(Error::LengthMismatch { expected: eta.len(), actual: eta_hat.len() });
    }
    Ok(eta_hat.iter().zip(eta).filter(|(a, b)| a != b).count())
}
