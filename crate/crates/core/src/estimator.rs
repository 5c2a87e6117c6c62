//! Empirical lag functionals and the sum / scan statistics.
//!
//! For samples `X_1, …, X_n ∈ ℝ^p` the lag-`j` functional is
//!
//! ```text
//! ξ_j = Tr(A_j Σ_n) = (1/(n(p−j))) Σ_k Σ_{i=1}^{p−j} X_k^i X_k^{i+j},
//! ```
//!
//! which is also `φ_{A_j}(Σ_n − I_p)` because `A_j` has a zero diagonal.
//! Everything is computed in `O(n p S)` directly from the samples.

use crate::error::{invalid, Error, Result};
use crate::model::check_horizon;

/// `n` observations of dimension `p`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    n: usize,
    p: usize,
    data: Vec<f64>,
}

impl SampleSet {
    pub fn new(p: usize, data: Vec<f64>) -> Result<Self> {
        if p == 0 {
            return Err(invalid("dimension p must be at least 1"));
        }
        if data.is_empty() || !data.len().is_multiple_of(p) {
            return Err(invalid(format!(
                "sample buffer of length {} is not a positive multiple of p = {p}",
                data.len()
            )));
        }
        Ok(Self { n: data.len() / p, p, data })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let p = rows.first().map(Vec::len).ok_or_else(|| invalid("need at least one sample"))?;
        let mut data = Vec::with_capacity(rows.len() * p);
        for r in rows {
            if r.len() != p {
                return Err(Error::LengthMismatch { expected: p, actual: r.len() });
            }
            data.extend(r);
        }
        Self::new(p, data)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn row(&self, k: usize) -> &[f64] {
        &self.data[k * self.p..(k + 1) * self.p]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.p)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

/// `(ξ_1, …, ξ_S)` plus `ξ_0 = σ̂_0`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalStats {
    pub xi: Vec<f64>,
    pub xi0: f64,
}

impl DiagonalStats {
    pub fn new(xi: Vec<f64>, xi0: f64) -> Self {
        Self { xi, xi0 }
    }

    pub fn horizon(&self) -> usize {
        self.xi.len()
    }

    /// `ξ_j / ξ_0`, for data not already on the correlation scale.
    pub fn studentized(&self) -> Self {
        Self { xi: self.xi.iter().map(|x| x / self.xi0).collect(), xi0: 1.0 }
    }
}

/// Neumaier compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    #[inline]
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn merge(&mut self, other: CompensatedSum) {
        self.add(other.sum);
        self.comp += other.comp;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Per-lag sums of `X^i X^{i+j}` over one contiguous block of rows. Each
/// row's lagged dot product is added to a compensated accumulator; blocks
/// are merged in row order so the result does not depend on partitioning.
fn lag_sums(rows: std::slice::ChunksExact<'_, f64>, horizon: usize) -> Vec<CompensatedSum> {
    let mut acc = vec![CompensatedSum::default(); horizon + 1];
    for row in rows {
        for (j, a) in acc.iter_mut().enumerate() {
            a.add(lagged_dot(row, j));
        }
    }
    acc
}

/// `Σ_i x_i x_{i+j}` with four independent partial sums.
#[inline]
fn lagged_dot(row: &[f64], lag: usize) -> f64 {
    let a = &row[..row.len() - lag];
    let b = &row[lag..];
    let mut lanes = [0.0f64; 4];
    let mut ca = a.chunks_exact(4);
    let mut cb = b.chunks_exact(4);
    for (x, y) in (&mut ca).zip(&mut cb) {
        for k in 0..4 {
            lanes[k] += x[k] * y[k];
        }
    }
    let tail: f64 = ca.remainder().iter().zip(cb.remainder()).map(|(x, y)| x * y).sum();
    (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]) + tail
}

/// `ξ_j` for `j = 1..=S` and `ξ_0`. Requires `1 ≤ S < p/2`.
pub fn lag_functionals(samples: &SampleSet, horizon: usize) -> Result<DiagonalStats> {
    check_horizon(samples.p(), horizon)?;
    let acc = lag_sums(samples.data.chunks_exact(samples.p), horizon);
    Ok(finish(acc, samples.n, samples.p))
}

/// Same as [`lag_functionals`] but splits the rows into `blocks` partitions
/// that are summed separately and merged in fixed order.
pub fn lag_functionals_blocked(
    samples: &SampleSet,
    horizon: usize,
    blocks: usize,
) -> Result<DiagonalStats> {
    check_horizon(samples.p(), horizon)?;
    let p = samples.p;
    let per = samples.n.div_ceil(blocks.max(1));
    let mut total = vec![CompensatedSum::default(); horizon + 1];
    for chunk in samples.data.chunks(per * p) {
        for (t, part) in total.iter_mut().zip(lag_sums(chunk.chunks_exact(p), horizon)) {
            t.merge(part);
        }
    }
    Ok(finish(total, samples.n, p))
}

fn finish(acc: Vec<CompensatedSum>, n: usize, p: usize) -> DiagonalStats {
    let xi0 = acc[0].value() / (n * p) as f64;
    let xi = acc[1..]
        .iter()
        .enumerate()
        .map(|(i, a)| a.value() / (n * (p - i - 1)) as f64)
        .collect();
    DiagonalStats { xi, xi0 }
}

/// `Σ_j ξ_j` (signed, MS+) or `Σ_j |ξ_j|` (absolute, MS).
pub fn sum_statistic(stats: &DiagonalStats, absolute: bool) -> f64 {
    if absolute {
        stats.xi.iter().map(|x| x.abs()).sum()
    } else {
        stats.xi.iter().sum()
    }
}

/// Lags (1-based, ascending) of the `s` largest values of `ξ` (or `|ξ|`),
/// ties broken towards the smaller lag.
pub fn scan_support(stats: &DiagonalStats, s: usize, absolute: bool) -> Result<Vec<usize>> {
    let horizon = stats.horizon();
    if s == 0 || s > horizon {
        return Err(invalid(format!("scan size s = {s} must satisfy 1 <= s <= S = {horizon}")));
    }
    let key = |j: usize| if absolute { stats.xi[j].abs() } else { stats.xi[j] };
    let mut order: Vec<usize> = (0..horizon).collect();
    order.sort_by(|&a, &b| key(b).total_cmp(&key(a)).then(a.cmp(&b)));
    let mut top: Vec<usize> = order[..s].iter().map(|j| j + 1).collect();
    top.sort_unstable();
    Ok(top)
}

/// `ξ_(1) + … + ξ_(s)`, the maximum subset sum over all size-`s` lag sets;
/// with `absolute` the same on `|ξ|`.
pub fn scan_statistic(stats: &DiagonalStats, s: usize, absolute: bool) -> Result<f64> {
    let support = scan_support(stats, s, absolute)?;
    Ok(support
        .iter()
        .map(|&j| if absolute { stats.xi[j - 1].abs() } else { stats.xi[j - 1] })
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn one(p: usize, x: &[f64]) -> SampleSet {
        SampleSet::new(p, x.to_vec()).unwrap()
    }

    #[test]
    fn hand_sums() {
        assert_eq!(lag_functionals(&one(3, &[1.0, 1.0, 1.0]), 1).unwrap().xi, vec![1.0]);
        assert_eq!(lag_functionals(&one(3, &[1.0, -1.0, 1.0]), 1).unwrap().xi, vec![-1.0]);
        let two = SampleSet::from_rows(vec![vec![1.0, 0.0, 1.0, 0.0], vec![0.0, 1.0, 0.0, 1.0]])
            .unwrap();
        let st = lag_functionals(&two, 1).unwrap();
        assert_eq!(st.xi, vec![0.0]);
        assert_eq!(st.xi0, 0.5);
    }

    #[test]
    fn horizon_must_be_below_half_dimension() {
        let s = one(4, &[1.0, 2.0, 3.0, 4.0]);
        assert!(lag_functionals(&s, 2).is_err());
        assert!(lag_functionals(&s, 0).is_err());
        assert!(lag_functionals(&s, 1).is_ok());
    }

    #[test]
    fn ragged_rows_rejected() {
        let r = SampleSet::from_rows(vec![vec![1.0, 2.0], vec![1.0]]);
        assert!(matches!(r, Err(Error::LengthMismatch { expected: 2, actual: 1 })));
    }

    #[test]
    fn sum_statistic_examples() {
        let st = DiagonalStats::new(vec![0.5, -0.2, 0.3], 1.0);
        assert_relative_eq!(sum_statistic(&st, false), 0.6, epsilon = 1e-15);
        assert_relative_eq!(sum_statistic(&st, true), 1.0, epsilon = 1e-15);
        let zero = DiagonalStats::new(vec![0.0; 3], 1.0);
        assert_eq!(sum_statistic(&zero, false), 0.0);
        assert_eq!(sum_statistic(&zero, true), 0.0);
    }

    #[test]
    fn scan_statistic_examples() {
        let a = DiagonalStats::new(vec![0.5, 0.1, 0.3, -0.2], 1.0);
        assert_relative_eq!(scan_statistic(&a, 2, false).unwrap(), 0.8, epsilon = 1e-15);
        let b = DiagonalStats::new(vec![-0.5, 0.1, 0.3], 1.0);
        assert_relative_eq!(scan_statistic(&b, 2, true).unwrap(), 0.8, epsilon = 1e-15);
        assert_relative_eq!(scan_statistic(&b, 2, false).unwrap(), 0.4, epsilon = 1e-15);
        assert!(scan_statistic(&b, 4, false).is_err());
        assert!(scan_statistic(&b, 0, false).is_err());
    }

    #[test]
    fn scan_ties_prefer_smaller_lag() {
        let st = DiagonalStats::new(vec![0.2, 0.5, 0.2, 0.2], 1.0);
        assert_eq!(scan_support(&st, 2, false).unwrap(), vec![1, 2]);
    }

    #[test]
    fn blocked_matches_unblocked() {
        let data: Vec<f64> = (0..7 * 11).map(|i| ((i * 37 % 19) as f64 - 9.0) / 7.0).collect();
        let s = SampleSet::new(11, data).unwrap();
        let a = lag_functionals(&s, 4).unwrap();
        for blocks in [1, 2, 3, 7, 20] {
            let b = lag_functionals_blocked(&s, 4, blocks).unwrap();
            for (x, y) in a.xi.iter().zip(&b.xi) {
                assert_relative_eq!(x, y, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn studentize_divides_by_xi0() {
        let st = DiagonalStats::new(vec![0.5, -1.0], 2.0).studentized();
        assert_eq!(st.xi, vec![0.25, -0.5]);
    }
}
