//! Monte Carlo scenarios. Every replication draws from its own keyed stream,
//! so tables are identical for any number of worker threads.

use std::collections::HashMap;

use rand::Rng;
use rayon::prelude::*;

use crate::concentration::{
    norm_bounds, risk_bound, selector_threshold, separation_radius, tail_threshold,
    theoretical_threshold, LagLocation, ThresholdSpec,
};
use crate::error::{invalid, Error, Result};
use crate::estimator::{lag_functionals, scan_statistic, DiagonalStats};
use crate::harness::config::{geometric_grid, ExperimentConfig, Scenario};
use crate::harness::table::{ResultTable, Value};
use crate::model::{Placement, SparseAlternative, ToeplitzSpec};
use crate::procedures::{
    calibrate_aggregate, calibrate_thresholds, hamming_loss, null_statistics,
    select_from_stats, TestKind, TestStatistic, ThresholdSource,
};
use crate::sampler::{sample_ma_process, GaussianSampler, MaSpec, RngStream};

const TAG_NULL: u64 = 1;
const TAG_FRESH: u64 = 2;
const TAG_SUPPORT: u64 = 3;
const TAG_NOISE: u64 = 4;
const TAG_MA: u64 = 5;
const TAG_VERIFY: u64 = 6;
const TAG_PROBE: u64 = 7;
const TAG_AGGREGATE: u64 = 8;

/// Draws per replication before giving up on finding a positive-definite
/// member of a non-empty class.
const MAX_DRAWS: usize = 10_000;
/// Largest number of (support, sign) patterns enumerated when deciding
/// whether a class has any positive-definite member.
const MAX_ENUMERATION: usize = 1 << 17;

pub const POWER_COLUMNS: [&str; 7] =
    ["kind", "sigma", "separation", "log10_separation", "power", "se", "R"];
pub const TYPE1_COLUMNS: [&str; 7] =
    ["kind", "s", "threshold", "threshold_source", "rejection_rate", "se", "R"];
pub const SELECTION_COLUMNS: [&str; 7] = ["n", "s", "S", "tau", "avg_hamming", "se", "R"];
pub const MA_COLUMNS: [&str; 5] = ["p", "phi", "power", "se", "R"];
pub const VERIFY_COLUMNS: [&str; 9] = ["u", "n", "p", "S", "w", "bound", "empirical", "se", "pass"];
pub const MS_VS_HS_COLUMNS: [&str; 7] = ["s", "kind", "sigma", "separation", "power", "se", "R"];
pub const RISK_COLUMNS: [&str; 12] = [
    "kind", "u", "s", "threshold", "sigma", "type1", "type2", "risk", "se", "bound", "feasible", "R",
];

/// `√(q(1−q)/R)`.
pub fn binomial_se(q: f64, replications: usize) -> f64 {
    (q * (1.0 - q) / replications as f64).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerEstimate {
    pub power: f64,
    pub se: f64,
    pub replications: usize,
}

impl PowerEstimate {
    fn from_count(count: usize, replications: usize) -> Self {
        let power = count as f64 / replications as f64;
        Self { power, se: binomial_se(power, replications), replications }
    }
}

/// Parameters of a sparse alternative class; `sigma = 0` means the null.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlternativeDesign {
    pub p: usize,
    pub sparsity: usize,
    pub horizon: usize,
    pub sigma: f64,
    pub placement: Placement,
    pub two_sided: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassStatus {
    /// A positive-definite member was found.
    NonEmpty,
    /// Exhaustive enumeration found no positive-definite member.
    Empty,
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for j in start..=n {
            if n - j + 1 < k - cur.len() {
                break;
            }
            cur.push(j);
            rec(j + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(1, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

fn n_choose_k(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

impl AlternativeDesign {
    pub fn is_null(&self) -> bool {
        self.sigma == 0.0
    }

    /// One member drawn by the placement rule, redrawn until positive definite.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R, attempts: usize) -> Result<SparseAlternative> {
        let mut last = None;
        for _ in 0..attempts {
            match SparseAlternative::generate(
                self.p,
                self.sparsity,
                self.horizon,
                self.sigma,
                self.placement,
                self.two_sided,
                rng,
            ) {
                Ok(alt) => return Ok(alt),
                Err(e @ Error::NotPositiveDefinite(_)) => last = Some(e),
                Err(e) => return Err(e),
            }
        }
        Err(last.unwrap_or_else(|| invalid("no draws attempted")))
    }

    fn supports(&self) -> Vec<Vec<usize>> {
        match self.placement {
            Placement::Random => combinations(self.horizon, self.sparsity),
            Placement::NearDiagonal => vec![(1..=self.sparsity).collect()],
            Placement::Far => vec![(self.horizon - self.sparsity + 1..=self.horizon).collect()],
        }
    }

    /// Whether the class has a positive-definite member: a random probe
    /// first, then exhaustive enumeration of supports and signs.
    pub fn status(&self, seed: u64) -> Result<ClassStatus> {
        if self.is_null() {
            return Ok(ClassStatus::NonEmpty);
        }
        let mut rng = RngStream::keyed(seed, TAG_PROBE, &[]).rng();
        if self.draw(&mut rng, 1000).is_ok() {
            return Ok(ClassStatus::NonEmpty);
        }
        let supports = self.supports();
        let sign_patterns = if self.two_sided { 1usize << self.sparsity } else { 1 };
        let total = supports.len() as f64 * sign_patterns as f64;
        if total > MAX_ENUMERATION as f64 {
            return Err(Error::NotPositiveDefinite(format!(
                "no positive-definite member found in 1000 draws and the class is too large \
                 ({total:.0} patterns) to enumerate"
            )));
        }
        for support in &supports {
            for mask in 0..sign_patterns {
                let signs = (0..self.sparsity)
                    .map(|i| if mask >> i & 1 == 1 { -1 } else { 1 })
                    .collect();
                if SparseAlternative::new(self.p, self.horizon, self.sigma, support.clone(), signs)
                    .is_ok()
                {
                    return Ok(ClassStatus::NonEmpty);
                }
            }
        }
        Ok(ClassStatus::Empty)
    }

    /// Number of (support, sign) patterns: `C(S, s)`, times `2^s` if two-sided.
    pub fn pattern_count(&self) -> f64 {
        let signs = if self.two_sided { 2f64.powi(self.sparsity as i32) } else { 1.0 };
        n_choose_k(self.horizon, self.sparsity) * signs
    }
}

/// Lag functionals of replication `r` under the design. The support and
/// noise streams depend only on `(seed, r)`, so every design shares its
/// noise with every other (common random numbers).
pub fn replicate_stats(design: &AlternativeDesign, n: usize, seed: u64, r: u64) -> Result<(DiagonalStats, Option<SparseAlternative>)> {
    let mut noise = RngStream::keyed(seed, TAG_NOISE, &[r]).rng();
    let (spec, alt) = if design.is_null() {
        (ToeplitzSpec::identity(design.p), None)
    } else {
        let mut support_rng = RngStream::keyed(seed, TAG_SUPPORT, &[r]).rng();
        let alt = design.draw(&mut support_rng, MAX_DRAWS)?;
        (alt.spec().clone(), Some(alt))
    };
    let samples = GaussianSampler::new(&spec)?.sample(n, &mut noise);
    Ok((lag_functionals(&samples, design.horizon)?, alt))
}

/// Fraction of `R` replications under the design for which `decide` rejects.
pub fn rejection_rate<F>(
    design: &AlternativeDesign,
    n: usize,
    replications: usize,
    seed: u64,
    decide: F,
) -> Result<PowerEstimate>
where
    F: Fn(&DiagonalStats) -> Result<bool> + Sync,
{
    let hits = (0..replications as u64)
        .into_par_iter()
        .map(|r| {
            let (stats, _) = replicate_stats(design, n, seed, r)?;
            decide(&stats)
        })
        .collect::<Result<Vec<bool>>>()?;
    Ok(PowerEstimate::from_count(hits.iter().filter(|&&h| h).count(), replications))
}

/// Power of one test with a fixed threshold.
pub fn power_at(
    stat: TestStatistic,
    threshold: f64,
    design: &AlternativeDesign,
    n: usize,
    replications: usize,
    seed: u64,
) -> Result<PowerEstimate> {
    rejection_rate(design, n, replications, seed, |d| Ok(stat.evaluate(d)? >= threshold))
}

/// Statistic, n, p, S, alpha bits, R, seed.
type CacheKey = (TestStatistic, usize, usize, usize, u64, usize, u64);

/// Calibrated thresholds memoized per `(statistic, n, p, S, α, R, seed)`.
///
/// The null samples for `(n, p, S)` come from one stream family, so a
/// statistic gets the same threshold whether calibrated alone or together
/// with others.
#[derive(Debug, Default)]
pub struct CalibrationCache {
    map: HashMap<CacheKey, f64>,
}

impl CalibrationCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn null_stream(seed: u64, n: usize, p: usize, horizon: usize) -> RngStream {
        RngStream::keyed(seed, TAG_NULL, &[n as u64, p as u64, horizon as u64])
    }

    #[allow(clippy::too_many_arguments)]
    pub fn thresholds(
        &mut self,
        stats: &[TestStatistic],
        n: usize,
        p: usize,
        horizon: usize,
        alpha: f64,
        replications: usize,
        seed: u64,
    ) -> Result<Vec<f64>> {
        let key = |st: TestStatistic| (st, n, p, horizon, alpha.to_bits(), replications, seed);
        let missing: Vec<TestStatistic> =
            stats.iter().copied().filter(|&st| !self.map.contains_key(&key(st))).collect();
        if !missing.is_empty() {
            let base = Self::null_stream(seed, n, p, horizon);
            let values = calibrate_thresholds(&missing, n, p, horizon, alpha, replications, base)?;
            for (st, v) in missing.into_iter().zip(values) {
                self.map.insert(key(st), v);
            }
        }
        Ok(stats.iter().map(|&st| self.map[&key(st)]).collect())
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

fn statistic_for(kind: TestKind, s: usize) -> Result<TestStatistic> {
    TestStatistic::new(kind, kind.is_scan().then_some(s))
}

fn threshold_spec(cfg: &ExperimentConfig, kind: TestKind, n: usize, p: usize, horizon: usize, s: usize) -> ThresholdSpec {
    let spec = ThresholdSpec::new(kind.threshold_kind(), n, p, horizon)
        .with_sparsity(s)
        .with_split(cfg.k_split);
    match cfg.u {
        Some(u) => spec.with_u(u),
        None => spec,
    }
}

/// Thresholds for several statistics at `(n, p, S)` from the configured source.
pub fn resolve_thresholds(
    cfg: &ExperimentConfig,
    cache: &mut CalibrationCache,
    stats: &[TestStatistic],
    n: usize,
    p: usize,
    horizon: usize,
) -> Result<Vec<f64>> {
    match cfg.threshold_source {
        ThresholdSource::Calibrated => {
            cache.thresholds(stats, n, p, horizon, cfg.alpha, cfg.replications, cfg.seed()?)
        }
        ThresholdSource::Theoretical => stats
            .iter()
            .map(|st| {
                let s = st.sparsity.unwrap_or(1);
                theoretical_threshold(&threshold_spec(cfg, st.kind, n, p, horizon, s))
            })
            .collect(),
    }
}

/// Default grid: geometric from `t/100` to `min(10t, 0.95/(2s))`. The cap
/// keeps every member diagonally dominant, hence positive definite.
pub fn default_sigma_grid(threshold: f64, s: usize, points: usize) -> Result<Vec<f64>> {
    let lo = threshold / 100.0;
    let hi = (10.0 * threshold).min(0.95 / (2.0 * s as f64));
    if !(lo > 0.0 && hi > lo) {
        return Err(invalid(format!(
            "cannot build a default sigma grid from threshold {threshold} and s = {s}; set sigma_grid"
        )));
    }
    Ok(geometric_grid(lo, hi, points))
}

fn separation_row(kind: &str, sigma: f64, s: usize, est: PowerEstimate) -> Vec<Value> {
    let separation = s as f64 * sigma;
    vec![
        kind.into(),
        sigma.into(),
        separation.into(),
        separation.log10().into(),
        est.power.into(),
        est.se.into(),
        est.replications.into(),
    ]
}

/// Power of each configured test along a σ-grid.
pub fn run_power_curve(cfg: &ExperimentConfig) -> Result<ResultTable> {
    cfg.validate()?;
    let seed = cfg.seed()?;
    let (n, p) = (cfg.n, cfg.p);
    let horizon = cfg.horizon_for(p)?;
    let s = cfg.sparsity_for(horizon)?;
    let stats = cfg.kinds.iter().map(|&k| statistic_for(k, s)).collect::<Result<Vec<_>>>()?;
    let mut cache = CalibrationCache::new();
    let thresholds = resolve_thresholds(cfg, &mut cache, &stats, n, p, horizon)?;
    let grid = match &cfg.sigma_grid {
        Some(g) => g.clone(),
        None => default_sigma_grid(thresholds[0], s, cfg.grid_points)?,
    };
    let mut table = ResultTable::new(&POWER_COLUMNS);
    for (st, &t) in stats.iter().zip(&thresholds) {
        for &sigma in &grid {
            let design = AlternativeDesign {
                p,
                sparsity: s,
                horizon,
                sigma,
                placement: cfg.placement,
                two_sided: cfg.two_sided_for(st.kind),
            };
            let est = power_at(*st, t, &design, n, cfg.replications, seed)?;
            table.push(separation_row(&st.kind.to_string(), sigma, s, est))?;
        }
    }
    Ok(table)
}

/// Null rejection rate of each configured test on fresh samples.
pub fn run_type1(cfg: &ExperimentConfig) -> Result<ResultTable> {
    cfg.validate()?;
    let seed = cfg.seed()?;
    let (n, p) = (cfg.n, cfg.p);
    let horizon = cfg.horizon_for(p)?;
    let s = cfg.sparsity_for(horizon)?;
    let stats = cfg.kinds.iter().map(|&k| statistic_for(k, s)).collect::<Result<Vec<_>>>()?;
    let mut cache = CalibrationCache::new();
    let thresholds = resolve_thresholds(cfg, &mut cache, &stats, n, p, horizon)?;
    let fresh = RngStream::keyed(seed, TAG_FRESH, &[n as u64, p as u64, horizon as u64]);
    let null = null_statistics(&stats, n, p, horizon, cfg.replications, fresh)?;
    let mut table = ResultTable::new(&TYPE1_COLUMNS);
    for ((st, &t), values) in stats.iter().zip(&thresholds).zip(&null) {
        let rate = values.iter().filter(|&&v| v >= t).count() as f64 / values.len() as f64;
        table.push(vec![
            st.kind.to_string().into(),
            st.sparsity.map_or(Value::Text(String::new()), Into::into),
            t.into(),
            cfg.threshold_source.to_string().into(),
            rate.into(),
            binomial_se(rate, cfg.replications).into(),
            cfg.replications.into(),
        ])?;
    }
    Ok(table)
}

/// Average Hamming loss of the lag selector at `σ = factor · τ_n` for each
/// `n` of the sweep.
pub fn run_selection_risk(cfg: &ExperimentConfig) -> Result<ResultTable> {
    cfg.validate()?;
    let seed = cfg.seed()?;
    let p = cfg.p;
    let horizon = cfg.horizon_for(p)?;
    let s = cfg.sparsity_for(horizon)?;
    let u = cfg.u.unwrap_or(2.0);
    let mut table = ResultTable::new(&SELECTION_COLUMNS);
    for n in cfg.n_grid() {
        let tau = selector_threshold(n, p, horizon, s, u)?;
        let design = AlternativeDesign {
            p,
            sparsity: s,
            horizon,
            sigma: cfg.signal_factor * tau,
            placement: cfg.placement,
            two_sided: !cfg.one_sided,
        };
        if design.status(seed)? == ClassStatus::Empty {
            return Err(Error::NotPositiveDefinite(format!(
                "no positive-definite member with s = {s}, S = {horizon}, sigma = {:.6} at n = {n}, p = {p}",
                design.sigma
            )));
        }
        let losses = (0..cfg.replications as u64)
            .into_par_iter()
            .map(|r| {
                let (stats, alt) = replicate_stats(&design, n, seed, r)?;
                let alt = alt.expect("selection designs are never null");
                let sel = select_from_stats(&stats, tau, cfg.one_sided)?;
                hamming_loss(&sel.eta_hat, &alt.eta())
            })
            .collect::<Result<Vec<usize>>>()?;
        let (mean, se) = mean_se(losses.iter().map(|&l| l as f64));
        table.push(vec![
            n.into(),
            s.into(),
            horizon.into(),
            tau.into(),
            mean.into(),
            se.into(),
            cfg.replications.into(),
        ])?;
    }
    Ok(table)
}

/// Sample mean and its standard error.
pub fn mean_se(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let v: Vec<f64> = values.collect();
    let m = v.len() as f64;
    let mean = v.iter().sum::<f64>() / m;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0);
    (mean, (var / m).sqrt())
}

/// Power of the first configured test (MS by default) against the moving
/// average process, for each `p` and `φ`.
pub fn run_ma_experiment(cfg: &ExperimentConfig) -> Result<ResultTable> {
    cfg.validate()?;
    let seed = cfg.seed()?;
    let n = cfg.n;
    let kind = cfg.kinds[0];
    let mut cache = CalibrationCache::new();
    let mut table = ResultTable::new(&MA_COLUMNS);
    for p in cfg.p_grid() {
        let horizon = cfg.horizon_for(p)?;
        let s = cfg.sparsity_for(horizon)?;
        let st = statistic_for(kind, s)?;
        let t = resolve_thresholds(cfg, &mut cache, &[st], n, p, horizon)?[0];
        for phi in cfg.phi_grid() {
            let ma = MaSpec::new(phi, p)?;
            let hits = (0..cfg.replications as u64)
                .into_par_iter()
                .map(|r| {
                    let mut rng = RngStream::keyed(seed, TAG_MA, &[r]).rng();
                    let samples = sample_ma_process(&ma, n, &mut rng);
                    Ok(st.compute(&samples, horizon)? >= t)
                })
                .collect::<Result<Vec<bool>>>()?;
            let est = PowerEstimate::from_count(hits.iter().filter(|&&h| h).count(), cfg.replications);
            table.push(vec![p.into(), phi.into(), est.power.into(), est.se.into(), est.replications.into()])?;
        }
    }
    Ok(table)
}

/// Null tail frequency of `φ_{A_W}(Σ_n − I_p)` (or its absolute value) for
/// `W = {1, …, w}` against the concentration bound.
pub fn run_verify_concentration(cfg: &ExperimentConfig) -> Result<ResultTable> {
    cfg.validate()?;
    let seed = cfg.seed()?;
    let mut rows = Vec::new();
    for n in cfg.n_grid() {
        for p in cfg.p_grid() {
            let horizon = cfg.horizon_for(p)?;
            let w = cfg.w.unwrap_or(horizon);
            if w == 0 || w > horizon {
                return Err(Error::Config(format!("w = {w} must satisfy 1 <= w <= S = {horizon}")));
            }
            let sampler = GaussianSampler::new(&ToeplitzSpec::identity(p))?;
            let values = (0..cfg.replications as u64)
                .into_par_iter()
                .map(|r| {
                    let stream = RngStream::keyed(seed, TAG_VERIFY, &[n as u64, p as u64, r]);
                    let stats = lag_functionals(&sampler.sample_stream(n, stream), horizon)?;
                    let phi: f64 = stats.xi[..w].iter().sum();
                    Ok(if cfg.absolute { phi.abs() } else { phi })
                })
                .collect::<Result<Vec<f64>>>()?;
            let bounds = norm_bounds(w, 0, horizon, p, 1.0, w == 1, LagLocation::Early)?;
            for u in cfg.u_grid() {
                let t = tail_threshold(bounds, n, cfg.k_split, u)?;
                let bound = if cfg.absolute { 2.0 } else { 1.0 } * (-u / 4.0).exp();
                let emp = values.iter().filter(|&&v| v >= t).count() as f64 / values.len() as f64;
                let se = binomial_se(emp, cfg.replications);
                rows.push((u, n, p, horizon, w, bound, emp, se));
            }
        }
    }
    rows.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut table = ResultTable::new(&VERIFY_COLUMNS);
    for (u, n, p, horizon, w, bound, emp, se) in rows {
        table.push(vec![
            u.into(),
            n.into(),
            p.into(),
            horizon.into(),
            w.into(),
            bound.into(),
            emp.into(),
            se.into(),
            (emp <= bound + 3.0 * se).into(),
        ])?;
    }
    Ok(table)
}

/// MS against HS with known `s` and against the aggregated HS test, at
/// `σ = factor · t_MS / S` for each true sparsity in the sweep.
pub fn run_ms_vs_hs(cfg: &ExperimentConfig) -> Result<ResultTable> {
    cfg.validate()?;
    let seed = cfg.seed()?;
    let (n, p) = (cfg.n, cfg.p);
    let horizon = cfg.horizon_for(p)?;
    let mut cache = CalibrationCache::new();
    let ms = TestStatistic::new(TestKind::Ms, None)?;
    let t_ms = resolve_thresholds(cfg, &mut cache, &[ms], n, p, horizon)?[0];
    let sigma = cfg.signal_factor * t_ms / horizon as f64;
    let agg_grid = cfg.aggregate_grid(horizon);
    if agg_grid.iter().any(|&s| s == 0 || s > horizon) {
        return Err(Error::Config(format!("aggregate_grid entries must lie in 1..={horizon}")));
    }
    let agg_thresholds = match cfg.threshold_source {
        ThresholdSource::Calibrated => calibrate_aggregate(
            &agg_grid,
            n,
            p,
            horizon,
            cfg.alpha,
            cfg.replications,
            RngStream::keyed(seed, TAG_AGGREGATE, &[n as u64, p as u64, horizon as u64]),
            cfg.aggregate_calibration,
        )?,
        ThresholdSource::Theoretical => agg_grid
            .iter()
            .map(|&s| theoretical_threshold(&threshold_spec(cfg, TestKind::Hs, n, p, horizon, s)))
            .collect::<Result<Vec<_>>>()?,
    };
    let mut table = ResultTable::new(&MS_VS_HS_COLUMNS);
    for s in cfg.s_grid() {
        if s > horizon {
            return Err(Error::Config(format!("s_grid entry {s} exceeds S = {horizon}")));
        }
        let hs = TestStatistic::new(TestKind::Hs, Some(s))?;
        let t_hs = resolve_thresholds(cfg, &mut cache, &[hs], n, p, horizon)?[0];
        let design = AlternativeDesign {
            p,
            sparsity: s,
            horizon,
            sigma,
            placement: cfg.placement,
            two_sided: cfg.two_sided.unwrap_or(true),
        };
        let r = cfg.replications;
        let ests = [
            ("ms", power_at(ms, t_ms, &design, n, r, seed)?),
            ("hs", power_at(hs, t_hs, &design, n, r, seed)?),
            (
                "hs_aggregate",
                rejection_rate(&design, n, r, seed, |d| {
                    aggregate_stats(d, &agg_grid, &agg_thresholds)
                })?,
            ),
        ];
        for (name, est) in ests {
            table.push(vec![
                s.into(),
                name.into(),
                sigma.into(),
                (s as f64 * sigma).into(),
                est.power.into(),
                est.se.into(),
                est.replications.into(),
            ])?;
        }
    }
    Ok(table)
}

fn aggregate_stats(stats: &DiagonalStats, grid: &[usize], thresholds: &[f64]) -> Result<bool> {
    for (&s, &t) in grid.iter().zip(thresholds) {
        if scan_statistic(stats, s, true)? >= t {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Type I and type II errors of each configured test with its closed-form
/// threshold at the signal level where its risk bound is guaranteed.
///
/// When no positive-definite member of the alternative class exists at that
/// level, the worst-case type II error is over an empty set; it is reported
/// as 0 with `feasible = false`.
pub fn run_risk_check(cfg: &ExperimentConfig) -> Result<ResultTable> {
    cfg.validate()?;
    let seed = cfg.seed()?;
    let (n, p) = (cfg.n, cfg.p);
    let horizon = cfg.horizon_for(p)?;
    let s = cfg.sparsity_for(horizon)?;
    let mut table = ResultTable::new(&RISK_COLUMNS);
    let stats = cfg.kinds.iter().map(|&k| statistic_for(k, s)).collect::<Result<Vec<_>>>()?;
    let fresh = RngStream::keyed(seed, TAG_FRESH, &[n as u64, p as u64, horizon as u64]);
    let null = null_statistics(&stats, n, p, horizon, cfg.replications, fresh)?;
    for (st, null_values) in stats.iter().zip(&null) {
        let spec = threshold_spec(cfg, st.kind, n, p, horizon, s);
        let t = theoretical_threshold(&spec)?;
        let sigma = separation_radius(&spec)?;
        let bound = risk_bound(&spec)?;
        let r = cfg.replications;
        let type1 = null_values.iter().filter(|&&v| v >= t).count() as f64 / r as f64;
        let design = AlternativeDesign {
            p,
            sparsity: s,
            horizon,
            sigma,
            placement: cfg.placement,
            two_sided: cfg.two_sided_for(st.kind),
        };
        let feasible = design.status(seed)? == ClassStatus::NonEmpty;
        let (type2, se2) = if feasible {
            let power = power_at(*st, t, &design, n, r, seed)?;
            (1.0 - power.power, power.se)
        } else {
            (0.0, 0.0)
        };
        let se = (binomial_se(type1, r).powi(2) + se2 * se2).sqrt();
        table.push(vec![
            st.kind.to_string().into(),
            spec.u.into(),
            s.into(),
            t.into(),
            sigma.into(),
            type1.into(),
            type2.into(),
            (type1 + type2).into(),
            se.into(),
            bound.into(),
            feasible.into(),
            r.into(),
        ])?;
    }
    Ok(table)
}

/// Runs the configured scenario on a pool of `threads` workers (the global
/// pool when unset).
pub fn run_scenario(cfg: &ExperimentConfig) -> Result<ResultTable> {
    cfg.validate()?;
    let run = || match cfg.scenario {
        Scenario::PowerCurve => run_power_curve(cfg),
        Scenario::Type1 => run_type1(cfg),
        Scenario::SelectionRisk => run_selection_risk(cfg),
        Scenario::MaPower => run_ma_experiment(cfg),
        Scenario::VerifyConcentration => run_verify_concentration(cfg),
        Scenario::MsVsHs => run_ms_vs_hs(cfg),
        Scenario::RiskCheck => run_risk_check(cfg),
    };
    match cfg.threads {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| Error::Config(format!("cannot build a pool of {k} threads: {e}")))?
            .install(run),
        None => run(),
    }
}
