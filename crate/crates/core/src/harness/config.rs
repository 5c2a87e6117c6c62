//! Experiment configuration, read from JSON.

use serde::{Deserialize, Serialize};

use crate::concentration::DEFAULT_SPLIT;
use crate::error::{Error, Result};
use crate::model::{check_horizon, Placement};
use crate::procedures::{AggregateCalibration, TestKind, ThresholdSource};

/// Environment variable overriding the default master seed.
pub const SEED_ENV: &str = "TOEPLITZ_SEED";
pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    PowerCurve,
    Type1,
    SelectionRisk,
    MaPower,
    VerifyConcentration,
    MsVsHs,
    RiskCheck,
}

fn default_n() -> usize {
    100
}
fn default_p() -> usize {
    100
}
fn default_alpha() -> f64 {
    0.1
}
fn default_replications() -> usize {
    5000
}
fn default_grid_points() -> usize {
    12
}
fn default_kinds() -> Vec<TestKind> {
    vec![TestKind::Ms]
}
fn default_split() -> f64 {
    DEFAULT_SPLIT
}
fn default_signal_factor() -> f64 {
    2.0
}

/// All knobs of the Monte Carlo scenarios. Unset optional fields take
/// scenario-specific defaults documented on each accessor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_p")]
    pub p: usize,
    #[serde(rename = "S", alias = "horizon", default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
    #[serde(rename = "s", alias = "sparsity", default, skip_serializing_if = "Option::is_none")]
    pub sparsity: Option<usize>,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(rename = "R", alias = "replications", default = "default_replications")]
    pub replications: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_grid: Option<Vec<f64>>,
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi_grid: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_grid: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_grid: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_grid: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_grid: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aggregate_grid: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<usize>,
    #[serde(default)]
    pub placement: Placement,
    #[serde(default = "default_kinds")]
    pub kinds: Vec<TestKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub two_sided: Option<bool>,
    #[serde(default)]
    pub one_sided: bool,
    #[serde(default)]
    pub absolute: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub master_seed: Option<u64>,
    #[serde(default)]
    pub threshold_source: ThresholdSource,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<f64>,
    #[serde(rename = "K", alias = "k_split", default = "default_split")]
    pub k_split: f64,
    #[serde(default = "default_signal_factor")]
    pub signal_factor: f64,
    #[serde(default)]
    pub aggregate_calibration: AggregateCalibration,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

/// `min(⌊√p⌋, ⌊(p−1)/2⌋)`: the largest horizon below `√p` with `S < p/2`.
pub fn default_horizon(p: usize) -> usize {
    p.isqrt().min(p.saturating_sub(1) / 2)
}

/// `max(⌊(S−1)/2⌋, 1)`.
pub fn default_sparsity(horizon: usize) -> usize {
    (horizon.saturating_sub(1) / 2).max(1)
}

/// Geometric grid of `points` values from `lo` to `hi`.
pub fn geometric_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![hi];
    }
    let ratio = (hi / lo).ln() / (points - 1) as f64;
    (0..points).map(|i| lo * (ratio * i as f64).exp()).collect()
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn check_sorted<T: PartialOrd + Copy>(name: &str, grid: &Option<Vec<T>>) -> Result<()> {
    if let Some(g) = grid {
        if g.is_empty() {
            return Err(config_err(format!("{name} must be nonempty")));
        }
        if g.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(config_err(format!("{name} must be sorted strictly ascending")));
        }
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn new(scenario: Scenario) -> Self {
        serde_json::from_value(serde_json::json!({ "scenario": scenario }))
            .expect("defaults form a valid config")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        Ok(cfg)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_err(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Configured seed, else `$TOEPLITZ_SEED`, else a fixed default.
    pub fn seed(&self) -> Result<u64> {
        if let Some(s) = self.master_seed {
            return Ok(s);
        }
        match std::env::var(SEED_ENV) {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| config_err(format!("{SEED_ENV} must be an unsigned integer, got '{v}'"))),
            Err(_) => Ok(DEFAULT_SEED),
        }
    }

    /// Configured `S`, else [`default_horizon`] of `p`.
    pub fn horizon_for(&self, p: usize) -> Result<usize> {
        let horizon = self.horizon.unwrap_or_else(|| default_horizon(p));
        check_horizon(p, horizon).map_err(|e| config_err(e.to_string()))?;
        Ok(horizon)
    }

    /// Configured `s`, else [`default_sparsity`] of `S`.
    pub fn sparsity_for(&self, horizon: usize) -> Result<usize> {
        let s = self.sparsity.unwrap_or_else(|| default_sparsity(horizon));
        if s == 0 || s > horizon {
            return Err(config_err(format!("s = {s} must satisfy 1 <= s <= S = {horizon}")));
        }
        Ok(s)
    }

    /// Alternatives for a kind use random signs unless the kind is
    /// one-sided; `two_sided` overrides.
    pub fn two_sided_for(&self, kind: TestKind) -> bool {
        self.two_sided.unwrap_or(kind.is_absolute())
    }

    pub fn n_grid(&self) -> Vec<usize> {
        self.n_grid.clone().unwrap_or_else(|| match self.scenario {
            Scenario::SelectionRisk => vec![50, 100, 500, 1000],
            Scenario::VerifyConcentration => vec![10, 50],
            _ => vec![self.n],
        })
    }

    pub fn p_grid(&self) -> Vec<usize> {
        self.p_grid.clone().unwrap_or_else(|| match self.scenario {
            Scenario::MaPower => vec![4, 8, 16, 32, 64],
            Scenario::VerifyConcentration => vec![20, 50],
            _ => vec![self.p],
        })
    }

    pub fn phi_grid(&self) -> Vec<f64> {
        self.phi_grid.clone().unwrap_or_else(|| (0..10).map(|i| f64::from(i) / 10.0).collect())
    }

    /// True sparsity levels swept by the MS-vs-HS comparison.
    pub fn s_grid(&self) -> Vec<usize> {
        self.s_grid.clone().unwrap_or_else(|| vec![1, 2])
    }

    /// Scan sizes of the aggregated HS test, default `{2, S}`.
    pub fn aggregate_grid(&self, horizon: usize) -> Vec<usize> {
        self.aggregate_grid.clone().unwrap_or_else(|| {
            if horizon > 2 { vec![2, horizon] } else { (1..=horizon).collect() }
        })
    }

    pub fn u_grid(&self) -> Vec<f64> {
        self.u_grid.clone().unwrap_or_else(|| vec![2.0, 4.0, 8.0])
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.p == 0 {
            return Err(config_err("n and p must be at least 1"));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(config_err(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        if self.replications == 0 {
            return Err(config_err("R must be at least 1"));
        }
        if self.grid_points == 0 {
            return Err(config_err("grid_points must be at least 1"));
        }
        if self.kinds.is_empty() {
            return Err(config_err("kinds must be nonempty"));
        }
        if !(self.k_split > 0.0 && self.k_split < 1.0) {
            return Err(config_err(format!("K must lie in (0, 1), got {}", self.k_split)));
        }
        if !(self.signal_factor > 0.0) {
            return Err(config_err("signal_factor must be positive"));
        }
        if self.threads == Some(0) {
            return Err(config_err("threads must be at least 1"));
        }
        check_sorted("sigma_grid", &self.sigma_grid)?;
        check_sorted("phi_grid", &self.phi_grid)?;
        check_sorted("n_grid", &self.n_grid)?;
        check_sorted("p_grid", &self.p_grid)?;
        check_sorted("u_grid", &self.u_grid)?;
        check_sorted("s_grid", &self.s_grid)?;
        check_sorted("aggregate_grid", &self.aggregate_grid)?;
        if let Some(g) = &self.sigma_grid {
            if g[0] < 0.0 {
                return Err(config_err("sigma_grid values must be nonnegative"));
            }
        }
        if let Some(g) = &self.phi_grid {
            if g.iter().any(|phi| !(phi.abs() < 1.0)) {
                return Err(config_err("phi_grid values must satisfy |phi| < 1"));
            }
        }
        if self.n_grid.as_ref().is_some_and(|g| g[0] == 0) {
            return Err(config_err("n_grid values must be at least 1"));
        }
        self.seed()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        assert_eq!(default_horizon(100), 10);
        assert_eq!(default_horizon(10), 3);
        assert_eq!(default_horizon(4), 1);
        assert_eq!(default_horizon(1000), 31);
        assert_eq!(default_sparsity(10), 4);
        assert_eq!(default_sparsity(3), 1);
        assert_eq!(default_sparsity(1), 1);
        let cfg = ExperimentConfig::new(Scenario::PowerCurve);
        assert_eq!((cfg.n, cfg.p, cfg.alpha, cfg.replications), (100, 100, 0.1, 5000));
        assert_eq!(cfg.horizon_for(100).unwrap(), 10);
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"scenario":"power_curve","S":5,"s":2,"R":100,"kinds":["ms+","hs"],
            "placement":"far","sigma_grid":[0.01,0.1],"master_seed":3}"#;
        let cfg = ExperimentConfig::from_json(text).unwrap();
        assert_eq!(cfg.horizon, Some(5));
        assert_eq!(cfg.kinds, vec![TestKind::MsPlus, TestKind::Hs]);
        let again = ExperimentConfig::from_json(&cfg.to_json()).unwrap();
        assert_eq!(cfg, again);
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(ExperimentConfig::from_json(r#"{"scenario":"power_curve","bogus":1}"#).is_err());
        let mut cfg = ExperimentConfig::new(Scenario::PowerCurve);
        cfg.sigma_grid = Some(vec![0.2, 0.1]);
        assert!(cfg.validate().is_err());
        cfg.sigma_grid = None;
        cfg.alpha = 1.5;
        assert!(cfg.validate().is_err());
        let cfg = ExperimentConfig { horizon: Some(50), ..ExperimentConfig::new(Scenario::Type1) };
        assert!(cfg.horizon_for(100).is_err());
    }

    #[test]
    fn geometric_grid_endpoints() {
        let g = geometric_grid(0.01, 1.0, 5);
        assert!((g[0] - 0.01).abs() < 1e-15 && (g[4] - 1.0).abs() < 1e-12);
        assert!((g[2] - 0.1).abs() < 1e-12);
    }
}
