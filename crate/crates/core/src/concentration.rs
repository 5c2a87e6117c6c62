//! Sub-exponential concentration of lag functionals and the closed-form
//! thresholds derived from it.
//!
//! A centred variable `Z` is sub-exponential with parameters `(ν², b)` when
//! `E exp(tZ) ≤ exp(ν² t² / 2)` for `|t| ≤ 1/b`; then
//! `P[Z ≥ max(ν√u, b u)] ≤ exp(−u/2)`. For Gaussian samples,
//! `φ_A(Σ_n − Σ)` is sub-exponential with
//! `ν² = 2‖AΣ‖_F² / (n(1−K))` and `b = 2‖AΣ‖_∞ / (nK)` for any split
//! `K ∈ (0, 1)`. Every test threshold below instantiates this bound with
//! the norm bounds of [`norm_bounds`]; with the default `K = 1/2` they reduce
//! to the usual closed forms, e.g. `t_{MS+} = max(√(uS/D), 2uS/D)` with
//! `D = n(p − S)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use statrs::function::factorial::ln_binomial;

use crate::error::{invalid, Error, Result};
use crate::model::check_horizon;

pub const DEFAULT_SPLIT: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubExpParams {
    pub nu2: f64,
    pub b: f64,
}

impl SubExpParams {
    /// Zero parameters arise from a zero matrix; the variable is then
    /// identically zero and every positive threshold is trivially valid.
    pub fn is_degenerate(&self) -> bool {
        self.nu2 == 0.0 || self.b == 0.0
    }
}

fn check_split(k: f64) -> Result<()> {
    if k > 0.0 && k < 1.0 {
        Ok(())
    } else {
        Err(invalid(format!("split constant K must lie in (0, 1), got {k}")))
    }
}

/// `ν² = 2 frob2 / (n(1−K))`, `b = 2 op / (nK)`.
pub fn subexp_params(frob2: f64, op: f64, n: usize, k: f64) -> Result<SubExpParams> {
    check_split(k)?;
    if !(frob2 >= 0.0 && op >= 0.0) {
        return Err(invalid("norms must be nonnegative"));
    }
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    let n = n as f64;
    Ok(SubExpParams { nu2: 2.0 * frob2 / (n * (1.0 - k)), b: 2.0 * op / (n * k) })
}

/// `t_u = max(ν√u, b u)`, so that `P[Z ≥ t_u] ≤ exp(−u/2)`.
pub fn bernstein_threshold(params: SubExpParams, u: f64) -> Result<f64> {
    if !(u > 0.0) {
        return Err(invalid(format!("confidence parameter u must be positive, got {u}")));
    }
    Ok((params.nu2 * u).sqrt().max(params.b * u))
}

/// Whether a lag set lies below or above `p/2`; selects `𝒦 ∈ {1, p/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LagLocation {
    /// Every lag `j < p/2`.
    Early,
    /// Every lag `j ≥ p/2`.
    Late,
}

impl LagLocation {
    pub fn of(lags: &[usize], p: usize) -> Option<Self> {
        if lags.iter().all(|&j| 2 * j < p) {
            Some(Self::Early)
        } else if lags.iter().all(|&j| 2 * j >= p) {
            Some(Self::Late)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormBounds {
    /// Bound on the operator norm.
    pub op_bound: f64,
    /// Bound on the squared Frobenius norm.
    pub frob2_bound: f64,
    pub kappa: f64,
}

fn check_lag_count(w: usize, horizon: usize, p: usize) -> Result<()> {
    if w == 0 || w > horizon || horizon >= p {
        return Err(invalid(format!("need 1 <= w <= S < p, got w = {w}, S = {horizon}, p = {p}")));
    }
    Ok(())
}

/// Bounds on `‖A_W‖_∞` and `‖A_W‖_F²` alone: `w/(p−S)` and `w/(2(p−S))`.
pub fn functional_norm_bounds(w: usize, horizon: usize, p: usize) -> Result<NormBounds> {
    check_lag_count(w, horizon, p)?;
    let w = w as f64;
    let gap = (p - horizon) as f64;
    Ok(NormBounds { op_bound: w / gap, frob2_bound: w / (2.0 * gap), kappa: 1.0 })
}

/// Bounds on `‖A_W Σ‖_∞` and `‖A_W Σ‖_F²` for `Σ` with `s` nonzero lags.
///
/// `op ≤ σ_0 w(2s+1)/(p−S)`; `frob2 ≤ σ_0² 𝒦(2s+1)/(p−S)` for a singleton
/// `W`, `σ_0² w(2s+1)²/(2(p−S))` otherwise.
pub fn norm_bounds(
    w: usize,
    s: usize,
    horizon: usize,
    p: usize,
    sigma0: f64,
    singleton: bool,
    location: LagLocation,
) -> Result<NormBounds> {
    check_lag_count(w, horizon, p)?;
    if singleton && w != 1 {
        return Err(invalid("a singleton lag set has w = 1"));
    }
    if !(sigma0 > 0.0) {
        return Err(invalid("sigma0 must be positive"));
    }
    let kappa = match location {
        LagLocation::Early => 1.0,
        LagLocation::Late => p as f64 / 2.0,
    };
    let gap = (p - horizon) as f64;
    let spread = (2 * s + 1) as f64;
    let wf = w as f64;
    let frob2_bound = if singleton {
        sigma0 * sigma0 * kappa * spread / gap
    } else {
        sigma0 * sigma0 * wf * spread * spread / (2.0 * gap)
    };
    Ok(NormBounds { op_bound: sigma0 * wf * spread / gap, frob2_bound, kappa })
}

/// Threshold `t` with `P[φ_A(Σ_n − Σ) ≥ t] ≤ exp(−u/4)` from norm bounds:
/// the Bernstein threshold at `u/2` of [`subexp_params`].
pub fn tail_threshold(bounds: NormBounds, n: usize, k: f64, u: f64) -> Result<f64> {
    let params = subexp_params(bounds.frob2_bound, bounds.op_bound, n, k)?;
    bernstein_threshold(params, u / 2.0)
}

/// `max{√(u/(2(1−K))) √(w/D), (u/K) w/D}` with `D = n(p−S)`: the null tail
/// threshold for `φ_{A_W}(Σ_n − I_p)` at level `exp(−u/4)`.
pub fn functional_threshold(n: usize, p: usize, horizon: usize, w: f64, u: f64, k: f64) -> f64 {
    let d = (n * (p - horizon)) as f64;
    (u / (2.0 * (1.0 - k)) * w / d).sqrt().max(u / k * w / d)
}

/// Which procedure a closed-form threshold belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ThresholdKind {
    #[serde(rename = "ms+")]
    MsPlus,
    #[serde(rename = "ms")]
    Ms,
    #[serde(rename = "hs+")]
    HsPlus,
    #[serde(rename = "hs")]
    Hs,
    #[serde(rename = "selector")]
    Selector,
}

impl ThresholdKind {
    /// Smallest admissible `u` is exclusive: `u > 0` for MS+, `u > 1` else.
    pub fn min_u(self) -> f64 {
        match self {
            ThresholdKind::MsPlus => 0.0,
            _ => 1.0,
        }
    }

    pub fn default_u(self) -> f64 {
        match self {
            ThresholdKind::MsPlus => 8.0,
            _ => 2.0,
        }
    }

    pub fn needs_sparsity(self) -> bool {
        !matches!(self, ThresholdKind::MsPlus | ThresholdKind::Ms)
    }
}

impl fmt::Display for ThresholdKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ThresholdKind::MsPlus => "ms+",
            ThresholdKind::Ms => "ms",
            ThresholdKind::HsPlus => "hs+",
            ThresholdKind::Hs => "hs",
            ThresholdKind::Selector => "selector",
        })
    }
}

impl FromStr for ThresholdKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ms+" | "msplus" | "ms-plus" => Ok(Self::MsPlus),
            "ms" => Ok(Self::Ms),
            "hs+" | "hsplus" | "hs-plus" => Ok(Self::HsPlus),
            "hs" => Ok(Self::Hs),
            "selector" => Ok(Self::Selector),
            other => Err(Error::Config(format!("unknown threshold kind '{other}'"))),
        }
    }
}

/// Everything needed to evaluate a closed-form threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdSpec {
    pub kind: ThresholdKind,
    pub u: f64,
    pub k_split: f64,
    pub n: usize,
    pub p: usize,
    pub horizon: usize,
    pub sparsity: Option<usize>,
}

impl ThresholdSpec {
    /// Default `u` for the kind and `K = 1/2`.
    pub fn new(kind: ThresholdKind, n: usize, p: usize, horizon: usize) -> Self {
        Self { kind, u: kind.default_u(), k_split: DEFAULT_SPLIT, n, p, horizon, sparsity: None }
    }

    pub fn with_u(mut self, u: f64) -> Self {
        self.u = u;
        self
    }

    pub fn with_sparsity(mut self, s: usize) -> Self {
        self.sparsity = Some(s);
        self
    }

    pub fn with_split(mut self, k: f64) -> Self {
        self.k_split = k;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.u > self.kind.min_u()) || !self.u.is_finite() {
            return Err(invalid(format!(
                "u = {} must exceed {} for {}",
                self.u,
                self.kind.min_u(),
                self.kind
            )));
        }
        check_split(self.k_split)?;
        if self.n == 0 {
            return Err(invalid("n must be at least 1"));
        }
        check_horizon(self.p, self.horizon)?;
        if self.kind.needs_sparsity() {
            let s = self
                .sparsity
                .ok_or_else(|| invalid(format!("sparsity s is required for {}", self.kind)))?;
            if s == 0 || s > self.horizon {
                return Err(invalid(format!("s = {s} must satisfy 1 <= s <= S = {}", self.horizon)));
            }
            if self.kind == ThresholdKind::Selector && s >= self.horizon {
                return Err(invalid(format!(
                    "the selector needs s < S (log(S − s) is undefined), got s = {s}, S = {}",
                    self.horizon
                )));
            }
        }
        Ok(())
    }

    fn design(&self) -> f64 {
        (self.n * (self.p - self.horizon)) as f64
    }

    /// `max{√(u/(2(1−K))) √(w/D), (u/K) w/D}`.
    fn base(&self, u: f64, w: f64) -> f64 {
        let d = self.design();
        let k = self.k_split;
        (u / (2.0 * (1.0 - k)) * w / d).sqrt().max(u / k * w / d)
    }

    fn s(&self) -> usize {
        self.sparsity.unwrap_or(0)
    }

    fn ln_choose(&self) -> f64 {
        ln_binomial(self.horizon as u64, self.s() as u64)
    }
}

/// Closed-form threshold of the given kind.
///
/// With `K = 1/2` and `D = n(p−S)`:
/// MS+ `max(√(uS/D), 2uS/D)`;
/// MS `S max(√(4u log S/D), 8u log S/D)`;
/// HS+ `max(√(4us log C(S,s)/D), 8us log C(S,s)/D)`;
/// HS `s max(√(4u log(s C(S,s))/D), 8u log(s C(S,s))/D)`;
/// the selector kind returns [`selector_threshold`].
pub fn theoretical_threshold(spec: &ThresholdSpec) -> Result<f64> {
    spec.validate()?;
    let u = spec.u;
    let horizon = spec.horizon as f64;
    let s = spec.s() as f64;
    Ok(match spec.kind {
        ThresholdKind::MsPlus => spec.base(u, horizon),
        ThresholdKind::Ms => horizon * spec.base(4.0 * u * horizon.ln(), 1.0),
        ThresholdKind::HsPlus => spec.base(4.0 * u * spec.ln_choose(), s),
        ThresholdKind::Hs => s * spec.base(4.0 * u * (s.ln() + spec.ln_choose()), 1.0),
        ThresholdKind::Selector => {
            selector_threshold(spec.n, spec.p, spec.horizon, spec.s(), u)?
        }
    })
}

/// Smallest signal level `σ` at which the kind's risk bound is guaranteed.
///
/// MS+ `2(s+1)t/s`; MS `t + max(√(4(u−1)(2s+1) log S/D), 8(u−1)(2s+1) log S/D)`;
/// HS+ `(t + (2s+1) max(√(us/D), 2us/D))/s`;
/// HS `t + max(√(4(u−1) log(s(2s+1)C)/D), 8(u−1) log(s(2s+1)C)/D)`;
/// selector `2τ_n`.
pub fn separation_radius(spec: &ThresholdSpec) -> Result<f64> {
    if spec.sparsity.is_none() {
        return Err(invalid(format!("sparsity s is required for the {} separation radius", spec.kind)));
    }
    let t = theoretical_threshold(spec)?;
    let u = spec.u;
    let s = spec.s() as f64;
    let spread = 2.0 * s + 1.0;
    Ok(match spec.kind {
        ThresholdKind::MsPlus => 2.0 * (s + 1.0) / s * t,
        ThresholdKind::Ms => {
            t + spec.base(4.0 * (u - 1.0) * spread * (spec.horizon as f64).ln(), 1.0)
        }
        ThresholdKind::HsPlus => (t + spread * spec.base(u, s)) / s,
        ThresholdKind::Hs => {
            t + spec.base(4.0 * (u - 1.0) * (s.ln() + spread.ln() + spec.ln_choose()), 1.0)
        }
        ThresholdKind::Selector => 2.0 * t,
    })
}

/// Upper bound on type I + worst-case type II error (for the selector, on
/// the expected Hamming loss of the two-sided selector).
///
/// MS+ `2e^{−u/4}`; MS `4e^{−(u−1) log S}`; HS+ `e^{−(u−1) log C(S,s)} + e^{−u/4}`;
/// HS `4e^{−(u−1) log(s C(S,s))}`.
pub fn risk_bound(spec: &ThresholdSpec) -> Result<f64> {
    spec.validate()?;
    let u = spec.u;
    let s = spec.s() as f64;
    Ok(match spec.kind {
        ThresholdKind::MsPlus => 2.0 * (-u / 4.0).exp(),
        ThresholdKind::Ms => 4.0 * (-(u - 1.0) * (spec.horizon as f64).ln()).exp(),
        ThresholdKind::HsPlus => (-(u - 1.0) * spec.ln_choose()).exp() + (-u / 4.0).exp(),
        ThresholdKind::Hs => 4.0 * (-(u - 1.0) * (s.ln() + spec.ln_choose())).exp(),
        ThresholdKind::Selector => selector_risk_bound(spec.horizon, spec.s(), u, false)?,
    })
}

/// `τ_n = max{(√log s + √log(S−s)) √(u(2s+1)/D), 2u log(s(S−s)) (2s+1)/D}`
/// with `D = n(p−S)`; the log in the linear branch is clamped at 0.
pub fn selector_threshold(n: usize, p: usize, horizon: usize, s: usize, u: f64) -> Result<f64> {
    check_horizon(p, horizon)?;
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    if s == 0 || s >= horizon {
        return Err(invalid(format!("the selector needs 1 <= s < S, got s = {s}, S = {horizon}")));
    }
    if !(u > 1.0) {
        return Err(invalid(format!("u = {u} must exceed 1 for the selector")));
    }
    let d = (n * (p - horizon)) as f64;
    let spread = (2 * s + 1) as f64;
    let sf = s as f64;
    let rest = (horizon - s) as f64;
    let sqrt_branch = (sf.ln().sqrt() + rest.ln().sqrt()) * (u * spread / d).sqrt();
    let linear_branch = 2.0 * u * (sf * rest).ln().max(0.0) * spread / d;
    Ok(sqrt_branch.max(linear_branch))
}

/// `2e^{−(u−1) log(s)/4} + 2e^{−(u−1) log(S−s)/4}`, halved for the
/// one-sided selector.
pub fn selector_risk_bound(horizon: usize, s: usize, u: f64, one_sided: bool) -> Result<f64> {
    if s == 0 || s >= horizon {
        return Err(invalid(format!("the selector needs 1 <= s < S, got s = {s}, S = {horizon}")));
    }
    let factor = if one_sided { 1.0 } else { 2.0 };
    let a = (-(u - 1.0) * (s as f64).ln() / 4.0).exp();
    let b = (-(u - 1.0) * ((horizon - s) as f64).ln() / 4.0).exp();
    Ok(factor * (a + b))
}
