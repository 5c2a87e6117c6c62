//! Toeplitz covariance specifications, sparse alternatives and the
//! lag-functional matrices `A_W`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::BandedCholesky;

/// Relative Cholesky pivot tolerance, scaled by `σ_0`.
pub const PD_PIVOT_TOLERANCE: f64 = 1e-10;

/// A `p × p` Toeplitz covariance given by its diagonals `(σ_0, …, σ_{p−1})`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ToeplitzSpec {
    diagonals: Vec<f64>,
}

impl ToeplitzSpec {
    /// Validates `σ_0 > 0`, finiteness and `|σ_k| ≤ σ_0`.
    pub fn new(diagonals: Vec<f64>) -> Result<Self> {
        let Some(&sigma0) = diagonals.first() else {
            return Err(invalid("a Toeplitz spec needs p >= 1 diagonals"));
        };
        if !(sigma0 > 0.0 && sigma0.is_finite()) {
            return Err(invalid(format!("sigma0 must be positive and finite, got {sigma0}")));
        }
        if let Some((k, v)) = diagonals
            .iter()
            .enumerate()
            .skip(1)
            .find(|(_, v)| !v.is_finite() || v.abs() > sigma0)
        {
            return Err(invalid(format!("|sigma_{k}| = {v} exceeds sigma0 = {sigma0}")));
        }
        Ok(Self { diagonals })
    }

    pub fn identity(p: usize) -> Self {
        assert!(p >= 1, "dimension must be at least 1");
        let mut diagonals = vec![0.0; p];
        diagonals[0] = 1.0;
        Self { diagonals }
    }

    /// Identity scaled to `σ_0` with the given lags set; all other lags are 0.
    pub fn with_lags(p: usize, sigma0: f64, lags: &[(usize, f64)]) -> Result<Self> {
        if p == 0 {
            return Err(invalid("dimension must be at least 1"));
        }
        let mut diagonals = vec![0.0; p];
        diagonals[0] = sigma0;
        for &(j, v) in lags {
            if j == 0 || j >= p {
                return Err(invalid(format!("lag {j} outside 1..{p}")));
            }
            diagonals[j] = v;
        }
        Self::new(diagonals)
    }

    pub fn dim(&self) -> usize {
        self.diagonals.len()
    }

    pub fn sigma0(&self) -> f64 {
        self.diagonals[0]
    }

    pub fn lag(&self, k: usize) -> f64 {
        self.diagonals[k]
    }

    pub fn diagonals(&self) -> &[f64] {
        &self.diagonals
    }

    /// Largest lag with a nonzero entry (0 for a diagonal matrix).
    pub fn bandwidth(&self) -> usize {
        self.diagonals.iter().rposition(|v| *v != 0.0).unwrap_or(0)
    }

    pub fn is_identity(&self) -> bool {
        self.sigma0() == 1.0 && self.bandwidth() == 0
    }

    /// The same spec divided by `σ_0`, i.e. its correlation form.
    pub fn normalized(&self) -> Self {
        let s0 = self.sigma0();
        Self { diagonals: self.diagonals.iter().map(|v| v / s0).collect() }
    }

    /// Dense `p × p` matrix with entry `(i, j) = σ_{|i−j|}`.
    pub fn densify(&self) -> Vec<Vec<f64>> {
        let p = self.dim();
        (0..p)
            .map(|i| (0..p).map(|j| self.diagonals[i.abs_diff(j)]).collect())
            .collect()
    }

    pub(crate) fn cholesky(&self) -> Result<BandedCholesky> {
        let d = &self.diagonals;
        BandedCholesky::factor(
            self.dim(),
            self.bandwidth(),
            |i, j| d[i - j],
            PD_PIVOT_TOLERANCE * self.sigma0(),
        )
        .map_err(|pivot| {
            Error::NotPositiveDefinite(format!(
                "Cholesky pivot {pivot} of the {p}x{p} Toeplitz matrix is not above {tol:e}",
                p = self.dim(),
                tol = PD_PIVOT_TOLERANCE * self.sigma0()
            ))
        })
    }

    /// True iff Cholesky succeeds with every pivot above `1e−10 · σ_0`.
    pub fn is_positive_definite(&self) -> bool {
        self.cholesky().is_ok()
    }
}

impl TryFrom<Vec<f64>> for ToeplitzSpec {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<ToeplitzSpec> for Vec<f64> {
    fn from(s: ToeplitzSpec) -> Self {
        s.diagonals
    }
}

/// Where the `s` signal lags sit inside `{1, …, S}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Placement {
    /// Uniform without replacement.
    #[default]
    Random,
    /// `{1, …, s}`.
    NearDiagonal,
    /// `{S − s + 1, …, S}`.
    Far,
}

impl FromStr for Placement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "random" => Ok(Placement::Random),
            "near_diagonal" | "near" => Ok(Placement::NearDiagonal),
            "far" => Ok(Placement::Far),
            other => Err(Error::Config(format!("unknown placement '{other}'"))),
        }
    }
}

impl fmt::Display for Placement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Placement::Random => "random",
            Placement::NearDiagonal => "near_diagonal",
            Placement::Far => "far",
        })
    }
}

/// A member of the sparse alternative class: `s` lags in `{1, …, S}` set to
/// `±σ`, every other lag zero, `σ_0 = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseAlternative {
    horizon: usize,
    sigma: f64,
    support: Vec<usize>,
    signs: Vec<i8>,
    spec: ToeplitzSpec,
}

/// Shared parameter checks for alternatives and procedures.
pub(crate) fn check_horizon(p: usize, horizon: usize) -> Result<()> {
    if horizon == 0 {
        return Err(invalid("horizon S must be at least 1"));
    }
    if 2 * horizon >= p {
        return Err(invalid(format!("horizon S = {horizon} must satisfy S < p/2 with p = {p}")));
    }
    Ok(())
}

impl SparseAlternative {
    /// Builds the alternative with an explicit support (lags in `1..=S`) and
    /// signs (`±1`, one per lag).
    pub fn new(
        p: usize,
        horizon: usize,
        sigma: f64,
        mut support: Vec<usize>,
        signs: Vec<i8>,
    ) -> Result<Self> {
        check_horizon(p, horizon)?;
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(invalid(format!("signal level sigma must be positive, got {sigma}")));
        }
        if support.is_empty() || support.len() > horizon {
            return Err(invalid(format!(
                "sparsity s = {} must satisfy 1 <= s <= S = {horizon}",
                support.len()
            )));
        }
        if signs.len() != support.len() {
            return Err(Error::LengthMismatch { expected: support.len(), actual: signs.len() });
        }
        if signs.iter().any(|&e| e != 1 && e != -1) {
            return Err(invalid("signs must be +1 or -1"));
        }
        let mut pairs: Vec<(usize, i8)> = support.drain(..).zip(signs).collect();
        pairs.sort_unstable_by_key(|&(j, _)| j);
        if pairs.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(invalid("support lags must be distinct"));
        }
        if let Some(&(j, _)) = pairs.iter().find(|&&(j, _)| j == 0 || j > horizon) {
            return Err(invalid(format!("support lag {j} outside 1..={horizon}")));
        }
        let lags: Vec<(usize, f64)> = pairs.iter().map(|&(j, e)| (j, f64::from(e) * sigma)).collect();
        let spec = ToeplitzSpec::with_lags(p, 1.0, &lags)?;
        spec.cholesky()?;
        let (support, signs) = pairs.into_iter().unzip();
        Ok(Self { horizon, sigma, support, signs, spec })
    }

    /// Draws the support according to `placement` and, when `two_sided`, an
    /// independent uniform sign per lag.
    pub fn generate<R: Rng + ?Sized>(
        p: usize,
        sparsity: usize,
        horizon: usize,
        sigma: f64,
        placement: Placement,
        two_sided: bool,
        rng: &mut R,
    ) -> Result<Self> {
        check_horizon(p, horizon)?;
        if sparsity == 0 || sparsity > horizon {
            return Err(invalid(format!(
                "sparsity s = {sparsity} must satisfy 1 <= s <= S = {horizon}"
            )));
        }
        let support: Vec<usize> = match placement {
            Placement::NearDiagonal => (1..=sparsity).collect(),
            Placement::Far => (horizon - sparsity + 1..=horizon).collect(),
            Placement::Random => {
                let mut v: Vec<usize> = rand::seq::index::sample(rng, horizon, sparsity)
                    .into_iter()
                    .map(|i| i + 1)
                    .collect();
                v.sort_unstable();
                v
            }
        };
        let signs = if two_sided {
            (0..sparsity).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect()
        } else {
            vec![1; sparsity]
        };
        Self::new(p, horizon, sigma, support, signs)
    }

    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    pub fn sparsity(&self) -> usize {
        self.support.len()
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn is_one_sided(&self) -> bool {
        self.signs.iter().all(|&e| e == 1)
    }

    pub fn spec(&self) -> &ToeplitzSpec {
        &self.spec
    }

    /// Support indicator `η` over lags `1..=S`.
    pub fn eta(&self) -> Vec<u8> {
        let mut eta = vec![0; self.horizon];
        for &j in &self.support {
            eta[j - 1] = 1;
        }
        eta
    }

    /// `Σ_j |σ_j| = s σ`.
    pub fn separation(&self) -> f64 {
        self.sparsity() as f64 * self.sigma
    }
}

/// `A_W = Σ_{j∈W} A_j` with `[A_j]_{kl} = 1(|k−l| = j) / (2(p−j))`, kept as
/// its lag set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionalMatrix {
    p: usize,
    lags: Vec<usize>,
}

impl FunctionalMatrix {
    pub fn new(p: usize, mut lags: Vec<usize>) -> Result<Self> {
        lags.sort_unstable();
        lags.dedup();
        if lags.is_empty() {
            return Err(invalid("lag set W must be nonempty"));
        }
        if let Some(&j) = lags.iter().find(|&&j| j == 0 || j >= p) {
            return Err(invalid(format!("lag {j} outside 1..{p}")));
        }
        Ok(Self { p, lags })
    }

    pub fn singleton(p: usize, lag: usize) -> Result<Self> {
        Self::new(p, vec![lag])
    }

    /// `A_{1:S}`.
    pub fn leading(p: usize, horizon: usize) -> Result<Self> {
        Self::new(p, (1..=horizon).collect())
    }

    pub fn dim(&self) -> usize {
        self.p
    }

    pub fn lags(&self) -> &[usize] {
        &self.lags
    }

    pub fn lag_count(&self) -> usize {
        self.lags.len()
    }

    pub fn weight(&self, lag: usize) -> f64 {
        1.0 / (2.0 * (self.p - lag) as f64)
    }

    pub fn entry(&self, k: usize, l: usize) -> f64 {
        let d = k.abs_diff(l);
        if self.lags.binary_search(&d).is_ok() {
            self.weight(d)
        } else {
            0.0
        }
    }

    pub fn nonzero_count(&self) -> usize {
        self.lags.iter().map(|&j| 2 * (self.p - j)).sum()
    }

    /// `‖A_W‖_F² = Σ_{j∈W} 1/(2(p−j))`.
    pub fn frobenius_norm_sq(&self) -> f64 {
        self.lags.iter().map(|&j| self.weight(j)).sum()
    }

    /// `Tr(A_W Σ) = Σ_{j∈W} σ_j` for a Toeplitz `Σ`.
    pub fn trace_with(&self, spec: &ToeplitzSpec) -> f64 {
        self.lags.iter().map(|&j| spec.lag(j)).sum()
    }

    /// `xᵀ A_W x = Σ_{j∈W} (1/(p−j)) Σ_i x_i x_{i+j}`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.p, "vector length must equal p");
        self.lags
            .iter()
            .map(|&j| {
                let s: f64 = x.iter().zip(&x[j..]).map(|(a, b)| a * b).sum();
                2.0 * self.weight(j) * s
            })
            .sum()
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..self.p).map(|k| (0..self.p).map(|l| self.entry(k, l)).collect()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn densify_identity_and_tridiagonal() {
        assert_eq!(ToeplitzSpec::identity(2).densify(), vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        let m = ToeplitzSpec::new(vec![1.0, 0.5, 0.0]).unwrap().densify();
        assert_eq!(m, vec![vec![1.0, 0.5, 0.0], vec![0.5, 1.0, 0.5], vec![0.0, 0.5, 1.0]]);
    }

    #[test]
    fn spec_validation() {
        assert!(ToeplitzSpec::new(vec![]).is_err());
        assert!(ToeplitzSpec::new(vec![0.0, 0.0]).is_err());
        assert!(ToeplitzSpec::new(vec![1.0, 1.5]).is_err());
        assert!(ToeplitzSpec::new(vec![1.0, f64::NAN]).is_err());
        assert!(ToeplitzSpec::new(vec![2.0, -2.0]).is_ok());
    }

    #[test]
    fn positive_definiteness() {
        assert!(ToeplitzSpec::identity(5).is_positive_definite());
        // eigenvalues 2.8, 0.1, 0.1
        assert!(ToeplitzSpec::new(vec![1.0, 0.9, 0.9]).unwrap().is_positive_definite());
        // leading 2x2 minor is singular
        assert!(!ToeplitzSpec::new(vec![1.0, 1.0, 0.0]).unwrap().is_positive_definite());
    }

    #[test]
    fn near_diagonal_and_far_placements() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = SparseAlternative::generate(10, 2, 4, 0.1, Placement::NearDiagonal, false, &mut rng)
            .unwrap();
        assert_eq!(a.support(), &[1, 2]);
        assert_eq!(a.spec().diagonals()[..5], [1.0, 0.1, 0.1, 0.0, 0.0]);
        let b = SparseAlternative::generate(10, 2, 4, 0.1, Placement::Far, false, &mut rng).unwrap();
        assert_eq!(b.support(), &[3, 4]);
        assert_eq!(b.eta(), vec![0, 0, 1, 1]);
    }

    #[test]
    fn generate_rejects_bad_parameters() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let r = |p, s, h, sig| {
            SparseAlternative::generate(p, s, h, sig, Placement::Random, false, &mut ChaCha8Rng::seed_from_u64(2))
        };
        assert!(matches!(r(10, 5, 4, 0.1), Err(Error::InvalidParameter(_))));
        assert!(matches!(r(10, 2, 5, 0.1), Err(Error::InvalidParameter(_))));
        assert!(matches!(r(10, 2, 4, 0.0), Err(Error::InvalidParameter(_))));
        assert!(matches!(r(10, 2, 4, -0.1), Err(Error::InvalidParameter(_))));
        let too_strong =
            SparseAlternative::generate(100, 4, 10, 0.9, Placement::Random, false, &mut rng);
        assert!(matches!(too_strong, Err(Error::NotPositiveDefinite(_))));
    }

    #[test]
    fn random_support_two_sided() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let a = SparseAlternative::generate(40, 3, 8, 0.05, Placement::Random, true, &mut rng)
                .unwrap();
            assert_eq!(a.sparsity(), 3);
            assert!(a.support().iter().all(|&j| (1..=8).contains(&j)));
            let nonzero: Vec<f64> =
                a.spec().diagonals()[1..].iter().copied().filter(|v| *v != 0.0).collect();
            assert_eq!(nonzero.len(), 3);
            assert!(nonzero.iter().all(|v| v.abs() == 0.05));
        }
    }

    #[test]
    fn functional_matrix_singleton_entries() {
        let a = FunctionalMatrix::singleton(7, 2).unwrap();
        assert_eq!(a.nonzero_count(), 10);
        let dense = a.to_dense();
        let nz: Vec<f64> = dense.iter().flatten().copied().filter(|v| *v != 0.0).collect();
        assert_eq!(nz.len(), 10);
        assert!(nz.iter().all(|v| *v == 1.0 / 10.0));
        assert!((0..7).all(|i| dense[i][i] == 0.0));
    }

    #[test]
    fn frobenius_matches_entry_count() {
        // W = {1}, p = 10: 18 entries of 1/18.
        let a = FunctionalMatrix::singleton(10, 1).unwrap();
        assert!((a.frobenius_norm_sq() - 1.0 / 18.0).abs() < 1e-15);
    }

    #[test]
    fn quadratic_form_matches_dense() {
        let a = FunctionalMatrix::new(6, vec![1, 3]).unwrap();
        let x = [0.5, -1.0, 2.0, 0.25, 1.5, -0.75];
        let d = a.to_dense();
        let dense: f64 = (0..6).map(|k| (0..6).map(|l| x[k] * d[k][l] * x[l]).sum::<f64>()).sum();
        assert!((a.quadratic_form(&x) - dense).abs() < 1e-13);
    }
}
