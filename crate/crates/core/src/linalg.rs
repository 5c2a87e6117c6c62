//! Banded Cholesky factorisation.
//!
//! A Toeplitz covariance whose last nonzero lag is `b` is a band matrix of
//! half-bandwidth `b`, and so is its lower Cholesky factor. Storing only the
//! band makes factorisation `O(p b²)` and each draw `L z` `O(p b)`; with
//! `b = p − 1` this is ordinary dense Cholesky.

#[derive(Debug, Clone)]
pub(crate) struct BandedCholesky {
    dim: usize,
    band: usize,
    // Row i holds L[i][i-band..=i], left-padded with zeros near the top.
    data: Vec<f64>,
}

impl BandedCholesky {
    /// Factor the symmetric matrix given by `entry(i, j)` (read for `j ≤ i`
    /// only). Fails with the index of the first pivot not exceeding
    /// `pivot_tol`.
    pub(crate) fn factor(
        dim: usize,
        band: usize,
        entry: impl Fn(usize, usize) -> f64,
        pivot_tol: f64,
    ) -> Result<Self, usize> {
        let band = band.min(dim.saturating_sub(1));
        let width = band + 1;
        let mut data = vec![0.0; dim * width];
        for i in 0..dim {
            let lo_i = i.saturating_sub(band);
            for j in lo_i..=i {
                let lo = lo_i.max(j.saturating_sub(band));
                let mut acc = entry(i, j);
                for k in lo..j {
                    acc -= data[i * width + k + band - i] * data[j * width + k + band - j];
                }
                if i == j {
                    if !(acc > pivot_tol) {
                        return Err(i);
                    }
                    data[i * width + band] = acc.sqrt();
                } else {
                    data[i * width + j + band - i] = acc / data[j * width + band];
                }
            }
        }
        Ok(Self { dim, band, data })
    }

    /// `out = L z`.
    pub(crate) fn mul_into(&self, z: &[f64], out: &mut [f64]) {
        debug_assert_eq!(z.len(), self.dim);
        debug_assert_eq!(out.len(), self.dim);
        let width = self.band + 1;
        for (i, o) in out.iter_mut().enumerate() {
            let lo = i.saturating_sub(self.band);
            let row = &self.data[i * width + lo + self.band - i..(i + 1) * width];
            *o = row.iter().zip(&z[lo..=i]).map(|(l, x)| l * x).sum();
        }
    }

    #[cfg(test)]
    pub(crate) fn get(&self, i: usize, j: usize) -> f64 {
        if j > i || i - j > self.band {
            0.0
        } else {
            self.data[i * (self.band + 1) + j + self.band - i]
        }
    }
}

#[cfg(test)]
#[allow(clippy::needless_range_loop)]
mod tests {
    use super::*;

    fn dense_entry(m: &[Vec<f64>]) -> impl Fn(usize, usize) -> f64 + '_ {
        move |i, j| m[i][j]
    }

    #[test]
    fn reproduces_matrix() {
        let m = vec![
            vec![4.0, 2.0, 0.0, 0.0],
            vec![2.0, 5.0, 1.0, 0.0],
            vec![0.0, 1.0, 3.0, 0.5],
            vec![0.0, 0.0, 0.5, 2.0],
        ];
        for band in [1, 3] {
            let l = BandedCholesky::factor(4, band, dense_entry(&m), 1e-12).unwrap();
            for i in 0..4 {
                for j in 0..4 {
                    let v: f64 = (0..4).map(|k| l.get(i, k) * l.get(j, k)).sum();
                    assert!((v - m[i][j]).abs() < 1e-12, "({i},{j})");
                }
            }
        }
    }

    #[test]
    fn rejects_singular() {
        let m = vec![vec![1.0, 1.0], vec![1.0, 1.0]];
        assert_eq!(BandedCholesky::factor(2, 1, dense_entry(&m), 1e-10).unwrap_err(), 1);
    }

    #[test]
    fn mul_matches_dense() {
        let m = vec![vec![2.0, 0.5, 0.1], vec![0.5, 2.0, 0.5], vec![0.1, 0.5, 2.0]];
        let l = BandedCholesky::factor(3, 2, dense_entry(&m), 1e-12).unwrap();
        let z = [0.3, -1.2, 0.7];
        let mut out = [0.0; 3];
        l.mul_into(&z, &mut out);
        for i in 0..3 {
            let v: f64 = (0..3).map(|k| l.get(i, k) * z[k]).sum();
            assert!((out[i] - v).abs() < 1e-14);
        }
    }
}
