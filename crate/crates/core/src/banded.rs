//! Square band matrices and their LU factorization with partial pivoting.
//!
//! Storage is diagonal-offset band storage: storage row `r` holds the
//! diagonal with offset `r - lower_bw`, indexed by matrix row, so entry
//! `(i, j)` lives at `data[(j + lower_bw - i) * order + i]`.

use crate::error::{Error, Result};

/// Relative pivot tolerance, scaled by the largest absolute entry of the
/// original row the pivot comes from.
pub const PIVOT_TOLERANCE: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq)]
pub struct BandedMatrix {
    order: usize,
    lower_bw: usize,
    upper_bw: usize,
    data: Vec<f64>,
}

impl BandedMatrix {
    pub fn zeros(order: usize, lower_bw: usize, upper_bw: usize) -> Self {
        Self {
            order,
            lower_bw,
            upper_bw,
            data: vec![0.0; (lower_bw + upper_bw + 1) * order],
        }
    }

    pub fn identity(order: usize) -> Self {
        let mut m = Self::zeros(order, 0, 0);
        m.data.iter_mut().for_each(|x| *x = 1.0);
        m
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn lower_bw(&self) -> usize {
        self.lower_bw
    }

    pub fn upper_bw(&self) -> usize {
        self.upper_bw
    }

    /// Raw band storage, `(lower_bw + upper_bw + 1) * order` values.
    pub fn band(&self) -> &[f64] {
        &self.data
    }

    fn in_band(&self, i: usize, j: usize) -> bool {
        i < self.order && j < self.order && j + self.lower_bw >= i && j <= i + self.upper_bw
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if self.in_band(i, j) {
            self.data[(j + self.lower_bw - i) * self.order + i]
        } else {
            0.0
        }
    }

    /// Sets an entry inside the band. Writing a nonzero outside the band is
    /// a shape error.
    pub fn set(&mut self, i: usize, j: usize, value: f64) -> Result<()> {
        if !self.in_band(i, j) {
            if value == 0.0 && i < self.order && j < self.order {
                return Ok(());
            }
            return Err(Error::ShapeError(format!(
                "entry ({}, {}) lies outside band ({}, {}) of order {}",
                i, j, self.lower_bw, self.upper_bw, self.order
            )));
        }
        self.data[(j + self.lower_bw - i) * self.order + i] = value;
        Ok(())
    }

    /// Column range `[lo, hi]` of the band in row `i`.
    pub fn row_band(&self, i: usize) -> (usize, usize) {
        (
            i.saturating_sub(self.lower_bw),
            (i + self.upper_bw).min(self.order - 1),
        )
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..self.order)
            .map(|i| (0..self.order).map(|j| self.get(i, j)).collect())
            .collect()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.order)
            .map(|i| {
                let (lo, hi) = self.row_band(i);
                (lo..=hi).map(|j| self.get(i, j) * x[j]).sum()
            })
            .collect()
    }

    #[cfg(test)]
    fn max_row_sum(&self) -> f64 {
        (0..self.order)
            .map(|i| {
                let (lo, hi) = self.row_band(i);
                (lo..=hi).map(|j| self.get(i, j).abs()).sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    fn row_max(&self, i: usize) -> f64 {
        let (lo, hi) = self.row_band(i);
        (lo..=hi).map(|j| self.get(i, j).abs()).fold(0.0, f64::max)
    }

    pub fn factor(&self) -> Result<BandedLu> {
        banded_lu_factor(self)
    }
}

/// Largest number of nonzeros in any row and the observed lower and upper
/// bandwidths, counting only entries with nonzero magnitude.
pub fn bandwidth_profile(m: &BandedMatrix) -> (usize, usize, usize) {
    let mut max_nnz = 0;
    let mut lower = 0;
    let mut upper = 0;
    for i in 0..m.order {
        let (lo, hi) = m.row_band(i);
        let mut nnz = 0;
        for j in lo..=hi {
            if m.get(i, j) != 0.0 {
                nnz += 1;
                if j < i {
                    lower = lower.max(i - j);
                } else {
                    upper = upper.max(j - i);
                }
            }
        }
        max_nnz = max_nnz.max(nnz);
    }
    (max_nnz, lower, upper)
}

/// LU factors of a band matrix. Row interchanges widen the upper band of
/// `U` to `lower_bw + upper_bw`; the multipliers of each elimination step
/// are kept separately, LAPACK `gbtrf` style.
#[derive(Debug, Clone)]
pub struct BandedLu {
    order: usize,
    lower_bw: usize,
    width: usize,
    // row-major window per row: entry (i, j) at i * width + (j + lower_bw - i)
    work: Vec<f64>,
    multipliers: Vec<f64>,
    pivots: Vec<usize>,
}

/// In-band LU factorization with partial pivoting.
pub fn banded_lu_factor(m: &BandedMatrix) -> Result<BandedLu> {
    let n = m.order;
    let kl = m.lower_bw;
    let ku = m.upper_bw + kl;
    let width = 2 * kl + m.upper_bw + 1;
    let mut work = vec![0.0; n * width];
    for i in 0..n {
        let (lo, hi) = m.row_band(i);
        for j in lo..=hi {
            work[i * width + j + kl - i] = m.get(i, j);
        }
    }
    let idx = |i: usize, j: usize| i * width + j + kl - i;
    // per-row scales follow their rows through interchanges, so rows of very
    // different magnitude (the boundary rows of the spline system grow like
    // 1/h^2) do not mask or fake a small pivot
    let mut scale: Vec<f64> = (0..n).map(|i| m.row_max(i)).collect();
    let mut multipliers = vec![0.0; n * kl];
    let mut pivots = vec![0; n];

    for k in 0..n {
        let last = (k + kl).min(n - 1);
        let right = (k + ku).min(n - 1);
        let mut p = k;
        let mut best = work[idx(k, k)].abs();
        for i in k + 1..=last {
            let v = work[idx(i, k)].abs();
            if v > best {
                best = v;
                p = i;
            }
        }
        let tolerance = PIVOT_TOLERANCE * scale[p];
        if best <= tolerance || !best.is_finite() {
            return Err(Error::SingularMatrix {
                column: k,
                pivot: best,
                tolerance,
            });
        }
        pivots[k] = p;
        if p != k {
            scale.swap(k, p);
            for j in k..=right {
                work.swap(idx(k, j), idx(p, j));
            }
        }
        let diag = work[idx(k, k)];
        for i in k + 1..=last {
            let l = work[idx(i, k)] / diag;
            work[idx(i, k)] = 0.0;
            multipliers[k * kl + (i - k - 1)] = l;
            if l != 0.0 {
                for j in k + 1..=right {
                    work[idx(i, j)] -= l * work[idx(k, j)];
                }
            }
        }
    }
    Ok(BandedLu {
        order: n,
        lower_bw: kl,
        width,
        work,
        multipliers,
        pivots,
    })
}

impl BandedLu {
    pub fn order(&self) -> usize {
        self.order
    }

    /// Upper bandwidth of the `U` factor.
    pub fn upper_bw(&self) -> usize {
        self.width - self.lower_bw - 1
    }

    fn u(&self, i: usize, j: usize) -> f64 {
        self.work[i * self.width + j + self.lower_bw - i]
    }

    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [f64]) -> Result<()> {
        let n = self.order;
        if b.len() != n {
            return Err(Error::ShapeError(format!(
                "right-hand side has length {}, matrix order is {}",
                b.len(),
                n
            )));
        }
        let kl = self.lower_bw;
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                b.swap(k, p);
            }
            let bk = b[k];
            if bk != 0.0 {
                let last = (k + kl).min(n - 1);
                let ls = &self.multipliers[k * kl..k * kl + (last - k)];
                for (bi, l) in b[k + 1..=last].iter_mut().zip(ls) {
                    *bi -= l * bk;
                }
            }
        }
        let ku = self.upper_bw();
        for i in (0..n).rev() {
            let last = (i + ku).min(n - 1);
            let mut s = b[i];
            for (j, bj) in b.iter().enumerate().take(last + 1).skip(i + 1) {
                s -= self.u(i, j) * bj;
            }
            b[i] = s / self.u(i, i);
        }
        Ok(())
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x)?;
        Ok(x)
    }

    /// Solves against several right-hand sides stored column after column
    /// (`order` values each).
    pub fn solve_columns(&self, columns: &mut [f64]) -> Result<()> {
        if self.order == 0 || !columns.len().is_multiple_of(self.order) {
            return Err(Error::ShapeError(format!(
                "{} values do not form columns of length {}",
                columns.len(),
                self.order
            )));
        }
        columns
            .chunks_mut(self.order)
            .try_for_each(|col| self.solve_in_place(col))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};
    use proptest::prelude::*;

    fn dense_solve(m: &BandedMatrix, b: &[f64]) -> Vec<f64> {
        let n = m.order();
        let a = DMatrix::from_fn(n, n, |i, j| m.get(i, j));
        a.lu()
            .solve(&DVector::from_column_slice(b))
            .unwrap()
            .iter()
            .copied()
            .collect()
    }

    #[test]
    fn identity_factors_trivially() {
        let m = BandedMatrix::identity(10);
        let lu = m.factor().unwrap();
        for i in 0..10 {
            assert_eq!(lu.pivots[i], i);
            assert_eq!(lu.u(i, i), 1.0);
        }
        assert!(lu.multipliers.is_empty());
        let b: Vec<f64> = (0..10).map(|i| i as f64).collect();
        assert_eq!(lu.solve(&b).unwrap(), b);
        assert_eq!(bandwidth_profile(&BandedMatrix::identity(5)), (1, 0, 0));
    }

    #[test]
    fn set_outside_band_rejected() {
        let mut m = BandedMatrix::zeros(5, 1, 1);
        assert!(m.set(0, 2, 1.0).is_err());
        assert!(m.set(0, 2, 0.0).is_ok());
        m.set(3, 2, 4.0).unwrap();
        assert_eq!(m.get(3, 2), 4.0);
        assert_eq!(m.get(4, 0), 0.0);
    }

    #[test]
    fn pivoting_handles_zero_diagonal() {
        // [[0, 1], [1, 0]]
        let mut m = BandedMatrix::zeros(2, 1, 1);
        m.set(0, 1, 1.0).unwrap();
        m.set(1, 0, 1.0).unwrap();
        let x = m.factor().unwrap().solve(&[2.0, 3.0]).unwrap();
        assert_eq!(x, vec![3.0, 2.0]);
    }

    #[test]
    fn singular_detected() {
        let mut m = BandedMatrix::zeros(3, 1, 1);
        m.set(0, 0, 1.0).unwrap();
        m.set(0, 1, 1.0).unwrap();
        m.set(1, 0, 1.0).unwrap();
        m.set(1, 1, 1.0).unwrap();
        m.set(2, 2, 1.0).unwrap();
        assert!(matches!(
            m.factor(),
            Err(Error::SingularMatrix { column: 1, .. })
        ));
    }

    #[test]
    fn row_scaling_does_not_fake_singularity() {
        // tridiagonal [1 1 0; 1 2 1; 0 1 2] with the first row scaled by 1e16
        let mut m = BandedMatrix::zeros(3, 1, 1);
        let entries = [
            (0, 0, 1e16),
            (0, 1, 1e16),
            (1, 0, 1.0),
            (1, 1, 2.0),
            (1, 2, 1.0),
            (2, 1, 1.0),
            (2, 2, 2.0),
        ];
        for (i, j, v) in entries {
            m.set(i, j, v).unwrap();
        }
        let x = m.factor().unwrap().solve(&[2e16, 4.0, 3.0]).unwrap();
        for v in x {
            assert!((v - 1.0).abs() < 1e-12);
        }
        // the same scaling on a singular matrix is still caught; pivoting
        // defers the zero pivot to the last column
        m.set(1, 1, 1.0).unwrap();
        m.set(1, 2, 0.0).unwrap();
        assert!(matches!(
            m.factor(),
            Err(Error::SingularMatrix { column: 2, .. })
        ));
    }

    #[test]
    fn wrong_rhs_length() {
        let lu = BandedMatrix::identity(3).factor().unwrap();
        assert!(lu.solve(&[1.0]).is_err());
        assert!(lu.solve_columns(&mut [1.0; 4]).is_err());
    }

    fn random_banded() -> impl Strategy<Value = (BandedMatrix, Vec<f64>)> {
        (1usize..200, 0usize..4, 0usize..4).prop_flat_map(|(n, kl, ku)| {
            let len = (kl + ku + 1) * n;
            (
                prop::collection::vec(-1.0f64..1.0, len),
                prop::collection::vec(-1.0f64..1.0, n),
            )
                .prop_map(move |(vals, b)| {
                    let mut m = BandedMatrix::zeros(n, kl, ku);
                    let mut it = vals.into_iter();
                    for i in 0..n {
                        let (lo, hi) = m.row_band(i);
                        for j in lo..=hi {
                            m.set(i, j, it.next().unwrap()).unwrap();
                        }
                    }
                    (m, b)
                })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]
        #[test]
        fn banded_solve_matches_dense((m, b) in random_banded()) {
            let Ok(lu) = m.factor() else { return Ok(()); };
            let x = lu.solve(&b).unwrap();
            let r = m.mul_vec(&x);
            let res = r.iter().zip(&b).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            let xn = x.iter().map(|v| v.abs()).fold(0.0, f64::max);
            let scale = m.max_row_sum() * xn + b.iter().map(|v| v.abs()).fold(0.0, f64::max);
            prop_assert!(res <= 1e-9 * scale, "residual {} scale {}", res, scale);
            let y = dense_solve(&m, &b);
            let cond_guard = y.iter().map(|v| v.abs()).fold(0.0, f64::max);
            // only compare solutions when the system is reasonably conditioned
            if cond_guard < 1e6 {
                for (u, v) in x.iter().zip(&y) {
                    prop_assert!((u - v).abs() <= 1e-6 * (1.0 + cond_guard));
                }
            }
        }
    }
}
