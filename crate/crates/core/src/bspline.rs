//! Knot vectors and B-spline basis evaluation.
//!
//! Basis functions are evaluated with the Cox-de Boor recursion, restricted
//! to the at most `p + 1` functions that can be nonzero on the knot interval
//! containing the query point. Intervals are half-open `[t_i, t_{i+1})`,
//! except that the last nondegenerate interval is closed on the right so
//! that a clamped spline is interpolatory at both ends.

use crate::error::{Error, Result};

/// A non-decreasing sequence of knots together with the spline degree it
/// was built for.
#[derive(Debug, Clone, PartialEq)]
pub struct KnotVector {
    knots: Vec<f64>,
    degree: usize,
    clamped: bool,
}

/// Inclusive range of basis indices that may be nonzero at a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasisIndexRange {
    pub lo: usize,
    pub hi: usize,
}

impl BasisIndexRange {
    pub fn contains(&self, j: usize) -> bool {
        self.lo <= j && j <= self.hi
    }

    pub fn len(&self) -> usize {
        self.hi - self.lo + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn iter(&self) -> std::ops::RangeInclusive<usize> {
        self.lo..=self.hi
    }
}

impl KnotVector {
    /// Wraps an arbitrary knot sequence. Whether it is `(degree + 1)`-clamped
    /// is detected from the knots themselves.
    pub fn new(knots: Vec<f64>, degree: usize) -> Result<Self> {
        if knots.len() < degree + 2 {
            return Err(Error::TooFewNodes {
                needed: degree + 2,
                got: knots.len(),
            });
        }
        if knots.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidNodes("knots must be finite".into()));
        }
        if let Some(i) = knots.windows(2).position(|w| w[0] > w[1]) {
            return Err(Error::InvalidNodes(format!(
                "knots decrease at index {}: {} > {}",
                i,
                knots[i],
                knots[i + 1]
            )));
        }
        if knots[0] == knots[knots.len() - 1] {
            return Err(Error::InvalidNodes("knot span is empty".into()));
        }
        let clamped = is_clamped(&knots, degree);
        Ok(Self {
            knots,
            degree,
            clamped,
        })
    }

    /// Builds the `(degree + 1)`-clamped knot vector over strictly increasing
    /// `points`: both end points repeated `degree + 1` times, interior points
    /// used once.
    pub fn clamped(points: &[f64], degree: usize) -> Result<Self> {
        make_clamped_knots(points, degree)
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_clamped(&self) -> bool {
        self.clamped
    }

    pub fn len(&self) -> usize {
        self.knots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.knots.is_empty()
    }

    /// Number of basis functions of degree `p` over these knots.
    pub fn num_basis(&self, p: usize) -> usize {
        self.knots.len().saturating_sub(p + 1)
    }

    /// `(first knot, last knot)`.
    pub fn span(&self) -> (f64, f64) {
        (self.knots[0], self.knots[self.knots.len() - 1])
    }

    /// Index `k` of the knot interval `[t_k, t_{k+1})` containing `z`, with
    /// the last nondegenerate interval closed on the right.
    pub fn find_interval(&self, z: f64) -> Result<usize> {
        let (lo, hi) = self.span();
        if !(lo..=hi).contains(&z) {
            return Err(Error::DomainError { z, lo, hi });
        }
        let t = &self.knots;
        let m = t.len();
        let mut k = t.partition_point(|&x| x <= z) - 1;
        if k >= m - 1 {
            // z == last knot: step back to the last interval of positive length
            k = m - 2;
            while t[k] == t[k + 1] {
                k -= 1;
            }
        }
        Ok(k)
    }

    fn check_degree(&self, p: usize) -> Result<()> {
        if p + 2 > self.knots.len() {
            return Err(Error::IndexError { index: 0, count: 0 });
        }
        Ok(())
    }
}

fn is_clamped(knots: &[f64], p: usize) -> bool {
    let m = knots.len();
    if m < 2 * (p + 1) {
        return false;
    }
    let (a, b) = (knots[0], knots[m - 1]);
    let ends = knots[..=p].iter().all(|&t| t == a) && knots[m - p - 1..].iter().all(|&t| t == b);
    let interior = &knots[p..m - p];
    ends && interior.windows(2).all(|w| w[0] < w[1])
}

/// See [`KnotVector::clamped`].
pub fn make_clamped_knots(points: &[f64], degree: usize) -> Result<KnotVector> {
    let n = points.len();
    if n <= degree || n < 2 {
        return Err(Error::TooFewNodes {
            needed: (degree + 1).max(2),
            got: n,
        });
    }
    if points.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidNodes("points must be finite".into()));
    }
    if let Some(i) = points.windows(2).position(|w| w[0] >= w[1]) {
        return Err(Error::InvalidNodes(format!(
            "points must be strictly increasing (index {}: {} >= {})",
            i,
            points[i],
            points[i + 1]
        )));
    }
    let mut knots = Vec::with_capacity(n + 2 * degree);
    knots.extend(std::iter::repeat_n(points[0], degree + 1));
    knots.extend_from_slice(&points[1..n - 1]);
    knots.extend(std::iter::repeat_n(points[n - 1], degree + 1));
    Ok(KnotVector {
        knots,
        degree,
        clamped: true,
    })
}

/// Values `N_{k-p+r, p}(z)` for `r = 0..=p`, where `k` is the knot interval of
/// `z`. Entries whose index would fall outside the knot vector are zero.
fn interval_basis(knots: &[f64], k: usize, p: usize, z: f64) -> Vec<f64> {
    let m = knots.len() as isize;
    let base = k as isize - p as isize;
    let mut n = vec![0.0; p + 1];
    n[p] = 1.0;
    for d in 1..=p {
        for r in (p - d)..=p {
            let i = base + r as isize;
            if i < 0 || i + d as isize + 1 > m - 1 {
                n[r] = 0.0;
                continue;
            }
            let i = i as usize;
            let mut v = 0.0;
            let left = if r > p - d { n[r] } else { 0.0 };
            let den = knots[i + d] - knots[i];
            if den != 0.0 && left != 0.0 {
                v += (z - knots[i]) / den * left;
            }
            let right = if r < p { n[r + 1] } else { 0.0 };
            let den = knots[i + d + 1] - knots[i + 1];
            if den != 0.0 && right != 0.0 {
                v += (knots[i + d + 1] - z) / den * right;
            }
            n[r] = v;
        }
    }
    n
}

/// Range of basis indices of degree `p` that can be nonzero at `z`.
pub fn active_basis_range(kv: &KnotVector, p: usize, z: f64) -> Result<BasisIndexRange> {
    kv.check_degree(p)?;
    let k = kv.find_interval(z)?;
    Ok(range_for_interval(kv, k, p))
}

fn range_for_interval(kv: &KnotVector, k: usize, p: usize) -> BasisIndexRange {
    BasisIndexRange {
        lo: k.saturating_sub(p),
        hi: k.min(kv.num_basis(p) - 1),
    }
}

/// The active range at `z` together with the basis values on it.
pub fn basis_row(kv: &KnotVector, p: usize, z: f64) -> Result<(BasisIndexRange, Vec<f64>)> {
    kv.check_degree(p)?;
    let k = kv.find_interval(z)?;
    let range = range_for_interval(kv, k, p);
    let vals = interval_basis(&kv.knots, k, p, z);
    let offset = range.lo + p - k;
    Ok((range, vals[offset..offset + range.len()].to_vec()))
}

/// `B_{j,p}(z)`.
pub fn basis_value(kv: &KnotVector, j: usize, p: usize, z: f64) -> Result<f64> {
    kv.check_degree(p)?;
    let count = kv.num_basis(p);
    if j >= count {
        return Err(Error::IndexError { index: j, count });
    }
    let k = kv.find_interval(z)?;
    if j > k || j + p < k {
        return Ok(0.0);
    }
    Ok(interval_basis(&kv.knots, k, p, z)[j + p - k])
}

/// Second derivatives of all basis functions of degree `p` in the active
/// range at `z`.
pub fn basis_second_derivative_row(
    kv: &KnotVector,
    p: usize,
    z: f64,
) -> Result<(BasisIndexRange, Vec<f64>)> {
    if p < 2 {
        return Err(Error::DegreeError { degree: p });
    }
    kv.check_degree(p)?;
    let k = kv.find_interval(z)?;
    let range = range_for_interval(kv, k, p);
    let low = interval_basis(&kv.knots, k, p - 2, z);
    let vals = range
        .iter()
        .map(|j| second_derivative_from_lower(&kv.knots, &low, k, j, p))
        .collect();
    Ok((range, vals))
}

/// `B''_{j,p}(z)`, from two applications of the degree-reduction derivative
/// identity. Terms with a zero knot difference in the denominator vanish.
pub fn basis_second_derivative(kv: &KnotVector, j: usize, p: usize, z: f64) -> Result<f64> {
    if p < 2 {
        return Err(Error::DegreeError { degree: p });
    }
    kv.check_degree(p)?;
    let count = kv.num_basis(p);
    if j >= count {
        return Err(Error::IndexError { index: j, count });
    }
    let k = kv.find_interval(z)?;
    if j > k || j + p < k {
        return Ok(0.0);
    }
    let low = interval_basis(&kv.knots, k, p - 2, z);
    Ok(second_derivative_from_lower(&kv.knots, &low, k, j, p))
}

fn second_derivative_from_lower(t: &[f64], low: &[f64], k: usize, j: usize, p: usize) -> f64 {
    let d = p - 2;
    // N_{i,p-2}(z); `low[r]` holds index k - d + r
    let lower = |i: usize| -> f64 {
        if i + d < k || i > k {
            0.0
        } else {
            low[i + d - k]
        }
    };
    let inv = |x: f64| if x == 0.0 { 0.0 } else { 1.0 / x };

    let a = inv(t[j + p] - t[j]);
    let b = inv(t[j + p + 1] - t[j + 1]);
    let d_j = (p - 1) as f64
        * (lower(j) * inv(t[j + p - 1] - t[j]) - lower(j + 1) * inv(t[j + p] - t[j + 1]));
    let d_j1 = (p - 1) as f64
        * (lower(j + 1) * inv(t[j + p] - t[j + 1]) - lower(j + 2) * inv(t[j + p + 1] - t[j + 2]));
    p as f64 * (a * d_j - b * d_j1)
}

/// Evaluates `sum_j coeffs[ch][j] * B_{j,p}(z)` for every channel.
pub fn eval_spline<C: AsRef<[f64]>>(
    coeffs: &[C],
    kv: &KnotVector,
    p: usize,
    z: f64,
) -> Result<Vec<f64>> {
    kv.check_degree(p)?;
    let count = kv.num_basis(p);
    if let Some(bad) = coeffs.iter().find(|c| c.as_ref().len() != count) {
        return Err(Error::ShapeError(format!(
            "expected {} coefficients per channel, got {}",
            count,
            bad.as_ref().len()
        )));
    }
    let (range, vals) = basis_row(kv, p, z)?;
    Ok(coeffs
        .iter()
        .map(|c| {
            let c = &c.as_ref()[range.lo..=range.hi];
            c.iter().zip(&vals).map(|(c, b)| c * b).sum()
        })
        .collect())
}
