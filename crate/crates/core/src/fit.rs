//! Natural cubic spline interpolation in the clamped B-spline basis.
//!
//! For `M` strictly increasing nodes the spline has `M + 2` coefficients.
//! The `M` interpolation rows are closed by two natural boundary rows
//! (`s'' = 0` at both end nodes), giving a square system with lower and
//! upper bandwidth 2 that is solved by banded LU.

use crate::banded::{BandedLu, BandedMatrix};
use crate::bspline::{basis_row, basis_second_derivative_row, make_clamped_knots, KnotVector};
use crate::error::{Error, Result};

pub const DEGREE: usize = 3;
pub const MIN_NODES: usize = 4;

/// Sparse `M x (M + 2)` interpolation matrix, stored as the first column
/// and the active values of each row.
#[derive(Debug, Clone)]
pub struct RectSystem {
    cols: usize,
    rows: Vec<(usize, Vec<f64>)>,
}

impl RectSystem {
    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    /// `(first column, values)` of row `i`.
    pub fn row(&self, i: usize) -> (usize, &[f64]) {
        let (c, v) = &self.rows[i];
        (*c, v)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (c, v) = &self.rows[i];
        if j >= *c && j < c + v.len() {
            v[j - c]
        } else {
            0.0
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..self.nrows())
            .map(|i| (0..self.cols).map(|j| self.get(i, j)).collect())
            .collect()
    }
}

fn check_nodes(nodes: &[f64]) -> Result<KnotVector> {
    if nodes.len() < MIN_NODES {
        return Err(Error::TooFewNodes {
            needed: MIN_NODES,
            got: nodes.len(),
        });
    }
    make_clamped_knots(nodes, DEGREE)
}

fn rect_rows(kv: &KnotVector, nodes: &[f64]) -> Result<Vec<(usize, Vec<f64>)>> {
    nodes
        .iter()
        .map(|&z| basis_row(kv, DEGREE, z).map(|(r, v)| (r.lo, v)))
        .collect()
}

/// Rows `B_{j,3}(nodes[i])` of the clamped cubic basis over `nodes`.
pub fn build_rect_matrix(nodes: &[f64]) -> Result<RectSystem> {
    let kv = check_nodes(nodes)?;
    Ok(RectSystem {
        cols: nodes.len() + 2,
        rows: rect_rows(&kv, nodes)?,
    })
}

fn assemble(kv: &KnotVector, nodes: &[f64]) -> Result<BandedMatrix> {
    let m = nodes.len();
    let mut a = BandedMatrix::zeros(m + 2, 2, 2);
    let boundary = |row: usize, z: f64, a: &mut BandedMatrix| -> Result<()> {
        let (range, vals) = basis_second_derivative_row(kv, DEGREE, z)?;
        for (j, v) in range.iter().zip(vals) {
            a.set(row, j, v)?;
        }
        Ok(())
    };
    boundary(0, nodes[0], &mut a)?;
    for (i, (lo, vals)) in rect_rows(kv, nodes)?.into_iter().enumerate() {
        for (k, v) in vals.into_iter().enumerate() {
            a.set(i + 1, lo + k, v)?;
        }
    }
    boundary(m + 1, nodes[m - 1], &mut a)?;
    Ok(a)
}

/// Square `(M + 2) x (M + 2)` system: natural boundary row, the `M`
/// interpolation rows, natural boundary row.
pub fn build_square_system(nodes: &[f64]) -> Result<BandedMatrix> {
    let kv = check_nodes(nodes)?;
    assemble(&kv, nodes)
}

/// Right-hand sides for the square system, one column per channel, with
/// zero boundary entries at rows `0` and `M + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct RhsTable {
    rows: usize,
    channels: usize,
    // channel-major: channel c occupies data[c * rows..(c + 1) * rows]
    data: Vec<f64>,
}

impl RhsTable {
    pub fn from_samples<C: AsRef<[f64]>>(samples: &[C]) -> Result<Self> {
        let m = samples.first().map_or(0, |c| c.as_ref().len());
        let rows = m + 2;
        let mut data = Vec::with_capacity(rows * samples.len());
        for (c, ch) in samples.iter().enumerate() {
            let ch = ch.as_ref();
            if ch.len() != m {
                return Err(Error::ShapeError(format!(
                    "channel {} has {} samples, expected {}",
                    c,
                    ch.len(),
                    m
                )));
            }
            data.push(0.0);
            data.extend_from_slice(ch);
            data.push(0.0);
        }
        Ok(Self {
            rows,
            channels: samples.len(),
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn column(&self, c: usize) -> &[f64] {
        &self.data[c * self.rows..(c + 1) * self.rows]
    }
}

/// Natural cubic spline through per-channel samples at common nodes.
#[derive(Debug, Clone)]
pub struct CubicSplineInterpolant {
    nodes: Vec<f64>,
    knots: KnotVector,
    channels: usize,
    coeffs: Vec<f64>,
}

impl CubicSplineInterpolant {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn knot_vector(&self) -> &KnotVector {
        &self.knots
    }

    pub fn num_channels(&self) -> usize {
        self.channels
    }

    pub fn num_coeffs(&self) -> usize {
        self.nodes.len() + 2
    }

    /// Coefficients of one channel.
    pub fn channel(&self, c: usize) -> &[f64] {
        let n = self.num_coeffs();
        &self.coeffs[c * n..(c + 1) * n]
    }

    pub fn span(&self) -> (f64, f64) {
        (self.nodes[0], self.nodes[self.nodes.len() - 1])
    }

    /// Values of every channel at `z`, written into `out`.
    pub fn eval_into(&self, z: f64, out: &mut [f64]) -> Result<()> {
        if out.len() != self.channels {
            return Err(Error::ShapeError(format!(
                "output has {} slots for {} channels",
                out.len(),
                self.channels
            )));
        }
        let (range, vals) = basis_row(&self.knots, DEGREE, z)?;
        self.combine(range.lo, &vals, out);
        Ok(())
    }

    pub fn eval(&self, z: f64) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.channels];
        self.eval_into(z, &mut out)?;
        Ok(out)
    }

    pub fn second_derivative(&self, z: f64) -> Result<Vec<f64>> {
        let (range, vals) = basis_second_derivative_row(&self.knots, DEGREE, z)?;
        let mut out = vec![0.0; self.channels];
        self.combine(range.lo, &vals, &mut out);
        Ok(out)
    }

    fn combine(&self, lo: usize, basis: &[f64], out: &mut [f64]) {
        for (c, o) in out.iter_mut().enumerate() {
            let coeffs = &self.channel(c)[lo..lo + basis.len()];
            *o = coeffs.iter().zip(basis).map(|(a, b)| a * b).sum();
        }
    }
}

/// A factored square system for a fixed node set, reusable across
/// right-hand sides.
#[derive(Debug, Clone)]
pub struct NaturalCubicSolver {
    nodes: Vec<f64>,
    knots: KnotVector,
    lu: BandedLu,
}

impl NaturalCubicSolver {
    pub fn new(nodes: &[f64]) -> Result<Self> {
        let knots = check_nodes(nodes)?;
        let lu = assemble(&knots, nodes)?.factor()?;
        Ok(Self {
            nodes: nodes.to_vec(),
            knots,
            lu,
        })
    }

    pub fn fit<C: AsRef<[f64]>>(&self, samples: &[C]) -> Result<CubicSplineInterpolant> {
        let m = self.nodes.len();
        if let Some(c) = samples.iter().position(|c| c.as_ref().len() != m) {
            return Err(Error::ShapeError(format!(
                "channel {} has {} samples for {} nodes",
                c,
                samples[c].as_ref().len(),
                m
            )));
        }
        let rhs = RhsTable::from_samples(samples)?;
        let mut coeffs = rhs.data;
        if !coeffs.is_empty() {
            self.lu.solve_columns(&mut coeffs)?;
        }
        Ok(CubicSplineInterpolant {
            nodes: self.nodes.clone(),
            knots: self.knots.clone(),
            channels: samples.len(),
            coeffs,
        })
    }
}

/// Fits the natural cubic spline through `samples[c][i]` at `nodes[i]` for
/// every channel `c`, factoring the system once.
pub fn fit_natural_cubic<C: AsRef<[f64]>>(
    nodes: &[f64],
    samples: &[C],
) -> Result<CubicSplineInterpolant> {
    NaturalCubicSolver::new(nodes)?.fit(samples)
}
