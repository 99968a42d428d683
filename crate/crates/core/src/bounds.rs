//! Evaluators for the approximation-error bounds of the spline decoder and
//! the Berrut baseline, plus the numerical diagnostics used to check them.
//!
//! The constants `C` and `C1` appearing in the bounds are only known to
//! exist; callers pass them explicitly.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::fit::{build_square_system, fit_natural_cubic, MIN_NODES};
use crate::pipeline::chebyshev_nodes_second_kind;

/// Largest node count accepted by [`operator_norm_upper_bound`], which
/// inverts the system densely.
pub const MAX_DENSE_ORDER: usize = 2000;

/// Default grid size for [`estimate_fourth_derivative_sup`].
pub const DEFAULT_FD_GRID: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KnotSpacingStats {
    pub h_max: f64,
    pub h_min: f64,
    pub ratio: f64,
}

pub fn knot_spacing_stats(nodes: &[f64]) -> Result<KnotSpacingStats> {
    if nodes.len() < 2 {
        return Err(Error::InvalidNodes(format!(
            "need at least 2 nodes for spacing statistics, got {}",
            nodes.len()
        )));
    }
    let (mut h_min, mut h_max) = (f64::INFINITY, 0.0f64);
    for w in nodes.windows(2) {
        let h = w[1] - w[0];
        if !(h > 0.0) {
            return Err(Error::InvalidNodes(
                "nodes must be strictly increasing".into(),
            ));
        }
        h_min = h_min.min(h);
        h_max = h_max.max(h);
    }
    Ok(KnotSpacingStats {
        h_max,
        h_min,
        ratio: h_max / h_min,
    })
}

/// Max absolute row sum of the inverse system matrix with its first and
/// last columns removed; an upper bound on the norm of the interpolation
/// operator in the sup norm.
pub fn operator_norm_upper_bound(nodes: &[f64]) -> Result<f64> {
    if nodes.len() > MAX_DENSE_ORDER {
        return Err(Error::InvalidInput(format!(
            "{} nodes exceeds the dense inversion limit of {}",
            nodes.len(),
            MAX_DENSE_ORDER
        )));
    }
    let b = build_square_system(nodes)?;
    let n = b.order();
    let inv = DMatrix::from_fn(n, n, |i, j| b.get(i, j))
        .try_inverse()
        .ok_or(Error::SingularMatrix {
            column: 0,
            pivot: 0.0,
            tolerance: 0.0,
        })?;
    Ok((0..n)
        .map(|i| (1..n - 1).map(|j| inv[(i, j)].abs()).sum::<f64>())
        .fold(0.0, f64::max))
}

/// Sup norm of the spline through `samples` at `nodes`, measured on a
/// uniform grid of `grid` points over the node span.
pub fn spline_sup_norm(nodes: &[f64], samples: &[f64], grid: usize) -> Result<f64> {
    let fit = fit_natural_cubic(nodes, &[samples])?;
    let (a, b) = fit.span();
    uniform_grid(a, b, grid)
        .map(|z| fit.eval(z).map(|v| v[0].abs()))
        .try_fold(0.0f64, |acc, v| v.map(|v| acc.max(v)))
}

/// Inputs shared by the spline error bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundInputs {
    pub n: usize,
    pub s: usize,
    pub c: f64,
    pub c1: f64,
    /// Sup norm of the fourth derivative of `g`.
    pub g4_sup: f64,
    /// Best-approximation distance of `g` from the spline space, when known.
    pub d_inf: Option<f64>,
}

impl BoundInputs {
    pub fn new(n: usize, s: usize, c: f64, c1: f64, g4_sup: f64) -> Result<Self> {
        if s + 2 >= n {
            return Err(Error::InvalidStragglerCount {
                stragglers: s,
                workers: n,
            });
        }
        if !(c > 0.0) || !(c1 > 0.0) || !c.is_finite() || !c1.is_finite() {
            return Err(Error::InvalidInput(
                "constants C and C1 must be positive".into(),
            ));
        }
        if !(g4_sup >= 0.0) || !g4_sup.is_finite() {
            return Err(Error::InvalidInput("g4_sup must be finite and >= 0".into()));
        }
        Ok(Self {
            n,
            s,
            c,
            c1,
            g4_sup,
            d_inf: None,
        })
    }

    pub fn with_d_inf(mut self, d_inf: f64) -> Result<Self> {
        if !(d_inf >= 0.0) || !d_inf.is_finite() {
            return Err(Error::InvalidInput("D_inf must be finite and >= 0".into()));
        }
        self.d_inf = Some(d_inf);
        Ok(self)
    }

    fn survivors(&self) -> f64 {
        (self.n - self.s) as f64
    }

    fn lebesgue_factor(&self, stats: &KnotSpacingStats) -> f64 {
        1.0 + self.c1 * (self.survivors() + 2.0) * stats.ratio
    }
}

/// `C (1 + C1 (N - S + 2) h_max / h_min) h_max^4 |g''''|`, with the spacing
/// statistics taken over the surviving nodes.
pub fn corollary_bound(inputs: &BoundInputs, stats: &KnotSpacingStats) -> f64 {
    inputs.c * inputs.lebesgue_factor(stats) * stats.h_max.powi(4) * inputs.g4_sup
}

/// `(1 + C1 (N - S + 2) h_max / h_min) D`, where `D` is the caller-supplied
/// best-approximation distance.
pub fn theorem2_bound(inputs: &BoundInputs, stats: &KnotSpacingStats) -> Result<f64> {
    let d = inputs.d_inf.ok_or(Error::MissingInput("d_inf"))?;
    Ok(inputs.lebesgue_factor(stats) * d)
}

/// Corollary bound specialised to second-kind Chebyshev evaluation points
/// with `S` stragglers.
pub fn bscc_cheby_bound(inputs: &BoundInputs, h_min: f64) -> f64 {
    let x = (inputs.s as f64 + 1.0) * PI / (2.0 * inputs.n as f64);
    let s = x.sin();
    2.0 * inputs.c
        * (s.powi(4) + inputs.c1 * (inputs.survivors() + 2.0) / h_min * s.powi(5))
        * inputs.g4_sup
}

/// Smallest gap among `N` second-kind Chebyshev points.
pub fn chebyshev_h_min(n: usize) -> Result<f64> {
    Ok(knot_spacing_stats(&chebyshev_nodes_second_kind(n)?)?.h_min)
}

/// Error bound of the Berrut decoder:
/// `(1 + (1 + S)(3 + S) pi^2 / 4) sin((S + 1) pi / (2N))`.
pub fn bacc_bound(n: usize, s: usize) -> Result<f64> {
    if n == 0 || s >= n {
        return Err(Error::InvalidStragglerCount {
            stragglers: s,
            workers: n,
        });
    }
    let s = s as f64;
    let n = n as f64;
    Ok((1.0 + (1.0 + s) * (3.0 + s) * PI * PI / 4.0) * ((s + 1.0) * PI / (2.0 * n)).sin())
}

fn uniform_grid(a: f64, b: f64, points: usize) -> impl Iterator<Item = f64> {
    let last = points.max(2) - 1;
    (0..=last).map(move |i| {
        if i == last {
            b
        } else {
            a + (b - a) * i as f64 / last as f64
        }
    })
}

/// Estimates `sup |g''''|` on `[a, b]` with the five-point central stencil
/// at `grid_size + 1` uniformly spaced centres.
///
/// The stencil step is the larger of the grid step and
/// `eps^(1/6) * max(b - a, 1)`, below which round-off dominates the
/// `O(h^2)` truncation error. `g` is sampled up to two steps outside the
/// interval.
pub fn estimate_fourth_derivative_sup<G: Fn(f64) -> f64>(
    g: G,
    a: f64,
    b: f64,
    grid_size: usize,
) -> Result<f64> {
    if !(a < b) || grid_size == 0 {
        return Err(Error::InvalidRange { lo: a, hi: b });
    }
    let width = b - a;
    let h = (width / grid_size as f64).max(f64::EPSILON.powf(1.0 / 6.0) * width.max(1.0));
    let h4 = h.powi(4);
    let mut sup = 0.0f64;
    for z in uniform_grid(a, b, grid_size + 1) {
        let d =
            (g(z - 2.0 * h) - 4.0 * g(z - h) + 6.0 * g(z) - 4.0 * g(z + h) + g(z + 2.0 * h)) / h4;
        if !d.is_finite() {
            return Err(Error::NumericalOverflow(format!(
                "fourth difference at {z}"
            )));
        }
        sup = sup.max(d.abs());
    }
    Ok(sup)
}

/// Least-squares slope of `log(error)` against `log(n)`.
pub fn decay_slope(pairs: &[(f64, f64)]) -> Result<f64> {
    if pairs.len() < 3 {
        return Err(Error::InvalidInput(format!(
            "need at least 3 (N, error) pairs, got {}",
            pairs.len()
        )));
    }
    if let Some((n, e)) = pairs.iter().find(|(n, e)| !(*e > 0.0) || !(*n > 0.0)) {
        return Err(Error::InvalidInput(format!(
            "N and error must be positive, got ({n}, {e})"
        )));
    }
    let pts: Vec<(f64, f64)> = pairs.iter().map(|(n, e)| (n.ln(), e.ln())).collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidInput("all N values are equal".into()));
    }
    Ok(sxy / sxx)
}

/// Sup-norm error of the natural cubic spline interpolant of `g` at
/// `nodes`, measured on a uniform grid of `grid` points over the node span.
pub fn spline_sup_error<G: Fn(f64) -> f64>(nodes: &[f64], g: G, grid: usize) -> Result<f64> {
    if nodes.len() < MIN_NODES {
        return Err(Error::TooFewNodes {
            needed: MIN_NODES,
            got: nodes.len(),
        });
    }
    let samples: Vec<f64> = nodes.iter().map(|&z| g(z)).collect();
    let fit = fit_natural_cubic(nodes, &[samples])?;
    let (a, b) = fit.span();
    uniform_grid(a, b, grid)
        .map(|z| fit.eval(z).map(|v| (v[0] - g(z)).abs()))
        .try_fold(0.0f64, |acc, v| v.map(|v| acc.max(v)))
}

/// Berrut rational interpolant with weights `(-1)^i` through
/// `(nodes[i], values[i])`, evaluated at `z`.
pub fn berrut_interpolate(nodes: &[f64], values: &[f64], z: f64) -> f64 {
    if let Some(i) = nodes.iter().position(|&x| x == z) {
        return values[i];
    }
    let (mut num, mut den) = (0.0, 0.0);
    for (i, (x, v)) in nodes.iter().zip(values).enumerate() {
        let t = if i.is_multiple_of(2) { 1.0 } else { -1.0 } / (z - x);
        num += t * v;
        den += t;
    }
    num / den
}

/// Sup-norm error of the Berrut interpolant of `g` at `nodes` on a uniform
/// grid of `grid` points over the node span.
pub fn berrut_sup_error<G: Fn(f64) -> f64>(nodes: &[f64], g: G, grid: usize) -> Result<f64> {
    if nodes.is_empty() {
        return Err(Error::TooFewNodes { needed: 1, got: 0 });
    }
    let values: Vec<f64> = nodes.iter().map(|&z| g(z)).collect();
    let (a, b) = (nodes[0], nodes[nodes.len() - 1]);
    Ok(uniform_grid(a, b, grid)
        .map(|z| (berrut_interpolate(nodes, &values, z) - g(z)).abs())
        .fold(0.0, f64::max))
}
