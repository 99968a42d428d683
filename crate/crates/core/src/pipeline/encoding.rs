use ndarray::Array2;

use crate::error::{Error, Result};
use crate::pipeline::nodes::{chebyshev_nodes_first_kind, chebyshev_nodes_second_kind};

/// Interpolatory basis used to encode the dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisKind {
    Lagrange,
    Berrut,
}

impl BasisKind {
    pub fn name(self) -> &'static str {
        match self {
            BasisKind::Lagrange => "lagrange",
            BasisKind::Berrut => "berrut",
        }
    }
}

impl std::str::FromStr for BasisKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lagrange" => Ok(BasisKind::Lagrange),
            "berrut" => Ok(BasisKind::Berrut),
            other => Err(Error::InvalidInput(format!("unknown encoder '{other}'"))),
        }
    }
}

/// `K >= 2` equally shaped data blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    blocks: Vec<Array2<f64>>,
}

impl Dataset {
    pub fn new(blocks: Vec<Array2<f64>>) -> Result<Self> {
        if blocks.len() < 2 {
            return Err(Error::InvalidCount(format!(
                "dataset needs at least 2 blocks, got {}",
                blocks.len()
            )));
        }
        let dim = blocks[0].dim();
        if let Some(i) = blocks.iter().position(|b| b.dim() != dim) {
            return Err(Error::ShapeError(format!(
                "block {} has shape {:?}, block 0 has {:?}",
                i,
                blocks[i].dim(),
                dim
            )));
        }
        Ok(Self { blocks })
    }

    pub fn blocks(&self) -> &[Array2<f64>] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn block_dim(&self) -> (usize, usize) {
        self.blocks[0].dim()
    }
}

/// Encoding points `betas` (one per block) and evaluation points `alphas`
/// (one per worker), both strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodingConfig {
    pub basis_kind: BasisKind,
    betas: Vec<f64>,
    alphas: Vec<f64>,
}

fn strictly_increasing(name: &str, xs: &[f64]) -> Result<()> {
    if xs.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidNodes(format!("{name} must be finite")));
    }
    if let Some(i) = xs.windows(2).position(|w| w[0] >= w[1]) {
        return Err(Error::InvalidNodes(format!(
            "{name} must be strictly increasing (index {i})"
        )));
    }
    Ok(())
}

impl EncodingConfig {
    pub fn new(basis_kind: BasisKind, betas: Vec<f64>, alphas: Vec<f64>) -> Result<Self> {
        if betas.is_empty() || alphas.is_empty() {
            return Err(Error::InvalidCount(
                "betas and alphas must be nonempty".into(),
            ));
        }
        strictly_increasing("betas", &betas)?;
        strictly_increasing("alphas", &alphas)?;
        let (lo, hi) = (alphas[0], alphas[alphas.len() - 1]);
        if let Some(b) = betas.iter().find(|b| **b < lo || **b > hi) {
            return Err(Error::InvalidNodes(format!(
                "beta {b} lies outside the evaluation span [{lo}, {hi}]"
            )));
        }
        Ok(Self {
            basis_kind,
            betas,
            alphas,
        })
    }

    /// First-kind Chebyshev betas for `k` blocks, second-kind alphas for
    /// `n` workers.
    pub fn chebyshev(basis_kind: BasisKind, k: usize, n: usize) -> Result<Self> {
        Self::new(
            basis_kind,
            chebyshev_nodes_first_kind(k)?,
            chebyshev_nodes_second_kind(n)?,
        )
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn num_workers(&self) -> usize {
        self.alphas.len()
    }

    /// `Phi_j(z)` for every block `j`.
    pub fn weights(&self, z: f64) -> Vec<f64> {
        match self.basis_kind {
            BasisKind::Lagrange => lagrange_weights(&self.betas, z),
            BasisKind::Berrut => berrut_weights(&self.betas, z),
        }
    }
}

fn check_distinct(betas: &[f64], j: usize) -> Result<()> {
    if j >= betas.len() {
        return Err(Error::IndexError {
            index: j,
            count: betas.len(),
        });
    }
    let mut sorted = betas.to_vec();
    sorted.sort_by(f64::total_cmp);
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidNodes(
            "encoding points must be distinct".into(),
        ));
    }
    Ok(())
}

fn lagrange_weights(betas: &[f64], z: f64) -> Vec<f64> {
    (0..betas.len())
        .map(|j| {
            betas
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != j)
                .map(|(_, bk)| (z - bk) / (betas[j] - bk))
                .product()
        })
        .collect()
}

/// Lagrange cardinal polynomial `prod_{k != j} (z - b_k) / (b_j - b_k)`.
pub fn lagrange_basis(betas: &[f64], j: usize, z: f64) -> Result<f64> {
    check_distinct(betas, j)?;
    Ok(lagrange_weights(betas, z)[j])
}

fn node_tolerance(nodes: &[f64]) -> f64 {
    let (lo, hi) = nodes
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| {
            (a.min(x), b.max(x))
        });
    1e-12 * (hi - lo).max(f64::MIN_POSITIVE)
}

fn berrut_weights(betas: &[f64], z: f64) -> Vec<f64> {
    let tol = node_tolerance(betas);
    if let Some(i) = betas.iter().position(|b| (z - b).abs() <= tol) {
        let mut w = vec![0.0; betas.len()];
        w[i] = 1.0;
        return w;
    }
    let terms: Vec<f64> = betas
        .iter()
        .enumerate()
        .map(|(k, b)| alternating(k) / (z - b))
        .collect();
    let denom: f64 = terms.iter().sum();
    terms.into_iter().map(|t| t / denom).collect()
}

pub(crate) fn alternating(k: usize) -> f64 {
    if k.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Berrut's rational cardinal function with weights `(-1)^k`. At (or
/// within `1e-12 * span` of) a node it returns the indicator of that node.
pub fn berrut_basis(betas: &[f64], j: usize, z: f64) -> Result<f64> {
    check_distinct(betas, j)?;
    Ok(berrut_weights(betas, z)[j])
}

/// `u(z) = sum_j X_j Phi_j(z)`.
pub fn encode(ds: &Dataset, cfg: &EncodingConfig, z: f64) -> Result<Array2<f64>> {
    if ds.len() != cfg.betas.len() {
        return Err(Error::ShapeError(format!(
            "{} blocks but {} encoding points",
            ds.len(),
            cfg.betas.len()
        )));
    }
    let weights = cfg.weights(z);
    let mut out = Array2::zeros(ds.block_dim());
    for (x, w) in ds.blocks.iter().zip(weights) {
        out.scaled_add(w, x);
    }
    Ok(out)
}

/// The share assigned to one worker: `Y_i = u(alpha_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Share {
    pub worker_index: usize,
    pub alpha: f64,
    pub value: Array2<f64>,
}

pub fn make_shares(ds: &Dataset, cfg: &EncodingConfig) -> Result<Vec<Share>> {
    cfg.alphas
        .iter()
        .enumerate()
        .map(|(i, &alpha)| {
            Ok(Share {
                worker_index: i,
                alpha,
                value: encode(ds, cfg, alpha)?,
            })
        })
        .collect()
}
