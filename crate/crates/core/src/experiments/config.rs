use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::pipeline::{BasisKind, TargetFunction};

/// Decoder under test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Scheme {
    Bscc,
    Bacc,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Bscc => "bscc",
            Scheme::Bacc => "bacc",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "bscc" => Ok(Scheme::Bscc),
            "bacc" => Ok(Scheme::Bacc),
            other => Err(Error::InvalidInput(format!("unknown scheme '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub n: usize,
    pub k: usize,
    pub block_rows: usize,
    pub block_cols: usize,
    pub s_values: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub encoder: BasisKind,
    pub schemes: Vec<Scheme>,
    pub function: String,
    pub data_lo: f64,
    pub data_hi: f64,
}

impl Default for ExperimentConfig {
    /// N = 100 workers, K = 8 blocks of 5x5, x sin x, 1000 trials.
    fn default() -> Self {
        Self {
            n: 100,
            k: 8,
            block_rows: 5,
            block_cols: 5,
            s_values: vec![0, 10, 20, 30, 40],
            trials: 1000,
            seed: 0,
            encoder: BasisKind::Lagrange,
            schemes: vec![Scheme::Bscc, Scheme::Bacc],
            function: "xsinx".into(),
            data_lo: 0.0,
            data_hi: 1.0,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::InvalidCount(format!(
                "K must be >= 2, got {}",
                self.k
            )));
        }
        if self.n < 4 {
            return Err(Error::InvalidCount(format!(
                "N must be >= 4, got {}",
                self.n
            )));
        }
        if self.block_rows == 0 || self.block_cols == 0 {
            return Err(Error::InvalidCount(
                "block dimensions must be positive".into(),
            ));
        }
        if self.trials == 0 {
            return Err(Error::InvalidCount("trials must be >= 1".into()));
        }
        if self.schemes.is_empty() {
            return Err(Error::InvalidInput("no schemes selected".into()));
        }
        if !(self.data_lo < self.data_hi) {
            return Err(Error::InvalidRange {
                lo: self.data_lo,
                hi: self.data_hi,
            });
        }
        TargetFunction::from_name(&self.function)?;
        if let Some(&s) = self.s_values.iter().find(|&&s| s + 4 > self.n) {
            return Err(Error::InvalidStragglerCount {
                stragglers: s,
                workers: self.n,
            });
        }
        Ok(())
    }

    /// Parses flat `key = value` lines; `#` starts a comment. Keys not listed
    /// here are errors:
    ///
    /// `n, k, block_rows, block_cols, s_values, trials, seed, encoder,
    /// schemes, function, data_lo, data_hi`
    ///
    /// `s_values` and `schemes` are comma-separated lists. Unset keys keep
    /// their [`Default`] values.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| Error::Config {
                line,
                message: format!("expected key=value, got '{content}'"),
            })?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |what: &str| Error::Config {
                line,
                message: format!("invalid {what} for '{key}': '{value}'"),
            };
            match key {
                "n" => cfg.n = value.parse().map_err(|_| bad("integer"))?,
                "k" => cfg.k = value.parse().map_err(|_| bad("integer"))?,
                "block_rows" => cfg.block_rows = value.parse().map_err(|_| bad("integer"))?,
                "block_cols" => cfg.block_cols = value.parse().map_err(|_| bad("integer"))?,
                "trials" => cfg.trials = value.parse().map_err(|_| bad("integer"))?,
                "seed" => cfg.seed = value.parse().map_err(|_| bad("integer"))?,
                "data_lo" => cfg.data_lo = value.parse().map_err(|_| bad("number"))?,
                "data_hi" => cfg.data_hi = value.parse().map_err(|_| bad("number"))?,
                "encoder" => cfg.encoder = value.parse().map_err(|_| bad("encoder"))?,
                "function" => {
                    TargetFunction::from_name(value).map_err(|_| bad("function"))?;
                    cfg.function = value.to_ascii_lowercase();
                }
                "s_values" => {
                    cfg.s_values = split_list(value)
                        .map(|v| v.parse().map_err(|_| bad("integer list")))
                        .collect::<Result<_>>()?
                }
                "schemes" => {
                    cfg.schemes = split_list(value)
                        .map(|v| v.parse().map_err(|_| bad("scheme list")))
                        .collect::<Result<_>>()?
                }
                _ => {
                    return Err(Error::Config {
                        line,
                        message: format!("unknown key '{key}'"),
                    })
                }
            }
        }
        Ok(cfg)
    }
}

fn split_list(value: &str) -> impl Iterator<Item = &str> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty())
}
