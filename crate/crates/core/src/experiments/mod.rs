//! Seeded Monte Carlo comparison of the spline and Berrut decoders.
//!
//! Every trial draws a uniform dataset and a uniformly random survivor set
//! from generators seeded by `(seed, S, trial)` only, so both schemes see
//! identical inputs for the same `(S, trial)`.

mod config;
mod csv;

use ndarray::Array2;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::pipeline::{
    bacc_reconstruct, bscc_reconstruct, make_shares, worker_eval, BasisKind, BetaPolicy, Dataset,
    EncodingConfig, TargetFunction, WorkerResult,
};

pub use config::{ExperimentConfig, Scheme};
pub use csv::{aggregates_path, emit_csv, AGGREGATE_HEADER, RECORD_HEADER};

const DATA_STREAM: u64 = 0;
const STRAGGLER_STREAM: u64 = 1;

/// splitmix64 finaliser.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of trial `trial` at straggler count `s`. The scheme is deliberately
/// not an input.
pub fn trial_seed(seed: u64, s: usize, trial: usize) -> u64 {
    mix(mix(mix(seed) ^ s as u64) ^ trial as u64)
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// `K` blocks with entries i.i.d. uniform on `[data_lo, data_hi)`.
pub fn sample_dataset<R: Rng + ?Sized>(cfg: &ExperimentConfig, rng: &mut R) -> Result<Dataset> {
    if !(cfg.data_lo < cfg.data_hi) {
        return Err(Error::InvalidRange {
            lo: cfg.data_lo,
            hi: cfg.data_hi,
        });
    }
    let blocks = (0..cfg.k)
        .map(|_| {
            Array2::from_shape_simple_fn((cfg.block_rows, cfg.block_cols), || {
                rng.gen_range(cfg.data_lo..cfg.data_hi)
            })
        })
        .collect();
    Dataset::new(blocks)
}

/// Uniformly random set of `n - s` surviving workers, sorted ascending.
pub fn sample_stragglers<R: Rng + ?Sized>(n: usize, s: usize, rng: &mut R) -> Result<Vec<usize>> {
    if s + 4 > n {
        return Err(Error::InvalidStragglerCount {
            stragglers: s,
            workers: n,
        });
    }
    let mut survivors = sample(rng, n, n - s).into_vec();
    survivors.sort_unstable();
    Ok(survivors)
}

/// `sum ||Y_j - Y'_j||^2 / sum ||Y_j||^2` over all blocks.
pub fn relative_error(exact: &[Array2<f64>], approx: &[Array2<f64>]) -> Result<f64> {
    if exact.len() != approx.len() {
        return Err(Error::ShapeError(format!(
            "{} exact blocks vs {} approximations",
            exact.len(),
            approx.len()
        )));
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for (y, y2) in exact.iter().zip(approx) {
        if y.dim() != y2.dim() {
            return Err(Error::ShapeError(format!(
                "block shapes {:?} and {:?} differ",
                y.dim(),
                y2.dim()
            )));
        }
        for (a, b) in y.iter().zip(y2) {
            num += (a - b) * (a - b);
            den += a * a;
        }
    }
    if den == 0.0 {
        return Err(Error::DegenerateReference);
    }
    Ok(num / den)
}

pub fn to_db(e_rel: f64) -> f64 {
    10.0 * e_rel.log10()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub scheme: Scheme,
    pub encoder: BasisKind,
    pub n: usize,
    pub k: usize,
    pub s: usize,
    pub trial: usize,
    pub seed: u64,
    /// NaN when the trial failed.
    pub e_rel: f64,
    pub e_rel_db: f64,
    pub beta_clamped: bool,
    pub error: Option<String>,
}

impl TrialRecord {
    pub fn succeeded(&self) -> bool {
        self.error.is_none()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Aggregate {
    pub scheme: Scheme,
    pub encoder: BasisKind,
    pub s: usize,
    /// Mean of linear `e_rel` over successful trials.
    pub mean_e_rel: f64,
    /// `10 log10(mean_e_rel)`.
    pub mean_db: f64,
    /// Sample standard deviation of the per-trial dB values.
    pub std_db: f64,
    pub trials: usize,
}

struct Inputs {
    seed: u64,
    exact: Vec<Array2<f64>>,
    results: Vec<WorkerResult>,
}

/// A validated configuration with its encoding points and target function.
pub struct Experiment {
    cfg: ExperimentConfig,
    encoding: EncodingConfig,
    function: TargetFunction,
}

impl Experiment {
    pub fn new(cfg: ExperimentConfig) -> Result<Self> {
        cfg.validate()?;
        let encoding = EncodingConfig::chebyshev(cfg.encoder, cfg.k, cfg.n)?;
        let function = TargetFunction::from_name(&cfg.function)?;
        Ok(Self {
            cfg,
            encoding,
            function,
        })
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.cfg
    }

    fn inputs(&self, s: usize, trial: usize) -> Result<Inputs> {
        let seed = trial_seed(self.cfg.seed, s, trial);
        let ds = sample_dataset(&self.cfg, &mut stream(seed, DATA_STREAM))?;
        let survivors = sample_stragglers(self.cfg.n, s, &mut stream(seed, STRAGGLER_STREAM))?;
        let shares = make_shares(&ds, &self.encoding)?;
        let results = survivors
            .iter()
            .map(|&i| worker_eval(&shares[i], &self.function))
            .collect::<Result<_>>()?;
        let exact = ds.blocks().iter().map(|x| self.function.apply(x)).collect();
        Ok(Inputs {
            seed,
            exact,
            results,
        })
    }

    fn record(&self, scheme: Scheme, s: usize, trial: usize, seed: u64) -> TrialRecord {
        TrialRecord {
            scheme,
            encoder: self.cfg.encoder,
            n: self.cfg.n,
            k: self.cfg.k,
            s,
            trial,
            seed,
            e_rel: f64::NAN,
            e_rel_db: f64::NAN,
            beta_clamped: false,
            error: None,
        }
    }

    fn decode(&self, scheme: Scheme, s: usize, trial: usize, inputs: &Inputs) -> TrialRecord {
        let mut rec = self.record(scheme, s, trial, inputs.seed);
        let outcome = match scheme {
            Scheme::Bscc => bscc_reconstruct(&inputs.results, &self.encoding, BetaPolicy::Clamp),
            Scheme::Bacc => bacc_reconstruct(&inputs.results, &self.encoding),
        }
        .and_then(|r| relative_error(&inputs.exact, &r.blocks).map(|e| (e, r.beta_clamped)));
        match outcome {
            Ok((e, clamped)) => {
                rec.e_rel = e;
                rec.e_rel_db = to_db(e);
                rec.beta_clamped = clamped;
            }
            Err(err) => rec.error = Some(err.to_string()),
        }
        rec
    }

    pub fn run_trial(&self, scheme: Scheme, s: usize, trial: usize) -> TrialRecord {
        match self.inputs(s, trial) {
            Ok(inputs) => self.decode(scheme, s, trial, &inputs),
            Err(err) => {
                let mut rec = self.record(scheme, s, trial, trial_seed(self.cfg.seed, s, trial));
                rec.error = Some(err.to_string());
                rec
            }
        }
    }

    /// All schemes x straggler counts x trials, ordered by
    /// `(scheme, S, trial)`, plus per-`(scheme, S)` aggregates.
    pub fn run(&self) -> (Vec<TrialRecord>, Vec<Aggregate>) {
        let cells: Vec<(usize, usize)> = self
            .cfg
            .s_values
            .iter()
            .flat_map(|&s| (0..self.cfg.trials).map(move |t| (s, t)))
            .collect();
        let per_cell: Vec<Vec<TrialRecord>> = cells
            .par_iter()
            .map(|&(s, t)| match self.inputs(s, t) {
                Ok(inputs) => self
                    .cfg
                    .schemes
                    .iter()
                    .map(|&sc| self.decode(sc, s, t, &inputs))
                    .collect(),
                Err(_) => self
                    .cfg
                    .schemes
                    .iter()
                    .map(|&sc| self.run_trial(sc, s, t))
                    .collect(),
            })
            .collect();
        let mut records = Vec::with_capacity(cells.len() * self.cfg.schemes.len());
        for i in 0..self.cfg.schemes.len() {
            records.extend(per_cell.iter().map(|recs| recs[i].clone()));
        }
        let aggregates = aggregate(&records);
        (records, aggregates)
    }
}

pub fn run_trial(
    cfg: &ExperimentConfig,
    scheme: Scheme,
    s: usize,
    trial: usize,
) -> Result<TrialRecord> {
    Ok(Experiment::new(cfg.clone())?.run_trial(scheme, s, trial))
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<(Vec<TrialRecord>, Vec<Aggregate>)> {
    Ok(Experiment::new(cfg.clone())?.run())
}

/// Groups records by `(scheme, encoder, S)` in first-seen order.
pub fn aggregate(records: &[TrialRecord]) -> Vec<Aggregate> {
    let mut keys: Vec<(Scheme, BasisKind, usize)> = Vec::new();
    for r in records {
        let key = (r.scheme, r.encoder, r.s);
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    keys.into_iter()
        .map(|(scheme, encoder, s)| {
            let ok: Vec<&TrialRecord> = records
                .iter()
                .filter(|r| r.scheme == scheme && r.encoder == encoder && r.s == s && r.succeeded())
                .collect();
            let count = ok.len();
            let mean_e_rel = if count == 0 {
                f64::NAN
            } else {
                ok.iter().map(|r| r.e_rel).sum::<f64>() / count as f64
            };
            let std_db = if count < 2 {
                0.0
            } else {
                let m = ok.iter().map(|r| r.e_rel_db).sum::<f64>() / count as f64;
                let var =
                    ok.iter().map(|r| (r.e_rel_db - m).powi(2)).sum::<f64>() / (count - 1) as f64;
                var.sqrt()
            };
            Aggregate {
                scheme,
                encoder,
                s,
                mean_e_rel,
                mean_db: to_db(mean_e_rel),
                std_db,
                trials: count,
            }
        })
        .collect()
}
