use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use bscc::bounds::{
    bacc_bound, bscc_cheby_bound, chebyshev_h_min, corollary_bound, BoundInputs, KnotSpacingStats,
};
use bscc::bspline::{basis_row, KnotVector};
use bscc::experiments::{emit_csv, Experiment, ExperimentConfig, Scheme};
use bscc::fit::fit_natural_cubic;
use bscc::pipeline::BasisKind;
use bscc::Error;
use clap::{Parser, Subcommand, ValueEnum};

const EXIT_USAGE: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;
const EXIT_IO: u8 = 4;

#[derive(Parser)]
#[command(name = "bscc", version, about = "B-spline coded computing toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the clamped B-spline basis at given points.
    Basis {
        /// Breakpoints, comma separated.
        #[arg(
            long,
            value_delimiter = ',',
            allow_negative_numbers = true,
            required = true
        )]
        points: Vec<f64>,
        #[arg(long, default_value_t = 3)]
        degree: usize,
        /// Evaluation points, comma separated.
        #[arg(
            long,
            value_delimiter = ',',
            allow_negative_numbers = true,
            required = true
        )]
        at: Vec<f64>,
    },
    /// Fit a natural cubic spline and evaluate it.
    Fit {
        #[arg(
            long,
            value_delimiter = ',',
            allow_negative_numbers = true,
            required = true
        )]
        nodes: Vec<f64>,
        #[arg(
            long,
            value_delimiter = ',',
            allow_negative_numbers = true,
            required = true
        )]
        values: Vec<f64>,
        /// Evaluation points; defaults to the nodes.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        at: Vec<f64>,
        /// Print the B-spline coefficients instead of values.
        #[arg(long, conflicts_with = "at")]
        coeffs: bool,
    },
    /// Run one paired trial of the coded pipeline and report both decoders.
    Simulate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        s: usize,
        #[arg(long, default_value = "xsinx")]
        function: String,
        #[arg(long, default_value = "lagrange")]
        encoder: BasisKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        trial: usize,
        #[arg(long, default_value_t = 5)]
        rows: usize,
        #[arg(long, default_value_t = 5)]
        cols: usize,
    },
    /// Evaluate an error bound.
    Bounds {
        #[arg(long)]
        which: Which,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        s: usize,
        #[arg(long)]
        c: Option<f64>,
        #[arg(long)]
        c1: Option<f64>,
        #[arg(long)]
        g4sup: Option<f64>,
        #[arg(long)]
        hmin: Option<f64>,
        #[arg(long)]
        hmax: Option<f64>,
    },
    /// Run a Monte Carlo experiment from a key=value config file.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    BsccCheby,
    Bacc,
    Corollary,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Io { .. } => EXIT_IO,
            Error::InvalidStragglerCount { .. }
            | Error::ReconstructionInfeasible { .. }
            | Error::TooFewNodes { .. }
            | Error::InvalidCount(_)
            | Error::SingularMatrix { .. }
            | Error::NumericalOverflow(_)
            | Error::ExtrapolationError { .. }
            | Error::DegenerateReference => EXIT_INFEASIBLE,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

fn require(value: Option<f64>, flag: &str, which: &str) -> Result<f64, Failure> {
    value.ok_or_else(|| usage(format!("--which {which} requires --{flag}")))
}

/// Shortest round-trip representation.
fn join(values: impl IntoIterator<Item = f64>) -> String {
    values
        .into_iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn basis(points: &[f64], degree: usize, at: &[f64]) -> Result<(), Failure> {
    let kv = KnotVector::clamped(points, degree)?;
    let count = kv.num_basis(degree);
    for &z in at {
        let (range, vals) = basis_row(&kv, degree, z)?;
        let mut row = vec![0.0; count];
        for (j, v) in range.iter().zip(vals) {
            row[j] = v;
        }
        println!("{}", join(row));
    }
    Ok(())
}

fn fit(nodes: &[f64], values: &[f64], at: &[f64], coeffs: bool) -> Result<(), Failure> {
    if nodes.len() != values.len() {
        return Err(usage(format!(
            "{} nodes but {} values",
            nodes.len(),
            values.len()
        )));
    }
    let spline = fit_natural_cubic(nodes, &[values])?;
    if coeffs {
        println!("{}", join(spline.channel(0).iter().copied()));
        return Ok(());
    }
    let at = if at.is_empty() { nodes } else { at };
    for &z in at {
        println!("{z},{}", spline.eval(z)?[0]);
    }
    Ok(())
}

fn bounds(which: Which, n: usize, s: usize, consts: [Option<f64>; 5]) -> Result<(), Failure> {
    let [c, c1, g4, hmin, hmax] = consts;
    let value = match which {
        Which::Bacc => bacc_bound(n, s)?,
        Which::BsccCheby => {
            let name = "bscc-cheby";
            let inputs = BoundInputs::new(
                n,
                s,
                require(c, "c", name)?,
                require(c1, "c1", name)?,
                require(g4, "g4sup", name)?,
            )?;
            let h_min = match hmin {
                Some(h) => h,
                None => chebyshev_h_min(n)?,
            };
            bscc_cheby_bound(&inputs, h_min)
        }
        Which::Corollary => {
            let name = "corollary";
            let inputs = BoundInputs::new(
                n,
                s,
                require(c, "c", name)?,
                require(c1, "c1", name)?,
                require(g4, "g4sup", name)?,
            )?;
            let h_min = require(hmin, "hmin", name)?;
            let h_max = require(hmax, "hmax", name)?;
            if !(h_min > 0.0 && h_max >= h_min) {
                return Err(usage("need 0 < --hmin <= --hmax"));
            }
            let stats = KnotSpacingStats {
                h_max,
                h_min,
                ratio: h_max / h_min,
            };
            corollary_bound(&inputs, &stats)
        }
    };
    println!("{value:.16e}");
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn simulate(
    n: usize,
    k: usize,
    s: usize,
    function: String,
    encoder: BasisKind,
    seed: u64,
    trial: usize,
    (rows, cols): (usize, usize),
) -> Result<(), Failure> {
    let cfg = ExperimentConfig {
        n,
        k,
        block_rows: rows,
        block_cols: cols,
        s_values: vec![s],
        trials: trial + 1,
        seed,
        encoder,
        schemes: vec![Scheme::Bscc, Scheme::Bacc],
        function,
        ..ExperimentConfig::default()
    };
    let exp = Experiment::new(cfg)?;
    for scheme in [Scheme::Bscc, Scheme::Bacc] {
        let r = exp.run_trial(scheme, s, trial);
        if let Some(err) = r.error {
            return Err(Failure {
                code: EXIT_INFEASIBLE,
                message: format!("{scheme}: {err}"),
            });
        }
        println!(
            "{scheme} e_rel={:.16e} db={:.6} beta_clamped={}",
            r.e_rel, r.e_rel_db, r.beta_clamped
        );
    }
    Ok(())
}

fn experiment(config: &PathBuf, out: &PathBuf) -> Result<(), Failure> {
    let text = fs::read_to_string(config).map_err(|source| Error::Io {
        path: config.clone(),
        source,
    })?;
    let cfg = ExperimentConfig::parse(&text)?;
    let exp = Experiment::new(cfg)?;
    fs::create_dir_all(out).map_err(|source| Error::Io {
        path: out.clone(),
        source,
    })?;
    let (records, aggregates) = exp.run();
    emit_csv(&records, &aggregates, &out.join("records.csv"))?;
    for a in &aggregates {
        println!(
            "{} {} S={} mean_e_rel={:.6e} mean_db={:.3} std_db={:.3} trials={}",
            a.scheme,
            a.encoder.name(),
            a.s,
            a.mean_e_rel,
            a.mean_db,
            a.std_db,
            a.trials
        );
    }
    let failed = records.iter().filter(|r| !r.succeeded()).count();
    if failed > 0 {
        eprintln!("warning: {failed} trials failed; see records.csv");
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Basis { points, degree, at } => basis(&points, degree, &at),
        Command::Fit {
            nodes,
            values,
            at,
            coeffs,
        } => fit(&nodes, &values, &at, coeffs),
        Command::Simulate {
            n,
            k,
            s,
            function,
            encoder,
            seed,
            trial,
            rows,
            cols,
        } => simulate(n, k, s, function, encoder, seed, trial, (rows, cols)),
        Command::Bounds {
            which,
            n,
            s,
            c,
            c1,
            g4sup,
            hmin,
            hmax,
        } => bounds(which, n, s, [c, c1, g4sup, hmin, hmax]),
        Command::Experiment { config, out } => experiment(&config, &out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
