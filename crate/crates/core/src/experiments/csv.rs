use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use super::{Aggregate, TrialRecord};
use crate::error::{Error, Result};

pub const RECORD_HEADER: &str = "scheme,encoder,N,K,S,trial,seed,e_rel,e_rel_db,beta_clamped";
pub const AGGREGATE_HEADER: &str = "scheme,encoder,S,mean_e_rel,mean_db,std_db,trials";

/// `dir/runs.csv` -> `dir/runs_aggregates.csv`.
pub fn aggregates_path(path: &Path) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}_aggregates.{}", ext.to_string_lossy()),
        None => format!("{stem}_aggregates"),
    };
    path.with_file_name(name)
}

/// 17 significant digits, period decimal separator.
fn num(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else {
        format!("{x:.16e}")
    }
}

fn write_file(
    path: &Path,
    body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
) -> Result<()> {
    let io = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::create(path).map_err(io)?;
    let mut w = BufWriter::new(file);
    body(&mut w).map_err(io)?;
    w.flush().map_err(io)
}

/// Writes the per-trial records to `path` and the aggregates to
/// [`aggregates_path`]`(path)`.
pub fn emit_csv(records: &[TrialRecord], aggregates: &[Aggregate], path: &Path) -> Result<()> {
    write_file(path, |w| {
        writeln!(w, "{RECORD_HEADER}")?;
        for r in records {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{},{}",
                r.scheme,
                r.encoder.name(),
                r.n,
                r.k,
                r.s,
                r.trial,
                r.seed,
                num(r.e_rel),
                num(r.e_rel_db),
                r.beta_clamped
            )?;
        }
        Ok(())
    })?;
    write_file(&aggregates_path(path), |w| {
        writeln!(w, "{AGGREGATE_HEADER}")?;
        for a in aggregates {
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                a.scheme,
                a.encoder.name(),
                a.s,
                num(a.mean_e_rel),
                num(a.mean_db),
                num(a.std_db),
                a.trials
            )?;
        }
        Ok(())
    })
}
