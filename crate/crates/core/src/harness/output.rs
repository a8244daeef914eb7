use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::SweepResult;
use crate::error::Result;

pub const CSV_HEADER: &str = "sweep_var,value,mean_epsilon,mean_snr_db,mean_d_hat_km,coverage";

/// Writes `results` as CSV. Floats carry 17 significant digits so every
/// value parses back to the identical `f64`.
pub fn write_csv<W: Write>(results: &[SweepResult], mut out: W) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in results {
        writeln!(
            out,
            "{},{},{:.16e},{:.16e},{:.16e},{:.16e}",
            r.variable,
            r.value,
            r.mean_epsilon,
            r.mean_measured_snr_db,
            r.mean_d_hat_km,
            r.empirical_coverage,
        )?;
    }
    out.flush()?;
    Ok(())
}

pub fn emit_csv(results: &[SweepResult], path: impl AsRef<Path>) -> Result<()> {
    write_csv(results, BufWriter::new(File::create(path)?))
}
