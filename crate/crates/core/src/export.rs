//! Plot-ready CSV tables and atomic file output.

use std::io::{self, Write};
use std::path::Path;

use crate::bootstrap::BootstrapReport;
use crate::ingest::PriceSeries;
use crate::partition::PartitionSurface;
use crate::scaling::MassExponents;
use crate::spectrum::SingularitySpectrum;

/// `q` then one `ln χ` column per box size, headed `l=<size>`.
pub fn write_surface_csv<W: Write>(surface: &PartitionSurface, mut w: W) -> io::Result<()> {
    write!(w, "q")?;
    for l in surface.scheme().sizes() {
        write!(w, ",l={l}")?;
    }
    writeln!(w)?;
    for (qi, q) in surface.grid().values().iter().enumerate() {
        write!(w, "{q}")?;
        for v in surface.row(qi) {
            write!(w, ",{v}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}

pub fn write_tau_csv<W: Write>(me: &MassExponents, mut w: W) -> io::Result<()> {
    writeln!(w, "q,tau,r")?;
    for ((q, t), r) in me.grid.values().iter().zip(&me.tau).zip(&me.r) {
        writeln!(w, "{q},{t},{r}")?;
    }
    Ok(())
}

pub fn write_spectrum_csv<W: Write>(spec: &SingularitySpectrum, mut w: W) -> io::Result<()> {
    writeln!(w, "q,alpha,f")?;
    for ((q, a), f) in spec.grid.values().iter().zip(&spec.alpha).zip(&spec.f) {
        writeln!(w, "{q},{a},{f}")?;
    }
    Ok(())
}

/// Replicate cloud; the original day is the row with `kind = original`.
pub fn write_scatter_csv<W: Write>(report: &BootstrapReport, mut w: W) -> io::Result<()> {
    writeln!(w, "kind,delta_alpha,F")?;
    writeln!(
        w,
        "original,{},{}",
        report.original.delta_alpha, report.original.big_f
    )?;
    for r in &report.replicates {
        writeln!(w, "shuffled,{},{}", r.delta_alpha, r.big_f)?;
    }
    Ok(())
}

/// Writes days in the ingestion format `date,time,price`. Times are
/// minutes from 09:31 when the day fits before midnight, bar indices
/// otherwise.
pub fn write_series_csv<W: Write>(days: &[PriceSeries], mut w: W) -> io::Result<()> {
    writeln!(w, "date,time,price")?;
    for day in days {
        let clock = day.len() <= 24 * 60 - (9 * 60 + 31);
        for (i, v) in day.values().iter().enumerate() {
            if clock {
                let m = 9 * 60 + 31 + i;
                writeln!(w, "{},{:02}:{:02},{v}", day.day_id(), m / 60, m % 60)?;
            } else {
                writeln!(w, "{},{:06},{v}", day.day_id(), i + 1)?;
            }
        }
    }
    Ok(())
}

/// Writes via a sibling temporary file and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    std::fs::create_dir_all(dir)?;
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let tmp = dir.join(format!(".{name}.tmp-{}", std::process::id()));
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)
}
