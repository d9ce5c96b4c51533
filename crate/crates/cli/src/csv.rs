use std::io::{self, Write};

use crate::numfmt::g17;
use crate::runner::{ErrorRecord, SweepRow, WindowDiagnostic};

pub const RECORD_HEADER: &str = "t_s,method,iteration,window,error_rad";
pub const SWEEP_HEADER: &str = "N,sup_omega_practical,sup_omega_theoretical";
pub const WINDOW_HEADER: &str =
    "method,window,t_start_s,t_end_s,precondition,precondition_exceeded,iterations,converged,diverged,final_delta,fit_condition,ill_conditioned";

pub fn write_records(mut w: impl Write, records: &[ErrorRecord]) -> io::Result<()> {
    writeln!(w, "{RECORD_HEADER}")?;
    for r in records {
        writeln!(w, "{},{},{},{},{}", g17(r.t), r.method, r.iteration, r.window, g17(r.error))?;
    }
    Ok(())
}

pub fn write_windows(mut w: impl Write, windows: &[WindowDiagnostic]) -> io::Result<()> {
    writeln!(w, "{WINDOW_HEADER}")?;
    for d in windows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            d.method,
            d.window,
            g17(d.t_start),
            g17(d.t_end),
            g17(d.precondition),
            d.precondition_exceeded() as u8,
            d.iterations,
            d.converged as u8,
            d.diverged as u8,
            g17(d.final_delta),
            g17(d.condition_estimate),
            d.ill_conditioned as u8,
        )?;
    }
    Ok(())
}

pub fn write_sweep(mut w: impl Write, rows: &[SweepRow]) -> io::Result<()> {
    writeln!(w, "{SWEEP_HEADER}")?;
    for r in rows {
        let practical = r.practical.map_or_else(|| "nan".to_string(), g17);
        writeln!(w, "{},{},{}", r.samples, practical, g17(r.theoretical))?;
    }
    Ok(())
}
