//! Deterministic number formatting and CSV output.

use std::io::{self, Write};

use ccfilter_core::response::to_db;
use ccfilter_core::Sweep;

/// CSV column header, LF-terminated rows follow.
pub const CSV_HEADER: &str = "omega_rad_s,freq_hz,mag,mag_db,phase_deg";

/// Nine significant digits in scientific notation, e.g. `1.41421356e4`.
pub fn sci9(x: f64) -> String {
    format!("{x:.8e}")
}

/// Human-oriented fixed/scientific choice with `digits` significant digits.
pub fn sig(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if (-4..9).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.prec$e}", prec = digits - 1)
    }
}

pub fn write_sweep_csv(out: &mut dyn Write, sweep: &Sweep) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for (w, h) in sweep.samples() {
        let mag = h.norm();
        writeln!(
            out,
            "{},{},{},{},{}",
            sci9(*w),
            sci9(w / std::f64::consts::TAU),
            sci9(mag),
            sci9(to_db(mag)),
            sci9(h.arg().to_degrees())
        )?;
    }
    Ok(())
}
