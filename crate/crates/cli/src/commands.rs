use std::fs;
use std::io::{self, Write};
use std::path::Path;

use ccfilter_core::circuit::validate;
use ccfilter_core::filter::{
    build_reference_netlist, design_params, nonideal_transfer_function, tune, DesignError, FilterDesign,
    FilterMode, Param,
};
use ccfilter_core::mna::{self, MnaError};
use ccfilter_core::netlist::{parse_netlist_with_warnings, serialize_netlist};
use ccfilter_core::response::{centered_grid, classify, decade_grid, measure, FrequencyResponse};
use ccfilter_core::sensitivity::{numeric_sensitivities, SensitivityReport};
use ccfilter_core::{Design, Params, Sweep};
use num_complex::Complex64;
use thiserror::Error;

use crate::args::{Command, DesignArgs, Engine, Format, SweepArgs};
use crate::format::{sig, write_sweep_csv};

const TAU: f64 = std::f64::consts::TAU;
/// Default sweep span for `sweep`, in decades around ω₀.
const SWEEP_DECADES: f64 = 3.0;
/// Default span for `simulate`; classification needs ±2 decades of skirt.
const SIMULATE_DECADES: f64 = 4.0;
const MIN_PPD: usize = 8;
/// Engine agreement for `sweep --check`: relative, plus an absolute floor
/// scaled to the response's peak for points at a transmission zero.
const CHECK_REL_TOL: f64 = 1e-6;
const CHECK_ABS_FLOOR: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Check(String),
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Check(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }
}

impl From<MnaError> for CliError {
    fn from(e: MnaError) -> Self {
        match e {
            MnaError::InvalidGrid | MnaError::NoExcitation | MnaError::Response(_) => CliError::Usage(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

fn io_err(e: io::Error) -> CliError {
    CliError::Usage(format!("i/o: {e}"))
}

pub fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Design { design, step, format } => cmd_design(&design, step, format, true),
        Command::Sens { design, step, format } => cmd_design(&design, step, format, false),
        Command::Sweep { mode, design, sweep, engine, check, output } => {
            cmd_sweep(mode, &design, &sweep, engine, check, output.as_deref())
        }
        Command::Simulate { file, sweep, output } => cmd_simulate(&file, &sweep, output.as_deref()),
        Command::Tune { design, omega0, bw } => cmd_tune(&design, omega0, bw),
        Command::Netlist { mode, design, output } => {
            let d = build_design(&design)?;
            let text = serialize_netlist(&build_reference_netlist(&d, mode));
            emit(output.as_deref(), text.as_bytes())
        }
    }
}

fn build_design(a: &DesignArgs) -> Result<Design, CliError> {
    let values = [
        ("r1", a.r1),
        ("r3", a.r3),
        ("r4", a.r4),
        ("r6", a.r6),
        ("c2", a.c2),
        ("c5", a.c5),
        ("b1", a.b1),
        ("b2", a.b2),
        ("k1", a.k1),
        ("k2", a.k2),
    ];
    for (flag, v) in values {
        if v.is_nan() || v <= 0.0 {
            return Err(CliError::Usage(format!("{flag} must be positive")));
        }
    }
    FilterDesign::new(a.r1, a.r3, a.r4, a.r6, a.c2, a.c5)
        .and_then(|d| d.with_gains(a.b1, a.b2, a.k1, a.k2))
        .map_err(|e| match e {
            DesignError::NonPositive(p) | DesignError::NonFinite(p) | DesignError::GainOutOfRange(p) => {
                CliError::Usage(format!("{}: {e}", p.name().to_ascii_lowercase()))
            }
            other => CliError::Usage(other.to_string()),
        })
}

fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, bytes).map_err(io_err),
        None => io::stdout().write_all(bytes).map_err(io_err),
    }
}

fn print_params(out: &mut String, p: &Params, format: Format) {
    match format {
        Format::Table => {
            out.push_str(&format!(
                "omega0     {} rad/s ({} Hz)\n",
                sig(p.omega0, 9),
                sig(p.omega0_hz(), 9)
            ));
            out.push_str(&format!(
                "bandwidth  {} rad/s ({} Hz)\n",
                sig(p.bandwidth, 9),
                sig(p.bandwidth_hz(), 9)
            ));
            out.push_str(&format!("Q          {}\n", sig(p.q, 9)));
        }
        Format::Csv => {
            out.push_str("quantity,value\n");
            for (k, v) in [
                ("omega0_rad_s", p.omega0),
                ("omega0_hz", p.omega0_hz()),
                ("bandwidth_rad_s", p.bandwidth),
                ("bandwidth_hz", p.bandwidth_hz()),
                ("q", p.q),
            ] {
                out.push_str(&format!("{k},{}\n", crate::format::sci9(v)));
            }
        }
    }
}

fn print_sensitivities(out: &mut String, reports: [&SensitivityReport<f64>; 2], format: Format) {
    match format {
        Format::Table => {
            for r in reports {
                out.push_str(&format!("\nsensitivity of {}\n", r.target));
                out.push_str(&format!("{:<6}{:>14}{:>14}{:>12}\n", "param", "analytic", "numeric", "|diff|"));
                for (p, s) in &r.entries {
                    out.push_str(&format!(
                        "{:<6}{:>14}{:>14}{:>12}\n",
                        p.name(),
                        format!("{:.6}", s.analytic),
                        format!("{:.6}", s.numeric.unwrap_or(f64::NAN)),
                        format!("{:.1e}", s.abs_diff().unwrap_or(f64::NAN)),
                    ));
                }
            }
        }
        Format::Csv => {
            out.push_str("target,param,analytic,numeric,abs_diff\n");
            for r in reports {
                for (p, s) in &r.entries {
                    out.push_str(&format!(
                        "{},{},{},{},{}\n",
                        r.target,
                        p,
                        crate::format::sci9(s.analytic),
                        crate::format::sci9(s.numeric.unwrap_or(f64::NAN)),
                        crate::format::sci9(s.abs_diff().unwrap_or(f64::NAN)),
                    ));
                }
            }
        }
    }
}

fn cmd_design(args: &DesignArgs, step: f64, format: Format, with_params: bool) -> Result<(), CliError> {
    let d = build_design(args)?;
    let (w, q) = numeric_sensitivities(&d, step).map_err(|e| CliError::Usage(format!("step: {e}")))?;
    let mut out = String::new();
    if with_params {
        print_params(&mut out, &design_params(&d), format);
        if format == Format::Csv {
            out.push('\n');
        }
    }
    print_sensitivities(&mut out, [&w, &q], format);
    emit(None, out.as_bytes())
}

fn grid(sweep: &SweepArgs, center: f64, decades: f64) -> Result<Vec<f64>, CliError> {
    if sweep.ppd < MIN_PPD {
        return Err(CliError::Usage(format!("ppd must be at least {MIN_PPD}")));
    }
    let half = 10f64.powf(decades / 2.0);
    let lo = sweep.wmin.unwrap_or(center / half);
    let hi = sweep.wmax.unwrap_or(center * half);
    if !(lo > 0.0 && lo.is_finite() && hi.is_finite()) {
        return Err(CliError::Usage("wmin must be positive".into()));
    }
    if lo.is_nan() || hi.is_nan() || lo >= hi {
        return Err(CliError::Usage("wmin must be below wmax".into()));
    }
    if sweep.wmin.is_none() && sweep.wmax.is_none() {
        return Ok(centered_grid(center, decades, sweep.ppd));
    }
    Ok(decade_grid(lo, hi, sweep.ppd))
}

fn closed_form_sweep(d: &Design, mode: FilterMode, omegas: &[f64]) -> Result<Sweep, CliError> {
    FrequencyResponse::from_tf(&nonideal_transfer_function(d, mode), omegas).map_err(|e| CliError::Usage(e.to_string()))
}

fn agree(a: Complex64, b: Complex64, peak: f64) -> bool {
    (a - b).norm() <= CHECK_REL_TOL * a.norm().max(b.norm()) + CHECK_ABS_FLOOR * peak
}

fn cmd_sweep(
    mode: FilterMode,
    args: &DesignArgs,
    sweep: &SweepArgs,
    engine: Engine,
    check: bool,
    output: Option<&Path>,
) -> Result<(), CliError> {
    let d = build_design(args)?;
    let omegas = grid(sweep, design_params(&d).omega0, SWEEP_DECADES)?;
    let netlist = build_reference_netlist(&d, mode);
    let closed = closed_form_sweep(&d, mode, &omegas)?;
    let simulated = if engine == Engine::Mna || check { Some(mna::ac_sweep(&netlist, &omegas)?) } else { None };
    let chosen = match engine {
        Engine::ClosedForm => &closed,
        Engine::Mna => simulated.as_ref().expect("computed for the mna engine"),
    };
    let mut csv = Vec::new();
    write_sweep_csv(&mut csv, chosen).map_err(io_err)?;
    emit(output, &csv)?;

    if let Some(sim) = simulated.filter(|_| check) {
        let peak = closed.magnitudes().into_iter().fold(0.0, f64::max);
        let bad = closed
            .samples()
            .iter()
            .zip(sim.samples())
            .find(|((_, a), (_, b))| !agree(*a, *b, peak));
        if let Some(((w, a), (_, b))) = bad {
            return Err(CliError::Check(format!(
                "engines disagree at omega = {} rad/s: closed-form {a}, mna {b}",
                sig(*w, 9)
            )));
        }
        eprintln!("check: closed-form and mna agree at all {} points", omegas.len());
    }
    Ok(())
}

fn cmd_simulate(file: &Path, sweep: &SweepArgs, output: Option<&Path>) -> Result<(), CliError> {
    let source = fs::read(file).map_err(|e| CliError::Usage(format!("{}: {e}", file.display())))?;
    let text = String::from_utf8(source).map_err(|_| CliError::Usage(format!("{}: invalid UTF-8", file.display())))?;
    let parsed = parse_netlist_with_warnings::<f64>(&text).map_err(|errs| {
        let lines: Vec<String> = errs.iter().map(|e| format!("{}:{e}", file.display())).collect();
        CliError::Usage(format!("parse failed\n{}", lines.join("\n")))
    })?;
    for w in &parsed.warnings {
        eprintln!("warning: {}: {w}", file.display());
    }
    let netlist = parsed.netlist;
    validate(&netlist).map_err(|errs| {
        let lines: Vec<String> = errs.iter().map(ToString::to_string).collect();
        CliError::Usage(format!("invalid netlist\n{}", lines.join("\n")))
    })?;

    let center = match mna::extract_tf(&netlist, netlist.capacitor_count()) {
        Ok(tf) if tf.order() > 0 => tf.omega0(),
        _ => mna::characteristic_omega(&netlist),
    };
    let omegas = grid(sweep, center, SIMULATE_DECADES)?;
    let resp = mna::ac_sweep(&netlist, &omegas)?;

    let mut csv = Vec::new();
    write_sweep_csv(&mut csv, &resp).map_err(io_err)?;
    emit(output, &csv)?;

    let summary = match classify(&resp) {
        Err(e) => format!("{e}\n"),
        Ok(kind) => match measure(&resp, kind) {
            Ok(m) => format!(
                "{kind}, omega0 = {} rad/s ({} Hz), Q = {}, BW = {} rad/s\n\
                 dc gain {}, hf gain {}, peak/null gain {}\n",
                sig(m.omega0, 6),
                sig(m.omega0 / TAU, 6),
                sig(m.q, 4),
                sig(m.bandwidth, 6),
                sig(m.dc_gain, 6),
                sig(m.hf_gain, 6),
                sig(m.peak_or_null_gain, 6),
            ),
            Err(e) => format!("{kind}, measurement failed: {e}\n"),
        },
    };
    if output.is_some() {
        print!("{summary}");
    } else {
        eprint!("{summary}");
    }
    Ok(())
}

fn cmd_tune(args: &DesignArgs, omega0: Option<f64>, bw: Option<f64>) -> Result<(), CliError> {
    let d = build_design(args)?;
    let current = design_params(&d);
    for (flag, v) in [("omega0", omega0), ("bw", bw)] {
        if let Some(v) = v {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::Usage(format!("{flag} must be positive")));
            }
        }
    }
    let target_w = omega0.unwrap_or(current.omega0);
    let target_bw = bw.unwrap_or(current.bandwidth);
    let tuned = tune(&d, target_w, target_bw).map_err(|e| CliError::Check(e.to_string()))?;
    let achieved = design_params(&tuned);

    let mut out = String::new();
    for (p, unit) in [(Param::R3, "ohm"), (Param::C5, "F")] {
        out.push_str(&format!(
            "{}  {} {unit} (was {})\n",
            p,
            sig(tuned.get(p), 9),
            sig(d.get(p), 9)
        ));
    }
    let rel = |a: f64, b: f64| (a - b).abs() / b;
    let (ew, eb) = (rel(achieved.omega0, target_w), rel(achieved.bandwidth, target_bw));
    out.push_str(&format!(
        "omega0     {} rad/s ({} Hz), target {} (rel err {ew:.1e})\n",
        sig(achieved.omega0, 9),
        sig(achieved.omega0_hz(), 9),
        sig(target_w, 9)
    ));
    out.push_str(&format!(
        "bandwidth  {} rad/s, target {} (rel err {eb:.1e})\n",
        sig(achieved.bandwidth, 9),
        sig(target_bw, 9)
    ));
    out.push_str(&format!("Q          {}\n", sig(achieved.q, 9)));
    emit(None, out.as_bytes())?;
    if ew > 1e-9 || eb > 1e-9 {
        return Err(CliError::Check("tuned design misses its targets".into()));
    }
    Ok(())
}
