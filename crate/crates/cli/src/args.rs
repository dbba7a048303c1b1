//! Command-line grammar.

use std::path::PathBuf;

use ccfilter_core::filter::FilterMode;
use ccfilter_core::netlist::parse_value;
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Engineering-notation value (`10k`, `4.7n`, `2meg`).
fn eng(s: &str) -> Result<f64, String> {
    parse_value(s).ok_or_else(|| format!("malformed value {s:?}"))
}

fn mode(s: &str) -> Result<FilterMode, String> {
    s.parse()
}

#[derive(Debug, Parser)]
#[command(name = "ccfilter", version, about = "CCII multifunction biquad: design, simulation and verification")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print ω₀, Q and bandwidth with both sensitivity tables.
    Design {
        #[command(flatten)]
        design: DesignArgs,
        /// Relative step for the finite-difference check.
        #[arg(long, default_value = "1e-6", value_parser = eng)]
        step: f64,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Print the ω₀ and Q sensitivity tables.
    Sens {
        #[command(flatten)]
        design: DesignArgs,
        #[arg(long, default_value = "1e-6", value_parser = eng)]
        step: f64,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Frequency sweep of one filter mode as CSV.
    Sweep {
        /// lp, hp, bp or notch
        #[arg(value_parser = mode)]
        mode: FilterMode,
        #[command(flatten)]
        design: DesignArgs,
        #[command(flatten)]
        sweep: SweepArgs,
        #[arg(long, value_enum, default_value_t = Engine::ClosedForm)]
        engine: Engine,
        /// Run both engines and fail (exit 3) if they disagree.
        #[arg(long)]
        check: bool,
        /// Write the CSV here instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Sweep a netlist file, classify the response and measure it.
    Simulate {
        /// Netlist file.
        file: PathBuf,
        #[command(flatten)]
        sweep: SweepArgs,
        /// Write the CSV here; the summary then goes to stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Retune R3 and C5 for new ω₀ and bandwidth targets.
    Tune {
        #[command(flatten)]
        design: DesignArgs,
        /// Target ω₀ in rad/s (default: current).
        #[arg(long, value_parser = eng, allow_hyphen_values = true)]
        omega0: Option<f64>,
        /// Target bandwidth ω₀/Q in rad/s (default: current).
        #[arg(long, value_parser = eng, allow_hyphen_values = true)]
        bw: Option<f64>,
    },
    /// Emit the behavioral netlist of the filter for one mode.
    Netlist {
        /// lp, hp, bp or notch
        #[arg(value_parser = mode)]
        mode: FilterMode,
        #[command(flatten)]
        design: DesignArgs,
        /// Write the netlist here instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

/// Component values; defaults are the 10k/14k/10n reference design.
#[derive(Debug, Clone, Args)]
pub struct DesignArgs {
    #[arg(long, default_value = "10k", value_parser = eng, allow_hyphen_values = true)]
    pub r1: f64,
    #[arg(long, default_value = "14k", value_parser = eng, allow_hyphen_values = true)]
    pub r3: f64,
    #[arg(long, default_value = "10k", value_parser = eng, allow_hyphen_values = true)]
    pub r4: f64,
    #[arg(long, default_value = "10k", value_parser = eng, allow_hyphen_values = true)]
    pub r6: f64,
    #[arg(long, default_value = "10n", value_parser = eng, allow_hyphen_values = true)]
    pub c2: f64,
    #[arg(long, default_value = "10n", value_parser = eng, allow_hyphen_values = true)]
    pub c5: f64,
    #[arg(long, default_value = "1", value_parser = eng, allow_hyphen_values = true)]
    pub b1: f64,
    #[arg(long, default_value = "1", value_parser = eng, allow_hyphen_values = true)]
    pub b2: f64,
    #[arg(long, default_value = "1", value_parser = eng, allow_hyphen_values = true)]
    pub k1: f64,
    #[arg(long, default_value = "1", value_parser = eng, allow_hyphen_values = true)]
    pub k2: f64,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    /// Lowest angular frequency, rad/s.
    #[arg(long, value_parser = eng, allow_hyphen_values = true)]
    pub wmin: Option<f64>,
    /// Highest angular frequency, rad/s.
    #[arg(long, value_parser = eng, allow_hyphen_values = true)]
    pub wmax: Option<f64>,
    /// Grid density.
    #[arg(long, default_value_t = 200)]
    pub ppd: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Engine {
    ClosedForm,
    Mna,
}
