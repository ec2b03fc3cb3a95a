mod commands;
mod expr;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "metric-jet", version, about = "Tangency, contacts and first-order tests for nonsmooth maps")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Estimate the contact of a map at a point for a valued monoid.
    Contact {
        #[command(flatten)]
        f: FnArgs,
        #[command(flatten)]
        monoid: MonoidArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Place a point on the differentiability ladder.
    Classify {
        #[command(flatten)]
        f: FnArgs,
        /// Ratios probed for neo-fractality (comma separated, `2pi` means e^-2pi).
        #[arg(long, value_delimiter = ',')]
        probe_r: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Jet distance between two maps at a point (default: the constant map at f(a)).
    Jetdist {
        #[command(flatten)]
        f: FnArgs,
        /// Second map, same syntax as `--fn`.
        #[arg(long = "gn")]
        g: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Lipschitz ratio and norm of a homogeneous map about its centre.
    Rho {
        #[command(flatten)]
        f: FnArgs,
        #[arg(long, value_enum, default_value = "general")]
        class: ClassArg,
        #[arg(long)]
        r: Option<f64>,
        /// r = e^-VALUE; VALUE may be `2pi`.
        #[arg(long)]
        r_exp: Option<String>,
        /// Half-width of the annulus used for the ratio.
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
        #[command(flatten)]
        common: Common,
    },
    /// First-order test for a strict local minimum of a scalar map.
    Extremum {
        #[command(flatten)]
        f: FnArgs,
        #[command(flatten)]
        monoid: MonoidArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Exact distance from a rational to the union of scaled Cantor sets.
    Cantor {
        /// A decimal or a fraction `p/q`.
        #[arg(long, allow_hyphen_values = true)]
        at: String,
        #[command(flatten)]
        common: Common,
    },
    /// Build x * fp(log|x|) from a periodic fp and check its self-similarity.
    Fractalize {
        /// Periodic function of x1, same syntax as `--fn`.
        #[arg(long = "fn")]
        func: String,
        /// Period; a number or `2pi`.
        #[arg(long, default_value = "2pi")]
        period: String,
        /// Points where the result is tabulated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        at: Vec<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// List the built-in maps.
    Catalog {
        #[arg(long)]
        name: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Run the counter-example suite.
    Suite {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Debug, Clone)]
pub struct FnArgs {
    /// `catalog:NAME` or an expression in x1..xn.
    #[arg(long = "fn")]
    pub func: String,
    /// Base point, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub at: Vec<f64>,
    /// Value of the map at the origin, for expressions undefined there.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub value_at_0: Vec<f64>,
}

#[derive(Args, Debug, Clone)]
pub struct MonoidArgs {
    #[arg(long, value_enum, default_value = "rplus")]
    pub monoid: MonoidArg,
    #[arg(long)]
    pub r: Option<f64>,
    /// r = e^-VALUE; VALUE may be `2pi`.
    #[arg(long)]
    pub r_exp: Option<String>,
    #[arg(long, value_enum, default_value = "canonical")]
    pub variant: VariantArg,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum MonoidArg {
    Reals,
    Rplus,
    Unit,
    Nr,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum VariantArg {
    Canonical,
    Standard,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassArg {
    General,
    Rplus,
    Fractal,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormArg {
    L1,
    L2,
    Linf,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Write the JSON report here (`-` for stdout).
    #[arg(long)]
    pub json: Option<String>,
    /// Directory for CSV traces.
    #[arg(long)]
    pub csv_traces: Option<PathBuf>,
    #[arg(long, env = "METRIC_JET_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Relative tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Absolute tolerance for zero.
    #[arg(long)]
    pub tol_zero: Option<f64>,
    /// Shell radii, comma separated and decreasing.
    #[arg(long, value_delimiter = ',')]
    pub radii: Vec<f64>,
    /// Seeded directions on top of the coordinate axes.
    #[arg(long)]
    pub dirs: Option<usize>,
    /// Random samples per shell.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, value_enum)]
    pub norm: Option<NormArg>,
    /// Omit the timestamp so that reports are byte-identical across runs.
    #[arg(long)]
    pub reproducible: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
