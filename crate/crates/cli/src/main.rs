//! `dt4`: command-line driver for the dt4-core pipelines.
//!
//! Every subcommand prints one JSON document on stdout. `--pretty` adds a
//! human-readable table on stderr. Exit status: 0 when every check in the
//! report passes, 1 when a check fails, 2 on usage errors, 3 when the
//! computation itself fails.

mod commands;

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dt4_core::localize::{EvalOptions, LimitRoute, PrefactorVariant};
use dt4_core::qseries::Half;
use num_rational::BigRational;

#[derive(Parser, Debug)]
#[command(name = "dt4", version, about = "Rank-two DT partition functions of local elliptic surfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Type I generating function, its modular form and the type II series.
    Zseries(ZseriesArgs),
    /// Ampleness and the stable-chamber bound for a polarization.
    Chamber(ChamberArgs),
    /// Type II fixed-locus components on the elliptic K3.
    Fixedloci(FixedlociArgs),
    /// One type II component integral.
    Localize(LocalizeArgs),
    /// The residue coefficient of the rank-two wall-crossing sum.
    Mochizuki(MochizukiArgs),
    /// Universal polynomials of the type II integrals from toric data.
    Fit(FitArgs),
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Worker threads.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Print a table on stderr.
    #[arg(long)]
    pub pretty: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, Default)]
pub enum Route {
    #[default]
    Direction,
    Symbolic,
}

#[derive(Args, Debug, Clone)]
pub struct Eval {
    /// How the non-equivariant limit is taken.
    #[arg(long, value_enum, default_value_t = Route::Direction)]
    pub route: Route,
}

impl Eval {
    pub fn options(&self) -> EvalOptions {
        EvalOptions {
            route: match self.route {
                Route::Direction => LimitRoute::Direction,
                Route::Symbolic => LimitRoute::Symbolic,
            },
            ..Default::default()
        }
    }
}

fn parse_half(s: &str) -> Result<Half, String> {
    Half::parse(s).map_err(|e| e.to_string())
}

fn parse_rational(s: &str) -> Result<BigRational, String> {
    s.trim().parse::<BigRational>().map_err(|e| format!("{s:?}: {e}"))
}

fn parse_variant(s: &str) -> Result<PrefactorVariant, String> {
    s.parse().map_err(|e: dt4_core::Error| e.to_string())
}

/// Comma-separated toric-divisor coordinates.
#[derive(Clone, Debug)]
pub struct Coords(pub Vec<i64>);

fn parse_divisor(s: &str) -> Result<Coords, String> {
    s.split(',')
        .map(|c| c.trim().parse::<i64>().map_err(|e| format!("{c:?}: {e}")))
        .collect::<Result<_, _>>()
        .map(Coords)
}

#[derive(Args, Debug, Clone)]
pub struct ZseriesArgs {
    /// Exclusive bound on q-exponents, e.g. 10 or 9/2.
    #[arg(long, default_value = "10", value_parser = parse_half)]
    pub order: Half,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct ChamberArgs {
    #[arg(long, default_value_t = 0)]
    pub k: i64,
    #[arg(long, default_value_t = 2)]
    pub r: i64,
    #[arg(long, value_parser = parse_rational)]
    pub delta: BigRational,
    #[arg(long, value_parser = parse_rational)]
    pub t: BigRational,
    #[arg(long, value_parser = parse_rational)]
    pub u: BigRational,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct FixedlociArgs {
    #[arg(long)]
    pub m: i64,
    #[arg(long)]
    pub n: i64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct LocalizeArgs {
    /// Preset name, or `k3` for the elliptic K3 through the universal fit.
    #[arg(long, default_value = "plane")]
    pub surface: String,
    #[arg(long, default_value_t = 0)]
    pub n1: u32,
    #[arg(long, default_value_t = 0)]
    pub n2: u32,
    /// `D` in toric-divisor coordinates, comma separated (default 0).
    #[arg(long, value_parser = parse_divisor, allow_hyphen_values = true)]
    pub divisor: Option<Coords>,
    /// `D = m f` on the K3.
    #[arg(long, default_value_t = 1)]
    pub m: i64,
    #[arg(long, default_value = "product", value_parser = parse_variant)]
    pub prefactor_variant: PrefactorVariant,
    /// Include every fixed-point term in the report.
    #[arg(long)]
    pub audit: bool,
    #[command(flatten)]
    pub eval: Eval,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct MochizukiArgs {
    #[arg(long, default_value = "plane")]
    pub surface: String,
    #[arg(long)]
    pub n: i64,
    /// `β1` in toric-divisor coordinates (default 0).
    #[arg(long, value_parser = parse_divisor, allow_hyphen_values = true)]
    pub lb1: Option<Coords>,
    /// `β2` in toric-divisor coordinates (default 0).
    #[arg(long, value_parser = parse_divisor, allow_hyphen_values = true)]
    pub lb2: Option<Coords>,
    /// `L` in toric-divisor coordinates (default `K`).
    #[arg(long, value_parser = parse_divisor, allow_hyphen_values = true)]
    pub l: Option<Coords>,
    /// Geometric genus entering the integrand (default: the surface's).
    #[arg(long)]
    pub p_g: Option<i64>,
    #[arg(long)]
    pub audit: bool,
    #[command(flatten)]
    pub eval: Eval,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct FitArgs {
    /// Comma-separated presets of the battery.
    #[arg(long, default_value = "plane,p1xp1,f1,f2,f3", value_delimiter = ',')]
    pub surfaces: Vec<String>,
    /// Fit every `(n1, n2)` with `n1 + n2` up to this bound.
    #[arg(long, default_value_t = 2)]
    pub degree_bound: u32,
    #[arg(long, default_value = "product", value_parser = parse_variant)]
    pub prefactor_variant: PrefactorVariant,
    #[command(flatten)]
    pub eval: Eval,
    #[command(flatten)]
    pub common: Common,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let common = match &cli.command {
        Command::Zseries(a) => &a.common,
        Command::Chamber(a) => &a.common,
        Command::Fixedloci(a) => &a.common,
        Command::Localize(a) => &a.common,
        Command::Mochizuki(a) => &a.common,
        Command::Fit(a) => &a.common,
    };
    if let Some(j) = common.jobs {
        if j == 0 {
            eprintln!("error: --jobs must be positive");
            return ExitCode::from(2);
        }
        dt4_core::par::init_pool(j);
    }
    let pretty = common.pretty;
    let result = match &cli.command {
        Command::Zseries(a) => commands::zseries(a),
        Command::Chamber(a) => commands::chamber(a),
        Command::Fixedloci(a) => commands::fixedloci(a),
        Command::Localize(a) => commands::localize(a),
        Command::Mochizuki(a) => commands::mochizuki(a),
        Command::Fit(a) => commands::fit(a),
    };
    match result {
        Ok(report) => {
            let text = serde_json::to_string_pretty(&report.json).expect("reports serialize");
            let mut out = std::io::stdout().lock();
            if writeln!(out, "{text}").and_then(|_| out.flush()).is_err() {
                return ExitCode::from(3);
            }
            if pretty {
                eprint!("{}", report.table);
            }
            if report.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}
