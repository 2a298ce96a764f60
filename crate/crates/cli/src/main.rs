//! `kmzeta`: special values of Dedekind zeta functions and the class-number-one
//! test for the cubic fields `x^3 - m x^2 - (m+1) x - 1`.

mod config;
mod output;

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kmzeta::dedekind::DEFAULT_TERM_BUDGET;
use kmzeta::oracles::DEFAULT_MARGIN;
use kmzeta::{Error, Result};

use config::{positive_u64, Format, MRange, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "kmzeta", version, about = "Exact zeta values and a class-number-one test for the fields K_m")]
struct Cli {
    /// Largest working precision, in bits, of any certified ball computation.
    #[arg(long, global = true, env = "KMZETA_PRECISION_CAP", default_value_t = 4096)]
    precision_cap: u32,

    /// Largest number of lattice points a single Dedekind sum may visit.
    #[arg(long, global = true, default_value_t = DEFAULT_TERM_BUDGET)]
    term_budget: u128,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Field-level queries.
    #[command(subcommand)]
    Fields(FieldsCommand),
    /// Zeta values.
    #[command(subcommand)]
    Zeta(ZetaCommand),
    /// Decide whether every ideal (nu) D_K, nu in S_1, is prime.
    Criterion {
        #[arg(long)]
        m_range: MRange,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Heuristic analytic class number.
    Classnumber {
        #[arg(long)]
        m: i64,
        #[arg(long, value_parser = positive_u64, default_value_t = 1_000_000)]
        prime_bound: u64,
        /// Largest accepted distance from the nearest integer.
        #[arg(long, default_value_t = DEFAULT_MARGIN)]
        margin: f64,
    },
    /// Exact generalized Dedekind sum B(n, r, A, 0).
    DedekindSum(DedekindArgs),
}

#[derive(Debug, Subcommand)]
enum FieldsCommand {
    /// Validity of each m: integral basis {1, a, a^2} and unit group <-1, a, a+1>.
    Validate {
        #[arg(long)]
        m_range: MRange,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Term {
    #[value(name = "M1")]
    M1,
    #[value(name = "M2")]
    M2,
    #[value(name = "C1")]
    C1,
    #[value(name = "C2")]
    C2,
    Total,
}

#[derive(Debug, Subcommand)]
enum ZetaCommand {
    /// zeta_K(2, P) by the Halbritter-Pohst formula, reflected to s = -1.
    Hp {
        #[arg(long)]
        m: i64,
        #[arg(long, value_enum, ignore_case = true, default_value = "total")]
        term: Term,
        /// Starting precision of the ball computations.
        #[arg(long, default_value_t = 128)]
        bits: u32,
    },
    /// zeta_K(-1) by Siegel's formula.
    Siegel {
        #[arg(long)]
        m: i64,
        /// Print every nu in S_1.
        #[arg(long)]
        list: bool,
    },
    /// Certified truncated Euler product for zeta_K(2).
    Euler {
        #[arg(long)]
        m: i64,
        #[arg(long, value_parser = positive_u64)]
        prime_bound: u64,
    },
}

#[derive(Debug, Args)]
struct DedekindArgs {
    /// Row-major entries a11,...,a33.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    matrix: Vec<i64>,
    #[arg(long, value_delimiter = ',', required = true)]
    r: Vec<usize>,
    /// Use the Smith-reduced evaluator.
    #[arg(long)]
    reduced: bool,
}

/// A failure that maps to an exit code.
enum Failure {
    Core(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

/// Output of a command plus the exit code it asks for.
struct Done {
    text: String,
    code: u8,
}

impl From<String> for Done {
    fn from(text: String) -> Self {
        Done { text, code: 0 }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(done) => {
            let mut out = std::io::stdout().lock();
            if out.write_all(done.text.as_bytes()).and_then(|_| out.flush()).is_err() {
                return ExitCode::from(1);
            }
            ExitCode::from(done.code)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_resource_exhaustion() { 2 } else { 1 })
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn config(cli: &Cli, start_bits: u32, format: Format) -> Result<RunConfig> {
    RunConfig::new(start_bits, cli.precision_cap.max(start_bits), cli.term_budget, format)
}

fn run(cli: Cli) -> std::result::Result<Done, Failure> {
    let default_bits = kmzeta::PrecisionSchedule::default().start.min(cli.precision_cap);
    match &cli.command {
        Command::Fields(FieldsCommand::Validate { m_range, format }) => {
            let cfg = config(&cli, default_bits, *format)?;
            Ok(output::fields_validate(&cfg, m_range)?.into())
        }
        Command::Zeta(ZetaCommand::Hp { m, term, bits }) => {
            let cfg = config(&cli, *bits, Format::Table)?;
            let spec = cfg.valid_field(*m)?;
            Ok(output::zeta_hp(&cfg, &spec, *term)?.into())
        }
        Command::Zeta(ZetaCommand::Siegel { m, list }) => {
            let cfg = config(&cli, default_bits, Format::Table)?;
            let spec = cfg.valid_field(*m)?;
            Ok(output::zeta_siegel(&spec, *list)?.into())
        }
        Command::Zeta(ZetaCommand::Euler { m, prime_bound }) => {
            let cfg = config(&cli, default_bits, Format::Table)?;
            let spec = cfg.valid_field(*m)?;
            Ok(output::zeta_euler(&spec, *prime_bound)?.into())
        }
        Command::Criterion { m_range, format } => {
            let cfg = config(&cli, default_bits, *format)?;
            output::criterion(&cfg, m_range)
        }
        Command::Classnumber { m, prime_bound, margin } => {
            let cfg = config(&cli, default_bits, Format::Table)?;
            let spec = cfg.valid_field(*m)?;
            Ok(output::classnumber(&spec, *prime_bound, *margin)?.into())
        }
        Command::DedekindSum(args) => {
            let cfg = config(&cli, default_bits, Format::Table)?;
            Ok(output::dedekind_sum(&cfg, &args.matrix, &args.r, args.reduced)?.into())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }
}
