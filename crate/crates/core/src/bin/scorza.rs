use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use scorza::picard::G0BetaReading;
use scorza::report::{self, Command, OutputFormat, PicardQuery, RunConfig};
use scorza::theta::Tolerance;
use scorza::verify::DEFAULT_SEED;

#[derive(Parser)]
#[command(name = "scorza", version, about = "Theta functions, Scorza quartics and spin moduli divisor classes")]
struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Truncation error target for theta sums.
    #[arg(long, global = true)]
    eps_trunc: Option<f64>,
    /// Threshold below which a value counts as zero.
    #[arg(long, global = true)]
    eps_zero: Option<f64>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate theta[c] or one of its derivatives.
    Theta {
        #[arg(long)]
        period: PathBuf,
        /// "e1,e2;d1,d2" with entries 0 or 1 (numerators over 2).
        #[arg(long)]
        char: String,
        /// "re,im;re,im"; defaults to the origin.
        #[arg(long)]
        point: Option<String>,
        /// Comma-separated derivative indices, e.g. "0,0,1".
        #[arg(long)]
        deriv: Option<String>,
    },
    /// Taylor jet at the origin.
    Jet {
        #[arg(long)]
        period: PathBuf,
        #[arg(long)]
        char: String,
    },
    /// Scorza quartic, cross-checked against the beta tensor.
    Quartic {
        #[arg(long)]
        period: PathBuf,
        #[arg(long)]
        char: String,
    },
    /// Szego kernel.
    Szego {
        #[command(subcommand)]
        action: SzegoCmd,
    },
    /// Limit model of the Scorza curve over a boundary divisor.
    Degeneration {
        #[arg(long)]
        divisor: String,
        #[arg(long)]
        g: u64,
        #[arg(long)]
        i: Option<u64>,
    },
    /// Divisor-class computations.
    Picard {
        #[arg(value_enum)]
        query: Query,
        #[arg(long)]
        g: u64,
        /// Value of G_0 . beta_0 used in the solve.
        #[arg(long = "g0-beta0", value_enum, default_value_t = Beta0::Zero)]
        g0_beta0: Beta0,
        /// Replay a ledger read from this JSON file instead of the computed one.
        #[arg(long)]
        replay: Option<PathBuf>,
    },
    /// Run the acceptance suite.
    VerifyAll {
        #[arg(long)]
        quick: bool,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum SzegoCmd {
    Eval {
        #[arg(long)]
        period: PathBuf,
        #[arg(long)]
        char: String,
        #[arg(long)]
        point: String,
    },
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Beta0 {
    #[value(name = "0")]
    Zero,
    #[value(name = "12")]
    Twelve,
}

#[derive(Clone, Copy, ValueEnum)]
enum Query {
    SzegoHodge,
    Slope,
    PullbackDelta0,
    Ledger,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let defaults = Tolerance::default();
    let tolerance = match Tolerance::new(
        cli.eps_trunc.unwrap_or(defaults.eps_trunc),
        cli.eps_zero.unwrap_or(defaults.eps_zero),
    ) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let command = match cli.command {
        Cmd::Theta { period, char, point, deriv } => Command::Theta { period, char, point, deriv },
        Cmd::Jet { period, char } => Command::Jet { period, char },
        Cmd::Quartic { period, char } => Command::Quartic { period, char },
        Cmd::Szego { action: SzegoCmd::Eval { period, char, point } } => Command::Szego { period, char, point },
        Cmd::Degeneration { divisor, g, i } => Command::Degeneration { divisor, g, i },
        Cmd::Picard { query, g, g0_beta0, replay } => Command::Picard {
            query: match query {
                Query::SzegoHodge => PicardQuery::SzegoHodge,
                Query::Slope => PicardQuery::Slope,
                Query::PullbackDelta0 => PicardQuery::PullbackDelta0,
                Query::Ledger => PicardQuery::Ledger,
            },
            g,
            g0_reading: if g0_beta0 == Beta0::Twelve { G0BetaReading::Twelve } else { G0BetaReading::Zero },
            replay,
        },
        Cmd::VerifyAll { quick, seed } => Command::VerifyAll { quick, seed },
    };
    let format = match cli.format {
        Format::Text => OutputFormat::Text,
        Format::Json => OutputFormat::Json,
    };
    let cfg = RunConfig { command, format, tolerance };
    match report::run(&cfg) {
        Ok(r) => {
            let mut text = r.render(format);
            if format == OutputFormat::Json {
                text.push('\n');
            }
            // ignore EPIPE
            let _ = std::io::stdout().lock().write_all(text.as_bytes());
            ExitCode::from(r.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
