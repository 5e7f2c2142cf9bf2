use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hitchin_shear::commands::{cmd_cover, cmd_gram, cmd_pair, cmd_selfcheck, cmd_validate};
use hitchin_shear::report::EXIT_INPUT_ERROR;

/// Exact pairings of shearing cocycles on train tracks.
#[derive(Parser)]
#[command(name = "hshear", version)]
struct Cli {
    /// Print the report as JSON.
    #[arg(long, global = true, conflicts_with = "text")]
    json: bool,
    /// Print the report as plain text (the default).
    #[arg(long, global = true)]
    text: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a track file and describe its complementary regions.
    Validate { track: PathBuf },
    /// Build the orientation double cover of a base track.
    Cover {
        track: PathBuf,
        /// Write the cover here instead of embedding it in the report.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Pair two twisted cocycles on a cover with both formulas.
    Pair {
        cover: PathBuf,
        first: PathBuf,
        second: PathBuf,
        #[arg(long)]
        n: usize,
    },
    /// Gram matrix of the pairing on a basis of twisted cocycles.
    Gram {
        cover: PathBuf,
        #[arg(long)]
        n: usize,
    },
    /// Run the seeded consistency checks.
    Selfcheck {
        #[arg(long, default_value_t = 6)]
        n_max: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Validate { track } => cmd_validate(track),
        Command::Cover { track, output } => cmd_cover(track, output.as_deref()),
        Command::Pair {
            cover,
            first,
            second,
            n,
        } => cmd_pair(cover, first, second, *n),
        Command::Gram { cover, n } => cmd_gram(cover, *n),
        Command::Selfcheck { n_max, seed } => cmd_selfcheck(*n_max, *seed),
    };
    match result {
        Ok(report) => {
            if cli.json {
                print!("{}", report.to_json());
            } else {
                print!("{}", report.to_text());
            }
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INPUT_ERROR as u8)
        }
    }
}
