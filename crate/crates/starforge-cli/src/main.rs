//! `starforge` — exact star-operation queries over compositionally built
//! integral domains, a fixture corpus runner, and a brute-force box oracle
//! for cross-checking closures.
//!
//! Exit codes: 0 = pass / decided answer, 1 = corpus or oracle mismatch,
//! 2 = usage or schema error, 3 = build failure, 10 = Unknown verdict.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use starforge::verdict::Truth;
use starforge_cli::{corpus, domfile, oraclecmd, report, CliError};

#[derive(Parser)]
#[command(
    name = "starforge",
    about = "Exact star-operation closures and property classification for compositionally built integral domains",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a single query against a domain file.
    Check {
        /// Path to a domain JSON file.
        file: PathBuf,
        /// Query: t-local, classify, closure:<ideal>:<op>, t-ideal:<prime>,
        /// well-behaved:<prime>, gv:<ideal>, comparable, dim, spectrum.
        #[arg(long)]
        query: String,
        /// Box radius for the oracle cross-check of closure queries.
        #[arg(long = "box", value_name = "N")]
        box_radius: Option<i64>,
        /// Emit the report as canonical JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Fixture-corpus operations.
    Corpus {
        #[command(subcommand)]
        cmd: CorpusCmd,
    },
    /// Compare an engine closure against the brute-force box oracle.
    Oracle {
        /// Path to a domain JSON file.
        file: PathBuf,
        /// Named ideal to close (top-layer staircase ideals only).
        #[arg(long)]
        ideal: String,
        /// Star operation: v, t, or w.
        #[arg(long)]
        op: String,
        /// Box radius (default 8); point count capped by STARFORGE_BOX_CAP.
        #[arg(long = "box", value_name = "N")]
        box_radius: Option<i64>,
    },
}

#[derive(Subcommand)]
enum CorpusCmd {
    /// Evaluate every fixture's expectations under a directory.
    Run {
        /// Directory containing *.json fixtures.
        dir: PathBuf,
        /// Evaluate fixtures concurrently (output order stays deterministic).
        #[arg(long)]
        parallel: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.cmd {
        Cmd::Check {
            file,
            query,
            box_radius,
            json,
        } => {
            let domain = domfile::parse_domain(&file)?;
            let model = domfile::build_model(&domain)?;
            let rep = report::run_query(&model, &query)?;
            if json {
                print!("{}", domfile::canonical_json(&rep)?);
            } else {
                print!("{}", report::render_text(&rep));
            }
            if let Some(r) = box_radius {
                if let Some(code) = oraclecmd::cross_check(&model, &query, r)? {
                    return Ok(code);
                }
            }
            Ok(match rep.verdict.value {
                Truth::Unknown => 10,
                _ => 0,
            })
        }
        Cmd::Corpus {
            cmd: CorpusCmd::Run { dir, parallel },
        } => corpus::run(&dir, parallel),
        Cmd::Oracle {
            file,
            ideal,
            op,
            box_radius,
        } => {
            let domain = domfile::parse_domain(&file)?;
            let model = domfile::build_model(&domain)?;
            oraclecmd::run(&model, &ideal, &op, box_radius)
        }
    }
}
