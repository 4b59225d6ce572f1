use std::io;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use lpcode::cli::{self, Moves, RunConfig};
use lpcode::exec::ExecConfig;
use lpcode::prover::SearchLimits;

#[derive(Parser)]
#[command(
    name = "lpcode",
    version,
    about = "Check, run and verify logical pseudocode"
)]
struct Args {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(clap::Args)]
struct Limits {
    /// Iterative-deepening depth bound.
    #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u32).range(1..))]
    depth: u32,
    /// Clause attempts per search.
    #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    steps: u64,
}

impl Limits {
    fn get(&self) -> SearchLimits {
        SearchLimits::new(self.depth, self.steps).expect("ranges checked by clap")
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Print diagnostics for a program.
    Check {
        file: PathBuf,
        #[command(flatten)]
        limits: Limits,
    },
    /// Execute a query and print the formula it evolves to.
    Run {
        file: PathBuf,
        #[arg(long)]
        query: String,
        /// Comma-separated choices for `!` quantifiers, consumed in order.
        #[arg(long, conflicts_with = "interactive")]
        moves: Option<String>,
        /// Ask for each move on the terminal.
        #[arg(long)]
        interactive: bool,
        #[command(flatten)]
        limits: Limits,
        /// Highest loop index that may be unfolded.
        #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
        max_unfold: u64,
        /// Write the derivation trace here.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Re-check a trace against its program.
    Verify { trace: PathBuf, file: PathBuf },
}

fn main() {
    let args = Args::parse();
    let (mut out, mut err) = (io::stdout().lock(), io::stderr().lock());
    let code = match args.cmd {
        Cmd::Check { file, limits } => cli::cmd_check(&file, limits.get(), &mut out, &mut err),
        Cmd::Run {
            file,
            query,
            moves,
            interactive,
            limits,
            max_unfold,
            trace,
        } => {
            let moves = match cli::parse_moves(moves.as_deref().unwrap_or("")) {
                Ok(m) => m,
                Err(e) => {
                    eprintln!("error: --moves: {e}");
                    std::process::exit(cli::USAGE);
                }
            };
            let cfg = RunConfig {
                program: file,
                query,
                moves: if interactive {
                    Moves::Interactive
                } else {
                    Moves::Script(moves)
                },
                exec: ExecConfig {
                    limits: limits.get(),
                    max_unfold,
                },
                trace,
            };
            cli::cmd_run(&cfg, &mut io::stdin().lock(), &mut out, &mut err)
        }
        Cmd::Verify { trace, file } => cli::cmd_verify(&trace, &file, &mut out, &mut err),
    };
    drop(out);
    std::process::exit(code);
}
