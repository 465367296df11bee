use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cicstar::frontend::{Session, Status};
use cicstar::infer::{LoopMode, Options};

#[derive(Parser)]
#[command(name = "cicstar", version, about = "Size-based termination checking for a small dependent type theory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check source files in order, printing the type of every global.
    Check {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Print the constraints of each (co)fixpoint before the recursion check.
        #[arg(long)]
        dump_constraints: bool,
        /// Print the inference rules applied, to stderr.
        #[arg(long)]
        trace: bool,
        /// Start from an empty environment.
        #[arg(long)]
        no_prelude: bool,
        /// Render ι as `!` and ∞ as `oo`.
        #[arg(long)]
        ascii: bool,
        /// Retry the recursion check on the original constraints instead of regenerating them.
        #[arg(long)]
        literal_loop: bool,
    },
}

fn main() -> ExitCode {
    let Command::Check { files, dump_constraints, trace, no_prelude, ascii, literal_loop } = Cli::parse().command;
    let opts = Options { loop_mode: if literal_loop { LoopMode::Literal } else { LoopMode::Regenerate }, trace };
    let mut session = if no_prelude { Session::new(opts) } else { Session::with_prelude(opts) };
    for file in &files {
        let src = match std::fs::read_to_string(file) {
            Ok(s) => s,
            Err(e) => {
                eprintln!("error: cannot read {}: {e}", file.display());
                return ExitCode::from(2);
            }
        };
        let out = session.run(&src);
        print!("{}", out.render(ascii, dump_constraints));
        if trace {
            for (_, r) in &out.reports {
                for rule in &r.trace {
                    eprintln!("{rule}");
                }
            }
        }
        let name = file.display().to_string();
        for d in &out.diagnostics {
            eprint!("{}", d.render(&name, &src));
        }
        if out.status != Status::Ok {
            return ExitCode::from(out.status.exit_code() as u8);
        }
    }
    ExitCode::SUCCESS
}
