// NaN must fail every range check, so comparisons are written negated.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;
mod failure;
mod scenario;
mod table;

use clap::error::ErrorKind;
use clap::Parser;
use gaussdyn::Convention;

use args::{Cli, Command};
use commands::Ctx;
use failure::Failure;

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Failure::Usage("--threads must be ≥ 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Usage(e.to_string()))?;
    }
    let ctx = Ctx {
        conv: if cli.paper_verbatim {
            Convention::PaperVerbatim
        } else {
            Convention::Derived
        },
        config: cli.config,
        out: cli.out,
    };
    match &cli.command {
        Command::Evolve(a) => commands::evolve(&ctx, a),
        Command::PhaseDiagram(a) => commands::phase_diagram(&ctx, a),
        Command::Esd(a) => commands::esd(&ctx, a),
        Command::Robustness(a) => commands::robustness(&ctx, a),
        Command::Asymptotic => commands::asymptotic(&ctx),
        Command::Validate(a) => commands::validate(&ctx, a),
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let name = cli.command.name();
    if let Err(e) = run(cli) {
        eprintln!("gaussdyn {name}: {e}");
        std::process::exit(e.exit_code());
    }
}
