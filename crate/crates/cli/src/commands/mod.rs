//! One module per subcommand, plus the dispatcher that wires a parsed
//! command line to the right handler.

mod capacity;
mod conjecture;
mod energy;
mod generate;
mod matrix;
mod minimize;
mod repulsion_eval;

use anyhow::Result;

use crate::args::{Cli, Command};
use crate::context::RunContext;

pub fn dispatch(cli: Cli) -> Result<()> {
    let name = match &cli.command {
        Command::Generate { .. } => "generate",
        Command::Minimize { .. } => "minimize",
        Command::Repulsion { .. } => "repulsion",
        Command::Energy { .. } => "energy",
        Command::Matrix { .. } => "matrix",
        Command::Conjecture { .. } => "conjecture",
        Command::Capacity { .. } => "capacity",
    };
    let ctx = RunContext::new(&cli, name);
    match cli.command {
        Command::Generate { kind } => generate::run(ctx, kind),
        Command::Minimize { set, schedule } => minimize::run(ctx, set, schedule),
        Command::Repulsion {
            set,
            schedule,
            measure,
        } => repulsion_eval::run(ctx, set, schedule, measure),
        Command::Energy {
            set,
            measure,
            samples,
            schedule,
            c,
            eps,
        } => energy::run(ctx, set, measure, samples, schedule, c, eps),
        Command::Matrix { source } => matrix::run(ctx, source),
        Command::Conjecture {
            cantor,
            random,
            count,
            n,
            r,
            box_size,
            config,
        } => conjecture::run(ctx, cantor, random, count, n, r, box_size, config),
        Command::Capacity { cantor, config } => capacity::run(ctx, cantor, config),
    }
}
