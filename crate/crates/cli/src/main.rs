//! One binary, subcommand per pipeline stage. Every randomized path draws
//! from the --seed flag and nothing else, so reruns reproduce output files
//! byte for byte; --threads changes scheduling only, never numbers.

mod args;
mod commands;
mod context;
mod io_util;

use clap::Parser;

fn main() {
    let cli = args::Cli::parse();
    if let Some(threads) = cli.threads {
        if threads == 0 {
            eprintln!("error: --threads must be at least 1");
            std::process::exit(1);
        }
        // Build the global pool up front so every module sees the cap.
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: could not configure {threads} worker threads: {e}");
            std::process::exit(1);
        }
    }
    if let Err(e) = commands::dispatch(cli) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
