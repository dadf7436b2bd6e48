mod args;
mod commands;
mod config;
mod manifest;

use std::process::ExitCode;
use std::time::{Instant, SystemTime};

use clap::{CommandFactory, FromArgMatches};

use args::{Cli, Command};
use commands::{Failure, EXIT_USAGE};
use manifest::{manifest_path, params_of, Manifest};

fn run() -> Result<(), Failure> {
    let root = Cli::command();
    let argv = config::expand(std::env::args().collect(), &root).map_err(Failure::usage)?;
    let matches = match root.clone().args_override_self(true).try_get_matches_from(&argv) {
        Ok(m) => m,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return if code == 0 { Ok(()) } else { Err(Failure { code, msg: String::new() }) };
        }
    };
    let cli = Cli::from_arg_matches(&matches).map_err(|e| Failure::usage(e.to_string()))?;
    if cli.jobs == 0 {
        return Err(Failure::usage("--jobs must be at least 1"));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs)
        .build_global()
        .map_err(|e| Failure::usage(e.to_string()))?;

    // Leaf subcommand and its matches, for the manifest.
    let mut leaf = &root;
    let mut leaf_matches = &matches;
    let mut name = Vec::new();
    while let Some((sub, m)) = leaf_matches.subcommand() {
        leaf = leaf.find_subcommand(sub).expect("parsed subcommand exists");
        leaf_matches = m;
        name.push(sub.to_string());
    }
    let params = params_of(leaf, leaf_matches);

    let started = SystemTime::now();
    let clock = Instant::now();
    let (files, primary) = match &cli.command {
        Command::Hockey(a) => (commands::hockey(a)?, a.out.clone()),
        Command::Critical(a) => (commands::critical(a)?, a.out.clone()),
        Command::Sweep(a) => (commands::sweep_cmd(a)?, a.out.clone()),
        Command::Stabilize(a) => (commands::stabilize_cmd(a)?, a.out.clone()),
        Command::Layer { action } => {
            let out = match action {
                args::LayerAction::Min(a)
                | args::LayerAction::Enum(a)
                | args::LayerAction::Greedy(a)
                | args::LayerAction::ZetaStar(a) => a.out.clone(),
            };
            (commands::layer(action)?, out)
        }
    };
    let manifest = Manifest { command: name.join(" "), params, files, started, elapsed: clock.elapsed() };
    let path = manifest_path(&primary);
    manifest.write(&path)?;
    for f in &manifest.files {
        println!("wrote {}", f.display());
    }
    println!("wrote {}", path.display());
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if !f.msg.is_empty() {
                eprintln!("error: {}", f.msg);
            }
            ExitCode::from(f.code as u8)
        }
    }
}
