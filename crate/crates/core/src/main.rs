use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use holonomy_lab::cli::{load_config, run_subcommand, Flags, Group, EXIT_USAGE};

#[derive(Clone, Copy, ValueEnum)]
enum Command {
    Flatness,
    Transport,
    Monodromy,
    Abphase,
    Wong,
    Vacua,
    YmEnergy,
    Verify,
}

#[derive(Clone, Copy, ValueEnum)]
enum GroupArg {
    #[value(name = "Z")]
    Z,
    #[value(name = "Z2")]
    Z2,
}

/// Holonomy, monodromy and spin transport for matrix connections on the punctured plane.
#[derive(Parser)]
#[command(version)]
struct Args {
    command: Command,
    /// Scene file (TOML).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Transport tolerance, in [1e-13, 1e-2].
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Write the transport trajectory here.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Accept a custom connection as flat without checking.
    #[arg(long)]
    assume_flat: bool,
    /// Also compare spin transport with conjugation by the holonomy.
    #[arg(long)]
    verify_ad: bool,
    #[arg(long, value_enum, default_value = "Z")]
    group: GroupArg,
}

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("HOLONOMY_LAB_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| format!("HOLONOMY_LAB_THREADS must be a non-negative integer, got `{raw}`"))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| e.to_string())?;
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = Args::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_USAGE as u8);
    }
    let name = args
        .command
        .to_possible_value()
        .expect("no skipped variants")
        .get_name()
        .to_string();
    let config = match &args.config {
        Some(p) => match load_config(p) {
            Ok(c) => Some(c),
            Err(o) => {
                eprint!("{}", o.report);
                return ExitCode::from(o.code as u8);
            }
        },
        None => None,
    };
    let flags = Flags {
        tol: args.tol,
        seed: args.seed,
        csv: args.csv,
        assume_flat: args.assume_flat,
        verify_ad: args.verify_ad,
        group: match args.group {
            GroupArg::Z => Group::Z,
            GroupArg::Z2 => Group::Z2,
        },
    };
    let outcome = run_subcommand(&name, config.as_ref(), &flags);
    if outcome.code == EXIT_USAGE {
        eprint!("{}", outcome.report);
    } else {
        print!("{}", outcome.report);
    }
    ExitCode::from(outcome.code as u8)
}
