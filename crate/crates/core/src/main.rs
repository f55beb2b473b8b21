use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use wrsn::baselines::ControllerKind;
use wrsn::config::{self, LoadedConfig};
use wrsn::protocol::{serve_stdio, serve_tcp};
use wrsn::{report, Real};

/// Air-ground collaborative charging simulator.
#[derive(Debug, Parser)]
#[command(name = "wrsn", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run seeded episodes under a scripted controller.
    Run(RunArgs),
    /// Serve the environment over newline-delimited JSON.
    Serve(ServeArgs),
    /// Resolve a config file against the defaults and print it.
    Validate {
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// random, stationary or greedy.
    #[arg(long, value_parser = parse_policy)]
    policy: ControllerKind,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    episodes: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    metrics_out: PathBuf,
    #[arg(long)]
    traj_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[group(id = "transport", required = true, multiple = false, args = ["stdio", "port"])]
struct ServeArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Serve a single session on stdin/stdout.
    #[arg(long)]
    stdio: bool,
    /// Listen on 127.0.0.1:PORT; 0 picks an ephemeral port.
    #[arg(long)]
    port: Option<u16>,
}

fn parse_policy(s: &str) -> Result<ControllerKind, String> {
    s.parse()
}

fn load(path: Option<&Path>) -> Result<LoadedConfig<Real>, ExitCode> {
    match config::load::<Real>(path) {
        Ok(loaded) => {
            for w in &loaded.warnings {
                eprintln!("warning: {w}");
            }
            Ok(loaded)
        }
        Err(e) => {
            match path {
                Some(p) => eprintln!("error: {}: {e}", p.display()),
                None => eprintln!("error: {e}"),
            }
            Err(ExitCode::from(2))
        }
    }
}

fn write(path: &Path, contents: &str) -> Result<(), ExitCode> {
    std::fs::write(path, contents).map_err(|e| {
        eprintln!("error: cannot write {}: {e}", path.display());
        ExitCode::FAILURE
    })
}

fn run(args: RunArgs) -> Result<(), ExitCode> {
    let loaded = load(args.config.as_deref())?;
    let (report, trajectory) = report::run(
        &loaded.config,
        args.policy,
        args.episodes as usize,
        args.seed,
        args.traj_out.is_some(),
    )
    .map_err(|e| {
        eprintln!("error: {e}");
        ExitCode::FAILURE
    })?;
    write(&args.metrics_out, &report.metrics_csv())?;
    if let (Some(path), Some(traj)) = (&args.traj_out, trajectory) {
        write(path, &traj)?;
    }
    print!("{}", report.summary());
    Ok(())
}

fn serve(args: ServeArgs) -> Result<(), ExitCode> {
    let loaded = load(args.config.as_deref())?;
    let result = if args.stdio {
        serve_stdio(loaded.config)
    } else {
        let port = args.port.expect("clap enforces one transport");
        serve_tcp(loaded.config, port, |addr| {
            println!("listening on {addr}");
            eprintln!("port {}", addr.port());
        })
    };
    result.map_err(|e| {
        eprintln!("error: {e}");
        ExitCode::FAILURE
    })
}

fn validate(path: Option<&Path>) -> Result<(), ExitCode> {
    let loaded = load(path)?;
    print!("{}", loaded.config.to_toml());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::Serve(args) => serve(args),
        Command::Validate { config } => validate(config.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => code,
    }
}
