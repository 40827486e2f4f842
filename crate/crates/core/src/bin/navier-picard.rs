use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use navier_picard::cli::{
    cmd_checkpoint_roundtrip, cmd_compare_schemes, cmd_constants, cmd_contraction, cmd_run, Exit, RunConfig,
};

#[derive(Parser)]
#[command(version, about = "Heat-kernel Picard scheme for 3D Navier-Stokes in Leray form")]
struct Cli {
    /// TOML run configuration
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override one key, e.g. `--set scheme.nu=0.5` (repeatable)
    #[arg(long = "set", value_name = "SECTION.KEY=VALUE", global = true)]
    overrides: Vec<String>,
    /// Output directory
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the global scheme and write report, tables and checkpoints
    Run,
    /// Print C_G, C_K, C_s as JSON
    Constants {
        #[arg(long)]
        nu: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        rho: f64,
    },
    /// One step; print the contraction table
    Contraction,
    /// Compare the star and non-star local limits
    CompareSchemes,
    /// Write the initial field to PATH and read it back
    Roundtrip { path: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut stdout = std::io::stdout();
    let cfg = match RunConfig::load(cli.config.as_deref(), &cli.overrides) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(Exit::Config.code() as u8);
        }
    };
    let out = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
    let exit = match cli.command {
        Command::Run => cmd_run(&cfg, &out, &mut stdout),
        Command::Constants { nu, rho } => cmd_constants(nu.unwrap_or(cfg.scheme.nu), rho, cfg.scheme.c_n, &mut stdout),
        Command::Contraction => cmd_contraction(&cfg, cli.out.as_deref(), &mut stdout),
        Command::CompareSchemes => cmd_compare_schemes(&cfg, &mut stdout),
        Command::Roundtrip { path } => cmd_checkpoint_roundtrip(&cfg, &path, &mut stdout),
    };
    ExitCode::from(exit.code() as u8)
}
