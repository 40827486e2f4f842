//! A complete controlled run written to a directory, as the `run` command does.

use navier_picard::cli::{cmd_run, RunConfig};

fn main() -> navier_picard::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "target/full_run".into());
    let overrides = [
        "grid.n=16".to_string(),
        "run.n_steps=5".into(),
        "control.mode=simple".into(),
        "control.c=40.0".into(),
    ];
    let cfg = RunConfig::load(None, &overrides)?;
    let exit = cmd_run(&cfg, out.as_ref(), &mut std::io::stdout());
    println!("exit code {}; outputs in {out}", exit.code());
    Ok(())
}
