//! Binary checkpoints and the run configuration with overrides.

use navier_picard::cli::{initial_field, RunConfig};
use navier_picard::fields::{read_checkpoint, write_checkpoint, Checkpoint};

fn main() -> navier_picard::Result<()> {
    let overrides = ["grid.n=16".to_string(), "run.preset=abc_flow".into(), "run.perturbation=0.1".into()];
    let cfg = RunConfig::load(None, &overrides)?;
    println!("{}", cfg.to_toml()?);
    let field = Checkpoint::Vector(initial_field(&cfg)?);
    let path = std::env::temp_dir().join("navier_picard_example.bin");
    write_checkpoint(&path, &field)?;
    let back = read_checkpoint(&path)?;
    println!("{} bytes written, identical after reading back: {}", field.to_bytes().len(), back.to_bytes() == field.to_bytes());
    std::fs::remove_file(&path)?;
    Ok(())
}
