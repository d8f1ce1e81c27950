//! Declarative circuits: load a TOML step list, validate it and run it.
//!
//!     cargo run --example circuit_file -- [path/to/circuit.toml]

use hardy_sim::circuit::{run, validate, Circuit, CircuitStep, RunOptions};
use hardy_sim::measurement::joint_count_distribution;

const DEFAULT: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/circuits/mach_zehnder.toml");

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args().nth(1).unwrap_or_else(|| DEFAULT.to_string());
    let c = Circuit::from_toml(&std::fs::read_to_string(&path)?)?;
    println!("circuit `{}` with {} steps from {path}", c.name, c.steps.len());

    let r = run(&c, &RunOptions::default())?;
    let s = &r.final_state;
    let ids: Vec<_> = s.labels().iter().map(|l| s.mode_id(l)).collect::<Result<_, _>>()?;
    let d = joint_count_distribution(s, &ids)?;
    println!("counts over {:?}:", d.labels());
    for (k, p) in d.iter() {
        println!("  {k:?}  {p:.12}");
    }

    let broken = c.clone().then(CircuitStep::mirror("nowhere"));
    for diag in validate(&broken) {
        println!("validation: {diag}");
    }

    println!("\nround trip through TOML:\n{}", c.to_toml());
    Ok(())
}
