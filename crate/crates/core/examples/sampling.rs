//! Finite-shot emulation of experiment 4 with a seeded generator and Wilson
//! intervals on the joint D event.
//!
//!     cargo run --release --example sampling -- [shots] [seed]

use hardy_sim::experiments::{run_experiment, Experiment};
use hardy_sim::sampling::{sample_counts, wilson_interval, GENERATOR, Z95};
use hardy_sim::scheme::SchemeParams;

fn main() -> hardy_sim::Result<()> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<u64>().expect("integer argument"));
    let shots = args.next().unwrap_or(100_000);
    let seed = args.next().unwrap_or(7);

    let e = Experiment::new(4)?;
    let d = run_experiment(4, &SchemeParams::default())?;
    let rec = sample_counts(&d, shots, seed)?;
    println!("{shots} shots, seed {seed}, generator {GENERATOR}");
    println!("{} distinct outcomes observed out of {}", rec.counts.len(), d.len());

    let mut top = rec.counts.clone();
    top.sort_by(|x, y| y.1.cmp(&x.1).then(x.0.cmp(&y.0)));
    for (k, c) in top.iter().take(5) {
        println!("  {k:?}  {c:>6}  exact {:.6}", d.prob(k));
    }

    let k = rec.count_where(|o| e.is_witness_event(o));
    let (lo, hi) = wilson_interval(k, shots, Z95);
    let exact = e.witness_event(&d);
    let sigma = (exact * (1.0 - exact) / shots as f64).sqrt();
    println!("\njoint D: {k} hits, frequency {:.6}, 95% [{lo:.6}, {hi:.6}]", rec.frequency(k));
    println!("exact {exact:.6}, deviation {:.2} sigma", (rec.frequency(k) - exact) / sigma);
    Ok(())
}
