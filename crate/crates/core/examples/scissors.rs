//! Quantum scissors: truncating a coherent beam to its vacuum and
//! one-photon part, with the left-over beam kept as a phase reference.
//!
//!     cargo run --example scissors -- [alpha] [phi]

use hardy_sim::fock::{PureState, C64};
use hardy_sim::scheme::{build_scissors, SchemeParams};

fn main() -> hardy_sim::Result<()> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<f64>().expect("numeric argument"));
    let p = SchemeParams {
        alpha: args.next().unwrap_or(3.0),
        phi: args.next().unwrap_or(0.0),
        ..SchemeParams::default()
    };
    let sc = build_scissors(&p)?;

    println!("|alpha| = {}, phi = {}", p.alpha, p.phi);
    for step in sc.trace.steps() {
        println!("  {:<6} p = {:.12}", step.description, step.probability);
    }
    println!("  success probability {:.12} (3 e^-2 / 4 = {:.12})", sc.trace.cumulative(), 0.75 * (-2f64).exp());

    let out = sc.out.normalize()?;
    println!("\ntruncated output:");
    for (k, amp) in out.sorted_terms() {
        println!("  |{}>  {amp:.12}", k[0]);
    }
    let target = PureState::from_terms(
        out.labels().as_slice(),
        &out.cutoffs(),
        vec![(vec![0], C64::new(1.0, 0.0)), (vec![1], C64::cis(p.phi) * 2f64.sqrt())],
    )?;
    println!("  fidelity with (|0> + sqrt2 e^(i phi)|1>)/sqrt3: {:.15}", out.fidelity(&target)?);

    let beta = C64::new(0.0, (p.alpha * p.alpha - 2.0).sqrt()) * C64::cis(p.phi);
    let reference = sc.reference;
    let coh = PureState::coherent(beta, reference.cutoffs()[0])?.with_labels(&reference.labels())?;
    println!("reference beam vs coherent({beta:.6}): fidelity {:.15}", reference.fidelity(&coh)?);
    Ok(())
}
