//! Splitting Alice's and Bob's local oscillators off the scissors'
//! reference beam, and checking they come out uncorrelated.
//!
//!     cargo run --example reference_chain

use hardy_sim::fock::{PureState, C64};
use hardy_sim::scheme::{build_reference_chain, build_scissors, pre_detection_state, SchemeParams};

fn report(name: &str, s: &PureState, expected: C64) -> hardy_sim::Result<()> {
    let target = PureState::coherent(expected, s.cutoffs()[0])?.with_labels(&s.labels())?;
    println!("{name:<10} cutoff {:>3}  target {expected:>22.6}  fidelity {:.15}", s.cutoffs()[0], s.fidelity(&target)?);
    Ok(())
}

fn main() -> hardy_sim::Result<()> {
    let p = SchemeParams {
        phi: 0.7,
        ..SchemeParams::default()
    };
    let e = p.phase();
    let sc = build_scissors(&p)?;
    let chain = build_reference_chain(&sc.reference, &p)?;
    report("lo_alice", &chain.lo_alice, -e)?;
    report("lo_bob", &chain.lo_bob, C64::new(0.0, 1.0) * e)?;
    report("remainder", &chain.remainder, -e * (p.alpha * p.alpha - 4.0).sqrt())?;

    let pre = pre_detection_state(&p)?;
    println!("\npre-detection state: modes {:?}, {} terms", pre.state.labels(), pre.state.len());
    for group in pre.factor_groups()? {
        let names: Vec<_> = group.iter().map(|id| pre.state.label(*id)).collect();
        println!("  purity of {names:?} against the rest: {:.15}", pre.state.bipartition_purity(&group)?);
    }
    Ok(())
}
