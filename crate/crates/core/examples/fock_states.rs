//! Sparse Fock states: coherent truncation, tensor products and photon
//! counting statistics.
//!
//!     cargo run --example fock_states

use hardy_sim::fock::{default_cutoff, PureState, C64};
use hardy_sim::measurement::{count_distribution, joint_count_distribution};

fn main() -> hardy_sim::Result<()> {
    let alpha = C64::new(1.5, 0.5);
    let tail = 1e-12;
    let cut = default_cutoff(alpha.norm(), tail);
    let coh = PureState::coherent(alpha, cut)?.with_labels(&["a"])?;
    println!("coherent |{alpha}>: cutoff {cut}, {} terms, norm deficit {:.3e}", coh.len(), coh.norm_deficit());

    let mean = alpha.norm_sqr();
    let counts = count_distribution(&coh, coh.mode_id("a")?)?;
    println!("  n   P(n)              Poisson");
    for (k, p) in counts.iter().take(8) {
        let n = k[0];
        let poisson = (-mean).exp() * mean.powi(n as i32) / (1..=n).map(f64::from).product::<f64>();
        println!("  {n:<3} {p:<17.12} {poisson:.12}");
    }

    let photon = PureState::fock_state(&[1], &[1])?.with_labels(&["b"])?;
    let joint = coh.tensor(&photon)?;
    println!("\n|alpha> (x) |1>: modes {:?}, {} terms", joint.labels(), joint.len());
    let table = joint_count_distribution(&joint, &[joint.mode_id("a")?, joint.mode_id("b")?])?;
    println!("P(a=0, b=1) = {:.12}", table.prob(&[0, 1]));
    println!("P(b=0)      = {:.12}", table.prob_where(|k| k[1] == 0));

    let ids = [joint.mode_id("a")?];
    println!("purity of mode a in the product: {:.15}", joint.bipartition_purity(&ids)?);
    Ok(())
}
