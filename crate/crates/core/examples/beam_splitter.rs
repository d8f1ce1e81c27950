//! The beam-splitter element against a dense matrix exponential, and two
//! textbook interference effects.
//!
//!     cargo run --example beam_splitter

use std::f64::consts::FRAC_1_SQRT_2;

use hardy_sim::elements::{apply_beam_splitter, bs_unitary_oracle, BeamSplitter};
use hardy_sim::fock::{ModeId, PureState};

fn main() -> hardy_sim::Result<()> {
    let (a, b) = (ModeId(0), ModeId(1));

    // Hong-Ou-Mandel: one photon in each port never exits one per port.
    let hom = apply_beam_splitter(&PureState::fock_state(&[1, 1], &[1, 1])?, &BeamSplitter::balanced(a, b)?)?;
    println!("50:50 on |1,1>:");
    for (k, amp) in hom.sorted_terms() {
        println!("  |{},{}>  {amp:.6}", k[0], k[1]);
    }

    // A single photon entering port b picks up i on reflection.
    let one = apply_beam_splitter(&PureState::fock_state(&[0, 1], &[1, 1])?, &BeamSplitter::balanced(a, b)?)?;
    println!("\n50:50 on |0,1>: |1,0> {:.6}, |0,1> {:.6}", one.amplitude(&[1, 0]), one.amplitude(&[0, 1]));

    let cutoff = 6;
    let t = 0.6;
    let u = bs_unitary_oracle(cutoff, t)?;
    let bs = BeamSplitter::new(t, a, b)?;
    let d = (cutoff + 1) as usize;
    let mut worst = 0f64;
    for m in 0..=cutoff {
        for n in 0..=(cutoff - m) {
            let out = apply_beam_splitter(&PureState::fock_state(&[m, n], &[cutoff, cutoff])?, &bs)?;
            for p in 0..=cutoff {
                for q in 0..=cutoff {
                    let dense = u[[p as usize * d + q as usize, m as usize * d + n as usize]];
                    worst = worst.max((out.amplitude(&[p, q]) - dense).norm());
                }
            }
        }
    }
    println!("\nt = {t}, cutoff {cutoff}: max |element - expm| over m+n <= cutoff = {worst:.2e}");

    let half = BeamSplitter::new(FRAC_1_SQRT_2, a, b)?;
    let s = PureState::fock_state(&[3, 2], &[3, 2])?;
    let out = apply_beam_splitter(&s, &half)?;
    println!("|3,2> through 50:50: {} terms, norm {:.15}", out.len(), out.norm_sqr());
    Ok(())
}
