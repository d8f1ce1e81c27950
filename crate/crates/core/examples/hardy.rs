//! The four experiments and the Hardy witness, in both the ideal and the
//! fully built scheme.
//!
//!     cargo run --release --example hardy

use hardy_sim::experiments::{coarse_grain, compare_ideal_vs_full, hardy_witness, Experiment};
use hardy_sim::scheme::{SchemeParams, SourceMode};

fn main() -> hardy_sim::Result<()> {
    for mode in [SourceMode::Ideal, SourceMode::Full] {
        let p = SchemeParams::default().with_mode(mode);
        let s = hardy_witness(&p)?;
        println!("== {mode} (|alpha| = {}, phi = {})", p.alpha, p.phi);
        for e in Experiment::ALL {
            let d = s.experiment(e);
            println!("experiment {e}: {:?} vs {:?}, {} outcomes over {:?}", e.alice(), e.bob(), d.len(), d.labels());
            for (a, b, pr) in coarse_grain(e, d) {
                println!("    alice {:<5} bob {:<5} {pr:.6e}", a.as_str(), b.as_str());
            }
        }
        let w = s.witness;
        println!("P(u1>=1, u2>=1 | 1) = {:.3e}", w.p_joint_nn);
        println!("P(D, u2=0 | 2)      = {:.3e}", w.p_zero_hn);
        println!("P(u1=0, D | 3)      = {:.3e}", w.p_zero_nh);
        println!("P(D, D | 4)         = {:.15e}  (e^-2/12 = {:.15e})", w.p4, (-2f64).exp() / 12.0);
        println!("verdict at tol {:e}: {}", p.tol, s.verdict);
        println!("scissors success {:.6}, norm deficit {:.2e}\n", s.trace.cumulative(), s.norm_deficit);
    }
    let diff = compare_ideal_vs_full(&SchemeParams::default())?;
    println!("max |ideal - full| over all tables: {diff:.2e}");
    Ok(())
}
