//! Enumerating deterministic local strategies: with the three zeros
//! enforced, none of them can produce the joint D event.
//!
//!     cargo run --example lhv

use std::collections::BTreeSet;

use hardy_sim::lhv::{lhv_enumerate, HardyZero};

fn main() {
    let cases: [(&str, &[HardyZero]); 4] = [
        ("none", &[]),
        ("NN", &[HardyZero::NN]),
        ("NN, HN", &[HardyZero::NN, HardyZero::HN]),
        ("NN, HN, NH", &HardyZero::ALL),
    ];
    for (name, zeros) in cases {
        let set: BTreeSet<_> = zeros.iter().copied().collect();
        let bound = lhv_enumerate(&set);
        println!("zeros {{{name}}}: {} strategies survive, max P(D, D) = {}", bound.surviving.len(), bound.max_p4);
        for s in bound.surviving.iter().filter(|s| s.gives_hardy_event()) {
            println!("    {s}");
        }
    }
}
