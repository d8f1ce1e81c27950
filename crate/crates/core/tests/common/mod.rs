//! Reference computations that share no code with the library's state
//! representation or element kernels.

#![allow(dead_code, clippy::needless_range_loop)]

use ndarray::{Array2, Array4};
use num_complex::Complex64 as C;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// `⟨n|γ⟩` for a normalized coherent state.
pub fn coherent_amp(n: u32, g: C) -> C {
    (-g.norm_sqr() / 2.0).exp() * g.powu(n) / factorial(n).sqrt()
}

/// Matrix exponential by scaling and squaring of the Taylor series.
pub fn expm(x: &Array2<C>) -> Array2<C> {
    let dim = x.nrows();
    let norm = x.iter().map(|z| z.norm()).fold(0.0, f64::max) * dim as f64;
    let mut s = 0;
    while norm / 2f64.powi(s) > 0.25 {
        s += 1;
    }
    let y = x.mapv(|z| z / 2f64.powi(s));
    let mut out = Array2::<C>::eye(dim);
    let mut term = Array2::<C>::eye(dim);
    for k in 1..60 {
        term = term.dot(&y).mapv(|z| z / k as f64);
        out += &term;
    }
    for _ in 0..s {
        out = out.dot(&out);
    }
    out
}

/// Splitter restricted to total photon number `n`: basis `|p, n−p⟩`,
/// `p = 0..=n`, as `exp(iθ(a†b + ab†))` with `cos θ = t`.
pub fn bs_block(n: usize, t: f64) -> Array2<C> {
    let theta = t.clamp(-1.0, 1.0).acos();
    let mut g = Array2::<C>::zeros((n + 1, n + 1));
    for p in 0..n {
        // a†b |p, n−p⟩ = √((p+1)(n−p)) |p+1, n−p−1⟩
        let v = (((p + 1) * (n - p)) as f64).sqrt();
        g[[p + 1, p]] = c(0.0, theta * v);
        g[[p, p + 1]] = c(0.0, theta * v);
    }
    expm(&g)
}

/// Dense four-mode register with every mode truncated at `dim − 1`.
pub struct Dense4 {
    pub psi: Array4<C>,
    pub dim: usize,
}

impl Dense4 {
    pub fn new(dim: usize) -> Self {
        Dense4 {
            psi: Array4::zeros((dim, dim, dim, dim)),
            dim,
        }
    }

    /// Apply the splitter to modes `i` (port a) and `j` (port b).
    pub fn beam_splitter(&mut self, i: usize, j: usize, t: f64) {
        let d = self.dim;
        let blocks: Vec<Array2<C>> = (0..2 * d).map(|n| bs_block(n, t)).collect();
        let mut out = Array4::<C>::zeros(self.psi.raw_dim());
        let others: Vec<usize> = (0..4).filter(|k| *k != i && *k != j).collect();
        for x in 0..d {
            for y in 0..d {
                let mut idx = [0usize; 4];
                idx[others[0]] = x;
                idx[others[1]] = y;
                for m in 0..d {
                    for n in 0..d {
                        idx[i] = m;
                        idx[j] = n;
                        let amp = self.psi[idx];
                        if amp == C::new(0.0, 0.0) {
                            continue;
                        }
                        let total = m + n;
                        let u = &blocks[total];
                        for p in 0..=total {
                            let q = total - p;
                            assert!(p < d && q < d, "register too small for {total} photons");
                            idx[i] = p;
                            idx[j] = q;
                            out[idx] += u[[p, m]] * amp;
                        }
                    }
                }
            }
        }
        self.psi = out;
    }
}

pub struct ScissorsOracle {
    pub success_prob: f64,
    /// Normalized amplitudes of the retained `out` mode on |0⟩, |1⟩.
    pub out: [C; 2],
}

/// The three-splitter scissors network on modes (s, ref, p, out), with the
/// coherent input truncated at `cutoff` photons and renormalized.
pub fn scissors_dense(alpha: f64, phi: f64, cutoff: usize) -> ScissorsOracle {
    let dim = cutoff + 2;
    let mut r = Dense4::new(dim);
    let a = C::from_polar(alpha, phi);
    let norm: f64 = (0..=cutoff as u32).map(|n| coherent_amp(n, a).norm_sqr()).sum();
    for n in 0..=cutoff {
        r.psi[[n, 0, 1, 0]] = coherent_amp(n as u32, a) / norm.sqrt();
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    r.beam_splitter(0, 1, 2f64.sqrt() / alpha);
    r.beam_splitter(2, 3, h);
    r.beam_splitter(0, 2, h);
    // Detector A is mode s, detector B is mode p.
    let mut rho = [[C::new(0.0, 0.0); 2]; 2];
    for rf in 0..dim {
        for o1 in 0..2 {
            let x = r.psi[[1, rf, 0, o1]];
            for o2 in 0..2 {
                rho[o1][o2] += x * r.psi[[1, rf, 0, o2]].conj();
            }
        }
    }
    // Probability of the record A = 1, B = 0.
    let out_weight = rho[0][0].re + rho[1][1].re;
    // The out mode is pure (product with the reference), so its state is
    // read off the first column of the reduced density matrix.
    let n0 = rho[0][0].re.sqrt();
    let out = [c(n0, 0.0) / out_weight.sqrt(), rho[1][0] / (n0 * out_weight.sqrt())];
    ScissorsOracle {
        success_prob: out_weight,
        out,
    }
}

/// `⟨d, c|` after a 50:50 splitter with signal (vacuum or one photon) in
/// port a and a unit coherent oscillator `β` in port b; port a exits to
/// `d`, port b to `c`.
pub fn homodyne_amp(signal: u32, beta: C, d: u32, cc: u32) -> C {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    // |0⟩|β⟩ → |iβ/√2⟩_d |β/√2⟩_c
    let (gd, gc) = (c(0.0, 1.0) * beta * h, beta * h);
    match signal {
        0 => coherent_amp(d, gd) * coherent_amp(cc, gc),
        // a† → (d† + i c†)/√2, and ⟨n|x†|γ⟩ = √n ⟨n−1|γ⟩.
        _ => {
            let via_d = if d > 0 {
                (d as f64).sqrt() * coherent_amp(d - 1, gd) * coherent_amp(cc, gc)
            } else {
                C::new(0.0, 0.0)
            };
            let via_c = if cc > 0 {
                (cc as f64).sqrt() * coherent_amp(d, gd) * coherent_amp(cc - 1, gc)
            } else {
                C::new(0.0, 0.0)
            };
            (via_d + c(0.0, 1.0) * via_c) * h
        }
    }
}

/// Amplitudes of the source `(|00⟩ + e^{iφ}|01⟩ + i e^{iφ}|10⟩)/√3` on
/// `(u1, u2)` photon numbers.
pub fn source_terms(phi: f64) -> [((u32, u32), C); 3] {
    let k = 1.0 / 3f64.sqrt();
    let e = C::cis(phi);
    [((0, 0), c(k, 0.0)), ((0, 1), e * k), ((1, 0), c(0.0, 1.0) * e * k)]
}

/// Experiment-4 amplitude of `(c1, d1, c2, d2)` with oscillators `−e^{iφ}`
/// (Alice) and `i e^{iφ}` (Bob).
pub fn exp4_amplitude(phi: f64, c1: u32, d1: u32, c2: u32, d2: u32) -> C {
    let e = C::cis(phi);
    let (ba, bb) = (-e, c(0.0, 1.0) * e);
    source_terms(phi)
        .iter()
        .map(|&((n1, n2), a)| a * homodyne_amp(n1, ba, d1, c1) * homodyne_amp(n2, bb, d2, c2))
        .sum()
}

/// Experiment-2 amplitude of `(c1, d1, u2)`.
pub fn exp2_amplitude(phi: f64, c1: u32, d1: u32, u2: u32) -> C {
    let ba = -C::cis(phi);
    source_terms(phi)
        .iter()
        .filter(|((_, n2), _)| *n2 == u2)
        .map(|&((n1, _), a)| a * homodyne_amp(n1, ba, d1, c1))
        .sum()
}

/// `e^{−2}/12`.
pub fn p4_closed_form() -> f64 {
    (-2f64).exp() / 12.0
}

/// `3 e^{−2}/4`.
pub fn scissors_success_closed_form() -> f64 {
    0.75 * (-2f64).exp()
}

pub fn bin_path() -> &'static str {
    env!("CARGO_BIN_EXE_hardy-sim")
}
