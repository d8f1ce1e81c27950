//! Linear optical elements acting on [`PureState`]s.
//!
//! Beam splitters use one fixed creation-operator convention throughout:
//!
//! ```text
//! a† → t·a† + i·r·b†
//! b† → i·r·a† + t·b†        r = √(1 − t²)
//! ```
//!
//! where `a` is `port_a` and `b` is `port_b`. A mirror multiplies every photon
//! by `i`, i.e. it is a phase shift of π/2.

use std::f64::consts::FRAC_PI_2;

use ndarray::Array2;
use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::fock::{accumulate, AmpMap, ModeId, PureState, C64};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BeamSplitter {
    t: f64,
    r: f64,
    pub port_a: ModeId,
    pub port_b: ModeId,
}

impl BeamSplitter {
    pub fn new(t: f64, port_a: ModeId, port_b: ModeId) -> Result<Self> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::arg(format!("transmission amplitude {t} outside [0, 1]")));
        }
        if port_a == port_b {
            return Err(Error::arg("beam splitter ports must differ"));
        }
        // balanced splitter: r == t exactly
        let r = if t == std::f64::consts::FRAC_1_SQRT_2 {
            t
        } else {
            ((1.0 - t) * (1.0 + t)).sqrt()
        };
        Ok(BeamSplitter { t, r, port_a, port_b })
    }

    pub fn balanced(port_a: ModeId, port_b: ModeId) -> Result<Self> {
        Self::new(std::f64::consts::FRAC_1_SQRT_2, port_a, port_b)
    }

    /// Splitter whose reflection amplitude is `r`, kept exactly.
    pub fn with_reflection(r: f64, port_a: ModeId, port_b: ModeId) -> Result<Self> {
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::arg(format!("reflection amplitude {r} outside [0, 1]")));
        }
        let bs = Self::new(((1.0 - r) * (1.0 + r)).sqrt(), port_a, port_b)?;
        Ok(BeamSplitter { r, ..bs })
    }

    /// `t = cos θ`, `r = sin θ` for `θ ∈ [0, π/2]`. Accurate for mixing
    /// angles near 0 or π/2, where recovering one amplitude from the other
    /// loses digits.
    pub fn from_angle(theta: f64, port_a: ModeId, port_b: ModeId) -> Result<Self> {
        if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&theta) {
            return Err(Error::arg(format!("mixing angle {theta} outside [0, pi/2]")));
        }
        let bs = Self::new(theta.cos(), port_a, port_b)?;
        Ok(BeamSplitter { r: theta.sin(), ..bs })
    }

    pub fn transmission(&self) -> f64 {
        self.t
    }

    pub fn reflection(&self) -> f64 {
        self.r
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseShift {
    pub theta: f64,
    pub port: ModeId,
}

impl PhaseShift {
    pub fn new(theta: f64, port: ModeId) -> Result<Self> {
        if !theta.is_finite() {
            return Err(Error::arg("phase must be finite"));
        }
        Ok(PhaseShift { theta, port })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mirror {
    pub port: ModeId,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Element {
    BeamSplitter(BeamSplitter),
    Phase(PhaseShift),
    Mirror(Mirror),
}

impl Element {
    pub fn apply(&self, s: &PureState) -> Result<PureState> {
        match self {
            Element::BeamSplitter(bs) => apply_beam_splitter(s, bs),
            Element::Phase(p) => apply_phase(s, p),
            Element::Mirror(m) => apply_mirror(s, m),
        }
    }
}

/// Output terms `(p, coefficient)` for input `|m, n⟩`; the b-port output is
/// `m + n − p`.
fn bs_coefficients(m: u32, n: u32, t: f64, r: f64) -> Vec<(u32, C64)> {
    let total = m + n;
    let mut out = vec![C64::new(0.0, 0.0); total as usize + 1];
    let bm = binomial_row(m);
    let bn = binomial_row(n);
    for j in 0..=m {
        for k in 0..=n {
            // (t a†)^j (i r b†)^(m-j) from the a-photons,
            // (i r a†)^k (t b†)^(n-k) from the b-photons.
            let t_pow = (j + n - k) as i32;
            let r_pow = m - j + k;
            let mag = bm[j as usize] * bn[k as usize] * t.powi(t_pow) * r.powi(r_pow as i32);
            if mag == 0.0 {
                continue;
            }
            out[(j + k) as usize] += i_pow(r_pow) * mag;
        }
    }
    out.into_iter()
        .enumerate()
        .filter_map(|(p, c)| {
            let p = p as u32;
            let coef = c * factorial_ratio_sqrt(p, total - p, m, n);
            (coef.re != 0.0 || coef.im != 0.0).then_some((p, coef))
        })
        .collect()
}

fn binomial_row(n: u32) -> Vec<f64> {
    let mut row = vec![1.0f64; n as usize + 1];
    for k in 1..n as usize {
        row[k] = row[k - 1] * (n as usize + 1 - k) as f64 / k as f64;
    }
    row
}

pub(crate) fn i_pow(e: u32) -> C64 {
    match e % 4 {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, 1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, -1.0),
    }
}

/// `√(p! q! / (m! n!))` for `p + q = m + n`, as a product of ratios near one.
fn factorial_ratio_sqrt(p: u32, q: u32, m: u32, n: u32) -> f64 {
    debug_assert_eq!(p + q, m + n);
    let mut ratio = 1.0;
    if p >= m {
        // p!/m! = Π (m+s), n!/q! = Π (q+s) for s = 1..=p-m
        for s in 1..=(p - m) {
            ratio *= (m + s) as f64 / (q + s) as f64;
        }
    } else {
        for s in 1..=(m - p) {
            ratio *= (n + s) as f64 / (p + s) as f64;
        }
    }
    ratio.sqrt()
}

/// Apply a beam splitter. Both port cutoffs are raised to the sum of the
/// input cutoffs, so the map is exactly unitary on the stored terms.
pub fn apply_beam_splitter(s: &PureState, bs: &BeamSplitter) -> Result<PureState> {
    s.check_id(bs.port_a)?;
    s.check_id(bs.port_b)?;
    let (a, b) = (bs.port_a.0, bs.port_b.0);
    let (t, r) = (bs.t, bs.reflection());

    let mut modes = s.modes().to_vec();
    let raised = modes[a].cutoff + modes[b].cutoff;
    modes[a].cutoff = raised;
    modes[b].cutoff = raised;

    let mut cache: FxHashMap<(u32, u32), Vec<(u32, C64)>> = FxHashMap::default();
    let mut out = AmpMap::default();
    out.reserve(s.len() * 2);
    // Sorted traversal pins the floating-point accumulation order.
    for (occ, amp) in s.sorted_terms() {
        let (m, n) = (occ[a], occ[b]);
        let coefs = cache
            .entry((m, n))
            .or_insert_with(|| bs_coefficients(m, n, t, r));
        for &(p, coef) in coefs.iter() {
            let mut key = occ.clone();
            key.set(a, p);
            key.set(b, m + n - p);
            accumulate(&mut out, key, amp * coef);
        }
    }
    Ok(s.with_modes_amps(modes, out))
}

/// Multiply each term by `e^{iθn}`, `n` the occupation of the port.
pub fn apply_phase(s: &PureState, ps: &PhaseShift) -> Result<PureState> {
    s.check_id(ps.port)?;
    let p = ps.port.0;
    if ps.theta == FRAC_PI_2 {
        return Ok(s.map_amplitudes(|k| i_pow(k[p])));
    }
    Ok(s.map_amplitudes(|k| C64::cis(ps.theta * k[p] as f64)))
}

/// Phase shift of π/2: every photon picks up a factor `i`.
pub fn apply_mirror(s: &PureState, m: &Mirror) -> Result<PureState> {
    apply_phase(
        s,
        &PhaseShift {
            theta: FRAC_PI_2,
            port: m.port,
        },
    )
}

/// Largest cutoff accepted by [`bs_unitary_oracle`].
pub const ORACLE_MAX_CUTOFF: u32 = 10;

/// Dense two-mode beam-splitter unitary on the `(cutoff+1)²` box, computed as
/// `exp(iθ(a†b + ab†))` with `θ = arccos t` by a power series (with scaling
/// and squaring). Basis index of `|m, n⟩` is `m·(cutoff+1) + n`.
///
/// The generator is truncated to the box, so the result only agrees with the
/// exact splitter on columns with `m + n ≤ cutoff`.
pub fn bs_unitary_oracle(cutoff: u32, t: f64) -> Result<Array2<C64>> {
    if cutoff > ORACLE_MAX_CUTOFF {
        return Err(Error::arg(format!(
            "oracle cutoff {cutoff} exceeds {ORACLE_MAX_CUTOFF}"
        )));
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::arg(format!("transmission amplitude {t} outside [0, 1]")));
    }
    let d = (cutoff + 1) as usize;
    let dim = d * d;
    let theta = t.acos();
    let idx = |m: usize, n: usize| m * d + n;

    let mut gen = Array2::<C64>::zeros((dim, dim));
    for m in 0..d {
        for n in 0..d {
            let col = idx(m, n);
            if m + 1 < d && n >= 1 {
                gen[[idx(m + 1, n - 1), col]] += ((m + 1) as f64 * n as f64).sqrt();
            }
            if m >= 1 && n + 1 < d {
                gen[[idx(m - 1, n + 1), col]] += (m as f64 * (n + 1) as f64).sqrt();
            }
        }
    }
    let x = gen.mapv(|g| g * C64::new(0.0, theta));

    let norm1 = (0..dim)
        .map(|j| x.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut squarings = 0u32;
    while norm1 / 2f64.powi(squarings as i32) > 0.5 {
        squarings += 1;
    }
    let x = x.mapv(|z| z / 2f64.powi(squarings as i32));

    let mut result = Array2::<C64>::eye(dim);
    let mut term = Array2::<C64>::eye(dim);
    for k in 1..200 {
        term = term.dot(&x).mapv(|z| z / k as f64);
        result += &term;
        let tn = term.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if tn < 1e-16 {
            break;
        }
    }
    for _ in 0..squarings {
        result = result.dot(&result);
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn two_mode(m: u32, n: u32, cut: u32) -> PureState {
        PureState::fock_state(&[m, n], &[cut, cut]).unwrap()
    }

    #[test]
    fn single_photon_in_port_b() {
        // |0⟩_a ⊗ |1⟩_b on a 50:50 splitter: (i|1,0⟩ + |0,1⟩)/√2.
        let s = two_mode(0, 1, 1);
        let bs = BeamSplitter::balanced(ModeId(0), ModeId(1)).unwrap();
        let out = apply_beam_splitter(&s, &bs).unwrap();
        assert_abs_diff_eq!((out.amplitude(&[1, 0]) - c(0.0, FRAC_1_SQRT_2)).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((out.amplitude(&[0, 1]) - c(FRAC_1_SQRT_2, 0.0)).norm(), 0.0, epsilon = 1e-15);
        assert_eq!(out.len(), 2);
    }

    #[test]
    fn identity_splitter() {
        let s = PureState::coherent(c(0.4, 0.9), 8)
            .unwrap()
            .tensor(&PureState::fock_state(&[2], &[3]).unwrap().with_labels(&["x"]).unwrap())
            .unwrap();
        let bs = BeamSplitter::new(1.0, ModeId(0), ModeId(1)).unwrap();
        let out = apply_beam_splitter(&s, &bs).unwrap();
        assert_eq!(out.len(), s.len());
        for (k, a) in s.iter() {
            assert_eq!(out.amplitude(k), *a);
        }
    }

    #[test]
    fn hong_ou_mandel() {
        let out = apply_beam_splitter(
            &two_mode(1, 1, 1),
            &BeamSplitter::balanced(ModeId(0), ModeId(1)).unwrap(),
        )
        .unwrap();
        assert_eq!(out.cutoffs(), vec![2, 2]);
        assert!(out.amplitude(&[1, 1]).norm() < 1e-16);
        assert_abs_diff_eq!((out.amplitude(&[2, 0]) - c(0.0, FRAC_1_SQRT_2)).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((out.amplitude(&[0, 2]) - c(0.0, FRAC_1_SQRT_2)).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn phases_and_mirror() {
        let s = PureState::coherent(c(0.3, -0.5), 10).unwrap();
        let out = apply_phase(&s, &PhaseShift::new(0.0, ModeId(0)).unwrap()).unwrap();
        for (k, a) in s.iter() {
            assert_eq!(out.amplitude(k), *a);
        }

        let two = PureState::fock_state(&[2], &[2]).unwrap();
        let out = apply_phase(&two, &PhaseShift::new(PI / 2.0, ModeId(0)).unwrap()).unwrap();
        assert_eq!(out.amplitude(&[2]), c(-1.0, 0.0));

        let vac = PureState::vacuum(&["v"], &[0]).unwrap();
        let out = apply_mirror(&vac, &Mirror { port: ModeId(0) }).unwrap();
        assert_eq!(out.amplitude(&[0]), c(1.0, 0.0));

        let one = PureState::fock_state(&[1], &[1]).unwrap();
        let out = apply_mirror(&one, &Mirror { port: ModeId(0) }).unwrap();
        assert_eq!(out.amplitude(&[1]), c(0.0, 1.0));

        assert!(apply_phase(&one, &PhaseShift::new(1.0, ModeId(3)).unwrap()).is_err());
        assert!(PhaseShift::new(f64::INFINITY, ModeId(0)).is_err());
    }

    #[test]
    fn pi_shift_on_bobs_oscillator() {
        for &phi in &[0.0, 0.4, 2.0] {
            let e = C64::cis(phi);
            let lo = PureState::coherent(c(0.0, -1.0) * e, 20).unwrap();
            let shifted = apply_phase(&lo, &PhaseShift::new(PI, ModeId(0)).unwrap()).unwrap();
            let target = PureState::coherent(c(0.0, 1.0) * e, 20).unwrap();
            for (k, a) in target.iter() {
                assert_abs_diff_eq!((shifted.amplitude(k) - a).norm(), 0.0, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn mirror_on_reference_beam() {
        let mag = (9.0f64 - 3.0).sqrt();
        let e = C64::cis(0.7);
        let s = PureState::coherent(c(0.0, mag) * e, 40).unwrap();
        let out = apply_mirror(&s, &Mirror { port: ModeId(0) }).unwrap();
        let target = PureState::coherent(c(-mag, 0.0) * e, 40).unwrap();
        for (k, a) in target.iter() {
            assert_abs_diff_eq!((out.amplitude(k) - a).norm(), 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn bad_splitters() {
        assert!(BeamSplitter::new(1.2, ModeId(0), ModeId(1)).is_err());
        assert!(BeamSplitter::new(0.5, ModeId(0), ModeId(0)).is_err());
        let s = two_mode(1, 0, 1);
        let bs = BeamSplitter::new(0.5, ModeId(0), ModeId(2)).unwrap();
        assert!(apply_beam_splitter(&s, &bs).is_err());
    }

    #[test]
    fn oracle_basics() {
        let id = bs_unitary_oracle(3, 1.0).unwrap();
        assert_eq!(id, Array2::<C64>::eye(16));
        assert!(bs_unitary_oracle(11, 0.5).is_err());

        let u = bs_unitary_oracle(8, 0.6).unwrap();
        let uu = u.t().mapv(|z| z.conj()).dot(&u);
        let dev = (&uu - &Array2::<C64>::eye(81)).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(dev < 1e-12, "unitarity deviation {dev}");

        let u = bs_unitary_oracle(2, FRAC_1_SQRT_2).unwrap();
        let col = u.column(3 + 1);
        assert_abs_diff_eq!((col[2 * 3] - c(0.0, FRAC_1_SQRT_2)).norm(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!((col[2] - c(0.0, FRAC_1_SQRT_2)).norm(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(col[4].norm(), 0.0, epsilon = 1e-14);
    }
}
