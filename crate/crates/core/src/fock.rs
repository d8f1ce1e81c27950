//! Sparse multimode Fock-space states.
//!
//! A [`PureState`] is a table from occupation vectors to complex amplitudes
//! over an ordered list of labelled modes, each with a maximum occupation
//! (cutoff). Entries with amplitude exactly zero are never stored.
//!
//! Mode ids are positional: removing a mode shifts the ids of the modes after
//! it, but labels are preserved. Code that outlives a measurement should hold
//! labels and resolve them with [`PureState::mode_id`].

use std::fmt;

use num_complex::Complex64;
use rustc_hash::FxHashMap;
use smallvec::SmallVec;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub(crate) type AmpMap = FxHashMap<Occupation, C64>;

/// Positional index of a mode within one state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModeId(pub usize);

impl fmt::Display for ModeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mode {
    pub label: String,
    /// Largest photon number representable in this mode.
    pub cutoff: u32,
}

/// Photon numbers, one per mode, in mode order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Occupation(SmallVec<[u32; 6]>);

impl Occupation {
    pub fn new(counts: &[u32]) -> Self {
        Occupation(SmallVec::from_slice(counts))
    }

    pub fn counts(&self) -> &[u32] {
        &self.0
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub(crate) fn set(&mut self, idx: usize, n: u32) {
        self.0[idx] = n;
    }

    pub(crate) fn without(&self, idx: usize) -> Occupation {
        let mut v = self.0.clone();
        v.remove(idx);
        Occupation(v)
    }

    pub(crate) fn concat(&self, other: &Occupation) -> Occupation {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Occupation(v)
    }

    pub(crate) fn select(&self, idx: &[usize]) -> Occupation {
        Occupation(idx.iter().map(|&i| self.0[i]).collect())
    }
}

impl std::ops::Deref for Occupation {
    type Target = [u32];
    fn deref(&self) -> &[u32] {
        &self.0
    }
}

impl From<Vec<u32>> for Occupation {
    fn from(v: Vec<u32>) -> Self {
        Occupation(SmallVec::from_vec(v))
    }
}

impl fmt::Display for Occupation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("|")?;
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{n}")?;
        }
        f.write_str(">")
    }
}

pub(crate) fn is_zero(z: C64) -> bool {
    z.re == 0.0 && z.im == 0.0
}

pub(crate) fn accumulate(map: &mut AmpMap, key: Occupation, amp: C64) {
    *map.entry(key).or_insert(C64::new(0.0, 0.0)) += amp;
}

#[derive(Clone, Debug)]
pub struct PureState {
    modes: Vec<Mode>,
    amps: AmpMap,
    norm_deficit: f64,
}

impl PureState {
    /// The zero-mode state with amplitude 1, the identity for [`tensor`](Self::tensor).
    pub fn scalar() -> Self {
        let mut amps = AmpMap::default();
        amps.insert(Occupation::default(), C64::new(1.0, 0.0));
        PureState {
            modes: Vec::new(),
            amps,
            norm_deficit: 0.0,
        }
    }

    pub fn vacuum<S: AsRef<str>>(labels: &[S], cutoffs: &[u32]) -> Result<Self> {
        if labels.len() != cutoffs.len() {
            return Err(Error::arg(format!(
                "{} labels but {} cutoffs",
                labels.len(),
                cutoffs.len()
            )));
        }
        let modes = make_modes(labels, cutoffs)?;
        let mut amps = AmpMap::default();
        amps.insert(Occupation::from(vec![0; modes.len()]), C64::new(1.0, 0.0));
        Ok(PureState {
            modes,
            amps,
            norm_deficit: 0.0,
        })
    }

    /// Single number state. Modes are labelled `m0`, `m1`, ...; use
    /// [`with_labels`](Self::with_labels) to rename.
    pub fn fock_state(occupations: &[u32], cutoffs: &[u32]) -> Result<Self> {
        if occupations.len() != cutoffs.len() {
            return Err(Error::arg(format!(
                "{} occupations but {} cutoffs",
                occupations.len(),
                cutoffs.len()
            )));
        }
        if let Some(i) = (0..occupations.len()).find(|&i| occupations[i] > cutoffs[i]) {
            return Err(Error::arg(format!(
                "occupation {} of mode {i} exceeds cutoff {}",
                occupations[i], cutoffs[i]
            )));
        }
        let labels: Vec<String> = (0..occupations.len()).map(|i| format!("m{i}")).collect();
        let modes = make_modes(&labels, cutoffs)?;
        let mut amps = AmpMap::default();
        amps.insert(Occupation::new(occupations), C64::new(1.0, 0.0));
        Ok(PureState {
            modes,
            amps,
            norm_deficit: 0.0,
        })
    }

    /// Truncated coherent state with the true Poisson amplitudes
    /// `exp(-|α|²/2) αⁿ / √n!` for `n ≤ cutoff`. Not renormalized: the
    /// missing weight is recorded in `norm_deficit`.
    pub fn coherent(alpha: C64, cutoff: u32) -> Result<Self> {
        if !alpha.re.is_finite() || !alpha.im.is_finite() {
            return Err(Error::arg(format!("coherent amplitude {alpha} is not finite")));
        }
        let mut amps = AmpMap::default();
        let mut c = C64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
        let mut weight = 0.0;
        for n in 0..=cutoff {
            if n > 0 {
                c = c * alpha / (n as f64).sqrt();
            }
            if !is_zero(c) {
                weight += c.norm_sqr();
                amps.insert(Occupation::new(&[n]), c);
            }
        }
        if amps.is_empty() {
            return Err(Error::DegenerateState(0.0));
        }
        Ok(PureState {
            modes: vec![Mode {
                label: "m0".into(),
                cutoff,
            }],
            amps,
            norm_deficit: (1.0 - weight).max(0.0),
        })
    }

    /// Coherent state with the cutoff chosen by [`default_cutoff`].
    pub fn coherent_auto(alpha: C64, tail: f64) -> Result<Self> {
        Self::coherent(alpha, default_cutoff(alpha.norm(), tail))
    }

    /// Build a state from explicit terms. Zero amplitudes are dropped and
    /// repeated occupation vectors are summed.
    pub fn from_terms<S, I>(labels: &[S], cutoffs: &[u32], terms: I) -> Result<Self>
    where
        S: AsRef<str>,
        I: IntoIterator<Item = (Vec<u32>, C64)>,
    {
        if labels.len() != cutoffs.len() {
            return Err(Error::arg("labels and cutoffs differ in length"));
        }
        let modes = make_modes(labels, cutoffs)?;
        let mut amps = AmpMap::default();
        for (occ, amp) in terms {
            if occ.len() != modes.len() {
                return Err(Error::arg(format!(
                    "occupation vector of length {} for {} modes",
                    occ.len(),
                    modes.len()
                )));
            }
            if let Some(i) = (0..occ.len()).find(|&i| occ[i] > modes[i].cutoff) {
                return Err(Error::arg(format!(
                    "occupation {} exceeds cutoff {} of `{}`",
                    occ[i], modes[i].cutoff, modes[i].label
                )));
            }
            if !amp.re.is_finite() || !amp.im.is_finite() {
                return Err(Error::arg("non-finite amplitude"));
            }
            accumulate(&mut amps, Occupation::from(occ), amp);
        }
        amps.retain(|_, a| !is_zero(*a));
        if amps.is_empty() {
            return Err(Error::DegenerateState(0.0));
        }
        Ok(PureState {
            modes,
            amps,
            norm_deficit: 0.0,
        })
    }

    pub(crate) fn from_parts(modes: Vec<Mode>, mut amps: AmpMap, norm_deficit: f64) -> Self {
        amps.retain(|_, a| !is_zero(*a));
        debug_assert!(amps
            .iter()
            .all(|(k, a)| a.re.is_finite() && a.im.is_finite() && k.len() == modes.len()));
        PureState {
            modes,
            amps,
            norm_deficit,
        }
    }

    pub fn with_labels<S: AsRef<str>>(mut self, labels: &[S]) -> Result<Self> {
        if labels.len() != self.modes.len() {
            return Err(Error::arg(format!(
                "{} labels for {} modes",
                labels.len(),
                self.modes.len()
            )));
        }
        check_distinct(labels)?;
        for (m, l) in self.modes.iter_mut().zip(labels) {
            m.label = l.as_ref().to_string();
        }
        Ok(self)
    }

    pub fn relabel(mut self, from: &str, to: &str) -> Result<Self> {
        let id = self.mode_id(from)?;
        if from != to && self.modes.iter().any(|m| m.label == to) {
            return Err(Error::arg(format!("label `{to}` already in use")));
        }
        self.modes[id.0].label = to.to_string();
        Ok(self)
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn num_modes(&self) -> usize {
        self.modes.len()
    }

    pub fn labels(&self) -> Vec<&str> {
        self.modes.iter().map(|m| m.label.as_str()).collect()
    }

    pub fn cutoffs(&self) -> Vec<u32> {
        self.modes.iter().map(|m| m.cutoff).collect()
    }

    pub fn mode_id(&self, label: &str) -> Result<ModeId> {
        self.modes
            .iter()
            .position(|m| m.label == label)
            .map(ModeId)
            .ok_or_else(|| Error::arg(format!("no mode labelled `{label}`")))
    }

    pub(crate) fn check_id(&self, id: ModeId) -> Result<()> {
        if id.0 < self.modes.len() {
            Ok(())
        } else {
            Err(Error::arg(format!(
                "mode {id} out of range for a {}-mode state",
                self.modes.len()
            )))
        }
    }

    pub fn label(&self, id: ModeId) -> &str {
        &self.modes[id.0].label
    }

    /// Number of stored (nonzero) terms.
    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn amplitude(&self, occupation: &[u32]) -> C64 {
        self.amps
            .get(&Occupation::new(occupation))
            .copied()
            .unwrap_or_default()
    }

    /// Terms in unspecified (but deterministic) order.
    pub fn iter(&self) -> impl Iterator<Item = (&Occupation, &C64)> {
        self.amps.iter()
    }

    /// Terms sorted lexicographically by occupation vector.
    pub fn sorted_terms(&self) -> Vec<(Occupation, C64)> {
        let mut v: Vec<_> = self.amps.iter().map(|(k, a)| (k.clone(), *a)).collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        v
    }

    pub fn norm_sqr(&self) -> f64 {
        // Sorted summation keeps the result independent of table layout.
        let mut w: Vec<f64> = self.amps.values().map(|a| a.norm_sqr()).collect();
        w.sort_by(|a, b| a.total_cmp(b));
        w.iter().sum()
    }

    /// Weight lost to truncation and pruning so far (bookkeeping only).
    pub fn norm_deficit(&self) -> f64 {
        self.norm_deficit
    }

    pub(crate) fn set_norm_deficit(&mut self, d: f64) {
        self.norm_deficit = d;
    }

    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        if let Some(m) = other
            .modes
            .iter()
            .find(|m| self.modes.iter().any(|n| n.label == m.label))
        {
            return Err(Error::arg(format!("duplicate mode label `{}`", m.label)));
        }
        let mut modes = self.modes.clone();
        modes.extend(other.modes.iter().cloned());
        let mut amps = AmpMap::default();
        amps.reserve(self.amps.len() * other.amps.len());
        for (k1, a1) in &self.amps {
            for (k2, a2) in &other.amps {
                amps.insert(k1.concat(k2), a1 * a2);
            }
        }
        let deficit = 1.0 - (1.0 - self.norm_deficit) * (1.0 - other.norm_deficit);
        Ok(PureState::from_parts(modes, amps, deficit))
    }

    fn check_same_modes(&self, other: &PureState) -> Result<()> {
        if self.modes.len() != other.modes.len()
            || self
                .modes
                .iter()
                .zip(&other.modes)
                .any(|(a, b)| a.label != b.label)
        {
            return Err(Error::arg(format!(
                "mode mismatch: {:?} vs {:?}",
                self.labels(),
                other.labels()
            )));
        }
        Ok(())
    }

    /// `⟨self|other⟩`.
    pub fn inner_product(&self, other: &PureState) -> Result<C64> {
        self.check_same_modes(other)?;
        let (small, large, flip) = if self.amps.len() <= other.amps.len() {
            (self, other, false)
        } else {
            (other, self, true)
        };
        let mut terms: Vec<(&Occupation, C64)> = small
            .amps
            .iter()
            .filter_map(|(k, a)| {
                large.amps.get(k).map(|b| {
                    let (x, y) = if flip { (b, a) } else { (a, b) };
                    (k, x.conj() * y)
                })
            })
            .collect();
        terms.sort_by(|a, b| a.0.cmp(b.0));
        Ok(terms.into_iter().map(|(_, z)| z).sum())
    }

    pub fn normalize(&self) -> Result<PureState> {
        let n2 = self.norm_sqr();
        if !(n2 > 1e-300) {
            return Err(Error::DegenerateState(n2));
        }
        let s = 1.0 / n2.sqrt();
        let amps = self.amps.iter().map(|(k, a)| (k.clone(), a * s)).collect();
        Ok(PureState::from_parts(self.modes.clone(), amps, self.norm_deficit))
    }

    /// `|⟨a|b⟩|² / (‖a‖²‖b‖²)`.
    pub fn fidelity(&self, other: &PureState) -> Result<f64> {
        let ip = self.inner_product(other)?;
        let (n1, n2) = (self.norm_sqr(), other.norm_sqr());
        if !(n1 > 1e-300) {
            return Err(Error::DegenerateState(n1));
        }
        if !(n2 > 1e-300) {
            return Err(Error::DegenerateState(n2));
        }
        Ok(ip.norm_sqr() / (n1 * n2))
    }

    /// Purity `Tr ρ²` of the reduced state on `subset`, computed from the
    /// normalized state. Equal to 1 exactly when the subset factors out.
    pub fn bipartition_purity(&self, subset: &[ModeId]) -> Result<f64> {
        let bp = Bipartition::new(self, subset)?;
        let n2 = self.norm_sqr();
        if !(n2 > 1e-300) {
            return Err(Error::DegenerateState(n2));
        }
        Ok(bp.purity_unnormalized()? / (n2 * n2))
    }

    /// Multiply every amplitude by `f(occupation)`.
    pub(crate) fn map_amplitudes(&self, f: impl Fn(&Occupation) -> C64) -> PureState {
        let amps = self
            .amps
            .iter()
            .map(|(k, a)| (k.clone(), a * f(k)))
            .collect();
        PureState::from_parts(self.modes.clone(), amps, self.norm_deficit)
    }

    /// Drop entries with `|amp| < eps`; their weight is added to `norm_deficit`.
    pub fn pruned(&self, eps: f64) -> PureState {
        if eps <= 0.0 {
            return self.clone();
        }
        let mut lost = 0.0;
        let mut amps = AmpMap::default();
        for (k, a) in &self.amps {
            if a.norm() < eps {
                lost += a.norm_sqr();
            } else {
                amps.insert(k.clone(), *a);
            }
        }
        PureState::from_parts(self.modes.clone(), amps, self.norm_deficit + lost)
    }

    pub(crate) fn with_modes_amps(&self, modes: Vec<Mode>, amps: AmpMap) -> PureState {
        PureState::from_parts(modes, amps, self.norm_deficit)
    }

    /// Reorder modes to follow `labels`, which must be a permutation of the
    /// current labels.
    pub fn reordered<S: AsRef<str>>(&self, labels: &[S]) -> Result<PureState> {
        if labels.len() != self.modes.len() {
            return Err(Error::arg("reorder needs every label exactly once"));
        }
        check_distinct(labels)?;
        let idx = labels
            .iter()
            .map(|l| self.mode_id(l.as_ref()).map(|id| id.0))
            .collect::<Result<Vec<_>>>()?;
        let modes = idx.iter().map(|&i| self.modes[i].clone()).collect();
        let amps = self
            .amps
            .iter()
            .map(|(k, a)| (k.select(&idx), *a))
            .collect();
        Ok(PureState::from_parts(modes, amps, self.norm_deficit))
    }
}

impl fmt::Display for PureState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "modes {:?}", self.labels())?;
        for (k, a) in self.sorted_terms() {
            writeln!(f, "  {k}  {:+.6e} {:+.6e}i", a.re, a.im)?;
        }
        Ok(())
    }
}

fn check_distinct<S: AsRef<str>>(labels: &[S]) -> Result<()> {
    for (i, a) in labels.iter().enumerate() {
        if a.as_ref().is_empty() {
            return Err(Error::arg("empty mode label"));
        }
        if labels[..i].iter().any(|b| b.as_ref() == a.as_ref()) {
            return Err(Error::arg(format!("duplicate mode label `{}`", a.as_ref())));
        }
    }
    Ok(())
}

fn make_modes<S: AsRef<str>>(labels: &[S], cutoffs: &[u32]) -> Result<Vec<Mode>> {
    check_distinct(labels)?;
    Ok(labels
        .iter()
        .zip(cutoffs)
        .map(|(l, &c)| Mode {
            label: l.as_ref().to_string(),
            cutoff: c,
        })
        .collect())
}

/// Smallest `N` with Poisson tail `Σ_{n>N} e^{-|α|²}|α|^{2n}/n!` below `tail`.
pub fn default_cutoff(alpha_mag: f64, tail: f64) -> u32 {
    let mean = alpha_mag * alpha_mag;
    if mean == 0.0 {
        return 0;
    }
    let upper = (mean + 40.0 * mean.sqrt() + 60.0).ceil() as usize;
    let mut pmf = Vec::with_capacity(upper + 1);
    // Log-space start avoids underflow of e^{-mean} for large amplitudes.
    let mut logp = -mean;
    for n in 0..=upper {
        if n > 0 {
            logp += mean.ln() - (n as f64).ln();
        }
        pmf.push(logp.exp());
    }
    let mut suffix = 0.0;
    let mut tails = vec![0.0; upper + 1];
    for n in (0..=upper).rev() {
        tails[n] = suffix;
        suffix += pmf[n];
    }
    tails
        .iter()
        .position(|&t| t < tail)
        .unwrap_or(upper) as u32
}

/// A state viewed as a matrix `M[i, k]` with rows indexed by the occupations
/// of a subset of modes and columns by the occupations of the rest.
pub(crate) struct Bipartition {
    pub sub_idx: Vec<usize>,
    pub rest_idx: Vec<usize>,
    pub sub_keys: Vec<Occupation>,
    pub rest_keys: Vec<Occupation>,
    /// (row, column, amplitude), in deterministic order.
    pub entries: Vec<(usize, usize, C64)>,
}

impl Bipartition {
    pub fn new(s: &PureState, subset: &[ModeId]) -> Result<Self> {
        if subset.is_empty() || subset.len() >= s.num_modes() {
            return Err(Error::arg(
                "bipartition subset must be non-empty and proper",
            ));
        }
        let mut sub_idx: Vec<usize> = Vec::with_capacity(subset.len());
        for id in subset {
            s.check_id(*id)?;
            if sub_idx.contains(&id.0) {
                return Err(Error::arg(format!("mode {id} listed twice")));
            }
            sub_idx.push(id.0);
        }
        sub_idx.sort_unstable();
        let rest_idx: Vec<usize> = (0..s.num_modes()).filter(|i| !sub_idx.contains(i)).collect();

        let terms = s.sorted_terms();
        let mut sub_map: FxHashMap<Occupation, usize> = FxHashMap::default();
        let mut rest_map: FxHashMap<Occupation, usize> = FxHashMap::default();
        let mut sub_keys = Vec::new();
        let mut rest_keys = Vec::new();
        let mut entries = Vec::with_capacity(terms.len());
        for (k, a) in terms {
            let sk = k.select(&sub_idx);
            let rk = k.select(&rest_idx);
            let i = *sub_map.entry(sk.clone()).or_insert_with(|| {
                sub_keys.push(sk);
                sub_keys.len() - 1
            });
            let j = *rest_map.entry(rk.clone()).or_insert_with(|| {
                rest_keys.push(rk);
                rest_keys.len() - 1
            });
            entries.push((i, j, a));
        }
        Ok(Bipartition {
            sub_idx,
            rest_idx,
            sub_keys,
            rest_keys,
            entries,
        })
    }

    /// `Tr(ρ²)` for the unnormalized reduced operator `M M†`.
    pub fn purity_unnormalized(&self) -> Result<f64> {
        let (d, by_col) = if self.sub_keys.len() <= self.rest_keys.len() {
            (self.sub_keys.len(), self.group(false))
        } else {
            (self.rest_keys.len(), self.group(true))
        };
        if d > 8192 {
            return Err(Error::arg(format!(
                "reduced state of dimension {d} is too large for a dense purity"
            )));
        }
        let mut rho = vec![C64::new(0.0, 0.0); d * d];
        for col in &by_col {
            for &(i, a) in col {
                for &(j, b) in col {
                    rho[i * d + j] += a * b.conj();
                }
            }
        }
        Ok(rho.iter().map(|z| z.norm_sqr()).sum())
    }

    /// Group entries by the larger side. When `transpose` is set the rows
    /// become the rest-side keys and amplitudes are conjugated, which leaves
    /// the purity unchanged.
    fn group(&self, transpose: bool) -> Vec<Vec<(usize, C64)>> {
        let ncol = if transpose {
            self.sub_keys.len()
        } else {
            self.rest_keys.len()
        };
        let mut by_col = vec![Vec::new(); ncol];
        for &(i, j, a) in &self.entries {
            if transpose {
                by_col[i].push((j, a.conj()));
            } else {
                by_col[j].push((i, a));
            }
        }
        by_col
    }

    /// Best product approximation `ψ ≈ u ⊗ r` where `u` (on the subset) is
    /// the dominant left singular vector and `r = ⟨u|ψ⟩`. `u` is normalized
    /// with its largest component real and positive; `r` is unnormalized.
    pub fn dominant_factor(&self) -> (Vec<C64>, Vec<C64>) {
        let (rows, cols) = (self.sub_keys.len(), self.rest_keys.len());
        let zero = C64::new(0.0, 0.0);
        let pivot = self
            .entries
            .iter()
            .fold(None::<(usize, usize, f64)>, |best, &(i, j, a)| match best {
                Some((_, _, m)) if m >= a.norm() => best,
                _ => Some((i, j, a.norm())),
            })
            .map(|(_, j, _)| j)
            .unwrap_or(0);
        let mut u = vec![zero; rows];
        for &(i, j, a) in &self.entries {
            if j == pivot {
                u[i] += a;
            }
        }
        normalize_vec(&mut u);
        let mut r = vec![zero; cols];
        for _ in 0..4 {
            r.iter_mut().for_each(|x| *x = zero);
            for &(i, j, a) in &self.entries {
                r[j] += u[i].conj() * a;
            }
            let mut w = r.clone();
            normalize_vec(&mut w);
            u.iter_mut().for_each(|x| *x = zero);
            for &(i, j, a) in &self.entries {
                u[i] += a * w[j].conj();
            }
            normalize_vec(&mut u);
        }
        // Phase convention: largest component of u real positive.
        if let Some(big) = u
            .iter()
            .copied()
            .fold(None::<C64>, |m, z| match m {
                Some(b) if b.norm() >= z.norm() => Some(b),
                _ => Some(z),
            })
        {
            let ph = big.conj() / big.norm();
            u.iter_mut().for_each(|x| *x *= ph);
        }
        r.iter_mut().for_each(|x| *x = zero);
        for &(i, j, a) in &self.entries {
            r[j] += u[i].conj() * a;
        }
        (u, r)
    }
}

fn normalize_vec(v: &mut [C64]) {
    let n: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|z| *z /= n);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn vacuum_states() {
        let v = PureState::vacuum(&["u1"], &[3]).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v.amplitude(&[0]), c(1.0, 0.0));

        let s = PureState::vacuum::<&str>(&[], &[]).unwrap();
        assert_eq!(s.num_modes(), 0);
        assert_eq!(s.amplitude(&[]), c(1.0, 0.0));

        let ab = PureState::vacuum(&["a", "b"], &[2, 2]).unwrap();
        assert_eq!(ab.amplitude(&[0, 0]), c(1.0, 0.0));
        assert_eq!(ab.norm_sqr(), 1.0);

        assert!(PureState::vacuum(&["a"], &[1, 2]).is_err());
    }

    #[test]
    fn fock_states() {
        let s = PureState::fock_state(&[1], &[1]).unwrap();
        assert_eq!(s.amplitude(&[1]), c(1.0, 0.0));
        let s = PureState::fock_state(&[1, 0], &[2, 2]).unwrap();
        assert_eq!(s.amplitude(&[1, 0]), c(1.0, 0.0));
        assert!(matches!(
            PureState::fock_state(&[3], &[2]),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn coherent_amplitudes() {
        let v = PureState::coherent(c(0.0, 0.0), 5).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v.amplitude(&[0]), c(1.0, 0.0));
        assert_eq!(v.norm_deficit(), 0.0);

        let s = PureState::coherent(c(1.0, 0.0), 10).unwrap();
        assert_abs_diff_eq!(s.amplitude(&[0]).re, (-0.5f64).exp(), epsilon = 1e-15);

        let s = PureState::coherent(c(1.0, 0.0), 1).unwrap();
        let expected = 2.0 * (-1.0f64).exp();
        assert_abs_diff_eq!(s.norm_sqr(), expected, epsilon = 1e-15);
        assert_abs_diff_eq!(s.norm_deficit(), 1.0 - expected, epsilon = 1e-15);
        assert_abs_diff_eq!(s.norm_deficit(), 0.26424, epsilon = 1e-5);

        assert!(PureState::coherent(c(f64::NAN, 0.0), 3).is_err());
    }

    #[test]
    fn tensor_products() {
        let a = PureState::vacuum(&["a"], &[1]).unwrap();
        let b = PureState::vacuum(&["b"], &[1]).unwrap();
        let ab = a.tensor(&b).unwrap();
        assert_eq!(ab.labels(), vec!["a", "b"]);
        assert_eq!(ab.amplitude(&[0, 0]), c(1.0, 0.0));

        let one = PureState::fock_state(&[1], &[1]).unwrap().with_labels(&["x"]).unwrap();
        let zero = PureState::fock_state(&[0], &[1]).unwrap().with_labels(&["y"]).unwrap();
        assert_eq!(one.tensor(&zero).unwrap().amplitude(&[1, 0]), c(1.0, 0.0));

        let coh = PureState::coherent(c(1.0, 0.0), 6).unwrap().with_labels(&["x"]).unwrap();
        let f = PureState::fock_state(&[1], &[1]).unwrap().with_labels(&["y"]).unwrap();
        let t = coh.tensor(&f).unwrap();
        assert_abs_diff_eq!(t.norm_sqr(), coh.norm_sqr() * f.norm_sqr(), epsilon = 1e-15);

        assert!(matches!(a.tensor(&a), Err(Error::Argument(_))));
    }

    #[test]
    fn inner_products() {
        let s = PureState::from_terms(
            &["a"],
            &[1],
            vec![(vec![0], c(0.6, 0.0)), (vec![1], c(0.0, 0.8))],
        )
        .unwrap();
        assert_abs_diff_eq!(s.inner_product(&s).unwrap().re, 1.0, epsilon = 1e-15);

        let x = PureState::fock_state(&[1, 0], &[1, 1]).unwrap();
        let y = PureState::fock_state(&[0, 1], &[1, 1]).unwrap();
        assert_eq!(x.inner_product(&y).unwrap(), c(0.0, 0.0));

        let f0 = PureState::fock_state(&[0], &[10]).unwrap();
        let coh = PureState::coherent(c(1.0, 0.0), 10).unwrap();
        assert_abs_diff_eq!(
            f0.inner_product(&coh).unwrap().re,
            (-0.5f64).exp(),
            epsilon = 1e-15
        );
        assert!(f0.inner_product(&x).is_err());
    }

    #[test]
    fn normalization() {
        let s = PureState::from_terms(&["a"], &[0], vec![(vec![0], c(2.0, 0.0))]).unwrap();
        assert_eq!(s.normalize().unwrap().amplitude(&[0]), c(1.0, 0.0));

        let s = PureState::from_terms(
            &["a"],
            &[1],
            vec![(vec![0], c(1.0, 0.0)), (vec![1], c(1.0, 0.0))],
        )
        .unwrap()
        .normalize()
        .unwrap();
        assert_abs_diff_eq!(s.amplitude(&[0]).re, 0.5f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(s.amplitude(&[1]).re, 0.5f64.sqrt(), epsilon = 1e-15);

        let tiny = PureState::from_terms(&["a"], &[0], vec![(vec![0], c(1e-200, 0.0))]).unwrap();
        assert!(matches!(tiny.normalize(), Err(Error::DegenerateState(_))));
        assert!(matches!(
            PureState::from_terms(&["a"], &[0], vec![(vec![0], c(0.0, 0.0))]),
            Err(Error::DegenerateState(_))
        ));
    }

    #[test]
    fn fidelities() {
        let s = PureState::coherent(c(0.3, -0.2), 12).unwrap();
        assert_abs_diff_eq!(s.fidelity(&s).unwrap(), 1.0, epsilon = 1e-14);

        let x = PureState::fock_state(&[1], &[2]).unwrap();
        let y = PureState::fock_state(&[2], &[2]).unwrap();
        assert_eq!(x.fidelity(&y).unwrap(), 0.0);

        let f0 = PureState::fock_state(&[0], &[10]).unwrap();
        let coh = PureState::coherent(c(1.0, 0.0), 10).unwrap();
        // ‖coh‖² < 1 by the truncated tail, so compare against the ratio.
        let expected = (-1.0f64).exp() / coh.norm_sqr();
        assert_abs_diff_eq!(f0.fidelity(&coh).unwrap(), expected, epsilon = 1e-15);
        assert_abs_diff_eq!(f0.fidelity(&coh).unwrap(), 0.36788, epsilon = 1e-5);
    }

    #[test]
    fn purity_of_bell_pair_and_product() {
        let h = 0.5f64.sqrt();
        let bell = PureState::from_terms(
            &["a", "b"],
            &[1, 1],
            vec![(vec![0, 0], c(h, 0.0)), (vec![1, 1], c(h, 0.0))],
        )
        .unwrap();
        assert_abs_diff_eq!(bell.bipartition_purity(&[ModeId(0)]).unwrap(), 0.5, epsilon = 1e-15);

        let a = PureState::coherent(c(0.7, 0.1), 15).unwrap().with_labels(&["a"]).unwrap();
        let b = PureState::coherent(c(-0.2, 0.4), 15).unwrap().with_labels(&["b"]).unwrap();
        let p = a.tensor(&b).unwrap();
        assert_abs_diff_eq!(p.bipartition_purity(&[ModeId(1)]).unwrap(), 1.0, epsilon = 1e-12);

        assert!(p.bipartition_purity(&[]).is_err());
        assert!(p.bipartition_purity(&[ModeId(0), ModeId(1)]).is_err());
        assert!(p.bipartition_purity(&[ModeId(5)]).is_err());
    }

    #[test]
    fn cutoff_rule() {
        assert_eq!(default_cutoff(0.0, 1e-12), 0);
        for &mag in &[0.5, 1.0, 3.0, 6.0] {
            let n = default_cutoff(mag, 1e-12);
            let s = PureState::coherent(C64::new(mag, 0.0), n).unwrap();
            assert!(s.norm_deficit() < 1e-12, "mag {mag}: deficit {}", s.norm_deficit());
            let prev = PureState::coherent(C64::new(mag, 0.0), n - 1).unwrap();
            assert!(prev.norm_deficit() >= 1e-12 * 0.999, "mag {mag} not minimal");
        }
    }

    #[test]
    fn reorder_and_relabel() {
        let s = PureState::fock_state(&[1, 0, 2], &[1, 1, 2]).unwrap();
        let r = s.reordered(&["m2", "m0", "m1"]).unwrap();
        assert_eq!(r.amplitude(&[2, 1, 0]), c(1.0, 0.0));
        assert!(s.clone().relabel("m0", "m1").is_err());
        let r = s.relabel("m0", "x").unwrap();
        assert_eq!(r.mode_id("x").unwrap(), ModeId(0));
    }
}
