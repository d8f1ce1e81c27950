//! Deterministic local strategies over the coarse Hardy events.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NumberOutcome {
    Zero,
    OnePlus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum HomodyneOutcome {
    D,
    #[serde(rename = "other")]
    Other,
}

/// Predetermined answers of both parties to both settings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct LhvStrategy {
    pub a_n: NumberOutcome,
    pub a_h: HomodyneOutcome,
    pub b_n: NumberOutcome,
    pub b_h: HomodyneOutcome,
}

impl LhvStrategy {
    /// All 16 strategies.
    pub fn all() -> Vec<LhvStrategy> {
        use HomodyneOutcome::*;
        use NumberOutcome::*;
        let mut v = Vec::with_capacity(16);
        for a_n in [Zero, OnePlus] {
            for a_h in [D, Other] {
                for b_n in [Zero, OnePlus] {
                    for b_h in [D, Other] {
                        v.push(LhvStrategy { a_n, a_h, b_n, b_h });
                    }
                }
            }
        }
        v
    }

    /// Whether this strategy produces the event that `zero` forbids.
    pub fn violates(&self, zero: HardyZero) -> bool {
        match zero {
            HardyZero::NN => self.a_n == NumberOutcome::OnePlus && self.b_n == NumberOutcome::OnePlus,
            HardyZero::HN => self.a_h == HomodyneOutcome::D && self.b_n == NumberOutcome::Zero,
            HardyZero::NH => self.a_n == NumberOutcome::Zero && self.b_h == HomodyneOutcome::D,
        }
    }

    /// Both homodyne answers are `D`.
    pub fn gives_hardy_event(&self) -> bool {
        self.a_h == HomodyneOutcome::D && self.b_h == HomodyneOutcome::D
    }
}

impl fmt::Display for LhvStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = |o: NumberOutcome| match o {
            NumberOutcome::Zero => "0",
            NumberOutcome::OnePlus => "1+",
        };
        let h = |o: HomodyneOutcome| match o {
            HomodyneOutcome::D => "D",
            HomodyneOutcome::Other => "other",
        };
        write!(
            f,
            "A(n={}, h={}) B(n={}, h={})",
            n(self.a_n),
            h(self.a_h),
            n(self.b_n),
            h(self.b_h)
        )
    }
}

/// The three vanishing joint events.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum HardyZero {
    /// Photons on both sides in the counting setting.
    NN,
    /// Alice `D` while Bob counts zero.
    HN,
    /// Alice counts zero while Bob gets `D`.
    NH,
}

impl HardyZero {
    pub const ALL: [HardyZero; 3] = [HardyZero::NN, HardyZero::HN, HardyZero::NH];
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LhvBound {
    /// Largest `P(D, D)` any local model respecting the zeros can reach.
    pub max_p4: f64,
    pub surviving: Vec<LhvStrategy>,
}

/// Keep the deterministic strategies compatible with `zeros`. Mixtures
/// cannot beat the best deterministic one, so `max_p4` is 0 or 1.
pub fn lhv_enumerate(zeros: &BTreeSet<HardyZero>) -> LhvBound {
    let surviving: Vec<_> = LhvStrategy::all()
        .into_iter()
        .filter(|s| !zeros.iter().any(|z| s.violates(*z)))
        .collect();
    let max_p4 = if surviving.iter().any(|s| s.gives_hardy_event()) {
        1.0
    } else {
        0.0
    };
    LhvBound { max_p4, surviving }
}
