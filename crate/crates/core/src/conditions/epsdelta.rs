//! The uniform epsilon-delta condition over a finite set of `(S, D)` pairs:
//!
//! for every `eps > 0` there is `delta > 0` such that `S < eps + delta`
//! implies `D <= eps`.
//!
//! Over a finite pair set this holds exactly when `D <= S` for every pair.
//! A pair with `D > S` breaks every `eps` in `[S, D)`; conversely, if
//! `D <= S` everywhere, `delta = min{S - eps : S > eps}` works.
//! [`epsgrid_oracle`] decides the same question by brute force over the
//! critical `eps` values and is kept independent of the reduction.

use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::rational::{self, Rational};

/// Which condition produced a pair set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum PairForm {
    /// `S = d(x,y)`, `D = d(Tx,Ty)`
    GlobalBanach,
    /// `S = (d(x,Tx) + d(y,Ty)) / 2`, `D = d(Tx,Ty)`
    GlobalKannan,
    /// `S = (d(x,Ty) + d(y,Tx)) / 2`, `D = d(Tx,Ty)`
    GlobalChatterjea,
    PicardKannan {
        start: usize,
    },
    PicardChatterjea {
        start: usize,
    },
    /// Consecutive-gap forms built from a gap sequence.
    GapSequence,
    Synthetic,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SdPair {
    #[serde(with = "rational::serde_str")]
    pub s: Rational,
    #[serde(with = "rational::serde_str")]
    pub d: Rational,
    /// The points (or orbit indices) the pair was computed from.
    pub origin: (usize, usize),
}

impl SdPair {
    pub fn new(s: Rational, d: Rational) -> Self {
        SdPair { s, d, origin: (0, 0) }
    }

    pub fn from(s: Rational, d: Rational, origin: (usize, usize)) -> Self {
        SdPair { s, d, origin }
    }
}

impl fmt::Display for SdPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(S={}, D={}) from {:?}", rational::format(&self.s), rational::format(&self.d), self.origin)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SdPairSet {
    pub form: PairForm,
    pub pairs: Vec<SdPair>,
}

impl SdPairSet {
    pub fn new(form: PairForm) -> Self {
        SdPairSet { form, pairs: Vec::new() }
    }

    pub fn synthetic<I: IntoIterator<Item = (Rational, Rational)>>(pairs: I) -> Self {
        SdPairSet { form: PairForm::Synthetic, pairs: pairs.into_iter().map(|(s, d)| SdPair::new(s, d)).collect() }
    }

    pub fn push(&mut self, s: Rational, d: Rational, origin: (usize, usize)) {
        self.pairs.push(SdPair { s, d, origin });
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// True when every `(S, D)` value here also occurs in `other`.
    pub fn values_within(&self, other: &SdPairSet) -> bool {
        self.pairs.iter().all(|p| other.pairs.iter().any(|q| q.s == p.s && q.d == p.d))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpsDeltaWitness {
    /// An `eps` for which no `delta` works.
    #[serde(with = "rational::serde_str")]
    pub epsilon: Rational,
    pub pair: SdPair,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
#[allow(clippy::large_enum_variant)]
pub enum EpsDelta {
    Holds,
    Fails(EpsDeltaWitness),
}

impl EpsDelta {
    pub fn holds(&self) -> bool {
        matches!(self, EpsDelta::Holds)
    }

    pub fn witness(&self) -> Option<&EpsDeltaWitness> {
        match self {
            EpsDelta::Holds => None,
            EpsDelta::Fails(w) => Some(w),
        }
    }
}

/// Decides the uniform condition by the `D <= S` reduction. A failing pair
/// is reported with `eps = (S + D) / 2`, which lies in `[S, D)`.
pub fn uniform_epsdelta_holds(pairs: &SdPairSet) -> EpsDelta {
    match pairs.pairs.iter().find(|p| p.d > p.s) {
        None => EpsDelta::Holds,
        Some(p) => EpsDelta::Fails(EpsDeltaWitness { epsilon: rational::midpoint(&p.s, &p.d), pair: p.clone() }),
    }
}

/// `min{S : D > eps}`, or `None` when no pair has `D > eps`.
fn hypothesis_floor<'a>(pairs: &'a SdPairSet, eps: &Rational) -> Option<&'a SdPair> {
    pairs.pairs.iter().filter(|p| &p.d > eps).min_by(|a, b| a.s.cmp(&b.s))
}

/// Critical `eps` candidates: every positive `S` and `D` value, midpoints of
/// consecutive distinct values (with 0 as the lowest), and one value above
/// the maximum.
pub fn critical_epsilons(pairs: &SdPairSet) -> Vec<Rational> {
    let mut values: Vec<Rational> =
        std::iter::once(Rational::zero()).chain(pairs.pairs.iter().flat_map(|p| [p.s.clone(), p.d.clone()])).collect();
    values.sort();
    values.dedup();
    let mut candidates: Vec<Rational> = values.iter().filter(|v| v.is_positive()).cloned().collect();
    candidates.extend(values.windows(2).map(|w| rational::midpoint(&w[0], &w[1])));
    let top = values.last().cloned().unwrap_or_else(Rational::zero);
    candidates.push(top + rational::int(1));
    candidates.sort();
    candidates.dedup();
    candidates
}

/// Brute-force decision: at each critical `eps`, a `delta` exists iff
/// `min{S : D > eps} > eps` (finitely many pairs, so strict suffices).
pub fn epsgrid_oracle(pairs: &SdPairSet) -> EpsDelta {
    for eps in critical_epsilons(pairs) {
        if let Some(p) = hypothesis_floor(pairs, &eps) {
            if p.s <= eps {
                return EpsDelta::Fails(EpsDeltaWitness { epsilon: eps, pair: p.clone() });
            }
        }
    }
    EpsDelta::Holds
}

/// A decision procedure for the uniform condition, so sweeps can swap in a
/// deliberately broken variant.
pub type Decider = fn(&SdPairSet) -> bool;

pub fn reduction_decider(pairs: &SdPairSet) -> bool {
    uniform_epsdelta_holds(pairs).holds()
}

pub fn oracle_decider(pairs: &SdPairSet) -> bool {
    epsgrid_oracle(pairs).holds()
}

/// Mutant of the reduction using strict `D < S`. Exists only so the
/// cross-validation harness can show it catches a weakened checker.
#[doc(hidden)]
pub fn strict_mutant_decider(pairs: &SdPairSet) -> bool {
    pairs.pairs.iter().all(|p| p.d < p.s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use proptest::prelude::*;

    fn set(pairs: &[(Rational, Rational)]) -> SdPairSet {
        SdPairSet::synthetic(pairs.iter().cloned())
    }

    #[test]
    fn dominated_pairs_hold() {
        let s = set(&[(int(2), int(1)), (int(3), int(3))]);
        assert!(uniform_epsdelta_holds(&s).holds());
        assert!(epsgrid_oracle(&s).holds());
    }

    #[test]
    fn excess_pair_fails_at_midpoint() {
        let s = set(&[(int(2), ratio(5, 2))]);
        let verdict = uniform_epsdelta_holds(&s);
        assert_eq!(verdict.witness().unwrap().epsilon, ratio(9, 4));
        assert!(!epsgrid_oracle(&s).holds());
        // the oracle's witness lies in [S, D)
        let w = epsgrid_oracle(&s).witness().cloned().unwrap();
        assert!(w.epsilon >= int(2) && w.epsilon < ratio(5, 2));
    }

    #[test]
    fn empty_set_is_vacuous() {
        let s = SdPairSet::new(PairForm::Synthetic);
        assert!(uniform_epsdelta_holds(&s).holds());
        assert!(epsgrid_oracle(&s).holds());
    }

    #[test]
    fn zero_hypothesis_positive_conclusion_fails_everywhere_below() {
        let s = set(&[(int(0), int(1))]);
        assert!(!epsgrid_oracle(&s).holds());
        assert!(!uniform_epsdelta_holds(&s).holds());
        assert!(epsgrid_oracle(&set(&[(int(2), int(1))])).holds());
    }

    #[test]
    fn strict_mutant_rejects_ties() {
        let s = set(&[(int(1), int(1))]);
        assert!(reduction_decider(&s));
        assert!(oracle_decider(&s));
        assert!(!strict_mutant_decider(&s));
    }

    // Exhaustive check of the oracle itself: for tiny integer pair sets,
    // test every eps on a fine grid of quarter steps, which contains the
    // critical points and midpoints of integer data.
    fn fine_grid_truth(pairs: &[(i64, i64)]) -> bool {
        (1..=24).all(|q| {
            let eps = ratio(q, 4);
            let floor = pairs.iter().filter(|(_, d)| int(*d) > eps).map(|(s, _)| int(*s)).min();
            floor.is_none_or(|s| s > eps)
        })
    }

    #[test]
    fn oracle_and_reduction_match_fine_grid_on_small_sets() {
        let values = 0..=4i64;
        let singles: Vec<(i64, i64)> = values.clone().flat_map(|s| values.clone().map(move |d| (s, d))).collect();
        for a in &singles {
            for b in &singles {
                let raw = [*a, *b];
                let s = set(&raw.map(|(s, d)| (int(s), int(d))));
                let truth = fine_grid_truth(&raw);
                assert_eq!(epsgrid_oracle(&s).holds(), truth, "{raw:?}");
                assert_eq!(uniform_epsdelta_holds(&s).holds(), truth, "{raw:?}");
            }
        }
    }

    proptest! {
        #[test]
        fn reduction_agrees_with_oracle(raw in prop::collection::vec((0i64..6, 1i64..4, 0i64..6, 1i64..4), 0..8)) {
            let s = SdPairSet::synthetic(raw.iter().map(|&(sn, sd, dn, dd)| (ratio(sn, sd), ratio(dn, dd))));
            prop_assert_eq!(uniform_epsdelta_holds(&s).holds(), epsgrid_oracle(&s).holds());
        }
    }
}
