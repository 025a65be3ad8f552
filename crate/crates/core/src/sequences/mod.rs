//! Conditions on strictly decreasing sequences `a_n -> alpha >= 0`.
//!
//! Conditions (i) to (iv) are each equivalent to `alpha = 0`. The decision
//! procedures return that answer and cross-check it against
//! [`seq_epsgrid_oracle`]; a disagreement is an error, never resolved
//! silently. Condition (v) is decided from the limit points of the sum set
//! `{a_m + a_n}`.

mod model;
mod oracle;

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::conditions::epsdelta::{uniform_epsdelta_holds, PairForm, SdPairSet};
use crate::conditions::{orbit_states, picard_pairs_kannan, satisfies_cm};
use crate::metric::{FiniteMetricSpace, SelfMap};
use crate::rational::{self, Rational};

pub use model::TestSequence;
pub use oracle::{seq_epsgrid_oracle, LemmaCondition, OracleVerdict, DEFAULT_TRUNCATION};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SequenceError {
    #[error("invalid sequence: {0}")]
    Invalid(String),
    #[error("condition (iii) needs a shift k >= 1, got {k}")]
    InvalidShift { k: usize },
    #[error("condition {condition}: decision procedure says {primary}, oracle says {oracle}")]
    Inconsistent { condition: LemmaCondition, primary: bool, oracle: bool },
    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),
}

/// Shifts sampled for (ii) and (iii) by [`verify_lemma1`].
pub const SAMPLED_SHIFTS: [usize; 4] = [0, 1, 2, 5];

pub fn cond_i(seq: &TestSequence) -> bool {
    seq.limit().is_zero()
}

fn cross_checked(seq: &TestSequence, cond: LemmaCondition, primary: bool) -> Result<bool, SequenceError> {
    let verdict = seq_epsgrid_oracle(seq, cond, DEFAULT_TRUNCATION)?;
    if !verdict.horizon_limited && verdict.holds != primary {
        return Err(SequenceError::Inconsistent { condition: cond, primary, oracle: verdict.holds });
    }
    Ok(primary)
}

pub fn cond_ii(seq: &TestSequence, k: usize) -> Result<bool, SequenceError> {
    cross_checked(seq, LemmaCondition::II(k), cond_i(seq))
}

pub fn cond_iii(seq: &TestSequence, k: usize) -> Result<bool, SequenceError> {
    if k == 0 {
        return Err(SequenceError::InvalidShift { k });
    }
    cross_checked(seq, LemmaCondition::III(k), cond_i(seq))
}

pub fn cond_iv(seq: &TestSequence) -> Result<bool, SequenceError> {
    cross_checked(seq, LemmaCondition::IV, cond_i(seq))
}

/// A positive `eps` approached from above by sums `a_m + a_n`, if any.
/// Such an `eps` admits no `delta`. Closed forms always have one:
/// `a_1 + a_n` decreases to `a_1 + alpha`. A finite list has none.
pub fn sum_limit_point(seq: &TestSequence) -> Option<Rational> {
    if !seq.has_tail_bound() {
        return None;
    }
    let a1 = seq.term(1).expect("closed forms are infinite");
    Some(a1 + seq.limit())
}

pub fn cond_v(seq: &TestSequence) -> Result<bool, SequenceError> {
    cross_checked(seq, LemmaCondition::V, sum_limit_point(seq).is_none())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceVerdicts {
    pub sequence: TestSequence,
    pub i: bool,
    pub ii: Vec<(usize, bool)>,
    pub iii: Vec<(usize, bool)>,
    pub iv: bool,
    pub v: bool,
    pub horizon_limited: bool,
}

impl SequenceVerdicts {
    /// (i) to (iv) agree at every sampled shift.
    pub fn equivalent(&self) -> bool {
        self.ii.iter().chain(&self.iii).all(|(_, b)| *b == self.i) && self.iv == self.i
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaViolation {
    pub index: usize,
    pub sequence: TestSequence,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lemma1Report {
    pub rows: Vec<SequenceVerdicts>,
    pub violations: Vec<LemmaViolation>,
    /// Index of a sequence with (i) true and (v) false.
    pub strictness_witness: Option<usize>,
}

impl Lemma1Report {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn is_vacuous(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn strictness_witnessed(&self) -> bool {
        self.strictness_witness.is_some()
    }
}

fn evaluate(seq: &TestSequence) -> Result<SequenceVerdicts, SequenceError> {
    seq.validate_prefix(DEFAULT_TRUNCATION)?;
    let ii = SAMPLED_SHIFTS.iter().map(|&k| Ok((k, cond_ii(seq, k)?))).collect::<Result<_, SequenceError>>()?;
    let iii = SAMPLED_SHIFTS
        .iter()
        .filter(|&&k| k >= 1)
        .map(|&k| Ok((k, cond_iii(seq, k)?)))
        .collect::<Result<_, SequenceError>>()?;
    Ok(SequenceVerdicts {
        sequence: seq.clone(),
        i: cond_i(seq),
        ii,
        iii,
        iv: cond_iv(seq)?,
        v: cond_v(seq)?,
        horizon_limited: !seq.has_tail_bound(),
    })
}

/// Checks per sequence that (i) to (iv) agree and that (v) implies (iv),
/// and looks for a sequence separating (i) from (v).
pub fn verify_lemma1(family: &[TestSequence]) -> Lemma1Report {
    let results: Vec<_> = family.par_iter().map(evaluate).collect();
    let mut rows = Vec::new();
    let mut violations = Vec::new();
    for (index, result) in results.into_iter().enumerate() {
        let violation = |message: String| LemmaViolation { index, sequence: family[index].clone(), message };
        match result {
            Err(e) => violations.push(violation(e.to_string())),
            Ok(row) => {
                if !row.equivalent() {
                    violations.push(violation(format!(
                        "conditions (i)-(iv) disagree: i={} ii={:?} iii={:?} iv={}",
                        row.i, row.ii, row.iii, row.iv
                    )));
                }
                if row.v && !row.iv {
                    violations.push(violation("(v) holds but (iv) does not".into()));
                }
                rows.push(row);
            }
        }
    }
    let strictness_witness = rows
        .iter()
        .position(|r| r.i && !r.v && !r.horizon_limited)
        .map(|p| family.iter().position(|s| *s == rows[p].sequence).expect("row from family"));
    Lemma1Report { rows, violations, strictness_witness }
}

/// Conditions on the gap sequence `a_n = d(T^n x, T^{n+1} x)` of one orbit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapConditions {
    pub start: usize,
    #[serde(with = "rational::serde_str_vec")]
    pub gaps: Vec<Rational>,
    /// The gaps reach 0.
    pub i: bool,
    pub ii: Vec<(usize, bool)>,
    pub iii: Vec<(usize, bool)>,
    pub iv: bool,
    /// The uniform condition over the Kannan pairs of the orbit; this
    /// bounds `d(T^{i+1}x, T^{j+1}x)`, not a sum of gaps.
    pub v: bool,
}

impl GapConditions {
    pub fn all_hold(&self) -> bool {
        self.i && self.iv && self.v && self.ii.iter().chain(&self.iii).all(|(_, b)| *b)
    }

    /// (i) to (iv) agree, as they must for a strictly decreasing sequence.
    pub fn consistent(&self) -> bool {
        self.ii.iter().chain(&self.iii).all(|(_, b)| *b == self.i) && self.iv == self.i
    }
}

/// Evaluates the gap conditions for the orbit of `x0`. The orbit is
/// eventually periodic, so the infinite gap sequence takes finitely many
/// values and each condition reduces to a finite pair set.
pub fn gap_conditions(space: &FiniteMetricSpace, map: &SelfMap, x0: usize) -> Result<GapConditions, SequenceError> {
    if let crate::conditions::PairCheck::Fails { x, y } = satisfies_cm(space, map) {
        return Err(SequenceError::HypothesisViolation(format!("condition (CM) fails at ({x}, {y})")));
    }
    let states = orbit_states(map, x0);
    let gap_of = |x: usize| space.d(x, map.apply(x)).clone();
    let gaps: Vec<Rational> = states.iter().map(|&x| gap_of(x)).collect();
    // one lap past the prefix covers every shifted index pattern
    let max_shift = *SAMPLED_SHIFTS.iter().max().expect("non-empty");
    let mut walk = Vec::with_capacity(states.len() + max_shift + 2);
    let mut x = x0;
    for _ in 0..2 * (states.len() + max_shift + 1) {
        walk.push(gap_of(x));
        x = map.apply(x);
    }
    let base = states.len() + max_shift + 1;
    let one_index = |k: usize, mean: bool| {
        let mut set = SdPairSet::new(PairForm::GapSequence);
        for n in 0..base {
            let s = if mean { rational::midpoint(&walk[n], &walk[n + 1]) } else { walk[n].clone() };
            set.push(s, walk[n + k].clone(), (n, n + k));
        }
        uniform_epsdelta_holds(&set).holds()
    };
    let ii = SAMPLED_SHIFTS.iter().map(|&k| (k, one_index(k, false))).collect();
    let iii = SAMPLED_SHIFTS.iter().filter(|&&k| k >= 1).map(|&k| (k, one_index(k, true))).collect();
    let iv = {
        let mut set = SdPairSet::new(PairForm::GapSequence);
        for m in 0..base {
            for n in m..base {
                let v = &walk[m] + &walk[n];
                set.push(v.clone(), v, (m, n));
            }
        }
        uniform_epsdelta_holds(&set).holds()
    };
    Ok(GapConditions {
        start: x0,
        i: gaps.iter().any(Zero::is_zero),
        gaps,
        ii,
        iii,
        iv,
        v: uniform_epsdelta_holds(&picard_pairs_kannan(space, map, x0)).holds(),
    })
}
