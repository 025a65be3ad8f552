use std::cell::RefCell;
use std::fmt;

use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::rational::{self, Rational};

use super::SequenceError;

/// A strictly decreasing sequence `a_1 > a_2 > .. > alpha >= 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum TestSequence {
    /// `a_n = alpha + c r^n` for `n >= 1`.
    ClosedForm {
        #[serde(with = "rational::serde_str")]
        alpha: Rational,
        #[serde(with = "rational::serde_str")]
        c: Rational,
        #[serde(with = "rational::serde_str")]
        r: Rational,
    },
    /// Finitely many terms with a declared limit; verdicts that depend on
    /// the tail are horizon-limited.
    Explicit {
        #[serde(with = "rational::serde_str_vec")]
        terms: Vec<Rational>,
        #[serde(with = "rational::serde_str")]
        alpha: Rational,
    },
}

impl TestSequence {
    pub fn closed_form(alpha: Rational, c: Rational, r: Rational) -> Result<Self, SequenceError> {
        if alpha.is_negative() {
            return Err(SequenceError::Invalid(format!("limit {} is negative", rational::format(&alpha))));
        }
        if !c.is_positive() {
            return Err(SequenceError::Invalid(format!("scale c = {} must be positive", rational::format(&c))));
        }
        if !(r.is_positive() && r < Rational::one()) {
            return Err(SequenceError::Invalid(format!("ratio r = {} must lie in (0, 1)", rational::format(&r))));
        }
        Ok(TestSequence::ClosedForm { alpha, c, r })
    }

    pub fn explicit(terms: Vec<Rational>, alpha: Rational) -> Result<Self, SequenceError> {
        if terms.is_empty() {
            return Err(SequenceError::Invalid("explicit sequence has no terms".into()));
        }
        if alpha.is_negative() {
            return Err(SequenceError::Invalid("declared limit is negative".into()));
        }
        if let Some(k) = terms.windows(2).position(|w| w[1] >= w[0]) {
            return Err(SequenceError::Invalid(format!("terms {} and {} do not decrease", k + 1, k + 2)));
        }
        if terms.last().is_some_and(|t| *t <= alpha) {
            return Err(SequenceError::Invalid("terms must stay above the declared limit".into()));
        }
        Ok(TestSequence::Explicit { terms, alpha })
    }

    pub fn limit(&self) -> &Rational {
        match self {
            TestSequence::ClosedForm { alpha, .. } | TestSequence::Explicit { alpha, .. } => alpha,
        }
    }

    /// Whether the tail beyond any truncation is known in closed form.
    pub fn has_tail_bound(&self) -> bool {
        matches!(self, TestSequence::ClosedForm { .. })
    }

    /// Number of available terms (`None` = infinite).
    pub fn horizon(&self) -> Option<usize> {
        match self {
            TestSequence::ClosedForm { .. } => None,
            TestSequence::Explicit { terms, .. } => Some(terms.len()),
        }
    }

    /// `a_n` for `n >= 1`.
    pub fn term(&self, n: usize) -> Option<Rational> {
        assert!(n >= 1, "sequence indices start at 1");
        match self {
            TestSequence::ClosedForm { alpha, c, r } => Some(alpha + c * rational::pow(r, n as u32)),
            TestSequence::Explicit { terms, .. } => terms.get(n - 1).cloned(),
        }
    }

    /// Checks `a_{n+1} < a_n` and `a_n > alpha` on the first `n` terms.
    pub fn validate_prefix(&self, n: usize) -> Result<(), SequenceError> {
        let terms = Terms::new(self);
        let upto = self.horizon().map_or(n, |h| h.min(n));
        for k in 1..=upto {
            let a = terms.get(k).expect("within horizon");
            if a <= *self.limit() {
                return Err(SequenceError::Invalid(format!("a_{k} is not above the limit")));
            }
            if k < upto && terms.get(k + 1).expect("within horizon") >= a {
                return Err(SequenceError::Invalid(format!("a_{} >= a_{k}", k + 1)));
            }
        }
        Ok(())
    }
}

impl fmt::Display for TestSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TestSequence::ClosedForm { alpha, c, r } => {
                write!(f, "{} + {}*({})^n", rational::format(alpha), rational::format(c), rational::format(r))
            }
            TestSequence::Explicit { terms, alpha } => {
                write!(f, "explicit[{} terms] -> {}", terms.len(), rational::format(alpha))
            }
        }
    }
}

/// Memoised term access. Closed forms grow the table on demand.
pub(crate) struct Terms<'a> {
    seq: &'a TestSequence,
    cache: RefCell<Vec<Rational>>,
    power: RefCell<Rational>,
}

impl<'a> Terms<'a> {
    pub(crate) fn new(seq: &'a TestSequence) -> Self {
        Terms { seq, cache: RefCell::new(Vec::new()), power: RefCell::new(Rational::one()) }
    }

    pub(crate) fn limit(&self) -> &Rational {
        self.seq.limit()
    }

    /// `a_n` (1-based), or `None` past an explicit horizon.
    pub(crate) fn get(&self, n: usize) -> Option<Rational> {
        debug_assert!(n >= 1);
        match self.seq {
            TestSequence::Explicit { terms, .. } => terms.get(n - 1).cloned(),
            TestSequence::ClosedForm { alpha, c, r } => {
                let mut cache = self.cache.borrow_mut();
                let mut power = self.power.borrow_mut();
                while cache.len() < n {
                    *power *= r;
                    cache.push(alpha + c * &*power);
                }
                Some(cache[n - 1].clone())
            }
        }
    }

    pub(crate) fn tail_is_exact(&self) -> bool {
        self.seq.has_tail_bound()
    }

    /// Largest `n >= from` with `a_n > t`, or `None` if `a_from <= t`.
    /// Closed forms require `t > alpha`; explicit lists stop at their horizon.
    pub(crate) fn last_index_above(&self, t: &Rational, from: usize) -> Option<usize> {
        if self.get(from)? <= *t {
            return None;
        }
        match self.seq {
            TestSequence::Explicit { terms, .. } => {
                // terms decrease, so the qualifying indices form a prefix
                Some(terms.partition_point(|a| a > t).max(from))
            }
            TestSequence::ClosedForm { .. } => {
                assert!(t > self.limit(), "scan threshold must exceed the limit");
                let mut hi = from.max(1) * 2;
                while self.get(hi).expect("closed form") > *t {
                    hi *= 2;
                }
                let cache = self.cache.borrow();
                Some(cache[..hi].partition_point(|a| a > t))
            }
        }
    }
}
