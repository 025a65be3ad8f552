//! Picard orbits `x_{k+1} = T(x_k)` and their gap sequences.

use serde::{Deserialize, Serialize};

use crate::metric::{FiniteMetricSpace, SelfMap};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Terminal {
    /// `index` is the first `k` with `x_k = x_{k+1}`.
    FixedPoint {
        index: usize,
    },
    /// The orbit re-enters `points[entry]` after `period >= 2` steps.
    Cycle {
        entry: usize,
        period: usize,
    },
    Truncated {
        max_steps: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Orbit<P> {
    pub start: P,
    /// `x_0, x_1, ..`; for a fixed point or cycle, every distinct state once.
    pub points: Vec<P>,
    pub terminal: Terminal,
}

impl<P: Clone> Orbit<P> {
    pub fn reaches_fixed_point(&self) -> bool {
        matches!(self.terminal, Terminal::FixedPoint { .. })
    }

    /// The fixed point the orbit stops at, if any.
    pub fn limit(&self) -> Option<P> {
        match self.terminal {
            Terminal::FixedPoint { index } => Some(self.points[index].clone()),
            _ => None,
        }
    }
}

/// Finite-space orbit with first-repeat cycle detection.
///
/// `max_steps` bounds the number of applications of `T`. A state repeats
/// within `n` applications, so `max_steps >= n` never truncates.
pub fn orbit(map: &SelfMap, x0: usize, max_steps: usize) -> Orbit<usize> {
    assert!(x0 < map.len(), "start point {x0} outside the space");
    let mut first_seen = vec![usize::MAX; map.len()];
    let mut points = vec![x0];
    first_seen[x0] = 0;
    let mut current = x0;
    for _ in 0..max_steps {
        let next = map.apply(current);
        let k = points.len() - 1;
        if next == current {
            return Orbit { start: x0, points, terminal: Terminal::FixedPoint { index: k } };
        }
        if first_seen[next] != usize::MAX {
            let entry = first_seen[next];
            return Orbit { start: x0, points, terminal: Terminal::Cycle { entry, period: k + 1 - entry } };
        }
        first_seen[next] = points.len();
        points.push(next);
        current = next;
    }
    Orbit { start: x0, points, terminal: Terminal::Truncated { max_steps } }
}

/// Gap sequence `a_k = d(x_k, x_{k+1})`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapSequence<T> {
    pub gaps: Vec<T>,
    pub limit_hint: Option<T>,
}

impl<T> GapSequence<T> {
    pub fn new(gaps: Vec<T>) -> Self {
        GapSequence { gaps, limit_hint: None }
    }

    pub fn len(&self) -> usize {
        self.gaps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gaps.is_empty()
    }
}

/// Gaps along a finite orbit. A fixed-point orbit ends with its zero gap;
/// a cycle contributes one full lap so every gap value appears.
pub fn finite_gaps(space: &FiniteMetricSpace, map: &SelfMap, orbit: &Orbit<usize>) -> GapSequence<Rational> {
    let gaps = orbit.points.iter().map(|&x| space.d(x, map.apply(x)).clone()).collect();
    let limit_hint = orbit.limit().map(|_| num_traits::Zero::zero());
    GapSequence { gaps, limit_hint }
}
