//! Picard iteration with convergence diagnostics, on finite spaces and on
//! the closed-form interval fixtures.

mod fixture;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::metric::{FiniteMetricSpace, SelfMap};
use crate::orbit::{finite_gaps, orbit, Terminal};
use crate::rational::{self, Rational};

pub use fixture::{ContinuousFixture, Interval, Rule, FIXTURE_NAMES};

pub const DEFAULT_TOLERANCE: f64 = 1e-12;
pub const DEFAULT_FIXTURE_MAX_ITER: usize = 10_000;

pub fn default_finite_max_iter(n: usize) -> usize {
    10 * n
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PicardError {
    #[error("start point {x0} is outside the domain {domain}")]
    Domain { x0: String, domain: String },
    #[error("margin must lie in (0, 1), got {0}")]
    Margin(String),
    #[error("tolerance must be positive, got {0}")]
    Tolerance(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum StopReason {
    Cycle {
        entry: usize,
        period: usize,
    },
    MaxIter,
    /// The iterates settle towards a point the domain does not contain.
    LimitOutsideDomain {
        #[serde(with = "rational::serde_str")]
        limit: Rational,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Status<P> {
    Converged { point: P, steps: usize },
    NoFixedPointDetected(StopReason),
    Diverged { step: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedPointResult<P, G> {
    pub status: Status<P>,
    /// `x_0, x_1, ..` as visited.
    pub points: Vec<P>,
    /// `gaps[k] = d(x_k, x_{k+1})`
    pub gaps: Vec<G>,
    /// Indices `k` with `gaps[k+1] >= gaps[k]` before the first zero gap.
    pub decrease_violations: Vec<usize>,
}

impl<P, G> FixedPointResult<P, G> {
    pub fn converged(&self) -> bool {
        matches!(self.status, Status::Converged { .. })
    }
}

/// Every index `k` where the gap sequence fails to strictly decrease,
/// scanning until the first zero gap.
pub fn strict_decrease_violations<T: PartialOrd + Zero>(gaps: &[T]) -> Vec<usize> {
    let mut out = Vec::new();
    for k in 0..gaps.len().saturating_sub(1) {
        if gaps[k].is_zero() {
            break;
        }
        if gaps[k + 1] >= gaps[k] {
            out.push(k);
        }
    }
    out
}

/// First index where the gaps stop strictly decreasing before reaching zero.
pub fn verify_strict_decrease<T: PartialOrd + Zero>(gaps: &[T]) -> Result<(), usize> {
    match strict_decrease_violations(gaps).first() {
        None => Ok(()),
        Some(&k) => Err(k),
    }
}

/// Exact set `{x : Tx = x}`, ascending.
pub fn detect_fixed_points(map: &SelfMap) -> Vec<usize> {
    (0..map.len()).filter(|&x| map.apply(x) == x).collect()
}

/// Picard iteration on a finite space, stopping exactly at a zero gap.
pub fn solve_finite(
    space: &FiniteMetricSpace,
    map: &SelfMap,
    x0: usize,
    max_iter: usize,
) -> Result<FixedPointResult<usize, Rational>, PicardError> {
    if x0 >= space.len() {
        return Err(PicardError::Domain { x0: x0.to_string(), domain: format!("0..{}", space.len()) });
    }
    let o = orbit(map, x0, max_iter);
    let gaps = finite_gaps(space, map, &o).gaps;
    let status = match o.terminal {
        Terminal::FixedPoint { index } => Status::Converged { point: o.points[index], steps: index },
        Terminal::Cycle { entry, period } => Status::NoFixedPointDetected(StopReason::Cycle { entry, period }),
        Terminal::Truncated { .. } => Status::NoFixedPointDetected(StopReason::MaxIter),
    };
    let decrease_violations = strict_decrease_violations(&gaps);
    Ok(FixedPointResult { status, points: o.points, gaps, decrease_violations })
}

/// Floating-point Picard iteration on a fixture. Stops at the first `k` with
/// `|x_k - x_{k+1}| <= tol`; the run only counts as converged (at `x_k`) when
/// the rule's limit lies in the domain.
pub fn solve_fixture(
    fixture: &ContinuousFixture,
    x0: f64,
    tol: f64,
    max_iter: usize,
) -> Result<FixedPointResult<f64, f64>, PicardError> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(PicardError::Tolerance(tol));
    }
    if !fixture.domain.contains_f64(x0) {
        return Err(PicardError::Domain { x0: x0.to_string(), domain: fixture.domain.to_string() });
    }
    let mut points = vec![x0];
    let mut gaps = Vec::new();
    let mut x = x0;
    let mut status = Status::NoFixedPointDetected(StopReason::MaxIter);
    for step in 0..max_iter {
        let next = fixture.rule.apply_f64(x);
        if !fixture.domain.contains_f64(next) {
            status = Status::Diverged { step };
            break;
        }
        let gap = (next - x).abs();
        gaps.push(gap);
        points.push(next);
        if gap <= tol {
            status = match fixture.rule.real_fixed_point() {
                Some(limit) if !fixture.domain.contains(&limit) => {
                    Status::NoFixedPointDetected(StopReason::LimitOutsideDomain { limit })
                }
                _ => Status::Converged { point: x, steps: step },
            };
            break;
        }
        x = next;
    }
    let decrease_violations = strict_decrease_violations(&gaps);
    Ok(FixedPointResult { status, points, gaps, decrease_violations })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarginWitness {
    pub i: usize,
    pub j: usize,
    #[serde(with = "rational::serde_str")]
    pub s: Rational,
    #[serde(with = "rational::serde_str")]
    pub d: Rational,
}

impl MarginWitness {
    /// `D > S` refutes the epsilon-delta condition itself, not just the margin.
    pub fn breaks_condition(&self) -> bool {
        self.d > self.s
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum MarginVerdict {
    /// `delta(eps) = delta_factor * eps` works for every `eps`.
    Certified {
        #[serde(with = "rational::serde_str")]
        margin: Rational,
        #[serde(with = "rational::serde_str")]
        delta_factor: Rational,
    },
    Refuted(MarginWitness),
    /// The sweep passed but no analytic tail bound backs it.
    HorizonLimited {
        horizon: usize,
    },
    /// The sweep passed but the tail supremum exceeds the margin.
    TailExceedsMargin {
        #[serde(with = "rational::serde_str")]
        bound: Rational,
    },
}

impl MarginVerdict {
    pub fn certified(&self) -> bool {
        matches!(self, MarginVerdict::Certified { .. })
    }
}

/// Certifies the Picard-restricted Kannan-type epsilon-delta condition on a
/// fixture orbit through a margin `D <= c S`.
///
/// With the margin in hand, `S < eps + delta` with `delta = eps (1/c - 1)`
/// gives `D <= c S < c (eps + delta) = eps`. Index pairs `i, j <= horizon`
/// are checked exactly; the rest is covered by the fixture's analytic
/// supremum of `D / S`.
pub fn margin_epsdelta(
    fixture: &ContinuousFixture,
    x0: &Rational,
    c: &Rational,
    horizon: usize,
) -> Result<MarginVerdict, PicardError> {
    margin_epsdelta_with_tail(fixture, x0, c, horizon, fixture.rule.orbit_ratio_sup())
}

/// As [`margin_epsdelta`] with an explicit tail bound (`None` = unknown).
pub fn margin_epsdelta_with_tail(
    fixture: &ContinuousFixture,
    x0: &Rational,
    c: &Rational,
    horizon: usize,
    tail_sup: Option<Rational>,
) -> Result<MarginVerdict, PicardError> {
    if !(rational::is_positive(c) && *c < Rational::one()) {
        return Err(PicardError::Margin(rational::format(c)));
    }
    if !fixture.domain.contains(x0) {
        return Err(PicardError::Domain { x0: rational::format(x0), domain: fixture.domain.to_string() });
    }
    let pts = fixture.exact_orbit(x0, horizon + 2);
    let gap = |k: usize| ContinuousFixture::distance(&pts[k], &pts[k + 1]);
    for i in 0..=horizon {
        for j in i..=horizon {
            let s = (gap(i) + gap(j)) * rational::half();
            let d = ContinuousFixture::distance(&pts[i + 1], &pts[j + 1]);
            let ok = if s.is_zero() { d.is_zero() } else { d <= c * &s };
            if !ok {
                return Ok(MarginVerdict::Refuted(MarginWitness { i, j, s, d }));
            }
        }
    }
    Ok(match tail_sup {
        None => MarginVerdict::HorizonLimited { horizon },
        Some(bound) if bound > *c => MarginVerdict::TailExceedsMargin { bound },
        Some(_) => MarginVerdict::Certified { margin: c.clone(), delta_factor: Rational::one() / c - Rational::one() },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn quarter() -> ContinuousFixture {
        ContinuousFixture::named("x-over-4").unwrap()
    }

    #[test]
    fn quarter_map_converges_to_zero_with_closed_form_distances() {
        let r = solve_fixture(&quarter(), 1.0, DEFAULT_TOLERANCE, DEFAULT_FIXTURE_MAX_ITER).unwrap();
        assert!(r.converged());
        for (n, x) in r.points.iter().enumerate() {
            let expected = 4f64.powi(-(n as i32));
            assert!(((x - expected) / expected).abs() <= 1e-12, "n={n}");
        }
        for (k, g) in r.gaps.iter().enumerate() {
            let expected = 3.0 * 4f64.powi(-(k as i32 + 1));
            assert!(((g - expected) / expected).abs() <= 1e-12);
        }
        assert!(*r.gaps.last().unwrap() <= DEFAULT_TOLERANCE);
        assert!(r.decrease_violations.is_empty());
    }

    #[test]
    fn punctured_domain_has_no_fixed_point() {
        let f = ContinuousFixture::named("x-over-4-punctured").unwrap();
        let r = solve_fixture(&f, 1.0, DEFAULT_TOLERANCE, DEFAULT_FIXTURE_MAX_ITER).unwrap();
        assert_eq!(r.status, Status::NoFixedPointDetected(StopReason::LimitOutsideDomain { limit: int(0) }));
        assert!(*r.gaps.last().unwrap() <= DEFAULT_TOLERANCE);
        assert!(r.points.iter().all(|&x| x > 0.0));
        assert!(matches!(solve_fixture(&f, 0.0, 1e-12, 10), Err(PicardError::Domain { .. })));
    }

    #[test]
    fn constant_fixture_converges_in_one_step() {
        let f = ContinuousFixture::named("constant").unwrap();
        let r = solve_fixture(&f, 0.9, DEFAULT_TOLERANCE, 100).unwrap();
        assert_eq!(r.status, Status::Converged { point: 0.5, steps: 1 });
        let r = solve_fixture(&f, 0.5, DEFAULT_TOLERANCE, 100).unwrap();
        assert_eq!(r.status, Status::Converged { point: 0.5, steps: 0 });
    }

    #[test]
    fn finite_constant_map_converges_within_one_step() {
        let space = FiniteMetricSpace::path(4);
        let map = SelfMap::constant(4, 2);
        for x0 in 0..4 {
            let r = solve_finite(&space, &map, x0, default_finite_max_iter(4)).unwrap();
            match r.status {
                Status::Converged { point, steps } => {
                    assert_eq!(point, 2);
                    assert!(steps <= 1);
                }
                other => panic!("{other:?}"),
            }
        }
        assert!(solve_finite(&space, &map, 9, 10).is_err());
    }

    #[test]
    fn finite_swap_cycles() {
        let space = FiniteMetricSpace::discrete(2);
        let map = SelfMap::new(vec![1, 0]).unwrap();
        let r = solve_finite(&space, &map, 0, 20).unwrap();
        assert_eq!(r.status, Status::NoFixedPointDetected(StopReason::Cycle { entry: 0, period: 2 }));
        assert_eq!(r.decrease_violations, vec![0]);
    }

    #[test]
    fn strict_decrease_examples() {
        assert_eq!(verify_strict_decrease(&[ratio(3, 4), ratio(3, 16), ratio(3, 64)]), Ok(()));
        assert_eq!(verify_strict_decrease(&[int(1), int(1)]), Err(0));
        assert_eq!(verify_strict_decrease(&[int(1), int(0)]), Ok(()));
        assert_eq!(verify_strict_decrease(&[int(2), int(0), int(0)]), Ok(()));
        assert_eq!(verify_strict_decrease::<Rational>(&[]), Ok(()));
    }

    #[test]
    fn fixed_point_detection() {
        assert_eq!(detect_fixed_points(&SelfMap::identity(3)), vec![0, 1, 2]);
        assert_eq!(detect_fixed_points(&SelfMap::constant(3, 1)), vec![1]);
        assert!(detect_fixed_points(&SelfMap::new(vec![1, 0]).unwrap()).is_empty());
    }

    #[test]
    fn quarter_margin_is_certified_on_both_domains() {
        for name in ["x-over-4", "x-over-4-punctured"] {
            let f = ContinuousFixture::named(name).unwrap();
            let v = margin_epsdelta(&f, &int(1), &ratio(2, 3), 64).unwrap();
            assert_eq!(v, MarginVerdict::Certified { margin: ratio(2, 3), delta_factor: ratio(1, 2) });
        }
    }

    #[test]
    fn quarter_margin_below_supremum_is_refuted_but_condition_survives() {
        let v = margin_epsdelta(&quarter(), &int(1), &ratio(1, 2), 64).unwrap();
        match v {
            MarginVerdict::Refuted(w) => assert!(!w.breaks_condition()),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn half_map_breaks_the_condition() {
        // x0 = 1: i = 0, j = 2 gives S = (1/2 + 1/8)/2 = 5/16 < D = 3/8
        let f = ContinuousFixture::named("x-over-2").unwrap();
        match margin_epsdelta(&f, &int(1), &ratio(2, 3), 16).unwrap() {
            MarginVerdict::Refuted(w) => {
                assert_eq!((w.i, w.j), (0, 2));
                assert_eq!((w.s.clone(), w.d.clone()), (ratio(5, 16), ratio(3, 8)));
                assert!(w.breaks_condition());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn degenerate_orbits_certify_with_any_margin() {
        for name in ["constant", "identity", "constant-punctured"] {
            let f = ContinuousFixture::named(name).unwrap();
            for c in [ratio(1, 100), ratio(99, 100)] {
                assert!(margin_epsdelta(&f, &ratio(3, 4), &c, 32).unwrap().certified(), "{name}");
            }
        }
    }

    #[test]
    fn missing_tail_bound_is_horizon_limited() {
        let v = margin_epsdelta_with_tail(&quarter(), &int(1), &ratio(2, 3), 8, None).unwrap();
        assert_eq!(v, MarginVerdict::HorizonLimited { horizon: 8 });
        let v = margin_epsdelta_with_tail(&quarter(), &int(1), &ratio(2, 3), 8, Some(int(1))).unwrap();
        assert!(matches!(v, MarginVerdict::TailExceedsMargin { .. }));
    }

    #[test]
    fn margin_arguments_are_validated() {
        assert!(margin_epsdelta(&quarter(), &int(1), &int(1), 4).is_err());
        assert!(margin_epsdelta(&quarter(), &int(2), &ratio(1, 2), 4).is_err());
        let open = ContinuousFixture::named("x-over-4-punctured").unwrap();
        assert!(margin_epsdelta(&open, &int(0), &ratio(2, 3), 4).is_err());
    }
}
