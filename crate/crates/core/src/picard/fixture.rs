//! Closed-form interval maps used as continuous test fixtures.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interval {
    #[serde(with = "rational::serde_str")]
    pub lo: Rational,
    #[serde(with = "rational::serde_str")]
    pub hi: Rational,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub fn closed(lo: Rational, hi: Rational) -> Self {
        Interval { lo, hi, lo_closed: true, hi_closed: true }
    }

    /// `(lo, hi]`
    pub fn left_open(lo: Rational, hi: Rational) -> Self {
        Interval { lo, hi, lo_closed: false, hi_closed: true }
    }

    pub fn contains(&self, x: &Rational) -> bool {
        let above = if self.lo_closed { *x >= self.lo } else { *x > self.lo };
        let below = if self.hi_closed { *x <= self.hi } else { *x < self.hi };
        above && below
    }

    pub fn contains_f64(&self, x: f64) -> bool {
        if !x.is_finite() {
            return false;
        }
        let lo = rational::to_f64(&self.lo);
        let hi = rational::to_f64(&self.hi);
        let above = if self.lo_closed { x >= lo } else { x > lo };
        let below = if self.hi_closed { x <= hi } else { x < hi };
        above && below
    }

    pub fn is_complete(&self) -> bool {
        self.lo_closed && self.hi_closed
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_closed { '[' } else { '(' },
            rational::format(&self.lo),
            rational::format(&self.hi),
            if self.hi_closed { ']' } else { ')' }
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", content = "value", rename_all = "snake_case")]
pub enum Rule {
    /// `T(x) = c`
    #[serde(with = "rational::serde_str")]
    Constant(Rational),
    /// `T(x) = r x` with `0 < r <= 1`
    #[serde(with = "rational::serde_str")]
    Scale(Rational),
}

impl Rule {
    pub fn apply(&self, x: &Rational) -> Rational {
        match self {
            Rule::Constant(c) => c.clone(),
            Rule::Scale(r) => r * x,
        }
    }

    pub fn apply_f64(&self, x: f64) -> f64 {
        match self {
            Rule::Constant(c) => rational::to_f64(c),
            Rule::Scale(r) => rational::to_f64(r) * x,
        }
    }

    /// Fixed point of the rule on the whole real line, or `None` when
    /// every point is fixed.
    pub fn real_fixed_point(&self) -> Option<Rational> {
        match self {
            Rule::Constant(c) => Some(c.clone()),
            Rule::Scale(r) if r.is_one() => None,
            Rule::Scale(_) => Some(Rational::zero()),
        }
    }

    /// Closed-form `T^n x0`.
    pub fn iterate(&self, x0: &Rational, n: u32) -> Rational {
        match self {
            Rule::Constant(c) if n > 0 => c.clone(),
            Rule::Constant(_) => x0.clone(),
            Rule::Scale(r) => rational::pow(r, n) * x0,
        }
    }

    /// Supremum of `D / S` over orbit index pairs with `S > 0`, where
    /// `S = (d(x_i,x_{i+1}) + d(x_j,x_{j+1})) / 2` and `D = d(x_{i+1},x_{j+1})`.
    ///
    /// For `r x` with `r < 1` the ratio is `2r |r^i - r^j| / ((1-r)(r^i + r^j))`,
    /// which increases to `2r / (1-r)` as `j` grows. Constant and identity
    /// maps have `D = 0` on every orbit. Holds for every start point.
    pub fn orbit_ratio_sup(&self) -> Option<Rational> {
        match self {
            Rule::Constant(_) => Some(Rational::zero()),
            Rule::Scale(r) if r.is_one() => Some(Rational::zero()),
            Rule::Scale(r) => Some(r * rational::int(2) / (Rational::one() - r)),
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::Constant(c) => write!(f, "T(x) = {}", rational::format(c)),
            Rule::Scale(r) if r.is_one() => f.write_str("T(x) = x"),
            Rule::Scale(r) => write!(f, "T(x) = {} x", rational::format(r)),
        }
    }
}

/// A named interval map with analytic facts attached.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContinuousFixture {
    pub name: String,
    pub domain: Interval,
    pub rule: Rule,
    #[serde(with = "rational::serde_str_opt")]
    pub known_fixed_point: Option<Rational>,
    /// Supremum of the Kannan ratio over the domain.
    #[serde(with = "rational::serde_str_opt")]
    pub known_kannan_alpha: Option<Rational>,
    /// A constant `c < 1` with `D <= c S` on every orbit pair, if one exists.
    #[serde(with = "rational::serde_str_opt")]
    pub margin: Option<Rational>,
}

pub const FIXTURE_NAMES: [&str; 6] =
    ["x-over-4", "x-over-4-punctured", "x-over-2", "constant", "constant-punctured", "identity"];

impl ContinuousFixture {
    fn build(name: &str, domain: Interval, rule: Rule, kannan: Option<Rational>) -> Self {
        let known_fixed_point = rule.real_fixed_point().filter(|z| domain.contains(z));
        let margin = rule.orbit_ratio_sup().filter(|m| *m < Rational::one());
        ContinuousFixture {
            name: name.to_string(),
            domain,
            rule,
            known_fixed_point,
            known_kannan_alpha: kannan,
            margin,
        }
    }

    pub fn named(name: &str) -> Option<ContinuousFixture> {
        let unit = || Interval::closed(Rational::zero(), Rational::one());
        let punctured = || Interval::left_open(Rational::zero(), Rational::one());
        let quarter = Rule::Scale(rational::ratio(1, 4));
        let half = rational::ratio(1, 2);
        let fixture = match name {
            // sup |x-y| / (3(x+y)) = 1/3, attained at y = 0
            "x-over-4" => Self::build(name, unit(), quarter, Some(rational::ratio(1, 3))),
            "x-over-4-punctured" => Self::build(name, punctured(), quarter, Some(rational::ratio(1, 3))),
            // sup |x-y| / (x+y) = 1: not a Kannan contraction
            "x-over-2" => Self::build(name, unit(), Rule::Scale(half.clone()), Some(Rational::one())),
            "constant" => Self::build(name, unit(), Rule::Constant(half.clone()), Some(Rational::zero())),
            "constant-punctured" => {
                Self::build(name, punctured(), Rule::Constant(half.clone()), Some(Rational::zero()))
            }
            "identity" => Self::build(name, unit(), Rule::Scale(Rational::one()), None),
            _ => return None,
        };
        Some(fixture)
    }

    pub fn catalog() -> Vec<ContinuousFixture> {
        FIXTURE_NAMES.iter().filter_map(|n| Self::named(n)).collect()
    }

    /// Exact orbit `x_0, .., x_len-1`.
    pub fn exact_orbit(&self, x0: &Rational, len: usize) -> Vec<Rational> {
        let mut points = Vec::with_capacity(len);
        let mut x = x0.clone();
        for _ in 0..len {
            let next = self.rule.apply(&x);
            points.push(std::mem::replace(&mut x, next));
        }
        points
    }

    /// Samples of the map at the given points, for the pointwise checkers.
    pub fn sample(&self, points: &[Rational]) -> crate::conditions::LineSample {
        crate::conditions::LineSample {
            points: points.to_vec(),
            images: points.iter().map(|x| self.rule.apply(x)).collect(),
        }
    }

    pub fn distance(a: &Rational, b: &Rational) -> Rational {
        (a - b).abs()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn catalog_is_complete() {
        assert_eq!(ContinuousFixture::catalog().len(), FIXTURE_NAMES.len());
        assert!(ContinuousFixture::named("nope").is_none());
    }

    #[test]
    fn punctured_domain_loses_its_fixed_point() {
        let closed = ContinuousFixture::named("x-over-4").unwrap();
        let open = ContinuousFixture::named("x-over-4-punctured").unwrap();
        assert_eq!(closed.known_fixed_point, Some(Rational::zero()));
        assert_eq!(open.known_fixed_point, None);
        assert!(!open.domain.contains(&Rational::zero()));
        assert!(open.domain.contains(&Rational::one()));
        assert!(!open.domain.is_complete());
    }

    #[test]
    fn margins_follow_the_ratio_supremum() {
        assert_eq!(ContinuousFixture::named("x-over-4").unwrap().margin, Some(ratio(2, 3)));
        // 2 (1/2) / (1/2) = 2 is no margin
        assert_eq!(ContinuousFixture::named("x-over-2").unwrap().margin, None);
        assert_eq!(ContinuousFixture::named("constant").unwrap().margin, Some(Rational::zero()));
    }

    #[test]
    fn orbit_ratio_supremum_matches_enumeration() {
        // sweep i < j on the x/4 orbit: every ratio stays below 2/3 and the
        // largest approaches it
        let f = ContinuousFixture::named("x-over-4").unwrap();
        let pts = f.exact_orbit(&Rational::one(), 42);
        let mut best = Rational::zero();
        for i in 0..40 {
            for j in 0..40 {
                let s = (ContinuousFixture::distance(&pts[i], &pts[i + 1])
                    + ContinuousFixture::distance(&pts[j], &pts[j + 1]))
                    * ratio(1, 2);
                let d = ContinuousFixture::distance(&pts[i + 1], &pts[j + 1]);
                let r = d / s;
                assert!(r < ratio(2, 3));
                best = best.max(r);
            }
        }
        assert!(ratio(2, 3) - best < ratio(1, 1_000_000));
    }

    #[test]
    fn closed_form_iterate_matches_repeated_application() {
        for f in ContinuousFixture::catalog() {
            let x0 = ratio(7, 8);
            let orbit = f.exact_orbit(&x0, 6);
            for (n, x) in orbit.iter().enumerate() {
                assert_eq!(*x, f.rule.iterate(&x0, n as u32), "{}", f.name);
                assert!(f.domain.contains(x));
            }
        }
    }
}
