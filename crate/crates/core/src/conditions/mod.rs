//! Contraction conditions on finite spaces.
//!
//! Pointwise conditions (Kannan/Chatterjea constants, the strict conditions
//! CM and CM2) are decided exactly. The epsilon-delta conditions are reduced
//! to finite `(S, D)` pair sets and decided in [`epsdelta`].

pub mod epsdelta;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::metric::{FiniteMetricSpace, SelfMap};
use crate::orbit::orbit;
use crate::rational::{self, Rational};

pub use epsdelta::{epsgrid_oracle, uniform_epsdelta_holds, EpsDelta, EpsDeltaWitness, PairForm, SdPair, SdPairSet};

/// Least constant `alpha` in a Kannan or Chatterjea bound.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MinAlpha {
    Value {
        #[serde(with = "rational::serde_str")]
        alpha: Rational,
    },
    /// A pair with zero denominator and positive `d(Tx,Ty)`.
    Unbounded { x: usize, y: usize },
}

impl MinAlpha {
    pub fn value(&self) -> Option<&Rational> {
        match self {
            MinAlpha::Value { alpha } => Some(alpha),
            MinAlpha::Unbounded { .. } => None,
        }
    }

    /// The classical contraction class: `alpha < 1/2`.
    pub fn is_contraction(&self) -> bool {
        self.value().is_some_and(|a| *a < rational::half())
    }
}

/// Outcome of a strict pointwise condition over all `x != y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum PairCheck {
    Holds,
    Fails { x: usize, y: usize },
}

impl PairCheck {
    pub fn holds(&self) -> bool {
        matches!(self, PairCheck::Holds)
    }
}

fn unordered_pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |x| (x + 1..n).map(move |y| (x, y)))
}

/// The distances a contraction condition looks at, for a map whose points
/// are indexed `0..len()`. Images may live outside the indexed set (a
/// sampled interval map), so only these three quantities are exposed.
pub trait MapGeometry {
    fn len(&self) -> usize;
    fn is_empty(&self) -> bool {
        self.len() == 0
    }
    /// `d(x, Tx)`
    fn displacement(&self, x: usize) -> Rational;
    /// `d(x, Ty)`
    fn cross(&self, x: usize, y: usize) -> Rational;
    /// `d(Tx, Ty)`
    fn image_distance(&self, x: usize, y: usize) -> Rational;
}

/// A finite space together with a self-map.
#[derive(Debug, Clone, Copy)]
pub struct SpaceMap<'a> {
    pub space: &'a FiniteMetricSpace,
    pub map: &'a SelfMap,
}

impl MapGeometry for SpaceMap<'_> {
    fn len(&self) -> usize {
        self.space.len()
    }

    fn displacement(&self, x: usize) -> Rational {
        self.space.d(x, self.map.apply(x)).clone()
    }

    fn cross(&self, x: usize, y: usize) -> Rational {
        self.space.d(x, self.map.apply(y)).clone()
    }

    fn image_distance(&self, x: usize, y: usize) -> Rational {
        self.space.d(self.map.apply(x), self.map.apply(y)).clone()
    }
}

/// Points on the real line with their (real) images.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineSample {
    pub points: Vec<Rational>,
    pub images: Vec<Rational>,
}

impl MapGeometry for LineSample {
    fn len(&self) -> usize {
        self.points.len()
    }

    fn displacement(&self, x: usize) -> Rational {
        (&self.points[x] - &self.images[x]).abs()
    }

    fn cross(&self, x: usize, y: usize) -> Rational {
        (&self.points[x] - &self.images[y]).abs()
    }

    fn image_distance(&self, x: usize, y: usize) -> Rational {
        (&self.images[x] - &self.images[y]).abs()
    }
}

/// `d(x,Tx) + d(y,Ty)`
fn kannan_sum<G: MapGeometry>(g: &G, x: usize, y: usize) -> Rational {
    g.displacement(x) + g.displacement(y)
}

/// `d(x,Ty) + d(y,Tx)`
fn chatterjea_sum<G: MapGeometry>(g: &G, x: usize, y: usize) -> Rational {
    g.cross(x, y) + g.cross(y, x)
}

fn min_alpha<G: MapGeometry>(g: &G, denominator: fn(&G, usize, usize) -> Rational) -> MinAlpha {
    let mut alpha = Rational::zero();
    // x == y gives d(Tx,Tx) = 0, which constrains nothing
    for (x, y) in unordered_pairs(g.len()) {
        let numer = g.image_distance(x, y);
        if numer.is_zero() {
            continue;
        }
        let denom = denominator(g, x, y);
        if denom.is_zero() {
            return MinAlpha::Unbounded { x, y };
        }
        let ratio = numer / denom;
        if ratio > alpha {
            alpha = ratio;
        }
    }
    MinAlpha::Value { alpha }
}

/// Least `alpha` with `d(Tx,Ty) <= alpha (d(x,Tx) + d(y,Ty))` for all `x, y`.
pub fn min_kannan_alpha(space: &FiniteMetricSpace, map: &SelfMap) -> MinAlpha {
    min_kannan_alpha_on(&SpaceMap { space, map })
}

pub fn min_kannan_alpha_on<G: MapGeometry>(g: &G) -> MinAlpha {
    min_alpha(g, kannan_sum)
}

/// Least `alpha` with `d(Tx,Ty) <= alpha (d(x,Ty) + d(y,Tx))` for all `x, y`.
pub fn min_chatterjea_alpha(space: &FiniteMetricSpace, map: &SelfMap) -> MinAlpha {
    min_chatterjea_alpha_on(&SpaceMap { space, map })
}

pub fn min_chatterjea_alpha_on<G: MapGeometry>(g: &G) -> MinAlpha {
    min_alpha(g, chatterjea_sum)
}

/// Least Lipschitz constant `k` with `d(Tx,Ty) <= k d(x,y)`.
pub fn min_lipschitz(space: &FiniteMetricSpace, map: &SelfMap) -> Rational {
    let g = SpaceMap { space, map };
    unordered_pairs(space.len())
        .map(|(x, y)| g.image_distance(x, y) / space.d(x, y))
        .max()
        .unwrap_or_else(Rational::zero)
}

fn strict_check<G: MapGeometry>(g: &G, sum: fn(&G, usize, usize) -> Rational) -> PairCheck {
    for (x, y) in unordered_pairs(g.len()) {
        if g.image_distance(x, y) * rational::int(2) >= sum(g, x, y) {
            return PairCheck::Fails { x, y };
        }
    }
    PairCheck::Holds
}

/// (CM): `x != y` implies `d(Tx,Ty) < (d(x,Tx) + d(y,Ty)) / 2`.
pub fn satisfies_cm(space: &FiniteMetricSpace, map: &SelfMap) -> PairCheck {
    satisfies_cm_on(&SpaceMap { space, map })
}

pub fn satisfies_cm_on<G: MapGeometry>(g: &G) -> PairCheck {
    strict_check(g, kannan_sum)
}

/// (CM2): `x != y` implies `d(Tx,Ty) < (d(x,Ty) + d(y,Tx)) / 2`.
pub fn satisfies_cm2(space: &FiniteMetricSpace, map: &SelfMap) -> PairCheck {
    satisfies_cm2_on(&SpaceMap { space, map })
}

pub fn satisfies_cm2_on<G: MapGeometry>(g: &G) -> PairCheck {
    strict_check(g, chatterjea_sum)
}

/// Strict Banach-type condition: `x != y` implies `d(Tx,Ty) < d(x,y)`.
pub fn satisfies_strict_banach(space: &FiniteMetricSpace, map: &SelfMap) -> PairCheck {
    let g = SpaceMap { space, map };
    for (x, y) in unordered_pairs(space.len()) {
        if &g.image_distance(x, y) >= space.d(x, y) {
            return PairCheck::Fails { x, y };
        }
    }
    PairCheck::Holds
}

fn global_pairs<G: MapGeometry>(g: &G, form: PairForm, hypothesis: impl Fn(usize, usize) -> Rational) -> SdPairSet {
    let mut set = SdPairSet::new(form);
    for x in 0..g.len() {
        for y in x..g.len() {
            set.push(hypothesis(x, y), g.image_distance(x, y), (x, y));
        }
    }
    set
}

/// Pairs for the global Kannan-type epsilon-delta condition, over all
/// unordered `x, y` including `x == y`.
pub fn global_pairs_kannan(space: &FiniteMetricSpace, map: &SelfMap) -> SdPairSet {
    let g = SpaceMap { space, map };
    global_pairs(&g, PairForm::GlobalKannan, |x, y| kannan_sum(&g, x, y) * rational::half())
}

pub fn global_pairs_chatterjea(space: &FiniteMetricSpace, map: &SelfMap) -> SdPairSet {
    let g = SpaceMap { space, map };
    global_pairs(&g, PairForm::GlobalChatterjea, |x, y| chatterjea_sum(&g, x, y) * rational::half())
}

pub fn global_pairs_banach(space: &FiniteMetricSpace, map: &SelfMap) -> SdPairSet {
    let g = SpaceMap { space, map };
    global_pairs(&g, PairForm::GlobalBanach, |x, y| space.d(x, y).clone())
}

/// Distinct states of the orbit of `x0`; every `T^i x0` is one of them.
pub fn orbit_states(map: &SelfMap, x0: usize) -> Vec<usize> {
    orbit(map, x0, map.len()).points
}

fn picard_pairs(
    space: &FiniteMetricSpace,
    map: &SelfMap,
    x0: usize,
    form: PairForm,
    sum: impl Fn(&SpaceMap<'_>, usize, usize) -> Rational,
) -> SdPairSet {
    // (T^i x0, T^j x0) ranges over all pairs of orbit states; S and D are
    // symmetric in the two points so unordered pairs suffice.
    let g = SpaceMap { space, map };
    let states = orbit_states(map, x0);
    let mut set = SdPairSet::new(form);
    for (a, &u) in states.iter().enumerate() {
        for &v in &states[a..] {
            set.push(sum(&g, u, v) * rational::half(), g.image_distance(u, v), (u, v));
        }
    }
    set
}

/// Pairs for the Picard-restricted Kannan-type condition from `x0`.
pub fn picard_pairs_kannan(space: &FiniteMetricSpace, map: &SelfMap, x0: usize) -> SdPairSet {
    picard_pairs(space, map, x0, PairForm::PicardKannan { start: x0 }, |g, u, v| kannan_sum(g, u, v))
}

/// Pairs for the Picard-restricted Chatterjea-type condition from `x0`.
pub fn picard_pairs_chatterjea(space: &FiniteMetricSpace, map: &SelfMap, x0: usize) -> SdPairSet {
    picard_pairs(space, map, x0, PairForm::PicardChatterjea { start: x0 }, |g, u, v| chatterjea_sum(g, u, v))
}

/// Per-mapping classification.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub map: SelfMap,
    /// Banach-type CJM pair: global epsilon-delta plus strict contraction.
    pub banach_cjm: bool,
    #[serde(with = "rational::serde_str")]
    pub lipschitz: Rational,
    pub kannan_alpha: MinAlpha,
    pub kannan: bool,
    pub chatterjea_alpha: MinAlpha,
    pub chatterjea: bool,
    pub cm: PairCheck,
    pub cm2: PairCheck,
    pub global_epsdelta_kannan: EpsDelta,
    pub global_epsdelta_chatterjea: EpsDelta,
    /// Indexed by start point.
    pub picard_epsdelta_kannan: Vec<bool>,
    pub picard_epsdelta_chatterjea: Vec<bool>,
    pub fixed_points: Vec<usize>,
}

impl ConditionReport {
    pub fn picard_kannan_all(&self) -> bool {
        self.picard_epsdelta_kannan.iter().all(|&b| b)
    }

    pub fn picard_chatterjea_all(&self) -> bool {
        self.picard_epsdelta_chatterjea.iter().all(|&b| b)
    }
}

pub fn classify(space: &FiniteMetricSpace, map: &SelfMap) -> ConditionReport {
    let kannan_alpha = min_kannan_alpha(space, map);
    let chatterjea_alpha = min_chatterjea_alpha(space, map);
    let n = space.len();
    ConditionReport {
        map: map.clone(),
        banach_cjm: uniform_epsdelta_holds(&global_pairs_banach(space, map)).holds()
            && satisfies_strict_banach(space, map).holds(),
        lipschitz: min_lipschitz(space, map),
        kannan: kannan_alpha.is_contraction(),
        kannan_alpha,
        chatterjea: chatterjea_alpha.is_contraction(),
        chatterjea_alpha,
        cm: satisfies_cm(space, map),
        cm2: satisfies_cm2(space, map),
        global_epsdelta_kannan: uniform_epsdelta_holds(&global_pairs_kannan(space, map)),
        global_epsdelta_chatterjea: uniform_epsdelta_holds(&global_pairs_chatterjea(space, map)),
        picard_epsdelta_kannan: (0..n)
            .map(|x0| uniform_epsdelta_holds(&picard_pairs_kannan(space, map, x0)).holds())
            .collect(),
        picard_epsdelta_chatterjea: (0..n)
            .map(|x0| uniform_epsdelta_holds(&picard_pairs_chatterjea(space, map, x0)).holds())
            .collect(),
        fixed_points: crate::picard::detect_fixed_points(map),
    }
}
