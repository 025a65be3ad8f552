//! Sweeps over finite instances checking each fixed-point theorem.
//!
//! Instances whose hypotheses fail are counted as vacuous rather than
//! passed, so a report distinguishes "nothing to check" from "checked".
//! Finite spaces are complete; the completeness hypothesis is exercised
//! only by [`completeness_necessity_demo`].

mod demo;
mod instances;
mod search;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::conditions::epsdelta::{reduction_decider, Decider};
use crate::conditions::{
    global_pairs_chatterjea, global_pairs_kannan, min_chatterjea_alpha, min_kannan_alpha, orbit_states,
    picard_pairs_chatterjea, picard_pairs_kannan, satisfies_cm, satisfies_cm2,
};
use crate::io::Instance;
use crate::metric::{FiniteMetricSpace, SelfMap};
use crate::orbit::orbit;
use crate::picard::detect_fixed_points;

pub use demo::{completeness_necessity_demo, run_case, CompletenessDemo, DemoCase, DEMO_HORIZON, DEMO_MARGIN};
pub use instances::{
    exhaustive_spaces, instance_pair_sets, instance_seed, random_instance, random_map, random_pair_sets, seeded_pool,
};
pub use search::{search_counterexample, Finding, SearchConfig, SearchOutcome};

/// The checked statements. Identifiers follow the numbering users pass on
/// the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Theorem {
    /// Global Kannan-type condition plus (CM) give a unique fixed point.
    KannanUnique,
    /// Under (CM): Picard-restricted Kannan condition iff unique fixed point
    /// attracting every orbit.
    KannanPicard,
    ChatterjeaUnique,
    ChatterjeaPicard,
    /// Under (CM): every gap sequence reaches 0 iff unique attracting fixed point.
    GapLimit,
}

impl Theorem {
    pub const ALL: [Theorem; 5] = [
        Theorem::KannanUnique,
        Theorem::KannanPicard,
        Theorem::ChatterjeaUnique,
        Theorem::ChatterjeaPicard,
        Theorem::GapLimit,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Theorem::KannanUnique => "2.1",
            Theorem::KannanPicard => "3.1",
            Theorem::ChatterjeaUnique => "4.1",
            Theorem::ChatterjeaPicard => "4.2",
            Theorem::GapLimit => "5.2",
        }
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Theorem {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Theorem::ALL
            .into_iter()
            .find(|t| t.id() == s)
            .ok_or_else(|| format!("unknown theorem {s:?}; expected one of 2.1, 3.1, 4.1, 4.2, 5.2"))
    }
}

/// Result of checking one theorem on one instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum Check {
    Vacuous,
    /// Hypotheses hold and the conclusion follows. For equivalences,
    /// `both` records whether the two clauses were both true.
    Pass {
        both: bool,
    },
    Violation {
        clause: String,
    },
}

/// Unique fixed point that every orbit reaches.
pub fn unique_attracting_fixed_point(map: &SelfMap) -> bool {
    let fixed = detect_fixed_points(map);
    fixed.len() == 1 && (0..map.len()).all(|x| orbit(map, x, map.len()).limit() == Some(fixed[0]))
}

fn uniqueness(hypothesis: bool, map: &SelfMap) -> Check {
    if !hypothesis {
        return Check::Vacuous;
    }
    let fixed = detect_fixed_points(map);
    if fixed.len() != 1 {
        return Check::Violation { clause: format!("expected one fixed point, found {}", fixed.len()) };
    }
    if !unique_attracting_fixed_point(map) {
        return Check::Violation { clause: "an orbit misses the fixed point".into() };
    }
    Check::Pass { both: true }
}

fn equivalence(hypothesis: bool, clause_i: impl FnOnce() -> bool, map: &SelfMap) -> Check {
    if !hypothesis {
        return Check::Vacuous;
    }
    let i = clause_i();
    let ii = unique_attracting_fixed_point(map);
    if i == ii {
        Check::Pass { both: i }
    } else {
        Check::Violation { clause: format!("clause (i) is {i} but clause (ii) is {ii}") }
    }
}

pub fn check_theorem(theorem: Theorem, space: &FiniteMetricSpace, map: &SelfMap, decider: Decider) -> Check {
    let n = space.len();
    match theorem {
        Theorem::KannanUnique => {
            uniqueness(satisfies_cm(space, map).holds() && decider(&global_pairs_kannan(space, map)), map)
        }
        Theorem::ChatterjeaUnique => {
            uniqueness(satisfies_cm2(space, map).holds() && decider(&global_pairs_chatterjea(space, map)), map)
        }
        Theorem::KannanPicard => equivalence(
            satisfies_cm(space, map).holds(),
            || (0..n).all(|x0| decider(&picard_pairs_kannan(space, map, x0))),
            map,
        ),
        Theorem::ChatterjeaPicard => equivalence(
            satisfies_cm2(space, map).holds(),
            || (0..n).all(|x0| decider(&picard_pairs_chatterjea(space, map, x0))),
            map,
        ),
        Theorem::GapLimit => equivalence(
            satisfies_cm(space, map).holds(),
            || {
                (0..n).all(|x0| {
                    let states = orbit_states(map, x0);
                    states.iter().any(|&x| map.apply(x) == x)
                })
            },
            map,
        ),
    }
}

pub fn verify_thm_2_1(space: &FiniteMetricSpace, map: &SelfMap) -> Check {
    check_theorem(Theorem::KannanUnique, space, map, reduction_decider)
}

pub fn verify_thm_3_1(space: &FiniteMetricSpace, map: &SelfMap) -> Check {
    check_theorem(Theorem::KannanPicard, space, map, reduction_decider)
}

pub fn verify_thm_4_1(space: &FiniteMetricSpace, map: &SelfMap) -> Check {
    check_theorem(Theorem::ChatterjeaUnique, space, map, reduction_decider)
}

pub fn verify_thm_4_2(space: &FiniteMetricSpace, map: &SelfMap) -> Check {
    check_theorem(Theorem::ChatterjeaPicard, space, map, reduction_decider)
}

pub fn verify_thm_5_2(space: &FiniteMetricSpace, map: &SelfMap) -> Check {
    check_theorem(Theorem::GapLimit, space, map, reduction_decider)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub index: usize,
    pub instance: Instance,
    pub clause: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationOutcome {
    pub theorem: Theorem,
    pub instances: usize,
    pub vacuous: usize,
    pub hypothesis_holders: usize,
    /// Hypothesis holders where both clauses of an equivalence were true.
    pub both_true: usize,
    pub violations: Vec<Violation>,
}

impl VerificationOutcome {
    fn new(theorem: Theorem) -> Self {
        VerificationOutcome {
            theorem,
            instances: 0,
            vacuous: 0,
            hypothesis_holders: 0,
            both_true: 0,
            violations: vec![],
        }
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    fn record(&mut self, index: usize, space: &FiniteMetricSpace, map: &SelfMap, check: Check) {
        self.instances += 1;
        match check {
            Check::Vacuous => self.vacuous += 1,
            Check::Pass { both } => {
                self.hypothesis_holders += 1;
                self.both_true += usize::from(both);
            }
            Check::Violation { clause } => {
                self.hypothesis_holders += 1;
                self.violations.push(Violation {
                    index,
                    instance: Instance::new(space.clone(), Some(map.clone())),
                    clause,
                });
            }
        }
    }
}

/// How many instances of each size satisfied each condition.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusRow {
    pub n: usize,
    pub instances: usize,
    pub cm: usize,
    pub cm2: usize,
    pub kannan_contraction: usize,
    pub chatterjea_contraction: usize,
    pub unique_fixed_point: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum SweepMode {
    /// Every self-map on the unit space (`n <= 2`) or a seeded pool of spaces.
    Exhaustive { pool_size: usize },
    /// `trials` random instances per size.
    Random { trials: usize },
}

pub const EXHAUSTIVE_BOUND: usize = 4;

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub mode: SweepMode,
    pub sizes: Vec<usize>,
    pub max_value: u32,
    pub seed: u64,
    pub theorems: Vec<Theorem>,
    pub decider: Decider,
}

impl SweepConfig {
    pub fn exhaustive(sizes: Vec<usize>) -> Self {
        SweepConfig {
            mode: SweepMode::Exhaustive { pool_size: 50 },
            sizes,
            max_value: 6,
            seed: 0,
            theorems: Theorem::ALL.to_vec(),
            decider: reduction_decider,
        }
    }

    pub fn random(sizes: Vec<usize>, trials: usize, seed: u64) -> Self {
        SweepConfig { mode: SweepMode::Random { trials }, seed, ..Self::exhaustive(sizes) }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.sizes.is_empty() || self.sizes.contains(&0) {
            return Err("sizes must be positive".into());
        }
        if self.max_value == 0 {
            return Err("distance bound must be positive".into());
        }
        if let SweepMode::Exhaustive { .. } = self.mode {
            if let Some(n) = self.sizes.iter().find(|&&n| n > EXHAUSTIVE_BOUND) {
                return Err(format!("exhaustive sweeps stop at n = {EXHAUSTIVE_BOUND}, got {n}"));
            }
        }
        Ok(())
    }

    /// The instances in canonical order.
    pub fn instances(&self) -> Vec<(FiniteMetricSpace, SelfMap)> {
        let mut out = Vec::new();
        for &n in &self.sizes {
            match self.mode {
                SweepMode::Exhaustive { pool_size } => {
                    for space in exhaustive_spaces(n, pool_size, self.max_value, self.seed) {
                        out.extend(SelfMap::enumerate(n).map(|m| (space.clone(), m)));
                    }
                }
                SweepMode::Random { trials } => {
                    let batch: Vec<_> = (0..trials)
                        .into_par_iter()
                        .map(|i| random_instance(n, self.max_value, instance_seed(self.seed, n, i)))
                        .collect();
                    out.extend(batch);
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepReport {
    pub outcomes: Vec<VerificationOutcome>,
    pub census: Vec<CensusRow>,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(VerificationOutcome::passed)
    }

    pub fn outcome(&self, theorem: Theorem) -> Option<&VerificationOutcome> {
        self.outcomes.iter().find(|o| o.theorem == theorem)
    }
}

struct InstanceResult {
    n: usize,
    checks: Vec<Check>,
    cm: bool,
    cm2: bool,
    kannan: bool,
    chatterjea: bool,
    unique: bool,
}

pub fn run_sweep(config: &SweepConfig) -> Result<SweepReport, String> {
    config.validate()?;
    let instances = config.instances();
    let results: Vec<InstanceResult> = instances
        .par_iter()
        .map(|(space, map)| InstanceResult {
            n: space.len(),
            checks: config.theorems.iter().map(|&t| check_theorem(t, space, map, config.decider)).collect(),
            cm: satisfies_cm(space, map).holds(),
            cm2: satisfies_cm2(space, map).holds(),
            kannan: min_kannan_alpha(space, map).is_contraction(),
            chatterjea: min_chatterjea_alpha(space, map).is_contraction(),
            unique: detect_fixed_points(map).len() == 1,
        })
        .collect();
    let mut outcomes: Vec<VerificationOutcome> = config.theorems.iter().map(|&t| VerificationOutcome::new(t)).collect();
    let mut census: Vec<CensusRow> = Vec::new();
    for (index, ((space, map), r)) in instances.iter().zip(results).enumerate() {
        for (outcome, check) in outcomes.iter_mut().zip(r.checks) {
            outcome.record(index, space, map, check);
        }
        if census.last().is_none_or(|row| row.n != r.n) {
            census.push(CensusRow { n: r.n, ..CensusRow::default() });
        }
        let row = census.last_mut().expect("pushed above");
        row.instances += 1;
        row.cm += usize::from(r.cm);
        row.cm2 += usize::from(r.cm2);
        row.kannan_contraction += usize::from(r.kannan);
        row.chatterjea_contraction += usize::from(r.chatterjea);
        row.unique_fixed_point += usize::from(r.unique);
    }
    Ok(SweepReport { outcomes, census })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conditions::epsdelta::strict_mutant_decider;

    fn swap() -> SelfMap {
        SelfMap::new(vec![1, 0]).unwrap()
    }

    #[test]
    fn constant_map_on_path_passes_everything() {
        let space = FiniteMetricSpace::path(3);
        let map = SelfMap::constant(3, 1);
        for t in Theorem::ALL {
            assert_eq!(check_theorem(t, &space, &map, reduction_decider), Check::Pass { both: true }, "{t}");
        }
    }

    #[test]
    fn swap_map_is_vacuous() {
        let space = FiniteMetricSpace::discrete(2);
        for t in Theorem::ALL {
            assert_eq!(check_theorem(t, &space, &swap(), reduction_decider), Check::Vacuous, "{t}");
        }
    }

    #[test]
    fn single_point_identity_passes() {
        let space = FiniteMetricSpace::discrete(1);
        let map = SelfMap::identity(1);
        assert_eq!(verify_thm_3_1(&space, &map), Check::Pass { both: true });
        assert_eq!(verify_thm_5_2(&space, &map), Check::Pass { both: true });
    }

    #[test]
    fn two_point_census_matches_hand_count() {
        let report = run_sweep(&SweepConfig::exhaustive(vec![2])).unwrap();
        assert!(report.passed());
        let row = &report.census[0];
        assert_eq!((row.instances, row.cm, row.cm2), (4, 2, 2));
        let unique = report.outcome(Theorem::KannanUnique).unwrap();
        assert_eq!((unique.hypothesis_holders, unique.vacuous), (2, 2));
        let chatterjea = report.outcome(Theorem::ChatterjeaPicard).unwrap();
        assert_eq!((chatterjea.hypothesis_holders, chatterjea.both_true), (2, 2));
    }

    #[test]
    fn theorem_ids_round_trip() {
        for t in Theorem::ALL {
            assert_eq!(t.id().parse::<Theorem>(), Ok(t));
        }
        assert!("6.1".parse::<Theorem>().is_err());
    }

    #[test]
    fn exhaustive_bound_is_enforced() {
        assert!(SweepConfig::exhaustive(vec![5]).validate().is_err());
        assert!(SweepConfig::random(vec![5], 3, 1).validate().is_ok());
    }

    #[test]
    fn random_sweeps_are_deterministic() {
        let config = SweepConfig::random(vec![4], 40, 9);
        assert_eq!(config.instances(), config.instances());
        assert_eq!(run_sweep(&config).unwrap(), run_sweep(&config).unwrap());
    }

    #[test]
    fn violations_reproduce_after_reload() {
        // a weakened decider rejects the (0, 0) pair at every fixed point
        let mut config = SweepConfig::exhaustive(vec![2]);
        config.decider = strict_mutant_decider;
        config.theorems = vec![Theorem::KannanPicard];
        let report = run_sweep(&config).unwrap();
        let outcome = &report.outcomes[0];
        assert!(!outcome.violations.is_empty());
        for v in &outcome.violations {
            let reloaded = Instance::parse_json(&v.instance.to_json()).unwrap();
            let map = reloaded.map.unwrap();
            let again = check_theorem(Theorem::KannanPicard, &reloaded.space, &map, strict_mutant_decider);
            assert_eq!(again, Check::Violation { clause: v.clause.clone() });
        }
    }
}
