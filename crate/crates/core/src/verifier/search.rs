//! Randomised falsification of the cross-module invariants.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::conditions::epsdelta::{oracle_decider, reduction_decider, Decider, SdPair, SdPairSet};
use crate::conditions::{min_chatterjea_alpha, min_kannan_alpha, satisfies_cm, satisfies_cm2};
use crate::io::Instance;
use crate::metric::{FiniteMetricSpace, SelfMap};

use super::{
    check_theorem, instance_pair_sets, instance_seed, random_instance, random_pair_sets, unique_attracting_fixed_point,
    Check, Theorem,
};

#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub trials: usize,
    pub seed: u64,
    pub sizes: Vec<usize>,
    pub max_value: u32,
    pub decider: Decider,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { trials: 10_000, seed: 0, sizes: vec![2, 3, 4, 5, 6], max_value: 6, decider: reduction_decider }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Finding {
    pub trial: usize,
    pub invariant: String,
    /// Shrunk instance, for instance-level invariants.
    pub instance: Option<Instance>,
    /// A single pair on which the decider and the oracle disagree.
    pub pair: Option<SdPair>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub trials: usize,
    pub finding: Option<Finding>,
}

impl SearchOutcome {
    pub fn exhausted(&self) -> bool {
        self.finding.is_none()
    }
}

/// A named predicate that is true when an instance violates the invariant.
type Invariant = (String, Box<dyn Fn(&FiniteMetricSpace, &SelfMap) -> bool + Sync>);

/// Instance-level invariants, as predicates that can be re-run on shrunk
/// instances.
fn instance_invariants(decider: Decider) -> Vec<Invariant> {
    let mut out: Vec<Invariant> = vec![
        (
            "Kannan constant below 1/2 without (CM)".into(),
            Box::new(|s, m| min_kannan_alpha(s, m).is_contraction() && !satisfies_cm(s, m).holds()),
        ),
        (
            "Chatterjea constant below 1/2 without (CM2)".into(),
            Box::new(|s, m| min_chatterjea_alpha(s, m).is_contraction() && !satisfies_cm2(s, m).holds()),
        ),
        (
            "(CM) without a unique attracting fixed point".into(),
            Box::new(|s, m| satisfies_cm(s, m).holds() && !unique_attracting_fixed_point(m)),
        ),
        (
            "(CM2) without a unique attracting fixed point".into(),
            Box::new(|s, m| satisfies_cm2(s, m).holds() && !unique_attracting_fixed_point(m)),
        ),
    ];
    for t in Theorem::ALL {
        out.push((
            format!("theorem {t} violated"),
            Box::new(move |s, m| matches!(check_theorem(t, s, m, decider), Check::Violation { .. })),
        ));
    }
    out
}

/// Drops points one at a time while the map stays closed on what is left
/// and the instance still fails.
fn shrink(space: &FiniteMetricSpace, map: &SelfMap, fails: &dyn Fn(&FiniteMetricSpace, &SelfMap) -> bool) -> Instance {
    let mut space = space.clone();
    let mut map = map.clone();
    'outer: loop {
        for drop in 0..space.len() {
            if space.len() == 1 {
                break 'outer;
            }
            let keep: Vec<usize> = (0..space.len()).filter(|&x| x != drop).collect();
            if let Some(smaller) = map.restrict(&keep) {
                let sub = space.subspace(&keep);
                if fails(&sub, &smaller) {
                    space = sub;
                    map = smaller;
                    continue 'outer;
                }
            }
        }
        break;
    }
    Instance::new(space, Some(map))
}

/// `Some` when the decider and the oracle disagree, carrying the smallest
/// available witness.
fn disagreement(set: &SdPairSet, decider: Decider) -> Option<Option<SdPair>> {
    if decider(set) == oracle_decider(set) {
        return None;
    }
    let single = set.pairs.iter().find(|p| {
        let one = SdPairSet::synthetic([(p.s.clone(), p.d.clone())]);
        decider(&one) != oracle_decider(&one)
    });
    Some(single.or(set.pairs.first()).cloned())
}

fn run_trial(config: &SearchConfig, trial: usize) -> Option<Finding> {
    let n = config.sizes[trial % config.sizes.len()];
    let seed = instance_seed(config.seed, n, trial);
    let (space, map) = random_instance(n, config.max_value, seed);
    let synthetic = random_pair_sets(1, seed);
    let mut sets = instance_pair_sets(&space, &map);
    sets.extend(synthetic);
    for set in &sets {
        if let Some(pair) = disagreement(set, config.decider) {
            return Some(Finding {
                trial,
                invariant: "decider disagrees with the brute-force oracle".into(),
                instance: None,
                pair,
            });
        }
    }
    for (invariant, fails) in instance_invariants(config.decider) {
        if fails(&space, &map) {
            return Some(Finding { trial, invariant, instance: Some(shrink(&space, &map, &*fails)), pair: None });
        }
    }
    None
}

/// Reports the first finding in trial order, or exhaustion.
pub fn search_counterexample(config: &SearchConfig) -> SearchOutcome {
    assert!(!config.sizes.is_empty(), "no sizes to search");
    let finding = (0..config.trials).into_par_iter().find_map_first(|t| run_trial(config, t));
    SearchOutcome { trials: config.trials, finding }
}
