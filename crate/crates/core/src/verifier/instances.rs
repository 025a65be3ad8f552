//! Deterministic instance generators for sweeps.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::conditions::epsdelta::SdPairSet;
use crate::conditions::{
    global_pairs_banach, global_pairs_chatterjea, global_pairs_kannan, picard_pairs_chatterjea, picard_pairs_kannan,
};
use crate::metric::{random_space_with, FiniteMetricSpace, SelfMap};
use crate::rational::{self, Rational};

/// Per-instance seed, so instance `index` does not depend on how many
/// instances precede it or which worker builds it.
pub fn instance_seed(base: u64, n: usize, index: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(base);
    rng.set_stream(((n as u64) << 40) ^ index as u64);
    rng.gen()
}

/// `count` distinct random metrics on `n` points.
pub fn seeded_pool(n: usize, count: usize, max_value: u32, seed: u64) -> Vec<FiniteMetricSpace> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (n as u64).rotate_left(32));
    let mut seen = BTreeSet::new();
    let mut pool = Vec::with_capacity(count);
    let mut attempts = 0;
    while pool.len() < count && attempts < 1000 * count.max(1) {
        attempts += 1;
        let space = random_space_with(n, max_value, &mut rng);
        if seen.insert(space.table().to_vec()) {
            pool.push(space);
        }
    }
    pool
}

/// The spaces an exhaustive sweep uses at size `n`. Up to two points every
/// metric is a rescaling of the unit one, and every condition here is
/// scale invariant, so the unit metric stands for all of them.
pub fn exhaustive_spaces(n: usize, pool_size: usize, max_value: u32, seed: u64) -> Vec<FiniteMetricSpace> {
    if n <= 2 {
        vec![FiniteMetricSpace::discrete(n)]
    } else {
        seeded_pool(n, pool_size, max_value, seed)
    }
}

/// A random map drawn from a mix of uniform maps, maps with at most two
/// image points, and rooted trees (one fixed point, every orbit reaching it).
pub fn random_map<R: Rng>(n: usize, rng: &mut R) -> SelfMap {
    let image = match rng.gen_range(0..3) {
        0 => (0..n).map(|_| rng.gen_range(0..n)).collect(),
        1 => {
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n);
            (0..n).map(|_| if rng.gen_bool(0.5) { a } else { b }).collect()
        }
        _ => {
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(rng);
            let mut image = vec![0; n];
            image[order[0]] = order[0];
            for k in 1..n {
                image[order[k]] = order[rng.gen_range(0..k)];
            }
            image
        }
    };
    SelfMap::new(image).expect("images drawn in range")
}

pub fn random_instance(n: usize, max_value: u32, seed: u64) -> (FiniteMetricSpace, SelfMap) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let space = random_space_with(n, max_value, &mut rng);
    let map = random_map(n, &mut rng);
    (space, map)
}

/// Every pair set the condition checkers build for one instance.
pub fn instance_pair_sets(space: &FiniteMetricSpace, map: &SelfMap) -> Vec<SdPairSet> {
    let mut sets =
        vec![global_pairs_kannan(space, map), global_pairs_chatterjea(space, map), global_pairs_banach(space, map)];
    for x0 in 0..space.len() {
        sets.push(picard_pairs_kannan(space, map, x0));
        sets.push(picard_pairs_chatterjea(space, map, x0));
    }
    sets
}

/// Random synthetic pair sets over a small grid of values, so ties and
/// near-ties between `S` and `D` are common.
pub fn random_pair_sets(count: usize, seed: u64) -> Vec<SdPairSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let len = rng.gen_range(0..8);
            SdPairSet::synthetic((0..len).map(|_| {
                let value =
                    |rng: &mut ChaCha8Rng| -> Rational { rational::ratio(rng.gen_range(0..8), rng.gen_range(1..4)) };
                (value(&mut rng), value(&mut rng))
            }))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::picard::detect_fixed_points;

    #[test]
    fn pool_is_distinct_and_deterministic() {
        let a = seeded_pool(3, 50, 6, 7);
        let b = seeded_pool(3, 50, 6, 7);
        assert_eq!(a.len(), 50);
        assert_eq!(a, b);
        let distinct: BTreeSet<_> = a.iter().map(|s| s.table().to_vec()).collect();
        assert_eq!(distinct.len(), 50);
    }

    #[test]
    fn instance_seeds_depend_on_index_only() {
        assert_eq!(instance_seed(42, 5, 17), instance_seed(42, 5, 17));
        assert_ne!(instance_seed(42, 5, 17), instance_seed(42, 5, 18));
        assert_ne!(instance_seed(42, 5, 17), instance_seed(42, 6, 17));
    }

    #[test]
    fn random_maps_cover_every_shape() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut small_image = false;
        let mut single_fixed = false;
        for _ in 0..200 {
            let m = random_map(6, &mut rng);
            let distinct: BTreeSet<_> = m.image().iter().collect();
            small_image |= distinct.len() <= 2;
            single_fixed |= detect_fixed_points(&m).len() == 1;
        }
        assert!(small_image && single_fixed);
    }
}
