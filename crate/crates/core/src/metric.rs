//! Finite metric spaces and self-maps.

use std::fmt;

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MetricError {
    #[error("distance table is not square: row {row} has {len} entries, expected {expected}")]
    NotSquare { row: usize, len: usize, expected: usize },
    #[error("a metric space needs at least one point")]
    Empty,
    #[error("table is not a metric: {0}")]
    Invalid(ValidationReport),
    #[error("cannot repair: {0}")]
    Unrepairable(String),
    #[error("map image {image} at point {point} is outside a space of {n} points")]
    ImageOutOfRange { point: usize, image: usize, n: usize },
    #[error("map has {got} entries but the space has {n} points")]
    MapSize { got: usize, n: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    /// `d(i,i) = 0`
    ZeroDiagonal,
    /// `d(i,j) > 0` for `i != j`, and no negative entries
    Positivity,
    Symmetry,
    Triangle,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Axiom::ZeroDiagonal => "zero-diagonal",
            Axiom::Positivity => "positivity",
            Axiom::Symmetry => "symmetry",
            Axiom::Triangle => "triangle",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub axiom: Axiom,
    /// Witness indices. One index for diagonal faults, two for
    /// positivity/symmetry, `(i, j, k)` for `d(i,k) > d(i,j) + d(j,k)`.
    pub witness: Vec<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, axiom: Axiom, witness: &[usize]) -> bool {
        self.violations.iter().any(|v| v.axiom == axiom && v.witness == witness)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return f.write_str("ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{} {:?}", v.axiom, v.witness)?;
        }
        Ok(())
    }
}

fn check_square(dist: &[Vec<Rational>]) -> Result<usize, MetricError> {
    let n = dist.len();
    if n == 0 {
        return Err(MetricError::Empty);
    }
    for (row, r) in dist.iter().enumerate() {
        if r.len() != n {
            return Err(MetricError::NotSquare { row, len: r.len(), expected: n });
        }
    }
    Ok(n)
}

/// Checks the metric axioms over every index (triple) and reports each
/// violation with its witness.
pub fn validate_metric(dist: &[Vec<Rational>]) -> Result<ValidationReport, MetricError> {
    let n = check_square(dist)?;
    let mut violations = Vec::new();
    for i in 0..n {
        if !dist[i][i].is_zero() {
            violations.push(Violation { axiom: Axiom::ZeroDiagonal, witness: vec![i] });
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if !dist[i][j].is_positive() || !dist[j][i].is_positive() {
                violations.push(Violation { axiom: Axiom::Positivity, witness: vec![i, j] });
            }
            if dist[i][j] != dist[j][i] {
                violations.push(Violation { axiom: Axiom::Symmetry, witness: vec![i, j] });
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if dist[i][k] > &dist[i][j] + &dist[j][k] {
                    violations.push(Violation { axiom: Axiom::Triangle, witness: vec![i, j, k] });
                }
            }
        }
    }
    Ok(ValidationReport { violations })
}

/// A finite metric space with an exact distance table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSpace", into = "RawSpace")]
pub struct FiniteMetricSpace {
    dist: Vec<Vec<Rational>>,
}

#[derive(Serialize, Deserialize)]
struct RawSpace {
    n: usize,
    #[serde(with = "rational::serde_str_table")]
    dist: Vec<Vec<Rational>>,
}

impl TryFrom<RawSpace> for FiniteMetricSpace {
    type Error = MetricError;

    fn try_from(raw: RawSpace) -> Result<Self, MetricError> {
        if raw.dist.len() != raw.n {
            return Err(MetricError::NotSquare { row: raw.dist.len(), len: raw.dist.len(), expected: raw.n });
        }
        FiniteMetricSpace::new(raw.dist)
    }
}

impl From<FiniteMetricSpace> for RawSpace {
    fn from(space: FiniteMetricSpace) -> Self {
        RawSpace { n: space.len(), dist: space.dist }
    }
}

impl FiniteMetricSpace {
    pub fn new(dist: Vec<Vec<Rational>>) -> Result<Self, MetricError> {
        let report = validate_metric(&dist)?;
        if !report.is_ok() {
            return Err(MetricError::Invalid(report));
        }
        Ok(FiniteMetricSpace { dist })
    }

    /// Builds a space from integer distances.
    pub fn from_integers(table: &[Vec<i64>]) -> Result<Self, MetricError> {
        Self::new(to_rational_table(table))
    }

    /// `n` points with every pair at distance one.
    pub fn discrete(n: usize) -> Self {
        let dist = (0..n).map(|i| (0..n).map(|j| rational::int(i64::from(i != j))).collect()).collect();
        FiniteMetricSpace { dist }
    }

    /// Points `0..n` on a line with unit spacing.
    pub fn path(n: usize) -> Self {
        let dist = (0..n).map(|i| (0..n).map(|j| rational::int(i.abs_diff(j) as i64)).collect()).collect();
        FiniteMetricSpace { dist }
    }

    /// The subspace of the real line on the given (distinct) coordinates.
    pub fn on_line(coords: &[Rational]) -> Result<Self, MetricError> {
        let dist = coords.iter().map(|x| coords.iter().map(|y| (x - y).abs()).collect()).collect();
        Self::new(dist)
    }

    pub fn len(&self) -> usize {
        self.dist.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dist.is_empty()
    }

    pub fn d(&self, i: usize, j: usize) -> &Rational {
        &self.dist[i][j]
    }

    pub fn table(&self) -> &[Vec<Rational>] {
        &self.dist
    }

    /// Distinct off-diagonal distance values, ascending.
    pub fn distance_values(&self) -> Vec<Rational> {
        let mut values: Vec<Rational> = (0..self.len())
            .flat_map(|i| ((i + 1)..self.len()).map(move |j| (i, j)))
            .map(|(i, j)| self.dist[i][j].clone())
            .collect();
        values.sort();
        values.dedup();
        values
    }

    /// Restricts the space to `keep` (indices in the returned order).
    pub fn subspace(&self, keep: &[usize]) -> FiniteMetricSpace {
        let dist = keep.iter().map(|&i| keep.iter().map(|&j| self.dist[i][j].clone()).collect()).collect();
        FiniteMetricSpace { dist }
    }
}

pub fn to_rational_table(table: &[Vec<i64>]) -> Vec<Vec<Rational>> {
    table.iter().map(|row| row.iter().map(|&v| rational::int(v)).collect()).collect()
}

/// Shortest-path closure of a symmetric table with zero diagonal and
/// strictly positive off-diagonal entries. The result is a metric and no
/// entry increases.
pub fn metric_repair(sym: &[Vec<Rational>]) -> Result<FiniteMetricSpace, MetricError> {
    let n = check_square(sym)?;
    for i in 0..n {
        if !sym[i][i].is_zero() {
            return Err(MetricError::Unrepairable(format!("nonzero diagonal at {i}")));
        }
        for j in 0..n {
            if i != j && !sym[i][j].is_positive() {
                return Err(MetricError::Unrepairable(format!("entry ({i},{j}) is not strictly positive")));
            }
            if sym[i][j] != sym[j][i] {
                return Err(MetricError::Unrepairable(format!("asymmetric entry ({i},{j})")));
            }
        }
    }
    let mut dist = sym.to_vec();
    // Floyd-Warshall
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let through = &dist[i][k] + &dist[k][j];
                if through < dist[i][j] {
                    dist[i][j] = through;
                }
            }
        }
    }
    FiniteMetricSpace::new(dist)
}

/// Random metric on `n` points: integer weights in `1..=max_value`, then
/// shortest-path repair. Deterministic in `seed`.
pub fn random_space(n: usize, max_value: u32, seed: u64) -> FiniteMetricSpace {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_space_with(n, max_value, &mut rng)
}

pub fn random_space_with<R: Rng>(n: usize, max_value: u32, rng: &mut R) -> FiniteMetricSpace {
    assert!(n >= 1, "need at least one point");
    assert!(max_value >= 1, "max_value must be positive");
    let mut table = vec![vec![Rational::zero(); n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let w = rational::int(i64::from(rng.gen_range(1..=max_value)));
            table[i][j] = w.clone();
            table[j][i] = w;
        }
    }
    metric_repair(&table).expect("positive symmetric table always repairs")
}

/// A total self-map of `{0, .., n-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SelfMap {
    image: Vec<usize>,
}

impl SelfMap {
    pub fn new(image: Vec<usize>) -> Result<Self, MetricError> {
        let n = image.len();
        if let Some((point, &img)) = image.iter().enumerate().find(|(_, &v)| v >= n) {
            return Err(MetricError::ImageOutOfRange { point, image: img, n });
        }
        Ok(SelfMap { image })
    }

    /// Checks the map against a space's size.
    pub fn for_space(image: Vec<usize>, space: &FiniteMetricSpace) -> Result<Self, MetricError> {
        if image.len() != space.len() {
            return Err(MetricError::MapSize { got: image.len(), n: space.len() });
        }
        Self::new(image)
    }

    pub fn identity(n: usize) -> Self {
        SelfMap { image: (0..n).collect() }
    }

    pub fn constant(n: usize, p: usize) -> Self {
        assert!(p < n);
        SelfMap { image: vec![p; n] }
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.image[x]
    }

    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    /// Points reachable from `starts` (closed under the map), ascending.
    pub fn forward_closure(&self, starts: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.len()];
        let mut stack: Vec<usize> = starts.to_vec();
        while let Some(x) = stack.pop() {
            if !seen[x] {
                seen[x] = true;
                stack.push(self.apply(x));
            }
        }
        (0..self.len()).filter(|&x| seen[x]).collect()
    }

    /// Restriction to a forward-closed subset, reindexed by position in `keep`.
    pub fn restrict(&self, keep: &[usize]) -> Option<SelfMap> {
        let image = keep.iter().map(|&x| keep.iter().position(|&y| y == self.apply(x))).collect::<Option<Vec<_>>>()?;
        Some(SelfMap { image })
    }

    /// The map with index `code` in base-`n` enumeration order.
    pub fn from_index(n: usize, mut code: u64) -> SelfMap {
        let mut image = Vec::with_capacity(n);
        for _ in 0..n {
            image.push((code % n as u64) as usize);
            code /= n as u64;
        }
        SelfMap { image }
    }

    /// All `n^n` self-maps in lexicographic order of the image table
    /// (least significant entry first).
    pub fn enumerate(n: usize) -> impl Iterator<Item = SelfMap> {
        let total = (n as u64).pow(n as u32);
        (0..total).map(move |code| SelfMap::from_index(n, code))
    }
}

impl fmt::Display for SelfMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, v) in self.image.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn table(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect()
    }

    #[test]
    fn path_metric_is_valid() {
        let t = table(&[&[0, 1, 2], &[1, 0, 1], &[2, 1, 0]]);
        assert!(validate_metric(&t).unwrap().is_ok());
    }

    #[test]
    fn triangle_violation_names_witness() {
        let t = table(&[&[0, 1, 5], &[1, 0, 1], &[5, 1, 0]]);
        let report = validate_metric(&t).unwrap();
        assert!(report.has(Axiom::Triangle, &[0, 1, 2]));
        assert!(!report.is_ok());
    }

    #[test]
    fn zero_table_violates_positivity() {
        let t = table(&[&[0, 0], &[0, 0]]);
        let report = validate_metric(&t).unwrap();
        assert!(report.has(Axiom::Positivity, &[0, 1]));
    }

    #[test]
    fn asymmetric_and_diagonal_faults() {
        let t = table(&[&[1, 2], &[3, 0]]);
        let report = validate_metric(&t).unwrap();
        assert!(report.has(Axiom::ZeroDiagonal, &[0]));
        assert!(report.has(Axiom::Symmetry, &[0, 1]));
    }

    #[test]
    fn non_square_is_shape_error() {
        let t = vec![vec![int(0), int(1)], vec![int(1)]];
        assert!(matches!(validate_metric(&t), Err(MetricError::NotSquare { row: 1, .. })));
    }

    // independent oracle: minimum over all simple paths through the one
    // intermediate vertex available on three points
    fn shortest_path_3(t: &[Vec<Rational>], i: usize, j: usize) -> Rational {
        let k = 3 - i - j;
        let direct = t[i][j].clone();
        let via = &t[i][k] + &t[k][j];
        direct.min(via)
    }

    #[test]
    fn repair_shortens_long_edge() {
        let t = table(&[&[0, 1, 5], &[1, 0, 1], &[5, 1, 0]]);
        let repaired = metric_repair(&t).unwrap();
        assert_eq!(*repaired.d(0, 2), shortest_path_3(&t, 0, 2));
        assert_eq!(*repaired.d(0, 2), int(2));

        let t = table(&[&[0, 3, 10], &[3, 0, 4], &[10, 4, 0]]);
        let repaired = metric_repair(&t).unwrap();
        assert_eq!(*repaired.d(0, 2), shortest_path_3(&t, 0, 2));
        assert_eq!(*repaired.d(0, 2), int(7));
    }

    #[test]
    fn repair_leaves_metric_unchanged() {
        let t = table(&[&[0, 1, 2], &[1, 0, 1], &[2, 1, 0]]);
        assert_eq!(metric_repair(&t).unwrap().table(), &t[..]);
    }

    #[test]
    fn repair_rejects_zero_off_diagonal() {
        let t = table(&[&[0, 0], &[0, 0]]);
        assert!(matches!(metric_repair(&t), Err(MetricError::Unrepairable(_))));
    }

    #[test]
    fn random_space_is_deterministic() {
        assert_eq!(random_space(5, 10, 7), random_space(5, 10, 7));
        assert_ne!(random_space(5, 10, 7), random_space(5, 10, 8));
        let single = random_space(1, 3, 0);
        assert_eq!(single.len(), 1);
        assert!(single.distance_values().is_empty());
    }

    #[test]
    fn self_map_enumeration_counts() {
        assert_eq!(SelfMap::enumerate(2).count(), 4);
        assert_eq!(SelfMap::enumerate(3).count(), 27);
        let all: Vec<_> = SelfMap::enumerate(2).map(|m| m.image().to_vec()).collect();
        assert_eq!(all, vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]]);
    }

    #[test]
    fn self_map_rejects_out_of_range() {
        assert!(SelfMap::new(vec![0, 2]).is_err());
        assert!(SelfMap::for_space(vec![0], &FiniteMetricSpace::discrete(2)).is_err());
    }

    #[test]
    fn restriction_to_closed_subset() {
        let map = SelfMap::new(vec![1, 2, 2, 0]).unwrap();
        let keep = map.forward_closure(&[1]);
        assert_eq!(keep, vec![1, 2]);
        assert_eq!(map.restrict(&keep).unwrap().image(), &[1, 1]);
        assert!(map.restrict(&[0, 3]).is_none());
    }

    #[test]
    fn serde_round_trip_uses_string_rationals() {
        let space = FiniteMetricSpace::on_line(&[int(0), crate::rational::ratio(1, 2)]).unwrap();
        let json = serde_json::to_string(&space).unwrap();
        assert!(json.contains("\"1/2\""));
        let back: FiniteMetricSpace = serde_json::from_str(&json).unwrap();
        assert_eq!(back, space);
        let bad = r#"{"n":2,"dist":[["0","0"],["0","0"]]}"#;
        assert!(serde_json::from_str::<FiniteMetricSpace>(bad).is_err());
    }
}
