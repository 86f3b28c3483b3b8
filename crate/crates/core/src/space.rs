//! Finite (pseudo-)metric spaces, probability measures on them, and the
//! elementary measure operations: support, restriction and push-forward.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Absolute slack allowed in the triangle inequality.
pub const TRIANGLE_TOL: f64 = 1e-9;
/// Absolute slack allowed on the total mass of a measure.
pub const MASS_TOL: f64 = 1e-12;
/// Above this size the triangle inequality is checked on sampled triples only.
pub const FULL_TRIANGLE_CHECK_MAX: usize = 1100;
const SAMPLED_TRIPLES: usize = 2_000_000;

/// A finite set of labelled points with a dense distance matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteMetricSpace {
    labels: Vec<String>,
    dist: Vec<f64>,
    n: usize,
    is_pseudo: bool,
}

impl FiniteMetricSpace {
    /// Builds a space from row vectors, checking every metric axiom.
    pub fn new(labels: Vec<String>, rows: Vec<Vec<f64>>, is_pseudo: bool) -> Result<Self> {
        let n = rows.len();
        let mut dist = Vec::with_capacity(n * n);
        for row in &rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            dist.extend_from_slice(row);
        }
        Self::from_flat(labels, dist, is_pseudo)
    }

    /// Builds a space from a row-major `n * n` matrix.
    pub fn from_flat(labels: Vec<String>, dist: Vec<f64>, is_pseudo: bool) -> Result<Self> {
        let n = labels.len();
        if dist.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: dist.len(),
            });
        }
        let space = FiniteMetricSpace {
            labels,
            dist,
            n,
            is_pseudo,
        };
        space.validate()?;
        Ok(space)
    }

    /// Builds a space with labels `"0"`, `"1"`, ... from a distance oracle.
    pub fn from_fn(n: usize, is_pseudo: bool, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        Self::from_flat(default_labels(n), tabulate(n, f), is_pseudo)
    }

    /// Builds a space whose metric axioms hold by construction. Only the
    /// cheap O(n²) checks run; the triangle inequality is sampled.
    pub(crate) fn from_fn_trusted(
        labels: Vec<String>,
        is_pseudo: bool,
        f: impl Fn(usize, usize) -> f64,
    ) -> Result<Self> {
        let n = labels.len();
        let space = FiniteMetricSpace {
            dist: tabulate(n, f),
            labels,
            n,
            is_pseudo,
        };
        space.validate_pointwise()?;
        if n <= 256 {
            space.validate_triangle_full()?;
        } else {
            space.validate_triangle_sampled(20_000)?;
        }
        Ok(space)
    }

    fn validate(&self) -> Result<()> {
        self.validate_pointwise()?;
        if self.n <= FULL_TRIANGLE_CHECK_MAX {
            self.validate_triangle_full()
        } else {
            self.validate_triangle_sampled(SAMPLED_TRIPLES)
        }
    }

    fn validate_pointwise(&self) -> Result<()> {
        let n = self.n;
        for i in 0..n {
            for j in 0..n {
                let d = self.dist[i * n + j];
                if !d.is_finite() {
                    return Err(Error::NonFinite);
                }
                if d < 0.0 {
                    return Err(Error::InvalidMetric("negative distance"));
                }
                if i == j && d != 0.0 {
                    return Err(Error::InvalidMetric("non-zero diagonal"));
                }
                if d != self.dist[j * n + i] {
                    return Err(Error::InvalidMetric("asymmetric distance"));
                }
                if i != j && d == 0.0 && !self.is_pseudo {
                    return Err(Error::InvalidMetric(
                        "zero distance between distinct points",
                    ));
                }
            }
        }
        Ok(())
    }

    fn validate_triangle_full(&self) -> Result<()> {
        let n = self.n;
        for j in 0..n {
            let row_j = &self.dist[j * n..(j + 1) * n];
            for i in 0..n {
                let dij = self.dist[i * n + j];
                let row_i = &self.dist[i * n..(i + 1) * n];
                for k in 0..n {
                    if row_i[k] > dij + row_j[k] + TRIANGLE_TOL {
                        return Err(Error::InvalidMetric("triangle inequality violated"));
                    }
                }
            }
        }
        Ok(())
    }

    fn validate_triangle_sampled(&self, samples: usize) -> Result<()> {
        use rand::{Rng, SeedableRng};
        let n = self.n;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x7472_6961);
        for _ in 0..samples {
            let (i, j, k) = (
                rng.gen_range(0..n),
                rng.gen_range(0..n),
                rng.gen_range(0..n),
            );
            if self.dist(i, k) > self.dist(i, j) + self.dist(j, k) + TRIANGLE_TOL {
                return Err(Error::InvalidMetric("triangle inequality violated"));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn is_pseudo(&self) -> bool {
        self.is_pseudo
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.dist[i * self.n..(i + 1) * self.n]
    }

    /// Row-major distance matrix.
    pub fn matrix(&self) -> &[f64] {
        &self.dist
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn diam(&self) -> f64 {
        self.dist.iter().copied().fold(0.0, f64::max)
    }

    /// Diameter of a subset; zero for the empty set.
    pub fn diam_of(&self, set: &[usize]) -> f64 {
        let mut d: f64 = 0.0;
        for &a in set {
            for &b in set {
                d = d.max(self.dist(a, b));
            }
        }
        d
    }

    /// Open ball `{y : d(x, y) < eps}`.
    pub fn ball(&self, x: usize, eps: f64) -> Vec<usize> {
        (0..self.n).filter(|&y| self.dist(x, y) < eps).collect()
    }

    /// Open neighbourhood `{y : d(a, y) < eps for some a in set}`.
    pub fn ball_of_set(&self, set: &[usize], eps: f64) -> Vec<usize> {
        (0..self.n)
            .filter(|&y| set.iter().any(|&a| self.dist(a, y) < eps))
            .collect()
    }

    /// Hausdorff distance between two non-empty subsets.
    ///
    /// With open neighbourhoods the infimum is the larger of the two
    /// directed distances, and it is attained in the limit from above.
    pub fn hausdorff(&self, a: &[usize], b: &[usize]) -> Result<f64> {
        if a.is_empty() || b.is_empty() {
            return Err(Error::EmptySet);
        }
        let directed = |from: &[usize], to: &[usize]| {
            from.iter()
                .map(|&x| {
                    to.iter()
                        .map(|&y| self.dist(x, y))
                        .fold(f64::INFINITY, f64::min)
                })
                .fold(0.0, f64::max)
        };
        Ok(directed(a, b).max(directed(b, a)))
    }

    /// The sub-space on `indices` (in the given order).
    pub fn subspace(&self, indices: &[usize]) -> Result<Self> {
        for &i in indices {
            if i >= self.n {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    len: self.n,
                });
            }
        }
        let labels = indices.iter().map(|&i| self.labels[i].clone()).collect();
        let dist = indices
            .iter()
            .flat_map(|&i| indices.iter().map(move |&j| (i, j)))
            .map(|(i, j)| self.dist(i, j))
            .collect();
        Ok(FiniteMetricSpace {
            labels,
            dist,
            n: indices.len(),
            is_pseudo: self.is_pseudo,
        })
    }

    /// Same points with a rescaled metric.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0) || !factor.is_finite() {
            return Err(Error::InvalidArgument("scale factor must be positive"));
        }
        Ok(FiniteMetricSpace {
            labels: self.labels.clone(),
            dist: self.dist.iter().map(|d| d * factor).collect(),
            n: self.n,
            is_pseudo: self.is_pseudo,
        })
    }

    /// True when `self.dist <= other.dist` entrywise.
    pub fn is_dominated_by(&self, other: &FiniteMetricSpace) -> bool {
        self.n == other.n && self.dist.iter().zip(&other.dist).all(|(a, b)| a <= b)
    }
}

pub(crate) fn default_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{i}")).collect()
}

fn tabulate(n: usize, f: impl Fn(usize, usize) -> f64) -> Vec<f64> {
    let mut dist = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            dist.push(if i == j { 0.0 } else { f(i, j) });
        }
    }
    dist
}

/// A probability vector over the points of a finite space.
#[derive(Clone, Debug, PartialEq)]
pub struct Measure {
    weights: Vec<f64>,
}

impl Measure {
    /// Validates but never renormalizes.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidMeasure("empty weight vector"));
        }
        let mut total = 0.0;
        for &w in &weights {
            if !w.is_finite() {
                return Err(Error::NonFinite);
            }
            if w < 0.0 {
                return Err(Error::InvalidMeasure("negative weight"));
            }
            total += w;
        }
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidMeasure("weights do not sum to one"));
        }
        Ok(Measure { weights })
    }

    /// Divides by the total mass first.
    pub fn normalized(raw: Vec<f64>) -> Result<Self> {
        let total: f64 = raw.iter().sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::InvalidMeasure("total mass must be positive"));
        }
        Self::new(raw.into_iter().map(|w| w / total).collect())
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidMeasure("empty weight vector"));
        }
        Ok(Measure {
            weights: alloc::vec![1.0 / n as f64; n],
        })
    }

    pub fn point_mass(n: usize, at: usize) -> Result<Self> {
        if at >= n {
            return Err(Error::IndexOutOfRange { index: at, len: n });
        }
        let mut weights = alloc::vec![0.0; n];
        weights[at] = 1.0;
        Ok(Measure { weights })
    }

    /// Construction for vectors that are probability vectors up to the
    /// rounding of the caller's own arithmetic.
    pub(crate) fn from_raw_unchecked(weights: Vec<f64>) -> Self {
        Measure { weights }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    #[inline]
    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn mass_of(&self, set: &[usize]) -> f64 {
        set.iter().map(|&i| self.weights[i]).sum()
    }

    /// Indices carrying strictly positive weight.
    pub fn support(&self) -> Vec<usize> {
        (0..self.weights.len())
            .filter(|&i| self.weights[i] > 0.0)
            .collect()
    }

    pub fn integrate(&self, values: &[f64]) -> Result<f64> {
        check_len(self.len(), values.len())?;
        Ok(self.weights.iter().zip(values).map(|(w, v)| w * v).sum())
    }

    pub fn push_forward(&self, map: &PointMap) -> Result<Measure> {
        pushforward(self, map)
    }
}

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// A finite metric space together with a probability measure on it.
#[derive(Clone, Debug, PartialEq)]
pub struct MmSpace {
    space: FiniteMetricSpace,
    measure: Measure,
}

impl MmSpace {
    pub fn new(space: FiniteMetricSpace, measure: Measure) -> Result<Self> {
        check_len(space.len(), measure.len())?;
        Ok(MmSpace { space, measure })
    }

    pub fn uniform(space: FiniteMetricSpace) -> Result<Self> {
        let measure = Measure::uniform(space.len())?;
        Ok(MmSpace { space, measure })
    }

    pub fn space(&self) -> &FiniteMetricSpace {
        &self.space
    }

    pub fn measure(&self) -> &Measure {
        &self.measure
    }

    pub fn len(&self) -> usize {
        self.space.len()
    }

    pub fn is_empty(&self) -> bool {
        self.space.is_empty()
    }

    pub fn fully_supported(&self) -> bool {
        self.measure.weights().iter().all(|&w| w > 0.0)
    }

    pub fn support(&self) -> Vec<usize> {
        support(self)
    }

    pub fn restrict(&self, set: &[usize]) -> Result<MmSpace> {
        restrict(self, set)
    }
}

/// Points of positive mass. No tolerance is applied.
pub fn support(m: &MmSpace) -> Vec<usize> {
    m.measure.support()
}

/// Restriction of an mm-space to a set of full measure.
///
/// The index set is deduplicated and sorted before use.
pub fn restrict(m: &MmSpace, set: &[usize]) -> Result<MmSpace> {
    let mut idx: Vec<usize> = set.to_vec();
    idx.sort_unstable();
    idx.dedup();
    if let Some(&bad) = idx.iter().find(|&&i| i >= m.len()) {
        return Err(Error::IndexOutOfRange {
            index: bad,
            len: m.len(),
        });
    }
    let mass = m.measure.mass_of(&idx);
    if (mass - 1.0).abs() > MASS_TOL {
        return Err(Error::MassNotOne { mass });
    }
    let space = m.space.subspace(&idx)?;
    let measure = Measure {
        weights: idx.iter().map(|&i| m.measure.weight(i)).collect(),
    };
    Ok(MmSpace { space, measure })
}

/// A map between the point sets of two finite spaces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointMap {
    target_size: usize,
    image: Vec<usize>,
}

impl PointMap {
    pub fn new(image: Vec<usize>, target_size: usize) -> Result<Self> {
        if let Some(&bad) = image.iter().find(|&&j| j >= target_size) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                len: target_size,
            });
        }
        Ok(PointMap { target_size, image })
    }

    pub fn identity(n: usize) -> Self {
        PointMap {
            target_size: n,
            image: (0..n).collect(),
        }
    }

    pub fn constant(source_size: usize, target_size: usize, at: usize) -> Result<Self> {
        Self::new(alloc::vec![at; source_size], target_size)
    }

    pub fn source_size(&self) -> usize {
        self.image.len()
    }

    pub fn target_size(&self) -> usize {
        self.target_size
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.image[i]
    }
}

/// `B ↦ μ(p⁻¹(B))`.
pub fn pushforward(mu: &Measure, p: &PointMap) -> Result<Measure> {
    check_len(p.source_size(), mu.len())?;
    let mut out = alloc::vec![0.0; p.target_size()];
    for (i, &w) in mu.weights().iter().enumerate() {
        out[p.apply(i)] += w;
    }
    Ok(Measure { weights: out })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn line(points: &[f64]) -> FiniteMetricSpace {
        FiniteMetricSpace::from_fn(points.len(), false, |i, j| (points[i] - points[j]).abs())
            .unwrap()
    }

    fn mm(points: &[f64], weights: Vec<f64>) -> MmSpace {
        MmSpace::new(line(points), Measure::new(weights).unwrap()).unwrap()
    }

    #[test]
    fn support_examples() {
        assert_eq!(mm(&[0.0, 1.0], vec![0.5, 0.5]).support(), vec![0, 1]);
        assert_eq!(mm(&[0.0, 1.0], vec![1.0, 0.0]).support(), vec![0]);
        assert_eq!(
            mm(&[0.0, 1.0, 2.0], vec![0.2, 0.0, 0.8]).support(),
            vec![0, 2]
        );
    }

    #[test]
    fn restrict_examples() {
        let m = mm(&[0.0, 1.0, 3.0], vec![0.5, 0.5, 0.0]);
        assert_eq!(m.restrict(&[0, 1, 2]).unwrap(), m);
        let r = m.restrict(&[0, 1]).unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(r.measure().weights(), &[0.5, 0.5]);
        assert_eq!(r.space().dist(0, 1), 1.0);
        assert!(matches!(m.restrict(&[0, 2]), Err(Error::MassNotOne { .. })));
    }

    #[test]
    fn pushforward_examples() {
        let mu = Measure::new(vec![0.3, 0.3, 0.4]).unwrap();
        assert_eq!(pushforward(&mu, &PointMap::identity(3)).unwrap(), mu);
        let c = PointMap::constant(3, 2, 0).unwrap();
        assert_eq!(pushforward(&mu, &c).unwrap().weights(), &[1.0, 0.0]);
        let p = PointMap::new(vec![0, 0, 1], 2).unwrap();
        let out = pushforward(&mu, &p).unwrap();
        assert!((out.weight(0) - 0.6).abs() < 1e-15 && out.weight(1) == 0.4);
        let short = PointMap::identity(2);
        assert!(matches!(
            pushforward(&mu, &short),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn metric_validation() {
        let bad_tri = FiniteMetricSpace::new(
            default_labels(3),
            vec![
                vec![0.0, 1.0, 3.0],
                vec![1.0, 0.0, 1.0],
                vec![3.0, 1.0, 0.0],
            ],
            false,
        );
        assert!(matches!(bad_tri, Err(Error::InvalidMetric(_))));
        let zero = FiniteMetricSpace::new(
            default_labels(2),
            vec![vec![0.0, 0.0], vec![0.0, 0.0]],
            false,
        );
        assert!(zero.is_err());
        let pseudo = FiniteMetricSpace::new(
            default_labels(2),
            vec![vec![0.0, 0.0], vec![0.0, 0.0]],
            true,
        );
        assert!(pseudo.is_ok());
        let asym = FiniteMetricSpace::new(
            default_labels(2),
            vec![vec![0.0, 1.0], vec![2.0, 0.0]],
            false,
        );
        assert!(asym.is_err());
    }

    #[test]
    fn measure_validation() {
        assert!(Measure::new(vec![0.5, 0.6]).is_err());
        assert!(Measure::new(vec![-0.5, 1.5]).is_err());
        assert!(Measure::new(vec![0.5, 0.5 + 1e-13]).is_ok());
        assert_eq!(
            Measure::normalized(vec![1.0, 3.0]).unwrap().weights(),
            &[0.25, 0.75]
        );
    }

    #[test]
    fn balls_and_hausdorff() {
        let x = line(&[0.0, 1.0, 2.5]);
        assert_eq!(x.ball(0, 1.0), vec![0]);
        assert_eq!(x.ball_of_set(&[0, 2], 1.5), vec![0, 1, 2]);
        assert_eq!(x.hausdorff(&[0], &[1, 2]).unwrap(), 2.5);
        assert_eq!(x.diam_of(&[0, 1]), 1.0);
        assert_eq!(x.diam(), 2.5);
    }
}
