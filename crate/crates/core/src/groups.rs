//! Finite groups given by multiplication tables, right-invariant metrics on
//! them, translations of measures, invariance defects and homomorphisms.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::generators::{self, permutation_label, permutations, CycleScale, SymMetric};
use crate::metrics::d_mt;
use crate::space::{check_len, default_labels, FiniteMetricSpace, Measure};

/// Up to this order associativity is checked on every triple.
pub const FULL_ASSOCIATIVITY_MAX: usize = 200;
/// Up to this order right-invariance and homomorphism checks are exhaustive.
pub const FULL_INVARIANCE_MAX: usize = 720;
const SAMPLED_CHECKS: usize = 200_000;
const INVARIANCE_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    labels: Vec<String>,
    n: usize,
    mul: Vec<usize>,
    identity: usize,
    inv: Vec<usize>,
}

impl FiniteGroup {
    /// Validates a Cayley table: closure, Latin-square rows and columns,
    /// identity, inverses and associativity.
    pub fn from_table(labels: Vec<String>, table: Vec<Vec<usize>>) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::InvalidGroup("empty group"));
        }
        check_len(n, labels.len())?;
        let mut mul = Vec::with_capacity(n * n);
        for row in &table {
            check_len(n, row.len())?;
            if let Some(&bad) = row.iter().find(|&&v| v >= n) {
                return Err(Error::BadElement(bad));
            }
            mul.extend_from_slice(row);
        }
        let mut seen = vec![false; n];
        for i in 0..n {
            for axis in 0..2 {
                seen.iter_mut().for_each(|s| *s = false);
                for j in 0..n {
                    let v = if axis == 0 {
                        mul[i * n + j]
                    } else {
                        mul[j * n + i]
                    };
                    if seen[v] {
                        return Err(Error::InvalidGroup("table is not a Latin square"));
                    }
                    seen[v] = true;
                }
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| mul[e * n + x] == x && mul[x * n + e] == x))
            .ok_or(Error::InvalidGroup("no identity element"))?;
        let mut inv = vec![0; n];
        for (x, slot) in inv.iter_mut().enumerate() {
            *slot = (0..n)
                .find(|&y| mul[x * n + y] == identity && mul[y * n + x] == identity)
                .ok_or(Error::InvalidGroup("missing inverse"))?;
        }
        let group = FiniteGroup {
            labels,
            n,
            mul,
            identity,
            inv,
        };
        group.check_associative()?;
        Ok(group)
    }

    fn check_associative(&self) -> Result<()> {
        let n = self.n;
        let ok = |a: usize, b: usize, c: usize| {
            self.mul(self.mul(a, b), c) == self.mul(a, self.mul(b, c))
        };
        if n <= FULL_ASSOCIATIVITY_MAX {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        if !ok(a, b, c) {
                            return Err(Error::InvalidGroup("multiplication is not associative"));
                        }
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0x6173_736f);
            for _ in 0..SAMPLED_CHECKS {
                if !ok(
                    rng.gen_range(0..n),
                    rng.gen_range(0..n),
                    rng.gen_range(0..n),
                ) {
                    return Err(Error::InvalidGroup("multiplication is not associative"));
                }
            }
        }
        Ok(())
    }

    /// `Z_n` under addition.
    pub fn cyclic(n: usize) -> Result<Self> {
        let table = (0..n)
            .map(|a| (0..n).map(|b| (a + b) % n).collect())
            .collect();
        Self::from_table(default_labels(n), table)
    }

    /// `Z_2^n` under coordinatewise addition, elements ordered as in
    /// [`generators::hypercube_space`].
    pub fn hypercube(n: usize) -> Result<Self> {
        let space = generators::hypercube_space(n)?;
        let size = 1usize << n;
        let table = (0..size)
            .map(|a| (0..size).map(|b| a ^ b).collect())
            .collect();
        Self::from_table(space.labels().to_vec(), table)
    }

    /// `Sym(n)` with `(στ)(i) = σ(τ(i))`, elements in lexicographic order.
    pub fn symmetric(n: usize) -> Result<Self> {
        if n == 0 || n > generators::SYM_MAX_N {
            return Err(Error::TooLarge {
                n,
                max: generators::SYM_MAX_N,
            });
        }
        let perms = permutations(n);
        let index = |p: &[usize]| {
            perms
                .binary_search_by(|q| q.as_slice().cmp(p))
                .expect("closed under composition")
        };
        let table = perms
            .iter()
            .map(|s| {
                perms
                    .iter()
                    .map(|t| index(&t.iter().map(|&i| s[i]).collect::<Vec<_>>()))
                    .collect()
            })
            .collect();
        Self::from_table(perms.iter().map(|p| permutation_label(p)).collect(), table)
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.n + b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inv[a]
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    /// Rows of the Cayley table.
    pub fn table(&self) -> Vec<Vec<usize>> {
        self.mul.chunks(self.n).map(<[usize]>::to_vec).collect()
    }

    pub fn check_element(&self, g: usize) -> Result<()> {
        if g < self.n {
            Ok(())
        } else {
            Err(Error::BadElement(g))
        }
    }

    /// True when `h` is closed under multiplication and contains the identity.
    pub fn is_subgroup(&self, h: &[usize]) -> bool {
        let mut member = vec![false; self.n];
        for &x in h {
            if x >= self.n {
                return false;
            }
            member[x] = true;
        }
        member[self.identity] && h.iter().all(|&a| h.iter().all(|&b| member[self.mul(a, b)]))
    }
}

/// A metric on the elements of a group with `d(xg, yg) = d(x, y)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RightInvariantMetric {
    base: FiniteMetricSpace,
}

impl RightInvariantMetric {
    pub fn new(group: &FiniteGroup, base: FiniteMetricSpace) -> Result<Self> {
        check_len(group.order(), base.len())?;
        if !is_right_invariant(group, &base) {
            return Err(Error::NotRightInvariant);
        }
        Ok(RightInvariantMetric { base })
    }

    pub fn base(&self) -> &FiniteMetricSpace {
        &self.base
    }

    pub fn into_base(self) -> FiniteMetricSpace {
        self.base
    }
}

/// Exhaustive up to [`FULL_INVARIANCE_MAX`], sampled beyond.
pub fn is_right_invariant(group: &FiniteGroup, d: &FiniteMetricSpace) -> bool {
    let n = group.order();
    if d.len() != n {
        return false;
    }
    let ok = |x: usize, y: usize, g: usize| {
        (d.dist(group.mul(x, g), group.mul(y, g)) - d.dist(x, y)).abs() <= INVARIANCE_TOL
    };
    if n <= FULL_INVARIANCE_MAX {
        (0..n).all(|g| (0..n).all(|x| (x + 1..n).all(|y| ok(x, y, g))))
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0x7269_6e76);
        (0..SAMPLED_CHECKS).all(|_| {
            ok(
                rng.gen_range(0..n),
                rng.gen_range(0..n),
                rng.gen_range(0..n),
            )
        })
    }
}

/// `Z_n` with geodesic distance.
pub fn cyclic_metric(group: &FiniteGroup, scale: CycleScale) -> Result<RightInvariantMetric> {
    RightInvariantMetric::new(group, generators::cycle_space(group.order(), scale)?)
}

/// `Z_2^n` with normalized Hamming distance.
pub fn hypercube_metric(group: &FiniteGroup) -> Result<RightInvariantMetric> {
    let n = group.order().trailing_zeros() as usize;
    RightInvariantMetric::new(group, generators::hypercube_space(n)?)
}

/// A metric on `Sym(n)`; `n` is read from the group order.
pub fn sym_metric(group: &FiniteGroup, metric: &SymMetric) -> Result<RightInvariantMetric> {
    let n = (1..=generators::SYM_MAX_N)
        .find(|&k| {
            (1..=k).product::<usize>() == group.order() && group.labels()[0].split('-').count() == k
        })
        .ok_or(Error::InvalidGroup("not a symmetric group"))?;
    let space = generators::sym_space(n, metric)?;
    RightInvariantMetric::new(group, space)
}

/// `(λ_g)_* μ`: mass at `x` moves to `g·x`.
pub fn left_translate_measure(mu: &Measure, g: usize, group: &FiniteGroup) -> Result<Measure> {
    translate(mu, g, group, |x| group.mul(g, x))
}

/// `(ρ_g)_* μ`: mass at `x` moves to `x·g`.
pub fn right_translate_measure(mu: &Measure, g: usize, group: &FiniteGroup) -> Result<Measure> {
    translate(mu, g, group, |x| group.mul(x, g))
}

fn translate(
    mu: &Measure,
    g: usize,
    group: &FiniteGroup,
    to: impl Fn(usize) -> usize,
) -> Result<Measure> {
    check_len(group.order(), mu.len())?;
    group.check_element(g)?;
    let mut out = vec![0.0; mu.len()];
    for (x, &w) in mu.weights().iter().enumerate() {
        out[to(x)] = w;
    }
    Ok(Measure::from_raw_unchecked(out))
}

/// `d_MT((λ_g)_* μ, μ)` over the given metric.
pub fn invariance_defect(
    mu: &Measure,
    g: usize,
    group: &FiniteGroup,
    d: &RightInvariantMetric,
) -> Result<f64> {
    let moved = left_translate_measure(mu, g, group)?;
    d_mt(&moved, mu, d.base())
}

/// `max_g` of [`invariance_defect`].
pub fn max_invariance_defect(
    mu: &Measure,
    group: &FiniteGroup,
    d: &RightInvariantMetric,
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for g in 0..group.order() {
        worst = worst.max(invariance_defect(mu, g, group, d)?);
    }
    Ok(worst)
}

/// A verified homomorphism `G → H` given by the image of each element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupHom {
    image: Vec<usize>,
    target_order: usize,
}

impl GroupHom {
    pub fn new(source: &FiniteGroup, target: &FiniteGroup, image: Vec<usize>) -> Result<Self> {
        check_len(source.order(), image.len())?;
        if let Some(&bad) = image.iter().find(|&&h| h >= target.order()) {
            return Err(Error::BadElement(bad));
        }
        let n = source.order();
        let ok = |a: usize, b: usize| image[source.mul(a, b)] == target.mul(image[a], image[b]);
        let valid = if n <= FULL_INVARIANCE_MAX {
            (0..n).all(|a| (0..n).all(|b| ok(a, b)))
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0x686f_6d00);
            (0..SAMPLED_CHECKS).all(|_| ok(rng.gen_range(0..n), rng.gen_range(0..n)))
        };
        if !valid {
            return Err(Error::NotHomomorphism);
        }
        Ok(GroupHom {
            image,
            target_order: target.order(),
        })
    }

    pub fn identity(group: &FiniteGroup) -> Self {
        GroupHom {
            image: (0..group.order()).collect(),
            target_order: group.order(),
        }
    }

    pub fn trivial(source: &FiniteGroup, target: &FiniteGroup) -> Self {
        GroupHom {
            image: vec![target.identity(); source.order()],
            target_order: target.order(),
        }
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn apply(&self, g: usize) -> usize {
        self.image[g]
    }

    pub fn target_order(&self) -> usize {
        self.target_order
    }
}

/// The sign map `Sym(n) → Z_2` (0 for even permutations).
pub fn sign_hom(sym: &FiniteGroup, z2: &FiniteGroup) -> Result<GroupHom> {
    let image = sym
        .labels()
        .iter()
        .map(|l| {
            let p: Vec<usize> = l
                .split('-')
                .map(|s| {
                    s.parse()
                        .map_err(|_| Error::InvalidGroup("not a symmetric group"))
                })
                .collect::<Result<_>>()?;
            let inversions = (0..p.len())
                .flat_map(|i| (i + 1..p.len()).map(move |j| (i, j)))
                .filter(|&(i, j)| p[i] > p[j])
                .count();
            Ok(inversions % 2)
        })
        .collect::<Result<Vec<_>>>()?;
    GroupHom::new(sym, z2, image)
}

/// `φ_* μ`.
pub fn pushforward_hom(mu: &Measure, phi: &GroupHom) -> Result<Measure> {
    check_len(phi.image.len(), mu.len())?;
    let mut out = vec![0.0; phi.target_order];
    for (g, &w) in mu.weights().iter().enumerate() {
        out[phi.image[g]] += w;
    }
    Ok(Measure::from_raw_unchecked(out))
}

/// The metric `d(φ(x), φ(y))` pulled back to the source group; a
/// pseudo-metric unless `φ` is injective.
pub fn pullback_metric(
    phi: &GroupHom,
    source: &FiniteGroup,
    d: &RightInvariantMetric,
) -> Result<RightInvariantMetric> {
    let base = d.base();
    let space = FiniteMetricSpace::from_flat(
        source.labels().to_vec(),
        (0..source.order())
            .flat_map(|x| (0..source.order()).map(move |y| (x, y)))
            .map(|(x, y)| base.dist(phi.apply(x), phi.apply(y)))
            .collect(),
        true,
    )?;
    RightInvariantMetric::new(source, space)
}

/// `⋃_i S_i · S_i⁻¹` with `S_i` the support of `μ_i`, as sorted indices.
pub fn support_product_density(mus: &[Measure], group: &FiniteGroup) -> Result<Vec<usize>> {
    let mut member = vec![false; group.order()];
    for mu in mus {
        check_len(group.order(), mu.len())?;
        let s = mu.support();
        for &a in &s {
            for &b in &s {
                member[group.mul(a, group.inv(b))] = true;
            }
        }
    }
    Ok((0..group.order()).filter(|&g| member[g]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(n: usize) -> FiniteGroup {
        FiniteGroup::cyclic(n).unwrap()
    }

    #[test]
    fn table_validation() {
        assert!(FiniteGroup::from_table(default_labels(2), vec![vec![0, 1], vec![1, 0]]).is_ok());
        assert_eq!(
            FiniteGroup::from_table(default_labels(2), vec![vec![0, 1], vec![1, 1]]),
            Err(Error::InvalidGroup("table is not a Latin square"))
        );
        let s3 = FiniteGroup::symmetric(3).unwrap();
        assert_eq!(s3.order(), 6);
        assert_eq!(s3.identity(), 0);
        assert!(s3.is_subgroup(&[0, 1]));
    }

    #[test]
    fn translation_examples() {
        let g = z(2);
        let mu = Measure::new(vec![1.0, 0.0]).unwrap();
        assert_eq!(
            left_translate_measure(&mu, 1, &g).unwrap().weights(),
            &[0.0, 1.0]
        );
        assert_eq!(left_translate_measure(&mu, 0, &g).unwrap(), mu);
        let g3 = z(3);
        let d0 = Measure::point_mass(3, 0).unwrap();
        assert_eq!(
            right_translate_measure(&d0, 1, &g3).unwrap().weights(),
            &[0.0, 1.0, 0.0]
        );
        assert_eq!(
            left_translate_measure(&mu, 2, &g),
            Err(Error::BadElement(2))
        );
    }

    #[test]
    fn defect_examples() {
        let g = z(2);
        let d = cyclic_metric(&g, CycleScale::UnitEdges).unwrap();
        let delta = Measure::point_mass(2, 0).unwrap();
        assert!((invariance_defect(&delta, 1, &g, &d).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(invariance_defect(&delta, 0, &g, &d).unwrap(), 0.0);
        let s3 = FiniteGroup::symmetric(3).unwrap();
        let ds = sym_metric(&s3, &SymMetric::NormalizedHamming).unwrap();
        let u = Measure::uniform(6).unwrap();
        assert!(max_invariance_defect(&u, &s3, &ds).unwrap() < 1e-12);
    }

    #[test]
    fn metric_invariance() {
        let s3 = FiniteGroup::symmetric(3).unwrap();
        assert!(sym_metric(&s3, &SymMetric::Weighted(vec![0.5, 0.3, 0.2])).is_ok());
        // weighting positions directly is left-invariant, not right-invariant
        let perms = permutations(3);
        let w = [0.5, 0.3, 0.2];
        let left = FiniteMetricSpace::from_fn(6, false, |a, b| {
            (0..3)
                .filter(|&i| perms[a][i] != perms[b][i])
                .map(|i| w[i])
                .sum()
        })
        .unwrap();
        assert_eq!(
            RightInvariantMetric::new(&s3, left),
            Err(Error::NotRightInvariant)
        );
        let h = FiniteGroup::hypercube(3).unwrap();
        assert!(hypercube_metric(&h).is_ok());
    }

    #[test]
    fn hom_examples() {
        let s3 = FiniteGroup::symmetric(3).unwrap();
        let z2 = z(2);
        let sign = sign_hom(&s3, &z2).unwrap();
        let pushed = pushforward_hom(&Measure::uniform(6).unwrap(), &sign).unwrap();
        assert!(pushed.weights().iter().all(|&w| (w - 0.5).abs() < 1e-15));
        let triv = GroupHom::trivial(&s3, &z2);
        let pushed = pushforward_hom(&Measure::uniform(6).unwrap(), &triv).unwrap();
        assert!((pushed.weight(0) - 1.0).abs() < 1e-15 && pushed.weight(1) == 0.0);
        assert_eq!(
            GroupHom::new(&z2, &s3, vec![0, 3]),
            Err(Error::NotHomomorphism)
        );
    }

    #[test]
    fn density_examples() {
        let g = z(4);
        let mu = Measure::new(vec![0.5, 0.5, 0.0, 0.0]).unwrap();
        assert_eq!(support_product_density(&[mu], &g).unwrap(), vec![0, 1, 3]);
        assert_eq!(
            support_product_density(&[Measure::point_mass(4, 0).unwrap()], &g).unwrap(),
            vec![0]
        );
        assert_eq!(
            support_product_density(&[Measure::uniform(4).unwrap()], &g).unwrap(),
            vec![0, 1, 2, 3]
        );
    }
}
