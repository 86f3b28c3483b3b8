//! Lipschitz functions on finite spaces: constants, inf-convolution,
//! truncation, extension from a subset, and the sup-norm projection onto
//! the ℓ-Lipschitz cone.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::space::{check_len, FiniteMetricSpace};

/// Slack used when certifying a Lipschitz bound numerically.
pub const LIP_TOL: f64 = 1e-9;

/// A real-valued function on the points of a finite space.
#[derive(Clone, Debug, PartialEq)]
pub struct RealFunction {
    values: Vec<f64>,
}

impl RealFunction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(RealFunction { values })
    }

    pub fn constant(n: usize, c: f64) -> Self {
        RealFunction { values: vec![c; n] }
    }

    pub fn zeros(n: usize) -> Self {
        Self::constant(n, 0.0)
    }

    pub(crate) fn from_finite(values: Vec<f64>) -> Self {
        debug_assert!(values.iter().all(|v| v.is_finite()));
        RealFunction { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn at(&self, i: usize) -> f64 {
        self.values[i]
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn sup_distance(&self, other: &RealFunction) -> Result<f64> {
        check_len(self.len(), other.len())?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }

    pub fn shifted(&self, c: f64) -> RealFunction {
        RealFunction {
            values: self.values.iter().map(|v| v + c).collect(),
        }
    }

    pub fn negated(&self) -> RealFunction {
        RealFunction {
            values: self.values.iter().map(|v| -v).collect(),
        }
    }

    /// `f ∘ p` for a map given by its image vector.
    pub fn compose(&self, image: &[usize]) -> RealFunction {
        RealFunction {
            values: image.iter().map(|&j| self.values[j]).collect(),
        }
    }
}

/// Smallest ℓ with `|f(x) - f(y)| <= ℓ d(x, y)`.
///
/// Returns `f64::INFINITY` when two points at pseudo-distance zero carry
/// different values.
pub fn lip_constant(f: &RealFunction, x: &FiniteMetricSpace) -> Result<f64> {
    check_len(x.len(), f.len())?;
    let n = x.len();
    let mut best: f64 = 0.0;
    for i in 0..n {
        let row = x.row(i);
        for j in (i + 1)..n {
            let gap = (f.values[i] - f.values[j]).abs();
            if gap == 0.0 {
                continue;
            }
            if row[j] == 0.0 {
                return Ok(f64::INFINITY);
            }
            best = best.max(gap / row[j]);
        }
    }
    Ok(best)
}

pub fn is_lipschitz(f: &RealFunction, x: &FiniteMetricSpace, ell: f64) -> Result<bool> {
    check_len(x.len(), f.len())?;
    let n = x.len();
    for i in 0..n {
        let row = x.row(i);
        for j in (i + 1)..n {
            if (f.values[i] - f.values[j]).abs() > ell * row[j] + LIP_TOL {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `f_k(x) = min_y f(y) + k d(x, y)`: the largest k-Lipschitz minorant of `f`.
pub fn inf_convolution(f: &RealFunction, x: &FiniteMetricSpace, k: f64) -> Result<RealFunction> {
    check_len(x.len(), f.len())?;
    if !(k >= 0.0) || !k.is_finite() {
        return Err(Error::InvalidArgument("k must be a non-negative real"));
    }
    Ok(RealFunction::from_finite(lower_envelope(&f.values, x, k)))
}

fn lower_envelope(values: &[f64], x: &FiniteMetricSpace, k: f64) -> Vec<f64> {
    (0..x.len())
        .map(|i| {
            x.row(i)
                .iter()
                .zip(values)
                .map(|(d, v)| v + k * d)
                .fold(f64::INFINITY, f64::min)
        })
        .collect()
}

fn upper_envelope(values: &[f64], x: &FiniteMetricSpace, k: f64) -> Vec<f64> {
    (0..x.len())
        .map(|i| {
            x.row(i)
                .iter()
                .zip(values)
                .map(|(d, v)| v - k * d)
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect()
}

/// Output of [`lemma35_approximate`].
///
/// The family is first translated by `shift` so that every member is
/// non-negative; `approximants[i]` approximates `family[i] + shift`.
#[derive(Clone, Debug, PartialEq)]
pub struct LipschitzApproximation {
    pub shift: f64,
    /// Largest sup-norm in the translated family.
    pub sup_bound: f64,
    pub k: f64,
    pub ell: f64,
    pub approximants: Vec<RealFunction>,
}

impl LipschitzApproximation {
    /// Approximant of the untranslated `family[i]`.
    pub fn in_original_frame(&self, i: usize) -> RealFunction {
        self.approximants[i].shifted(-self.shift)
    }
}

/// Uniform Lipschitz approximation of a bounded equicontinuous family.
///
/// `delta` must witness equicontinuity: `|f(x) - f(y)| <= eps` whenever
/// `d(x, y) < delta`. With `s` the largest sup-norm of the non-negative
/// translate of the family, every member is replaced by its inf-convolution
/// at slope `k = (s + eps) / delta`, which lies in `Lip_ℓ^ℓ` for
/// `ℓ = max(k, s + 1)` and within `eps` of the original in sup-norm.
pub fn lemma35_approximate(
    family: &[RealFunction],
    x: &FiniteMetricSpace,
    eps: f64,
    delta: f64,
) -> Result<LipschitzApproximation> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidArgument("eps must lie in (0, 1]"));
    }
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::BadWitness);
    }
    for f in family {
        check_len(x.len(), f.len())?;
    }
    let n = x.len();
    for f in family {
        for i in 0..n {
            for j in (i + 1)..n {
                if x.dist(i, j) < delta && (f.at(i) - f.at(j)).abs() > eps {
                    return Err(Error::BadWitness);
                }
            }
        }
    }
    let low = family
        .iter()
        .map(RealFunction::min)
        .fold(f64::INFINITY, f64::min);
    let shift = if low < 0.0 { -low } else { 0.0 };
    let shifted: Vec<RealFunction> = family.iter().map(|f| f.shifted(shift)).collect();
    let sup_bound = shifted
        .iter()
        .map(RealFunction::sup_norm)
        .fold(0.0, f64::max);
    let k = (sup_bound + eps) / delta;
    let ell = k.max(sup_bound + 1.0);
    let mut approximants = Vec::with_capacity(shifted.len());
    for f in &shifted {
        let fk = inf_convolution(f, x, k)?;
        if f.sup_distance(&fk)? > eps + LIP_TOL
            || !is_lipschitz(&fk, x, ell)?
            || fk.sup_norm() > ell + LIP_TOL
        {
            return Err(Error::SolverFailure(
                "Lipschitz approximation postcondition failed",
            ));
        }
        approximants.push(fk);
    }
    Ok(LipschitzApproximation {
        shift,
        sup_bound,
        k,
        ell,
        approximants,
    })
}

/// `(f ∧ c) ∨ (-c)`.
pub fn truncate(f: &RealFunction, c: f64) -> Result<RealFunction> {
    if !(c >= 0.0) || !c.is_finite() {
        return Err(Error::InvalidArgument(
            "truncation level must be non-negative",
        ));
    }
    Ok(RealFunction::from_finite(
        f.values.iter().map(|v| v.min(c).max(-c)).collect(),
    ))
}

/// Extends a k-Lipschitz function bounded by `c` on `subset` to the whole
/// space: `f*(g) = ((min_s f(s) + k d(g, s)) ∧ c) ∨ (-c)`.
///
/// `f_on_subset[i]` is the value at `subset[i]`. The result agrees with the
/// input on the subset.
pub fn extend(
    f_on_subset: &RealFunction,
    subset: &[usize],
    x: &FiniteMetricSpace,
    k: f64,
    c: f64,
) -> Result<RealFunction> {
    check_len(subset.len(), f_on_subset.len())?;
    if subset.is_empty() {
        return Err(Error::EmptySet);
    }
    if !(k >= 0.0) || !(c >= 0.0) {
        return Err(Error::InvalidArgument("k and c must be non-negative"));
    }
    for &s in subset {
        if s >= x.len() {
            return Err(Error::IndexOutOfRange {
                index: s,
                len: x.len(),
            });
        }
    }
    if f_on_subset.sup_norm() > c {
        return Err(Error::BoundExceeded);
    }
    for (a, &s) in subset.iter().enumerate() {
        for (b, &t) in subset.iter().enumerate().skip(a + 1) {
            let gap = (f_on_subset.at(a) - f_on_subset.at(b)).abs();
            if gap > k * x.dist(s, t) + LIP_TOL || (s == t && gap != 0.0) {
                return Err(Error::NotLipschitzOnSubset);
            }
        }
    }
    let mut out: Vec<f64> = (0..x.len())
        .map(|g| {
            subset
                .iter()
                .enumerate()
                .map(|(a, &s)| f_on_subset.at(a) + k * x.dist(g, s))
                .fold(f64::INFINITY, f64::min)
                .min(c)
                .max(-c)
        })
        .collect();
    for (a, &s) in subset.iter().enumerate() {
        out[s] = f_on_subset.at(a);
    }
    Ok(RealFunction::from_finite(out))
}

/// Nearest ℓ-Lipschitz function in sup-norm: the midpoint of the lower and
/// upper McShane envelopes of `f`.
pub fn mcshane_nearest(f: &RealFunction, x: &FiniteMetricSpace, ell: f64) -> Result<RealFunction> {
    check_len(x.len(), f.len())?;
    if !(ell >= 0.0) || !ell.is_finite() {
        return Err(Error::InvalidArgument(
            "Lipschitz bound must be non-negative",
        ));
    }
    let upper = lower_envelope(&f.values, x, ell);
    let lower = upper_envelope(&f.values, x, ell);
    Ok(RealFunction::from_finite(
        upper
            .iter()
            .zip(&lower)
            .map(|(u, l)| 0.5 * (u + l))
            .collect(),
    ))
}

/// `inf { ‖f - g‖_∞ : g ∈ Lip_ℓ }`, computed from the pairwise excess
/// `max_{x,y} (f(x) - f(y) - ℓ d(x, y)) / 2`.
pub fn distance_to_lip(f: &RealFunction, x: &FiniteMetricSpace, ell: f64) -> Result<f64> {
    check_len(x.len(), f.len())?;
    let n = x.len();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            worst = worst.max(0.5 * (f.at(i) - f.at(j) - ell * x.dist(i, j)));
        }
    }
    Ok(worst)
}

/// `x ↦ min_{a ∈ set} d(x, a)`.
pub fn set_distance(x: &FiniteMetricSpace, set: &[usize]) -> RealFunction {
    RealFunction::from_finite(
        (0..x.len())
            .map(|i| {
                set.iter()
                    .map(|&a| x.dist(i, a))
                    .fold(f64::INFINITY, f64::min)
            })
            .collect(),
    )
}

/// Deterministic family of 1-Lipschitz functions used as witnesses for
/// observable-diameter lower bounds.
///
/// Always starts with the `n` distance functions `d(x0, ·)`; the rest of the
/// budget is split between set-distance functions, half-differences of two
/// set-distance functions, and McShane projections of random vectors.
/// Duplicates are removed, so the result may be shorter than `budget`.
pub fn lip1_candidates(x: &FiniteMetricSpace, budget: usize, seed: u64) -> Vec<RealFunction> {
    let n = x.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<RealFunction> = Vec::with_capacity(budget.max(n));
    for i in 0..n {
        out.push(RealFunction::from_finite(x.row(i).to_vec()));
    }
    if n <= 1 {
        out.truncate(1);
        return out;
    }
    let extra = budget.saturating_sub(n);
    let set_share = extra / 3;
    let diff_share = extra / 3;

    let subsets = candidate_subsets(n, set_share.max(diff_share), &mut rng);
    for set in subsets.iter().take(set_share) {
        out.push(set_distance(x, set));
    }
    let mut diffs = 0;
    'pairs: for (a, sa) in subsets.iter().enumerate() {
        for sb in subsets.iter().skip(a + 1) {
            if diffs >= diff_share {
                break 'pairs;
            }
            if sa.iter().any(|i| sb.contains(i)) {
                continue;
            }
            let fa = set_distance(x, sa);
            let fb = set_distance(x, sb);
            out.push(RealFunction::from_finite(
                fa.values
                    .iter()
                    .zip(&fb.values)
                    .map(|(p, q)| 0.5 * (p - q))
                    .collect(),
            ));
            diffs += 1;
        }
    }
    let scale = x.diam().max(f64::MIN_POSITIVE);
    while out.len() < budget.max(n) {
        let raw: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() * 2.0 * scale).collect();
        let g = mcshane_nearest(&RealFunction::from_finite(raw), x, 1.0)
            .expect("lengths agree by construction");
        out.push(g);
    }
    out.retain(|f| is_lipschitz(f, x, 1.0).unwrap_or(false));
    dedup_functions(&mut out);
    out
}

/// Subsets with at least one point. Enumerated exhaustively (singletons
/// last) for small spaces, sampled otherwise.
fn candidate_subsets(n: usize, want: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
    let mut sets = Vec::new();
    if n <= 12 {
        let full = (1usize << n) - 1;
        for mask in 1..full {
            if mask.count_ones() >= 2 {
                sets.push((0..n).filter(|i| mask >> i & 1 == 1).collect());
            }
        }
        for i in 0..n {
            sets.push(vec![i]);
        }
        if sets.len() > want.max(n) {
            // keep singletons available for the difference functions
            let keep = want.max(n);
            let singletons = sets.split_off(sets.len() - n);
            sets.truncate(keep.saturating_sub(n));
            sets.extend(singletons);
        }
    } else {
        for _ in 0..want {
            let size = rng.gen_range(1..n);
            let mut set: Vec<usize> = (0..n).collect();
            for i in 0..size {
                let j = rng.gen_range(i..n);
                set.swap(i, j);
            }
            set.truncate(size);
            set.sort_unstable();
            sets.push(set);
        }
    }
    sets
}

fn dedup_functions(fs: &mut Vec<RealFunction>) {
    let mut kept: Vec<RealFunction> = Vec::with_capacity(fs.len());
    for f in fs.drain(..) {
        if !kept.iter().any(|g| {
            g.values
                .iter()
                .zip(&f.values)
                .all(|(a, b)| a.to_bits() == b.to_bits())
        }) {
            kept.push(f);
        }
    }
    *fs = kept;
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_point(d: f64) -> FiniteMetricSpace {
        FiniteMetricSpace::from_fn(2, false, |_, _| d).unwrap()
    }

    fn rf(v: &[f64]) -> RealFunction {
        RealFunction::new(v.to_vec()).unwrap()
    }

    #[test]
    fn lip_constant_examples() {
        let x = two_point(2.0);
        assert_eq!(lip_constant(&rf(&[3.0, 3.0]), &x).unwrap(), 0.0);
        assert_eq!(lip_constant(&rf(&[0.0, 1.0]), &x).unwrap(), 0.5);
        let p = FiniteMetricSpace::from_fn(2, true, |_, _| 0.0).unwrap();
        assert_eq!(lip_constant(&rf(&[0.0, 1.0]), &p).unwrap(), f64::INFINITY);
        assert!(lip_constant(&rf(&[0.0]), &x).is_err());
    }

    #[test]
    fn inf_convolution_examples() {
        let x = two_point(1.0);
        let f = rf(&[0.0, 0.5]);
        assert_eq!(inf_convolution(&f, &x, 1.0).unwrap(), f);
        assert_eq!(
            inf_convolution(&rf(&[0.0, 2.0]), &x, 1.0).unwrap().values(),
            &[0.0, 1.0]
        );
        assert_eq!(
            inf_convolution(&rf(&[3.0, 2.0]), &x, 0.0).unwrap().values(),
            &[2.0, 2.0]
        );
        assert!(inf_convolution(&f, &x, -1.0).is_err());
    }

    #[test]
    fn truncate_examples() {
        let f = rf(&[-3.0, 0.5, 4.0]);
        assert_eq!(truncate(&f, 1.0).unwrap().values(), &[-1.0, 0.5, 1.0]);
        assert_eq!(truncate(&f, 5.0).unwrap(), f);
        assert_eq!(truncate(&f, 0.0).unwrap().values(), &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn extend_examples() {
        let x = FiniteMetricSpace::from_fn(3, false, |i, j| (i as f64 - j as f64).abs()).unwrap();
        let f = rf(&[0.0, 1.0, 1.5]);
        assert_eq!(extend(&f, &[0, 1, 2], &x, 1.0, 2.0).unwrap(), f);
        // one-point subset: clamped distance function
        let g = extend(&rf(&[0.0]), &[0], &x, 1.0, 2.0).unwrap();
        assert_eq!(g.values(), &[0.0, 1.0, 2.0]);
        let g = extend(&rf(&[0.0]), &[0], &x, 1.0, 1.5).unwrap();
        assert_eq!(g.values(), &[0.0, 1.0, 1.5]);
        assert_eq!(
            extend(&rf(&[0.0, 3.0]), &[0, 1], &x, 1.0, 5.0),
            Err(Error::NotLipschitzOnSubset)
        );
        assert_eq!(
            extend(&rf(&[0.0, 3.0]), &[0, 2], &x, 2.0, 1.0),
            Err(Error::BoundExceeded)
        );
    }

    #[test]
    fn mcshane_examples() {
        let x = two_point(1.0);
        let f = rf(&[0.0, 0.5]);
        assert_eq!(mcshane_nearest(&f, &x, 1.0).unwrap(), f);
        let g = mcshane_nearest(&rf(&[0.0, 2.0]), &x, 1.0).unwrap();
        assert_eq!(g.values(), &[0.5, 1.5]);
        assert_eq!(distance_to_lip(&rf(&[0.0, 2.0]), &x, 1.0).unwrap(), 0.5);
        let h = mcshane_nearest(&rf(&[1.0, 4.0]), &x, 0.0).unwrap();
        assert_eq!(h.values(), &[2.5, 2.5]);
    }

    #[test]
    fn lemma35_examples() {
        let x = FiniteMetricSpace::from_fn(4, false, |i, j| (i as f64 - j as f64).abs()).unwrap();
        let c = lemma35_approximate(&[RealFunction::constant(4, 0.7)], &x, 0.5, 0.5).unwrap();
        assert_eq!(c.approximants[0], RealFunction::constant(4, 0.7));
        let f = rf(&[0.0, 1.0, 0.0, 1.0]);
        let out = lemma35_approximate(core::slice::from_ref(&f), &x, 0.5, 0.5).unwrap();
        assert!(f.sup_distance(&out.approximants[0]).unwrap() <= 0.5);
        assert!(lip_constant(&out.approximants[0], &x).unwrap() <= out.ell + LIP_TOL);
        assert_eq!(out.ell, (1.0f64 + 0.5) / 0.5);
        // d(i, i+1) = 1 < 2 but the jump is 1 > 0.5
        assert_eq!(
            lemma35_approximate(&[f], &x, 0.5, 2.0),
            Err(Error::BadWitness)
        );
    }

    #[test]
    fn candidate_examples() {
        let single = FiniteMetricSpace::from_fn(1, false, |_, _| 0.0).unwrap();
        assert_eq!(
            lip1_candidates(&single, 10, 1),
            vec![RealFunction::zeros(1)]
        );
        let x = two_point(0.7);
        let c = lip1_candidates(&x, 2, 3);
        assert!(c.contains(&rf(&[0.0, 0.7])) && c.contains(&rf(&[0.7, 0.0])));
        let y =
            FiniteMetricSpace::from_fn(6, false, |i, j| 1.0 + ((i + j) % 3) as f64 * 0.25).unwrap();
        assert_eq!(lip1_candidates(&y, 40, 9), lip1_candidates(&y, 40, 9));
        for f in lip1_candidates(&y, 40, 9) {
            assert!(lip_constant(&f, &y).unwrap() <= 1.0 + LIP_TOL);
        }
    }
}
