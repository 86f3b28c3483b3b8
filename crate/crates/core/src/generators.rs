//! Standard spaces and measures: Hamming cubes, cycles, symmetric groups,
//! uniform, point-mass and product measures.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::space::{default_labels, FiniteMetricSpace, Measure};

/// Largest cube dimension; the dense matrix of `{0,1}^12` has 16M entries.
pub const HYPERCUBE_MAX_DIM: usize = 12;
/// Largest `n` for which `Sym(n)` is built with dense tables.
pub const SYM_MAX_N: usize = 7;

/// `{0,1}^n` with normalized Hamming distance. Point `i` has coordinate
/// `k` equal to bit `k` of `i`; labels list coordinates left to right.
pub fn hypercube_space(n: usize) -> Result<FiniteMetricSpace> {
    if n == 0 {
        return Err(Error::InvalidArgument("cube dimension must be positive"));
    }
    if n > HYPERCUBE_MAX_DIM {
        return Err(Error::TooLarge {
            n,
            max: HYPERCUBE_MAX_DIM,
        });
    }
    let labels = (0..1usize << n)
        .map(|i| {
            (0..n)
                .map(|k| if i >> k & 1 == 1 { '1' } else { '0' })
                .collect()
        })
        .collect();
    let scale = n as f64;
    FiniteMetricSpace::from_fn_trusted(labels, false, |i, j| (i ^ j).count_ones() as f64 / scale)
}

/// How distances on the cycle `Z_n` are scaled.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CycleScale {
    /// Adjacent points at distance 1.
    UnitEdges,
    /// Geodesic distance divided by `⌊n/2⌋`, so the diameter is 1.
    UnitDiameter,
}

/// `Z_n` with the geodesic (ring) distance.
pub fn cycle_space(n: usize, scale: CycleScale) -> Result<FiniteMetricSpace> {
    if n == 0 {
        return Err(Error::InvalidArgument("cycle length must be positive"));
    }
    let div = match scale {
        CycleScale::UnitEdges => 1.0,
        CycleScale::UnitDiameter => (n / 2).max(1) as f64,
    };
    FiniteMetricSpace::from_fn_trusted(default_labels(n), false, |i, j| {
        let k = i.abs_diff(j);
        k.min(n - k) as f64 / div
    })
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    loop {
        out.push(p.clone());
        let mut i = n;
        while i > 1 && p[i - 2] >= p[i - 1] {
            i -= 1;
        }
        if i <= 1 {
            return out;
        }
        let mut j = n - 1;
        while p[j] <= p[i - 2] {
            j -= 1;
        }
        p.swap(i - 2, j);
        p[i - 1..].reverse();
    }
}

/// One-line notation, e.g. `"1-0-2"` for the transposition of 0 and 1.
pub fn permutation_label(p: &[usize]) -> String {
    let parts: Vec<String> = p.iter().map(|v| format!("{v}")).collect();
    parts.join("-")
}

/// Metrics on `Sym(n)`.
#[derive(Clone, Debug, PartialEq)]
pub enum SymMetric {
    /// `|{i : σ(i) ≠ τ(i)}| / n`, bi-invariant.
    NormalizedHamming,
    /// `Σ_i w_i [σ⁻¹(i) ≠ τ⁻¹(i)]`: positions are weighted through the
    /// inverse so that the metric is right-invariant under composition.
    Weighted(Vec<f64>),
}

/// `Sym(n)` as a metric space over its elements in lexicographic order.
pub fn sym_space(n: usize, metric: &SymMetric) -> Result<FiniteMetricSpace> {
    if n == 0 {
        return Err(Error::InvalidArgument("Sym(n) needs n >= 1"));
    }
    if n > SYM_MAX_N {
        return Err(Error::TooLarge { n, max: SYM_MAX_N });
    }
    let perms = permutations(n);
    let labels = perms.iter().map(|p| permutation_label(p)).collect();
    match metric {
        SymMetric::NormalizedHamming => {
            let scale = n as f64;
            FiniteMetricSpace::from_fn_trusted(labels, false, |a, b| {
                perms[a]
                    .iter()
                    .zip(&perms[b])
                    .filter(|(x, y)| x != y)
                    .count() as f64
                    / scale
            })
        }
        SymMetric::Weighted(w) => {
            if w.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: w.len(),
                });
            }
            if w.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
                return Err(Error::InvalidArgument(
                    "weights must be finite and positive",
                ));
            }
            let inverses: Vec<Vec<usize>> = perms.iter().map(|p| invert(p)).collect();
            FiniteMetricSpace::from_fn_trusted(labels, false, |a, b| {
                (0..n)
                    .filter(|&i| inverses[a][i] != inverses[b][i])
                    .map(|i| w[i])
                    .sum()
            })
        }
    }
}

pub(crate) fn invert(p: &[usize]) -> Vec<usize> {
    let mut inv = alloc::vec![0; p.len()];
    for (i, &v) in p.iter().enumerate() {
        inv[v] = i;
    }
    inv
}

/// Product of measures on a product of finite sets. The index of a tuple
/// is mixed-radix with the first factor least significant, matching the
/// point order of [`hypercube_space`] for two-point factors.
pub fn product_measure(factors: &[Measure]) -> Result<Measure> {
    if factors.is_empty() {
        return Err(Error::InvalidArgument("product of no measures"));
    }
    let mut weights: Vec<f64> = alloc::vec![1.0];
    let mut stride = 1usize;
    for f in factors {
        let len = f.len();
        let mut next = alloc::vec![0.0; weights.len() * len];
        for (idx, slot) in next.iter_mut().enumerate() {
            *slot = weights[idx % stride] * f.weight(idx / stride);
        }
        stride *= len;
        weights = next;
    }
    Measure::normalized(weights)
}

/// Product of Bernoulli(`p_k`) coordinates on `{0,1}^n`.
pub fn bernoulli_product(ps: &[f64]) -> Result<Measure> {
    let factors = ps
        .iter()
        .map(|&p| {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidMeasure("Bernoulli parameter outside [0, 1]"));
            }
            Measure::new(alloc::vec![1.0 - p, p])
        })
        .collect::<Result<Vec<_>>>()?;
    product_measure(&factors)
}
