//! Probability metrics on a fixed finite space: the mass transportation
//! (bounded-Lipschitz) distance, the Prokhorov distance and the Ky Fan
//! pseudo-metric `me_μ`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::flow::{transport, FlowNetwork};
use crate::lipschitz::{is_lipschitz, truncate, RealFunction, LIP_TOL};
use crate::lp::LinearProgram;
use crate::space::{check_len, FiniteMetricSpace, Measure};

/// Tolerance for certifying primal/dual agreement of the transport solver.
pub const MT_CERT_TOL: f64 = 1e-9;
/// Largest space accepted by the dense simplex route for `d_MT`.
pub const MT_LP_MAX: usize = 64;
/// Largest space accepted by the subset-enumeration Prokhorov oracle.
pub const PROKHOROV_ORACLE_MAX: usize = 20;
const CROSSING_TOL: f64 = 1e-12;

/// `d_MT` together with an optimal test function in `Lip_1^1`.
#[derive(Clone, Debug, PartialEq)]
pub struct MtResult {
    pub value: f64,
    pub witness: RealFunction,
}

fn check_pair(mu: &Measure, nu: &Measure, x: &FiniteMetricSpace) -> Result<()> {
    check_len(x.len(), mu.len())?;
    check_len(x.len(), nu.len())
}

/// `sup { |∫f dμ - ∫f dν| : f ∈ Lip_1^1(X, d) }`.
pub fn d_mt(mu: &Measure, nu: &Measure, x: &FiniteMetricSpace) -> Result<f64> {
    Ok(d_mt_with_witness(mu, nu, x)?.value)
}

/// Solves the `Lip_1^1` program through its dual.
///
/// Functions with `|f| <= 1` and `Lip(f) <= 1` are, up to an additive
/// constant (which the signed measure `μ - ν` ignores), exactly the
/// 1-Lipschitz functions for the truncated metric `min(d, 2)`. The program
/// is therefore the transportation problem with that cost; the optimal
/// potentials are extended to the whole space, centred into `[-1, 1]`, and
/// checked against the primal cost before the value is returned.
pub fn d_mt_with_witness(mu: &Measure, nu: &Measure, x: &FiniteMetricSpace) -> Result<MtResult> {
    check_pair(mu, nu, x)?;
    let n = x.len();
    let signed: Vec<f64> = mu
        .weights()
        .iter()
        .zip(nu.weights())
        .map(|(a, b)| a - b)
        .collect();
    let sources: Vec<usize> = (0..n).filter(|&i| signed[i] > 0.0).collect();
    let sinks: Vec<usize> = (0..n).filter(|&i| signed[i] < 0.0).collect();
    if sources.is_empty() || sinks.is_empty() {
        return Ok(MtResult {
            value: 0.0,
            witness: RealFunction::zeros(n),
        });
    }
    let cost = |i: usize, j: usize| x.dist(sources[i], sinks[j]).min(2.0);
    let supply: Vec<f64> = sources.iter().map(|&i| signed[i]).collect();
    let demand: Vec<f64> = sinks.iter().map(|&j| -signed[j]).collect();
    let sol = transport(&supply, &demand, cost)?;

    // f(y) = min_j v_j + c(y, s_j) keeps the tight source values and only
    // lowers sink values, so the dual objective cannot decrease.
    let raw: Vec<f64> = (0..n)
        .map(|y| {
            sinks
                .iter()
                .zip(&sol.sink_potential)
                .map(|(&s, v)| v + x.dist(y, s).min(2.0))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    let lo = raw.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mid = 0.5 * (lo + hi);
    let witness = truncate(
        &RealFunction::new(raw.iter().map(|v| v - mid).collect())?,
        1.0,
    )?;
    let dual: f64 = witness
        .values()
        .iter()
        .zip(&signed)
        .map(|(f, w)| f * w)
        .sum();
    if !is_lipschitz(&witness, x, 1.0)? {
        return Err(Error::SolverFailure("transport dual is not 1-Lipschitz"));
    }
    if (dual - sol.cost).abs() > MT_CERT_TOL {
        return Err(Error::SolverFailure(
            "transport primal and dual values disagree",
        ));
    }
    Ok(MtResult {
        value: sol.cost.max(dual).max(0.0),
        witness,
    })
}

/// `d_MT` by the dense simplex on the test-function formulation
/// (`f = u - 1`, `0 <= u <= 2`, `u_i - u_j <= d_ij`). Independent of the
/// transport route; limited to small spaces.
pub fn d_mt_lp(mu: &Measure, nu: &Measure, x: &FiniteMetricSpace) -> Result<f64> {
    check_pair(mu, nu, x)?;
    let n = x.len();
    if n > MT_LP_MAX {
        return Err(Error::TooLarge { n, max: MT_LP_MAX });
    }
    let signed: Vec<f64> = mu
        .weights()
        .iter()
        .zip(nu.weights())
        .map(|(a, b)| a - b)
        .collect();
    let mut lp = LinearProgram::new(signed.clone());
    for i in 0..n {
        lp.add_le_sparse(&[(i, 1.0)], 2.0)?;
        for j in 0..n {
            if i != j {
                lp.add_le_sparse(&[(i, 1.0), (j, -1.0)], x.dist(i, j))?;
            }
        }
    }
    let sol = lp.maximize()?;
    // objective Σ w (u - 1) = Σ w u - Σ w
    let offset: f64 = signed.iter().sum();
    Ok((sol.value - offset).max(0.0))
}

/// `inf { ε > 0 : a(ε) <= ε }` for a non-increasing step function `a` that
/// is constant on each interval between consecutive breakpoints.
///
/// `steps[k] = (start_k, value_k)` with strictly increasing `start_k`,
/// `start_0 = 0`, and `a = value_k` between `start_k` and `start_{k+1}`.
/// Whether the intervals are open on the left or right does not change the
/// infimum.
pub(crate) fn first_crossing(steps: &[(f64, f64)]) -> f64 {
    for (k, &(start, value)) in steps.iter().enumerate() {
        let end = steps.get(k + 1).map_or(f64::INFINITY, |s| s.0);
        if value <= end + CROSSING_TOL {
            return start.max(value);
        }
    }
    steps.last().map_or(0.0, |s| s.0)
}

/// Distinct pairwise distances in increasing order, always starting at 0.
fn distance_levels(x: &FiniteMetricSpace) -> Vec<f64> {
    let mut levels: Vec<f64> = x.matrix().to_vec();
    levels.push(0.0);
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    levels
}

/// Largest `μ(B) - ν(B_d(B, ε))` over all sets `B`, for `ε` just above
/// `level` (so that the open ball contains every pair with `d <= level`).
/// Computed as `1 - maxflow` on the bipartite graph of close pairs.
fn prokhorov_excess(mu: &Measure, nu: &Measure, x: &FiniteMetricSpace, level: f64) -> f64 {
    let n = x.len();
    let (s, t) = (2 * n, 2 * n + 1);
    let mut net = FlowNetwork::new(2 * n + 2);
    for i in 0..n {
        if mu.weight(i) > 0.0 {
            net.add_edge(s, i, mu.weight(i));
        }
        if nu.weight(i) > 0.0 {
            net.add_edge(n + i, t, nu.weight(i));
        }
    }
    for i in (0..n).filter(|&i| mu.weight(i) > 0.0) {
        for j in (0..n).filter(|&j| nu.weight(j) > 0.0) {
            if x.dist(i, j) <= level {
                net.add_edge(i, n + j, 2.0);
            }
        }
    }
    let excess = 1.0 - net.max_flow(s, t);
    // flow sums carry rounding of order n ulp
    if excess <= CROSSING_TOL {
        0.0
    } else {
        excess
    }
}

/// `inf { ε > 0 : μ(B) <= ν(B_d(B, ε)) + ε for all B }`.
///
/// The worst-set excess is constant between consecutive distances, so the
/// infimum is found exactly by binary search over the distance levels with
/// one max-flow feasibility test (Strassen) per probe.
pub fn d_prokhorov(mu: &Measure, nu: &Measure, x: &FiniteMetricSpace) -> Result<f64> {
    check_pair(mu, nu, x)?;
    let levels = distance_levels(x);
    let holds = |k: usize| {
        let end = levels.get(k + 1).copied().unwrap_or(f64::INFINITY);
        prokhorov_excess(mu, nu, x, levels[k]) <= end + CROSSING_TOL
    };
    // the last level has excess 0, so it always holds
    let (mut lo, mut hi) = (0usize, levels.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if holds(mid) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(levels[lo].max(prokhorov_excess(mu, nu, x, levels[lo])))
}

/// Both set-enumeration forms of the Prokhorov distance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProkhorovOracle {
    /// From `μ(B) <= ν(B_d(B, ε)) + ε`.
    pub forward: f64,
    /// From `ν(B) <= μ(B_d(B, ε)) + ε`.
    pub backward: f64,
}

/// Literal evaluation of both infima over all `2^n` sets.
pub fn d_prokhorov_oracle_both(
    mu: &Measure,
    nu: &Measure,
    x: &FiniteMetricSpace,
) -> Result<ProkhorovOracle> {
    check_pair(mu, nu, x)?;
    let n = x.len();
    if n > PROKHOROV_ORACLE_MAX {
        return Err(Error::TooLarge {
            n,
            max: PROKHOROV_ORACLE_MAX,
        });
    }
    Ok(ProkhorovOracle {
        forward: enumerate_prokhorov(mu, nu, x),
        backward: enumerate_prokhorov(nu, mu, x),
    })
}

/// Set-enumeration Prokhorov distance; fails if the two forms disagree.
pub fn d_prokhorov_oracle(mu: &Measure, nu: &Measure, x: &FiniteMetricSpace) -> Result<f64> {
    let both = d_prokhorov_oracle_both(mu, nu, x)?;
    if (both.forward - both.backward).abs() > 1e-9 {
        return Err(Error::SolverFailure("Prokhorov forms disagree"));
    }
    Ok(both.forward)
}

fn enumerate_prokhorov(mu: &Measure, nu: &Measure, x: &FiniteMetricSpace) -> f64 {
    let n = x.len();
    let full = 1usize << n;
    let mut mass_mu = vec![0.0; full];
    let mut mass_nu = vec![0.0; full];
    for mask in 1..full {
        let low = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        mass_mu[mask] = mass_mu[rest] + mu.weight(low);
        mass_nu[mask] = mass_nu[rest] + nu.weight(low);
    }
    let levels = distance_levels(x);
    let mut steps = Vec::with_capacity(levels.len());
    let mut neigh = vec![0usize; full];
    for &level in &levels {
        let point_neigh: Vec<usize> = (0..n)
            .map(|i| {
                (0..n)
                    .filter(|&j| x.dist(i, j) <= level)
                    .fold(0, |m, j| m | 1 << j)
            })
            .collect();
        let mut worst: f64 = 0.0;
        for mask in 1..full {
            let low = mask.trailing_zeros() as usize;
            neigh[mask] = neigh[mask & (mask - 1)] | point_neigh[low];
            worst = worst.max(mass_mu[mask] - mass_nu[neigh[mask]]);
        }
        steps.push((level, if worst <= CROSSING_TOL { 0.0 } else { worst }));
    }
    first_crossing(&steps)
}

/// `me_μ(f, g) = inf { ε > 0 : μ(|f - g| > ε) <= ε }`.
pub fn ky_fan(f: &RealFunction, g: &RealFunction, mu: &Measure) -> Result<f64> {
    check_len(mu.len(), f.len())?;
    check_len(mu.len(), g.len())?;
    let gaps: Vec<(f64, f64)> = f
        .values()
        .iter()
        .zip(g.values())
        .zip(mu.weights())
        .filter(|(_, &w)| w > 0.0)
        .map(|((a, b), &w)| ((a - b).abs(), w))
        .collect();
    Ok(tail_crossing(gaps))
}

/// `inf { ε > 0 : mass{value > ε} <= ε }` for weighted values.
pub(crate) fn tail_crossing(mut atoms: Vec<(f64, f64)>) -> f64 {
    atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
    // suffix[k] = mass of atoms k.. summed from the top, so tails are exact
    let mut suffix = vec![0.0; atoms.len() + 1];
    for k in (0..atoms.len()).rev() {
        suffix[k] = (suffix[k + 1] + atoms[k].1).min(1.0);
    }
    let mut steps: Vec<(f64, f64)> = vec![(0.0, suffix[0])];
    let mut k = 0;
    while k < atoms.len() {
        let v = atoms[k].0;
        while k < atoms.len() && atoms[k].0 == v {
            k += 1;
        }
        if v == 0.0 {
            steps[0].1 = suffix[k];
        } else {
            steps.push((v, suffix[k]));
        }
    }
    first_crossing(&steps)
}

/// `sup_{f ∈ H} |∫f dμ - ∫f dν|` for a family inside `Lip_1^1`; a lower
/// bound for `d_MT` that is exact when `H` contains an optimal function.
pub fn invariance_equivalence_check(
    mu: &Measure,
    nu: &Measure,
    x: &FiniteMetricSpace,
    family: &[RealFunction],
) -> Result<f64> {
    check_pair(mu, nu, x)?;
    let mut best: f64 = 0.0;
    for f in family {
        check_len(x.len(), f.len())?;
        if f.sup_norm() > 1.0 + LIP_TOL || !is_lipschitz(f, x, 1.0)? {
            return Err(Error::BadFamily);
        }
        best = best.max((mu.integrate(f.values())? - nu.integrate(f.values())?).abs());
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_point(d: f64) -> FiniteMetricSpace {
        FiniteMetricSpace::from_fn(2, false, |_, _| d).unwrap()
    }

    fn m(w: &[f64]) -> Measure {
        Measure::new(w.to_vec()).unwrap()
    }

    #[test]
    fn d_mt_examples() {
        let a = m(&[1.0, 0.0]);
        let b = m(&[0.0, 1.0]);
        assert_eq!(d_mt(&a, &a, &two_point(3.0)).unwrap(), 0.0);
        assert!((d_mt(&a, &b, &two_point(3.0)).unwrap() - 2.0).abs() < 1e-12);
        assert!((d_mt(&a, &b, &two_point(1.0)).unwrap() - 1.0).abs() < 1e-12);
        assert!((d_mt_lp(&a, &b, &two_point(3.0)).unwrap() - 2.0).abs() < 1e-12);
        assert!((d_mt_lp(&a, &b, &two_point(1.0)).unwrap() - 1.0).abs() < 1e-12);
        assert!(matches!(
            d_mt(&a, &m(&[1.0]), &two_point(1.0)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn prokhorov_examples() {
        let a = m(&[1.0, 0.0]);
        let b = m(&[0.0, 1.0]);
        assert_eq!(d_prokhorov(&a, &a, &two_point(0.4)).unwrap(), 0.0);
        assert_eq!(d_prokhorov(&a, &b, &two_point(0.4)).unwrap(), 0.4);
        let p = m(&[0.7, 0.3]);
        let q = m(&[0.3, 0.7]);
        assert!((d_prokhorov(&p, &q, &two_point(1.0)).unwrap() - 0.4).abs() < 1e-12);
        assert_eq!(d_prokhorov(&a, &b, &two_point(3.0)).unwrap(), 1.0);
    }

    #[test]
    fn prokhorov_oracle_examples() {
        let a = m(&[1.0, 0.0]);
        let b = m(&[0.0, 1.0]);
        assert_eq!(d_prokhorov_oracle(&a, &a, &two_point(0.4)).unwrap(), 0.0);
        for d in [0.2, 0.4, 0.99, 1.0, 2.5] {
            assert_eq!(
                d_prokhorov_oracle(&a, &b, &two_point(d)).unwrap(),
                d.min(1.0)
            );
        }
        let big = FiniteMetricSpace::from_fn(21, false, |_, _| 1.0).unwrap();
        let u = Measure::uniform(21).unwrap();
        assert!(matches!(
            d_prokhorov_oracle(&u, &u, &big),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn ky_fan_examples() {
        let u = Measure::uniform(3).unwrap();
        let f = RealFunction::new(vec![0.0, 1.0, 2.0]).unwrap();
        assert_eq!(ky_fan(&f, &f, &u).unwrap(), 0.0);
        let zero = RealFunction::zeros(3);
        assert_eq!(
            ky_fan(&zero, &RealFunction::constant(3, 0.3), &u).unwrap(),
            0.3
        );
        assert_eq!(
            ky_fan(&zero, &RealFunction::constant(3, -2.0), &u).unwrap(),
            1.0
        );
        // one third of the mass at distance 5, rest equal
        let g = RealFunction::new(vec![0.0, 1.0, 7.0]).unwrap();
        assert_eq!(ky_fan(&f, &g, &u).unwrap(), 1.0 / 3.0);
    }

    #[test]
    fn equivalence_examples() {
        let x = two_point(1.0);
        let a = m(&[1.0, 0.0]);
        let b = m(&[0.0, 1.0]);
        assert_eq!(
            invariance_equivalence_check(&a, &b, &x, &[RealFunction::zeros(2)]).unwrap(),
            0.0
        );
        let fam = [
            RealFunction::new(vec![0.0, 1.0]).unwrap(),
            RealFunction::new(vec![1.0, 0.0]).unwrap(),
        ];
        assert_eq!(invariance_equivalence_check(&a, &b, &x, &fam).unwrap(), 1.0);
        assert_eq!(invariance_equivalence_check(&a, &a, &x, &fam).unwrap(), 0.0);
        let bad = [RealFunction::new(vec![0.0, 1.5]).unwrap()];
        assert_eq!(
            invariance_equivalence_check(&a, &b, &x, &bad),
            Err(Error::BadFamily)
        );
    }

    #[test]
    fn crossing_edge_cases() {
        assert_eq!(first_crossing(&[(0.0, 0.0)]), 0.0);
        assert_eq!(first_crossing(&[(0.0, 1.0), (0.5, 0.2)]), 0.5);
        assert_eq!(first_crossing(&[(0.0, 1.0), (0.5, 0.7), (2.0, 0.0)]), 0.7);
    }
}
