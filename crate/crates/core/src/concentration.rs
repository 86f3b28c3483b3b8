//! Partial and observable diameters, medians, Lévy diagnostics and the
//! Lipschitz-observable concentration criterion against a target space.
//!
//! The observable diameter maximizes a non-concave functional over the
//! 1-Lipschitz cone, so two numbers are kept apart throughout:
//!
//! * `lower_bound`: the partial diameter actually achieved by a verified
//!   1-Lipschitz witness (candidate family plus coordinate local search);
//! * `oracle_value`: the exact value for small spaces, obtained by
//!   enumerating the order in which a function can rank the points and
//!   solving one linear program per ranking.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lipschitz::{is_lipschitz, lip1_candidates, RealFunction};
use crate::lp::LinearProgram;
use crate::metrics::{d_prokhorov, first_crossing, ky_fan};
use crate::space::{
    check_len, pushforward, FiniteMetricSpace, Measure, MmSpace, PointMap, MASS_TOL,
};

/// Largest number of distinguishable support points the exact oracle accepts.
pub const ORACLE_MAX_POINTS: usize = 8;
/// Grid step, as a fraction of the diameter, reported alongside every
/// observable-diameter bound.
pub const ETA_FRACTION: f64 = 1.0 / 64.0;
const ORDER_TOL: f64 = 1e-12;

/// An atomic probability measure on the real line.
#[derive(Clone, Debug, PartialEq)]
pub struct PushforwardOnR {
    atoms: Vec<(f64, f64)>,
}

impl PushforwardOnR {
    /// Atoms are sorted and equal values merged; zero masses are dropped.
    pub fn new(mut atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.iter().any(|a| !a.0.is_finite() || !a.1.is_finite()) {
            return Err(Error::NonFinite);
        }
        if atoms.iter().any(|a| a.1 < 0.0) {
            return Err(Error::InvalidMeasure("negative mass"));
        }
        atoms.retain(|a| a.1 > 0.0);
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
        for (v, w) in atoms {
            match merged.last_mut() {
                Some(last) if last.0 == v => last.1 += w,
                _ => merged.push((v, w)),
            }
        }
        let total: f64 = merged.iter().map(|a| a.1).sum();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidMeasure("masses do not sum to one"));
        }
        Ok(PushforwardOnR { atoms: merged })
    }

    /// `f_*(μ)`.
    pub fn of(f: &RealFunction, mu: &Measure) -> Result<Self> {
        check_len(mu.len(), f.len())?;
        Self::new(
            f.values()
                .iter()
                .copied()
                .zip(mu.weights().iter().copied())
                .collect(),
        )
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }
}

/// Smallest diameter of a set carrying mass at least `one_minus_alpha`.
///
/// A diameter-minimal set can be taken to be a run of consecutive atoms,
/// so a two-pointer scan over the sorted atoms suffices.
pub fn part_diam(nu: &PushforwardOnR, one_minus_alpha: f64) -> Result<f64> {
    if one_minus_alpha > 1.0 + MASS_TOL {
        return Err(Error::Infeasible);
    }
    if one_minus_alpha <= 0.0 {
        return Ok(0.0);
    }
    Ok(window_min_spread(&nu.atoms, one_minus_alpha))
}

/// Minimal spread over windows of sorted `(value, mass)` atoms with mass at
/// least `target`. Equal values need not be merged.
fn window_min_spread(sorted: &[(f64, f64)], target: f64) -> f64 {
    window_min(
        sorted.len(),
        target,
        |k| sorted[k].1,
        |i, j| sorted[j].0 - sorted[i].0,
    )
}

/// Two-pointer scan over windows `i..=j` of sorted atoms with mass at least
/// `target`, minimizing `spread(i, j)`.
fn window_min(
    len: usize,
    target: f64,
    mass_of: impl Fn(usize) -> f64,
    spread: impl Fn(usize, usize) -> f64,
) -> f64 {
    let mut best = f64::INFINITY;
    let mut j = 0;
    let mut mass = 0.0;
    for i in 0..len {
        if j < i {
            j = i;
            mass = 0.0;
        }
        while j < len && mass < target - MASS_TOL {
            mass += mass_of(j);
            j += 1;
        }
        if mass < target - MASS_TOL {
            break;
        }
        best = best.min(spread(i, j - 1));
        mass -= mass_of(i);
    }
    if best.is_finite() {
        best
    } else {
        0.0
    }
}

/// Partial diameter of a 1-Lipschitz witness, each window spread capped by
/// the distance between its end points to drop rounding in the values.
fn witness_part_diam(f: &RealFunction, m: &MmSpace, target: f64) -> f64 {
    let mut pts = m.support();
    pts.sort_by(|&a, &b| f.at(a).total_cmp(&f.at(b)).then(a.cmp(&b)));
    window_min(
        pts.len(),
        target,
        |k| m.measure().weight(pts[k]),
        |i, j| (f.at(pts[j]) - f.at(pts[i])).min(m.space().dist(pts[i], pts[j])),
    )
}

/// How the lower bound of an [`ObsDiamReport`] was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ObsDiamMethod {
    /// A member of the candidate family was best.
    Candidates,
    /// Local search improved on the candidate family.
    LocalSearch,
}

impl ObsDiamMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            ObsDiamMethod::Candidates => "candidates",
            ObsDiamMethod::LocalSearch => "local_search",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ObsDiamReport {
    pub alpha: f64,
    pub lower_bound: f64,
    /// Exact value, present when requested and the space is small enough.
    pub oracle_value: Option<f64>,
    /// `diam / 64`.
    pub eta: f64,
    /// 1-Lipschitz function attaining `lower_bound`.
    pub witness: RealFunction,
    /// Index of the candidate the witness was grown from.
    pub witness_id: usize,
    pub method: ObsDiamMethod,
}

impl ObsDiamReport {
    /// Oracle value when certified, otherwise the lower bound.
    pub fn best_value(&self) -> f64 {
        self.oracle_value.unwrap_or(self.lower_bound)
    }
}

/// `ObsDiam(X, d, μ; -α) = sup { PartDiam(f_*μ, 1 - α) : f ∈ Lip_1(X, d) }`.
pub fn obs_diam(
    m: &MmSpace,
    alpha: f64,
    budget: usize,
    seed: u64,
    use_oracle: bool,
) -> Result<ObsDiamReport> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidArgument("alpha must be positive"));
    }
    let n = m.len();
    let eta = m.space().diam() * ETA_FRACTION;
    let target = 1.0 - alpha;
    let zero = || ObsDiamReport {
        alpha,
        lower_bound: 0.0,
        oracle_value: if use_oracle { Some(0.0) } else { None },
        eta,
        witness: RealFunction::zeros(n),
        witness_id: 0,
        method: ObsDiamMethod::Candidates,
    };
    let support = m.support();
    if target <= 0.0 || support.len() <= 1 {
        return Ok(zero());
    }

    // zero-mass points never change a push-forward, and every 1-Lipschitz
    // function on the support extends to the whole space
    let sub = m.space().subspace(&support)?;
    let weights: Vec<f64> = support.iter().map(|&i| m.measure().weight(i)).collect();
    let mut scorer = Scorer::new(weights, target);
    let candidates = lip1_candidates(&sub, budget, seed);

    let mut scored: Vec<(usize, f64)> = candidates
        .iter()
        .enumerate()
        .map(|(k, f)| (k, scorer.min_spread(f.values())))
        .collect();
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let (mut best_id, mut best_value) = scored[0];
    let mut best_fn = candidates[best_id].values().to_vec();
    let mut method = ObsDiamMethod::Candidates;

    let starts = if sub.len() <= 64 { 6 } else { 2 };
    for &(k, start_value) in scored.iter().take(starts) {
        let (f, value) = local_search(
            &sub,
            &mut scorer,
            candidates[k].values().to_vec(),
            start_value,
        );
        if value > best_value + ORDER_TOL {
            best_value = value;
            best_fn = f;
            best_id = k;
            method = ObsDiamMethod::LocalSearch;
        }
    }

    let on_support = RealFunction::new(best_fn)?;
    let witness = extend_from_support(&on_support, &support, m.space());
    if !is_lipschitz(&witness, m.space(), 1.0)? {
        return Err(Error::SolverFailure(
            "observable-diameter witness is not 1-Lipschitz",
        ));
    }
    let lower_bound = witness_part_diam(&witness, m, target);
    let oracle_value = if use_oracle {
        obs_diam_oracle(m, alpha).ok()
    } else {
        None
    };
    Ok(ObsDiamReport {
        alpha,
        lower_bound,
        oracle_value,
        eta,
        witness,
        witness_id: best_id,
        method,
    })
}

/// `g ↦ min_s f(s) + d(g, s)`, equal to `f` on the support when `f` is
/// 1-Lipschitz there.
fn extend_from_support(f: &RealFunction, support: &[usize], x: &FiniteMetricSpace) -> RealFunction {
    let mut out: Vec<f64> = (0..x.len())
        .map(|g| {
            support
                .iter()
                .enumerate()
                .map(|(a, &s)| f.at(a) + x.dist(g, s))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    for (a, &s) in support.iter().enumerate() {
        out[s] = f.at(a);
    }
    RealFunction::new(out).expect("finite by construction")
}

/// Evaluates window spreads of a function under a fixed measure.
struct Scorer {
    weights: Vec<f64>,
    target: f64,
    order: Vec<usize>,
    atoms: Vec<(f64, f64)>,
    spreads: Vec<f64>,
}

impl Scorer {
    fn new(weights: Vec<f64>, target: f64) -> Self {
        let n = weights.len();
        Scorer {
            weights,
            target,
            order: (0..n).collect(),
            atoms: Vec::with_capacity(n),
            spreads: Vec::with_capacity(n),
        }
    }

    fn sort(&mut self, values: &[f64]) {
        self.order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        self.atoms.clear();
        self.atoms
            .extend(self.order.iter().map(|&i| (values[i], self.weights[i])));
    }

    fn min_spread(&mut self, values: &[f64]) -> f64 {
        self.sort(values);
        window_min_spread(&self.atoms, self.target)
    }

    /// All window spreads in increasing order; the first is the partial
    /// diameter. Later entries break ties on plateaus of the first.
    fn profile(&mut self, values: &[f64]) -> Vec<f64> {
        self.sort(values);
        self.spreads.clear();
        let atoms = &self.atoms;
        let mut j = 0;
        let mut mass = 0.0;
        for i in 0..atoms.len() {
            if j < i {
                j = i;
                mass = 0.0;
            }
            while j < atoms.len() && mass < self.target - MASS_TOL {
                mass += atoms[j].1;
                j += 1;
            }
            if mass < self.target - MASS_TOL {
                break;
            }
            self.spreads.push(atoms[j - 1].0 - atoms[i].0);
            mass -= atoms[i].1;
        }
        self.spreads.sort_by(f64::total_cmp);
        self.spreads.clone()
    }
}

fn lex_better(a: &[f64], b: &[f64]) -> bool {
    for (x, y) in a.iter().zip(b) {
        if *x > *y + ORDER_TOL {
            return true;
        }
        if *x < *y - ORDER_TOL {
            return false;
        }
    }
    false
}

/// Coordinate ascent inside the 1-Lipschitz cone. Each move keeps the
/// function 1-Lipschitz by staying in the interval allowed by all other
/// coordinates.
fn local_search(
    x: &FiniteMetricSpace,
    scorer: &mut Scorer,
    mut f: Vec<f64>,
    start: f64,
) -> (Vec<f64>, f64) {
    let n = x.len();
    let small = n <= 64;
    let max_sweeps = if small { 60 } else { 3 };
    let mut current = scorer.profile(&f);
    let mut trials: Vec<f64> = Vec::with_capacity(2 * n + 2);
    for _ in 0..max_sweeps {
        let mut moved = false;
        for p in 0..n {
            let row = x.row(p);
            let mut lo = f64::NEG_INFINITY;
            let mut hi = f64::INFINITY;
            for q in (0..n).filter(|&q| q != p) {
                lo = lo.max(f[q] - row[q]);
                hi = hi.min(f[q] + row[q]);
            }
            if !(lo <= hi) {
                continue;
            }
            trials.clear();
            trials.push(lo);
            trials.push(hi);
            if small {
                for q in (0..n).filter(|&q| q != p) {
                    for t in [f[q], f[q] - row[q], f[q] + row[q]] {
                        if t >= lo && t <= hi {
                            trials.push(t);
                        }
                    }
                }
            }
            if n <= MIDPOINT_MAX {
                // a spread ending at p and one starting at p balance at a midpoint
                for q in (0..n).filter(|&q| q != p) {
                    for r in (q + 1..n).filter(|&r| r != p) {
                        let t = 0.5 * (f[q] + f[r]);
                        if t >= lo && t <= hi {
                            trials.push(t);
                        }
                    }
                }
            }
            let keep = f[p];
            let mut best_t = keep;
            for &t in &trials {
                if t == keep {
                    continue;
                }
                f[p] = t;
                let prof = scorer.profile(&f);
                if lex_better(&prof, &current) {
                    current = prof;
                    best_t = t;
                }
            }
            f[p] = best_t;
            moved |= best_t != keep;
        }
        if !moved && !(small && block_move(x, scorer, &mut f, &mut current)) {
            break;
        }
    }
    let value = current.first().copied().unwrap_or(0.0);
    if value + ORDER_TOL < start {
        // lexicographic moves never lower the first entry
        unreachable!("local search lost ground");
    }
    (f, value)
}

/// Largest space on which coordinate moves also try midpoints of pairs.
const MIDPOINT_MAX: usize = 16;

/// Largest subset count for which every subset is tried as a block.
const BLOCK_ALL_SUBSETS_MAX: usize = 10;

/// Translates a block of points as far up or down as the 1-Lipschitz
/// constraints to the other points allow, keeping the first improving move.
/// Blocks are all proper subsets on spaces of at most
/// [`BLOCK_ALL_SUBSETS_MAX`] points and the value-sorted prefixes and
/// suffixes otherwise.
fn block_move(
    x: &FiniteMetricSpace,
    scorer: &mut Scorer,
    f: &mut [f64],
    current: &mut Vec<f64>,
) -> bool {
    let n = x.len();
    let mut blocks: Vec<Vec<bool>> = Vec::new();
    if n <= BLOCK_ALL_SUBSETS_MAX {
        for mask in 1..(1usize << n) - 1 {
            blocks.push((0..n).map(|i| mask >> i & 1 == 1).collect());
        }
    } else {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| f[a].total_cmp(&f[b]));
        for k in 1..n {
            let mut low = vec![false; n];
            order[..k].iter().for_each(|&i| low[i] = true);
            blocks.push(low.iter().map(|b| !b).collect());
            blocks.push(low);
        }
    }
    for block in &blocks {
        let mut up = f64::INFINITY;
        let mut down = f64::INFINITY;
        for p in (0..n).filter(|&p| block[p]) {
            for q in (0..n).filter(|&q| !block[q]) {
                up = up.min(f[q] + x.dist(p, q) - f[p]);
                down = down.min(f[p] + x.dist(p, q) - f[q]);
            }
        }
        for shift in [up, -down] {
            if !(shift.abs() > ORDER_TOL) || !shift.is_finite() {
                continue;
            }
            let moved: Vec<f64> = (0..n)
                .map(|i| if block[i] { f[i] + shift } else { f[i] })
                .collect();
            let prof = scorer.profile(&moved);
            if lex_better(&prof, current) {
                *current = prof;
                f.copy_from_slice(&moved);
                return true;
            }
        }
    }
    false
}

/// Support points with points at pseudo-distance zero merged:
/// `(distance matrix, masses)`.
fn reduced_support(m: &MmSpace) -> (Vec<Vec<f64>>, Vec<f64>) {
    let support = m.support();
    let mut reps: Vec<usize> = Vec::new();
    let mut masses: Vec<f64> = Vec::new();
    for &i in &support {
        let w = m.measure().weight(i);
        match reps.iter().position(|&r| m.space().dist(r, i) == 0.0) {
            Some(k) => masses[k] += w,
            None => {
                reps.push(i);
                masses.push(w);
            }
        }
    }
    let dist = reps
        .iter()
        .map(|&a| reps.iter().map(|&b| m.space().dist(a, b)).collect())
        .collect();
    (dist, masses)
}

/// Exact observable diameter for spaces with at most
/// [`ORACLE_MAX_POINTS`] distinguishable support points.
///
/// For each ranking `σ` of the points, the best 1-Lipschitz function
/// compatible with `σ` solves a linear program in the consecutive gaps;
/// rankings and their reversals give the same value, and rankings whose
/// trivial Lipschitz bound cannot beat the incumbent are skipped.
pub fn obs_diam_oracle(m: &MmSpace, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidArgument("alpha must be positive"));
    }
    let target = 1.0 - alpha;
    let (dist, masses) = reduced_support(m);
    let k = masses.len();
    if k > ORACLE_MAX_POINTS {
        return Err(Error::TooLarge {
            n: k,
            max: ORACLE_MAX_POINTS,
        });
    }
    if target <= 0.0 || k <= 1 || masses.iter().any(|&w| w >= target - MASS_TOL) {
        return Ok(0.0);
    }
    let mut sigma: Vec<usize> = (0..k).collect();
    let mut best: f64 = 0.0;
    let mut windows: Vec<(usize, usize)> = Vec::with_capacity(k);
    loop {
        if sigma[0] < sigma[k - 1] {
            windows.clear();
            let mut bound = f64::INFINITY;
            for i in 0..k {
                let mut mass = 0.0;
                let mut j = i;
                while j < k {
                    mass += masses[sigma[j]];
                    if mass >= target - MASS_TOL {
                        break;
                    }
                    j += 1;
                }
                if j == k {
                    break;
                }
                windows.push((i, j));
                bound = bound.min(dist[sigma[i]][sigma[j]]);
            }
            if bound > best + ORDER_TOL {
                best = best.max(ranking_lp(&dist, &sigma, &windows)?);
            }
        }
        if !next_permutation(&mut sigma) {
            break;
        }
    }
    Ok(best)
}

/// Variables: gaps `g_0..g_{k-2}` between consecutive ranked values and the
/// objective `t`.
fn ranking_lp(dist: &[Vec<f64>], sigma: &[usize], windows: &[(usize, usize)]) -> Result<f64> {
    let k = sigma.len();
    let t = k - 1;
    let mut objective = vec![0.0; k];
    objective[t] = 1.0;
    let mut lp = LinearProgram::new(objective);
    let mut row = vec![0.0; k];
    for i in 0..k {
        for j in (i + 1)..k {
            row.iter_mut().for_each(|r| *r = 0.0);
            row[i..j].iter_mut().for_each(|r| *r = 1.0);
            lp.add_le(&row, dist[sigma[i]][sigma[j]])?;
        }
    }
    for &(i, j) in windows {
        row.iter_mut().for_each(|r| *r = 0.0);
        row[i..j].iter_mut().for_each(|r| *r = -1.0);
        row[t] = 1.0;
        lp.add_le(&row, 0.0)?;
    }
    Ok(lp.maximize()?.value)
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Checks `ObsDiam(X, d0, μ; -α) <= ObsDiam(X, d1, μ; -α) + 1e-7` with the
/// exact oracle on both sides.
pub fn obs_diam_monotone_check(
    mu: &Measure,
    d0: &FiniteMetricSpace,
    d1: &FiniteMetricSpace,
    alpha: f64,
) -> Result<bool> {
    check_len(d0.len(), mu.len())?;
    check_len(d1.len(), mu.len())?;
    if !d0.is_dominated_by(d1) {
        return Err(Error::NotDominated);
    }
    let v0 = obs_diam_oracle(&MmSpace::new(d0.clone(), mu.clone())?, alpha)?;
    let v1 = obs_diam_oracle(&MmSpace::new(d1.clone(), mu.clone())?, alpha)?;
    Ok(v0 <= v1 + 1e-7)
}

/// Smallest `m` with `μ(f >= m) >= 1/2` and `μ(f <= m) >= 1/2`.
pub fn median(f: &RealFunction, mu: &Measure) -> Result<f64> {
    let nu = PushforwardOnR::of(f, mu)?;
    let mut below = 0.0;
    for &(v, w) in nu.atoms() {
        below += w;
        if below >= 0.5 - MASS_TOL {
            return Ok(v);
        }
    }
    Err(Error::InvalidMeasure("no median found"))
}

/// `μ(|f - m(f)| > eps)` with `m(f)` the smallest median.
pub fn median_deviation(f: &RealFunction, mu: &Measure, eps: f64) -> Result<f64> {
    let med = median(f, mu)?;
    Ok(f.values()
        .iter()
        .zip(mu.weights())
        .filter(|(v, _)| (*v - med).abs() > eps)
        .map(|(_, w)| w)
        .sum())
}

/// For each space, `sup_f μ_i(|f - m_i(f)| > eps)` over its candidate
/// 1-Lipschitz family: a lower bound on the supremum over all of `Lip_1`.
pub fn median_concentration_profile(
    spaces: &[MmSpace],
    eps: f64,
    family_budget: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument("eps must be positive"));
    }
    spaces
        .iter()
        .map(|m| {
            let mut worst: f64 = 0.0;
            for f in lip1_candidates(m.space(), family_budget, seed) {
                worst = worst.max(median_deviation(&f, m.measure(), eps)?);
            }
            Ok(worst)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct LevyRow {
    pub index: f64,
    pub n_points: usize,
    pub report: ObsDiamReport,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LevyTable {
    pub rows: Vec<LevyRow>,
    /// Per α: least-squares slope of `ln(lower_bound)` against `ln(index)`,
    /// over entries with a positive bound.
    pub exponents: Vec<(f64, Option<f64>)>,
}

impl LevyTable {
    /// Lower bounds for one α in sequence order.
    pub fn column(&self, alpha: f64) -> Vec<f64> {
        self.rows
            .iter()
            .filter(|r| r.report.alpha == alpha)
            .map(|r| r.report.lower_bound)
            .collect()
    }

    pub fn exponent(&self, alpha: f64) -> Option<f64> {
        self.exponents
            .iter()
            .find(|e| e.0 == alpha)
            .and_then(|e| e.1)
    }
}

/// Observable-diameter bounds across a sequence of spaces and an α grid.
///
/// `indices` label the sequence for the decay fit (for example the
/// dimension of a cube); positions `1, 2, ...` are used when absent.
pub fn levy_diagnostic(
    seq: &[MmSpace],
    alphas: &[f64],
    indices: Option<&[f64]>,
    budget: usize,
    seed: u64,
    use_oracle: bool,
) -> Result<LevyTable> {
    if alphas.iter().any(|&a| !(a > 0.0)) {
        return Err(Error::InvalidArgument("alphas must be positive"));
    }
    if let Some(ix) = indices {
        check_len(seq.len(), ix.len())?;
    }
    let label = |i: usize| indices.map_or((i + 1) as f64, |ix| ix[i]);
    let mut rows = Vec::with_capacity(seq.len() * alphas.len());
    for (i, m) in seq.iter().enumerate() {
        for &alpha in alphas {
            let report = obs_diam(m, alpha, budget, seed, use_oracle && oracle_fits(m))?;
            rows.push(LevyRow {
                index: label(i),
                n_points: m.len(),
                report,
            });
        }
    }
    let exponents = alphas
        .iter()
        .map(|&alpha| {
            let samples: Vec<(f64, f64)> = rows
                .iter()
                .filter(|r| r.report.alpha == alpha)
                .map(|r| (r.index, r.report.lower_bound))
                .collect();
            (alpha, decay_exponent(&samples))
        })
        .collect();
    Ok(LevyTable { rows, exponents })
}

/// True when the exact oracle will accept the space.
pub fn oracle_fits(m: &MmSpace) -> bool {
    reduced_support(m).1.len() <= ORACLE_MAX_POINTS
}

/// Least-squares slope of `ln(value)` against `ln(index)` over samples
/// with both positive; `None` with fewer than two such samples.
pub fn decay_exponent(samples: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .filter(|s| s.0 > 0.0 && s.1 > 0.0)
        .map(|s| (libm::log(s.0), libm::log(s.1)))
        .collect();
    fit_slope(&pts)
}

fn fit_slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / sxx)
}

/// One row of [`concentration_criterion`].
#[derive(Clone, Debug, PartialEq)]
pub struct CriterionRow {
    /// `d_P((p_i)_* μ_i, μ_X)` on the target.
    pub prokhorov: f64,
    /// Largest `me_{μ_i}` distance from a pulled-back target candidate
    /// `g ∘ p_i` to its nearest 1-Lipschitz function on the source. Each
    /// term bounds `inf_{h ∈ Lip_1(X_i)} me(g ∘ p_i, h)` from above; the
    /// supremum runs over the target's candidate family.
    pub pullback_gap_upper: f64,
    /// Largest lower bound on `inf_{g ∈ Lip_1(X)} me(h, g ∘ p_i)` over the
    /// source's candidate family; a lower bound for that Hausdorff direction.
    pub source_gap_lower: f64,
}

/// Evaluates the concentration criterion for user-supplied maps `p_i`:
/// weak convergence of the push-forwards, and the two directions of the
/// Hausdorff distance under `me_{μ_i}` between `Lip_1(X) ∘ p_i` and
/// `Lip_1(X_i)`.
pub fn concentration_criterion(
    seq: &[MmSpace],
    target: &MmSpace,
    maps: &[PointMap],
    budget: usize,
    seed: u64,
) -> Result<Vec<CriterionRow>> {
    if seq.len() != maps.len() {
        return Err(Error::MapMismatch);
    }
    let target_family = lip1_candidates(target.space(), budget, seed);
    seq.iter()
        .zip(maps)
        .map(|(m, p)| {
            if p.source_size() != m.len() || p.target_size() != target.len() {
                return Err(Error::MapMismatch);
            }
            let pushed = pushforward(m.measure(), p)?;
            let prokhorov = d_prokhorov(&pushed, target.measure(), target.space())?;

            let mut pullback_gap_upper: f64 = 0.0;
            for g in &target_family {
                let h = g.compose(p.image());
                let proj = crate::lipschitz::mcshane_nearest(&h, m.space(), 1.0)?;
                pullback_gap_upper = pullback_gap_upper.max(ky_fan(&h, &proj, m.measure())?);
            }

            let mut source_gap_lower: f64 = 0.0;
            for h in lip1_candidates(m.space(), budget, seed) {
                source_gap_lower = source_gap_lower.max(fiber_constant_gap(&h, m.measure(), p));
            }
            Ok(CriterionRow {
                prokhorov,
                pullback_gap_upper,
                source_gap_lower,
            })
        })
        .collect()
}

/// `inf { me_μ(h, u) : u constant on the fibres of p }`, which bounds
/// `inf_{g ∈ Lip_1(X)} me_μ(h, g ∘ p)` from below (every `g ∘ p` is
/// fibre-constant). Exact when the target is a single point.
pub fn fiber_constant_gap(h: &RealFunction, mu: &Measure, p: &PointMap) -> f64 {
    let mut fibers: Vec<Vec<(f64, f64)>> = vec![Vec::new(); p.target_size()];
    for i in 0..h.len() {
        if mu.weight(i) > 0.0 {
            fibers[p.apply(i)].push((h.at(i), mu.weight(i)));
        }
    }
    for fib in &mut fibers {
        fib.sort_by(|a, b| a.0.total_cmp(&b.0));
    }
    // critical half-widths where a window can gain an atom
    let mut levels: Vec<f64> = vec![0.0];
    for fib in &fibers {
        for a in 0..fib.len() {
            for b in (a + 1)..fib.len() {
                levels.push(0.5 * (fib[b].0 - fib[a].0));
            }
        }
    }
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    let excluded = |eps: f64| -> f64 {
        fibers
            .iter()
            .map(|fib| {
                let total: f64 = fib.iter().map(|a| a.1).sum();
                (total - max_window_mass(fib, 2.0 * eps)).max(0.0)
            })
            .sum()
    };
    // excluded mass is non-increasing in eps: binary search for the first
    // level at which it drops below the next level
    let holds = |k: usize| {
        excluded(levels[k]) <= levels.get(k + 1).copied().unwrap_or(f64::INFINITY) + 1e-12
    };
    let (mut lo, mut hi) = (0usize, levels.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if holds(mid) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    first_crossing(&[(levels[lo], excluded(levels[lo]))])
}

/// Largest mass of sorted atoms inside a closed interval of given length.
fn max_window_mass(sorted: &[(f64, f64)], width: f64) -> f64 {
    let mut best: f64 = 0.0;
    let mut mass = 0.0;
    let mut i = 0;
    for j in 0..sorted.len() {
        mass += sorted[j].1;
        while sorted[j].0 - sorted[i].0 > width + 1e-15 {
            mass -= sorted[i].1;
            i += 1;
        }
        best = best.max(mass);
    }
    best
}
