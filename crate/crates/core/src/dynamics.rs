//! Finite group actions on finite metric spaces: orbit pseudo-metrics on the
//! group, orbit displacement, invariant measures, and checks of the bound of
//! average displacement by observable diameters and of its near-fixed-point
//! consequence.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::concentration::{obs_diam, oracle_fits};
use crate::error::{Error, Result};
use crate::groups::{max_invariance_defect, FiniteGroup, RightInvariantMetric};
use crate::space::{check_len, FiniteMetricSpace, Measure, MmSpace, MASS_TOL};

/// Above this many `(g, h, x)` triples the action law is sampled.
pub const FULL_ACTION_CHECK_MAX: usize = 20_000_000;
const SAMPLED_ACTION_CHECKS: usize = 1_000_000;
/// Slack of the asserted inequalities.
pub const INEQUALITY_TOL: f64 = 1e-7;
/// Default α grid for the supremum over α.
pub const DEFAULT_ALPHAS: [f64; 5] = [0.5, 0.2, 0.1, 0.05, 0.02];

/// A group acting on a finite metric space; `action[g][x] = g·x`.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowInstance {
    group: FiniteGroup,
    space: FiniteMetricSpace,
    action: Vec<usize>,
}

impl FlowInstance {
    pub fn new(
        group: FiniteGroup,
        space: FiniteMetricSpace,
        action: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let ng = group.order();
        let nx = space.len();
        check_len(ng, action.len())?;
        let mut flat = Vec::with_capacity(ng * nx);
        for row in &action {
            check_len(nx, row.len())?;
            if let Some(&bad) = row.iter().find(|&&y| y >= nx) {
                return Err(Error::BadPoint(bad));
            }
            flat.extend_from_slice(row);
        }
        let flow = FlowInstance {
            group,
            space,
            action: flat,
        };
        flow.validate()?;
        Ok(flow)
    }

    fn validate(&self) -> Result<()> {
        let ng = self.group.order();
        let nx = self.space.len();
        let e = self.group.identity();
        if (0..nx).any(|x| self.act(e, x) != x) {
            return Err(Error::InvalidAction("identity does not act trivially"));
        }
        let ok = |g: usize, h: usize, x: usize| {
            self.act(g, self.act(h, x)) == self.act(self.group.mul(g, h), x)
        };
        let valid = if ng * ng * nx <= FULL_ACTION_CHECK_MAX {
            (0..ng).all(|g| (0..ng).all(|h| (0..nx).all(|x| ok(g, h, x))))
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0x6163_7469);
            (0..SAMPLED_ACTION_CHECKS).all(|_| {
                ok(
                    rng.gen_range(0..ng),
                    rng.gen_range(0..ng),
                    rng.gen_range(0..nx),
                )
            })
        };
        if !valid {
            return Err(Error::InvalidAction(
                "action is not compatible with multiplication",
            ));
        }
        Ok(())
    }

    /// `G` acting on itself by left multiplication.
    pub fn regular(group: FiniteGroup, metric: &RightInvariantMetric) -> Result<Self> {
        check_len(group.order(), metric.base().len())?;
        let n = group.order();
        let action = (0..n)
            .map(|g| (0..n).map(|x| group.mul(g, x)).collect())
            .collect();
        Self::new(group, metric.base().clone(), action)
    }

    /// `G` acting on the left cosets `xH`, with `d(xH, yH) = min_h d(x, yh)`.
    pub fn coset(
        group: FiniteGroup,
        metric: &RightInvariantMetric,
        subgroup: &[usize],
    ) -> Result<Self> {
        if !group.is_subgroup(subgroup) {
            return Err(Error::InvalidGroup("not a subgroup"));
        }
        let n = group.order();
        let d = metric.base();
        // coset of x, represented by its smallest element
        let rep = |x: usize| {
            subgroup
                .iter()
                .map(|&h| group.mul(x, h))
                .min()
                .expect("subgroup contains the identity")
        };
        let mut reps: Vec<usize> = (0..n).map(rep).collect();
        reps.sort_unstable();
        reps.dedup();
        let index = |x: usize| reps.binary_search(&rep(x)).expect("coset representative");
        let labels = reps
            .iter()
            .map(|&r| format!("{}H", group.labels()[r]))
            .collect();
        let rows = reps
            .iter()
            .map(|&a| {
                reps.iter()
                    .map(|&b| {
                        subgroup
                            .iter()
                            .map(|&h| d.dist(a, group.mul(b, h)))
                            .fold(f64::INFINITY, f64::min)
                    })
                    .collect()
            })
            .collect();
        let space = FiniteMetricSpace::new(labels, rows, false)?;
        let action = (0..n)
            .map(|g| reps.iter().map(|&r| index(group.mul(g, r))).collect())
            .collect();
        Self::new(group, space, action)
    }

    /// Every element fixes every point.
    pub fn trivial(group: FiniteGroup, space: FiniteMetricSpace) -> Result<Self> {
        let action = vec![(0..space.len()).collect(); group.order()];
        Self::new(group, space, action)
    }

    /// Disjoint union of two flows of the same group; points of different
    /// parts are `gap` apart.
    pub fn disjoint_union(a: &FlowInstance, b: &FlowInstance, gap: f64) -> Result<Self> {
        if a.group != b.group {
            return Err(Error::InvalidAction("flows of different groups"));
        }
        let (na, nb) = (a.space.len(), b.space.len());
        let n = na + nb;
        let labels = a
            .space
            .labels()
            .iter()
            .map(|l| format!("a.{l}"))
            .chain(b.space.labels().iter().map(|l| format!("b.{l}")))
            .collect();
        let mut dist = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                dist.push(match (i < na, j < na) {
                    (true, true) => a.space.dist(i, j),
                    (false, false) => b.space.dist(i - na, j - na),
                    _ => gap,
                });
            }
        }
        let space =
            FiniteMetricSpace::from_flat(labels, dist, a.space.is_pseudo() || b.space.is_pseudo())?;
        let action = (0..a.group.order())
            .map(|g| {
                (0..na)
                    .map(|x| a.act(g, x))
                    .chain((0..nb).map(|x| na + b.act(g, x)))
                    .collect()
            })
            .collect();
        Self::new(a.group.clone(), space, action)
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn space(&self) -> &FiniteMetricSpace {
        &self.space
    }

    #[inline]
    pub fn act(&self, g: usize, x: usize) -> usize {
        self.action[g * self.space.len() + x]
    }

    pub fn action_table(&self) -> Vec<Vec<usize>> {
        self.action
            .chunks(self.space.len())
            .map(<[usize]>::to_vec)
            .collect()
    }

    pub fn check_point(&self, x: usize) -> Result<()> {
        if x < self.space.len() {
            Ok(())
        } else {
            Err(Error::BadPoint(x))
        }
    }

    /// Points fixed by every element.
    pub fn fixed_points(&self) -> Vec<usize> {
        (0..self.space.len())
            .filter(|&x| (0..self.group.order()).all(|g| self.act(g, x) == x))
            .collect()
    }
}

/// `d_{G,x}(g, h) = d(gx, hx)`, a pseudo-metric on the group.
pub fn d_gx(flow: &FlowInstance, x: usize) -> Result<FiniteMetricSpace> {
    flow.check_point(x)?;
    let n = flow.group.order();
    let orbit: Vec<usize> = (0..n).map(|g| flow.act(g, x)).collect();
    let dist = (0..n)
        .flat_map(|g| (0..n).map(move |h| (g, h)))
        .map(|(g, h)| flow.space.dist(orbit[g], orbit[h]))
        .collect();
    FiniteMetricSpace::from_flat(flow.group.labels().to_vec(), dist, true)
}

/// `d_{G,X} = sup_y d_{G,y}`, verified right-invariant.
pub fn d_gx_sup(flow: &FlowInstance) -> Result<RightInvariantMetric> {
    let n = flow.group.order();
    let mut dist = vec![0.0; n * n];
    for y in 0..flow.space.len() {
        for g in 0..n {
            let gy = flow.act(g, y);
            for h in 0..n {
                let v = flow.space.dist(gy, flow.act(h, y));
                if v > dist[g * n + h] {
                    dist[g * n + h] = v;
                }
            }
        }
    }
    let space = FiniteMetricSpace::from_flat(flow.group.labels().to_vec(), dist, true)?;
    RightInvariantMetric::new(&flow.group, space)
}

/// `∫ max_{g ∈ E} d(x, gx) dν(x)`.
pub fn avg_orbit_displacement(
    flow: &FlowInstance,
    nu: &Measure,
    elements: &[usize],
) -> Result<f64> {
    if elements.is_empty() {
        return Err(Error::EmptySet);
    }
    check_len(flow.space.len(), nu.len())?;
    for &g in elements {
        flow.group.check_element(g)?;
    }
    Ok((0..flow.space.len())
        .map(|x| {
            nu.weight(x)
                * elements
                    .iter()
                    .map(|&g| flow.space.dist(x, flow.act(g, x)))
                    .fold(0.0, f64::max)
        })
        .sum())
}

/// `g_* ν`.
pub fn translate_on_space(flow: &FlowInstance, nu: &Measure, g: usize) -> Result<Measure> {
    check_len(flow.space.len(), nu.len())?;
    flow.group.check_element(g)?;
    let mut out = vec![0.0; nu.len()];
    for (x, &w) in nu.weights().iter().enumerate() {
        out[flow.act(g, x)] += w;
    }
    Ok(Measure::from_raw_unchecked(out))
}

/// True when `g_* ν = ν` for every `g`, up to [`MASS_TOL`] per point.
pub fn is_invariant(flow: &FlowInstance, nu: &Measure) -> Result<bool> {
    for g in 0..flow.group.order() {
        let moved = translate_on_space(flow, nu, g)?;
        if moved
            .weights()
            .iter()
            .zip(nu.weights())
            .any(|(a, b)| (a - b).abs() > MASS_TOL)
        {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `(1/|G|) Σ_g g_* ν0`, verified invariant.
pub fn haar_average(flow: &FlowInstance, nu0: &Measure) -> Result<Measure> {
    check_len(flow.space.len(), nu0.len())?;
    let ng = flow.group.order();
    let mut out = vec![0.0; nu0.len()];
    for g in 0..ng {
        for (x, &w) in nu0.weights().iter().enumerate() {
            out[flow.act(g, x)] += w;
        }
    }
    let nu = Measure::normalized(out)?;
    if !is_invariant(flow, &nu)? {
        return Err(Error::SolverFailure("averaged measure is not invariant"));
    }
    Ok(nu)
}

/// Numeric knobs of [`theorem2_verify`].
#[derive(Clone, Debug, PartialEq)]
pub struct Theorem2Options {
    pub alphas: Vec<f64>,
    /// Fraction of the sequence, counted from its end, standing in for the
    /// lower limit.
    pub tail_fraction: f64,
    pub budget: usize,
    pub seed: u64,
    pub use_oracle: bool,
}

impl Default for Theorem2Options {
    fn default() -> Self {
        Theorem2Options {
            alphas: DEFAULT_ALPHAS.to_vec(),
            tail_fraction: 0.5,
            budget: 64,
            seed: 0,
            use_oracle: true,
        }
    }
}

/// `max_x ObsDiam(G, d_{G,x}, μ_i; -α)` for one sequence index and α.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesPoint {
    pub index: usize,
    pub alpha: f64,
    pub value: f64,
    pub certified: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Theorem2Report {
    pub lhs: f64,
    /// `max_α min_{tail} max_x ObsDiam(G, d_{G,x}, μ_i; -α)`.
    pub rhs: f64,
    pub alpha_star: f64,
    /// Every observable diameter behind `rhs` is an exact oracle value.
    pub certified: bool,
    /// `lhs <= rhs + 1e-7`, asserted only when certified.
    pub holds: Option<bool>,
    /// The same comparison with uncertified lower bounds, for information.
    pub holds_estimate: bool,
    pub series: Vec<SeriesPoint>,
    /// `max_g d_MT((λ_g)_* μ_i, μ_i)` over `d_{G,X}`, per index.
    pub defects: Vec<f64>,
}

/// Compares `∫ max_{g∈E} d(x, gx) dν` with
/// `sup_α liminf_i sup_x ObsDiam(G, d_{G,x}, μ_i; -α)` on a finite sequence
/// of measures on the group, the lower limit replaced by the minimum over
/// the tail and the supremum over α by the maximum over a grid.
pub fn theorem2_verify(
    flow: &FlowInstance,
    measure_seq: &[Measure],
    nu: &Measure,
    elements: &[usize],
    opts: &Theorem2Options,
) -> Result<Theorem2Report> {
    if measure_seq.is_empty() {
        return Err(Error::InvalidArgument("empty measure sequence"));
    }
    if opts.alphas.is_empty() || opts.alphas.iter().any(|&a| !(a > 0.0)) {
        return Err(Error::InvalidArgument("alphas must be positive"));
    }
    if !(opts.tail_fraction > 0.0 && opts.tail_fraction <= 1.0) {
        return Err(Error::InvalidArgument("tail fraction must lie in (0, 1]"));
    }
    for mu in measure_seq {
        check_len(flow.group.order(), mu.len())?;
    }
    check_len(flow.space.len(), nu.len())?;
    if !is_invariant(flow, nu)? {
        return Err(Error::NotInvariant);
    }
    let lhs = avg_orbit_displacement(flow, nu, elements)?;

    // many points share the same orbit pseudo-metric
    let mut metrics: Vec<FiniteMetricSpace> = Vec::new();
    for x in 0..flow.space.len() {
        let d = d_gx(flow, x)?;
        if !metrics.contains(&d) {
            metrics.push(d);
        }
    }
    let mut cache: BTreeMap<Vec<u64>, (f64, bool)> = BTreeMap::new();
    let mut series = Vec::with_capacity(measure_seq.len() * opts.alphas.len());
    for (i, mu) in measure_seq.iter().enumerate() {
        for &alpha in &opts.alphas {
            let mut value: f64 = 0.0;
            let mut certified = true;
            for d in &metrics {
                let key: Vec<u64> = core::iter::once(alpha.to_bits())
                    .chain(mu.weights().iter().map(|w| w.to_bits()))
                    .chain(d.matrix().iter().map(|v| v.to_bits()))
                    .collect();
                let (v, c) = match cache.get(&key) {
                    Some(&hit) => hit,
                    None => {
                        let m = MmSpace::new(d.clone(), mu.clone())?;
                        let oracle = opts.use_oracle && oracle_fits(&m);
                        let report = obs_diam(&m, alpha, opts.budget, opts.seed, oracle)?;
                        let out = (report.best_value(), report.oracle_value.is_some());
                        cache.insert(key, out);
                        out
                    }
                };
                value = value.max(v);
                certified &= c;
            }
            series.push(SeriesPoint {
                index: i,
                alpha,
                value,
                certified,
            });
        }
    }

    let len = measure_seq.len();
    let tail_len = (libm::ceil(len as f64 * opts.tail_fraction) as usize).clamp(1, len);
    let tail_start = len - tail_len;
    let mut rhs = f64::NEG_INFINITY;
    let mut alpha_star = opts.alphas[0];
    let mut certified = true;
    for &alpha in &opts.alphas {
        let tail: Vec<&SeriesPoint> = series
            .iter()
            .filter(|s| s.alpha == alpha && s.index >= tail_start)
            .collect();
        let value = tail.iter().map(|s| s.value).fold(f64::INFINITY, f64::min);
        certified &= tail.iter().all(|s| s.certified);
        if value > rhs {
            rhs = value;
            alpha_star = alpha;
        }
    }

    let dgx = d_gx_sup(flow)?;
    let defects = measure_seq
        .iter()
        .map(|mu| max_invariance_defect(mu, &flow.group, &dgx))
        .collect::<Result<Vec<_>>>()?;
    let holds_estimate = lhs <= rhs + INEQUALITY_TOL;
    Ok(Theorem2Report {
        lhs,
        rhs,
        alpha_star,
        certified,
        holds: certified.then_some(holds_estimate),
        holds_estimate,
        series,
        defects,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct NearFixedPoint {
    pub point: usize,
    /// `max_g d(x0, g x0)`.
    pub value: f64,
    /// `value <= rhs + 1e-7`.
    pub within: bool,
}

/// Minimizes `max_g d(x, gx)` over all points; ties go to the smallest index.
pub fn corollary3_find_point(flow: &FlowInstance, rhs: f64) -> NearFixedPoint {
    let displacement = |x: usize| {
        (0..flow.group.order())
            .map(|g| flow.space.dist(x, flow.act(g, x)))
            .fold(0.0, f64::max)
    };
    let (point, value) = (0..flow.space.len()).map(|x| (x, displacement(x))).fold(
        (0, f64::INFINITY),
        |best, cur| if cur.1 < best.1 { cur } else { best },
    );
    NearFixedPoint {
        point,
        value,
        within: value <= rhs + INEQUALITY_TOL,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{cycle_space, CycleScale};
    use crate::groups::cyclic_metric;

    fn z3_regular() -> FlowInstance {
        let g = FiniteGroup::cyclic(3).unwrap();
        let d = cyclic_metric(&g, CycleScale::UnitEdges).unwrap();
        FlowInstance::regular(g, &d).unwrap()
    }

    #[test]
    fn orbit_metrics() {
        let flow = z3_regular();
        for x in 0..3 {
            assert_eq!(d_gx(&flow, x).unwrap().matrix(), flow.space().matrix());
        }
        assert_eq!(
            d_gx_sup(&flow).unwrap().base().matrix(),
            flow.space().matrix()
        );
        assert_eq!(d_gx(&flow, 3), Err(Error::BadPoint(3)));
        let triv = FlowInstance::trivial(
            FiniteGroup::cyclic(3).unwrap(),
            cycle_space(4, CycleScale::UnitEdges).unwrap(),
        )
        .unwrap();
        assert!(d_gx(&triv, 1).unwrap().matrix().iter().all(|&v| v == 0.0));
        assert!(d_gx_sup(&triv)
            .unwrap()
            .base()
            .matrix()
            .iter()
            .all(|&v| v == 0.0));
    }

    #[test]
    fn displacement_examples() {
        let flow = z3_regular();
        let u = Measure::uniform(3).unwrap();
        assert_eq!(avg_orbit_displacement(&flow, &u, &[1]).unwrap(), 1.0);
        assert_eq!(avg_orbit_displacement(&flow, &u, &[0]).unwrap(), 0.0);
        assert_eq!(avg_orbit_displacement(&flow, &u, &[]), Err(Error::EmptySet));
    }

    #[test]
    fn haar_average_examples() {
        let flow = z3_regular();
        let nu = haar_average(&flow, &Measure::point_mass(3, 1).unwrap()).unwrap();
        assert!(nu.weights().iter().all(|&w| (w - 1.0 / 3.0).abs() < 1e-15));
        let u = Measure::uniform(3).unwrap();
        assert_eq!(haar_average(&flow, &u).unwrap(), u);
    }

    #[test]
    fn z3_equality_case() {
        let flow = z3_regular();
        let haar = Measure::uniform(3).unwrap();
        let opts = Theorem2Options {
            alphas: vec![0.2],
            ..Default::default()
        };
        let r = theorem2_verify(&flow, &[haar.clone(), haar.clone()], &haar, &[1], &opts).unwrap();
        assert_eq!(
            (r.lhs, r.rhs, r.certified, r.holds),
            (1.0, 1.0, true, Some(true))
        );
        assert!(r.defects.iter().all(|&d| d < 1e-12));
        let p = corollary3_find_point(&flow, r.rhs);
        assert_eq!(p.value, 1.0);
        assert!(p.within);
    }

    #[test]
    fn fixed_point_flow() {
        let g = FiniteGroup::cyclic(4).unwrap();
        let d = cyclic_metric(&g, CycleScale::UnitDiameter).unwrap();
        let regular = FlowInstance::regular(g.clone(), &d).unwrap();
        let point =
            FlowInstance::trivial(g, FiniteMetricSpace::from_fn(1, false, |_, _| 0.0).unwrap())
                .unwrap();
        let flow = FlowInstance::disjoint_union(&regular, &point, 1.0).unwrap();
        assert_eq!(flow.fixed_points(), vec![4]);
        let nu = Measure::point_mass(5, 4).unwrap();
        let haar = Measure::uniform(4).unwrap();
        let r = theorem2_verify(&flow, &[haar], &nu, &[1], &Theorem2Options::default()).unwrap();
        assert_eq!(r.lhs, 0.0);
        assert_eq!(r.holds, Some(true));
        let p = corollary3_find_point(&flow, r.rhs);
        assert_eq!((p.point, p.value), (4, 0.0));
        let bad = Measure::point_mass(5, 0).unwrap();
        assert!(matches!(
            theorem2_verify(
                &flow,
                &[Measure::uniform(4).unwrap()],
                &bad,
                &[1],
                &Theorem2Options::default()
            ),
            Err(Error::NotInvariant)
        ));
    }

    #[test]
    fn coset_flow() {
        let g = FiniteGroup::cyclic(4).unwrap();
        let d = cyclic_metric(&g, CycleScale::UnitEdges).unwrap();
        let flow = FlowInstance::coset(g, &d, &[0, 2]).unwrap();
        assert_eq!(flow.space().len(), 2);
        assert_eq!(flow.space().dist(0, 1), 1.0);
        assert_eq!(flow.act(1, 0), 1);
        assert_eq!(flow.act(2, 0), 0);
    }
}
