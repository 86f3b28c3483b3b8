use mmconc_core::concentration::{obs_diam, obs_diam_oracle, part_diam, PushforwardOnR};
use mmconc_core::generators::SymMetric;
use mmconc_core::groups::{
    invariance_defect, left_translate_measure, right_translate_measure, sym_metric, FiniteGroup,
};
use mmconc_core::lipschitz::{
    distance_to_lip, extend, inf_convolution, is_lipschitz, lip_constant, mcshane_nearest, truncate,
};
use mmconc_core::metrics::{d_mt, d_mt_lp, d_prokhorov, d_prokhorov_oracle_both, ky_fan};
use mmconc_core::space::{pushforward, restrict, support};
use mmconc_core::{FiniteMetricSpace, Measure, MmSpace, PointMap, RealFunction};
use proptest::prelude::*;

/// Shortest-path closure of random positive edge weights.
fn metric_from_weights(n: usize, raw: &[f64]) -> FiniteMetricSpace {
    let mut d = vec![vec![0.0; n]; n];
    let mut k = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            d[i][j] = raw[k % raw.len()];
            d[j][i] = d[i][j];
            k += 1;
        }
    }
    for m in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][m] + d[m][j] < d[i][j] {
                    d[i][j] = d[i][m] + d[m][j];
                }
            }
        }
    }
    FiniteMetricSpace::from_fn(n, false, |i, j| d[i][j]).unwrap()
}

fn measure_from(raw: &[f64]) -> Measure {
    // keep a few exact zeros so supports are proper subsets
    let w: Vec<f64> = raw.iter().map(|&v| if v < 0.2 { 0.0 } else { v }).collect();
    if w.iter().all(|&v| v == 0.0) {
        let mut w = w;
        w[0] = 1.0;
        return Measure::normalized(w).unwrap();
    }
    Measure::normalized(w).unwrap()
}

fn space_strategy(max_n: usize) -> impl Strategy<Value = FiniteMetricSpace> {
    (1..=max_n, prop::collection::vec(0.05f64..2.0, 1..64))
        .prop_map(|(n, raw)| metric_from_weights(n, &raw))
}

fn instance(
    max_n: usize,
) -> impl Strategy<Value = (FiniteMetricSpace, Measure, Measure, Vec<f64>)> {
    space_strategy(max_n).prop_flat_map(|x| {
        let n = x.len();
        (
            Just(x),
            prop::collection::vec(0.0f64..1.0, n).prop_map(|r| measure_from(&r)),
            prop::collection::vec(0.0f64..1.0, n).prop_map(|r| measure_from(&r)),
            prop::collection::vec(-3.0f64..3.0, n),
        )
    })
}

/// Brute-force partial diameter over all subsets.
fn part_diam_subsets(values: &[f64], weights: &[f64], target: f64) -> f64 {
    let n = values.len();
    let mut best = f64::INFINITY;
    for mask in 1usize..(1 << n) {
        let members: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        let mass: f64 = members.iter().map(|&i| weights[i]).sum();
        if mass >= target - 1e-12 {
            let hi = members
                .iter()
                .map(|&i| values[i])
                .fold(f64::NEG_INFINITY, f64::max);
            let lo = members
                .iter()
                .map(|&i| values[i])
                .fold(f64::INFINITY, f64::min);
            best = best.min(hi - lo);
        }
    }
    best
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pushforward_preserves_mass((x, mu, _nu, _f) in instance(8), seed in 0usize..100) {
        let n = x.len();
        let image: Vec<usize> = (0..n).map(|i| (i * 7 + seed) % 3).collect();
        let p = PointMap::new(image, 3).unwrap();
        let pushed = pushforward(&mu, &p).unwrap();
        prop_assert!((pushed.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for y in 0..3 {
            let pre: f64 = (0..n).filter(|&i| p.apply(i) == y).map(|i| mu.weight(i)).sum();
            prop_assert!((pushed.weight(y) - pre).abs() < 1e-12);
        }
    }

    #[test]
    fn support_and_restriction((x, mu, _nu, _f) in instance(8)) {
        let m = MmSpace::new(x, mu.clone()).unwrap();
        let s = support(&m);
        prop_assert!(s.iter().all(|&i| mu.weight(i) > 0.0));
        prop_assert!((0..mu.len()).filter(|i| !s.contains(i)).all(|i| mu.weight(i) == 0.0));
        let r = restrict(&m, &s).unwrap();
        prop_assert!(r.fully_supported());
        prop_assert!((r.measure().weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn inf_convolution_is_lipschitz_minorant((x, _mu, _nu, f) in instance(8), k in 0.1f64..4.0) {
        let f = RealFunction::new(f).unwrap();
        let g = inf_convolution(&f, &x, k).unwrap();
        prop_assert!(is_lipschitz(&g, &x, k).unwrap());
        prop_assert!(g.values().iter().zip(f.values()).all(|(a, b)| a <= b));
    }

    #[test]
    fn truncation_bounds((_x, _mu, _nu, f) in instance(8), c in 0.0f64..2.0) {
        let f = RealFunction::new(f).unwrap();
        let t = truncate(&f, c).unwrap();
        prop_assert!(t.sup_norm() <= c);
        for (a, b) in t.values().iter().zip(f.values()) {
            if b.abs() <= c { prop_assert_eq!(a, b); }
        }
    }

    #[test]
    fn mcshane_projection_is_optimal((x, _mu, _nu, f) in instance(8), ell in 0.1f64..3.0) {
        let f = RealFunction::new(f).unwrap();
        let g = mcshane_nearest(&f, &x, ell).unwrap();
        prop_assert!(is_lipschitz(&g, &x, ell).unwrap());
        let dist = distance_to_lip(&f, &x, ell).unwrap();
        prop_assert!((g.sup_distance(&f).unwrap() - dist).abs() < 1e-9);
    }

    #[test]
    fn extension_keeps_values_and_constant((x, _mu, _nu, f) in instance(8)) {
        let n = x.len();
        let subset: Vec<usize> = (0..n).step_by(2).collect();
        let proj = mcshane_nearest(&RealFunction::new(f).unwrap(), &x, 1.0).unwrap();
        let on_subset = truncate(&RealFunction::new(subset.iter().map(|&s| proj.at(s)).collect()).unwrap(), 1.0).unwrap();
        let e = extend(&on_subset, &subset, &x, 1.0, 1.0).unwrap();
        for (a, &s) in subset.iter().enumerate() {
            prop_assert_eq!(e.at(s), on_subset.at(a));
        }
        prop_assert!(lip_constant(&e, &x).unwrap() <= 1.0 + 1e-9);
        prop_assert!(e.sup_norm() <= 1.0);
    }

    #[test]
    fn transport_matches_simplex((x, mu, nu, _f) in instance(8)) {
        let a = d_mt(&mu, &nu, &x).unwrap();
        let b = d_mt_lp(&mu, &nu, &x).unwrap();
        prop_assert!((a - b).abs() < 1e-9, "{} vs {}", a, b);
    }

    #[test]
    fn prokhorov_matches_enumeration((x, mu, nu, _f) in instance(8)) {
        let fast = d_prokhorov(&mu, &nu, &x).unwrap();
        let both = d_prokhorov_oracle_both(&mu, &nu, &x).unwrap();
        prop_assert!((fast - both.forward).abs() < 1e-9);
        prop_assert!((both.forward - both.backward).abs() < 1e-9);
    }

    #[test]
    fn prokhorov_and_transport_compare((x, mu, nu, _f) in instance(8)) {
        let p = d_prokhorov(&mu, &nu, &x).unwrap();
        let t = d_mt(&mu, &nu, &x).unwrap();
        prop_assert!(p * p <= t + 1e-9);
        prop_assert!(t <= 3.0 * p + 1e-9);
    }

    #[test]
    fn ky_fan_triangle((_x, mu, _nu, f) in instance(8), shift in -1.0f64..1.0) {
        let f = RealFunction::new(f).unwrap();
        let g = RealFunction::new(f.values().iter().rev().copied().collect()).unwrap();
        let h = f.shifted(shift);
        let fg = ky_fan(&f, &g, &mu).unwrap();
        let gh = ky_fan(&g, &h, &mu).unwrap();
        let fh = ky_fan(&f, &h, &mu).unwrap();
        prop_assert!(fh <= fg + gh + 1e-12);
        prop_assert_eq!(fg, ky_fan(&g, &f, &mu).unwrap());
        prop_assert_eq!(ky_fan(&f, &f, &mu).unwrap(), 0.0);
        prop_assert!(fg <= 1.0);
    }

    #[test]
    fn part_diam_matches_subsets((_x, mu, _nu, f) in instance(8), alpha in 0.01f64..0.99) {
        let nu = PushforwardOnR::of(&RealFunction::new(f.clone()).unwrap(), &mu).unwrap();
        let fast = part_diam(&nu, 1.0 - alpha).unwrap();
        let slow = part_diam_subsets(&f, mu.weights(), 1.0 - alpha);
        prop_assert!((fast - slow).abs() < 1e-12);
    }

    #[test]
    fn obs_diam_bound_below_oracle((x, mu, _nu, _f) in instance(5), alpha in 0.05f64..0.6) {
        let m = MmSpace::new(x, mu).unwrap();
        let r = obs_diam(&m, alpha, 32, 1, true).unwrap();
        let exact = r.oracle_value.unwrap();
        prop_assert!(r.lower_bound <= exact + 1e-9);
        prop_assert!(is_lipschitz(&r.witness, m.space(), 1.0).unwrap());
        // larger α can only shrink the observable diameter
        prop_assert!(obs_diam_oracle(&m, (alpha + 0.1).min(0.99)).unwrap() <= exact + 1e-9);
    }
}

fn group_instance() -> impl Strategy<Value = (usize, Vec<f64>, usize, usize)> {
    (
        3usize..=4,
        prop::collection::vec(0.0f64..1.0, 24),
        0usize..24,
        0usize..24,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn defect_triangle_and_right_translation((n, raw, a, b) in group_instance()) {
        let g = FiniteGroup::symmetric(n).unwrap();
        let d = sym_metric(&g, &SymMetric::NormalizedHamming).unwrap();
        let order = g.order();
        let mu = measure_from(&raw[..order]);
        let (a, b) = (a % order, b % order);
        let da = invariance_defect(&mu, a, &g, &d).unwrap();
        let db = invariance_defect(&mu, b, &g, &d).unwrap();
        let dab = invariance_defect(&mu, g.mul(a, b), &g, &d).unwrap();
        prop_assert!(dab <= da + db + 1e-9);
        // normalized Hamming is bi-invariant, so right translation keeps defects
        let moved = right_translate_measure(&mu, b, &g).unwrap();
        prop_assert!((invariance_defect(&moved, a, &g, &d).unwrap() - da).abs() < 1e-9);
        let left = left_translate_measure(&mu, a, &g).unwrap();
        prop_assert!((left.weights().iter().sum::<f64>() - mu.weights().iter().sum::<f64>()).abs() < 1e-15);
    }
}
