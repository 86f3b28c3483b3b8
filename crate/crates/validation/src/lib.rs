//! Random instances and brute-force reference values used to check the
//! `mmconc` library against independent computations.

use mmconc_core::concentration::ETA_FRACTION;
use mmconc_core::{FiniteMetricSpace, Measure, MmSpace, RealFunction};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Shortest-path closure of random edge weights in `[lo, hi)`.
pub fn random_metric(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> FiniteMetricSpace {
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            d[i][j] = rng.gen_range(lo..hi);
            d[j][i] = d[i][j];
        }
    }
    shortest_paths(&mut d);
    FiniteMetricSpace::from_fn(n, false, |i, j| d[i][j]).unwrap()
}

/// A pseudo-metric below `d1`: every edge scaled by a random factor in
/// `[0, 1]`, then closed under shortest paths.
pub fn dominated_metric(rng: &mut ChaCha8Rng, d1: &FiniteMetricSpace) -> FiniteMetricSpace {
    let n = d1.len();
    let mut rows = d1.rows();
    for i in 0..n {
        for j in (i + 1)..n {
            rows[i][j] *= rng.gen_range(0.0..=1.0);
            rows[j][i] = rows[i][j];
        }
    }
    shortest_paths(&mut rows);
    FiniteMetricSpace::from_fn(n, true, |i, j| rows[i][j]).unwrap()
}

/// Floyd–Warshall in place.
pub fn shortest_paths(d: &mut [Vec<f64>]) {
    let n = d.len();
    for m in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][m] + d[m][j] < d[i][j] {
                    d[i][j] = d[i][m] + d[m][j];
                }
            }
        }
    }
}

/// Random probability vector with some exact zeros.
pub fn random_measure(rng: &mut ChaCha8Rng, n: usize) -> Measure {
    let mut w: Vec<f64> = (0..n)
        .map(|_| {
            if rng.gen_bool(0.25) {
                0.0
            } else {
                rng.gen_range(0.01..1.0)
            }
        })
        .collect();
    if w.iter().all(|&v| v == 0.0) {
        w[rng.gen_range(0..n)] = 1.0;
    }
    Measure::normalized(w).unwrap()
}

/// Vertices of `{f : |f_i| <= 1, |f_0 - f_1| <= d}` on two points.
pub fn two_point_vertices(d: f64) -> Vec<RealFunction> {
    // each vertex sits on two of the lines f0 = ±1, f1 = ±1, f0 - f1 = ±d
    let mut out = Vec::new();
    for s0 in [-1.0, 1.0] {
        for s1 in [-1.0, 1.0] {
            out.push([s0, s1]);
        }
        for s in [-d, d] {
            out.push([s0, s0 - s]);
            out.push([s0 + s, s0]);
        }
    }
    out.into_iter()
        .filter(|f| f[0].abs() <= 1.0 && f[1].abs() <= 1.0 && (f[0] - f[1]).abs() <= d + 1e-12)
        .map(|f| RealFunction::new(f.to_vec()).unwrap())
        .collect()
}

/// Smallest spread of a set of values carrying mass `target`, by checking
/// every run of sorted values.
pub fn window_diam(values: &[f64], weights: &[f64], target: f64) -> f64 {
    let mut atoms: Vec<(f64, f64)> = values
        .iter()
        .copied()
        .zip(weights.iter().copied())
        .filter(|a| a.1 > 0.0)
        .collect();
    atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut best = f64::INFINITY;
    for i in 0..atoms.len() {
        let mut mass = 0.0;
        for j in i..atoms.len() {
            mass += atoms[j].1;
            if mass >= target - 1e-12 {
                best = best.min(atoms[j].0 - atoms[i].0);
                break;
            }
        }
    }
    if best.is_finite() {
        best
    } else {
        0.0
    }
}

/// Exhaustive maximization of the partial diameter over 1-Lipschitz
/// functions with values on the `diam/64` grid and `f(x_0) = 0`, one value
/// per entry of `alphas`.
pub fn grid_oracle(m: &MmSpace, alphas: &[f64]) -> Vec<f64> {
    let x = m.space();
    let n = x.len();
    let eta = x.diam() * ETA_FRACTION;
    let mut best = vec![0.0; alphas.len()];
    if n <= 1 || eta == 0.0 {
        return best;
    }
    let mut ks = vec![0i64; n];
    let grid = Grid {
        x,
        eta,
        weights: m.measure().weights(),
        alphas,
    };
    grid.walk(1, &mut ks, &mut best);
    best
}

struct Grid<'a> {
    x: &'a FiniteMetricSpace,
    eta: f64,
    weights: &'a [f64],
    alphas: &'a [f64],
}

impl Grid<'_> {
    fn walk(&self, pos: usize, ks: &mut [i64], best: &mut [f64]) {
        if pos == ks.len() {
            let values: Vec<f64> = ks.iter().map(|&k| k as f64 * self.eta).collect();
            for (b, &a) in best.iter_mut().zip(self.alphas) {
                *b = b.max(window_diam(&values, self.weights, 1.0 - a));
            }
            return;
        }
        let reach = (self.x.dist(0, pos) / self.eta + 1e-9).floor() as i64;
        for k in -reach..=reach {
            let fits = (1..pos)
                .all(|q| ((k - ks[q]).abs() as f64) * self.eta <= self.x.dist(q, pos) + 1e-12);
            if fits {
                ks[pos] = k;
                self.walk(pos + 1, ks, best);
            }
        }
    }
}
