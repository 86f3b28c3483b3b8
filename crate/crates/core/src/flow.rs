//! Network flow kernels: Dinic max-flow on real capacities and a
//! successive-shortest-path solver for dense transportation problems.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

const FLOW_EPS: f64 = 1e-15;

#[derive(Clone, Debug)]
struct Edge {
    to: usize,
    rev: usize,
    cap: f64,
}

/// Max-flow network with real capacities.
#[derive(Clone, Debug)]
pub struct FlowNetwork {
    adj: Vec<Vec<Edge>>,
}

impl FlowNetwork {
    pub fn new(nodes: usize) -> Self {
        FlowNetwork {
            adj: vec![Vec::new(); nodes],
        }
    }

    pub fn add_edge(&mut self, from: usize, to: usize, cap: f64) {
        let rf = self.adj[to].len();
        let rt = self.adj[from].len() + usize::from(from == to);
        self.adj[from].push(Edge { to, rev: rf, cap });
        self.adj[to].push(Edge {
            to: from,
            rev: rt,
            cap: 0.0,
        });
    }

    pub fn max_flow(&mut self, source: usize, sink: usize) -> f64 {
        let n = self.adj.len();
        let mut total = 0.0;
        let mut level = vec![usize::MAX; n];
        let mut iter = vec![0usize; n];
        loop {
            level.iter_mut().for_each(|l| *l = usize::MAX);
            level[source] = 0;
            let mut queue = VecDeque::from([source]);
            while let Some(v) = queue.pop_front() {
                for e in &self.adj[v] {
                    if e.cap > FLOW_EPS && level[e.to] == usize::MAX {
                        level[e.to] = level[v] + 1;
                        queue.push_back(e.to);
                    }
                }
            }
            if level[sink] == usize::MAX {
                return total;
            }
            iter.iter_mut().for_each(|i| *i = 0);
            loop {
                let pushed = self.augment(source, sink, f64::INFINITY, &level, &mut iter);
                if pushed <= FLOW_EPS {
                    break;
                }
                total += pushed;
            }
        }
    }

    fn augment(
        &mut self,
        v: usize,
        sink: usize,
        limit: f64,
        level: &[usize],
        iter: &mut [usize],
    ) -> f64 {
        if v == sink {
            return limit;
        }
        while iter[v] < self.adj[v].len() {
            let (to, cap, rev) = {
                let e = &self.adj[v][iter[v]];
                (e.to, e.cap, e.rev)
            };
            if cap > FLOW_EPS && level[to] == level[v] + 1 {
                let pushed = self.augment(to, sink, limit.min(cap), level, iter);
                if pushed > FLOW_EPS {
                    self.adj[v][iter[v]].cap -= pushed;
                    self.adj[to][rev].cap += pushed;
                    return pushed;
                }
            }
            iter[v] += 1;
        }
        0.0
    }
}

/// Optimal plan of a transportation problem together with dual potentials.
#[derive(Clone, Debug)]
pub struct TransportSolution {
    pub cost: f64,
    /// Row-major `sources × sinks` plan.
    pub plan: Vec<f64>,
    /// Dual values `u` on sources and `v` on sinks with
    /// `u_i - v_j <= cost(i, j)`, tight wherever the plan is positive.
    pub source_potential: Vec<f64>,
    pub sink_potential: Vec<f64>,
}

/// Minimum-cost transportation from `supply` to `demand` with non-negative
/// costs `cost(i, j)`, solved by successive shortest paths with dense
/// Dijkstra on reduced costs.
pub fn transport(
    supply: &[f64],
    demand: &[f64],
    cost: impl Fn(usize, usize) -> f64,
) -> Result<TransportSolution> {
    let ns = supply.len();
    let nt = demand.len();
    let c: Vec<f64> = (0..ns)
        .flat_map(|i| (0..nt).map(move |j| (i, j)))
        .map(|(i, j)| cost(i, j))
        .collect();
    if c.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
        return Err(Error::InvalidArgument(
            "transport costs must be finite and non-negative",
        ));
    }
    let mut plan = vec![0.0; ns * nt];
    let mut left_s: Vec<f64> = supply.to_vec();
    let mut left_t: Vec<f64> = demand.to_vec();
    // nodes 0..ns are sources, ns..ns+nt sinks
    let nodes = ns + nt;
    let mut pot = vec![0.0; nodes];
    let mut dist = vec![f64::INFINITY; nodes];
    let mut prev = vec![usize::MAX; nodes];
    let mut done = vec![false; nodes];
    let tol = 1e-14;
    let max_rounds = 4 * (nodes + 1) * (nodes + 1);

    for _ in 0..max_rounds {
        if !left_s.iter().any(|&s| s > tol) || !left_t.iter().any(|&t| t > tol) {
            let cost_total = plan.iter().zip(&c).map(|(x, w)| x * w).sum();
            return Ok(TransportSolution {
                cost: cost_total,
                plan,
                source_potential: pot[..ns].iter().map(|p| -p).collect(),
                sink_potential: pot[ns..].iter().map(|p| -p).collect(),
            });
        }
        dist.iter_mut().for_each(|d| *d = f64::INFINITY);
        prev.iter_mut().for_each(|p| *p = usize::MAX);
        done.iter_mut().for_each(|d| *d = false);
        for i in 0..ns {
            if left_s[i] > tol {
                dist[i] = 0.0;
            }
        }
        loop {
            let mut v = usize::MAX;
            let mut best = f64::INFINITY;
            for u in 0..nodes {
                if !done[u] && dist[u] < best {
                    best = dist[u];
                    v = u;
                }
            }
            if v == usize::MAX {
                break;
            }
            done[v] = true;
            if v < ns {
                for j in 0..nt {
                    let w = ns + j;
                    let nd = best + (c[v * nt + j] + pot[v] - pot[w]).max(0.0);
                    if nd < dist[w] {
                        dist[w] = nd;
                        prev[w] = v;
                    }
                }
            } else {
                let j = v - ns;
                for i in 0..ns {
                    if plan[i * nt + j] > tol {
                        let nd = best + (-c[i * nt + j] + pot[v] - pot[i]).max(0.0);
                        if nd < dist[i] {
                            dist[i] = nd;
                            prev[i] = v;
                        }
                    }
                }
            }
        }
        let reach = dist
            .iter()
            .copied()
            .filter(|d| d.is_finite())
            .fold(0.0, f64::max);
        let mut target = usize::MAX;
        let mut best = f64::INFINITY;
        for j in 0..nt {
            if left_t[j] > tol && dist[ns + j] < best {
                best = dist[ns + j];
                target = ns + j;
            }
        }
        if target == usize::MAX {
            return Err(Error::SolverFailure("transport demand unreachable"));
        }
        for u in 0..nodes {
            pot[u] += if dist[u].is_finite() { dist[u] } else { reach };
        }
        // bottleneck along the path back to a source with supply left
        let mut amount = left_t[target - ns];
        let mut v = target;
        while prev[v] != usize::MAX {
            let u = prev[v];
            if u >= ns {
                // backward edge sink u -> source v cancels plan[v][u]
                amount = amount.min(plan[v * nt + (u - ns)]);
            }
            v = u;
        }
        amount = amount.min(left_s[v]);
        let origin = v;
        let mut v = target;
        while prev[v] != usize::MAX {
            let u = prev[v];
            if u < ns {
                plan[u * nt + (v - ns)] += amount;
            } else {
                let k = v * nt + (u - ns);
                plan[k] = (plan[k] - amount).max(0.0);
            }
            v = u;
        }
        left_s[origin] -= amount;
        left_t[target - ns] -= amount;
    }
    Err(Error::SolverFailure("transport did not converge"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bipartite_max_flow() {
        // s=0, left 1..=2, right 3..=4, t=5
        let mut net = FlowNetwork::new(6);
        net.add_edge(0, 1, 0.7);
        net.add_edge(0, 2, 0.3);
        net.add_edge(1, 3, 2.0);
        net.add_edge(2, 3, 2.0);
        net.add_edge(2, 4, 2.0);
        net.add_edge(3, 5, 0.5);
        net.add_edge(4, 5, 0.5);
        assert!((net.max_flow(0, 5) - 0.8).abs() < 1e-15);
    }

    #[test]
    fn transport_small() {
        // two sources, two sinks, crossing is expensive
        let sol = transport(
            &[0.5, 0.5],
            &[0.5, 0.5],
            |i, j| if i == j { 1.0 } else { 3.0 },
        )
        .unwrap();
        assert!((sol.cost - 1.0).abs() < 1e-14);
        for i in 0..2 {
            for j in 0..2 {
                assert!(
                    sol.source_potential[i] - sol.sink_potential[j]
                        <= (if i == j { 1.0 } else { 3.0 }) + 1e-12
                );
            }
        }
    }

    #[test]
    fn transport_needs_rerouting() {
        // greedy would send source 0 to sink 0 first
        let cost = [[1.0, 2.0], [1.0, 10.0]];
        let sol = transport(&[1.0, 1.0], &[1.0, 1.0], |i, j| cost[i][j]).unwrap();
        assert!((sol.cost - 3.0).abs() < 1e-14);
    }
}
