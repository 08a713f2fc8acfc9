//! Successive shortest paths on the bipartite transport network.
//!
//! Nodes: source, one per row, one per column, sink. Row→column arcs exist
//! only for finite costs and are uncapacitated; column→row residual arcs carry
//! the current flow. Dijkstra runs on reduced costs with node potentials.
//! Afterwards every cycle in the support is cancelled so the plan is basic.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::measures::CostMatrix;
use crate::scalar::Scalar;

/// Largest mass imbalance between the two marginals that is silently absorbed.
const BALANCE_TOLERANCE: f64 = 1e-9;

struct Network<'a, T> {
    costs: &'a CostMatrix<T>,
    n: usize,
    m: usize,
    flow: Vec<T>,
    supply: Vec<T>,
    demand: Vec<T>,
    potential: Vec<T>,
    eps: T,
}

impl<'a, T: Scalar> Network<'a, T> {
    fn source(&self) -> usize {
        self.n + self.m
    }

    fn sink(&self) -> usize {
        self.n + self.m + 1
    }

    fn flow_at(&self, i: usize, j: usize) -> T {
        self.flow[i * self.m + j]
    }

    /// Outgoing residual arcs of `u` as `(target, cost)`.
    fn arcs(&self, u: usize, out: &mut Vec<(usize, T)>) {
        out.clear();
        let (n, m) = (self.n, self.m);
        if u == self.source() {
            out.extend((0..n).filter(|&i| self.supply[i] > self.eps).map(|i| (i, T::zero())));
        } else if u < n {
            out.extend((0..m).filter_map(|j| self.costs.finite(u, j).map(|c| (n + j, c))));
        } else if u < n + m {
            let j = u - n;
            out.extend(
                (0..n)
                    .filter(|&i| self.flow_at(i, j) > T::zero())
                    .map(|i| (i, -self.costs.finite(i, j).expect("flow only on finite arcs"))),
            );
            if self.demand[j] > self.eps {
                out.push((self.sink(), T::zero()));
            }
        }
    }

    /// Dense Dijkstra from the source; returns predecessor array when the
    /// sink is reachable.
    fn shortest_path(&mut self) -> Option<Vec<usize>> {
        let nodes = self.n + self.m + 2;
        let mut dist: Vec<Option<T>> = vec![None; nodes];
        let mut prev = vec![usize::MAX; nodes];
        let mut done = vec![false; nodes];
        let mut arcs = Vec::new();
        dist[self.source()] = Some(T::zero());
        loop {
            let mut pick: Option<(usize, T)> = None;
            for v in 0..nodes {
                if let (false, Some(d)) = (done[v], dist[v]) {
                    if pick.map_or(true, |(_, pd)| d < pd) {
                        pick = Some((v, d));
                    }
                }
            }
            let Some((u, du)) = pick else { break };
            done[u] = true;
            self.arcs(u, &mut arcs);
            for &(v, c) in &arcs {
                if done[v] {
                    continue;
                }
                let reduced = c + self.potential[u] - self.potential[v];
                let nd = du + reduced;
                if dist[v].map_or(true, |dv| nd < dv) {
                    dist[v] = Some(nd);
                    prev[v] = u;
                }
            }
        }
        dist[self.sink()]?;
        for (p, d) in self.potential.iter_mut().zip(&dist) {
            if let Some(d) = d {
                *p += *d;
            }
        }
        Some(prev)
    }

    fn augment(&mut self, prev: &[usize]) {
        let (n, m) = (self.n, self.m);
        let mut path = vec![self.sink()];
        while *path.last().unwrap() != self.source() {
            path.push(prev[*path.last().unwrap()]);
        }
        path.reverse();
        let first_row = path[1];
        let last_col = path[path.len() - 2] - n;
        let mut delta = self.supply[first_row].min_of(self.demand[last_col]);
        for w in path[1..path.len() - 1].windows(2) {
            if w[0] >= n {
                delta = delta.min_of(self.flow_at(w[1], w[0] - n));
            }
        }
        for w in path[1..path.len() - 1].windows(2) {
            if w[0] < n {
                self.flow[w[0] * m + (w[1] - n)] += delta;
            } else {
                let k = w[1] * m + (w[0] - n);
                self.flow[k] = if self.flow[k] == delta { T::zero() } else { self.flow[k] - delta };
            }
        }
        self.supply[first_row] -= delta;
        self.demand[last_col] -= delta;
    }
}

pub(super) fn transport<T: Scalar>(mu: &[T], nu: &[T], costs: &CostMatrix<T>) -> Result<Vec<(usize, usize, T)>> {
    let (n, m) = (mu.len(), nu.len());
    if n == 0 || m == 0 {
        return Err(Error::EmptyMeasure);
    }
    let total_mu = mu.iter().fold(T::zero(), |a, &b| a + b);
    let total_nu = nu.iter().fold(T::zero(), |a, &b| a + b);
    let imbalance = total_mu - total_nu;
    if imbalance.abs().to_f64_lossy() > BALANCE_TOLERANCE {
        return Err(Error::Unbalanced(imbalance.to_f64_lossy()));
    }
    let mut demand = nu.to_vec();
    let largest = (0..m).fold(0, |best, j| if demand[j] > demand[best] { j } else { best });
    demand[largest] += imbalance;

    let mut net = Network {
        costs,
        n,
        m,
        flow: vec![T::zero(); n * m],
        supply: mu.to_vec(),
        demand,
        potential: vec![T::zero(); n + m + 2],
        eps: T::weight_tolerance(),
    };
    let slack = net.eps * T::from_count(n + m);
    while net.supply.iter().any(|&a| a > net.eps) {
        match net.shortest_path() {
            Some(prev) => net.augment(&prev),
            None => {
                let left = net.supply.iter().fold(T::zero(), |a, &b| a + b.max_of(T::zero()));
                if left > slack {
                    return Err(Error::Infeasible);
                }
                break;
            }
        }
    }

    let mut flow = net.flow;
    cancel_support_cycles(&mut flow, n, m, costs);
    Ok((0..n)
        .flat_map(|i| (0..m).map(move |j| (i, j)))
        .filter_map(|(i, j)| {
            let f = flow[i * m + j];
            (f > T::zero()).then_some((i, j, f))
        })
        .collect())
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Push flow around support cycles until the support is a forest. Each push
/// goes in the cost-nonincreasing direction and empties at least one arc.
fn cancel_support_cycles<T: Scalar>(flow: &mut [T], n: usize, m: usize, costs: &CostMatrix<T>) {
    'restart: loop {
        let mut parent: Vec<usize> = (0..n + m).collect();
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n + m];
        for i in 0..n {
            for j in 0..m {
                if flow[i * m + j] <= T::zero() {
                    continue;
                }
                let (a, b) = (find(&mut parent, i), find(&mut parent, n + j));
                if a != b {
                    parent[a] = b;
                    adj[i].push(n + j);
                    adj[n + j].push(i);
                    continue;
                }
                // Tree path from column j back to row i closes a cycle with (i, j).
                let path = tree_path(&adj, n + j, i);
                let mut plus = vec![(i, j)];
                let mut minus = Vec::new();
                for (k, w) in path.windows(2).enumerate() {
                    let (r, c) = if w[0] < n { (w[0], w[1] - n) } else { (w[1], w[0] - n) };
                    if k % 2 == 0 {
                        minus.push((r, c));
                    } else {
                        plus.push((r, c));
                    }
                }
                let side_cost = |edges: &[(usize, usize)]| {
                    edges.iter().fold(T::zero(), |acc, &(r, c)| acc + costs.finite(r, c).expect("finite support"))
                };
                if side_cost(&plus) > side_cost(&minus) {
                    std::mem::swap(&mut plus, &mut minus);
                }
                let (zi, zj) = *minus
                    .iter()
                    .min_by(|a, b| flow[a.0 * m + a.1].partial_cmp(&flow[b.0 * m + b.1]).unwrap())
                    .expect("cycle has decreasing arcs");
                let theta = flow[zi * m + zj];
                for &(r, c) in &plus {
                    flow[r * m + c] += theta;
                }
                for &(r, c) in &minus {
                    let k = r * m + c;
                    flow[k] = if (r, c) == (zi, zj) { T::zero() } else { (flow[k] - theta).max_of(T::zero()) };
                }
                continue 'restart;
            }
        }
        return;
    }
}

fn tree_path(adj: &[Vec<usize>], from: usize, to: usize) -> Vec<usize> {
    let mut prev = vec![usize::MAX; adj.len()];
    let mut queue = VecDeque::from([from]);
    prev[from] = from;
    while let Some(u) = queue.pop_front() {
        if u == to {
            break;
        }
        for &v in &adj[u] {
            if prev[v] == usize::MAX {
                prev[v] = u;
                queue.push_back(v);
            }
        }
    }
    let mut path = vec![to];
    while *path.last().unwrap() != from {
        path.push(prev[*path.last().unwrap()]);
    }
    path.reverse();
    path
}
