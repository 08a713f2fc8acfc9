//! c-cyclical monotonicity certificates for finite supports.
//!
//! A support `Γ` is c-monotone when no permutation of the `y`-partners among
//! finitely many of its pairs lowers the total cost. Every permutation splits
//! into disjoint cycles, so it suffices to search for a single improving
//! cycle. That search is a negative-cycle problem on the *pair graph*: one
//! node per pair `p = (i, j)`, and an arc `p → q` of weight
//! `c(x_i, y_{j'}) − c(x_{i'}, y_{j'})` for `q = (i', j')` whenever
//! `c(x_i, y_{j'})` is finite. A cycle of weight `−δ` in this graph is a
//! cyclic reassignment that saves `δ`.

use crate::error::{Error, Result};
use crate::measures::CostMatrix;
use crate::scalar::Scalar;
use crate::solver::brute::next_permutation;

/// Largest support accepted by [`brute_check`].
pub const BRUTE_CHECK_LIMIT: usize = 7;

/// Distinct `(i, j)` index pairs into the `μ`/`ν` atom lists, in first-seen order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SupportSet {
    pairs: Vec<(usize, usize)>,
}

impl SupportSet {
    pub fn new(pairs: Vec<(usize, usize)>) -> Self {
        let mut out: Vec<(usize, usize)> = Vec::with_capacity(pairs.len());
        for p in pairs {
            if !out.contains(&p) {
                out.push(p);
            }
        }
        Self { pairs: out }
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Pairs whose own cost is `+∞`.
    pub fn infinite_pairs<T: Scalar>(&self, costs: &CostMatrix<T>) -> Result<Vec<(usize, usize)>> {
        let mut out = Vec::new();
        for &(i, j) in &self.pairs {
            if !costs.try_get(i, j)?.is_finite() {
                out.push((i, j));
            }
        }
        Ok(out)
    }

    fn finite_costs<T: Scalar>(&self, costs: &CostMatrix<T>) -> Result<Vec<T>> {
        self.pairs
            .iter()
            .map(|&(i, j)| costs.try_get(i, j)?.value().ok_or(Error::InfiniteOnSupport(i, j)))
            .collect()
    }
}

/// A cyclic reassignment within `Γ`: pair `cycle[t]` gives its `y` to
/// `cycle[t − 1]`, i.e. `x_{cycle[t]}` is re-paired with `y_{cycle[t + 1]}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ViolatingCycle<T> {
    /// Indices into the support's pair list, rotated so the smallest leads.
    pub cycle: Vec<usize>,
    /// `Σ c(xₜ, yₜ) − Σ c(xₜ, yₜ₊₁)`; strictly positive.
    pub improvement: T,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MonotonicityCertificate<T> {
    /// No cycle improves the cost by more than `tolerance`.
    Monotone { tolerance: T },
    Violated(ViolatingCycle<T>),
}

impl<T: Scalar> MonotonicityCertificate<T> {
    pub fn is_monotone(&self) -> bool {
        matches!(self, MonotonicityCertificate::Monotone { .. })
    }

    pub fn violation(&self) -> Option<&ViolatingCycle<T>> {
        match self {
            MonotonicityCertificate::Violated(c) => Some(c),
            MonotonicityCertificate::Monotone { .. } => None,
        }
    }
}

impl<T: Scalar> ViolatingCycle<T> {
    /// The cycle as a `NotMonotone` error.
    pub fn into_error(self) -> Error {
        Error::NotMonotone { cycle: self.cycle, improvement: self.improvement.to_f64_lossy() }
    }

    /// The `(i, j)` pairs along the cycle.
    pub fn pairs(&self, gamma: &SupportSet) -> Vec<(usize, usize)> {
        self.cycle.iter().map(|&k| gamma.pairs()[k]).collect()
    }
}

/// Cost saved by cyclically shifting the `y`-partners along `cycle`
/// (`x_t` receives `y_{t+1}`). Zero for a 1-cycle.
pub fn cycle_improvement<T: Scalar>(cycle: &[(usize, usize)], costs: &CostMatrix<T>) -> Result<T> {
    let k = cycle.len();
    let mut total = T::zero();
    for t in 0..k {
        let (i, j) = cycle[t];
        let (_, j_next) = cycle[(t + 1) % k];
        let diag = costs.try_get(i, j)?.value().ok_or(Error::InfiniteOnSupport(i, j))?;
        let shifted = costs.try_get(i, j_next)?.value().ok_or(Error::InfiniteOnSupport(i, j_next))?;
        total += diag - shifted;
    }
    Ok(total)
}

/// Dense pair-graph arc weights, `None` where the cross cost is `+∞`.
pub(crate) fn pair_graph<T: Scalar>(gamma: &SupportSet, costs: &CostMatrix<T>) -> Result<Vec<Option<T>>> {
    let own = gamma.finite_costs(costs)?;
    let k = gamma.len();
    let pairs = gamma.pairs();
    let mut w = vec![None; k * k];
    for p in 0..k {
        for q in 0..k {
            if p != q {
                let (i, _) = pairs[p];
                let (_, jq) = pairs[q];
                w[p * k + q] = costs.finite(i, jq).map(|c| c - own[q]);
            }
        }
    }
    Ok(w)
}

fn rotate_smallest_first(cycle: &mut [usize]) {
    if let Some(pos) = cycle.iter().enumerate().min_by_key(|&(_, v)| *v).map(|(i, _)| i) {
        cycle.rotate_left(pos);
    }
}

/// Bellman-Ford from a virtual source joined to every node, with every arc
/// weight raised by `slack`. Returns a cycle of the predecessor graph if the
/// `k`-th round still relaxes.
fn negative_cycle<T: Scalar>(w: &[Option<T>], k: usize, slack: T) -> Option<Vec<usize>> {
    let mut dist = vec![T::zero(); k];
    let mut pred = vec![usize::MAX; k];
    // Only nodes whose distance dropped since their last scan can relax anything.
    let mut active = vec![true; k];
    let mut last = None;
    for _ in 0..=k {
        last = None;
        for p in 0..k {
            if !std::mem::take(&mut active[p]) {
                continue;
            }
            let dp = dist[p] + slack;
            for (q, wpq) in w[p * k..(p + 1) * k].iter().enumerate() {
                if let Some(wpq) = *wpq {
                    let cand = dp + wpq;
                    if cand < dist[q] {
                        dist[q] = cand;
                        pred[q] = p;
                        active[q] = true;
                        last = Some(q);
                    }
                }
            }
        }
        last?;
    }
    let mut v = last?;
    for _ in 0..k {
        v = pred[v];
    }
    let start = v;
    let mut back = vec![start];
    let mut u = pred[start];
    while u != start {
        back.push(u);
        u = pred[u];
    }
    back.reverse();
    rotate_smallest_first(&mut back);
    Some(back)
}

/// Decide c-monotonicity of `Γ` up to `tol`.
///
/// A `Violated` answer is always sound: its cycle recomputes to an
/// improvement `> tol`. A `Monotone` answer rules out every cycle whose
/// improvement exceeds `tol · |cycle|`, and in particular every cycle found
/// by the first pass (per-arc slack `tol / |Γ|`).
pub fn check_c_monotone<T: Scalar>(
    gamma: &SupportSet,
    costs: &CostMatrix<T>,
    tol: T,
) -> Result<MonotonicityCertificate<T>> {
    if tol < T::zero() {
        return Err(Error::Invalid("tolerance must be nonnegative".into()));
    }
    let w = pair_graph(gamma, costs)?;
    let k = gamma.len();
    if k < 2 {
        return Ok(MonotonicityCertificate::Monotone { tolerance: tol });
    }
    // A larger slack only removes negative cycles, so the second pass is
    // needed only when the first one finds a cycle too shallow to report.
    let slacks = [tol / T::from_count(k), tol];
    for slack in slacks {
        let Some(cycle) = negative_cycle(&w, k, slack) else { break };
        let pairs: Vec<_> = cycle.iter().map(|&c| gamma.pairs()[c]).collect();
        let improvement = cycle_improvement(&pairs, costs)?;
        if improvement > tol {
            return Ok(MonotonicityCertificate::Violated(ViolatingCycle { cycle, improvement }));
        }
    }
    Ok(MonotonicityCertificate::Monotone { tolerance: tol })
}

/// Exhaustive check over every subset of `Γ` and every permutation of it.
/// Reports the single cycle with the largest improvement (first found on
/// ties), or `Monotone` when none exceeds `tol`.
pub fn brute_check<T: Scalar>(
    gamma: &SupportSet,
    costs: &CostMatrix<T>,
    tol: T,
    n_max: usize,
) -> Result<MonotonicityCertificate<T>> {
    let k = gamma.len();
    let limit = n_max.min(BRUTE_CHECK_LIMIT);
    if k > limit {
        return Err(Error::SizeExceeded { size: k, limit });
    }
    gamma.finite_costs(costs)?;
    let pairs = gamma.pairs();
    let mut best: Option<ViolatingCycle<T>> = None;
    for mask in 1u32..(1 << k) {
        let subset: Vec<usize> = (0..k).filter(|b| mask & (1 << b) != 0).collect();
        if subset.len() < 2 {
            continue;
        }
        let mut perm: Vec<usize> = (0..subset.len()).collect();
        while next_permutation(&mut perm) {
            // Evaluate each cycle of the permutation on its own.
            let mut seen = vec![false; perm.len()];
            for s in 0..perm.len() {
                if seen[s] || perm[s] == s {
                    continue;
                }
                let mut cycle = Vec::new();
                let mut t = s;
                while !seen[t] {
                    seen[t] = true;
                    cycle.push(subset[t]);
                    t = perm[t];
                }
                let cyc_pairs: Vec<_> = cycle.iter().map(|&c| pairs[c]).collect();
                let Ok(improvement) = cycle_improvement(&cyc_pairs, costs) else {
                    continue;
                };
                if improvement > tol && best.as_ref().map_or(true, |b| improvement > b.improvement) {
                    rotate_smallest_first(&mut cycle);
                    best = Some(ViolatingCycle { cycle, improvement });
                }
            }
        }
    }
    Ok(match best {
        Some(c) => MonotonicityCertificate::Violated(c),
        None => MonotonicityCertificate::Monotone { tolerance: tol },
    })
}
