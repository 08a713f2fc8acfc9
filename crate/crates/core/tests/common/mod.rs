//! Shared generators and independent oracles for the integration tests.
#![allow(dead_code)]

pub mod fixtures;

use std::collections::HashMap;

use otcert::{CostMatrix, ExtendedReal, Rational64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform_matrix<R: Rng>(rng: &mut R, n: usize, m: usize) -> CostMatrix<f64> {
    CostMatrix::from_finite((0..n).map(|_| (0..m).map(|_| rng.gen::<f64>()).collect()).collect()).unwrap()
}

/// Positive weights summing to 1 (up to rounding).
pub fn random_weights<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| 0.05 + rng.gen::<f64>()).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

/// Positive rational weights with a common denominator `d ≤ 8`.
pub fn rational_weights<R: Rng>(rng: &mut R, n: usize) -> Vec<Rational64> {
    assert!((1..=8).contains(&n));
    let d = rng.gen_range(n..=8);
    // A random composition of d into n positive parts.
    let mut cuts: Vec<usize> = (1..d).collect();
    for k in (1..cuts.len()).rev() {
        cuts.swap(k, rng.gen_range(0..=k));
    }
    let mut chosen: Vec<usize> = cuts[..n - 1].to_vec();
    chosen.sort_unstable();
    let mut parts = Vec::with_capacity(n);
    let mut prev = 0;
    for c in chosen.into_iter().chain(std::iter::once(d)) {
        parts.push(Rational64::new((c - prev) as i64, d as i64));
        prev = c;
    }
    parts
}

/// Small integer costs as exact rationals.
pub fn integer_matrix<R: Rng>(rng: &mut R, n: usize, m: usize, max: i64) -> CostMatrix<Rational64> {
    CostMatrix::from_finite(
        (0..n).map(|_| (0..m).map(|_| Rational64::from_integer(rng.gen_range(0..=max))).collect()).collect(),
    )
    .unwrap()
}

pub fn to_f64_matrix(c: &CostMatrix<Rational64>) -> CostMatrix<f64> {
    CostMatrix::from_rows(
        c.rows()
            .map(|r| {
                r.iter()
                    .map(|v| match v {
                        ExtendedReal::Finite(x) => ExtendedReal::Finite(*x.numer() as f64 / *x.denom() as f64),
                        ExtendedReal::PositiveInfinity => ExtendedReal::PositiveInfinity,
                    })
                    .collect()
            })
            .collect(),
    )
    .unwrap()
}

/// Minimum cost over the vertices of the transport polytope `Π(a, b)`.
///
/// Every vertex has a forest support, so it has a leaf row or column whose
/// single cell carries `min(aᵢ, bⱼ)`. Peeling leaves in every possible order
/// therefore reaches every vertex; memoizing on the remaining marginals keeps
/// the search small.
pub fn vertex_min_cost(a: &[Rational64], b: &[Rational64], c: &CostMatrix<Rational64>) -> Option<Rational64> {
    type Key = (Vec<Rational64>, Vec<Rational64>);
    fn go(a: &mut Vec<Rational64>, b: &mut Vec<Rational64>, c: &CostMatrix<Rational64>, memo: &mut HashMap<Key, Option<Rational64>>) -> Option<Rational64> {
        let zero = Rational64::from_integer(0);
        if a.iter().all(|x| *x == zero) {
            return Some(zero);
        }
        let key = (a.clone(), b.clone());
        if let Some(v) = memo.get(&key) {
            return *v;
        }
        let mut best: Option<Rational64> = None;
        for i in 0..a.len() {
            for j in 0..b.len() {
                if a[i] == zero || b[j] == zero {
                    continue;
                }
                let Some(cij) = c.finite(i, j) else { continue };
                let x = a[i].min(b[j]);
                a[i] -= x;
                b[j] -= x;
                if let Some(rest) = go(a, b, c, memo) {
                    let v = rest + cij * x;
                    if best.map_or(true, |bv| v < bv) {
                        best = Some(v);
                    }
                }
                a[i] += x;
                b[j] += x;
            }
        }
        memo.insert(key, best);
        best
    }
    go(&mut a.to_vec(), &mut b.to_vec(), c, &mut HashMap::new())
}

/// Every permutation of `0..n`, in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for k in 0..used.len() {
            if !used[k] {
                used[k] = true;
                prefix.push(k);
                rec(prefix, used, out);
                prefix.pop();
                used[k] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// `Σᵢ c(i, σ(i)) / n`, or `None` if σ hits an infinite entry.
pub fn permutation_cost(c: &CostMatrix<f64>, sigma: &[usize]) -> Option<f64> {
    let mut s = 0.0;
    for (i, &j) in sigma.iter().enumerate() {
        s += c.finite(i, j)?;
    }
    Some(s / sigma.len() as f64)
}
