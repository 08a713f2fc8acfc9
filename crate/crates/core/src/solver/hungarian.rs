//! Shortest-augmenting-path Hungarian method with row/column potentials.
//! Forbidden entries never enter the reduced-cost scan, so an exhausted
//! alternating tree means no perfect matching avoids them.

use crate::error::{Error, Result};
use crate::measures::CostMatrix;
use crate::scalar::Scalar;

const NONE: usize = usize::MAX;

/// Returns `sigma` with `sigma[i]` the column matched to row `i`.
pub(super) fn assign<T: Scalar>(costs: &CostMatrix<T>) -> Result<Vec<usize>> {
    let n = costs.n_rows();
    // 1-based columns; column 0 is the virtual root of each alternating tree.
    let mut u = vec![T::zero(); n + 1];
    let mut v = vec![T::zero(); n + 1];
    let mut matched_row = vec![NONE; n + 1];
    let mut way = vec![0usize; n + 1];
    let mut row_done = vec![false; n];

    // Column then row reduction gives feasible duals; rows whose reduced
    // minimum sits in a still-free column are matched there up front.
    for j in 1..=n {
        let mut best: Option<T> = None;
        for i in 0..n {
            if let Some(c) = costs.finite(i, j - 1) {
                best = Some(best.map_or(c, |b| b.min_of(c)));
            }
        }
        v[j] = best.ok_or(Error::Infeasible)?;
    }
    for i in 0..n {
        let mut best: Option<(T, usize)> = None;
        for (j, c) in costs.row(i).iter().enumerate() {
            if let Some(c) = c.value() {
                let r = c - v[j + 1];
                if best.map_or(true, |(b, _)| r < b) {
                    best = Some((r, j + 1));
                }
            }
        }
        let (r, j) = best.ok_or(Error::Infeasible)?;
        u[i + 1] = r;
        if matched_row[j] == NONE {
            matched_row[j] = i;
            row_done[i] = true;
        }
    }

    // Per-row scratch. Reductions are applied lazily: `total` accumulates the
    // step sizes, `minv` stores slack + total, and a column used at total `t`
    // owes `total - t` to its potentials when the row finishes.
    let mut minv: Vec<Option<T>> = vec![None; n + 1];
    let mut used_at: Vec<Option<T>> = vec![None; n + 1];
    let mut used_cols: Vec<usize> = Vec::with_capacity(n + 1);
    let mut free: Vec<usize> = Vec::with_capacity(n);

    for row in (0..n).filter(|&i| !row_done[i]) {
        matched_row[0] = row;
        let mut j0 = 0usize;
        minv.iter_mut().for_each(|m| *m = None);
        used_at.iter_mut().for_each(|m| *m = None);
        used_cols.clear();
        free.clear();
        free.extend(1..=n);
        let mut total = T::zero();
        loop {
            used_at[j0] = Some(total);
            used_cols.push(j0);
            if let Some(pos) = free.iter().position(|&j| j == j0) {
                free.swap_remove(pos);
            }
            let i0 = matched_row[j0];
            let row_costs = costs.row(i0);
            let base = total - u[i0 + 1];
            let mut best: Option<T> = None;
            let mut j1 = NONE;
            for &j in &free {
                if let Some(c) = row_costs[j - 1].value() {
                    let cur = c + base - v[j];
                    if minv[j].map_or(true, |m| cur < m) {
                        minv[j] = Some(cur);
                        way[j] = j0;
                    }
                }
                if let Some(m) = minv[j] {
                    if best.map_or(true, |b| m < b || (m == b && j < j1)) {
                        best = Some(m);
                        j1 = j;
                    }
                }
            }
            total = best.ok_or(Error::Infeasible)?;
            j0 = j1;
            if matched_row[j0] == NONE {
                break;
            }
        }
        for &j in &used_cols {
            let owed = total - used_at[j].expect("used column has a stamp");
            u[matched_row[j] + 1] += owed;
            v[j] -= owed;
        }
        loop {
            let j1 = way[j0];
            matched_row[j0] = matched_row[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut sigma = vec![NONE; n];
    for j in 1..=n {
        sigma[matched_row[j]] = j - 1;
    }
    Ok(sigma)
}
