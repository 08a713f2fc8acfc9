use crate::error::{Error, Result};
use crate::measures::{CostMatrix, ExtendedReal};
use crate::scalar::Scalar;

use super::{permutation_cost, Method, SolveResult, TransportPlan};

/// Largest `n` accepted by [`brute_force_optimal`].
pub const BRUTE_FORCE_LIMIT: usize = 9;

/// Advance to the next permutation in lexicographic order.
pub(crate) fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).expect("successor exists");
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Minimum over all `n!` permutation plans. Ties go to the lexicographically
/// smallest permutation.
pub fn brute_force_optimal<T: Scalar>(costs: &CostMatrix<T>, n_max: usize) -> Result<SolveResult<T>> {
    if !costs.is_square() {
        return Err(Error::NotSquare(costs.n_rows(), costs.n_cols()));
    }
    let n = costs.n_rows();
    let limit = n_max.min(BRUTE_FORCE_LIMIT);
    if n > limit {
        return Err(Error::SizeExceeded { size: n, limit });
    }
    if n == 0 {
        return Err(Error::EmptyMeasure);
    }
    let mut sigma: Vec<usize> = (0..n).collect();
    let mut best: Option<(T, Vec<usize>)> = None;
    loop {
        if let Some(c) = permutation_cost(costs, &sigma) {
            if best.as_ref().map_or(true, |(b, _)| c < *b) {
                best = Some((c, sigma.clone()));
            }
        }
        if !next_permutation(&mut sigma) {
            break;
        }
    }
    let (cost, sigma) = best.ok_or(Error::Infeasible)?;
    Ok(SolveResult {
        plan: TransportPlan::permutation(&sigma)?,
        cost: ExtendedReal::Finite(cost),
        method: Method::Brute,
    })
}
