//! Exact solvers for finite Monge-Kantorovich problems.
//!
//! * [`solve_assignment`]: uniform `n × n` problems (permutation plans), Hungarian method.
//! * [`solve_general`]: arbitrary weights, successive shortest paths on the
//!   bipartite transport network followed by reduction to a basic (forest) solution.
//! * [`brute_force_optimal`]: permutation enumeration, used as an oracle.
//!
//! Forbidden (`+∞`) pairs are absent from every network; no big-M costs are used.

pub(crate) mod brute;
mod flow;
mod hungarian;

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::measures::{cost_matrix, plan_cost, CostMatrix, CostSpec, DiscreteMeasure, ExtendedReal};
use crate::monotonicity::SupportSet;
use crate::scalar::Scalar;

pub use brute::{brute_force_optimal, BRUTE_FORCE_LIMIT};

/// Sparse coupling between `n_rows` source atoms and `n_cols` target atoms.
/// Entries are sorted by `(i, j)`, distinct and carry positive mass.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportPlan<T> {
    entries: Vec<(usize, usize, T)>,
    n_rows: usize,
    n_cols: usize,
}

impl<T: Scalar> TransportPlan<T> {
    /// Build a plan; zero-mass entries are dropped and repeated `(i, j)`
    /// entries are merged.
    pub fn new(entries: Vec<(usize, usize, T)>, n_rows: usize, n_cols: usize) -> Result<Self> {
        let mut merged: BTreeMap<(usize, usize), T> = BTreeMap::new();
        for (i, j, mass) in entries {
            if i >= n_rows || j >= n_cols {
                return Err(Error::IndexOutOfRange(i, j, n_rows, n_cols));
            }
            if !mass.is_finite_value() || mass < T::zero() {
                return Err(Error::InvalidWeight(mass.to_f64_lossy()));
            }
            *merged.entry((i, j)).or_insert_with(T::zero) += mass;
        }
        let entries = merged
            .into_iter()
            .filter(|(_, m)| !m.is_zero())
            .map(|((i, j), m)| (i, j, m))
            .collect();
        Ok(Self { entries, n_rows, n_cols })
    }

    /// `(1/n) Σ δ_{(i, σ(i))}`.
    pub fn permutation(sigma: &[usize]) -> Result<Self> {
        let n = sigma.len();
        let mass = T::one() / T::from_count(n);
        Self::new(sigma.iter().enumerate().map(|(i, &j)| (i, j, mass)).collect(), n, n)
    }

    /// The product coupling `μ ⊗ ν`.
    pub fn product(mu: &[T], nu: &[T]) -> Result<Self> {
        let entries = mu
            .iter()
            .enumerate()
            .flat_map(|(i, &a)| nu.iter().enumerate().map(move |(j, &b)| (i, j, a * b)))
            .collect();
        Self::new(entries, mu.len(), nu.len())
    }

    pub fn entries(&self) -> &[(usize, usize, T)] {
        &self.entries
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    /// `Γ(π)`: the pairs carrying positive mass.
    pub fn support(&self) -> SupportSet {
        SupportSet::new(self.entries.iter().map(|&(i, j, _)| (i, j)).collect())
    }

    pub fn row_sums(&self) -> Vec<T> {
        let mut sums = vec![T::zero(); self.n_rows];
        for &(i, _, m) in &self.entries {
            sums[i] += m;
        }
        sums
    }

    pub fn col_sums(&self) -> Vec<T> {
        let mut sums = vec![T::zero(); self.n_cols];
        for &(_, j, m) in &self.entries {
            sums[j] += m;
        }
        sums
    }

    /// Largest absolute deviation of the plan's marginals from `mu`, `nu`.
    pub fn marginal_error(&self, mu: &[T], nu: &[T]) -> Result<T> {
        if mu.len() != self.n_rows || nu.len() != self.n_cols {
            return Err(Error::Invalid(format!(
                "plan is {}x{}, marginals have lengths {} and {}",
                self.n_rows,
                self.n_cols,
                mu.len(),
                nu.len()
            )));
        }
        let rows = self.row_sums().into_iter().zip(mu).map(|(a, &b)| (a - b).abs());
        let cols = self.col_sums().into_iter().zip(nu).map(|(a, &b)| (a - b).abs());
        Ok(rows.chain(cols).fold(T::zero(), T::max_of))
    }

    /// `α·self + (1 − α)·other` for plans of equal shape.
    pub fn mix(&self, alpha: T, other: &Self) -> Result<Self> {
        if self.n_rows != other.n_rows || self.n_cols != other.n_cols {
            return Err(Error::Invalid("plans of different shape".into()));
        }
        let beta = T::one() - alpha;
        let entries = self
            .entries
            .iter()
            .map(|&(i, j, m)| (i, j, alpha * m))
            .chain(other.entries.iter().map(|&(i, j, m)| (i, j, beta * m)))
            .collect();
        Self::new(entries, self.n_rows, self.n_cols)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Hungarian,
    Flow,
    Brute,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Hungarian => "hungarian",
            Method::Flow => "flow",
            Method::Brute => "brute",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult<T> {
    pub plan: TransportPlan<T>,
    /// `I(π)` of `plan`.
    pub cost: ExtendedReal<T>,
    pub method: Method,
}

/// Plan-integrated cost of the uniform permutation plan: `Σᵢ c(i, σ(i)) / n`,
/// summed in row order.
fn permutation_cost<T: Scalar>(costs: &CostMatrix<T>, sigma: &[usize]) -> Option<T> {
    let mut sum = T::zero();
    for (i, &j) in sigma.iter().enumerate() {
        sum += costs.finite(i, j)?;
    }
    Some(sum / T::from_count(sigma.len()))
}

/// Optimal permutation plan for a square cost matrix; `+∞` entries are
/// forbidden edges.
pub fn solve_assignment<T: Scalar>(costs: &CostMatrix<T>) -> Result<SolveResult<T>> {
    if !costs.is_square() {
        return Err(Error::NotSquare(costs.n_rows(), costs.n_cols()));
    }
    if costs.n_rows() == 0 {
        return Err(Error::EmptyMeasure);
    }
    let sigma = hungarian::assign(costs)?;
    let cost = permutation_cost(costs, &sigma).ok_or(Error::Infeasible)?;
    Ok(SolveResult {
        plan: TransportPlan::permutation(&sigma)?,
        cost: ExtendedReal::Finite(cost),
        method: Method::Hungarian,
    })
}

/// Optimal coupling of two discrete measures for a materialized cost matrix.
/// The returned plan is a basic solution: its support is a forest with at
/// most `n + m − 1` atoms.
pub fn solve_transport<T: Scalar>(mu: &[T], nu: &[T], costs: &CostMatrix<T>) -> Result<SolveResult<T>> {
    if mu.len() != costs.n_rows() || nu.len() != costs.n_cols() {
        return Err(Error::Invalid(format!(
            "cost matrix is {}x{}, marginals have lengths {} and {}",
            costs.n_rows(),
            costs.n_cols(),
            mu.len(),
            nu.len()
        )));
    }
    let entries = flow::transport(mu, nu, costs)?;
    let plan = TransportPlan::new(entries, mu.len(), nu.len())?;
    let cost = plan_cost(&plan, costs)?;
    Ok(SolveResult { plan, cost, method: Method::Flow })
}

/// Solve the Monge-Kantorovich problem `(μ, ν, c)`.
pub fn solve_general<T: Scalar>(
    mu: &DiscreteMeasure<T>,
    nu: &DiscreteMeasure<T>,
    spec: &CostSpec<T>,
) -> Result<SolveResult<T>> {
    let costs = cost_matrix(spec, mu, nu)?;
    solve_transport(mu.weights(), nu.weights(), &costs)
}
