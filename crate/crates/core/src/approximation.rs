//! Empirical approximation of a transport problem.
//!
//! Draw `n` samples from each marginal, solve the induced `n × n` assignment
//! problem and watch `I(πₙ)` settle as `n` grows. Every `πₙ` is also
//! certified: its support is checked for c-cyclical monotonicity and a dual
//! pair is built on it, whose value gives the reported duality gap.
//!
//! Sampling uses `ChaCha8Rng::seed_from_u64`; uniform draws are
//! `lo + (hi − lo) · u` with `u` the `rand` standard `f64` in `[0, 1)`. Row
//! `n` of a schedule seeded with `s` draws all `μ` samples, then all `ν`
//! samples, from one generator seeded with `s + n`.

use std::time::Instant;

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{cost_matrix, CostSpec, DiscreteMeasure, Point};
use crate::monotonicity::check_c_monotone;
use crate::potentials::{build_potentials, dual_value, PotentialValue};
use crate::scalar::Scalar;
use crate::solver::solve_assignment;

/// Number of midpoint-rule nodes used by [`reference_cost_1d`].
pub const REFERENCE_NODES: usize = 1_000_000;

/// Tolerance used to certify each `πₙ`.
pub const CERTIFY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum DistributionSpec {
    /// Uniform on `[lo, hi)^dim`.
    Uniform { lo: f64, hi: f64, dim: usize },
    /// Draws atoms of a fixed discrete measure.
    PointCloud(DiscreteMeasure<f64>),
    /// Uniform on the `N` grid points `k / N` of the circle.
    GridTorus(usize),
}

impl DistributionSpec {
    pub fn uniform(lo: f64, hi: f64) -> Self {
        DistributionSpec::Uniform { lo, hi, dim: 1 }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            DistributionSpec::Uniform { lo, hi, dim } => {
                if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                    return Err(Error::Invalid(format!("uniform bounds need lo < hi, got [{lo}, {hi})")));
                }
                if dim == 0 {
                    return Err(Error::Invalid("uniform dimension must be at least 1".into()));
                }
                Ok(())
            }
            DistributionSpec::GridTorus(0) => Err(Error::Invalid("torus grid needs at least one point".into())),
            _ => Ok(()),
        }
    }

    fn draw<R: Rng>(&self, rng: &mut R, n: usize) -> Result<Vec<Point<f64>>> {
        self.validate()?;
        match self {
            DistributionSpec::Uniform { lo, hi, dim } => (0..n)
                .map(|_| Point::new((0..*dim).map(|_| lo + (hi - lo) * rng.gen::<f64>()).collect()))
                .collect(),
            DistributionSpec::PointCloud(m) => {
                let index = WeightedIndex::new(m.weights()).map_err(|e| Error::Invalid(e.to_string()))?;
                Ok((0..n).map(|_| m.points()[index.sample(rng)].clone()).collect())
            }
            DistributionSpec::GridTorus(size) => (0..n)
                .map(|_| Point::torus(rng.gen_range(0..*size) as f64 / *size as f64))
                .collect(),
        }
    }

    /// Quantile function of a 1-D spec.
    fn quantile_1d(&self) -> Result<Box<dyn Fn(f64) -> f64 + '_>> {
        self.validate()?;
        match self {
            DistributionSpec::Uniform { lo, hi, dim: 1 } => Ok(Box::new(move |t| lo + t * (hi - lo))),
            DistributionSpec::PointCloud(m) if m.dim() == 1 => {
                let mut atoms: Vec<(f64, f64)> = m.points().iter().map(|p| p.coords()[0]).zip(m.weights().iter().copied()).collect();
                atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
                let mut cum = 0.0;
                let table: Vec<(f64, f64)> = atoms
                    .into_iter()
                    .map(|(x, w)| {
                        cum += w;
                        (cum, x)
                    })
                    .collect();
                Ok(Box::new(move |t| {
                    let k = table.partition_point(|&(c, _)| c < t);
                    table[k.min(table.len() - 1)].1
                }))
            }
            _ => Err(Error::Invalid("reference cost needs a one-dimensional uniform or point-cloud spec".into())),
        }
    }
}

/// `n` i.i.d. draws with weights `1/n`.
pub fn sample_empirical<T: Scalar>(dist: &DistributionSpec, n: usize, seed: u64) -> Result<DiscreteMeasure<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    to_measure(dist.draw(&mut rng, n)?)
}

fn to_measure<T: Scalar>(points: Vec<Point<f64>>) -> Result<DiscreteMeasure<T>> {
    if points.is_empty() {
        return Err(Error::EmptyMeasure);
    }
    let points = points
        .into_iter()
        .map(|p| Point::new(p.coords().iter().map(|&c| T::from_f64_lossy(c)).collect()))
        .collect::<Result<Vec<_>>>()?;
    DiscreteMeasure::uniform(points)
}

/// Optimal cost between two 1-D laws under a convex cost of `x − y`, via the
/// monotone (quantile) coupling: `∫₀¹ h(F_μ⁻¹(t) − F_ν⁻¹(t)) dt` by the
/// midpoint rule on [`REFERENCE_NODES`] nodes.
pub fn reference_cost_1d(mu: &DistributionSpec, nu: &DistributionSpec, spec: &CostSpec<f64>) -> Result<f64> {
    let h: fn(f64) -> f64 = match spec {
        CostSpec::SquaredEuclidean => |d| d * d,
        CostSpec::PNorm(_) => f64::abs,
        _ => return Err(Error::UnsupportedArgument("a squared-Euclidean or p-norm cost")),
    };
    let (qm, qn) = (mu.quantile_1d()?, nu.quantile_1d()?);
    let n = REFERENCE_NODES as f64;
    let sum: f64 = (0..REFERENCE_NODES)
        .map(|k| {
            let t = (k as f64 + 0.5) / n;
            h(qm(t) - qn(t))
        })
        .sum();
    Ok(sum / n)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n: usize,
    /// `I(πₙ)`.
    pub cost: f64,
    /// `I(πₙ) − J(φₙ, ψₙ)` for the potentials built on `supp πₙ`.
    pub dual_gap: f64,
    pub wall_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
    pub reference: Option<f64>,
    pub seed: u64,
}

impl ConvergenceReport {
    pub fn last(&self) -> Option<&ConvergenceRow> {
        self.rows.last()
    }
}

fn run_row(mu: &DistributionSpec, nu: &DistributionSpec, spec: &CostSpec<f64>, n: usize, seed: u64) -> Result<ConvergenceRow> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(n as u64));
    let mu_n: DiscreteMeasure<f64> = to_measure(mu.draw(&mut rng, n)?)?;
    let nu_n: DiscreteMeasure<f64> = to_measure(nu.draw(&mut rng, n)?)?;
    let costs = cost_matrix(spec, &mu_n, &nu_n)?;
    let result = solve_assignment(&costs)?;
    let cost = result.cost.value().ok_or(Error::Infeasible)?;
    let gamma = result.plan.support();
    if let Some(v) = check_c_monotone(&gamma, &costs, CERTIFY_TOL)?.violation() {
        return Err(v.clone().into_error());
    }
    let pp = build_potentials(&gamma, &costs, 0)?;
    let dual = match dual_value(&pp, mu_n.weights(), nu_n.weights())? {
        PotentialValue::Finite(v) => v,
        PotentialValue::NegativeInfinity => f64::NEG_INFINITY,
    };
    Ok(ConvergenceRow {
        n,
        cost,
        dual_gap: cost - dual,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// Solve the empirical problems for every sample size in `schedule`. Rows run
/// in parallel; the report lists them in schedule order. A row whose support
/// fails the monotonicity check aborts the run with [`Error::NotMonotone`].
pub fn run_approximation(
    mu: &DistributionSpec,
    nu: &DistributionSpec,
    spec: &CostSpec<f64>,
    schedule: &[usize],
    seed: u64,
) -> Result<ConvergenceReport> {
    if schedule.is_empty() || schedule[0] == 0 || schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Invalid("schedule must be a nonempty increasing list of positive sizes".into()));
    }
    if !spec.is_analytic() {
        return Err(Error::UnsupportedArgument("a continuous cost (sqeuclidean or pnorm)"));
    }
    spec.validate()?;
    let rows = schedule
        .par_iter()
        .map(|&n| run_row(mu, nu, spec, n, seed))
        .collect::<Result<Vec<_>>>()?;
    let reference = reference_cost_1d(mu, nu, spec).ok();
    Ok(ConvergenceReport { rows, reference, seed })
}
