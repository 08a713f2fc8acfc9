//! # otcert
//!
//! Exact discrete optimal transport with optimality certificates.
//!
//! Solving a finite Monge-Kantorovich problem is only half the job; this
//! crate also *certifies* the answer:
//!
//! | Step | Function |
//! |------|----------|
//! | Materialize `c` on the supports | [`cost_matrix`] |
//! | Solve (assignment / general coupling) | [`solve_assignment`], [`solve_general`] |
//! | Check c-cyclical monotonicity, with a violating cycle as counterexample | [`check_c_monotone`] |
//! | Build dual potentials with equality on the support | [`build_potentials`] |
//! | Verify `φ ⊕ ψ ≤ c` and compare `J(φ, ψ)` with `I(π)` | [`verify_feasibility`], [`dual_value`] |
//! | Empirical approximation experiments | [`approximation::run_approximation`] |
//!
//! All numerics are generic over [`Scalar`]: `f64`, `f32` or exact
//! [`Rational64`]. The aliases below fix the common choices.
//!
//! ```
//! use otcert::{build_potentials, check_c_monotone, dual_value, solve_general, CostSpec, Measure, Point};
//!
//! let pts = |xs: &[f64]| xs.iter().map(|&x| Point::scalar(x).unwrap()).collect::<Vec<_>>();
//! let mu = Measure::uniform(pts(&[0.0, 1.0])).unwrap();
//! let nu = Measure::uniform(pts(&[0.25, 2.0])).unwrap();
//! let spec = CostSpec::SquaredEuclidean;
//!
//! let result = solve_general(&mu, &nu, &spec).unwrap();
//! assert_eq!(result.cost.value(), Some(0.53125));
//!
//! let costs = otcert::cost_matrix(&spec, &mu, &nu).unwrap();
//! let gamma = result.plan.support();
//! assert!(check_c_monotone(&gamma, &costs, 1e-9).unwrap().is_monotone());
//! let pair = build_potentials(&gamma, &costs, 0).unwrap();
//! let dual = dual_value(&pair, mu.weights(), nu.weights()).unwrap().value().unwrap();
//! assert!((dual - 0.53125).abs() < 1e-12);
//! ```

pub mod approximation;
pub mod cli;
mod error;
pub mod formats;
pub mod measures;
pub mod monotonicity;
pub mod potentials;
mod scalar;
pub mod solver;
pub mod torus;

pub use num_rational::Rational64;

pub use error::{Error, Result};
pub use measures::{cost_matrix, eval_cost, plan_cost, CostMatrix, CostSpec, DiscreteMeasure, ExtendedReal, Point, Site};
pub use monotonicity::{
    brute_check, check_c_monotone, cycle_improvement, MonotonicityCertificate, SupportSet, ViolatingCycle,
};
pub use potentials::{
    build_potentials, c_transform, dual_value, superdifferential_contains, verify_feasibility, Direction,
    FeasibilityReport, PotentialPair, PotentialValue,
};
pub use scalar::Scalar;
pub use solver::{brute_force_optimal, solve_assignment, solve_general, solve_transport, Method, SolveResult, TransportPlan};

/// Cost value in `f64`.
pub type Cost = ExtendedReal<f64>;
pub type Costs = CostMatrix<f64>;
pub type Measure = DiscreteMeasure<f64>;
pub type Plan = TransportPlan<f64>;
pub type Potentials = PotentialPair<f64>;
pub type Certificate = MonotonicityCertificate<f64>;

/// Exact-arithmetic counterparts.
pub type ExactCosts = CostMatrix<Rational64>;
pub type ExactMeasure = DiscreteMeasure<Rational64>;
pub type ExactPlan = TransportPlan<Rational64>;
pub type ExactPotentials = PotentialPair<Rational64>;

/// Default tolerance for certificates and feasibility checks.
pub const DEFAULT_TOL: f64 = 1e-9;
