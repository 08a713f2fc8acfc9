//! The cyclic-grid torus instance: diagonal cost 1, shift-by-one cost 2,
//! everything else forbidden.
//!
//! On `N` grid points the diagonal `Γ₁` is strongly c-monotone (and optimal),
//! while the shift support `Γ₂` survives every cycle shorter than `N` and
//! fails exactly at the full period, improving by `N · (2 − 1)`. As `N` grows
//! the violating cycle gets longer and longer; in the irrational-rotation
//! limit it disappears and `Γ₂` becomes c-monotone without being optimal.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::measures::{cost_matrix, plan_cost, CostMatrix, CostSpec, DiscreteMeasure, ExtendedReal};
use crate::monotonicity::{check_c_monotone, MonotonicityCertificate, SupportSet};
use crate::potentials::{build_potentials, dual_value, verify_feasibility, PotentialPair, PotentialValue};
use crate::scalar::Scalar;
use crate::solver::TransportPlan;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    /// `Γ₁ = {(x, x)}`.
    Gamma1,
    /// `Γ₂ = {(x, x + 1)}`.
    Gamma2,
}

impl FromStr for Which {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gamma1" => Ok(Which::Gamma1),
            "gamma2" => Ok(Which::Gamma2),
            other => Err(Error::Parse(format!("expected gamma1 or gamma2, got {other:?}"))),
        }
    }
}

impl fmt::Display for Which {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Which::Gamma1 => "gamma1",
            Which::Gamma2 => "gamma2",
        })
    }
}

#[derive(Debug, Clone)]
pub struct TorusInstance<T> {
    pub size: usize,
    pub cost: CostSpec<T>,
    pub measure: DiscreteMeasure<T>,
    pub costs: CostMatrix<T>,
    pub gamma1: SupportSet,
    pub gamma2: SupportSet,
}

impl<T: Scalar> TorusInstance<T> {
    pub fn new(size: usize) -> Result<Self> {
        if size < 2 {
            return Err(Error::Invalid(format!("torus grid needs N >= 2, got {size}")));
        }
        let cost = CostSpec::torus(size, 1, T::one(), T::one() + T::one(), ExtendedReal::PositiveInfinity);
        let measure = DiscreteMeasure::torus_grid(size)?;
        let costs = cost_matrix(&cost, &measure, &measure)?;
        Ok(Self {
            size,
            cost,
            measure,
            costs,
            gamma1: SupportSet::new((0..size).map(|k| (k, k)).collect()),
            gamma2: SupportSet::new((0..size).map(|k| (k, (k + 1) % size)).collect()),
        })
    }

    pub fn support(&self, which: Which) -> &SupportSet {
        match which {
            Which::Gamma1 => &self.gamma1,
            Which::Gamma2 => &self.gamma2,
        }
    }

    /// Uniform plan `(1/N) Σ δ_p` over the chosen support.
    pub fn plan(&self, which: Which) -> Result<TransportPlan<T>> {
        let mass = T::one() / T::from_count(self.size);
        let entries = self.support(which).pairs().iter().map(|&(i, j)| (i, j, mass)).collect();
        TransportPlan::new(entries, self.size, self.size)
    }
}

/// What the torus demo reports for one support.
#[derive(Debug, Clone)]
pub struct TorusReport<T> {
    pub size: usize,
    pub which: Which,
    pub plan_cost: ExtendedReal<T>,
    pub certificate: MonotonicityCertificate<T>,
    /// Present only when the support admits potentials.
    pub potentials: Option<PotentialPair<T>>,
    pub dual_value: Option<PotentialValue<T>>,
    pub feasible: Option<bool>,
}

pub fn analyze<T: Scalar>(size: usize, which: Which, tol: T) -> Result<TorusReport<T>> {
    let inst = TorusInstance::<T>::new(size)?;
    let gamma = inst.support(which);
    let plan_cost = plan_cost(&inst.plan(which)?, &inst.costs)?;
    let certificate = check_c_monotone(gamma, &inst.costs, tol)?;
    let (potentials, dual, feasible) = match build_potentials(gamma, &inst.costs, 0) {
        Ok(pp) => {
            let w = inst.measure.weights();
            let dual = dual_value(&pp, w, w)?;
            let feasible = verify_feasibility(&pp, &inst.costs, tol)?.passed;
            (Some(pp), Some(dual), Some(feasible))
        }
        Err(Error::NotMonotone { .. }) => (None, None, None),
        Err(e) => return Err(e),
    };
    Ok(TorusReport { size, which, plan_cost, certificate, potentials, dual_value: dual, feasible })
}
