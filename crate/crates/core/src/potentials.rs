//! Dual potential pairs `(φ, ψ)` with `φ(x) + ψ(y) ≤ c(x, y)`.
//!
//! [`build_potentials`] is the finite shortest-chain construction: on a
//! c-monotone support the pair graph has no negative cycle, so chain
//! distances to a root pair define `φ` with `Γ ⊂ ∂_cφ`, and `ψ = φ^c` closes
//! the pair with equality on `Γ`.

use std::ops::Add;

use crate::error::{Error, Result};
use crate::measures::CostMatrix;
use crate::monotonicity::{check_c_monotone, pair_graph, MonotonicityCertificate, SupportSet};
use crate::scalar::Scalar;

/// A potential value in `ℝ ∪ {−∞}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PotentialValue<T> {
    Finite(T),
    NegativeInfinity,
}

impl<T: Scalar> PotentialValue<T> {
    pub fn value(&self) -> Option<T> {
        match *self {
            PotentialValue::Finite(v) => Some(v),
            PotentialValue::NegativeInfinity => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, PotentialValue::Finite(_))
    }

    pub fn shifted(self, r: T) -> Self {
        match self {
            PotentialValue::Finite(v) => PotentialValue::Finite(v + r),
            PotentialValue::NegativeInfinity => PotentialValue::NegativeInfinity,
        }
    }

    pub fn to_f64(self) -> f64 {
        match self {
            PotentialValue::Finite(v) => v.to_f64_lossy(),
            PotentialValue::NegativeInfinity => f64::NEG_INFINITY,
        }
    }
}

impl<T: Scalar> Add for PotentialValue<T> {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        match (self, rhs) {
            (PotentialValue::Finite(a), PotentialValue::Finite(b)) => PotentialValue::Finite(a + b),
            _ => PotentialValue::NegativeInfinity,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `ψ(y) = min_x c(x, y) − φ(x)`.
    XToY,
    /// `φ(x) = min_y c(x, y) − ψ(y)`.
    YToX,
}

/// A candidate dual pair with the pairs on which equality is claimed.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialPair<T> {
    pub phi: Vec<PotentialValue<T>>,
    pub psi: Vec<PotentialValue<T>>,
    pub contact: SupportSet,
    /// Slack used when the pair was constructed.
    pub tol: T,
}

impl<T: Scalar> PotentialPair<T> {
    /// `(φ + r, ψ − r)`.
    pub fn gauge_shift(&self, r: T) -> Self {
        Self {
            phi: self.phi.iter().map(|v| v.shifted(r)).collect(),
            psi: self.psi.iter().map(|v| v.shifted(-r)).collect(),
            contact: self.contact.clone(),
            tol: self.tol,
        }
    }
}

fn transform<T: Scalar>(
    values: &[PotentialValue<T>],
    costs: &CostMatrix<T>,
    direction: Direction,
    strict: bool,
) -> Result<Vec<PotentialValue<T>>> {
    let (sources, targets) = match direction {
        Direction::XToY => (costs.n_rows(), costs.n_cols()),
        Direction::YToX => (costs.n_cols(), costs.n_rows()),
    };
    if values.len() != sources {
        return Err(Error::LengthMismatch(values.len(), sources));
    }
    if !values.iter().any(PotentialValue::is_finite) {
        return Err(Error::AllNegativeInfinity);
    }
    let cost = |s: usize, t: usize| match direction {
        Direction::XToY => costs.finite(s, t),
        Direction::YToX => costs.finite(t, s),
    };
    (0..targets)
        .map(|t| {
            let best = (0..sources)
                .filter_map(|s| Some(cost(s, t)? - values[s].value()?))
                .fold(None, |acc: Option<T>, v| Some(acc.map_or(v, |a| a.min_of(v))));
            match best {
                Some(v) => Ok(PotentialValue::Finite(v)),
                None if strict => Err(Error::Degenerate(t)),
                None => Ok(PotentialValue::NegativeInfinity),
            }
        })
        .collect()
}

/// The c-transform. A target with no finite `c − φ` candidate would get `+∞`;
/// such instances are rejected with [`Error::Degenerate`].
pub fn c_transform<T: Scalar>(
    values: &[PotentialValue<T>],
    costs: &CostMatrix<T>,
    direction: Direction,
) -> Result<Vec<PotentialValue<T>>> {
    transform(values, costs, direction, true)
}

/// Build `(φ, ψ)` with `φ + ψ ≤ c` everywhere and equality on `Γ`, gauged so
/// that `φ` vanishes at the `x`-point of pair `root`.
///
/// `φ` at a support point is the length of the cheapest chain of pair-graph
/// arcs from its pair to the root. Pairs with no chain to the root are lifted
/// by a constant large enough to respect every arc into them. Points off the
/// support get `φ = (φ|_Γ)^{cc}`, or `−∞` when no finite chain reaches them.
pub fn build_potentials<T: Scalar>(gamma: &SupportSet, costs: &CostMatrix<T>, root: usize) -> Result<PotentialPair<T>> {
    let k = gamma.len();
    if root >= k {
        return Err(Error::RootOutOfRange(root, k));
    }
    let w = pair_graph(gamma, costs)?;
    let tol = T::construction_tolerance();
    if let MonotonicityCertificate::Violated(cycle) = check_c_monotone(gamma, costs, tol)? {
        return Err(cycle.into_error());
    }

    // dist[p] = min over arcs p → q of w(p, q) + dist[q], dist[root] = 0.
    let mut dist: Vec<Option<T>> = vec![None; k];
    dist[root] = Some(T::zero());
    relax_to_fixpoint(&w, k, &mut dist, tol);

    let unreached: Vec<usize> = (0..k).filter(|&p| dist[p].is_none()).collect();
    if !unreached.is_empty() {
        let mut local: Vec<Option<T>> = vec![None; k];
        for &u in &unreached {
            local[u] = Some(T::zero());
        }
        relax_to_fixpoint(&w, k, &mut local, tol);
        let mut lift = T::zero();
        for p in (0..k).filter(|&p| dist[p].is_some()) {
            for &u in &unreached {
                if let (Some(wpu), Some(dp), Some(du)) = (w[p * k + u], dist[p], local[u]) {
                    lift = lift.max_of(dp - wpu - du);
                }
            }
        }
        for &u in &unreached {
            dist[u] = local[u].map(|v| v + lift);
        }
    }

    let mut phi: Vec<PotentialValue<T>> = vec![PotentialValue::NegativeInfinity; costs.n_rows()];
    for (p, &(i, _)) in gamma.pairs().iter().enumerate() {
        let d = dist[p].expect("every pair has a distance");
        phi[i] = match phi[i] {
            PotentialValue::Finite(v) => PotentialValue::Finite(v.min_of(d)),
            PotentialValue::NegativeInfinity => PotentialValue::Finite(d),
        };
    }
    let on_support: Vec<bool> = phi.iter().map(PotentialValue::is_finite).collect();
    let partial_psi = transform(&phi, costs, Direction::XToY, false)?;
    if on_support.iter().any(|s| !s) {
        let extended = transform(&partial_psi, costs, Direction::YToX, false)?;
        for (i, v) in extended.into_iter().enumerate() {
            if !on_support[i] {
                phi[i] = v;
            }
        }
    }
    let psi = transform(&phi, costs, Direction::XToY, false)?;
    Ok(PotentialPair { phi, psi, contact: gamma.clone(), tol })
}

fn relax_to_fixpoint<T: Scalar>(w: &[Option<T>], k: usize, dist: &mut [Option<T>], tol: T) {
    let mut active: Vec<bool> = dist.iter().map(Option::is_some).collect();
    for _ in 0..=k {
        let mut changed = false;
        for q in 0..k {
            if !std::mem::take(&mut active[q]) {
                continue;
            }
            let Some(dq) = dist[q] else { continue };
            for p in 0..k {
                if let Some(wpq) = w[p * k + q] {
                    let cand = wpq + dq;
                    if dist[p].map_or(true, |dp| cand < dp - tol) {
                        dist[p] = Some(cand);
                        active[p] = true;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
}

/// Outcome of [`verify_feasibility`].
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityReport<T> {
    pub passed: bool,
    /// `max (φᵢ + ψⱼ − c(i, j))⁺` over finite-cost pairs.
    pub max_violation: T,
    pub worst_pair: Option<(usize, usize)>,
    /// `max |φᵢ + ψⱼ − c(i, j)|` over the contact set.
    pub max_contact_residual: T,
    pub worst_contact: Option<(usize, usize)>,
    /// Contact pairs with a `−∞` potential or an infinite cost.
    pub contact_failures: Vec<(usize, usize)>,
    pub tol: T,
}

/// Scan every pair for `φ + ψ ≤ c + tol` and every contact pair for
/// `|φ + ψ − c| ≤ tol`.
pub fn verify_feasibility<T: Scalar>(pp: &PotentialPair<T>, costs: &CostMatrix<T>, tol: T) -> Result<FeasibilityReport<T>> {
    if pp.phi.len() != costs.n_rows() || pp.psi.len() != costs.n_cols() {
        return Err(Error::Invalid(format!(
            "potentials have lengths {} and {}, cost is {}x{}",
            pp.phi.len(),
            pp.psi.len(),
            costs.n_rows(),
            costs.n_cols()
        )));
    }
    let mut max_violation = T::zero();
    let mut worst_pair = None;
    for (i, phi) in pp.phi.iter().enumerate() {
        for (j, psi) in pp.psi.iter().enumerate() {
            if let (Some(c), PotentialValue::Finite(s)) = (costs.finite(i, j), *phi + *psi) {
                let excess = s - c;
                if excess > max_violation {
                    max_violation = excess;
                    worst_pair = Some((i, j));
                }
            }
        }
    }
    let mut max_contact_residual = T::zero();
    let mut worst_contact = None;
    let mut contact_failures = Vec::new();
    for &(i, j) in pp.contact.pairs() {
        let c = costs.try_get(i, j)?;
        match (c.value(), pp.phi[i] + pp.psi[j]) {
            (Some(c), PotentialValue::Finite(s)) => {
                let r = (s - c).abs();
                if r > max_contact_residual {
                    max_contact_residual = r;
                    worst_contact = Some((i, j));
                }
            }
            _ => contact_failures.push((i, j)),
        }
    }
    let passed = max_violation <= tol && max_contact_residual <= tol && contact_failures.is_empty();
    Ok(FeasibilityReport {
        passed,
        max_violation,
        worst_pair,
        max_contact_residual,
        worst_contact,
        contact_failures,
        tol,
    })
}

/// `J(φ, ψ) = Σ μᵢ φᵢ + Σ νⱼ ψⱼ`. Positive and negative parts are summed
/// separately and combined last; any `−∞` on an atom of positive mass makes
/// the value `−∞`.
pub fn dual_value<T: Scalar>(pp: &PotentialPair<T>, mu: &[T], nu: &[T]) -> Result<PotentialValue<T>> {
    if pp.phi.len() != mu.len() || pp.psi.len() != nu.len() {
        return Err(Error::Invalid(format!(
            "potentials have lengths {} and {}, marginals {} and {}",
            pp.phi.len(),
            pp.psi.len(),
            mu.len(),
            nu.len()
        )));
    }
    let mut positive = T::zero();
    let mut negative = T::zero();
    let terms = pp.phi.iter().zip(mu).chain(pp.psi.iter().zip(nu));
    for (v, &w) in terms {
        if w.is_zero() {
            continue;
        }
        match v {
            PotentialValue::NegativeInfinity => return Ok(PotentialValue::NegativeInfinity),
            PotentialValue::Finite(x) => {
                let t = *x * w;
                if t >= T::zero() {
                    positive += t;
                } else {
                    negative += t;
                }
            }
        }
    }
    Ok(PotentialValue::Finite(positive + negative))
}

/// Whether `(i, j) ∈ ∂_cφ`: `φ_z ≤ φ_i + c(z, j) − c(i, j)` for every `z`
/// with finite `c(z, j)`.
pub fn superdifferential_contains<T: Scalar>(
    phi: &[PotentialValue<T>],
    costs: &CostMatrix<T>,
    pair: (usize, usize),
) -> Result<bool> {
    let (i, j) = pair;
    let cij = costs.try_get(i, j)?.value().ok_or(Error::InfiniteOnSupport(i, j))?;
    let phi_i = phi
        .get(i)
        .ok_or(Error::IndexOutOfRange(i, j, phi.len(), costs.n_cols()))?
        .value()
        .ok_or_else(|| Error::Invalid(format!("φ at {i} is -inf")))?;
    let slack = T::construction_tolerance();
    Ok(phi.iter().enumerate().all(|(z, pz)| match (pz.value(), costs.finite(z, j)) {
        (Some(pz), Some(czj)) => pz <= phi_i + czj - cij + slack,
        _ => true,
    }))
}
