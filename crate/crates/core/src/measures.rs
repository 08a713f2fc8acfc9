//! Ground points, finitely supported measures and extended-real costs.

use std::cmp::Ordering;
use std::ops::Add;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::solver::TransportPlan;

/// A point of ℝᵈ, or of the circle when used with [`CostSpec::TorusShift`]
/// (single coordinate `r ∈ [0, 1)` standing for `exp(2πir)`).
#[derive(Debug, Clone, PartialEq)]
pub struct Point<T> {
    coords: Vec<T>,
}

impl<T: Scalar> Point<T> {
    pub fn new(coords: Vec<T>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::DimensionMismatch(0, 1));
        }
        if let Some(bad) = coords.iter().find(|c| !c.is_finite_value()) {
            return Err(Error::NonFiniteCoordinate(bad.to_f64_lossy()));
        }
        Ok(Self { coords })
    }

    pub fn scalar(x: T) -> Result<Self> {
        Self::new(vec![x])
    }

    pub fn torus(r: T) -> Result<Self> {
        if !r.is_finite_value() || r < T::zero() || r >= T::one() {
            return Err(Error::TorusCoordinate(r.to_f64_lossy()));
        }
        Ok(Self { coords: vec![r] })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[T] {
        &self.coords
    }
}

/// A cost value in `[0, +∞]`. `+∞` marks a forbidden pairing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedReal<T> {
    Finite(T),
    PositiveInfinity,
}

impl<T: Scalar> ExtendedReal<T> {
    pub fn finite(value: T) -> Result<Self> {
        if !value.is_finite_value() || value < T::zero() {
            return Err(Error::InvalidCost(value.to_f64_lossy()));
        }
        Ok(ExtendedReal::Finite(value))
    }

    pub fn zero() -> Self {
        ExtendedReal::Finite(T::zero())
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtendedReal::Finite(_))
    }

    pub fn value(&self) -> Option<T> {
        match *self {
            ExtendedReal::Finite(v) => Some(v),
            ExtendedReal::PositiveInfinity => None,
        }
    }

    /// `self - rhs` as a plain scalar; only defined for two finite costs.
    pub fn finite_diff(self, rhs: Self) -> Option<T> {
        Some(self.value()? - rhs.value()?)
    }

    /// Scale by a nonnegative mass. `0 · ∞` is not defined here; callers never
    /// carry zero-mass atoms.
    pub fn scale(self, mass: T) -> Self {
        match self {
            ExtendedReal::Finite(v) => ExtendedReal::Finite(v * mass),
            ExtendedReal::PositiveInfinity => ExtendedReal::PositiveInfinity,
        }
    }

    pub fn to_f64(self) -> f64 {
        match self {
            ExtendedReal::Finite(v) => v.to_f64_lossy(),
            ExtendedReal::PositiveInfinity => f64::INFINITY,
        }
    }
}

impl<T: Scalar> Add for ExtendedReal<T> {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        match (self, rhs) {
            (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => ExtendedReal::Finite(a + b),
            _ => ExtendedReal::PositiveInfinity,
        }
    }
}

impl<T: Scalar> PartialOrd for ExtendedReal<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => a.partial_cmp(b),
            (ExtendedReal::Finite(_), ExtendedReal::PositiveInfinity) => Some(Ordering::Less),
            (ExtendedReal::PositiveInfinity, ExtendedReal::Finite(_)) => Some(Ordering::Greater),
            (ExtendedReal::PositiveInfinity, ExtendedReal::PositiveInfinity) => Some(Ordering::Equal),
        }
    }
}

/// Dense row-major matrix of extended-real costs: `c` materialized on
/// `supp μ × supp ν`.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix<T> {
    rows: usize,
    cols: usize,
    values: Vec<ExtendedReal<T>>,
}

impl<T: Scalar> CostMatrix<T> {
    pub fn new(rows: usize, cols: usize, values: Vec<ExtendedReal<T>>) -> Result<Self> {
        if values.len() != rows * cols {
            return Err(Error::LengthMismatch(values.len(), rows * cols));
        }
        for v in &values {
            if let ExtendedReal::Finite(x) = v {
                ExtendedReal::finite(*x)?;
            }
        }
        Ok(Self { rows, cols, values })
    }

    pub fn from_rows(rows: Vec<Vec<ExtendedReal<T>>>) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != m) {
            return Err(Error::DimensionMismatch(bad.len(), m));
        }
        Self::new(n, m, rows.into_iter().flatten().collect())
    }

    /// All-finite matrix from plain scalars.
    pub fn from_finite(rows: Vec<Vec<T>>) -> Result<Self> {
        Self::from_rows(
            rows.into_iter()
                .map(|r| r.into_iter().map(ExtendedReal::Finite).collect())
                .collect(),
        )
    }

    pub fn n_rows(&self) -> usize {
        self.rows
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> ExtendedReal<T> {
        self.values[i * self.cols + j]
    }

    pub fn try_get(&self, i: usize, j: usize) -> Result<ExtendedReal<T>> {
        if i >= self.rows || j >= self.cols {
            return Err(Error::IndexOutOfRange(i, j, self.rows, self.cols));
        }
        Ok(self.get(i, j))
    }

    /// The finite value at `(i, j)`, `None` for a forbidden pair.
    pub fn finite(&self, i: usize, j: usize) -> Option<T> {
        self.get(i, j).value()
    }

    pub fn row(&self, i: usize) -> &[ExtendedReal<T>] {
        &self.values[i * self.cols..(i + 1) * self.cols]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[ExtendedReal<T>]> {
        self.values.chunks(self.cols.max(1)).take(self.rows)
    }

    pub fn all_finite(&self) -> bool {
        self.values.iter().all(ExtendedReal::is_finite)
    }

    /// Copy with `(i, j)` replaced.
    pub fn with_entry(mut self, i: usize, j: usize, value: ExtendedReal<T>) -> Self {
        let cols = self.cols;
        self.values[i * cols + j] = value;
        self
    }
}

/// Cyclic grid cost: `diag_cost` when `j = i`, `shift_cost` when
/// `j ≡ i + shift_steps (mod size)`, `off_value` otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusShift<T> {
    pub size: usize,
    pub shift_steps: i64,
    pub diag_cost: T,
    pub shift_cost: T,
    pub off_value: ExtendedReal<T>,
}

impl<T: Scalar> TorusShift<T> {
    pub fn eval_index(&self, i: usize, j: usize) -> Result<ExtendedReal<T>> {
        let n = self.size;
        if i >= n || j >= n {
            return Err(Error::IndexOutOfRange(i, j, n, n));
        }
        if i == j {
            return Ok(ExtendedReal::Finite(self.diag_cost));
        }
        let shifted = (i as i64 + self.shift_steps).rem_euclid(n as i64) as usize;
        if j == shifted {
            Ok(ExtendedReal::Finite(self.shift_cost))
        } else {
            Ok(self.off_value)
        }
    }

    /// Grid index of a torus point `r = k / size`.
    pub fn grid_index(&self, point: &Point<T>) -> Result<usize> {
        if point.dim() != 1 {
            return Err(Error::DimensionMismatch(point.dim(), 1));
        }
        let r = point.coords()[0];
        if r < T::zero() || r >= T::one() {
            return Err(Error::TorusCoordinate(r.to_f64_lossy()));
        }
        let scaled = r.to_f64_lossy() * self.size as f64;
        let k = scaled.round();
        if (scaled - k).abs() > 1e-9 {
            return Err(Error::Invalid(format!(
                "torus coordinate {} is not on the {}-point grid",
                r, self.size
            )));
        }
        Ok(k as usize % self.size)
    }
}

/// Description of the cost function `c`.
#[derive(Debug, Clone, PartialEq)]
pub enum CostSpec<T> {
    SquaredEuclidean,
    /// `‖x − y‖_p` with `p ≥ 1`.
    PNorm(f64),
    ExplicitMatrix(CostMatrix<T>),
    TorusShift(TorusShift<T>),
}

/// An argument to [`eval_cost`]: a ground point or an atom index.
#[derive(Debug, Clone, Copy)]
pub enum Site<'a, T> {
    Point(&'a Point<T>),
    Index(usize),
}

impl<T: Scalar> CostSpec<T> {
    pub fn torus(size: usize, shift_steps: i64, diag_cost: T, shift_cost: T, off_value: ExtendedReal<T>) -> Self {
        CostSpec::TorusShift(TorusShift { size, shift_steps, diag_cost, shift_cost, off_value })
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            CostSpec::PNorm(p) if !(*p >= 1.0 && p.is_finite()) => Err(Error::InvalidExponent(*p)),
            CostSpec::TorusShift(t) if t.size == 0 => Err(Error::Invalid("torus needs at least one grid point".into())),
            CostSpec::TorusShift(t) => {
                ExtendedReal::finite(t.diag_cost)?;
                ExtendedReal::finite(t.shift_cost)?;
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn is_analytic(&self) -> bool {
        matches!(self, CostSpec::SquaredEuclidean | CostSpec::PNorm(_))
    }

    /// Symmetric in its arguments.
    pub fn is_symmetric(&self) -> bool {
        self.is_analytic()
    }

    /// Cost matrix over atom indices `0..n × 0..m`, for index-based specs.
    pub fn index_matrix(&self, n: usize, m: usize) -> Result<CostMatrix<T>> {
        match self {
            CostSpec::ExplicitMatrix(mat) => {
                if mat.n_rows() != n || mat.n_cols() != m {
                    return Err(Error::Invalid(format!(
                        "cost matrix is {}x{}, measures have {}x{} atoms",
                        mat.n_rows(),
                        mat.n_cols(),
                        n,
                        m
                    )));
                }
                Ok(mat.clone())
            }
            CostSpec::TorusShift(t) => {
                let mut values = Vec::with_capacity(n * m);
                for i in 0..n {
                    for j in 0..m {
                        values.push(t.eval_index(i, j)?);
                    }
                }
                CostMatrix::new(n, m, values)
            }
            _ => Err(Error::UnsupportedArgument("ground points, not indices")),
        }
    }
}

fn analytic_cost<T: Scalar>(spec: &CostSpec<T>, x: &Point<T>, y: &Point<T>) -> Result<ExtendedReal<T>> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch(x.dim(), y.dim()));
    }
    let diffs = x.coords().iter().zip(y.coords()).map(|(&a, &b)| (a - b).abs());
    let value = match spec {
        CostSpec::SquaredEuclidean => diffs.fold(T::zero(), |acc, d| acc + d * d),
        CostSpec::PNorm(p) => {
            if *p == 1.0 {
                diffs.fold(T::zero(), |acc, d| acc + d)
            } else {
                diffs.fold(T::zero(), |acc, d| acc + d.pow_real(*p)).pow_real(1.0 / p)
            }
        }
        _ => unreachable!("analytic_cost called with index-based spec"),
    };
    Ok(ExtendedReal::Finite(value))
}

/// Evaluate `c(x, y)`.
pub fn eval_cost<T: Scalar>(spec: &CostSpec<T>, x: Site<'_, T>, y: Site<'_, T>) -> Result<ExtendedReal<T>> {
    spec.validate()?;
    match spec {
        CostSpec::SquaredEuclidean | CostSpec::PNorm(_) => match (x, y) {
            (Site::Point(a), Site::Point(b)) => analytic_cost(spec, a, b),
            _ => Err(Error::UnsupportedArgument("ground points, not indices")),
        },
        CostSpec::ExplicitMatrix(mat) => match (x, y) {
            (Site::Index(i), Site::Index(j)) => mat.try_get(i, j),
            _ => Err(Error::UnsupportedArgument("atom indices, not points")),
        },
        CostSpec::TorusShift(t) => {
            let resolve = |s: Site<'_, T>| match s {
                Site::Index(k) => Ok(k),
                Site::Point(p) => t.grid_index(p),
            };
            t.eval_index(resolve(x)?, resolve(y)?)
        }
    }
}

/// Materialize `c` on `supp μ × supp ν`. Explicit matrices are indexed by atom
/// position; torus specs map each atom's coordinate onto the grid.
pub fn cost_matrix<T: Scalar>(
    spec: &CostSpec<T>,
    mu: &DiscreteMeasure<T>,
    nu: &DiscreteMeasure<T>,
) -> Result<CostMatrix<T>> {
    spec.validate()?;
    if let CostSpec::ExplicitMatrix(_) = spec {
        return spec.index_matrix(mu.len(), nu.len());
    }
    let mut values = Vec::with_capacity(mu.len() * nu.len());
    for x in mu.points() {
        for y in nu.points() {
            values.push(eval_cost(spec, Site::Point(x), Site::Point(y))?);
        }
    }
    CostMatrix::new(mu.len(), nu.len(), values)
}

/// `I(π) = Σ mass · c` over the support of `plan`.
pub fn plan_cost<T: Scalar>(plan: &TransportPlan<T>, costs: &CostMatrix<T>) -> Result<ExtendedReal<T>> {
    let mut total = ExtendedReal::zero();
    for &(i, j, mass) in plan.entries() {
        total = total + costs.try_get(i, j)?.scale(mass);
    }
    Ok(total)
}

/// A finitely supported probability measure. Zero-weight atoms are dropped
/// and the weights renormalized; duplicate points are kept as separate atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure<T> {
    points: Vec<Point<T>>,
    weights: Vec<T>,
}

impl<T: Scalar> DiscreteMeasure<T> {
    pub fn new(points: Vec<Point<T>>, weights: Vec<T>) -> Result<Self> {
        if points.len() != weights.len() {
            return Err(Error::LengthMismatch(points.len(), weights.len()));
        }
        if let Some(first) = points.first() {
            if let Some(bad) = points.iter().find(|p| p.dim() != first.dim()) {
                return Err(Error::DimensionMismatch(bad.dim(), first.dim()));
            }
        }
        if let Some(bad) = weights.iter().find(|w| !w.is_finite_value() || **w < T::zero()) {
            return Err(Error::InvalidWeight(bad.to_f64_lossy()));
        }
        let (points, weights): (Vec<_>, Vec<_>) = points
            .into_iter()
            .zip(weights)
            .filter(|(_, w)| !w.is_zero())
            .unzip();
        if points.is_empty() {
            return Err(Error::EmptyMeasure);
        }
        let total = compensated_sum(&weights);
        if (total - T::one()).abs() > T::weight_tolerance() {
            return Err(Error::NotNormalized(total.to_f64_lossy()));
        }
        let weights = if total == T::one() {
            weights
        } else {
            weights.into_iter().map(|w| w / total).collect()
        };
        Ok(Self { points, weights })
    }

    /// Empirical measure `(1/n) Σ δ_{xᵢ}`.
    pub fn uniform(points: Vec<Point<T>>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyMeasure);
        }
        let w = T::one() / T::from_count(points.len());
        let n = points.len();
        Self::new(points, vec![w; n])
    }

    /// Measure on atoms `0, 1, …` (1-D points equal to the index) for
    /// index-based costs.
    pub fn indexed(weights: Vec<T>) -> Result<Self> {
        let points = (0..weights.len())
            .map(|k| Point::scalar(T::from_count(k)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(points, weights)
    }

    /// Uniform measure on the `size`-point circle grid `r = k / size`.
    pub fn torus_grid(size: usize) -> Result<Self> {
        let n = T::from_count(size);
        let points = (0..size)
            .map(|k| Point::torus(T::from_count(k) / n))
            .collect::<Result<Vec<_>>>()?;
        Self::uniform(points)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }

    pub fn points(&self) -> &[Point<T>] {
        &self.points
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }
}

/// Neumaier-compensated sum; exact for exact scalars.
pub(crate) fn compensated_sum<T: Scalar>(xs: &[T]) -> T {
    let (mut s, mut c) = (T::zero(), T::zero());
    for &x in xs {
        let t = s + x;
        if s.abs() >= x.abs() {
            c += (s - t) + x;
        } else {
            c += (x - t) + s;
        }
        s = t;
    }
    s + c
}
