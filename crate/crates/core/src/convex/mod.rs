//! Closed proper convex functions: a catalog of closed-form members plus a
//! few combinators.
//!
//! Every catalog member has a closed-form proximal map and Fenchel
//! conjugate. Combinators fall back to an inner splitting loop for the
//! proximal map when no closed form is available, and to a grid search for
//! the conjugate in dimension at most two.

pub mod quadratic;
pub mod sets;

use nalgebra::{DMatrix, DVector};

pub use quadratic::QuadraticForm;
pub use sets::{AffineSet, ArgminSet, BallSet, BoxSet, MEMBERSHIP_TOL};

use crate::error::{check_dim, Error, Result};
use crate::linalg::{block_diag, concat, min_sym_eigenvalue, rank, split, Point};
use crate::splitting::{resolvent_of_sum, INNER_MAX_ITER, INNER_TOL};

/// Dense linear map between finite-dimensional spaces.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearMap(DMatrix<f64>);

impl LinearMap {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() == 0 || m.ncols() == 0 {
            return Err(Error::invalid("linear map needs positive dimensions"));
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("linear map has non-finite entries"));
        }
        Ok(LinearMap(m))
    }

    pub fn identity(n: usize) -> Self {
        LinearMap(DMatrix::identity(n, n))
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn apply(&self, x: &Point) -> Result<Point> {
        check_dim(self.cols(), x.len())?;
        Ok(&self.0 * x)
    }

    pub fn apply_adjoint(&self, y: &Point) -> Result<Point> {
        check_dim(self.rows(), y.len())?;
        Ok(self.0.transpose() * y)
    }
}

/// A closed proper convex function on `ℝⁿ`.
///
/// Build values through the associated constructors, which validate
/// dimensions, positive semidefiniteness and nonemptiness of sets.
#[derive(Debug, Clone, PartialEq)]
pub enum ConvexFunction {
    Zero { dim: usize },
    Quadratic(QuadraticForm),
    /// `‖x‖₁`
    AbsoluteSum { dim: usize },
    IndicatorAffine(AffineSet),
    IndicatorBox(BoxSet),
    /// Indicator of the closed ball of the given radius at the origin.
    IndicatorBall { radius: f64, dim: usize },
    /// `½ dist²(x, C)` for an affine `C`.
    SqDistToAffine(AffineSet),
    /// `½ dist²(x, C)` for a box `C`.
    SqDistToBox(BoxSet),
    /// `radius · ‖x‖`, the support function of a centred ball.
    SupportOfBall { radius: f64, dim: usize },
    Sum(Box<ConvexFunction>, Box<ConvexFunction>),
    /// Sum over consecutive coordinate blocks.
    Separable(Vec<ConvexFunction>),
    /// `x ↦ f(L x)`
    Precompose { inner: Box<ConvexFunction>, map: LinearMap },
    /// `x ↦ factor · f(x)`, `factor > 0`
    Scale { inner: Box<ConvexFunction>, factor: f64 },
    /// `x ↦ f(x − shift)`
    Translate { inner: Box<ConvexFunction>, shift: Point },
}

fn positive_dim(dim: usize) -> Result<usize> {
    if dim == 0 {
        Err(Error::invalid("dimension must be positive"))
    } else {
        Ok(dim)
    }
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::invalid(format!("{name} must be positive and finite, got {v}")))
    }
}

impl ConvexFunction {
    pub fn zero(dim: usize) -> Result<Self> {
        Ok(ConvexFunction::Zero {
            dim: positive_dim(dim)?,
        })
    }

    pub fn quadratic(q: DMatrix<f64>, c: DVector<f64>, r: f64) -> Result<Self> {
        if !q.is_square() {
            return Err(Error::invalid("quadratic matrix must be square"));
        }
        positive_dim(q.nrows())?;
        check_dim(q.nrows(), c.len())?;
        if q.iter().chain(c.iter()).any(|v| !v.is_finite()) || !r.is_finite() {
            return Err(Error::invalid("quadratic has non-finite coefficients"));
        }
        if !crate::linalg::is_symmetric(&q, 1e-12) {
            return Err(Error::invalid("quadratic matrix must be symmetric"));
        }
        let q = 0.5 * (&q + q.transpose());
        let lmin = min_sym_eigenvalue(&q);
        if lmin < -1e-10 * (1.0 + q.amax()) {
            return Err(Error::invalid(format!(
                "quadratic matrix is not positive semidefinite (smallest eigenvalue {lmin:e})"
            )));
        }
        Ok(ConvexFunction::Quadratic(QuadraticForm { q, c, r }))
    }

    /// `½ ‖x‖²`
    pub fn half_squared_norm(dim: usize) -> Result<Self> {
        positive_dim(dim)?;
        Self::quadratic(DMatrix::identity(dim, dim), DVector::zeros(dim), 0.0)
    }

    /// `½ ‖A x − b‖²`
    pub fn least_squares(a: DMatrix<f64>, b: DVector<f64>) -> Result<Self> {
        check_dim(a.nrows(), b.len())?;
        let at = a.transpose();
        Self::quadratic(&at * &a, -(&at * &b), 0.5 * b.norm_squared())
    }

    pub fn abs_sum(dim: usize) -> Result<Self> {
        Ok(ConvexFunction::AbsoluteSum {
            dim: positive_dim(dim)?,
        })
    }

    pub fn indicator_affine(a: DMatrix<f64>, b: DVector<f64>) -> Result<Self> {
        Ok(ConvexFunction::IndicatorAffine(AffineSet::new(a, b)?))
    }

    pub fn indicator_box(lo: DVector<f64>, hi: DVector<f64>) -> Result<Self> {
        Ok(ConvexFunction::IndicatorBox(BoxSet::new(lo, hi)?))
    }

    pub fn indicator_ball(radius: f64, dim: usize) -> Result<Self> {
        if !(radius.is_finite() && radius >= 0.0) {
            return Err(Error::invalid("ball radius must be finite and nonnegative"));
        }
        Ok(ConvexFunction::IndicatorBall {
            radius,
            dim: positive_dim(dim)?,
        })
    }

    pub fn sqdist_affine(a: DMatrix<f64>, b: DVector<f64>) -> Result<Self> {
        Ok(ConvexFunction::SqDistToAffine(AffineSet::new(a, b)?))
    }

    pub fn sqdist_box(lo: DVector<f64>, hi: DVector<f64>) -> Result<Self> {
        Ok(ConvexFunction::SqDistToBox(BoxSet::new(lo, hi)?))
    }

    pub fn support_ball(radius: f64, dim: usize) -> Result<Self> {
        if !(radius.is_finite() && radius >= 0.0) {
            return Err(Error::invalid("ball radius must be finite and nonnegative"));
        }
        Ok(ConvexFunction::SupportOfBall {
            radius,
            dim: positive_dim(dim)?,
        })
    }

    pub fn sum(f: ConvexFunction, g: ConvexFunction) -> Result<Self> {
        check_dim(f.dim(), g.dim())?;
        Ok(ConvexFunction::Sum(Box::new(f), Box::new(g)))
    }

    pub fn separable(parts: Vec<ConvexFunction>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::invalid("separable function needs at least one block"));
        }
        Ok(ConvexFunction::Separable(parts))
    }

    pub fn precompose(f: ConvexFunction, map: LinearMap) -> Result<Self> {
        check_dim(f.dim(), map.rows())?;
        Ok(ConvexFunction::Precompose {
            inner: Box::new(f),
            map,
        })
    }

    pub fn scale(f: ConvexFunction, factor: f64) -> Result<Self> {
        Ok(ConvexFunction::Scale {
            inner: Box::new(f),
            factor: positive("scale factor", factor)?,
        })
    }

    pub fn translate(f: ConvexFunction, shift: Point) -> Result<Self> {
        check_dim(f.dim(), shift.len())?;
        if shift.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("shift must be finite"));
        }
        Ok(ConvexFunction::Translate {
            inner: Box::new(f),
            shift,
        })
    }

    pub fn dim(&self) -> usize {
        use ConvexFunction::*;
        match self {
            Zero { dim } | AbsoluteSum { dim } => *dim,
            IndicatorBall { dim, .. } | SupportOfBall { dim, .. } => *dim,
            Quadratic(q) => q.dim(),
            IndicatorAffine(s) | SqDistToAffine(s) => s.dim(),
            IndicatorBox(s) | SqDistToBox(s) => s.dim(),
            Sum(f, _) => f.dim(),
            Separable(parts) => parts.iter().map(|p| p.dim()).sum(),
            Precompose { map, .. } => map.cols(),
            Scale { inner, .. } | Translate { inner, .. } => inner.dim(),
        }
    }

    fn block_sizes(parts: &[ConvexFunction]) -> Vec<usize> {
        parts.iter().map(|p| p.dim()).collect()
    }

    /// `f(x) ∈ ℝ ∪ {+∞}`. Indicators return `+∞` exactly when the
    /// constraint residual exceeds [`MEMBERSHIP_TOL`].
    pub fn eval(&self, x: &Point) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        Ok(self.eval_unchecked(x))
    }

    fn eval_unchecked(&self, x: &Point) -> f64 {
        use ConvexFunction::*;
        let indicator = |resid: f64| {
            if resid <= MEMBERSHIP_TOL {
                0.0
            } else {
                f64::INFINITY
            }
        };
        match self {
            Zero { .. } => 0.0,
            Quadratic(q) => q.eval(x),
            AbsoluteSum { .. } => x.iter().map(|v| v.abs()).sum(),
            IndicatorAffine(s) => indicator(s.residual(x)),
            IndicatorBox(s) => indicator(s.residual(x)),
            IndicatorBall { radius, .. } => indicator((x.norm() - radius).max(0.0)),
            SqDistToAffine(s) => 0.5 * (x - s.project(x)).norm_squared(),
            SqDistToBox(s) => 0.5 * (x - s.project(x)).norm_squared(),
            SupportOfBall { radius, .. } => radius * x.norm(),
            Sum(f, g) => f.eval_unchecked(x) + g.eval_unchecked(x),
            Separable(parts) => {
                let blocks = split(x, &Self::block_sizes(parts));
                parts
                    .iter()
                    .zip(blocks.iter())
                    .map(|(p, b)| p.eval_unchecked(b))
                    .sum()
            }
            Precompose { inner, map } => inner.eval_unchecked(&(map.matrix() * x)),
            Scale { inner, factor } => factor * inner.eval_unchecked(x),
            Translate { inner, shift } => inner.eval_unchecked(&(x - shift)),
        }
    }

    /// Equivalent quadratic form when the function is a (PSD) quadratic.
    pub fn as_quadratic(&self) -> Option<QuadraticForm> {
        use ConvexFunction::*;
        match self {
            Zero { dim } => Some(QuadraticForm::zero(*dim)),
            Quadratic(q) => Some(q.clone()),
            SqDistToAffine(s) => {
                // x − P_C x = A⁺A x − A⁺b, and A⁺A is an orthogonal projector.
                let pinv = s.pseudo_inverse();
                let g = pinv * s.matrix();
                let g = 0.5 * (&g + g.transpose());
                let shift = pinv * s.rhs();
                Some(QuadraticForm {
                    q: g,
                    c: -&shift,
                    r: 0.5 * shift.norm_squared(),
                })
            }
            Sum(f, g) => Some(f.as_quadratic()?.add(&g.as_quadratic()?)),
            Separable(parts) => {
                let qs: Option<Vec<QuadraticForm>> = parts.iter().map(|p| p.as_quadratic()).collect();
                let qs = qs?;
                let q = block_diag(&qs.iter().map(|q| q.q.clone()).collect::<Vec<_>>());
                let c = concat(&qs.iter().map(|q| q.c.clone()).collect::<Vec<_>>());
                Some(QuadraticForm {
                    q,
                    c,
                    r: qs.iter().map(|q| q.r).sum(),
                })
            }
            Precompose { inner, map } => Some(inner.as_quadratic()?.precompose(map.matrix())),
            Scale { inner, factor } => Some(inner.as_quadratic()?.scale(*factor)),
            Translate { inner, shift } => Some(inner.as_quadratic()?.translate(shift)),
            _ => None,
        }
    }

    /// Gradient at `x` for differentiable (quadratic) members.
    pub fn gradient(&self, x: &Point) -> Option<Point> {
        self.as_quadratic().map(|q| q.gradient(x))
    }

    /// `prox_{λf}(x) = argmin_u f(u) + ‖u − x‖² / (2λ)`.
    pub fn prox(&self, lambda: f64, x: &Point) -> Result<Point> {
        check_dim(self.dim(), x.len())?;
        positive("prox parameter", lambda)?;
        self.prox_unchecked(lambda, x)
    }

    fn prox_unchecked(&self, lambda: f64, x: &Point) -> Result<Point> {
        use ConvexFunction::*;
        match self {
            Zero { .. } => Ok(x.clone()),
            Quadratic(q) => q.prox(lambda, x),
            AbsoluteSum { .. } => Ok(x.map(|v| v.signum() * (v.abs() - lambda).max(0.0))),
            IndicatorAffine(s) => Ok(s.project(x)),
            IndicatorBox(s) => Ok(s.project(x)),
            IndicatorBall { radius, dim } => Ok(BallSet {
                radius: *radius,
                dim: *dim,
            }
            .project(x)),
            SqDistToAffine(s) => {
                let p = s.project(x);
                Ok(x + (p - x) * (lambda / (1.0 + lambda)))
            }
            SqDistToBox(s) => {
                let p = s.project(x);
                Ok(x + (p - x) * (lambda / (1.0 + lambda)))
            }
            SupportOfBall { radius, .. } => {
                let n = x.norm();
                let t = lambda * radius;
                if n <= t {
                    Ok(DVector::zeros(x.len()))
                } else {
                    Ok(x * (1.0 - t / n))
                }
            }
            Separable(parts) => {
                let blocks = split(x, &Self::block_sizes(parts));
                let out: Result<Vec<Point>> = parts
                    .iter()
                    .zip(blocks.iter())
                    .map(|(p, b)| p.prox_unchecked(lambda, b))
                    .collect();
                Ok(concat(&out?))
            }
            Scale { inner, factor } => inner.prox_unchecked(lambda * factor, x),
            Translate { inner, shift } => Ok(inner.prox_unchecked(lambda, &(x - shift))? + shift),
            Sum(f, g) => {
                if let Some(q) = self.as_quadratic() {
                    return q.prox(lambda, x);
                }
                if matches!(**f, Zero { .. }) {
                    return g.prox_unchecked(lambda, x);
                }
                if matches!(**g, Zero { .. }) {
                    return f.prox_unchecked(lambda, x);
                }
                resolvent_of_sum(
                    "prox of a sum",
                    |gm, v| f.prox_unchecked(gm, v),
                    |gm, v| g.prox_unchecked(gm, v),
                    lambda,
                    x,
                )
                .map(|s| s.point)
            }
            Precompose { inner, map } => {
                if let Some(q) = self.as_quadratic() {
                    return q.prox(lambda, x);
                }
                prox_precompose_admm(inner, map, lambda, x)
            }
        }
    }

    /// Whether [`conjugate`](Self::conjugate) has a closed form.
    pub fn has_closed_conjugate(&self) -> bool {
        use ConvexFunction::*;
        match self {
            Separable(parts) => parts.iter().all(|p| p.has_closed_conjugate()),
            Scale { inner, .. } | Translate { inner, .. } => inner.has_closed_conjugate(),
            Sum(..) => self.as_quadratic().is_some(),
            Precompose { inner, map } => {
                self.as_quadratic().is_some()
                    || (map.rows() == map.cols()
                        && rank(map.matrix()) == map.rows()
                        && inner.has_closed_conjugate())
            }
            _ => true,
        }
    }

    /// Fenchel conjugate `f*(y) = sup_x ⟨y, x⟩ − f(x)`.
    ///
    /// Closed form for catalog members. Otherwise, in dimension at most
    /// two, a grid-refined maximization over `[−R, R]ᵈ` with
    /// `R = 10 (1 + ‖y‖)`; that fallback is only a lower estimate.
    pub fn conjugate(&self, y: &Point) -> Result<f64> {
        check_dim(self.dim(), y.len())?;
        if self.has_closed_conjugate() {
            return self.conjugate_closed(y);
        }
        if self.dim() <= 2 {
            return self.conjugate_numeric(y);
        }
        Err(Error::unsupported(
            "conjugate has no closed form and the numeric fallback is limited to dimension 2",
        ))
    }

    fn conjugate_closed(&self, y: &Point) -> Result<f64> {
        use ConvexFunction::*;
        let in_set = |ok: bool| if ok { 0.0 } else { f64::INFINITY };
        Ok(match self {
            Zero { .. } => in_set(y.norm() <= MEMBERSHIP_TOL),
            Quadratic(q) => q.conjugate(y),
            AbsoluteSum { .. } => in_set(y.amax() <= 1.0 + MEMBERSHIP_TOL),
            IndicatorAffine(s) => s.support(y),
            IndicatorBox(s) => s.support(y),
            IndicatorBall { radius, .. } => radius * y.norm(),
            SqDistToAffine(s) => 0.5 * y.norm_squared() + s.support(y),
            SqDistToBox(s) => 0.5 * y.norm_squared() + s.support(y),
            SupportOfBall { radius, .. } => in_set(y.norm() <= radius + MEMBERSHIP_TOL * (1.0 + radius)),
            Separable(parts) => {
                let blocks = split(y, &Self::block_sizes(parts));
                let mut total = 0.0;
                for (p, b) in parts.iter().zip(blocks.iter()) {
                    total += p.conjugate_closed(b)?;
                }
                total
            }
            Scale { inner, factor } => factor * inner.conjugate_closed(&(y / *factor))?,
            Translate { inner, shift } => inner.conjugate_closed(y)? + y.dot(shift),
            Sum(..) | Precompose { .. } => {
                if let Some(q) = self.as_quadratic() {
                    q.conjugate(y)
                } else if let Precompose { inner, map } = self {
                    let lt = map.matrix().transpose();
                    let w = crate::linalg::solve(&lt, y)?;
                    inner.conjugate_closed(&w)?
                } else {
                    return Err(Error::unsupported("conjugate of a nonquadratic sum"));
                }
            }
        })
    }

    fn conjugate_numeric(&self, y: &Point) -> Result<f64> {
        const POINTS: usize = 201;
        const PASSES: usize = 3;
        let d = self.dim();
        let radius = 10.0 * (1.0 + y.norm());
        let mut center = DVector::zeros(d);
        let mut half = radius;
        let mut best = f64::NEG_INFINITY;
        let mut best_x = center.clone();
        let per_axis = if d == 1 { POINTS } else { 101 };
        for _ in 0..PASSES {
            let step = 2.0 * half / (per_axis - 1) as f64;
            let coords: Vec<f64> = (0..per_axis).map(|i| -half + step * i as f64).collect();
            let mut visit = |x: Point| {
                let v = y.dot(&x) - self.eval_unchecked(&x);
                if v > best {
                    best = v;
                    best_x = x;
                }
            };
            if d == 1 {
                for c in &coords {
                    visit(DVector::from_element(1, center[0] + c));
                }
            } else {
                for a in &coords {
                    for b in &coords {
                        visit(DVector::from_column_slice(&[center[0] + a, center[1] + b]));
                    }
                }
            }
            center = best_x.clone();
            half = 2.0 * step;
        }
        if best == f64::NEG_INFINITY {
            return Err(Error::unsupported(
                "numeric conjugate found no point of the effective domain on the grid",
            ));
        }
        Ok(best)
    }

    /// The zero set `C = argmin f`, available when `f ≥ 0` attains the
    /// value zero and `C` is representable.
    pub fn argmin_set(&self) -> Option<ArgminSet> {
        use ConvexFunction::*;
        match self {
            Zero { dim } => Some(ArgminSet::WholeSpace(*dim)),
            Quadratic(q) => q.zero_set().map(ArgminSet::Affine),
            AbsoluteSum { dim } | SupportOfBall { dim, .. } => {
                Some(ArgminSet::Singleton(DVector::zeros(*dim)))
            }
            IndicatorAffine(s) | SqDistToAffine(s) => Some(ArgminSet::Affine(s.clone())),
            IndicatorBox(s) | SqDistToBox(s) => Some(ArgminSet::Box(s.clone())),
            IndicatorBall { radius, dim } => Some(ArgminSet::Ball(BallSet {
                radius: *radius,
                dim: *dim,
            })),
            Sum(f, g) => match (f.argmin_set(), g.argmin_set()) {
                (Some(a), Some(b)) => a.intersect(&b),
                _ => self.as_quadratic()?.zero_set().map(ArgminSet::Affine),
            },
            Separable(parts) => {
                let sets: Option<Vec<ArgminSet>> = parts.iter().map(|p| p.argmin_set()).collect();
                Some(ArgminSet::Product(sets?))
            }
            Precompose { inner, map } => {
                let structural = match inner.argmin_set() {
                    Some(ArgminSet::Affine(s)) => s.preimage(map.matrix()).ok().map(ArgminSet::Affine),
                    Some(ArgminSet::Singleton(z)) => {
                        AffineSet::new(map.matrix().clone(), z).ok().map(ArgminSet::Affine)
                    }
                    Some(ArgminSet::WholeSpace(_)) => Some(ArgminSet::WholeSpace(map.cols())),
                    _ => None,
                };
                structural.or_else(|| self.as_quadratic()?.zero_set().map(ArgminSet::Affine))
            }
            Scale { inner, .. } => inner.argmin_set(),
            Translate { inner, shift } => {
                let s = inner.argmin_set()?;
                s.can_translate().then(|| s.translated(shift))
            }
        }
    }

    pub fn has_argmin_set(&self) -> bool {
        self.argmin_set().is_some()
    }

    fn require_argmin(&self) -> Result<ArgminSet> {
        self.argmin_set()
            .ok_or_else(|| Error::unsupported("function has no representable zero set"))
    }

    /// `σ_C(y)` for `C = argmin f`.
    pub fn support_of_argmin(&self, y: &Point) -> Result<f64> {
        check_dim(self.dim(), y.len())?;
        Ok(self.require_argmin()?.support(y))
    }

    /// Euclidean projection onto `argmin f`.
    pub fn project_argmin(&self, x: &Point) -> Result<Point> {
        check_dim(self.dim(), x.len())?;
        Ok(self.require_argmin()?.project(x))
    }

    /// Whether `p ∈ N_C(z)` for `C = argmin f`; `z` must lie in `C`.
    pub fn normal_cone_contains(&self, z: &Point, p: &Point) -> Result<bool> {
        check_dim(self.dim(), z.len())?;
        check_dim(self.dim(), p.len())?;
        self.require_argmin()?.normal_cone_contains(z, p)
    }

    /// The conjugate as a catalog member, when it is one.
    pub fn conjugate_function(&self) -> Option<ConvexFunction> {
        use ConvexFunction::*;
        match self {
            Zero { dim } => Self::indicator_box(DVector::zeros(*dim), DVector::zeros(*dim)).ok(),
            Quadratic(q) => {
                // Rank-deficient Q can pass Cholesky on roundoff alone.
                let eig = q.q.clone().symmetric_eigenvalues();
                if eig.min() <= 1e-10 * eig.amax().max(1.0) {
                    return None;
                }
                let chol = q.q.clone().cholesky()?;
                let qinv = chol.inverse();
                let qc = &qinv * &q.c;
                Self::quadratic(qinv, -qc.clone(), 0.5 * q.c.dot(&qc) - q.r).ok()
            }
            AbsoluteSum { dim } => Self::indicator_box(
                DVector::from_element(*dim, -1.0),
                DVector::from_element(*dim, 1.0),
            )
            .ok(),
            IndicatorBox(s) => {
                let a = s.upper()[0];
                let symmetric = s.upper().iter().all(|h| *h == a) && s.lower().iter().all(|l| *l == -a);
                if symmetric && a > 0.0 {
                    Self::scale(Self::abs_sum(s.dim()).ok()?, a).ok()
                } else {
                    None
                }
            }
            IndicatorBall { radius, dim } => Self::support_ball(*radius, *dim).ok(),
            SupportOfBall { radius, dim } => Self::indicator_ball(*radius, *dim).ok(),
            IndicatorAffine(s) if s.rhs().norm() == 0.0 => {
                let basis = crate::linalg::null_space(s.matrix());
                if basis.ncols() == 0 {
                    return Self::zero(s.dim()).ok();
                }
                let n = basis.ncols();
                Self::indicator_affine(basis.transpose(), DVector::zeros(n)).ok()
            }
            _ => None,
        }
    }
}

/// ADMM on `min f(z) + ‖u − x‖²/(2λ)` subject to `z = L u`.
fn prox_precompose_admm(
    inner: &ConvexFunction,
    map: &LinearMap,
    lambda: f64,
    x: &Point,
) -> Result<Point> {
    let l = map.matrix();
    let lt = l.transpose();
    let n = map.cols();
    let rho = 1.0 / lambda;
    let system = DMatrix::identity(n, n) / lambda + &lt * l * rho;
    let chol = system
        .cholesky()
        .ok_or_else(|| Error::numerical("ADMM system is not positive definite"))?;
    let tol = INNER_TOL * x.norm().max(1.0);
    let mut z = l * x;
    let mut w: Point = DVector::zeros(map.rows());
    let mut residual = f64::INFINITY;
    for _ in 0..INNER_MAX_ITER {
        let u = chol.solve(&(x / lambda + &lt * (&z - &w) * rho));
        let lu = l * &u;
        let z_new = inner.prox_unchecked(1.0 / rho, &(&lu + &w))?;
        let primal = (&lu - &z_new).norm();
        let dual = rho * (&lt * (&z_new - &z)).norm();
        w += &lu - &z_new;
        z = z_new;
        residual = primal.max(dual);
        if residual <= tol {
            // Same point up to the residual, but (x − u)/λ = Lᵀ(ρw) is then an
            // exact subgradient image, so conjugate-side identities hold.
            return Ok(x - &lt * &w);
        }
    }
    Err(Error::NonConvergence {
        what: "prox of a precomposition",
        iterations: INNER_MAX_ITER,
        residual,
    })
}

/// `Ψ(x₁, x₂) = ½‖L₁x₁ − L₂x₂‖²` on the stacked variable `(x₁, x₂)`.
pub fn build_coupling(l1: &LinearMap, l2: &LinearMap) -> Result<ConvexFunction> {
    if l1.rows() != l2.rows() {
        return Err(Error::invalid(format!(
            "coupling maps have different output dimensions ({} vs {})",
            l1.rows(),
            l2.rows()
        )));
    }
    let (r, c1, c2) = (l1.rows(), l1.cols(), l2.cols());
    let mut joint = DMatrix::zeros(r, c1 + c2);
    joint.view_mut((0, 0), (r, c1)).copy_from(l1.matrix());
    joint.view_mut((0, c1), (r, c2)).copy_from(&(-l2.matrix()));
    ConvexFunction::precompose(ConvexFunction::half_squared_norm(r)?, LinearMap::new(joint)?)
}
