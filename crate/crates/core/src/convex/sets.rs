//! Closed convex sets that arise as zero sets of penalty functions.

use nalgebra::{DMatrix, DVector};

use crate::error::{check_dim, Error, Result};
use crate::linalg::{concat, pinv, split, Point};

/// Constraint residual below which a point counts as a member of a set.
pub const MEMBERSHIP_TOL: f64 = 1e-10;

/// Scale-aware threshold for deciding `y ∈ range(Aᵀ)`.
pub(crate) fn range_tol(y: &DVector<f64>) -> f64 {
    1e-9 * (1.0 + y.norm())
}

/// `{x : A x = b}`, nonempty by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineSet {
    a: DMatrix<f64>,
    b: DVector<f64>,
    a_pinv: DMatrix<f64>,
}

impl AffineSet {
    pub fn new(a: DMatrix<f64>, b: DVector<f64>) -> Result<Self> {
        check_dim(a.nrows(), b.len())?;
        if a.ncols() == 0 {
            return Err(Error::invalid("affine set needs a positive dimension"));
        }
        let a_pinv = pinv(&a);
        let mismatch = (&a * (&a_pinv * &b) - &b).norm();
        if mismatch > 1e-10 * (1.0 + b.norm()) {
            return Err(Error::invalid(format!(
                "affine constraints are inconsistent (least-squares residual {mismatch:e})"
            )));
        }
        Ok(AffineSet { a, b, a_pinv })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn rhs(&self) -> &DVector<f64> {
        &self.b
    }

    pub fn pseudo_inverse(&self) -> &DMatrix<f64> {
        &self.a_pinv
    }

    pub fn dim(&self) -> usize {
        self.a.ncols()
    }

    pub fn residual(&self, x: &Point) -> f64 {
        (&self.a * x - &self.b).norm()
    }

    pub fn project(&self, x: &Point) -> Point {
        x - &self.a_pinv * (&self.a * x - &self.b)
    }

    /// Least-squares multiplier `μ` for `Aᵀ μ = y`, if the fit is exact.
    pub fn multiplier_for(&self, y: &Point) -> Option<DVector<f64>> {
        let mu = self.a_pinv.transpose() * y;
        let resid = (self.a.transpose() * &mu - y).norm();
        (resid <= range_tol(y)).then_some(mu)
    }

    pub fn support(&self, y: &Point) -> f64 {
        match self.multiplier_for(y) {
            Some(mu) => mu.dot(&self.b),
            None => f64::INFINITY,
        }
    }

    pub fn translated(&self, shift: &Point) -> AffineSet {
        let b = &self.b + &self.a * shift;
        AffineSet {
            a: self.a.clone(),
            b,
            a_pinv: self.a_pinv.clone(),
        }
    }

    /// `{x : A (L x) = b}`; fails when the preimage is empty.
    pub fn preimage(&self, map: &DMatrix<f64>) -> Result<AffineSet> {
        AffineSet::new(&self.a * map, self.b.clone())
    }

    pub fn intersect(&self, other: &AffineSet) -> Result<AffineSet> {
        let n = self.dim();
        check_dim(n, other.dim())?;
        let rows = self.a.nrows() + other.a.nrows();
        let mut a = DMatrix::zeros(rows, n);
        a.view_mut((0, 0), (self.a.nrows(), n)).copy_from(&self.a);
        a.view_mut((self.a.nrows(), 0), (other.a.nrows(), n))
            .copy_from(&other.a);
        AffineSet::new(a, concat(&[self.b.clone(), other.b.clone()]))
    }
}

/// Axis-aligned box `[lo, hi]` with finite bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxSet {
    lo: DVector<f64>,
    hi: DVector<f64>,
}

impl BoxSet {
    pub fn new(lo: DVector<f64>, hi: DVector<f64>) -> Result<Self> {
        check_dim(lo.len(), hi.len())?;
        if lo.is_empty() {
            return Err(Error::invalid("box needs a positive dimension"));
        }
        for (l, h) in lo.iter().zip(hi.iter()) {
            if !l.is_finite() || !h.is_finite() {
                return Err(Error::invalid("box bounds must be finite"));
            }
            if l > h {
                return Err(Error::invalid(format!("empty box: lower bound {l} > upper bound {h}")));
            }
        }
        Ok(BoxSet { lo, hi })
    }

    pub fn lower(&self) -> &DVector<f64> {
        &self.lo
    }

    pub fn upper(&self) -> &DVector<f64> {
        &self.hi
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn project(&self, x: &Point) -> Point {
        DVector::from_iterator(
            x.len(),
            x.iter()
                .zip(self.lo.iter().zip(self.hi.iter()))
                .map(|(v, (l, h))| v.clamp(*l, *h)),
        )
    }

    pub fn residual(&self, x: &Point) -> f64 {
        (x - self.project(x)).norm()
    }

    pub fn support(&self, y: &Point) -> f64 {
        y.iter()
            .zip(self.lo.iter().zip(self.hi.iter()))
            .map(|(v, (l, h))| (v * l).max(v * h))
            .sum()
    }

    fn normal_cone_contains(&self, z: &Point, p: &Point) -> bool {
        let tol = range_tol(p);
        z.iter()
            .zip(p.iter())
            .zip(self.lo.iter().zip(self.hi.iter()))
            .all(|((zi, pi), (l, h))| {
                let at_hi = (zi - h).abs() <= MEMBERSHIP_TOL;
                let at_lo = (zi - l).abs() <= MEMBERSHIP_TOL;
                match (at_lo, at_hi) {
                    (true, true) => true,
                    (false, true) => *pi >= -tol,
                    (true, false) => *pi <= tol,
                    (false, false) => pi.abs() <= tol,
                }
            })
    }

    pub fn translated(&self, shift: &Point) -> BoxSet {
        BoxSet {
            lo: &self.lo + shift,
            hi: &self.hi + shift,
        }
    }

    pub fn intersect(&self, other: &BoxSet) -> Result<BoxSet> {
        check_dim(self.dim(), other.dim())?;
        BoxSet::new(self.lo.sup(&other.lo), self.hi.inf(&other.hi))
    }
}

/// Closed Euclidean ball of the given radius centred at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct BallSet {
    pub radius: f64,
    pub dim: usize,
}

impl BallSet {
    pub fn project(&self, x: &Point) -> Point {
        let n = x.norm();
        if n <= self.radius {
            x.clone()
        } else {
            x * (self.radius / n)
        }
    }
}

/// The zero set `C = argmin Ψ` of a nonnegative catalog function.
#[derive(Debug, Clone, PartialEq)]
pub enum ArgminSet {
    Affine(AffineSet),
    Box(BoxSet),
    Ball(BallSet),
    Singleton(Point),
    WholeSpace(usize),
    /// Cartesian product over consecutive coordinate blocks.
    Product(Vec<ArgminSet>),
}

impl ArgminSet {
    pub fn dim(&self) -> usize {
        match self {
            ArgminSet::Affine(s) => s.dim(),
            ArgminSet::Box(s) => s.dim(),
            ArgminSet::Ball(s) => s.dim,
            ArgminSet::Singleton(z) => z.len(),
            ArgminSet::WholeSpace(n) => *n,
            ArgminSet::Product(parts) => parts.iter().map(|p| p.dim()).sum(),
        }
    }

    fn block_sizes(parts: &[ArgminSet]) -> Vec<usize> {
        parts.iter().map(|p| p.dim()).collect()
    }

    /// Constraint residual; zero exactly on the set.
    pub fn residual(&self, x: &Point) -> f64 {
        match self {
            ArgminSet::Affine(s) => s.residual(x),
            ArgminSet::Box(s) => s.residual(x),
            ArgminSet::Ball(s) => (x.norm() - s.radius).max(0.0),
            ArgminSet::Singleton(z) => (x - z).norm(),
            ArgminSet::WholeSpace(_) => 0.0,
            ArgminSet::Product(parts) => {
                let blocks = split(x, &Self::block_sizes(parts));
                parts
                    .iter()
                    .zip(blocks.iter())
                    .map(|(p, b)| p.residual(b).powi(2))
                    .sum::<f64>()
                    .sqrt()
            }
        }
    }

    pub fn contains(&self, x: &Point) -> bool {
        self.residual(x) <= MEMBERSHIP_TOL
    }

    pub fn project(&self, x: &Point) -> Point {
        match self {
            ArgminSet::Affine(s) => s.project(x),
            ArgminSet::Box(s) => s.project(x),
            ArgminSet::Ball(s) => s.project(x),
            ArgminSet::Singleton(z) => z.clone(),
            ArgminSet::WholeSpace(_) => x.clone(),
            ArgminSet::Product(parts) => {
                let blocks = split(x, &Self::block_sizes(parts));
                let projected: Vec<Point> = parts
                    .iter()
                    .zip(blocks.iter())
                    .map(|(p, b)| p.project(b))
                    .collect();
                concat(&projected)
            }
        }
    }

    pub fn distance(&self, x: &Point) -> f64 {
        (x - self.project(x)).norm()
    }

    /// Support function `σ_C(y) = sup_{x ∈ C} ⟨y, x⟩`.
    pub fn support(&self, y: &Point) -> f64 {
        match self {
            ArgminSet::Affine(s) => s.support(y),
            ArgminSet::Box(s) => s.support(y),
            ArgminSet::Ball(s) => s.radius * y.norm(),
            ArgminSet::Singleton(z) => z.dot(y),
            ArgminSet::WholeSpace(_) => {
                if y.norm() <= range_tol(y) {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            ArgminSet::Product(parts) => {
                let blocks = split(y, &Self::block_sizes(parts));
                parts
                    .iter()
                    .zip(blocks.iter())
                    .map(|(p, b)| p.support(b))
                    .sum()
            }
        }
    }

    /// Whether `p ∈ N_C(z)`; `z` must lie in the set.
    pub fn normal_cone_contains(&self, z: &Point, p: &Point) -> Result<bool> {
        check_dim(self.dim(), z.len())?;
        check_dim(self.dim(), p.len())?;
        if !self.contains(z) {
            return Err(Error::invalid(format!(
                "base point is not in the set (residual {:e})",
                self.residual(z)
            )));
        }
        Ok(self.normal_cone_unchecked(z, p))
    }

    fn normal_cone_unchecked(&self, z: &Point, p: &Point) -> bool {
        let tol = range_tol(p);
        match self {
            ArgminSet::Affine(s) => s.multiplier_for(p).is_some(),
            ArgminSet::Box(s) => s.normal_cone_contains(z, p),
            ArgminSet::Ball(s) => {
                let zn = z.norm();
                if s.radius == 0.0 {
                    true
                } else if zn < s.radius - MEMBERSHIP_TOL {
                    p.norm() <= tol
                } else {
                    let along = p.dot(z) / (zn * zn);
                    along >= -tol && (p - z * along).norm() <= tol
                }
            }
            ArgminSet::Singleton(_) => true,
            ArgminSet::WholeSpace(_) => p.norm() <= tol,
            ArgminSet::Product(parts) => {
                let sizes = Self::block_sizes(parts);
                let zs = split(z, &sizes);
                let ps = split(p, &sizes);
                parts
                    .iter()
                    .zip(zs.iter().zip(ps.iter()))
                    .all(|(set, (zb, pb))| set.normal_cone_unchecked(zb, pb))
            }
        }
    }

    pub fn translated(&self, shift: &Point) -> ArgminSet {
        match self {
            ArgminSet::Affine(s) => ArgminSet::Affine(s.translated(shift)),
            ArgminSet::Box(s) => ArgminSet::Box(s.translated(shift)),
            ArgminSet::Ball(_) => unreachable!("translated balls are not representable"),
            ArgminSet::Singleton(z) => ArgminSet::Singleton(z + shift),
            ArgminSet::WholeSpace(n) => ArgminSet::WholeSpace(*n),
            ArgminSet::Product(parts) => {
                let shifts = split(shift, &Self::block_sizes(parts));
                ArgminSet::Product(
                    parts
                        .iter()
                        .zip(shifts.iter())
                        .map(|(p, s)| p.translated(s))
                        .collect(),
                )
            }
        }
    }

    /// Translation is representable for every variant except a ball
    /// (which is always centred at the origin).
    pub(crate) fn can_translate(&self) -> bool {
        match self {
            ArgminSet::Ball(_) => false,
            ArgminSet::Product(parts) => parts.iter().all(|p| p.can_translate()),
            _ => true,
        }
    }

    /// Intersection when the result is representable; `None` otherwise.
    pub(crate) fn intersect(&self, other: &ArgminSet) -> Option<ArgminSet> {
        use ArgminSet::*;
        match (self, other) {
            (WholeSpace(_), s) | (s, WholeSpace(_)) => Some(s.clone()),
            (Singleton(z), s) | (s, Singleton(z)) => s.contains(z).then(|| Singleton(z.clone())),
            (Affine(a), Affine(b)) => a.intersect(b).ok().map(Affine),
            (Box(a), Box(b)) => a.intersect(b).ok().map(Box),
            _ => None,
        }
    }
}
