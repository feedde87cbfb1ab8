use nalgebra::{DMatrix, DVector};

use super::sets::{range_tol, AffineSet};
use crate::linalg::{pinv, solve_spd, Point};

/// `x ↦ ½ xᵀ Q x + cᵀ x + r` with `Q` symmetric positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticForm {
    pub q: DMatrix<f64>,
    pub c: DVector<f64>,
    pub r: f64,
}

impl QuadraticForm {
    pub fn zero(dim: usize) -> Self {
        QuadraticForm {
            q: DMatrix::zeros(dim, dim),
            c: DVector::zeros(dim),
            r: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.c.len()
    }

    pub fn eval(&self, x: &Point) -> f64 {
        0.5 * x.dot(&(&self.q * x)) + self.c.dot(x) + self.r
    }

    pub fn gradient(&self, x: &Point) -> Point {
        &self.q * x + &self.c
    }

    pub fn add(&self, other: &QuadraticForm) -> QuadraticForm {
        QuadraticForm {
            q: &self.q + &other.q,
            c: &self.c + &other.c,
            r: self.r + other.r,
        }
    }

    pub fn scale(&self, s: f64) -> QuadraticForm {
        QuadraticForm {
            q: &self.q * s,
            c: &self.c * s,
            r: self.r * s,
        }
    }

    /// `x ↦ f(L x)`.
    pub fn precompose(&self, l: &DMatrix<f64>) -> QuadraticForm {
        QuadraticForm {
            q: l.transpose() * &self.q * l,
            c: l.transpose() * &self.c,
            r: self.r,
        }
    }

    /// `x ↦ f(x − s)`.
    pub fn translate(&self, s: &Point) -> QuadraticForm {
        let qs = &self.q * s;
        QuadraticForm {
            q: self.q.clone(),
            c: &self.c - &qs,
            r: self.r + 0.5 * s.dot(&qs) - self.c.dot(s),
        }
    }

    pub fn prox(&self, lambda: f64, x: &Point) -> crate::Result<Point> {
        let n = self.dim();
        let m = DMatrix::identity(n, n) + &self.q * lambda;
        solve_spd(&m, &(x - &self.c * lambda))
    }

    /// `sup_x ⟨y, x⟩ − f(x)`; finite iff `y − c ∈ range(Q)`.
    pub fn conjugate(&self, y: &Point) -> f64 {
        let w = y - &self.c;
        let qp = pinv(&self.q);
        let u = &qp * &w;
        if (&self.q * &u - &w).norm() > range_tol(&w) {
            return f64::INFINITY;
        }
        0.5 * w.dot(&u) - self.r
    }

    /// Minimum value, or `None` if unbounded below.
    pub fn min_value(&self) -> Option<f64> {
        let neg_c = -&self.c;
        let u = pinv(&self.q) * &neg_c;
        if (&self.q * &u - &neg_c).norm() > range_tol(&neg_c) {
            return None;
        }
        Some(self.eval(&u))
    }

    /// The minimizing set `{x : Q x = −c}` when the minimum value is zero.
    pub fn zero_set(&self) -> Option<AffineSet> {
        let m = self.min_value()?;
        if m.abs() > 1e-10 * (1.0 + self.r.abs()) {
            return None;
        }
        AffineSet::new(self.q.clone(), -&self.c).ok()
    }
}
