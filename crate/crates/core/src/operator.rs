//! Maximal monotone operators used by the monotone-inclusion dynamics.

use nalgebra::{DMatrix, DVector};

use crate::convex::ConvexFunction;
use crate::error::{check_dim, Error, Result};
use crate::linalg::{min_sym_eigenvalue, solve, Point};

/// Below this the strong-monotonicity modulus is reported as zero.
const MODULUS_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum MonotoneOperator {
    /// `x ↦ M x + q` with `M + Mᵀ ⪰ 0`.
    Affine { m: DMatrix<f64>, q: DVector<f64> },
    /// Planar rotation by `angle`, `|angle| ≤ π/2`.
    Rotation2D { angle: f64 },
    SubdifferentialOf(ConvexFunction),
}

fn rotation(angle: f64) -> DMatrix<f64> {
    let (s, c) = angle.sin_cos();
    DMatrix::from_row_slice(2, 2, &[c, -s, s, c])
}

impl MonotoneOperator {
    pub fn affine(m: DMatrix<f64>, q: DVector<f64>) -> Result<Self> {
        if !m.is_square() || m.nrows() == 0 {
            return Err(Error::invalid("affine operator matrix must be square and nonempty"));
        }
        check_dim(m.nrows(), q.len())?;
        if m.iter().chain(q.iter()).any(|v| !v.is_finite()) {
            return Err(Error::invalid("affine operator entries must be finite"));
        }
        let sym = (&m + m.transpose()) * 0.5;
        let lo = min_sym_eigenvalue(&sym);
        if lo < -1e-10 * (1.0 + m.norm()) {
            return Err(Error::invalid(format!(
                "affine operator is not monotone: symmetric part has eigenvalue {lo}"
            )));
        }
        Ok(MonotoneOperator::Affine { m, q })
    }

    pub fn rotation(angle: f64) -> Result<Self> {
        if !(angle.is_finite() && angle.abs() <= std::f64::consts::FRAC_PI_2 + 1e-15) {
            return Err(Error::invalid(format!(
                "rotation angle must lie in [-pi/2, pi/2] for monotonicity, got {angle}"
            )));
        }
        Ok(MonotoneOperator::Rotation2D { angle })
    }

    pub fn subdifferential(f: ConvexFunction) -> Self {
        MonotoneOperator::SubdifferentialOf(f)
    }

    pub fn dim(&self) -> usize {
        match self {
            MonotoneOperator::Affine { q, .. } => q.len(),
            MonotoneOperator::Rotation2D { .. } => 2,
            MonotoneOperator::SubdifferentialOf(f) => f.dim(),
        }
    }

    /// The operator as `x ↦ M x + q`, when it is single-valued affine.
    pub fn as_affine(&self) -> Option<(DMatrix<f64>, DVector<f64>)> {
        match self {
            MonotoneOperator::Affine { m, q } => Some((m.clone(), q.clone())),
            MonotoneOperator::Rotation2D { angle } => Some((rotation(*angle), DVector::zeros(2))),
            MonotoneOperator::SubdifferentialOf(f) => f.as_quadratic().map(|q| (q.q, q.c)),
        }
    }

    /// Largest `α` with `⟨Au − Av, u − v⟩ ≥ α‖u − v‖²`.
    pub fn modulus(&self) -> f64 {
        let raw = match self.as_affine() {
            Some((m, _)) => min_sym_eigenvalue(&((&m + m.transpose()) * 0.5)),
            None => 0.0,
        };
        if raw > MODULUS_FLOOR {
            raw
        } else {
            0.0
        }
    }

    pub fn apply(&self, x: &Point) -> Result<Point> {
        check_dim(self.dim(), x.len())?;
        match self.as_affine() {
            Some((m, q)) => Ok(m * x + q),
            None => Err(Error::unsupported("operator is set-valued; no single-valued evaluation")),
        }
    }

    /// `(I + hA)⁻¹ x`.
    pub fn resolvent(&self, h: f64, x: &Point) -> Result<Point> {
        check_dim(self.dim(), x.len())?;
        if let MonotoneOperator::SubdifferentialOf(f) = self {
            return f.prox(h, x);
        }
        let (m, q) = self.as_affine().expect("affine or rotation");
        let n = x.len();
        solve(&(DMatrix::identity(n, n) + m * h), &(x - q * h))
    }

    /// The convex potential `f` with `A = ∂f`, when one exists.
    pub fn potential(&self) -> Option<ConvexFunction> {
        match self {
            MonotoneOperator::SubdifferentialOf(f) => Some(f.clone()),
            MonotoneOperator::Affine { m, q } if (m - m.transpose()).norm() <= 1e-12 * (1.0 + m.norm()) => {
                ConvexFunction::quadratic((m + m.transpose()) * 0.5, q.clone(), 0.0).ok()
            }
            MonotoneOperator::Rotation2D { angle } if *angle == 0.0 => ConvexFunction::half_squared_norm(2).ok(),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn rotation_resolvent_is_explicit_inverse() {
        let op = MonotoneOperator::rotation(FRAC_PI_2).unwrap();
        assert_eq!(op.modulus(), 0.0);
        let h = 0.3;
        let x = DVector::from_column_slice(&[1.0, 2.0]);
        // (I + hR)⁻¹ with R = [[0,−1],[1,0]]: [[1, h],[−h, 1]] / (1 + h²)
        let expect = DVector::from_column_slice(&[x[0] + h * x[1], -h * x[0] + x[1]]) / (1.0 + h * h);
        assert!((op.resolvent(h, &x).unwrap() - expect).norm() < 1e-14);
        assert!(MonotoneOperator::rotation(2.0).is_err());
    }

    #[test]
    fn affine_validation_and_modulus() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 3.0, -3.0, 1.0]);
        let op = MonotoneOperator::affine(m, DVector::zeros(2)).unwrap();
        assert!((op.modulus() - 1.0).abs() < 1e-12);
        assert!(op.potential().is_none());
        let bad = DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, 1.0]);
        assert!(MonotoneOperator::affine(bad, DVector::zeros(2)).unwrap_err().is_validation());
    }

    #[test]
    fn identity_resolvent() {
        let op = MonotoneOperator::affine(DMatrix::identity(3, 3), DVector::zeros(3)).unwrap();
        let x = DVector::from_column_slice(&[1.0, -1.0, 2.0]);
        assert!((op.resolvent(0.5, &x).unwrap() - &x / 1.5).norm() < 1e-14);
    }

    proptest! {
        #[test]
        fn monotonicity_holds(
            entries in proptest::collection::vec(-2.0f64..2.0, 9),
            u in proptest::collection::vec(-5.0f64..5.0, 3),
            v in proptest::collection::vec(-5.0f64..5.0, 3),
        ) {
            // M = S + K with S PSD and K skew.
            let b = DMatrix::from_row_slice(3, 3, &entries);
            let m = &b * b.transpose() + (&b - b.transpose());
            let op = MonotoneOperator::affine(m, DVector::from_element(3, 0.5)).unwrap();
            let (u, v) = (DVector::from_vec(u), DVector::from_vec(v));
            let d = &u - &v;
            let lhs = (op.apply(&u).unwrap() - op.apply(&v).unwrap()).dot(&d);
            prop_assert!(lhs >= op.modulus() * d.norm_squared() - 1e-10 * (1.0 + d.norm_squared()));
        }
    }
}
