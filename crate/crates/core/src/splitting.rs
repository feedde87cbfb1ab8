//! Inner splitting loops used whenever an implicit step has no closed form.

use crate::error::{Error, Result};
use crate::linalg::Point;

/// Residual target for inner iterations, relative to `max(1, ‖x‖)`.
pub const INNER_TOL: f64 = 1e-10;
pub const INNER_MAX_ITER: usize = 10_000;

#[derive(Debug, Clone)]
pub struct InnerSolve {
    pub point: Point,
    pub residual: f64,
    pub iterations: usize,
}

/// Douglas–Rachford iteration for `0 ∈ T₁u + T₂u`, given the resolvents of
/// both operators at a common step.
pub fn douglas_rachford<J1, J2>(
    what: &'static str,
    mut j1: J1,
    mut j2: J2,
    z0: Point,
    scale: f64,
) -> Result<InnerSolve>
where
    J1: FnMut(&Point) -> Result<Point>,
    J2: FnMut(&Point) -> Result<Point>,
{
    let tol = INNER_TOL * scale.max(1.0);
    let mut z = z0;
    let mut residual = f64::INFINITY;
    for it in 1..=INNER_MAX_ITER {
        let u = j1(&z)?;
        let reflected = &u * 2.0 - &z;
        let v = j2(&reflected)?;
        let diff = &v - &u;
        residual = diff.norm();
        if !residual.is_finite() {
            break;
        }
        z += &diff;
        if residual <= tol {
            return Ok(InnerSolve {
                point: v,
                residual,
                iterations: it,
            });
        }
    }
    Err(Error::NonConvergence {
        what,
        iterations: INNER_MAX_ITER,
        residual,
    })
}

/// Resolvent `(I + γ(T₁ + T₂))⁻¹ x` from the resolvents of `T₁` and `T₂`.
///
/// `j1(γ, v)` and `j2(γ, v)` must return `(I + γTᵢ)⁻¹ v`.
pub fn resolvent_of_sum<J1, J2>(
    what: &'static str,
    mut j1: J1,
    mut j2: J2,
    gamma: f64,
    x: &Point,
) -> Result<InnerSolve>
where
    J1: FnMut(f64, &Point) -> Result<Point>,
    J2: FnMut(f64, &Point) -> Result<Point>,
{
    let scale = x.norm();
    douglas_rachford(
        what,
        |v: &Point| j1(gamma, &((v + x) * 0.5)),
        |v: &Point| j2(gamma, &((v + x) * 0.5)),
        x.clone(),
        scale,
    )
}
