//! Reference solutions of the limit problems, and the two applied algorithms
//! built on alternating penalized minimization.

mod dd;
mod game;

pub use dd::{dd_assemble, dd_monolithic, dd_run, CoupledProblem, DdRecord, DdRun};
pub use game::{best_response_run, BrRecord, BrRun, Game};

use nalgebra::{DMatrix, DVector};

use crate::convex::{ArgminSet, ConvexFunction};
use crate::error::{check_dim, Error, Result};
use crate::linalg::{null_space, pinv, rank, solve, Point};
use crate::operator::MonotoneOperator;
use crate::schedule::Schedule;
use crate::splitting::resolvent_of_sum;

/// Penalty weights `β_k`, indexed from `k = 0`.
#[derive(Debug, Clone, PartialEq)]
pub enum PenaltySequence {
    /// `β_k = schedule(k)`
    Schedule(Schedule),
    Explicit(Vec<f64>),
}

impl PenaltySequence {
    /// The default `β_k = (1+k)²`.
    pub fn default_power() -> Self {
        PenaltySequence::Schedule(Schedule::power(1.0, 2.0).expect("valid schedule"))
    }

    pub fn value(&self, k: usize) -> Result<f64> {
        match self {
            PenaltySequence::Schedule(s) => Ok(s.value(k as f64)),
            PenaltySequence::Explicit(v) => v.get(k).copied().ok_or_else(|| {
                Error::invalid(format!("penalty sequence has {} entries, index {k} requested", v.len()))
            }),
        }
    }

    /// Positive, finite and increasing (strictly if `strict`) over the first `n` terms.
    pub fn validate(&self, n: usize, strict: bool) -> Result<()> {
        let mut last = 0.0;
        for k in 0..n {
            let b = self.value(k)?;
            let ok = b.is_finite() && b > 0.0 && if strict { b > last } else { b >= last };
            if !ok {
                return Err(Error::invalid(format!(
                    "penalty sequence must be positive and increasing; beta_{k} = {b} after {last}"
                )));
            }
            last = b;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LimitMethod {
    /// Dense factorization of the saddle-point system.
    Kkt,
    /// Null-space reduction; used when the saddle system is singular.
    NullSpace,
    /// Penalty continuation, reporting the last weight used.
    Penalty { beta: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitSolution {
    pub point: Point,
    /// Multiplier of the affine constraints, when there are any.
    pub multiplier: Option<DVector<f64>>,
    /// The solution set has more than one point; `point` is its minimum-norm member.
    pub nonunique: bool,
    pub method: LimitMethod,
    /// `‖M x + q + Aᵀμ‖`; for penalty solutions the projected-gradient residual
    /// (NaN when Φ is not differentiable).
    pub stationarity: f64,
    /// Distance to the constraint set.
    pub feasibility: f64,
}

/// Constraint data `{A x = b}` for sets the linear path handles.
fn affine_data(set: &ArgminSet, n: usize) -> Option<(DMatrix<f64>, DVector<f64>)> {
    match set {
        ArgminSet::Affine(s) => Some((s.matrix().clone(), s.rhs().clone())),
        ArgminSet::WholeSpace(_) => Some((DMatrix::zeros(0, n), DVector::zeros(0))),
        ArgminSet::Singleton(z) => Some((DMatrix::identity(n, n), z.clone())),
        _ => None,
    }
}

/// `x ∈ {Ax = b}` with `M x + q ∈ range(Aᵀ)`, i.e. the variational inequality
/// of `x ↦ Mx + q` over the affine set; for symmetric `M` the KKT system of
/// the quadratic program.
fn affine_equilibrium(m: &DMatrix<f64>, q: &DVector<f64>, a: &DMatrix<f64>, b: &DVector<f64>) -> Result<LimitSolution> {
    let n = q.len();
    let rows = a.nrows();
    let basis = null_space(a);
    let reduced = basis.transpose() * m * &basis;
    let x_p = pinv(a) * b;
    let g = -(basis.transpose() * (m * &x_p + q));
    let k = basis.ncols();
    let full = rank(&reduced) == k;
    let scale = 1.0 + m.norm() + q.norm() + a.norm() + b.norm();

    let (x, mu, method) = if full && rank(a) == rows {
        let mut kkt = DMatrix::zeros(n + rows, n + rows);
        kkt.view_mut((0, 0), (n, n)).copy_from(m);
        kkt.view_mut((0, n), (n, rows)).copy_from(&a.transpose());
        kkt.view_mut((n, 0), (rows, n)).copy_from(a);
        let mut rhs = DVector::zeros(n + rows);
        rhs.rows_mut(0, n).copy_from(&(-q));
        rhs.rows_mut(n, rows).copy_from(b);
        let sol = solve(&kkt, &rhs)?;
        (sol.rows(0, n).into_owned(), sol.rows(n, rows).into_owned(), LimitMethod::Kkt)
    } else {
        let y = if full {
            solve(&reduced, &g)?
        } else {
            let y = pinv(&reduced) * &g;
            if (&reduced * &y - &g).norm() > 1e-9 * (1.0 + g.norm()) {
                return Err(Error::invalid(
                    "limit problem has no solution: objective unbounded below on the constraint set",
                ));
            }
            y
        };
        let x = &x_p + &basis * y;
        let mu = pinv(&a.transpose()) * (-(m * &x + q));
        (x, mu, LimitMethod::NullSpace)
    };
    let stationarity = (m * &x + q + a.transpose() * &mu).norm();
    let feasibility = (a * &x - b).norm();
    if !(stationarity <= 1e-8 * scale && feasibility <= 1e-8 * scale) {
        return Err(Error::numerical(format!(
            "saddle-point solve inaccurate: stationarity {stationarity:e}, feasibility {feasibility:e}"
        )));
    }
    Ok(LimitSolution {
        point: x,
        multiplier: (rows > 0).then_some(mu),
        nonunique: !full,
        method,
        stationarity,
        feasibility,
    })
}

/// A point of `S = argmin{Φ : x ∈ argmin Ψ}`.
pub fn limit_solution(phi: &ConvexFunction, psi: &ConvexFunction) -> Result<LimitSolution> {
    check_dim(phi.dim(), psi.dim())?;
    let set = psi
        .argmin_set()
        .ok_or_else(|| Error::unsupported("psi has no representable zero set"))?;
    let n = phi.dim();
    if let (Some(q), Some((a, b))) = (phi.as_quadratic(), affine_data(&set, n)) {
        return affine_equilibrium(&q.q, &q.c, &a, &b);
    }
    penalty_solution(phi, psi, &standard_weights())
}

/// The unique solution of the variational inequality of `A` over `argmin Ψ`.
pub fn monotone_equilibrium(op: &MonotoneOperator, psi: &ConvexFunction) -> Result<LimitSolution> {
    check_dim(op.dim(), psi.dim())?;
    let set = psi
        .argmin_set()
        .ok_or_else(|| Error::unsupported("psi has no representable zero set"))?;
    let (m, q) = op
        .as_affine()
        .ok_or_else(|| Error::unsupported("equilibrium oracle needs a single-valued affine operator"))?;
    let (a, b) = affine_data(&set, op.dim())
        .ok_or_else(|| Error::unsupported("equilibrium oracle needs an affine constraint set"))?;
    affine_equilibrium(&m, &q, &a, &b)
}

/// `{10², 10⁴, 10⁶, 10⁸}`.
pub fn standard_weights() -> Vec<f64> {
    vec![1e2, 1e4, 1e6, 1e8]
}

/// Feasibility target of the penalty path.
pub const PENALTY_FEASIBILITY: f64 = 1e-8;
const PENALTY_MAX_BETA: f64 = 1e16;
const PROX_POINT_MAX_ITER: usize = 20_000;

/// Minimizers of `Φ + (β/2) dist²(·, C)` along increasing `β`, warm-started;
/// continues past the listed weights (×100) until the feasibility target.
pub fn penalty_solution(phi: &ConvexFunction, psi: &ConvexFunction, weights: &[f64]) -> Result<LimitSolution> {
    check_dim(phi.dim(), psi.dim())?;
    let set = psi
        .argmin_set()
        .ok_or_else(|| Error::unsupported("psi has no representable zero set"))?;
    if weights.is_empty() {
        return Err(Error::invalid("penalty continuation needs at least one weight"));
    }
    let n = phi.dim();
    let mut x = set.project(&DVector::zeros(n));
    let mut schedule = weights.to_vec();
    let mut i = 0;
    loop {
        let beta = schedule[i];
        x = penalized_minimizer(phi, &set, beta, &x)?;
        let feasibility = set.distance(&x);
        if i + 1 < schedule.len() {
            i += 1;
            continue;
        }
        if feasibility <= PENALTY_FEASIBILITY {
            let stationarity = match phi.gradient(&x) {
                Some(g) => {
                    let p = set.project(&(&x - &g));
                    (&x - p).norm()
                }
                None => f64::NAN,
            };
            return Ok(LimitSolution {
                point: x,
                multiplier: None,
                nonunique: false,
                method: LimitMethod::Penalty { beta },
                stationarity,
                feasibility,
            });
        }
        if beta * 100.0 > PENALTY_MAX_BETA {
            return Err(Error::NonConvergence {
                what: "penalty continuation",
                iterations: schedule.len(),
                residual: feasibility,
            });
        }
        schedule.push(beta * 100.0);
        i += 1;
    }
}

/// Minimizer of `½xᵀQx + cᵀx + (β/2)dist²(x, {Ax = b})`, solved in the
/// coordinates `x = N y + R w` (null space and row space of `A`) so the
/// large weight only touches the diagonal of the `w` block.
fn penalized_quadratic(q: &DMatrix<f64>, c: &DVector<f64>, a: &DMatrix<f64>, b: &DVector<f64>, beta: f64) -> Result<Point> {
    let n = c.len();
    let nb = null_space(a);
    let rb = null_space(&nb.transpose());
    let (k, r) = (nb.ncols(), rb.ncols());
    let w_p = rb.transpose() * (pinv(a) * b);
    let d = rb.transpose() * q * &rb + DMatrix::identity(r, r) * beta;
    let f_w = -(rb.transpose() * c) + &w_p * beta;
    if k == 0 {
        return Ok(&rb * solve(&d, &f_w)?);
    }
    let q_nr = nb.transpose() * q * &rb;
    let d_inv_f = solve(&d, &f_w)?;
    let d_inv_qrn = solve_columns(&d, &q_nr.transpose())?;
    let schur = nb.transpose() * q * &nb - &q_nr * &d_inv_qrn;
    let rhs = -(nb.transpose() * c) - &q_nr * &d_inv_f;
    let y = match solve(&schur, &rhs) {
        Ok(y) if rank(&schur) == k => y,
        _ => {
            let y = pinv(&schur) * &rhs;
            if (&schur * &y - &rhs).norm() > 1e-8 * (1.0 + rhs.norm()) {
                return Err(Error::invalid("penalized problem unbounded below"));
            }
            y
        }
    };
    let w = d_inv_f - d_inv_qrn * &y;
    let x = &nb * y + &rb * w;
    debug_assert_eq!(x.len(), n);
    Ok(x)
}

fn solve_columns(m: &DMatrix<f64>, rhs: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    m.clone()
        .lu()
        .solve(rhs)
        .ok_or_else(|| Error::numerical("singular block in penalized solve"))
}

fn penalized_minimizer(phi: &ConvexFunction, set: &ArgminSet, beta: f64, x0: &Point) -> Result<Point> {
    if let (Some(q), ArgminSet::Affine(s)) = (phi.as_quadratic(), set) {
        return penalized_quadratic(&q.q, &q.c, s.matrix(), s.rhs(), beta);
    }
    // Proximal-point iterations with unit step on Φ + (β/2)dist².
    let mut x = x0.clone();
    for _ in 0..PROX_POINT_MAX_ITER {
        let next = resolvent_of_sum(
            "penalized prox step",
            |g, v| phi.prox(g, v),
            |g, v| {
                let w = g * beta;
                Ok((v + set.project(v) * w) / (1.0 + w))
            },
            1.0,
            &x,
        )?
        .point;
        let moved = (&next - &x).norm();
        x = next;
        if x.norm() > 1e12 {
            return Err(Error::invalid("penalized problem appears unbounded below"));
        }
        if moved <= 1e-13 * x.norm().max(1.0) {
            return Ok(x);
        }
    }
    Err(Error::NonConvergence {
        what: "proximal point on penalized objective",
        iterations: PROX_POINT_MAX_ITER,
        residual: f64::NAN,
    })
}
