//! Alternating best responses with a cost to change, for two-player team games.

use nalgebra::{DMatrix, DVector};

use super::{limit_solution, LimitSolution, PenaltySequence};
use crate::convex::{build_coupling, ConvexFunction, LinearMap, QuadraticForm};
use crate::error::{check_dim, Error, Result};
use crate::linalg::{concat, min_sym_eigenvalue, solve_spd, Point};

/// Players minimize `fᵢ(xᵢ) + φ(x₁, x₂)` under the soft agreement
/// `L₁x₁ = L₂x₂`, paying `α/2`, `ν/2` times the squared move.
#[derive(Debug, Clone, PartialEq)]
pub struct Game {
    pub f1: ConvexFunction,
    pub f2: ConvexFunction,
    /// Joint quadratic `φ` on `(x₁, x₂)`; `None` for no coupling.
    pub coupling: Option<QuadraticForm>,
    pub l1: LinearMap,
    pub l2: LinearMap,
    pub alpha: f64,
    pub nu: f64,
    pub beta: PenaltySequence,
}

impl Game {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        f1: ConvexFunction,
        f2: ConvexFunction,
        coupling: Option<QuadraticForm>,
        l1: LinearMap,
        l2: LinearMap,
        alpha: f64,
        nu: f64,
        beta: PenaltySequence,
    ) -> Result<Self> {
        check_dim(f1.dim(), l1.cols())?;
        check_dim(f2.dim(), l2.cols())?;
        check_dim(l1.rows(), l2.rows())?;
        if !(alpha >= 0.0 && nu >= 0.0 && alpha.is_finite() && nu.is_finite()) {
            return Err(Error::invalid("costs to change must be nonnegative and finite"));
        }
        if let Some(phi) = &coupling {
            check_dim(f1.dim() + f2.dim(), phi.dim())?;
            if min_sym_eigenvalue(&phi.q) < -1e-10 * (1.0 + phi.q.norm()) {
                return Err(Error::invalid("coupling term must be convex (PSD Hessian)"));
            }
        }
        Ok(Game {
            f1,
            f2,
            coupling,
            l1,
            l2,
            alpha,
            nu,
            beta,
        })
    }

    fn sizes(&self) -> (usize, usize) {
        (self.f1.dim(), self.f2.dim())
    }

    /// `f₁ ⊕ f₂ + φ`.
    pub fn team_objective(&self) -> Result<ConvexFunction> {
        let sep = ConvexFunction::separable(vec![self.f1.clone(), self.f2.clone()])?;
        match &self.coupling {
            Some(phi) => ConvexFunction::sum(sep, ConvexFunction::quadratic(phi.q.clone(), phi.c.clone(), phi.r)?),
            None => Ok(sep),
        }
    }

    /// `½‖L₁x₁ − L₂x₂‖²`.
    pub fn agreement_penalty(&self) -> Result<ConvexFunction> {
        build_coupling(&self.l1, &self.l2)
    }

    /// Blocks `(P₁₁, P₁₂, P₂₂, p₁, p₂)` of the coupling.
    fn blocks(&self) -> (DMatrix<f64>, DMatrix<f64>, DMatrix<f64>, DVector<f64>, DVector<f64>) {
        let (n1, n2) = self.sizes();
        match &self.coupling {
            Some(phi) => (
                phi.q.view((0, 0), (n1, n1)).into_owned(),
                phi.q.view((0, n1), (n1, n2)).into_owned(),
                phi.q.view((n1, n1), (n2, n2)).into_owned(),
                phi.c.rows(0, n1).into_owned(),
                phi.c.rows(n1, n2).into_owned(),
            ),
            None => (
                DMatrix::zeros(n1, n1),
                DMatrix::zeros(n1, n2),
                DMatrix::zeros(n2, n2),
                DVector::zeros(n1),
                DVector::zeros(n2),
            ),
        }
    }
}

/// `argmin f(ξ) + ½ξᵀHξ − rᵀξ`, rejected unless strongly convex.
fn half_step(f: &ConvexFunction, h: &DMatrix<f64>, r: &DVector<f64>, who: &str) -> Result<Point> {
    let not_strong = || Error::invalid(format!("{who}'s best-response subproblem is not strongly convex"));
    if let Some(q) = f.as_quadratic() {
        let m = h + &q.q;
        if min_sym_eigenvalue(&m) <= 1e-12 * (1.0 + m.norm()) {
            return Err(not_strong());
        }
        return solve_spd(&m, &(r - &q.c));
    }
    let mu = min_sym_eigenvalue(h);
    if mu <= 1e-12 * (1.0 + h.norm()) {
        return Err(not_strong());
    }
    // Split off μ/2‖ξ‖²: the minimizer is prox_{(1/μ)(f + q')}(0).
    let mu = mu * (1.0 - 1e-9);
    let n = r.len();
    let rest = h - DMatrix::identity(n, n) * mu;
    let rest = (&rest + rest.transpose()) * 0.5;
    let g = ConvexFunction::sum(f.clone(), ConvexFunction::quadratic(rest, -r, 0.0)?)?;
    g.prox(1.0 / mu, &DVector::zeros(n))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BrRecord {
    pub k: usize,
    pub beta: f64,
    pub x1: Point,
    pub x2: Point,
    /// Distance of `(x₁, x₂)` to the team optimum.
    pub nash_gap: f64,
    /// `‖L₁x₁ − L₂x₂‖`
    pub residual: f64,
    /// Team objective plus `β_k` times the agreement penalty: before the
    /// iteration, after player 1 moves, after player 2 moves.
    pub potential: [f64; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct BrRun {
    pub x1: Point,
    pub x2: Point,
    pub oracle: LimitSolution,
    pub records: Vec<BrRecord>,
}

pub fn best_response_run(game: &Game, x10: &Point, x20: &Point, iters: usize) -> Result<BrRun> {
    let (n1, n2) = game.sizes();
    check_dim(n1, x10.len())?;
    check_dim(n2, x20.len())?;
    if iters == 0 {
        return Err(Error::invalid("iteration count must be positive"));
    }
    game.beta.validate(iters, true)?;
    let team = game.team_objective()?;
    let agree = game.agreement_penalty()?;
    let oracle = limit_solution(&team, &agree)?;
    let (p11, p12, p22, p1, p2) = game.blocks();
    let (l1, l2) = (game.l1.matrix(), game.l2.matrix());
    let g1 = l1.transpose() * l1;
    let g2 = l2.transpose() * l2;
    let c12 = l1.transpose() * l2;
    let potential = |beta: f64, a: &Point, b: &Point| -> Result<f64> {
        let x = concat(&[a.clone(), b.clone()]);
        Ok(team.eval(&x)? + beta * agree.eval(&x)?)
    };

    let (mut x1, mut x2) = (x10.clone(), x20.clone());
    let mut records = Vec::with_capacity(iters);
    for k in 0..iters {
        let beta = game.beta.value(k)?;
        let before = potential(beta, &x1, &x2)?;
        let h1 = &p11 + &g1 * beta + DMatrix::identity(n1, n1) * game.alpha;
        let r1 = -(&p12 * &x2) - &p1 + &c12 * &x2 * beta + &x1 * game.alpha;
        x1 = half_step(&game.f1, &h1, &r1, "player 1")?;
        let mid = potential(beta, &x1, &x2)?;
        let h2 = &p22 + &g2 * beta + DMatrix::identity(n2, n2) * game.nu;
        let r2 = -(p12.transpose() * &x1) - &p2 + c12.transpose() * &x1 * beta + &x2 * game.nu;
        x2 = half_step(&game.f2, &h2, &r2, "player 2")?;
        let after = potential(beta, &x1, &x2)?;
        let joint = concat(&[x1.clone(), x2.clone()]);
        records.push(BrRecord {
            k,
            beta,
            x1: x1.clone(),
            x2: x2.clone(),
            nash_gap: (&joint - &oracle.point).norm(),
            residual: (l1 * &x1 - l2 * &x2).norm(),
            potential: [before, mid, after],
        });
    }
    Ok(BrRun {
        x1,
        x2,
        oracle,
        records,
    })
}
