//! Implicit time stepping of `ẋ + ∂Φ(x) + β(t)∂Ψ(x) ∋ 0` and of its
//! monotone-operator counterpart `ẋ + A x + β(t)∂Ψ(x) ∋ 0`.

use nalgebra::DMatrix;

use crate::convex::ConvexFunction;
use crate::error::{check_dim, Error, Result};
use crate::linalg::{solve, solve_spd, Point};
use crate::operator::MonotoneOperator;
use crate::schedule::{Direction, Schedule};
use crate::splitting::{resolvent_of_sum, InnerSolve};

/// Which parameter multiplies which term in the gradient system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parameterization {
    /// `ẋ + ∂Φ + β(t)∂Ψ ∋ 0`
    Beta,
    /// `ẋ + ε(t)∂Φ + ∂Ψ ∋ 0`
    Epsilon,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheme {
    /// `x⁺ = J_{hT(t+h)} x`
    #[default]
    BackwardEuler,
    /// `x⁺ = 2 J_{(h/2)T(t+h/2)} x − x`, second order and norm-preserving for
    /// skew linear parts.
    Midpoint,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Problem {
    Gradient {
        phi: ConvexFunction,
        psi: ConvexFunction,
        schedule: Schedule,
        parameterization: Parameterization,
    },
    Monotone {
        op: MonotoneOperator,
        psi: ConvexFunction,
        schedule: Schedule,
    },
}

fn check_psi(psi: &ConvexFunction) -> Result<()> {
    if !psi.has_argmin_set() {
        return Err(Error::invalid(
            "psi must be nonnegative with a nonempty, representable zero set",
        ));
    }
    Ok(())
}

impl Problem {
    pub fn gradient(
        phi: ConvexFunction,
        psi: ConvexFunction,
        schedule: Schedule,
        parameterization: Parameterization,
    ) -> Result<Self> {
        check_dim(phi.dim(), psi.dim())?;
        check_psi(&psi)?;
        let want = match parameterization {
            Parameterization::Beta => Direction::Beta,
            Parameterization::Epsilon => Direction::Epsilon,
        };
        if schedule.direction() != want {
            return Err(Error::invalid(format!(
                "schedule direction {:?} does not match the {:?} parameterization",
                schedule.direction(),
                parameterization
            )));
        }
        Ok(Problem::Gradient {
            phi,
            psi,
            schedule,
            parameterization,
        })
    }

    pub fn monotone(op: MonotoneOperator, psi: ConvexFunction, schedule: Schedule) -> Result<Self> {
        check_dim(op.dim(), psi.dim())?;
        check_psi(&psi)?;
        if schedule.direction() != Direction::Beta {
            return Err(Error::invalid("monotone problems take a growing (beta) schedule"));
        }
        Ok(Problem::Monotone { op, psi, schedule })
    }

    pub fn dim(&self) -> usize {
        self.psi().dim()
    }

    pub fn psi(&self) -> &ConvexFunction {
        match self {
            Problem::Gradient { psi, .. } | Problem::Monotone { psi, .. } => psi,
        }
    }

    pub fn schedule(&self) -> &Schedule {
        match self {
            Problem::Gradient { schedule, .. } | Problem::Monotone { schedule, .. } => schedule,
        }
    }

    pub fn parameterization(&self) -> Parameterization {
        match self {
            Problem::Gradient { parameterization, .. } => *parameterization,
            Problem::Monotone { .. } => Parameterization::Beta,
        }
    }

    /// Φ itself, or the potential of `A` when `A` is a gradient.
    pub fn phi(&self) -> Option<ConvexFunction> {
        match self {
            Problem::Gradient { phi, .. } => Some(phi.clone()),
            Problem::Monotone { op, .. } => op.potential(),
        }
    }

    /// Strong monotonicity modulus of `A` (of `∂Φ` for gradient problems).
    pub fn modulus(&self) -> f64 {
        match self {
            Problem::Gradient { phi, .. } => MonotoneOperator::subdifferential(phi.clone()).modulus(),
            Problem::Monotone { op, .. } => op.modulus(),
        }
    }

    /// The penalty weight `β(t)`; `1/ε(t)` in the ε parameterization.
    pub fn beta(&self, t: f64) -> f64 {
        match self.parameterization() {
            Parameterization::Beta => self.schedule().value(t),
            Parameterization::Epsilon => 1.0 / self.schedule().value(t),
        }
    }

    /// Weights `(w_A, w_Ψ)` multiplying the two terms at time `t`.
    fn weights(&self, t: f64) -> Result<(f64, f64)> {
        let v = self.schedule().value(t);
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::numerical(format!("schedule value {v} at t = {t} is unusable")));
        }
        Ok(match self.parameterization() {
            Parameterization::Beta => (1.0, v),
            Parameterization::Epsilon => (v, 1.0),
        })
    }
}

/// `(I + h(w_A A + w_Ψ ∂Ψ))⁻¹ x` with the weights taken at `t`.
fn implicit(problem: &Problem, x: &Point, t: f64, h: f64) -> Result<InnerSolve> {
    let (wa, wp) = problem.weights(t)?;
    let n = x.len();
    let direct = |m: DMatrix<f64>, rhs: Point, spd: bool| -> Result<InnerSolve> {
        let u = if spd { solve_spd(&m, &rhs)? } else { solve(&m, &rhs)? };
        let residual = (&m * &u - &rhs).norm();
        Ok(InnerSolve {
            point: u,
            residual,
            iterations: 1,
        })
    };
    match problem {
        Problem::Gradient { phi, psi, .. } => {
            if let (Some(qa), Some(qp)) = (phi.as_quadratic(), psi.as_quadratic()) {
                let m = DMatrix::identity(n, n) + (&qa.q * wa + &qp.q * wp) * h;
                let rhs = x - (&qa.c * wa + &qp.c * wp) * h;
                return direct(m, rhs, true);
            }
            if let ConvexFunction::Zero { .. } = phi {
                return exact(psi.prox(h * wp, x)?);
            }
            if let ConvexFunction::Zero { .. } = psi {
                return exact(phi.prox(h * wa, x)?);
            }
            resolvent_of_sum(
                "implicit step",
                |g, v| phi.prox(g * h * wa, v),
                |g, v| psi.prox(g * h * wp, v),
                1.0,
                x,
            )
        }
        Problem::Monotone { op, psi, .. } => {
            if let (Some((ma, qa)), Some(qp)) = (op.as_affine(), psi.as_quadratic()) {
                let m = DMatrix::identity(n, n) + (ma * wa + &qp.q * wp) * h;
                let rhs = x - (qa * wa + &qp.c * wp) * h;
                return direct(m, rhs, false);
            }
            if let ConvexFunction::Zero { .. } = psi {
                return exact(op.resolvent(h * wa, x)?);
            }
            resolvent_of_sum(
                "implicit step",
                |g, v| op.resolvent(g * h * wa, v),
                |g, v| psi.prox(g * h * wp, v),
                1.0,
                x,
            )
        }
    }
}

fn exact(point: Point) -> Result<InnerSolve> {
    Ok(InnerSolve {
        point,
        residual: 0.0,
        iterations: 1,
    })
}

fn advance(problem: &Problem, x: &Point, t: f64, h: f64, scheme: Scheme) -> Result<InnerSolve> {
    check_dim(problem.dim(), x.len())?;
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::invalid(format!("step size must be positive, got {h}")));
    }
    match scheme {
        Scheme::BackwardEuler => implicit(problem, x, t + h, h),
        Scheme::Midpoint => {
            let mut half = implicit(problem, x, t + 0.5 * h, 0.5 * h)?;
            half.point = &half.point * 2.0 - x;
            Ok(half)
        }
    }
}

/// One backward-Euler step of the gradient system, landing at `t_next`.
pub fn step(problem: &Problem, x: &Point, t_next: f64, h: f64) -> Result<Point> {
    if !matches!(problem, Problem::Gradient { .. }) {
        return Err(Error::invalid("step expects a gradient problem; use step_mami"));
    }
    Ok(advance(problem, x, t_next - h, h, Scheme::BackwardEuler)?.point)
}

/// One backward-Euler step of the monotone system, landing at `t_next`.
pub fn step_mami(problem: &Problem, x: &Point, t_next: f64, h: f64) -> Result<Point> {
    if !matches!(problem, Problem::Monotone { .. }) {
        return Err(Error::invalid("step_mami expects a monotone problem; use step"));
    }
    Ok(advance(problem, x, t_next - h, h, Scheme::BackwardEuler)?.point)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub h: f64,
    pub t_end: f64,
    pub probes: Vec<Point>,
    pub scheme: Scheme,
}

impl RunConfig {
    pub fn new(h: f64, t_end: f64) -> Self {
        RunConfig {
            h,
            t_end,
            probes: Vec::new(),
            scheme: Scheme::BackwardEuler,
        }
    }

    pub fn with_probes(mut self, probes: Vec<Point>) -> Self {
        self.probes = probes;
        self
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    /// The uniform grid `0, h, 2h, …`, closed with a shorter last step at `t_end`.
    pub fn grid(&self) -> Vec<f64> {
        let n = ((self.t_end / self.h) - 1e-9).ceil().max(1.0) as usize;
        (0..=n)
            .map(|k| if k == n { self.t_end } else { k as f64 * self.h })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub t: f64,
    pub phi: f64,
    pub psi: f64,
    pub beta: f64,
    pub beta_psi: f64,
    /// `Φ/β + Ψ`
    pub e1: f64,
    /// `Φ + βΨ`
    pub e2: f64,
    /// `½‖x − z‖²` per probe.
    pub hz: Vec<f64>,
    pub velocity: Point,
    /// Residual of the inner solve that produced this state.
    pub residual: f64,
    /// Trapezoid `∫₀ᵗ βΨ` in β-time, which is `∫₀ᵗ Ψ` in ε-time.
    pub cum_beta_psi: f64,
    pub ergodic_mean: Point,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub problem: Problem,
    pub probes: Vec<Point>,
    pub times: Vec<f64>,
    pub states: Vec<Point>,
    pub records: Vec<StepRecord>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last_state(&self) -> &Point {
        self.states.last().expect("trajectory holds the initial state")
    }

    pub fn last_record(&self) -> &StepRecord {
        self.records.last().expect("trajectory holds the initial record")
    }

    /// Linear interpolation of the state at time `t` within the grid.
    pub fn state_at(&self, t: f64) -> Option<Point> {
        let k = self.times.partition_point(|s| *s < t);
        if k == 0 {
            return (self.times.first() == Some(&t)).then(|| self.states[0].clone());
        }
        if k == self.times.len() {
            return None;
        }
        let (t0, t1) = (self.times[k - 1], self.times[k]);
        let w = (t - t0) / (t1 - t0);
        Some(&self.states[k - 1] * (1.0 - w) + &self.states[k] * w)
    }
}

/// A run aborted by a step error, with everything computed before it.
#[derive(Debug)]
pub struct RunFailure {
    pub error: Error,
    pub partial: Option<Trajectory>,
}

impl std::fmt::Display for RunFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.partial {
            Some(p) => write!(f, "{} (after {} steps, t = {})", self.error, p.len() - 1, p.times[p.len() - 1]),
            None => write!(f, "{}", self.error),
        }
    }
}

impl std::error::Error for RunFailure {}

#[allow(clippy::too_many_arguments)]
fn record(
    problem: &Problem,
    phi: Option<&ConvexFunction>,
    probes: &[Point],
    t: f64,
    x: &Point,
    velocity: Point,
    residual: f64,
    prev: Option<(&StepRecord, f64)>,
    prev_x: Option<&Point>,
) -> Result<StepRecord> {
    let phi_val = match phi {
        Some(f) => f.eval(x)?,
        None => f64::NAN,
    };
    let psi_val = problem.psi().eval(x)?;
    let beta = problem.beta(t);
    let beta_psi = beta * psi_val;
    let density = |r_beta_psi: f64, r_psi: f64| match problem.parameterization() {
        Parameterization::Beta => r_beta_psi,
        Parameterization::Epsilon => r_psi,
    };
    let (cum, mean) = match (prev, prev_x) {
        (Some((p, h)), Some(px)) => {
            let cum = p.cum_beta_psi + 0.5 * h * (density(p.beta_psi, p.psi) + density(beta_psi, psi_val));
            // Running mean updated in place so a constant path stays exact.
            let mid = (px + x) * 0.5;
            let mean = &p.ergodic_mean + (mid - &p.ergodic_mean) * (h / t);
            (cum, mean)
        }
        _ => (0.0, x.clone()),
    };
    Ok(StepRecord {
        t,
        phi: phi_val,
        psi: psi_val,
        beta,
        beta_psi,
        e1: phi_val / beta + psi_val,
        e2: phi_val + beta_psi,
        hz: probes.iter().map(|z| 0.5 * (x - z).norm_squared()).collect(),
        velocity,
        residual,
        cum_beta_psi: cum,
        ergodic_mean: mean,
    })
}

/// Integrate from `x0` at `t = 0` to `cfg.t_end` on the uniform grid.
pub fn run(problem: &Problem, x0: &Point, cfg: &RunConfig) -> std::result::Result<Trajectory, RunFailure> {
    let fail = |error| RunFailure { error, partial: None };
    if !(cfg.h > 0.0 && cfg.h.is_finite()) {
        return Err(fail(Error::invalid(format!("step size h must be positive, got {}", cfg.h))));
    }
    if !(cfg.t_end > 0.0 && cfg.t_end.is_finite()) {
        return Err(fail(Error::invalid(format!("t_end must be positive, got {}", cfg.t_end))));
    }
    check_dim(problem.dim(), x0.len()).map_err(fail)?;
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(fail(Error::invalid("initial state must be finite")));
    }
    for z in &cfg.probes {
        check_dim(problem.dim(), z.len()).map_err(fail)?;
    }
    let phi = problem.phi();
    let grid = cfg.grid();
    let first = record(problem, phi.as_ref(), &cfg.probes, 0.0, x0, Point::zeros(x0.len()), 0.0, None, None)
        .map_err(fail)?;
    let mut traj = Trajectory {
        problem: problem.clone(),
        probes: cfg.probes.clone(),
        times: vec![0.0],
        states: vec![x0.clone()],
        records: vec![first],
    };
    for w in grid.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        let h = t1 - t0;
        let x = traj.last_state().clone();
        let outcome = advance(problem, &x, t0, h, cfg.scheme).and_then(|s| {
            if s.point.iter().any(|v| !v.is_finite()) {
                return Err(Error::numerical(format!("state became non-finite at t = {t1}")));
            }
            let velocity = (&s.point - &x) / h;
            let rec = record(
                problem,
                phi.as_ref(),
                &cfg.probes,
                t1,
                &s.point,
                velocity,
                s.residual,
                Some((traj.last_record(), h)),
                Some(&x),
            )?;
            Ok((s.point, rec))
        });
        match outcome {
            Ok((x1, rec)) => {
                traj.times.push(t1);
                traj.states.push(x1);
                traj.records.push(rec);
            }
            Err(error) => {
                return Err(RunFailure {
                    error,
                    partial: Some(traj),
                })
            }
        }
    }
    Ok(traj)
}

/// Trapezoid running mean `X(t) = (1/t)∫₀ᵗ x`, with `X(0) = x(0)`.
pub fn ergodic_mean(traj: &Trajectory) -> Vec<Point> {
    let mut out: Vec<Point> = Vec::with_capacity(traj.len());
    for (k, x) in traj.states.iter().enumerate() {
        let next = match out.last() {
            None => x.clone(),
            Some(prev) => {
                let h = traj.times[k] - traj.times[k - 1];
                let mid = (&traj.states[k - 1] + x) * 0.5;
                prev + (mid - prev) * (h / traj.times[k])
            }
        };
        out.push(next);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};

    fn v(xs: &[f64]) -> Point {
        DVector::from_column_slice(xs)
    }

    fn plain(phi: ConvexFunction, psi: ConvexFunction, beta: Schedule) -> Problem {
        Problem::gradient(phi, psi, beta, Parameterization::Beta).unwrap()
    }

    #[test]
    fn step_examples() {
        let c = Schedule::constant(1.0).unwrap();
        let p = plain(ConvexFunction::zero(2).unwrap(), ConvexFunction::zero(2).unwrap(), c.clone());
        assert_eq!(step(&p, &v(&[3.0, -1.0]), 1.0, 0.5).unwrap(), v(&[3.0, -1.0]));
        let p = plain(ConvexFunction::half_squared_norm(2).unwrap(), ConvexFunction::zero(2).unwrap(), c);
        assert!((step(&p, &v(&[2.0, 0.0]), 1.0, 1.0).unwrap() - v(&[1.0, 0.0])).norm() < 1e-15);
        assert!(step_mami(&p, &v(&[2.0, 0.0]), 1.0, 1.0).is_err());
    }

    #[test]
    fn quadratic_step_matches_normal_equations() {
        let q = DMatrix::from_row_slice(3, 3, &[2.0, 0.5, 0.0, 0.5, 1.0, 0.2, 0.0, 0.2, 3.0]);
        let c = v(&[1.0, -1.0, 0.5]);
        let a = DMatrix::from_row_slice(2, 3, &[1.0, 2.0, 0.0, 0.0, 1.0, -1.0]);
        let b = v(&[1.0, 2.0]);
        let beta = 7.0;
        let p = plain(
            ConvexFunction::quadratic(q.clone(), c.clone(), 0.0).unwrap(),
            ConvexFunction::least_squares(a.clone(), b.clone()).unwrap(),
            Schedule::constant(beta).unwrap(),
        );
        let x = v(&[0.3, -0.2, 1.0]);
        let h = 0.1;
        let m = DMatrix::identity(3, 3) / h + &q + a.transpose() * &a * beta;
        let rhs = &x / h - &c + a.transpose() * &b * beta;
        let oracle = m.lu().solve(&rhs).unwrap();
        assert!((step(&p, &x, 1.0, h).unwrap() - oracle).norm() < 1e-12);
    }

    #[test]
    fn mami_examples() {
        let c = Schedule::constant(1.0).unwrap();
        let id = MonotoneOperator::affine(DMatrix::identity(2, 2), v(&[0.0, 0.0])).unwrap();
        let p = Problem::monotone(id, ConvexFunction::zero(2).unwrap(), c.clone()).unwrap();
        let x = v(&[1.0, 2.0]);
        assert!((step_mami(&p, &x, 1.0, 0.5).unwrap() - &x / 1.5).norm() < 1e-15);

        let rot = MonotoneOperator::rotation(std::f64::consts::FRAC_PI_2).unwrap();
        let p = Problem::monotone(rot, ConvexFunction::zero(2).unwrap(), c.clone()).unwrap();
        let h = 0.25;
        let expect = v(&[x[0] + h * x[1], x[1] - h * x[0]]) / (1.0 + h * h);
        assert!((step_mami(&p, &x, 1.0, h).unwrap() - expect).norm() < 1e-14);

        // A = 0 reduces to the gradient step with Φ = 0.
        let zero = MonotoneOperator::affine(DMatrix::zeros(2, 2), v(&[0.0, 0.0])).unwrap();
        let psi = ConvexFunction::sqdist_box(v(&[0.0, 0.0]), v(&[1.0, 1.0])).unwrap();
        let pm = Problem::monotone(zero, psi.clone(), c.clone()).unwrap();
        let pg = plain(ConvexFunction::zero(2).unwrap(), psi, c);
        let y = v(&[3.0, -2.0]);
        assert!((step_mami(&pm, &y, 1.0, 0.5).unwrap() - step(&pg, &y, 1.0, 0.5).unwrap()).norm() < 1e-9);
    }

    #[test]
    fn nonsmooth_step_satisfies_inclusion() {
        // Φ = ‖·‖₁, Ψ = ½dist²(·, box): DR inner loop.
        let p = plain(
            ConvexFunction::abs_sum(2).unwrap(),
            ConvexFunction::sqdist_box(v(&[1.0, -1.0]), v(&[2.0, 1.0])).unwrap(),
            Schedule::constant(3.0).unwrap(),
        );
        let x = v(&[0.2, 4.0]);
        let h = 0.5;
        let u = step(&p, &x, 1.0, h).unwrap();
        // Check against prox optimality: u minimizes Φ + 3Ψ + ‖·−x‖²/(2h) on a grid.
        let obj = |w: &Point| {
            p.phi().unwrap().eval(w).unwrap() + 3.0 * p.psi().eval(w).unwrap() + (w - &x).norm_squared() / (2.0 * h)
        };
        let best = obj(&u);
        for i in -20..=20 {
            for j in -20..=20 {
                let w = &u + v(&[i as f64 * 0.01, j as f64 * 0.01]);
                assert!(obj(&w) >= best - 1e-9);
            }
        }
    }

    #[test]
    fn steepest_descent_decays() {
        let p = plain(
            ConvexFunction::half_squared_norm(2).unwrap(),
            ConvexFunction::zero(2).unwrap(),
            Schedule::constant(1.0).unwrap(),
        );
        let traj = run(&p, &v(&[1.0, 0.0]), &RunConfig::new(0.1, 5.0)).unwrap();
        assert_eq!(traj.len(), 51);
        for w in traj.records.windows(2) {
            assert!(w[1].phi < w[0].phi);
        }
        assert!((traj.last_state()[0] - 1.1f64.powi(-50)).abs() < 1e-12);
    }

    #[test]
    fn constant_path_has_exact_mean_and_flat_diagnostics() {
        let p = plain(ConvexFunction::zero(2).unwrap(), ConvexFunction::zero(2).unwrap(), Schedule::power(1.0, 2.0).unwrap());
        let x0 = v(&[0.1, 0.7]);
        let traj = run(&p, &x0, &RunConfig::new(0.03, 2.0).with_probes(vec![v(&[0.0, 0.0])])).unwrap();
        for (m, r) in ergodic_mean(&traj).iter().zip(&traj.records) {
            assert_eq!(m, &x0);
            assert_eq!(&r.ergodic_mean, &x0);
            assert_eq!(r.hz[0], traj.records[0].hz[0]);
            assert_eq!(r.cum_beta_psi, 0.0);
        }
    }

    #[test]
    fn grid_closes_at_t_end() {
        let g = RunConfig::new(0.3, 1.0).grid();
        assert_eq!(g.len(), 5);
        assert_eq!(*g.last().unwrap(), 1.0);
        assert_eq!(RunConfig::new(0.01, 1.0).grid().len(), 101);
    }

    #[test]
    fn rotation_circle_has_small_mean() {
        let rot = MonotoneOperator::rotation(std::f64::consts::FRAC_PI_2).unwrap();
        let p = Problem::monotone(rot, ConvexFunction::zero(2).unwrap(), Schedule::constant(1.0).unwrap()).unwrap();
        let cfg = RunConfig::new(1e-2, 100.0).with_scheme(Scheme::Midpoint);
        let traj = run(&p, &v(&[1.0, 0.0]), &cfg).unwrap();
        assert!((traj.last_state().norm() - 1.0).abs() < 1e-10);
        // (1/T)|∫₀ᵀ e^{is} ds| = |e^{iT} − 1| / T ≤ 2/T
        assert!(traj.last_record().ergodic_mean.norm() <= 0.02 + 1e-4);
    }

    #[test]
    fn invalid_inputs() {
        let p = plain(ConvexFunction::zero(2).unwrap(), ConvexFunction::zero(2).unwrap(), Schedule::constant(1.0).unwrap());
        assert!(run(&p, &v(&[0.0, 0.0]), &RunConfig::new(-0.1, 1.0)).unwrap_err().error.is_validation());
        assert!(run(&p, &v(&[0.0]), &RunConfig::new(0.1, 1.0)).unwrap_err().error.is_validation());
        let eps = Schedule::power(1.0, -1.0).unwrap();
        assert!(Problem::gradient(ConvexFunction::zero(2).unwrap(), ConvexFunction::zero(2).unwrap(), eps, Parameterization::Epsilon).is_err());
        let not_psi = ConvexFunction::quadratic(DMatrix::identity(1, 1), v(&[1.0]), 0.0).unwrap();
        assert!(Problem::gradient(ConvexFunction::zero(1).unwrap(), not_psi, Schedule::constant(1.0).unwrap(), Parameterization::Beta).is_err());
    }
}
