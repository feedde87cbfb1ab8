//! Running a scenario and rendering its trajectory and report.

use std::fmt::Write as _;

use hierflow::integrator::{run, Problem, Trajectory};
use hierflow::report::{refinement_table, summarize};
use hierflow::solvers::{limit_solution, monotone_equilibrium};
use hierflow::{Error, Point};
use nalgebra::DVector;

use crate::scenario::{OracleSpec, Scenario};

/// Rendered files of a run. `error` is set when the integrator stopped
/// early; `csv` then holds the partial trajectory and `report` is empty.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub csv: String,
    pub report: String,
    pub error: Option<Error>,
}

/// Header `t, x_*, phi, psi, beta, beta_psi, e1, e2, hz_*, xmean_*,
/// cum_beta_psi, step_norm`, one row per grid time.
pub fn trajectory_csv(traj: &Trajectory) -> String {
    let d = traj.problem.dim();
    let m = traj.probes.len();
    let mut cols = vec!["t".to_string()];
    cols.extend((0..d).map(|i| format!("x_{i}")));
    cols.extend(["phi", "psi", "beta", "beta_psi", "e1", "e2"].map(String::from));
    cols.extend((0..m).map(|j| format!("hz_{j}")));
    cols.extend((0..d).map(|i| format!("xmean_{i}")));
    cols.extend(["cum_beta_psi", "step_norm"].map(String::from));
    let mut s = cols.join(",");
    s.push('\n');
    for ((t, x), r) in traj.times.iter().zip(&traj.states).zip(&traj.records) {
        let mut row: Vec<f64> = vec![*t];
        row.extend(x.iter());
        row.extend([r.phi, r.psi, r.beta, r.beta_psi, r.e1, r.e2]);
        row.extend(&r.hz);
        row.extend(r.ergodic_mean.iter());
        row.extend([r.cum_beta_psi, r.velocity.norm()]);
        let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        let _ = writeln!(s, "{}", cells.join(","));
    }
    s
}

pub fn oracle_point(sc: &Scenario, problem: &Problem) -> hierflow::Result<Option<Point>> {
    match &sc.oracle {
        OracleSpec::None => Ok(None),
        OracleSpec::Point(z) => Ok(Some(DVector::from_column_slice(z))),
        OracleSpec::Solve => {
            let sol = match problem {
                Problem::Gradient { phi, psi, .. } => limit_solution(phi, psi)?,
                Problem::Monotone { op, psi, .. } => monotone_equilibrium(op, psi)?,
            };
            Ok(Some(sol.point))
        }
    }
}

/// Integrate, evaluate the requested tags and render both files.
/// Errors before the first step (bad tags, failed oracle) are returned
/// directly.
pub fn run_scenario(sc: &Scenario) -> hierflow::Result<RunOutput> {
    let problem = sc.problem()?;
    let x0 = sc.initial_state();
    let cfg = sc.run_config();
    let oracle = oracle_point(sc, &problem)?;
    let traj = match run(&problem, &x0, &cfg) {
        Ok(t) => t,
        Err(f) => {
            return Ok(RunOutput {
                csv: f.partial.as_ref().map(trajectory_csv).unwrap_or_default(),
                report: String::new(),
                error: Some(f.error),
            })
        }
    };
    let mut report = summarize(&traj, oracle.as_ref(), &sc.tags)?;
    if sc.refinements > 0 {
        report.refinement = refinement_table(&problem, &x0, &cfg, sc.refinements + 1)?;
    }
    Ok(RunOutput {
        csv: trajectory_csv(&traj),
        report: report.to_text(),
        error: None,
    })
}
