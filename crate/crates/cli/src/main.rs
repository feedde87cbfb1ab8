use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hierflow::convex::{ConvexFunction, LinearMap, QuadraticForm};
use hierflow::schedule::{
    h1_check, h1_eps_check, h2_check, h2_eps_check, rescale_to_eps, CertifiedNormal, Direction, H1Status, Schedule,
};
use hierflow::solvers::{best_response_run, dd_assemble, dd_run, Game, PenaltySequence};
use hierflow::Error;
use hierflow_cli::{parse_scenario, run_scenario};
use nalgebra::{DMatrix, DVector};

#[derive(Parser)]
#[command(name = "hierflow", version, about = "Multiscale gradient flows for hierarchical convex minimization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate scenario files and write their trajectory CSV and report.
    Run {
        #[arg(required = true)]
        scenarios: Vec<PathBuf>,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        /// Scenarios processed concurrently.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Tail test of the integral condition pairing β with Ψ.
    CheckH1 {
        #[arg(long, value_enum)]
        psi: PsiKind,
        /// Penalty schedule, e.g. "power 1 2"; an "eps ..." schedule is
        /// checked in the ε form.
        #[arg(long)]
        beta: String,
        #[arg(long, default_value_t = 1000.0)]
        horizon: f64,
        #[arg(long, default_value_t = 100.0)]
        window: f64,
    },
    /// Growth bound 0 ≤ β' ≤ kβ (or its ε form) on a sampled interval.
    CheckH2 {
        #[arg(long)]
        beta: String,
        #[arg(long)]
        k: f64,
        #[arg(long, default_value_t = 0.0)]
        t0: f64,
        #[arg(long, default_value_t = 100.0)]
        horizon: f64,
    },
    /// Table of (t, t_β, ε) from the time change between the two parameterizations.
    Rescale {
        #[arg(long)]
        beta: String,
        #[arg(long = "t", required = true, num_args = 1..)]
        times: Vec<f64>,
    },
    /// Penalized two-subdomain solve of −u'' = 1 on (0, 1).
    DdDemo {
        #[arg(long, default_value_t = 101)]
        n: usize,
        #[arg(long, default_value_t = 50)]
        split: usize,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 2000)]
        iters: usize,
        /// β_k = schedule(k).
        #[arg(long, default_value = "power 1 1")]
        beta: String,
        /// Print every this many iterations.
        #[arg(long, default_value_t = 100)]
        every: usize,
    },
    /// Alternating best responses in a two-player team game on ℝ² × ℝ².
    GameDemo {
        #[arg(long, default_value_t = 200)]
        iters: usize,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        nu: f64,
        #[arg(long, default_value = "power 1 2")]
        beta: String,
        #[arg(long, default_value_t = 10)]
        every: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PsiKind {
    /// ½ dist²(·, C)
    Sqdist,
    /// δ_C
    Indicator,
}

/// Exit status 1 for rejected input, 2 for numerical failure.
enum Failure {
    Input(String),
    Numeric(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_validation() {
            Failure::Input(e.to_string())
        } else {
            Failure::Numeric(e.to_string())
        }
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 1,
            Failure::Numeric(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Numeric(m) => m,
        }
    }
}

fn schedule(text: &str) -> Result<Schedule, Failure> {
    text.parse::<Schedule>().map_err(Failure::from)
}

fn fmt_point(v: &DVector<f64>) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x}")).collect();
    format!("[{}]", parts.join(", "))
}

/// One scenario: parse, run, write. Returns the written paths.
fn run_one(path: &Path, out_dir: &Path) -> Result<(PathBuf, PathBuf), Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("{}: cannot read: {e}", path.display())))?;
    let sc = parse_scenario(&text).map_err(|e| {
        let lines: Vec<String> = e.0.iter().map(|d| format!("{}:{d}", path.display())).collect();
        Failure::Input(lines.join("\n"))
    })?;
    let out = run_scenario(&sc).map_err(|e| match Failure::from(e) {
        Failure::Input(m) => Failure::Input(format!("{}: {m}", path.display())),
        Failure::Numeric(m) => Failure::Numeric(format!("{}: {m}", path.display())),
    })?;
    let csv = out_dir.join(&sc.csv);
    let report = out_dir.join(&sc.report);
    let write = |p: &Path, s: &str| {
        std::fs::write(p, s).map_err(|e| Failure::Numeric(format!("{}: cannot write: {e}", p.display())))
    };
    write(&csv, &out.csv)?;
    if let Some(e) = out.error {
        return Err(Failure::Numeric(format!(
            "{}: {e}; partial trajectory written to {}",
            path.display(),
            csv.display()
        )));
    }
    write(&report, &out.report)?;
    Ok((csv, report))
}

fn cmd_run(scenarios: &[PathBuf], out_dir: &Path, jobs: usize) -> Result<(), Failure> {
    if jobs == 0 {
        return Err(Failure::Input("--jobs must be at least 1".into()));
    }
    if !out_dir.is_dir() {
        return Err(Failure::Input(format!("output directory {} does not exist", out_dir.display())));
    }
    // Output names must not collide between scenarios of one invocation.
    let mut names = std::collections::BTreeSet::new();
    for p in scenarios {
        let Some(sc) = std::fs::read_to_string(p).ok().and_then(|t| parse_scenario(&t).ok()) else {
            continue;
        };
        for n in [sc.csv, sc.report] {
            if !names.insert(n.clone()) {
                return Err(Failure::Input(format!(
                    "{}: output file {n} is also written by another scenario",
                    p.display()
                )));
            }
        }
    }
    let chunk = scenarios.len().div_ceil(jobs);
    let results: Vec<Result<(PathBuf, PathBuf), Failure>> = std::thread::scope(|s| {
        let handles: Vec<_> = scenarios
            .chunks(chunk)
            .map(|group| s.spawn(move || group.iter().map(|p| run_one(p, out_dir)).collect::<Vec<_>>()))
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("worker thread panicked"))
            .collect()
    });
    let mut worst: Option<Failure> = None;
    for r in results {
        match r {
            Ok((csv, report)) => println!("wrote {} and {}", csv.display(), report.display()),
            Err(f) => {
                eprintln!("error: {}", f.message());
                if worst.as_ref().is_none_or(|w| f.code() > w.code()) {
                    worst = Some(f);
                }
            }
        }
    }
    match worst {
        // Already reported above.
        Some(f) => Err(match f {
            Failure::Input(_) => Failure::Input(String::new()),
            Failure::Numeric(_) => Failure::Numeric(String::new()),
        }),
        None => Ok(()),
    }
}

fn cmd_check_h1(psi: PsiKind, beta: &str, horizon: f64, window: f64) -> Result<(), Failure> {
    let sched = schedule(beta)?;
    // C is the line {x₀ = 0} in ℝ²; its normals at 0 are multiples of e₀.
    let a = DMatrix::from_row_slice(1, 2, &[1.0, 0.0]);
    let b = DVector::from_element(1, 0.0);
    let f = match psi {
        PsiKind::Sqdist => ConvexFunction::sqdist_affine(a, b)?,
        PsiKind::Indicator => ConvexFunction::indicator_affine(a, b)?,
    };
    let base = DVector::zeros(2);
    let normals = [1.0, -1.0]
        .iter()
        .map(|s| CertifiedNormal::new(&f, DVector::from_column_slice(&[*s, 0.0]), base.clone()))
        .collect::<Result<Vec<_>, _>>()?;
    let verdicts = match sched.direction() {
        Direction::Beta => h1_check(&f, &normals, &sched, horizon, window)?,
        Direction::Epsilon => h1_eps_check(&f, &normals, &sched, horizon, window)?,
    };
    let overall = if verdicts.iter().any(|v| v.status == H1Status::Divergent) {
        H1Status::Divergent
    } else if verdicts.iter().all(|v| v.status == H1Status::Finite) {
        H1Status::Finite
    } else {
        H1Status::Inconclusive
    };
    println!("{overall}");
    for (n, v) in normals.iter().zip(&verdicts) {
        println!(
            "p = {} status = {} partial_integral = {} tail_exponent = {} fit_residual = {} horizon = {}",
            fmt_point(n.direction()),
            v.status,
            v.partial_integral,
            v.tail_exponent,
            v.fit_residual,
            v.horizon
        );
    }
    Ok(())
}

fn cmd_check_h2(beta: &str, k: f64, t0: f64, horizon: f64) -> Result<(), Failure> {
    let sched = schedule(beta)?;
    let ok = match sched.direction() {
        Direction::Beta => h2_check(&sched, k, t0, horizon)?,
        Direction::Epsilon => h2_eps_check(&sched, k, horizon)?,
    };
    println!("{}", if ok { "holds" } else { "fails" });
    Ok(())
}

fn cmd_rescale(beta: &str, times: &[f64]) -> Result<(), Failure> {
    let sched = schedule(beta)?;
    if sched.direction() != Direction::Beta {
        return Err(Failure::Input("rescale takes a β schedule".into()));
    }
    println!("t,t_beta,eps,eps_times_beta");
    for &t in times {
        let (tb, eps) = rescale_to_eps(&sched, t)?;
        println!("{t},{tb},{eps},{}", eps * sched.value(tb));
    }
    Ok(())
}

fn every_ok(every: usize) -> Result<(), Failure> {
    if every == 0 {
        return Err(Failure::Input("--every must be at least 1".into()));
    }
    Ok(())
}

fn cmd_dd(n: usize, split: usize, alpha: f64, iters: usize, beta: &str, every: usize) -> Result<(), Failure> {
    every_ok(every)?;
    let seq = PenaltySequence::Schedule(schedule(beta)?);
    let cp = dd_assemble(n, split, |_| 1.0)?;
    let out = dd_run(&cp, alpha, &seq, iters)?;
    println!("k,beta,jump,sup_error");
    for r in &out.records {
        if r.k % every == 0 || r.k + 1 == iters {
            println!("{},{},{},{}", r.k, r.beta, r.jump, r.sup_error);
        }
    }
    Ok(())
}

fn cmd_game(iters: usize, alpha: f64, nu: f64, beta: &str, every: usize) -> Result<(), Failure> {
    every_ok(every)?;
    let seq = PenaltySequence::Schedule(schedule(beta)?);
    // Player i pulls toward its own target; the agreement constraint is x₁ = x₂.
    let f1 = ConvexFunction::quadratic(
        DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]),
        DVector::from_column_slice(&[-1.0, 0.0]),
        0.0,
    )?;
    let f2 = ConvexFunction::quadratic(
        DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 3.0]),
        DVector::from_column_slice(&[0.0, -2.0]),
        0.0,
    )?;
    let mut q = DMatrix::zeros(4, 4);
    for i in 0..4 {
        q[(i, i)] = 0.5;
    }
    q[(0, 2)] = -0.25;
    q[(2, 0)] = -0.25;
    let coupling = QuadraticForm {
        q,
        c: DVector::zeros(4),
        r: 0.0,
    };
    let game = Game::new(f1, f2, Some(coupling), LinearMap::identity(2), LinearMap::identity(2), alpha, nu, seq)?;
    let out = best_response_run(&game, &DVector::zeros(2), &DVector::zeros(2), iters)?;
    println!("k,beta,nash_gap,residual");
    for r in &out.records {
        if r.k % every == 0 || r.k + 1 == iters {
            println!("{},{},{},{}", r.k, r.beta, r.nash_gap, r.residual);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Run { scenarios, out_dir, jobs } => cmd_run(&scenarios, &out_dir, jobs),
        Command::CheckH1 {
            psi,
            beta,
            horizon,
            window,
        } => cmd_check_h1(psi, &beta, horizon, window),
        Command::CheckH2 { beta, k, t0, horizon } => cmd_check_h2(&beta, k, t0, horizon),
        Command::Rescale { beta, times } => cmd_rescale(&beta, &times),
        Command::DdDemo {
            n,
            split,
            alpha,
            iters,
            beta,
            every,
        } => cmd_dd(n, split, alpha, iters, &beta, every),
        Command::GameDemo {
            iters,
            alpha,
            nu,
            beta,
            every,
        } => cmd_game(iters, alpha, nu, &beta, every),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if !f.message().is_empty() {
                eprintln!("error: {}", f.message());
            }
            ExitCode::from(f.code())
        }
    }
}
