//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion.
//!
//! Oracles (KKT systems, closed-form integrals) are computed here from the
//! raw problem data, not through the library's own solvers.

use std::io::Write;
use std::path::Path;
use std::process::Command;

use hierflow::convex::{ConvexFunction, LinearMap, QuadraticForm};
use hierflow::integrator::{run, Parameterization, Problem, RunConfig, Scheme, Trajectory};
use hierflow::operator::MonotoneOperator;
use hierflow::report::{convergence_report, Verdict};
use hierflow::schedule::{h1_check, CertifiedNormal, H1Status, Schedule};
use hierflow::solvers::{best_response_run, dd_assemble, dd_run, Game, PenaltySequence};
use hierflow::Point;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Criteria that fail by construction of their own parameters; see README.
const KNOWN_UNATTAINABLE: &[usize] = &[6, 8];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// Each criterion draws its random data from a generator seeded by its number.
fn rng(criterion: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(criterion)
}

fn uniform(r: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| r.random_range(-1.0..1.0))
}

fn uvec(r: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| r.random_range(-1.0..1.0))
}

/// The ℝ⁵ hierarchical instance shared by criteria 1, 2, 3, 7 and 11.
struct Instance {
    q: DMatrix<f64>,
    c: DVector<f64>,
    a: DMatrix<f64>,
    b: DVector<f64>,
    x0: Point,
}

impl Instance {
    fn new() -> Self {
        let mut r = rng(1);
        let m = uniform(&mut r, 5, 5);
        let q = m.transpose() * &m + DMatrix::identity(5, 5) * 0.5;
        let c = uvec(&mut r, 5);
        let a = uniform(&mut r, 2, 5);
        let b = uvec(&mut r, 2);
        let x0 = uvec(&mut r, 5) * 2.0;
        Instance { q, c, a, b, x0 }
    }

    fn phi(&self) -> ConvexFunction {
        ConvexFunction::quadratic(self.q.clone(), self.c.clone(), 0.0).unwrap()
    }

    fn psi(&self) -> ConvexFunction {
        ConvexFunction::least_squares(self.a.clone(), self.b.clone()).unwrap()
    }

    fn problem(&self) -> Problem {
        Problem::gradient(self.phi(), self.psi(), Schedule::power(1.0, 2.0).unwrap(), Parameterization::Beta).unwrap()
    }

    /// `[Q Aᵀ; A 0] [x; μ] = [−c; b]`.
    fn kkt(&self) -> Point {
        kkt(&self.q, &self.c, &self.a, &self.b)
    }

    fn run(&self, h: f64, t_end: f64) -> Trajectory {
        run(&self.problem(), &self.x0, &RunConfig::new(h, t_end)).unwrap()
    }
}

fn kkt(m: &DMatrix<f64>, q: &DVector<f64>, a: &DMatrix<f64>, b: &DVector<f64>) -> Point {
    let (n, p) = (m.nrows(), a.nrows());
    let mut k = DMatrix::zeros(n + p, n + p);
    k.view_mut((0, 0), (n, n)).copy_from(m);
    k.view_mut((0, n), (n, p)).copy_from(&a.transpose());
    k.view_mut((n, 0), (p, n)).copy_from(a);
    let mut rhs = DVector::zeros(n + p);
    rhs.rows_mut(0, n).copy_from(&(-q));
    rhs.rows_mut(n, p).copy_from(b);
    k.lu().solve(&rhs).unwrap().rows(0, n).into_owned()
}

fn c1_hierarchical_convergence() -> Outcome {
    let inst = Instance::new();
    let traj = inst.run(1e-2, 200.0);
    let err = (traj.last_state() - inst.kkt()).norm();
    outcome(err <= 1e-3, format!("|x(200) - x*| = {err:e} (<= 1e-3)"))
}

fn c2_minimizing_properties() -> Outcome {
    let inst = Instance::new();
    let t200 = inst.run(1e-2, 200.0);
    let t400 = inst.run(1e-2, 400.0);
    let first = &t200.records[0];
    let last = t200.last_record();
    let psi_ok = last.psi <= 1e-6;
    let decay = last.beta_psi / first.beta_psi;
    let growth = t400.last_record().cum_beta_psi / last.cum_beta_psi;
    outcome(
        psi_ok && decay <= 1e-3 && growth <= 1.1,
        format!(
            "psi(x(200)) = {:e} (<= 1e-6), beta*psi ratio = {decay:e} (<= 1e-3), cum ratio 400/200 = {growth:.6} (<= 1.1)",
            last.psi
        ),
    )
}

fn c3_energy_limits() -> Outcome {
    let inst = Instance::new();
    let traj = inst.run(1e-2, 200.0);
    let z = inst.kkt();
    let phi_star = 0.5 * z.dot(&(&inst.q * &z)) + inst.c.dot(&z);
    let e1_0 = traj.records[0].e1;
    let last = traj.last_record();
    let e1_ok = last.e1 <= 1e-3 * (1.0 + e1_0.abs());
    let gap = (last.e2 - phi_star).abs();
    let e2_ok = gap <= 1e-3 * (1.0 + phi_star.abs());
    outcome(
        e1_ok && e2_ok,
        format!("E1(200) = {:e} (E1(0) = {e1_0:.4}), |E2(200) - phi(x*)| = {gap:e}", last.e1),
    )
}

fn c4_h1_verdicts() -> Outcome {
    // C = {x₀ = 0} in ℝ²; normal directions ±e₀ at the origin.
    let a = DMatrix::from_row_slice(1, 2, &[1.0, 0.0]);
    let b = DVector::zeros(1);
    let sq = ConvexFunction::sqdist_affine(a.clone(), b.clone()).unwrap();
    let ind = ConvexFunction::indicator_affine(a, b).unwrap();
    let normals = |f: &ConvexFunction| {
        [1.0, -1.0]
            .map(|s| CertifiedNormal::new(f, DVector::from_column_slice(&[s, 0.0]), DVector::zeros(2)).unwrap())
    };
    let verdict = |f: &ConvexFunction, p: f64| {
        let vs = h1_check(f, &normals(f), &Schedule::power(1.0, p).unwrap(), 1000.0, 100.0).unwrap();
        if vs.iter().all(|v| v.status == H1Status::Finite) {
            H1Status::Finite
        } else if vs.iter().any(|v| v.status == H1Status::Divergent) {
            H1Status::Divergent
        } else {
            H1Status::Inconclusive
        }
    };
    // For ½dist² the integrand is ‖p‖²/(2β), so the condition holds iff ∫1/β < ∞:
    // ∫₀^∞ (1+t)^(−p) dt is finite exactly for p > 1. For δ_C the integrand vanishes.
    let analytic = |p: f64| if p > 1.0 { H1Status::Finite } else { H1Status::Divergent };
    let cases = [
        ("sqdist, (1+t)^2", verdict(&sq, 2.0), analytic(2.0), H1Status::Finite),
        ("sqdist, (1+t)", verdict(&sq, 1.0), analytic(1.0), H1Status::Divergent),
        ("indicator, (1+t)", verdict(&ind, 1.0), H1Status::Finite, H1Status::Finite),
    ];
    let pass = cases.iter().all(|(_, got, an, want)| got == an && got == want);
    let detail = cases
        .iter()
        .map(|(name, got, _, _)| format!("{name}: {got}"))
        .collect::<Vec<_>>()
        .join(", ");
    outcome(pass, detail)
}

fn c5_ergodic_only() -> Outcome {
    let rot = MonotoneOperator::rotation(std::f64::consts::FRAC_PI_2).unwrap();
    let p = Problem::monotone(rot, ConvexFunction::zero(2).unwrap(), Schedule::constant(1.0).unwrap()).unwrap();
    let cfg = RunConfig::new(1e-3, 100.0).with_scheme(Scheme::Midpoint);
    let traj = run(&p, &DVector::from_column_slice(&[1.0, 0.0]), &cfg).unwrap();
    let norm = traj.last_state().norm();
    let mean = traj.last_record().ergodic_mean.norm();
    let verdict = convergence_report(&traj, None).verdict;
    outcome(
        (0.99..=1.0 + 1e-12).contains(&norm) && mean <= 0.05 && verdict == Verdict::ErgodicOnly,
        format!("|x(100)| = {norm:.12}, |X(100)| = {mean:.6}, verdict {verdict}"),
    )
}

fn c6_strong_monotonicity() -> Outcome {
    let n = 4;
    let mut r = rng(6);
    let k = uniform(&mut r, n, n);
    // Symmetric part exactly the identity: modulus 1.
    let m = DMatrix::identity(n, n) + (&k - k.transpose()) * 0.5;
    let q = uvec(&mut r, n);
    let a = uniform(&mut r, 2, n);
    let b = uvec(&mut r, 2);
    let op = MonotoneOperator::affine(m.clone(), q.clone()).unwrap();
    let psi = ConvexFunction::sqdist_affine(a.clone(), b.clone()).unwrap();
    let p = Problem::monotone(op, psi, Schedule::power(1.0, 2.0).unwrap()).unwrap();
    let traj = run(&p, &DVector::zeros(n), &RunConfig::new(1e-2, 50.0)).unwrap();
    // Equilibrium of A + N_C: M x + q + Aᵀμ = 0, A x = b.
    let xbar = kkt(&m, &q, &a, &b);
    let err = (traj.last_state() - &xbar).norm();
    // Rest point of the frozen-β field at t = 50: M x + q + β A⁺(A x − b) = 0.
    // Its distance to xbar is the penalty bias, O(1/β), that no integrator removes.
    let beta = 51.0f64.powi(2);
    let pinv_a = a.transpose() * (&a * a.transpose()).try_inverse().unwrap();
    let frozen = (&m + &pinv_a * &a * beta).lu().solve(&(-&q + &pinv_a * &b * beta)).unwrap();
    let bias = (frozen - &xbar).norm();
    outcome(
        err <= 1e-4,
        format!(
            "modulus = {:.3}, |x(50) - xbar| = {err:e} (<= 1e-4), penalty bias at beta(50) = {bias:e}",
            p.modulus()
        ),
    )
}

fn c7_dictionary() -> Outcome {
    let inst = Instance::new();
    let beta = Schedule::power(1.0, 2.0).unwrap();
    let t_eps = 100.0;
    let t_beta = beta.inverse_clock(t_eps).unwrap();
    let pb = inst.problem();
    let pe = Problem::gradient(inst.phi(), inst.psi(), Schedule::rescaled(beta.clone()), Parameterization::Epsilon).unwrap();
    let (hb, he) = (2e-3, 2e-2);
    let runs = |p: &Problem, h: f64, t: f64| {
        let coarse = run(p, &inst.x0, &RunConfig::new(h, t)).unwrap();
        let fine = run(p, &inst.x0, &RunConfig::new(h / 2.0, t)).unwrap();
        (coarse, fine)
    };
    let (bc, bf) = runs(&pb, hb, t_beta);
    let (ec, ef) = runs(&pe, he, t_eps);
    // One refinement: first-order Richardson combination 2x_{h/2} − x_h.
    let rich = |c: &Trajectory, f: &Trajectory, t: f64| f.state_at(t).unwrap() * 2.0 - c.state_at(t).unwrap();
    let mut worst: f64 = 0.0;
    for k in 1..=20 {
        let t = t_eps * k as f64 / 20.0;
        let s = beta.inverse_clock(t).unwrap().min(t_beta);
        let d = (rich(&bc, &bf, s) - rich(&ec, &ef, t)).norm();
        worst = worst.max(d);
    }
    outcome(
        worst <= 1e-3,
        format!("max over 20 checkpoints in eps-time (0, {t_eps}] = {worst:e} (<= 1e-3)"),
    )
}

fn c8_best_response() -> Outcome {
    let mut r = rng(8);
    let spd = |r: &mut ChaCha8Rng| {
        let m = uniform(r, 2, 2);
        m.transpose() * &m + DMatrix::identity(2, 2) * 0.5
    };
    let (q1, q2) = (spd(&mut r), spd(&mut r));
    let (c1, c2) = (uvec(&mut r, 2), uvec(&mut r, 2));
    let w = uniform(&mut r, 4, 4);
    let coupling = w.transpose() * &w * 0.25;
    let f1 = ConvexFunction::quadratic(q1.clone(), c1.clone(), 0.0).unwrap();
    let f2 = ConvexFunction::quadratic(q2.clone(), c2.clone(), 0.0).unwrap();
    let game = Game::new(
        f1,
        f2,
        Some(QuadraticForm {
            q: coupling.clone(),
            c: DVector::zeros(4),
            r: 0.0,
        }),
        LinearMap::identity(2),
        LinearMap::identity(2),
        1.0,
        1.0,
        PenaltySequence::default_power(),
    )
    .unwrap();
    let x0 = uvec(&mut r, 4);
    let out = best_response_run(&game, &x0.rows(0, 2).into_owned(), &x0.rows(2, 2).into_owned(), 200).unwrap();
    // Team optimum on the agreement set x₁ = x₂.
    let mut h = coupling;
    let mut block = h.view_mut((0, 0), (2, 2));
    block += &q1;
    let mut block = h.view_mut((2, 2), (2, 2));
    block += &q2;
    let mut c = DVector::zeros(4);
    c.rows_mut(0, 2).copy_from(&c1);
    c.rows_mut(2, 2).copy_from(&c2);
    let mut a = DMatrix::zeros(2, 4);
    a.view_mut((0, 0), (2, 2)).copy_from(&DMatrix::identity(2, 2));
    a.view_mut((0, 2), (2, 2)).copy_from(&(-DMatrix::identity(2, 2)));
    let star = kkt(&h, &c, &a, &DVector::zeros(2));
    let joint = nalgebra::stack![out.x1; out.x2];
    let gap = (&joint - &star).norm();
    let residual = (&out.x1 - &out.x2).norm();
    outcome(
        gap <= 1e-3 && residual <= 1e-4,
        format!("Nash gap = {gap:e} (<= 1e-3), residual = {residual:e} (<= 1e-4)"),
    )
}

/// `β_k = 1 + k` for `linear` iterations, then a geometric ramp to `top`
/// over `ramp` more.
fn dd_penalties(linear: usize, ramp: usize, top: f64) -> Vec<f64> {
    let mut v: Vec<f64> = (0..linear).map(|k| 1.0 + k as f64).collect();
    let start = linear as f64;
    let ratio = (top / start).powf(1.0 / ramp as f64);
    v.extend((1..=ramp).map(|j| start * ratio.powi(j as i32)));
    v
}

fn c9_domain_decomposition() -> Outcome {
    let cp = dd_assemble(101, 50, |_| 1.0).unwrap();
    let seq = dd_penalties(100_000, 50, 1e9);
    let iters = seq.len();
    let out = dd_run(&cp, 1.0, &PenaltySequence::Explicit(seq), iters).unwrap();
    let last = out.records.last().unwrap();
    let exact = |x: f64| 0.5 * x * (1.0 - x);
    let analytic = cp
        .nodes1()
        .iter()
        .zip(&out.u1)
        .chain(cp.nodes2().iter().zip(&out.u2))
        .map(|(x, u)| (u - exact(*x)).abs())
        .fold(0.0, f64::max);
    outcome(
        last.sup_error <= 1e-6 && analytic <= 1e-3 && last.jump <= 1e-8,
        format!(
            "{iters} iterations, sup error vs monolithic = {:e} (<= 1e-6), vs analytic = {analytic:e} (<= 1e-3), jump = {:e} (<= 1e-8)",
            last.sup_error, last.jump
        ),
    )
}

/// Property suites over the catalog: Fenchel–Young, prox optimality, Moreau
/// decomposition and `Ψ* ≥ σ_C`.
fn c10_convex_kit() -> Outcome {
    const SAMPLES: usize = 1000;
    let mut r = rng(10);
    type Maker = fn(&mut ChaCha8Rng) -> ConvexFunction;
    let variants: Vec<(&str, Maker)> = vec![
        ("zero", |_| ConvexFunction::zero(3).unwrap()),
        ("quadratic", |r| {
            let m = uniform(r, 3, 3);
            let q = m.transpose() * &m + DMatrix::identity(3, 3) * 0.1;
            ConvexFunction::quadratic(q, uvec(r, 3), r.random_range(-1.0..1.0)).unwrap()
        }),
        ("half_squared_norm", |_| ConvexFunction::half_squared_norm(3).unwrap()),
        ("least_squares", |r| ConvexFunction::least_squares(uniform(r, 2, 3), uvec(r, 2)).unwrap()),
        ("abs_sum", |_| ConvexFunction::abs_sum(3).unwrap()),
        ("indicator_affine", |r| ConvexFunction::indicator_affine(uniform(r, 2, 3), uvec(r, 2)).unwrap()),
        ("indicator_box", |r| {
            let lo = uvec(r, 3);
            let hi = &lo + DVector::from_fn(3, |_, _| r.random_range(0.0..2.0));
            ConvexFunction::indicator_box(lo, hi).unwrap()
        }),
        ("indicator_ball", |r| ConvexFunction::indicator_ball(r.random_range(0.1..2.0), 3).unwrap()),
        ("sqdist_affine", |r| ConvexFunction::sqdist_affine(uniform(r, 1, 3), uvec(r, 1)).unwrap()),
        ("sqdist_box", |r| {
            let lo = uvec(r, 3);
            let hi = &lo + DVector::from_fn(3, |_, _| r.random_range(0.0..2.0));
            ConvexFunction::sqdist_box(lo, hi).unwrap()
        }),
        ("support_ball", |r| ConvexFunction::support_ball(r.random_range(0.1..2.0), 3).unwrap()),
        ("sum", |r| {
            ConvexFunction::sum(
                ConvexFunction::abs_sum(2).unwrap(),
                ConvexFunction::sqdist_affine(uniform(r, 1, 2), uvec(r, 1)).unwrap(),
            )
            .unwrap()
        }),
        ("separable", |r| {
            ConvexFunction::separable(vec![
                ConvexFunction::abs_sum(1).unwrap(),
                ConvexFunction::indicator_ball(r.random_range(0.5..2.0), 2).unwrap(),
            ])
            .unwrap()
        }),
        ("precompose", |r| {
            let l = uniform(r, 3, 3) + DMatrix::identity(3, 3) * 2.0;
            ConvexFunction::precompose(ConvexFunction::abs_sum(3).unwrap(), LinearMap::new(l).unwrap()).unwrap()
        }),
        ("scale", |r| ConvexFunction::scale(ConvexFunction::abs_sum(3).unwrap(), r.random_range(0.1..3.0)).unwrap()),
        ("translate", |r| {
            let lo = uvec(r, 3);
            let hi = &lo + DVector::from_element(3, 1.0);
            ConvexFunction::translate(ConvexFunction::sqdist_box(lo, hi).unwrap(), uvec(r, 3)).unwrap()
        }),
    ];
    let mut violations: Vec<String> = Vec::new();
    let mut checks = 0usize;
    for (name, make) in &variants {
        let mut bad = [0usize; 4];
        for _ in 0..SAMPLES {
            let f = make(&mut r);
            let n = f.dim();
            let x = uvec(&mut r, n) * 3.0;
            let y = uvec(&mut r, n) * 3.0;
            let lambda = r.random_range(0.1..3.0);
            let scale = 1.0 + x.norm() + y.norm();
            // Fenchel–Young: f(x) + f*(y) ≥ ⟨x, y⟩.
            if f.has_closed_conjugate() {
                checks += 1;
                let fx = f.eval(&x).unwrap();
                let fy = f.conjugate(&y).unwrap();
                if fx + fy < x.dot(&y) - 1e-9 * scale * scale {
                    bad[0] += 1;
                }
            }
            // Prox optimality: (x − p)/λ ∈ ∂f(p), tested at a random u.
            checks += 1;
            let p = f.prox(lambda, &x).unwrap();
            let g = (&x - &p) / lambda;
            let u = &p + uvec(&mut r, n);
            let (fu, fp) = (f.eval(&u).unwrap(), f.eval(&p).unwrap());
            if fu < fp + g.dot(&(&u - &p)) - 1e-7 * scale * scale {
                bad[1] += 1;
            }
            // Moreau: x = prox_{λf}(x) + λ prox_{f*/λ}(x/λ); when f* is not a
            // catalog member, the equivalent equality f(p) + f*(g) = ⟨p, g⟩.
            if let Some(fs) = f.conjugate_function() {
                checks += 1;
                let dual = fs.prox(1.0 / lambda, &(&x / lambda)).unwrap();
                if (&p + dual * lambda - &x).norm() > 1e-8 * scale {
                    bad[2] += 1;
                }
            } else if f.has_closed_conjugate() {
                checks += 1;
                let lhs = fp + f.conjugate(&g).unwrap();
                if (lhs - p.dot(&g)).abs() > 1e-7 * scale * scale {
                    bad[2] += 1;
                }
            }
            // Ψ ≤ δ_C gives Ψ* ≥ σ_C.
            if f.has_argmin_set() && f.has_closed_conjugate() {
                checks += 1;
                if f.conjugate(&y).unwrap() < f.support_of_argmin(&y).unwrap() - 1e-9 * scale {
                    bad[3] += 1;
                }
            }
        }
        for (k, what) in ["Fenchel-Young", "prox optimality", "Moreau", "conjugate dominance"].iter().enumerate() {
            if bad[k] > 0 {
                violations.push(format!("{name}: {} {what}", bad[k]));
            }
        }
    }
    let detail = if violations.is_empty() {
        format!("{} variants x {SAMPLES} samples, {checks} checks, 0 violations", variants.len())
    } else {
        format!("violations: {}", violations.join("; "))
    };
    outcome(violations.is_empty(), detail)
}

fn c11_refinement_order() -> Outcome {
    let inst = Instance::new();
    let t_end = 2.0;
    let fin = |h: f64| inst.run(h, t_end).last_state().clone();
    // h → 0 limit by Richardson extrapolation from two fine grids.
    let limit = fin(1.25e-3) * 2.0 - fin(2.5e-3);
    let errs: Vec<f64> = [4e-2, 2e-2, 1e-2].iter().map(|h| (fin(*h) - &limit).norm()).collect();
    let ratios = [errs[1] / errs[0], errs[2] / errs[1]];
    outcome(
        ratios.iter().all(|r| (0.4..=0.6).contains(r)),
        format!(
            "t_end = {t_end}, errors {:.3e} {:.3e} {:.3e}, ratios {:.4} {:.4} (in [0.4, 0.6])",
            errs[0], errs[1], errs[2], ratios[0], ratios[1]
        ),
    )
}

fn c12_determinism() -> Outcome {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    let mut files: Vec<_> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().and_then(|e| e.to_str()) == Some("scn"))
        .collect();
    files.sort();
    let outs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for out in &outs {
        let status = Command::new(env!("CARGO_BIN_EXE_hierflow"))
            .arg("run")
            .args(&files)
            .arg("--out-dir")
            .arg(out.path())
            .output()
            .unwrap();
        if !status.status.success() {
            return outcome(false, format!("run failed: {}", String::from_utf8_lossy(&status.stderr)));
        }
    }
    let mut compared = 0;
    let mut differing = Vec::new();
    for entry in std::fs::read_dir(outs[0].path()).unwrap() {
        let name = entry.unwrap().file_name();
        let a = std::fs::read(outs[0].path().join(&name)).unwrap();
        let b = std::fs::read(outs[1].path().join(&name)).unwrap();
        compared += 1;
        if a != b {
            differing.push(name.to_string_lossy().into_owned());
        }
    }
    outcome(
        differing.is_empty() && compared == 2 * files.len(),
        format!("{} scenarios, {compared} files byte-identical across two runs{}", files.len(), if differing.is_empty() { String::new() } else { format!("; differing: {}", differing.join(", ")) }),
    )
}

fn main() {
    let criteria: [(usize, &str, fn() -> Outcome); 12] = [
        (1, "hierarchical convergence", c1_hierarchical_convergence),
        (2, "minimizing properties", c2_minimizing_properties),
        (3, "energy limits", c3_energy_limits),
        (4, "integral condition verdicts", c4_h1_verdicts),
        (5, "ergodic-only regime", c5_ergodic_only),
        (6, "strong monotonicity", c6_strong_monotonicity),
        (7, "parameterization dictionary", c7_dictionary),
        (8, "best response", c8_best_response),
        (9, "domain decomposition", c9_domain_decomposition),
        (10, "convex-kit property suites", c10_convex_kit),
        (11, "grid-refinement order", c11_refinement_order),
        (12, "determinism", c12_determinism),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut stdout = std::io::stdout();
    let mut unexpected = Vec::new();
    for (n, name, f) in criteria {
        if !filter.is_empty() && !filter.iter().any(|s| s == &n.to_string()) {
            continue;
        }
        let start = std::time::Instant::now();
        let o = f();
        let status = if o.pass { "PASS" } else { "FAIL" };
        let note = if !o.pass && KNOWN_UNATTAINABLE.contains(&n) { " [known, see README]" } else { "" };
        let _ = writeln!(
            stdout,
            "criterion {n:>2} {status} {name}: {} ({:.1} s){note}",
            o.detail,
            start.elapsed().as_secs_f64()
        );
        if o.pass == KNOWN_UNATTAINABLE.contains(&n) {
            unexpected.push(n);
        }
    }
    if !unexpected.is_empty() {
        let _ = writeln!(stdout, "unexpected outcome for criteria {unexpected:?}");
        std::process::exit(1);
    }
}
