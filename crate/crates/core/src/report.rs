//! Convergence diagnostics and property checks computed from a finished trajectory.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::integrator::{run, Parameterization, RunConfig, Trajectory};
use crate::linalg::Point;

/// Velocity norm below which a run counts as settled.
pub const VELOCITY_TOL: f64 = 1e-6;
/// Slack on the `h_z` tail slope for roundoff; the criterion is slope ≤ 0.
pub const SLOPE_TOL: f64 = 1e-9;
/// Relative spread of the late states that marks an oscillating run.
pub const SPREAD_MIN: f64 = 1e-3;
/// Cosine between late velocities below which the motion counts as reversing.
pub const REVERSAL_COS: f64 = -0.5;
/// Norm growth, relative to the start, treated as a blow-up.
pub const BLOWUP_FACTOR: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Converged,
    ErgodicOnly,
    Diverged,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Converged => "converged",
            Verdict::ErgodicOnly => "ergodic-only",
            Verdict::Diverged => "diverged",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// Asymptotic properties a trajectory can be checked against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tag {
    /// The running mean `X(t)` settles.
    ErgodicConvergence,
    /// `‖x(t) − z‖` has a limit: positive increments of `h_z` are summable.
    DistanceLimit,
    /// `∫ βΨ(x) < ∞`.
    PenaltyIntegral,
    /// Strongly monotone operator: the state reaches the unique equilibrium.
    StrongConvergence,
    /// The state reaches `argmin{Φ | argmin Ψ}`.
    HierarchicalConvergence,
    /// `Ψ(x) → 0` and `Φ(x) → min Φ` over the constraint set.
    MinimizingValues,
    /// `βΨ(x) → 0`, `∫ βΨ < ∞` and `∫ (Φ − min)` stays bounded.
    PenaltyEstimates,
    /// `E₁ → 0` and `E₂ → min Φ` over the constraint set.
    EnergyLimits,
    /// Convergence of the ε-parameterized system.
    EpsConvergence,
    /// Convergence under inf-compactness instead of a growth bound on β.
    InfCompactConvergence,
}

impl Tag {
    pub const ALL: [Tag; 10] = [
        Tag::ErgodicConvergence,
        Tag::DistanceLimit,
        Tag::PenaltyIntegral,
        Tag::StrongConvergence,
        Tag::HierarchicalConvergence,
        Tag::MinimizingValues,
        Tag::PenaltyEstimates,
        Tag::EnergyLimits,
        Tag::EpsConvergence,
        Tag::InfCompactConvergence,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Tag::ErgodicConvergence => "ergodic-convergence",
            Tag::DistanceLimit => "distance-limit",
            Tag::PenaltyIntegral => "penalty-integral",
            Tag::StrongConvergence => "strong-convergence",
            Tag::HierarchicalConvergence => "hierarchical-convergence",
            Tag::MinimizingValues => "minimizing-values",
            Tag::PenaltyEstimates => "penalty-estimates",
            Tag::EnergyLimits => "energy-limits",
            Tag::EpsConvergence => "eps-convergence",
            Tag::InfCompactConvergence => "inf-compact-convergence",
        }
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Tag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Tag::ALL
            .into_iter()
            .find(|t| t.name() == s.trim())
            .ok_or_else(|| Error::invalid(format!("unknown property tag '{}'", s.trim())))
    }
}

/// One measured quantity with the bound it is held to.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub key: &'static str,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl Check {
    fn at_most(key: &'static str, value: f64, threshold: f64) -> Self {
        Check {
            key,
            value,
            threshold,
            pass: value <= threshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TagResult {
    pub tag: Tag,
    pub checks: Vec<Check>,
}

impl TagResult {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    pub t_final: f64,
    pub steps: usize,
    pub final_velocity_norm: f64,
    pub final_phi: f64,
    pub final_psi: f64,
    pub final_beta_psi: f64,
    pub final_e1: f64,
    pub final_e2: f64,
    pub final_cum_beta_psi: f64,
    pub peak_cum_beta_psi: f64,
    /// Regression slope of `h_z` over the last half of the grid, per probe
    /// (the supplied limit is appended as the last probe).
    pub hz_tail_slope: Vec<f64>,
    /// `Σ (Δh_z)₊` over the last half of the grid, per probe.
    pub hz_positive_increments: Vec<f64>,
    pub limit_distance: Option<f64>,
    /// `max ‖x − x̄‖ / max ‖x‖` over the last half, `x̄` their average.
    pub state_spread: f64,
    /// Smallest cosine between a velocity in the last half and the final one.
    pub velocity_reversal: f64,
    pub ergodic_mean_norm_half: f64,
    pub ergodic_mean_norm_final: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefinementRow {
    pub h: f64,
    pub final_state: Point,
    /// Distance to the next coarser row's final state.
    pub change: Option<f64>,
    /// `change` divided by the previous row's `change`.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub verdict: Verdict,
    pub final_state: Point,
    pub ergodic_mean: Point,
    pub diagnostics: Diagnostics,
    pub tags: Vec<TagResult>,
    pub refinement: Vec<RefinementRow>,
}

/// `½‖x − z‖²` along the run for each probe, plus `limit` if given.
fn distance_series(traj: &Trajectory, limit: Option<&Point>) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = (0..traj.probes.len())
        .map(|j| traj.records.iter().map(|r| r.hz[j]).collect())
        .collect();
    if let Some(z) = limit {
        if z.len() == traj.problem.dim() {
            out.push(traj.states.iter().map(|x| 0.5 * (x - z).norm_squared()).collect());
        }
    }
    out
}

fn positive_increments(series: &[f64]) -> f64 {
    series.windows(2).map(|w| (w[1] - w[0]).max(0.0)).sum()
}

fn slope(ts: &[f64], ys: &[f64]) -> f64 {
    let n = ts.len() as f64;
    if ts.len() < 2 {
        return 0.0;
    }
    let tm = ts.iter().sum::<f64>() / n;
    let ym = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (t, y) in ts.iter().zip(ys) {
        sxy += (t - tm) * (y - ym);
        sxx += (t - tm) * (t - tm);
    }
    if sxx > 0.0 {
        sxy / sxx
    } else {
        0.0
    }
}

/// First grid index with `t ≥ t_final / 2`.
fn half_index(traj: &Trajectory) -> usize {
    let t_half = 0.5 * traj.times[traj.len() - 1];
    traj.times.partition_point(|t| *t < t_half).min(traj.len() - 1)
}

/// `a / b` for growing nonnegative accumulations; equal sums give 1.
fn growth_ratio(a: f64, b: f64) -> f64 {
    if (a - b).abs() <= 1e-12 * (1.0 + b.abs()) {
        1.0
    } else if b > 0.0 {
        a / b
    } else {
        f64::INFINITY
    }
}

fn diagnostics(traj: &Trajectory, limit: Option<&Point>) -> Diagnostics {
    let n = traj.len();
    let k0 = half_index(traj);
    let last = traj.last_record();
    let series = distance_series(traj, limit);
    let tail_t = &traj.times[k0..];
    let late = &traj.states[k0..];
    let mean = late.iter().fold(Point::zeros(traj.problem.dim()), |acc, x| acc + x) / late.len() as f64;
    let spread = late.iter().map(|x| (x - &mean).norm()).fold(0.0, f64::max);
    let scale = late.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let v_end = &last.velocity;
    let reversal = traj.records[k0..]
        .iter()
        .filter_map(|r| {
            let den = r.velocity.norm() * v_end.norm();
            (den > 0.0).then(|| r.velocity.dot(v_end) / den)
        })
        .fold(1.0, f64::min);
    Diagnostics {
        t_final: traj.times[n - 1],
        steps: n - 1,
        final_velocity_norm: last.velocity.norm(),
        final_phi: last.phi,
        final_psi: last.psi,
        final_beta_psi: last.beta_psi,
        final_e1: last.e1,
        final_e2: last.e2,
        final_cum_beta_psi: last.cum_beta_psi,
        peak_cum_beta_psi: traj.records.iter().map(|r| r.cum_beta_psi).fold(f64::NEG_INFINITY, f64::max),
        hz_tail_slope: series.iter().map(|s| slope(tail_t, &s[k0..])).collect(),
        hz_positive_increments: series.iter().map(|s| positive_increments(&s[k0..])).collect(),
        limit_distance: limit.filter(|z| z.len() == traj.problem.dim()).map(|z| (traj.last_state() - z).norm()),
        state_spread: if scale > 0.0 { spread / scale } else { 0.0 },
        velocity_reversal: reversal,
        ergodic_mean_norm_half: mean_offset(&traj.records[k0].ergodic_mean, limit),
        ergodic_mean_norm_final: mean_offset(&last.ergodic_mean, limit),
    }
}

/// `‖X − z‖` against the limit when one is known, else `‖X‖`.
fn mean_offset(mean: &Point, limit: Option<&Point>) -> f64 {
    match limit {
        Some(z) if z.len() == mean.len() => (mean - z).norm(),
        _ => mean.norm(),
    }
}

fn nonfinite(traj: &Trajectory) -> bool {
    let has_phi = traj.problem.phi().is_some();
    traj.states.iter().any(|x| x.iter().any(|v| !v.is_finite()))
        || traj.records.iter().any(|r| {
            !(r.psi.is_finite() && r.beta_psi.is_finite() && r.cum_beta_psi.is_finite())
                || (has_phi && !r.phi.is_finite())
        })
}

fn classify(traj: &Trajectory, d: &Diagnostics) -> Verdict {
    let start = traj.states[0].norm();
    let end = traj.last_state().norm();
    if nonfinite(traj) || end > BLOWUP_FACTOR * (1.0 + start) {
        return Verdict::Diverged;
    }
    let settled = d.final_velocity_norm <= VELOCITY_TOL;
    let distances_shrink = d.hz_tail_slope.iter().all(|s| *s <= SLOPE_TOL);
    if settled && distances_shrink {
        return Verdict::Converged;
    }
    // Oscillation: the late states spread out and the motion turns back on
    // itself, while the running mean keeps closing in.
    let oscillating = d.state_spread > SPREAD_MIN && d.velocity_reversal < REVERSAL_COS;
    if oscillating && d.ergodic_mean_norm_final < d.ergodic_mean_norm_half {
        return Verdict::ErgodicOnly;
    }
    Verdict::Inconclusive
}

/// Verdict and diagnostics, without property checks.
pub fn convergence_report(traj: &Trajectory, limit: Option<&Point>) -> Report {
    let d = diagnostics(traj, limit);
    Report {
        verdict: classify(traj, &d),
        final_state: traj.last_state().clone(),
        ergodic_mean: traj.last_record().ergodic_mean.clone(),
        diagnostics: d,
        tags: Vec::new(),
        refinement: Vec::new(),
    }
}

fn require(cond: bool, tag: Tag, hypothesis: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::invalid(format!("tag {tag} does not apply: {hypothesis}")))
    }
}

/// Hypotheses a tag needs before it can be evaluated.
fn gate(traj: &Trajectory, oracle: Option<&Point>, tag: Tag) -> Result<()> {
    let has_phi = traj.problem.phi().is_some();
    let has_oracle = oracle.is_some();
    let eps = traj.problem.parameterization() == Parameterization::Epsilon;
    let potential = "requires a potential Φ, but the operator is not a gradient";
    let need_oracle = "requires an oracle point";
    match tag {
        Tag::ErgodicConvergence | Tag::PenaltyIntegral => Ok(()),
        Tag::DistanceLimit => require(
            has_oracle || !traj.probes.is_empty(),
            tag,
            "requires a probe point or an oracle",
        ),
        Tag::StrongConvergence => {
            require(
                traj.problem.modulus() > 0.0,
                tag,
                "requires a strongly monotone operator (modulus > 0)",
            )?;
            require(has_oracle, tag, need_oracle)
        }
        Tag::HierarchicalConvergence | Tag::InfCompactConvergence | Tag::MinimizingValues => {
            require(has_phi, tag, potential)?;
            require(has_oracle, tag, need_oracle)
        }
        Tag::PenaltyEstimates | Tag::EnergyLimits => {
            require(has_phi, tag, potential)?;
            require(!eps, tag, "requires the β parameterization")?;
            require(has_oracle, tag, need_oracle)
        }
        Tag::EpsConvergence => {
            require(eps, tag, "requires the ε parameterization")?;
            require(has_oracle, tag, need_oracle)
        }
    }
}

/// Trapezoid `∫ (Φ(x) − Φ*)` up to each grid index.
fn cumulative_gap(traj: &Trajectory, phi_star: f64) -> Vec<f64> {
    let mut acc = 0.0;
    let mut out = vec![0.0];
    for k in 1..traj.len() {
        let h = traj.times[k] - traj.times[k - 1];
        acc += 0.5 * h * (traj.records[k - 1].phi + traj.records[k].phi - 2.0 * phi_star);
        out.push(acc);
    }
    out
}

fn evaluate(traj: &Trajectory, oracle: Option<&Point>, tag: Tag) -> Result<TagResult> {
    gate(traj, oracle, tag)?;
    let k0 = half_index(traj);
    let first = &traj.records[0];
    let last = traj.last_record();
    let x_end = traj.last_state();
    let distance = || oracle.map(|z| (x_end - z).norm()).unwrap_or(f64::NAN);
    let cum_ratio = || growth_ratio(last.cum_beta_psi, traj.records[k0].cum_beta_psi);
    let phi_star = || -> Result<f64> {
        let phi = traj.problem.phi().expect("gated on a potential");
        phi.eval(oracle.expect("gated on an oracle"))
    };
    let checks = match tag {
        Tag::ErgodicConvergence => {
            let value = match oracle {
                Some(z) => (&last.ergodic_mean - z).norm(),
                None => (&last.ergodic_mean - &traj.records[k0].ergodic_mean).norm(),
            };
            vec![Check::at_most("mean_distance", value, 0.05)]
        }
        Tag::DistanceLimit => {
            let ratio = distance_series(traj, oracle)
                .iter()
                .map(|s| growth_ratio(positive_increments(s), positive_increments(&s[..=k0])))
                .fold(0.0, f64::max);
            vec![Check::at_most("positive_increment_ratio", ratio, 1.1)]
        }
        Tag::PenaltyIntegral => vec![Check::at_most("cum_ratio", cum_ratio(), 1.1)],
        Tag::StrongConvergence => vec![Check::at_most("distance", distance(), 1e-4)],
        Tag::HierarchicalConvergence | Tag::InfCompactConvergence | Tag::EpsConvergence => {
            vec![Check::at_most("distance", distance(), 1e-3)]
        }
        Tag::MinimizingValues => {
            let star = phi_star()?;
            vec![
                Check::at_most("psi_final", last.psi, 1e-6),
                Check::at_most("phi_gap", (last.phi - star).abs() / (1.0 + star.abs()), 1e-3),
            ]
        }
        Tag::PenaltyEstimates => {
            let star = phi_star()?;
            let gap = cumulative_gap(traj, star);
            let (g_end, g_half) = (gap[gap.len() - 1], gap[k0]);
            let decay = if first.beta_psi > 0.0 {
                last.beta_psi / first.beta_psi
            } else {
                last.beta_psi
            };
            vec![
                Check::at_most("beta_psi_ratio", decay, 1e-3),
                Check::at_most("cum_ratio", cum_ratio(), 1.1),
                Check::at_most("phi_gap_integral_change", (g_end - g_half).abs() / (1.0 + g_half.abs()), 0.1),
            ]
        }
        Tag::EnergyLimits => {
            let star = phi_star()?;
            vec![
                Check::at_most("e1_relative", last.e1 / (1.0 + first.e1.abs()), 1e-3),
                Check::at_most("e2_gap", (last.e2 - star).abs() / (1.0 + star.abs()), 1e-3),
            ]
        }
    };
    Ok(TagResult { tag, checks })
}

/// Report with the requested property checks. A tag whose hypotheses the
/// problem does not meet is rejected.
pub fn summarize(traj: &Trajectory, oracle: Option<&Point>, tags: &[Tag]) -> Result<Report> {
    if let Some(z) = oracle {
        crate::error::check_dim(traj.problem.dim(), z.len())?;
    }
    let mut report = convergence_report(traj, oracle);
    for &tag in tags {
        report.tags.push(evaluate(traj, oracle, tag)?);
    }
    Ok(report)
}

/// Final states for `h, h/2, …` (`levels` runs), with successive changes and
/// their ratios. First-order schemes give ratios near ½.
pub fn refinement_table(
    problem: &crate::integrator::Problem,
    x0: &Point,
    cfg: &RunConfig,
    levels: usize,
) -> Result<Vec<RefinementRow>> {
    let mut rows: Vec<RefinementRow> = Vec::with_capacity(levels);
    let mut h = cfg.h;
    for _ in 0..levels {
        let c = RunConfig {
            h,
            probes: Vec::new(),
            ..cfg.clone()
        };
        let traj = run(problem, x0, &c).map_err(|f| f.error)?;
        let x = traj.last_state().clone();
        let change = rows.last().map(|r| (&x - &r.final_state).norm());
        let ratio = match (change, rows.last().and_then(|r| r.change)) {
            (Some(c), Some(p)) if p > 0.0 => Some(c / p),
            _ => None,
        };
        rows.push(RefinementRow {
            h,
            final_state: x,
            change,
            ratio,
        });
        h *= 0.5;
    }
    Ok(rows)
}

pub(crate) fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x}")).collect();
    format!("[{}]", parts.join(", "))
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "\"none\"".to_string(), |x| format!("{x}"))
}

impl Report {
    pub fn tag(&self, tag: Tag) -> Option<&TagResult> {
        self.tags.iter().find(|t| t.tag == tag)
    }

    /// Flat `key = value` text, one entry per line, in a fixed order.
    pub fn to_text(&self) -> String {
        let d = &self.diagnostics;
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("verdict", format!("\"{}\"", self.verdict));
        kv("final_state", fmt_vec(self.final_state.as_slice()));
        kv("ergodic_mean", fmt_vec(self.ergodic_mean.as_slice()));
        kv("t_final", format!("{}", d.t_final));
        kv("steps", format!("{}", d.steps));
        kv("final_velocity_norm", format!("{}", d.final_velocity_norm));
        kv("final_phi", format!("{}", d.final_phi));
        kv("final_psi", format!("{}", d.final_psi));
        kv("final_beta_psi", format!("{}", d.final_beta_psi));
        kv("final_e1", format!("{}", d.final_e1));
        kv("final_e2", format!("{}", d.final_e2));
        kv("final_cum_beta_psi", format!("{}", d.final_cum_beta_psi));
        kv("peak_cum_beta_psi", format!("{}", d.peak_cum_beta_psi));
        kv("hz_tail_slope", fmt_vec(&d.hz_tail_slope));
        kv("hz_positive_increments", fmt_vec(&d.hz_positive_increments));
        kv("limit_distance", fmt_opt(d.limit_distance));
        kv("state_spread", format!("{}", d.state_spread));
        kv("velocity_reversal", format!("{}", d.velocity_reversal));
        kv("ergodic_mean_offset_half", format!("{}", d.ergodic_mean_norm_half));
        kv("ergodic_mean_offset_final", format!("{}", d.ergodic_mean_norm_final));
        for t in &self.tags {
            kv(&format!("tag.{}.pass", t.tag), format!("{}", t.pass()));
            for c in &t.checks {
                kv(&format!("tag.{}.{}", t.tag, c.key), format!("{}", c.value));
                kv(&format!("tag.{}.{}.threshold", t.tag, c.key), format!("{}", c.threshold));
            }
        }
        for (i, r) in self.refinement.iter().enumerate() {
            kv(&format!("refinement.{i}.h"), format!("{}", r.h));
            kv(&format!("refinement.{i}.final_state"), fmt_vec(r.final_state.as_slice()));
            kv(&format!("refinement.{i}.change"), fmt_opt(r.change));
            kv(&format!("refinement.{i}.ratio"), fmt_opt(r.ratio));
        }
        s
    }

    /// Short human-readable summary.
    pub fn summary(&self) -> String {
        let mut s = format!("verdict: {}\n", self.verdict);
        for t in &self.tags {
            let _ = write!(s, "{}: {}", t.tag, if t.pass() { "pass" } else { "fail" });
            for c in &t.checks {
                let _ = write!(s, " {}={} (<= {})", c.key, c.value, c.threshold);
            }
            s.push('\n');
        }
        s
    }
}
