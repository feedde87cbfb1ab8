//! Penalty schedules β(t), vanishing parameters ε(t), and the audits run on them.

use std::cell::RefCell;
use std::fmt;
use std::str::FromStr;

use crate::convex::ConvexFunction;
use crate::error::{Error, Result};
use crate::linalg::Point;
use crate::quadrature::integrate;

/// Whether a schedule is meant as a growing penalty or a vanishing weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Beta,
    Epsilon,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Kind {
    /// `a (1+t)^p`
    PowerLaw { a: f64, p: f64 },
    /// `a e^{rt}`
    Exponential { a: f64, r: f64 },
    Constant { a: f64 },
    /// `a ln(e+t)`
    Logarithmic { a: f64 },
    /// `a e^{rt²}`
    ExpQuadratic { a: f64, r: f64 },
    /// `1 / β(t_β(t))`, the parameter matched to `β` by the time change.
    Rescaled(Box<Schedule>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    kind: Kind,
    direction: Direction,
}

fn positive(a: f64, what: &str) -> Result<()> {
    if a.is_finite() && a > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("{what}: coefficient must be positive and finite, got {a}")))
    }
}

fn finite(x: f64, what: &str) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("{what}: parameter must be finite, got {x}")))
    }
}

/// Bracketing stops here; clock times whose preimage lies beyond are refused.
const MAX_CLOCK: f64 = 1e12;

impl Schedule {
    fn beta(kind: Kind) -> Self {
        Schedule {
            kind,
            direction: Direction::Beta,
        }
    }

    pub fn power(a: f64, p: f64) -> Result<Self> {
        positive(a, "power")?;
        finite(p, "power")?;
        Ok(Self::beta(Kind::PowerLaw { a, p }))
    }

    pub fn exponential(a: f64, r: f64) -> Result<Self> {
        positive(a, "exp")?;
        finite(r, "exp")?;
        Ok(Self::beta(Kind::Exponential { a, r }))
    }

    pub fn constant(a: f64) -> Result<Self> {
        positive(a, "const")?;
        Ok(Self::beta(Kind::Constant { a }))
    }

    pub fn logarithmic(a: f64) -> Result<Self> {
        positive(a, "log")?;
        Ok(Self::beta(Kind::Logarithmic { a }))
    }

    pub fn exp_quadratic(a: f64, r: f64) -> Result<Self> {
        positive(a, "expquad")?;
        finite(r, "expquad")?;
        Ok(Self::beta(Kind::ExpQuadratic { a, r }))
    }

    /// The ε schedule matched to `beta` by `ε(t) β(t_β(t)) = 1`.
    pub fn rescaled(beta: Schedule) -> Self {
        Schedule {
            kind: Kind::Rescaled(Box::new(beta)),
            direction: Direction::Epsilon,
        }
    }

    pub fn with_direction(mut self, direction: Direction) -> Self {
        self.direction = direction;
        self
    }

    pub fn kind(&self) -> &Kind {
        &self.kind
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn value(&self, t: f64) -> f64 {
        match &self.kind {
            Kind::PowerLaw { a, p } => a * (1.0 + t).powf(*p),
            Kind::Exponential { a, r } => a * (r * t).exp(),
            Kind::Constant { a } => *a,
            Kind::Logarithmic { a } => a * (std::f64::consts::E + t).ln(),
            Kind::ExpQuadratic { a, r } => a * (r * t * t).exp(),
            Kind::Rescaled(beta) => match beta.inverse_clock(t) {
                Ok(s) => 1.0 / beta.value(s),
                Err(_) => f64::NAN,
            },
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        match &self.kind {
            Kind::PowerLaw { a, p } => a * p * (1.0 + t).powf(p - 1.0),
            Kind::Exponential { a, r } => a * r * (r * t).exp(),
            Kind::Constant { .. } => 0.0,
            Kind::Logarithmic { a } => a / (std::f64::consts::E + t),
            Kind::ExpQuadratic { a, r } => 2.0 * a * r * t * (r * t * t).exp(),
            Kind::Rescaled(beta) => match beta.inverse_clock(t) {
                Ok(s) => -beta.derivative(s) / beta.value(s).powi(3),
                Err(_) => f64::NAN,
            },
        }
    }

    /// Logarithmic derivative `ẏ / y`, finite even where the value overflows.
    pub fn growth_rate(&self, t: f64) -> f64 {
        match &self.kind {
            Kind::PowerLaw { p, .. } => p / (1.0 + t),
            Kind::Exponential { r, .. } => *r,
            Kind::Constant { .. } => 0.0,
            Kind::Logarithmic { .. } => {
                let u = std::f64::consts::E + t;
                1.0 / (u * u.ln())
            }
            Kind::ExpQuadratic { r, .. } => 2.0 * r * t,
            Kind::Rescaled(beta) => match beta.inverse_clock(t) {
                Ok(s) => -beta.growth_rate(s) / beta.value(s),
                Err(_) => f64::NAN,
            },
        }
    }

    /// `∫ₐᵇ` of the schedule by adaptive quadrature.
    pub fn integral(&self, a: f64, b: f64) -> Result<f64> {
        integrate(|s| self.value(s), a, b)
    }

    /// The time `s` with `∫₀ˢ value = t`: bracket by doubling, then safeguarded
    /// Newton on the cumulative quadrature.
    pub fn inverse_clock(&self, t: f64) -> Result<f64> {
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::invalid(format!("clock time must be finite and nonnegative, got {t}")));
        }
        if t == 0.0 {
            return Ok(0.0);
        }
        if let Kind::Constant { a } = self.kind {
            return Ok(t / a);
        }
        let tol = 1e-10 * (1.0 + t);
        let mut lo = 0.0;
        let mut hi = (t / self.value(0.0)).max(1e-3);
        let mut f_hi = self.integral(0.0, hi)? - t;
        let mut doublings = 0;
        while f_hi < 0.0 {
            lo = hi;
            hi *= 2.0;
            doublings += 1;
            if doublings > 200 || hi > MAX_CLOCK {
                return Err(Error::invalid(format!(
                    "time {t} lies beyond the reachable range of the schedule integral"
                )));
            }
            f_hi = match self.integral(0.0, hi) {
                Ok(v) => v - t,
                Err(e) if hi > 1e6 => {
                    return Err(Error::invalid(format!(
                        "time {t} not reached by the schedule integral up to {hi} ({e})"
                    )))
                }
                Err(e) => return Err(e),
            };
        }
        if f_hi.abs() <= tol {
            return Ok(hi);
        }
        let mut s = 0.5 * (lo + hi);
        for _ in 0..200 {
            let f = self.integral(0.0, s)? - t;
            if f.abs() <= tol {
                return Ok(s);
            }
            if f < 0.0 {
                lo = s;
            } else {
                hi = s;
            }
            let newton = s - f / self.value(s);
            s = if newton > lo && newton < hi && newton.is_finite() {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if hi - lo <= f64::EPSILON * hi {
                return Ok(s);
            }
        }
        Err(Error::NonConvergence {
            what: "inverse clock",
            iterations: 200,
            residual: (self.integral(0.0, s)? - t).abs(),
        })
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match (&self.kind, self.direction) {
            (Kind::Rescaled(_), _) | (_, Direction::Beta) => "",
            (_, Direction::Epsilon) => "eps ",
        };
        match &self.kind {
            Kind::PowerLaw { a, p } => write!(f, "{prefix}power {a} {p}"),
            Kind::Exponential { a, r } => write!(f, "{prefix}exp {a} {r}"),
            Kind::Constant { a } => write!(f, "{prefix}const {a}"),
            Kind::Logarithmic { a } => write!(f, "{prefix}log {a}"),
            Kind::ExpQuadratic { a, r } => write!(f, "{prefix}expquad {a} {r}"),
            Kind::Rescaled(beta) => write!(f, "rescaled {beta}"),
        }
    }
}

impl FromStr for Schedule {
    type Err = Error;

    /// `power a p`, `exp a r`, `const a`, `log a`, `expquad a r`, optionally
    /// prefixed by `eps`; or `rescaled <beta schedule>`.
    fn from_str(s: &str) -> Result<Self> {
        let words: Vec<&str> = s.split_whitespace().collect();
        match words.as_slice() {
            ["rescaled", rest @ ..] => Ok(Schedule::rescaled(rest.join(" ").parse()?)),
            ["eps", rest @ ..] => Ok(rest.join(" ").parse::<Schedule>()?.with_direction(Direction::Epsilon)),
            [name, args @ ..] => {
                let nums = args
                    .iter()
                    .map(|w| {
                        w.parse::<f64>()
                            .map_err(|_| Error::invalid(format!("schedule: '{w}' is not a number")))
                    })
                    .collect::<Result<Vec<f64>>>()?;
                match (*name, nums.as_slice()) {
                    ("power", [a, p]) => Schedule::power(*a, *p),
                    ("exp", [a, r]) => Schedule::exponential(*a, *r),
                    ("const", [a]) => Schedule::constant(*a),
                    ("log", [a]) => Schedule::logarithmic(*a),
                    ("expquad", [a, r]) => Schedule::exp_quadratic(*a, *r),
                    _ => Err(Error::invalid(format!("schedule: cannot parse '{s}'"))),
                }
            }
            [] => Err(Error::invalid("schedule: empty description")),
        }
    }
}

/// The time change between the two parameterizations at β-clock time `t`:
/// returns `(t_β(t), ε(t))`.
pub fn rescale_to_eps(beta: &Schedule, t: f64) -> Result<(f64, f64)> {
    let s = beta.inverse_clock(t)?;
    Ok((s, 1.0 / beta.value(s)))
}

/// A direction `p` together with a witness `z ∈ C` at which `p ∈ N_C(z)`.
#[derive(Debug, Clone)]
pub struct CertifiedNormal {
    p: Point,
    base: Point,
}

impl CertifiedNormal {
    pub fn new(psi: &ConvexFunction, p: Point, base: Point) -> Result<Self> {
        if !psi.has_argmin_set() {
            return Err(Error::unsupported("psi has no computable argmin set"));
        }
        if !psi.normal_cone_contains(&base, &p)? {
            return Err(Error::invalid(
                "direction is not in the normal cone of argmin psi at the supplied base point",
            ));
        }
        Ok(CertifiedNormal { p, base })
    }

    pub fn direction(&self) -> &Point {
        &self.p
    }

    pub fn base(&self) -> &Point {
        &self.base
    }
}

/// `Ψ*(y) − σ_C(y)`, clamped at zero within roundoff.
fn conjugate_gap(psi: &ConvexFunction, y: &Point) -> Result<f64> {
    let sigma = psi.support_of_argmin(y)?;
    let conj = psi.conjugate(y)?;
    if conj.is_infinite() {
        return Ok(f64::INFINITY);
    }
    let gap = conj - sigma;
    if gap >= 0.0 {
        Ok(gap)
    } else if gap >= -1e-12 * sigma.abs().max(1.0) {
        Ok(0.0)
    } else {
        Err(Error::numerical(format!(
            "conjugate below support function by {}",
            -gap
        )))
    }
}

pub fn h1_integrand(psi: &ConvexFunction, n: &CertifiedNormal, beta: &Schedule, t: f64) -> Result<f64> {
    let b = beta.value(t);
    // β·g(p/β) → g'(0; p) = 0 as β → ∞, since ∂Ψ*(0) = C.
    if n.p.iter().all(|v| *v == 0.0) || b == f64::INFINITY {
        return Ok(0.0);
    }
    Ok(b * conjugate_gap(psi, &(&n.p / b))?)
}

pub fn h1_eps_integrand(psi: &ConvexFunction, n: &CertifiedNormal, eps: &Schedule, t: f64) -> Result<f64> {
    if n.p.iter().all(|v| *v == 0.0) {
        return Ok(0.0);
    }
    conjugate_gap(psi, &(&n.p * eps.value(t)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum H1Status {
    Finite,
    Divergent,
    Inconclusive,
}

impl fmt::Display for H1Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            H1Status::Finite => "Finite",
            H1Status::Divergent => "Divergent",
            H1Status::Inconclusive => "Inconclusive",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct H1Verdict {
    pub status: H1Status,
    pub partial_integral: f64,
    pub tail_exponent: f64,
    pub fit_residual: f64,
    pub horizon: f64,
}

/// Tail exponent below which the integral is declared finite.
pub const FINITE_EXPONENT: f64 = -1.1;
/// Tail exponent at or above which the integral is declared divergent.
pub const DIVERGENT_EXPONENT: f64 = -1.0 - 1e-3;
/// Largest RMS log-log fit residual for a trusted power-law fit.
pub const FIT_RESIDUAL_MAX: f64 = 0.05;
const TAIL_SAMPLES: usize = 64;

/// Least-squares slope of `ln g` against `ln t` and the RMS residual.
pub struct TailFit {
    pub exponent: f64,
    pub residual: f64,
    /// Exponents between consecutive samples.
    pub local: Vec<f64>,
}

pub fn fit_tail<F: FnMut(f64) -> Result<f64>>(mut g: F, from: f64, to: f64) -> Result<Option<TailFit>> {
    let mut xs = Vec::with_capacity(TAIL_SAMPLES);
    let mut ys = Vec::with_capacity(TAIL_SAMPLES);
    for i in 0..TAIL_SAMPLES {
        let t = from + (to - from) * i as f64 / (TAIL_SAMPLES - 1) as f64;
        let v = g(t)?;
        if !(v > 0.0 && v.is_finite()) {
            return Ok(None);
        }
        xs.push(t.max(f64::MIN_POSITIVE).ln());
        ys.push(v.ln());
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let exponent = sxy / sxx;
    let residual = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - my - exponent * (x - mx)).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    let local = xs
        .windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| (y[1] - y[0]) / (x[1] - x[0]))
        .collect();
    Ok(Some(TailFit {
        exponent,
        residual,
        local,
    }))
}

fn classify(fit: &TailFit) -> H1Status {
    if fit.residual <= FIT_RESIDUAL_MAX {
        if fit.exponent < FINITE_EXPONENT {
            H1Status::Finite
        } else if fit.exponent >= DIVERGENT_EXPONENT {
            H1Status::Divergent
        } else {
            H1Status::Inconclusive
        }
    } else if fit.local.iter().all(|k| *k < FINITE_EXPONENT) {
        // Faster than any power on the whole window, e.g. exponential decay.
        H1Status::Finite
    } else if fit.local.iter().all(|k| *k >= DIVERGENT_EXPONENT) {
        H1Status::Divergent
    } else {
        H1Status::Inconclusive
    }
}

fn verdict_from<F: Fn(f64) -> Result<f64>>(g: F, horizon: f64, tail_window: f64) -> Result<H1Verdict> {
    if !(tail_window > 0.0 && horizon >= 10.0 * tail_window) {
        return Err(Error::invalid(format!(
            "need horizon >= 10 * tail_window > 0, got horizon {horizon}, window {tail_window}"
        )));
    }
    let failure = RefCell::new(None);
    let partial = integrate(
        |t| match g(t) {
            Ok(v) => v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        },
        0.0,
        horizon,
    )?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let mut zero = true;
    let mut infinite = false;
    for i in 0..TAIL_SAMPLES {
        let t = horizon - tail_window + tail_window * i as f64 / (TAIL_SAMPLES - 1) as f64;
        let v = g(t)?;
        zero &= v == 0.0;
        infinite |= v.is_infinite();
    }
    let (status, exponent, residual) = if infinite || partial.is_infinite() {
        (H1Status::Divergent, f64::NAN, f64::NAN)
    } else if zero {
        (H1Status::Finite, f64::NEG_INFINITY, 0.0)
    } else {
        match fit_tail(&g, horizon - tail_window, horizon)? {
            Some(fit) => (classify(&fit), fit.exponent, fit.residual),
            None => (H1Status::Inconclusive, f64::NAN, f64::NAN),
        }
    };
    Ok(H1Verdict {
        status,
        partial_integral: partial,
        tail_exponent: exponent,
        fit_residual: residual,
        horizon,
    })
}

pub fn h1_check(
    psi: &ConvexFunction,
    normals: &[CertifiedNormal],
    beta: &Schedule,
    horizon: f64,
    tail_window: f64,
) -> Result<Vec<H1Verdict>> {
    normals
        .iter()
        .map(|n| verdict_from(|t| h1_integrand(psi, n, beta, t), horizon, tail_window))
        .collect()
}

/// The same audit in the ε parameterization: `∫ Ψ*(ε p) − σ_C(ε p) dt`.
pub fn h1_eps_check(
    psi: &ConvexFunction,
    normals: &[CertifiedNormal],
    eps: &Schedule,
    horizon: f64,
    tail_window: f64,
) -> Result<Vec<H1Verdict>> {
    normals
        .iter()
        .map(|n| verdict_from(|t| h1_eps_integrand(psi, n, eps, t), horizon, tail_window))
        .collect()
}

pub const H2_SAMPLES: usize = 10_001;

fn grid(from: f64, to: f64) -> impl Iterator<Item = f64> {
    (0..H2_SAMPLES).map(move |i| from + (to - from) * i as f64 / (H2_SAMPLES - 1) as f64)
}

/// `0 ≤ β̇ ≤ kβ` on a dense grid of `[t0, horizon]`.
pub fn h2_check(beta: &Schedule, k: f64, t0: f64, horizon: f64) -> Result<bool> {
    if !(horizon > t0 && t0 >= 0.0 && k >= 0.0) {
        return Err(Error::invalid(format!(
            "need horizon > t0 >= 0 and k >= 0, got t0 {t0}, horizon {horizon}, k {k}"
        )));
    }
    for t in grid(t0, horizon) {
        let (v, d) = (beta.value(t), beta.derivative(t));
        let ok = if v.is_finite() && d.is_finite() {
            d >= 0.0 && d <= k * v + 1e-12
        } else {
            let rate = beta.growth_rate(t);
            rate >= 0.0 && rate <= k
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Tail exponent below which ε is considered to tend to zero.
pub const VANISHING_EXPONENT: f64 = -1e-2;

/// ε nonincreasing, `−kε² ≤ ε̇` on a dense grid, ε → 0 and `∫ε = ∞` judged by
/// the tail exponent on the last tenth of `[0, horizon]`.
pub fn h2_eps_check(eps: &Schedule, k: f64, horizon: f64) -> Result<bool> {
    if !(horizon > 0.0 && k >= 0.0) {
        return Err(Error::invalid(format!(
            "need horizon > 0 and k >= 0, got horizon {horizon}, k {k}"
        )));
    }
    for t in grid(0.0, horizon) {
        let (v, d) = (eps.value(t), eps.derivative(t));
        if !(v.is_finite() && d.is_finite()) || d > 1e-12 || d < -k * v * v - 1e-12 {
            return Ok(false);
        }
    }
    let fit = fit_tail(|t| Ok(eps.value(t)), 0.9 * horizon, horizon)?;
    Ok(match fit {
        Some(fit) => fit.exponent < VANISHING_EXPONENT && fit.exponent >= DIVERGENT_EXPONENT,
        None => false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};

    fn dist2() -> ConvexFunction {
        ConvexFunction::sqdist_affine(DMatrix::from_row_slice(1, 2, &[1.0, 1.0]), DVector::from_element(1, 2.0)).unwrap()
    }

    fn normal(psi: &ConvexFunction, norm: f64) -> CertifiedNormal {
        let s = norm / 2f64.sqrt();
        CertifiedNormal::new(psi, DVector::from_column_slice(&[s, s]), DVector::from_column_slice(&[1.0, 1.0])).unwrap()
    }

    #[test]
    fn derivative_matches_central_difference() {
        let all = [
            Schedule::power(1.5, 2.0).unwrap(),
            Schedule::power(1.0, -1.0).unwrap().with_direction(Direction::Epsilon),
            Schedule::exponential(0.5, 1.0).unwrap(),
            Schedule::constant(3.0).unwrap(),
            Schedule::logarithmic(2.0).unwrap(),
            Schedule::exp_quadratic(1.0, 0.1).unwrap(),
            Schedule::rescaled(Schedule::power(1.0, 2.0).unwrap()),
        ];
        for s in &all {
            for &t in &[0.3, 1.0, 4.0] {
                let hh = 1e-5;
                let fd = (s.value(t + hh) - s.value(t - hh)) / (2.0 * hh);
                let d = s.derivative(t);
                assert!((fd - d).abs() <= 1e-6 * d.abs().max(1e-3), "{s}: {fd} vs {d}");
                assert!((s.growth_rate(t) - d / s.value(t)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn parse_display_round_trip() {
        for text in ["power 1 2", "eps power 1 -1", "exp 0.5 1", "const 3", "log 2", "expquad 1 1", "rescaled power 1 2"] {
            let s: Schedule = text.parse().unwrap();
            assert_eq!(s.to_string(), text);
        }
        assert!("power 0 2".parse::<Schedule>().is_err());
        assert!("power 1".parse::<Schedule>().is_err());
        assert!("cubic 1 2".parse::<Schedule>().is_err());
    }

    #[test]
    fn rescale_examples() {
        let (s, e) = rescale_to_eps(&Schedule::constant(1.0).unwrap(), 3.0).unwrap();
        assert!((s - 3.0).abs() < 1e-12 && (e - 1.0).abs() < 1e-12);
        let beta = Schedule::exponential(1.0, 1.0).unwrap();
        for &t in &[0.1, 1.0, 5.0, 100.0] {
            let (s, e) = rescale_to_eps(&beta, t).unwrap();
            // ∫₀ˢ eᵘ du = eˢ − 1
            assert!((s - (1.0 + t).ln()).abs() < 1e-9 * (1.0 + t));
            assert!((e - 1.0 / (1.0 + t)).abs() < 1e-9);
        }
    }

    #[test]
    fn dictionary_round_trip() {
        let beta = Schedule::power(1.0, 2.0).unwrap();
        let eps = Schedule::rescaled(beta.clone());
        let (s, _) = rescale_to_eps(&beta, 5.0).unwrap();
        // t_ε is the clock of ε, whose inverse is ∫₀ˢ β.
        let back = eps.inverse_clock(s).unwrap();
        assert!((back - 5.0).abs() <= 5e-8, "{back}");
        for i in 0..100 {
            let t = 0.37 * i as f64;
            let (s, e) = rescale_to_eps(&beta, t).unwrap();
            assert!((e * beta.value(s) - 1.0).abs() < 1e-10);
            assert!((s - ((1.0 + 3.0 * t).cbrt() - 1.0)).abs() < 1e-9 * (1.0 + t));
        }
    }

    #[test]
    fn unreachable_clock_is_rejected() {
        let b = Schedule::power(1.0, -2.0).unwrap();
        assert!(b.inverse_clock(2.0).unwrap_err().is_validation());
    }

    #[test]
    fn integrand_examples() {
        let psi = dist2();
        let beta = Schedule::power(1.0, 2.0).unwrap();
        let v = h1_integrand(&psi, &normal(&psi, 1.0), &beta, 1.0).unwrap();
        assert!((v - 0.125).abs() < 1e-12);
        assert_eq!(h1_integrand(&psi, &normal(&psi, 0.0), &beta, 3.0).unwrap(), 0.0);
        let ind = ConvexFunction::indicator_affine(DMatrix::from_row_slice(1, 2, &[1.0, 1.0]), DVector::from_element(1, 2.0)).unwrap();
        for &t in &[0.0, 1.0, 10.0] {
            assert_eq!(h1_integrand(&ind, &normal(&ind, 3.0), &beta, t).unwrap(), 0.0);
        }
        let eps = Schedule::power(1.0, -1.0).unwrap().with_direction(Direction::Epsilon);
        let e = h1_eps_integrand(&psi, &normal(&psi, 2.0), &eps, 1.0).unwrap();
        assert!((e - 0.25 * 4.0 / 2.0).abs() < 1e-12);
    }

    #[test]
    fn uncertified_direction_rejected() {
        let psi = dist2();
        let err = CertifiedNormal::new(&psi, DVector::from_column_slice(&[1.0, 0.0]), DVector::from_column_slice(&[1.0, 1.0]));
        assert!(err.unwrap_err().is_validation());
    }

    #[test]
    fn h1_verdicts_follow_integrability_of_inverse_beta() {
        let psi = dist2();
        let n = [normal(&psi, 1.0)];
        for (p, expect) in [(2.0, H1Status::Finite), (1.0, H1Status::Divergent), (0.5, H1Status::Divergent), (3.0, H1Status::Finite)] {
            let beta = Schedule::power(1.0, p).unwrap();
            let v = &h1_check(&psi, &n, &beta, 1000.0, 100.0).unwrap()[0];
            assert_eq!(v.status, expect, "p = {p}: {v:?}");
        }
        let exp = Schedule::exponential(1.0, 1.0).unwrap();
        assert_eq!(h1_check(&psi, &n, &exp, 1000.0, 100.0).unwrap()[0].status, H1Status::Finite);
        let ind = ConvexFunction::indicator_affine(DMatrix::from_row_slice(1, 2, &[1.0, 1.0]), DVector::from_element(1, 2.0)).unwrap();
        let v = &h1_check(&ind, &[normal(&ind, 1.0)], &Schedule::power(1.0, 1.0).unwrap(), 1000.0, 100.0).unwrap()[0];
        assert_eq!(v.status, H1Status::Finite);
        assert_eq!(v.partial_integral, 0.0);
        assert!(h1_check(&psi, &n, &exp, 100.0, 20.0).is_err());
    }

    #[test]
    fn partial_integral_grows_with_horizon() {
        let psi = dist2();
        let n = [normal(&psi, 1.0)];
        let beta = Schedule::power(1.0, 1.5).unwrap();
        let mut last = 0.0;
        for h in [100.0, 200.0, 400.0, 800.0] {
            let v = h1_check(&psi, &n, &beta, h, h / 10.0).unwrap()[0].partial_integral;
            assert!(v >= last);
            last = v;
        }
    }

    #[test]
    fn change_of_variables_matches() {
        // ∫₀ᵀ β[Ψ*−σ](p/β) ds = ∫₀^{∫₀ᵀβ} [Ψ*−σ](ε p) dt
        let psi = dist2();
        let n = normal(&psi, 1.5);
        let beta = Schedule::power(1.0, 2.0).unwrap();
        let eps = Schedule::rescaled(beta.clone());
        let big_t = 4.0;
        let lhs = integrate(|s| h1_integrand(&psi, &n, &beta, s).unwrap(), 0.0, big_t).unwrap();
        let upper = beta.integral(0.0, big_t).unwrap();
        let rhs = integrate(|t| h1_eps_integrand(&psi, &n, &eps, t).unwrap(), 0.0, upper).unwrap();
        assert!((lhs - rhs).abs() <= 1e-6 * lhs, "{lhs} vs {rhs}");
    }

    #[test]
    fn h2_examples() {
        assert!(h2_check(&Schedule::exponential(1.0, 1.0).unwrap(), 1.0, 0.0, 50.0).unwrap());
        assert!(h2_check(&Schedule::power(1.0, 2.0).unwrap(), 2.0, 0.0, 100.0).unwrap());
        assert!(!h2_check(&Schedule::exp_quadratic(1.0, 1.0).unwrap(), 3.0, 0.0, 10.0).unwrap());
        assert!(!h2_check(&Schedule::power(1.0, -1.0).unwrap(), 3.0, 0.0, 10.0).unwrap());
        assert!(h2_check(&Schedule::power(1.0, 2.0).unwrap(), 1.0, 5.0, 5.0).is_err());
    }

    #[test]
    fn h2_eps_examples() {
        let e = |p: f64| Schedule::power(1.0, p).unwrap().with_direction(Direction::Epsilon);
        assert!(h2_eps_check(&e(-1.0), 1.0, 1000.0).unwrap());
        assert!(!h2_eps_check(&e(-2.0), 0.1, 1000.0).unwrap());
        assert!(!h2_eps_check(&e(-2.0), 10.0, 1000.0).unwrap());
        assert!(!h2_eps_check(&Schedule::constant(1.0).unwrap(), 1.0, 1000.0).unwrap());
    }
}
