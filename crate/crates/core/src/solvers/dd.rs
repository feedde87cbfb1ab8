//! Two-subdomain decomposition of `−u'' = f` on `(0, 1)` with homogeneous
//! Dirichlet ends, coupled through a penalized interface jump.

use super::PenaltySequence;
use crate::error::{Error, Result};
use crate::linalg::Tridiagonal;

/// Nodes `xⱼ = j/n`. Subdomain 1 holds nodes `1..=split`, subdomain 2 holds
/// `split..=n−1`; the interface node is stored once in each.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledProblem {
    pub n: usize,
    pub split: usize,
    /// Stiffness of `½∫|v'|²` on each side; Neumann row at the interface.
    pub k1: Tridiagonal,
    pub k2: Tridiagonal,
    /// Lumped loads `∫ f vᵢ`.
    pub h1: Vec<f64>,
    pub h2: Vec<f64>,
}

impl CoupledProblem {
    /// Index of the interface node within subdomain 1 (its last unknown).
    pub fn trace1(&self) -> usize {
        self.split - 1
    }

    /// Index of the interface node within subdomain 2 (its first unknown).
    pub fn trace2(&self) -> usize {
        0
    }

    /// `[u] = L₁u₁ − L₂u₂`.
    pub fn jump(&self, u1: &[f64], u2: &[f64]) -> f64 {
        u1[self.trace1()] - u2[self.trace2()]
    }

    pub fn nodes1(&self) -> Vec<f64> {
        (1..=self.split).map(|j| j as f64 / self.n as f64).collect()
    }

    pub fn nodes2(&self) -> Vec<f64> {
        (self.split..self.n).map(|j| j as f64 / self.n as f64).collect()
    }
}

pub fn dd_assemble<F: Fn(f64) -> f64>(n: usize, split: usize, source: F) -> Result<CoupledProblem> {
    if n < 3 {
        return Err(Error::invalid(format!("grid size must be at least 3, got {n}")));
    }
    if !(1 < split && split < n - 1) {
        return Err(Error::invalid(format!(
            "split must satisfy 1 < split < n - 1 = {}, got {split}",
            n - 1
        )));
    }
    let hh = 1.0 / n as f64;
    let stiff = |len: usize, neumann_first: bool| {
        let mut diag = vec![2.0 / hh; len];
        if neumann_first {
            diag[0] = 1.0 / hh;
        } else {
            diag[len - 1] = 1.0 / hh;
        }
        Tridiagonal::new(diag, vec![-1.0 / hh; len - 1])
    };
    let load = |j: usize| {
        let v = hh * source(j as f64 * hh);
        if j == split {
            0.5 * v
        } else {
            v
        }
    };
    let h1: Vec<f64> = (1..=split).map(load).collect();
    let h2: Vec<f64> = (split..n).map(load).collect();
    if h1.iter().chain(&h2).any(|v| !v.is_finite()) {
        return Err(Error::invalid("source must be finite on the grid"));
    }
    Ok(CoupledProblem {
        n,
        split,
        k1: stiff(split, false),
        k2: stiff(n - split, true),
        h1,
        h2,
    })
}

/// The single-domain solve on interior nodes `1..=n−1`.
pub fn dd_monolithic(cp: &CoupledProblem) -> Result<Vec<f64>> {
    let m = cp.n - 1;
    let hh = 1.0 / cp.n as f64;
    let k = Tridiagonal::new(vec![2.0 / hh; m], vec![-1.0 / hh; m - 1]);
    let mut rhs = cp.h1.clone();
    rhs[cp.trace1()] += cp.h2[0];
    rhs.extend_from_slice(&cp.h2[1..]);
    k.solve_shifted(None, &rhs)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DdRecord {
    pub k: usize,
    pub beta: f64,
    /// `|u₁(Γ) − u₂(Γ)|`
    pub jump: f64,
    /// Max-norm distance to the monolithic solution, both interface copies included.
    pub sup_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DdRun {
    pub u1: Vec<f64>,
    pub u2: Vec<f64>,
    pub monolithic: Vec<f64>,
    pub records: Vec<DdRecord>,
}

/// Alternating subdomain solves
/// `((1+α)K₁ + β_k e eᵀ)u₁ = h₁ + αK₁u₁ᵏ + β_k e u₂ᵏ(Γ)`, then the same on
/// side 2 against the new `u₁(Γ)`, starting from zero.
pub fn dd_run(cp: &CoupledProblem, alpha: f64, beta: &PenaltySequence, iters: usize) -> Result<DdRun> {
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::invalid(format!("alpha must be nonnegative, got {alpha}")));
    }
    if iters == 0 {
        return Err(Error::invalid("iteration count must be positive"));
    }
    beta.validate(iters, false)?;
    let mono = dd_monolithic(cp)?;
    let a1 = cp.k1.scaled(1.0 + alpha);
    let a2 = cp.k2.scaled(1.0 + alpha);
    let (g1, g2) = (cp.trace1(), cp.trace2());
    let mut u1 = vec![0.0; cp.k1.len()];
    let mut u2 = vec![0.0; cp.k2.len()];
    let mut records = Vec::with_capacity(iters);
    for k in 0..iters {
        let b = beta.value(k)?;
        let mut rhs1: Vec<f64> = cp.k1.mul(&u1).iter().zip(&cp.h1).map(|(ku, h)| h + alpha * ku).collect();
        rhs1[g1] += b * u2[g2];
        u1 = a1.solve_shifted(Some((g1, b)), &rhs1)?;
        let mut rhs2: Vec<f64> = cp.k2.mul(&u2).iter().zip(&cp.h2).map(|(ku, h)| h + alpha * ku).collect();
        rhs2[g2] += b * u1[g1];
        u2 = a2.solve_shifted(Some((g2, b)), &rhs2)?;
        let err1 = u1.iter().zip(&mono).map(|(a, m)| (a - m).abs());
        let err2 = u2.iter().zip(&mono[g1..]).map(|(a, m)| (a - m).abs());
        let sup_error = err1.chain(err2).fold(0.0, f64::max);
        records.push(DdRecord {
            k,
            beta: b,
            jump: cp.jump(&u1, &u2).abs(),
            sup_error,
        });
    }
    Ok(DdRun {
        u1,
        u2,
        monolithic: mono,
        records,
    })
}
