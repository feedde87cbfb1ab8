//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub type Point = DVector<f64>;

/// Relative singular-value cutoff used for pseudo-inverses and rank decisions.
pub const RANK_TOL: f64 = 1e-12;

/// Eigen-decomposition of the symmetric dilation `[0 m; mᵀ 0]`. Its
/// eigenvalues are `±σᵢ` plus zeros. nalgebra's SVD can return factors that
/// do not reconstruct rank-deficient inputs, so pseudo-inverses and ranks go
/// through this symmetric route instead.
fn dilation_eigen(m: &DMatrix<f64>) -> nalgebra::SymmetricEigen<f64, nalgebra::Dyn> {
    let (r, c) = (m.nrows(), m.ncols());
    let mut d = DMatrix::zeros(r + c, r + c);
    d.view_mut((0, r), (r, c)).copy_from(m);
    d.view_mut((r, 0), (c, r)).copy_from(&m.transpose());
    nalgebra::SymmetricEigen::new(d)
}

fn cutoff(eigenvalues: &DVector<f64>) -> f64 {
    RANK_TOL * eigenvalues.amax().max(f64::MIN_POSITIVE)
}

pub fn pinv(m: &DMatrix<f64>) -> DMatrix<f64> {
    let (r, c) = (m.nrows(), m.ncols());
    let mut out = DMatrix::zeros(c, r);
    if r == 0 || c == 0 {
        return out;
    }
    let eig = dilation_eigen(m);
    let cut = cutoff(&eig.eigenvalues);
    for (i, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda.abs() > cut {
            let e = eig.eigenvectors.column(i);
            // Each pair ±σ contributes v uᵀ/(2σ); together v uᵀ/σ.
            out += e.rows(r, c) * e.rows(0, r).transpose() / lambda;
        }
    }
    out
}

pub fn rank(m: &DMatrix<f64>) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let eig = dilation_eigen(m);
    if eig.eigenvalues.amax() == 0.0 {
        return 0;
    }
    let cut = cutoff(&eig.eigenvalues);
    eig.eigenvalues.iter().filter(|&&v| v > cut).count()
}

/// Orthonormal basis of the null space of `m`, one vector per column.
pub fn null_space(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.ncols();
    let proj = DMatrix::identity(n, n) - pinv(m) * m;
    let eig = nalgebra::SymmetricEigen::new(0.5 * (&proj + proj.transpose()));
    let cols: Vec<DVector<f64>> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &v)| v > 0.5)
        .map(|(i, _)| eig.eigenvectors.column(i).into_owned())
        .collect();
    if cols.is_empty() {
        DMatrix::zeros(n, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

/// Smallest eigenvalue of the symmetric part of `m`.
pub fn min_sym_eigenvalue(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    let sym = 0.5 * (m + m.transpose());
    nalgebra::SymmetricEigen::new(sym)
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

pub fn is_symmetric(m: &DMatrix<f64>, tol: f64) -> bool {
    m.is_square() && (m - m.transpose()).amax() <= tol * (1.0 + m.amax())
}

/// Solve a symmetric positive definite system, falling back to LU.
pub fn solve_spd(m: &DMatrix<f64>, rhs: &DVector<f64>) -> Result<DVector<f64>> {
    if let Some(chol) = m.clone().cholesky() {
        return Ok(chol.solve(rhs));
    }
    solve(m, rhs)
}

pub fn solve(m: &DMatrix<f64>, rhs: &DVector<f64>) -> Result<DVector<f64>> {
    m.clone()
        .lu()
        .solve(rhs)
        .filter(|x| x.iter().all(|v| v.is_finite()))
        .ok_or_else(|| Error::numerical("singular linear system"))
}

/// Block-diagonal matrix from square or rectangular blocks.
pub fn block_diag(blocks: &[DMatrix<f64>]) -> DMatrix<f64> {
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = DMatrix::zeros(rows, cols);
    let (mut r, mut c) = (0, 0);
    for b in blocks {
        out.view_mut((r, c), (b.nrows(), b.ncols())).copy_from(b);
        r += b.nrows();
        c += b.ncols();
    }
    out
}

pub fn concat(parts: &[DVector<f64>]) -> DVector<f64> {
    DVector::from_iterator(
        parts.iter().map(|p| p.len()).sum(),
        parts.iter().flat_map(|p| p.iter().cloned()),
    )
}

/// Split `x` into consecutive blocks of the given sizes.
pub fn split(x: &DVector<f64>, sizes: &[usize]) -> Vec<DVector<f64>> {
    let mut out = Vec::with_capacity(sizes.len());
    let mut off = 0;
    for &s in sizes {
        out.push(x.rows(off, s).into_owned());
        off += s;
    }
    out
}

/// Symmetric tridiagonal matrix stored by its diagonal and off-diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl Tridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert_eq!(off.len() + 1, diag.len().max(1));
        Tridiagonal { diag, off }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn mul(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut s = self.diag[i] * x[i];
            if i > 0 {
                s += self.off[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                s += self.off[i] * x[i + 1];
            }
            y[i] = s;
        }
        y
    }

    pub fn scaled(&self, factor: f64) -> Tridiagonal {
        Tridiagonal {
            diag: self.diag.iter().map(|d| d * factor).collect(),
            off: self.off.iter().map(|d| d * factor).collect(),
        }
    }

    /// Thomas algorithm. `shift` is added to the diagonal entry `shift.0`.
    pub fn solve_shifted(&self, shift: Option<(usize, f64)>, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.len();
        let mut d = self.diag.clone();
        if let Some((i, s)) = shift {
            d[i] += s;
        }
        let mut c = vec![0.0; n];
        let mut y = rhs.to_vec();
        for i in 0..n {
            let mut denom = d[i];
            if i > 0 {
                denom -= self.off[i - 1] * c[i - 1];
                y[i] -= self.off[i - 1] * y[i - 1];
            }
            if denom.abs() < 1e-300 || !denom.is_finite() {
                return Err(Error::numerical("singular tridiagonal system"));
            }
            if i + 1 < n {
                c[i] = self.off[i] / denom;
            }
            y[i] /= denom;
        }
        for i in (0..n.saturating_sub(1)).rev() {
            y[i] -= c[i] * y[i + 1];
        }
        Ok(y)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.len();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self.diag[i];
            if i + 1 < n {
                m[(i, i + 1)] = self.off[i];
                m[(i + 1, i)] = self.off[i];
            }
        }
        m
    }
}
