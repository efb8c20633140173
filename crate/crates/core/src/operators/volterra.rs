//! Norms of powers of the Volterra operator `Vf(x) = ∫_0^x f(t) dt` on
//! `L²[0, 1]`, and the commutator `[T, V] = V²` with `T` multiplication by `x`.
//!
//! `Vⁿ` has kernel `(x − t)^{n−1} / (n − 1)!` for `t < x`. On the midpoint grid
//! `x_i = (i + ½)h` the discretized kernel depends only on `i − j`, so each
//! operator is a lower-triangular Toeplitz matrix and is stored by its first
//! column.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::series::ln_factorial;

pub const MIN_GRID: usize = 100;
pub const DEFAULT_GRID: usize = 2000;
pub const DEFAULT_NMAX: usize = 40;

const POWER_TOL: f64 = 1e-13;
const POWER_MAX_ITER: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolterraNorm {
    pub n: usize,
    /// Estimate of `‖Vⁿ‖`.
    pub norm: f64,
    /// `n! · ‖Vⁿ‖`
    pub n_factorial_scaled: f64,
}

/// Lower-triangular Toeplitz matrix given by its first column.
#[derive(Debug, Clone)]
pub struct LowerToeplitz {
    column: Vec<f64>,
}

impl LowerToeplitz {
    pub fn new(column: Vec<f64>) -> Self {
        LowerToeplitz { column }
    }

    pub fn dim(&self) -> usize {
        self.column.len()
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| (0..=i).map(|j| self.column[i - j] * v[j]).sum())
            .collect()
    }

    pub fn apply_transpose(&self, v: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|j| (j..n).map(|i| self.column[i - j] * v[i]).sum())
            .collect()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |i, j| if i >= j { self.column[i - j] } else { 0.0 })
    }

    /// Largest singular value by power iteration on `AᵀA`.
    pub fn spectral_norm(&self) -> f64 {
        largest_singular_value(self.dim(), |v| self.apply(v), |v| self.apply_transpose(v))
    }
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Power iteration for `σ_max` of an operator given by its action and adjoint.
pub fn largest_singular_value(
    dim: usize,
    apply: impl Fn(&[f64]) -> Vec<f64>,
    apply_t: impl Fn(&[f64]) -> Vec<f64>,
) -> f64 {
    let mut v = vec![1.0 / (dim as f64).sqrt(); dim];
    let mut sigma = 0.0;
    for _ in 0..POWER_MAX_ITER {
        let av = apply(&v);
        let next_sigma = norm2(&av);
        let mut w = apply_t(&av);
        let wn = norm2(&w);
        if wn == 0.0 {
            return next_sigma;
        }
        w.iter_mut().for_each(|x| *x /= wn);
        v = w;
        if (next_sigma - sigma).abs() <= POWER_TOL * next_sigma {
            return next_sigma;
        }
        sigma = next_sigma;
    }
    sigma
}

/// First column of `n!·h·K_n`, the discretization of `n!·Vⁿ`.
///
/// Entries are `n·((i−j)h)^{n−1}·h`, evaluated in log domain; the diagonal of
/// `V` itself gets half weight.
pub fn scaled_kernel_column(grid: usize, n: usize) -> LowerToeplitz {
    let h = 1.0 / grid as f64;
    let column = (0..grid)
        .map(|d| match (n, d) {
            (1, 0) => 0.5 * h,
            (1, _) => h,
            (_, 0) => 0.0,
            _ => ((n as f64).ln() + (n - 1) as f64 * (d as f64 * h).ln()).exp() * h,
        })
        .collect();
    LowerToeplitz::new(column)
}

/// `‖Vⁿ‖` estimates for `n = 1..=n_max` on a uniform grid.
pub fn volterra_norms(grid: usize, n_max: usize, exec: Execution) -> Result<Vec<VolterraNorm>> {
    if grid < MIN_GRID {
        return Err(Error::InvalidArgument(format!("grid must be at least {MIN_GRID}, got {grid}")));
    }
    Ok(exec.map(n_max, |i| {
        let n = i + 1;
        let scaled = scaled_kernel_column(grid, n).spectral_norm();
        VolterraNorm {
            n,
            norm: (scaled.ln() - ln_factorial(n)).exp(),
            n_factorial_scaled: scaled,
        }
    }))
}

/// Quadrature matrix of `V`: weight `h` below the diagonal, `h/2` on it.
pub fn quadrature_matrix(grid: usize) -> DMatrix<f64> {
    scaled_kernel_column(grid, 1).to_dense()
}

/// Multiplication by `x` on the midpoint grid.
pub fn multiplication_matrix(grid: usize) -> DMatrix<f64> {
    let h = 1.0 / grid as f64;
    DMatrix::from_fn(grid, grid, |i, j| if i == j { (i as f64 + 0.5) * h } else { 0.0 })
}

/// `‖TV − VT − V²‖` on the grid.
pub fn commutator_residual_tv(grid: usize) -> Result<f64> {
    if grid < MIN_GRID {
        return Err(Error::InvalidArgument(format!("grid must be at least {MIN_GRID}, got {grid}")));
    }
    let v = quadrature_matrix(grid);
    let t = multiplication_matrix(grid);
    let e = &t * &v - &v * &t - &v * &v;
    let et = e.transpose();
    Ok(largest_singular_value(
        grid,
        |x| (&e * nalgebra::DVector::from_column_slice(x)).as_slice().to_vec(),
        |x| (&et * nalgebra::DVector::from_column_slice(x)).as_slice().to_vec(),
    ))
}

/// `(max − min) / min` of a sequence.
pub fn relative_variation(values: &[f64]) -> f64 {
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    (max - min) / min
}
