//! Finite-dimensional solutions of `[X, Y] = h(Y)` with `Y = λI + J` a Jordan
//! block, and the evaluation homomorphism `τ` of Ore polynomials on them.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::FunctionModel;
use crate::ore::OrePoly;

pub type CMatrix = DMatrix<Complex64>;

/// Relative singular-value cutoff and residual threshold of the solve.
pub const SOLVER_TOL: f64 = 1e-10;

const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixRep {
    pub dim: usize,
    pub lambda: Complex64,
    #[serde(with = "matrix_json")]
    pub x: CMatrix,
    #[serde(with = "matrix_json")]
    pub y: CMatrix,
    /// `‖XY − YX − h(Y)‖_F`
    pub residual: f64,
}

/// Nilpotent shift with ones on the superdiagonal.
pub fn shift_matrix(dim: usize) -> CMatrix {
    CMatrix::from_fn(dim, dim, |i, j| if j == i + 1 { ONE } else { ZERO })
}

/// `h(λI + J) = Σ_{m<n} c_m Jᵐ`, exact because `Jⁿ = 0`.
pub fn h_of_jordan(h: &FunctionModel, lambda: Complex64, dim: usize) -> Result<CMatrix> {
    let taylor = h.taylor_at(lambda, dim - 1)?;
    Ok(CMatrix::from_fn(dim, dim, |i, j| {
        if j >= i {
            taylor.coeffs()[j - i]
        } else {
            ZERO
        }
    }))
}

/// Solves `[X, λI + J] = h(λI + J)` for the minimum-Frobenius-norm `X`.
///
/// A nonzero trace of `h(Y)` rules out any solution, since commutators are
/// traceless; the error then carries `trace_obstruction = true`.
pub fn jordan_pair(h: &FunctionModel, lambda: Complex64, dim: usize) -> Result<MatrixRep> {
    if dim < 2 {
        return Err(Error::InvalidArgument(format!("dimension must be at least 2, got {dim}")));
    }
    let j = shift_matrix(dim);
    let target = h_of_jordan(h, lambda, dim)?;
    let nn = dim * dim;
    // column (a + b·dim) is vec([E_ab, J]) in column-major order
    let mut op = CMatrix::zeros(nn, nn);
    for b in 0..dim {
        for a in 0..dim {
            let mut e = CMatrix::zeros(dim, dim);
            e[(a, b)] = ONE;
            let comm = &e * &j - &j * &e;
            for (row, v) in comm.iter().enumerate() {
                op[(row, a + b * dim)] = *v;
            }
        }
    }
    let rhs = CMatrix::from_iterator(nn, 1, target.iter().cloned());
    let svd = op.svd(true, true);
    let cutoff = SOLVER_TOL * svd.singular_values.max();
    let sol = svd
        .solve(&rhs, cutoff)
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let x = CMatrix::from_iterator(dim, dim, sol.iter().cloned());
    let y = CMatrix::identity(dim, dim) * lambda + &j;
    let residual = (&x * &y - &y * &x - &target).norm();
    let trace = target.trace();
    let trace_obstruction = trace.norm() > SOLVER_TOL * target.norm().max(1.0);
    if residual > SOLVER_TOL * target.norm().max(1.0) || trace_obstruction {
        return Err(Error::Infeasible {
            dim,
            residual,
            trace_obstruction,
        });
    }
    Ok(MatrixRep {
        dim,
        lambda,
        x,
        y,
        residual,
    })
}

/// Distance from `h(Y)` to the traceless matrices, `|tr h(Y)| / √n`: no
/// commutator can come closer.
pub fn trace_lower_bound(h: &FunctionModel, lambda: Complex64, dim: usize) -> Result<f64> {
    Ok(h_of_jordan(h, lambda, dim)?.trace().norm() / (dim as f64).sqrt())
}

/// `τ(P) = Σ_i c_i(Y − λI) · Xⁱ`, reading component `zero_index` of each coefficient.
pub fn evaluate_orepoly(p: &OrePoly, rep: &MatrixRep, zero_index: usize) -> Result<CMatrix> {
    let n = rep.dim;
    let nil = &rep.y - CMatrix::identity(n, n) * rep.lambda;
    let mut total = CMatrix::zeros(n, n);
    let mut x_pow = CMatrix::identity(n, n);
    for c in p.coeffs() {
        let series = c.components().get(zero_index).ok_or(Error::ComponentMismatch {
            expected: zero_index + 1,
            found: c.len(),
        })?;
        if !series.is_polynomial() && series.trunc_order() < n - 1 {
            return Err(Error::InsufficientOrder {
                needed: n - 1,
                available: series.trunc_order(),
            });
        }
        // Horner in the nilpotent part; orders >= n vanish
        let mut value = CMatrix::zeros(n, n);
        for k in (0..n.min(series.coeffs().len())).rev() {
            value = &value * &nil + CMatrix::identity(n, n) * series.coeffs()[k];
        }
        total += value * &x_pow;
        x_pow = &x_pow * &rep.x;
    }
    Ok(total)
}

mod matrix_json {
    use super::CMatrix;
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &CMatrix, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<Complex64>> = (0..m.nrows()).map(|i| m.row(i).iter().cloned().collect()).collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<CMatrix, D::Error> {
        let rows: Vec<Vec<Complex64>> = Vec::deserialize(d)?;
        let n = rows.len();
        let m = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != m) {
            return Err(serde::de::Error::custom("ragged matrix"));
        }
        Ok(CMatrix::from_fn(n, m, |i, j| rows[i][j]))
    }
}
