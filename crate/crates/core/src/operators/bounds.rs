//! Norm bounds for `(y − λ)ⁿχ` obtained by iterating
//! `‖y^{n+k−1} gχ‖ <= n⁻¹ C ‖yⁿ gχ‖ ‖w‖`.
//!
//! `C` is a stability constant of the derivation on the ambient Banach algebra
//! and `w` the local inverse of `g`; both are inputs. `base[m]` bounds
//! `‖yᵐ gχ‖` for the starting exponents.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::ln_factorial;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundSequence {
    pub k: usize,
    pub c: f64,
    pub w_norm: f64,
    pub base: Vec<f64>,
    /// `bounds[n]` bounds `‖yⁿχ‖`.
    pub bounds: Vec<f64>,
}

/// Propagates the recurrence for `n = 0..terms`.
///
/// For `k = 1` the step maps `‖yⁿgχ‖` to at most `(C‖w‖/n)·‖yⁿgχ‖`, which
/// forces zero once `n > C‖w‖`; below that the base values are carried
/// (held at the last supplied value). For `k >= 2` the exponents split as
/// `n = m + j(k−1)` with `1 <= m <= k−1`, and `base` must supply `m = 0..k−1`.
pub fn bound_propagator(k: usize, c: f64, w_norm: f64, base: &[f64], terms: usize) -> Result<BoundSequence> {
    if k == 0 {
        return Err(Error::InvalidArgument("order k must be at least 1".into()));
    }
    if !(c > 0.0 && w_norm > 0.0) {
        return Err(Error::InvalidArgument("C and ||w|| must be positive".into()));
    }
    if base.is_empty() || base.iter().any(|b| !(*b >= 0.0)) || (k >= 2 && base.len() < k) {
        return Err(Error::InvalidArgument(format!(
            "need nonnegative base norms for m = 0..{}",
            k.saturating_sub(1)
        )));
    }
    let gain = c * w_norm;
    // g[n] bounds ‖yⁿ gχ‖
    let mut g = vec![0.0; terms];
    if k == 1 {
        for (n, slot) in g.iter_mut().enumerate() {
            *slot = if n as f64 > gain { 0.0 } else { base[n.min(base.len() - 1)] };
        }
    } else {
        for n in 0..terms {
            g[n] = if n < k { base[n] } else {
                let prev = n - (k - 1);
                gain * g[prev] / prev as f64
            };
        }
    }
    Ok(BoundSequence {
        k,
        c,
        w_norm,
        base: base.to_vec(),
        bounds: g.into_iter().map(|x| x * w_norm).collect(),
    })
}

/// `m(m+k−1)···(m+(j−1)(k−1))`
pub fn chain_denominator(m: usize, k: usize, j: usize) -> f64 {
    (0..j).map(|i| (m + i * (k - 1)) as f64).product()
}

/// Closed form of the propagated bound for `n = m + j(k−1)`:
/// `C^j ‖w‖^{j+1} base[m] / (m(m+k−1)···(m+(j−1)(k−1)))`.
pub fn closed_form_bound(k: usize, c: f64, w_norm: f64, base_m: f64, m: usize, j: usize) -> f64 {
    c.powi(j as i32) * w_norm.powi(j as i32 + 1) * base_m / chain_denominator(m, k, j)
}

/// `ln` of both sides of `∏_{i<j} (m+i(k−1))^{k−1} >= (m+(j−1)(k−1))!`.
pub fn factorial_chain_sides(m: usize, k: usize, j: usize) -> (f64, f64) {
    let lhs = (k - 1) as f64 * (0..j).map(|i| ((m + i * (k - 1)) as f64).ln()).sum::<f64>();
    let rhs = ln_factorial(m + (j - 1) * (k - 1));
    (lhs, rhs)
}

/// `K·rⁿ / ((n+k−1)!)^{1/(k−1)}`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub k: usize,
    pub scale: f64,
    pub rate: f64,
}

impl Envelope {
    pub fn value(&self, n: usize) -> f64 {
        let ln = self.scale.ln() + n as f64 * self.rate.ln()
            - ln_factorial(n + self.k - 1) / (self.k - 1) as f64;
        ln.exp()
    }

    /// Fits `ln K` and `ln r` by least squares on `ln bounds[n]` over the
    /// positive terms with `n >= k−1`, then raises `K` until every term lies
    /// on or below the envelope.
    pub fn fit(seq: &BoundSequence) -> Result<Self> {
        let k = seq.k;
        if k < 2 {
            return Err(Error::InvalidArgument("envelopes are defined for k >= 2".into()));
        }
        let points: Vec<(f64, f64)> = seq
            .bounds
            .iter()
            .enumerate()
            .skip(k - 1)
            .filter(|(_, b)| **b > 0.0)
            .map(|(n, b)| (n as f64, b.ln() + ln_factorial(n + k - 1) / (k - 1) as f64))
            .collect();
        if points.len() < 2 {
            return Err(Error::InvalidArgument("need at least two positive terms".into()));
        }
        let len = points.len() as f64;
        let mx = points.iter().map(|p| p.0).sum::<f64>() / len;
        let my = points.iter().map(|p| p.1).sum::<f64>() / len;
        let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let slope = sxy / sxx;
        let intercept = my - slope * mx;
        let lift = points
            .iter()
            .map(|(x, y)| y - (intercept + slope * x))
            .fold(f64::NEG_INFINITY, f64::max);
        Ok(Envelope {
            k,
            scale: (intercept + lift).exp() * (1.0 + 1e-12),
            rate: slope.exp(),
        })
    }

    /// An envelope read off the recurrence: with `ρ = max(1, (C‖w‖)^{1/(k−1)})`,
    /// rate `2ρ` and `K = ‖w‖·max(base)·max_n (n+k−1)²/2ⁿ`.
    ///
    /// Uses `∏ (m+i(k−1))^{k−1} >= (n−k+1)!` and
    /// `(n+k−1)! <= (n−k+1)!·(n+k−1)^{2(k−1)}`.
    pub fn analytic(seq: &BoundSequence) -> Result<Self> {
        let k = seq.k;
        if k < 2 {
            return Err(Error::InvalidArgument("envelopes are defined for k >= 2".into()));
        }
        let rho = (seq.c * seq.w_norm).powf(1.0 / (k - 1) as f64).max(1.0);
        let base = seq.base.iter().cloned().fold(0.0, f64::max);
        let poly = (0..seq.bounds.len().max(1))
            .map(|n| ((n + k - 1) as f64).powi(2) / 2f64.powi(n as i32))
            .fold(0.0, f64::max);
        Ok(Envelope {
            k,
            scale: seq.w_norm * base * poly * (1.0 + 1e-12),
            rate: 2.0 * rho,
        })
    }

    /// Indices `n >= k−1` whose bound exceeds the envelope.
    pub fn violations(&self, seq: &BoundSequence) -> Vec<usize> {
        seq.bounds
            .iter()
            .enumerate()
            .skip(self.k - 1)
            .filter(|(n, b)| **b > self.value(*n))
            .map(|(n, _)| n)
            .collect()
    }
}
