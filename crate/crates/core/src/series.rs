//! Truncated complex power series around a center, and the weighted
//! seminorms `Σ |a_n| rⁿ / n!ˢ` and `Σ_{n≤m} |a_n|`.
//!
//! A [`TruncatedSeries`] stores `a_0..a_N` and knows whether the coefficients
//! beyond `N` are zero (a polynomial model) or unknown (a genuine truncation).
//! Every operation returns a series whose `trunc_order` is the largest order
//! through which the result is exact, so comparisons between series only ever
//! look at exact orders.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// `ln n!`
pub fn ln_factorial(n: usize) -> f64 {
    if n < 2 {
        0.0
    } else {
        ln_gamma(n as f64 + 1.0)
    }
}

/// `ln (rⁿ / n!ˢ)`, the logarithm of the weight attached to `a_n`.
pub fn log_weight(n: usize, r: f64, s: f64) -> f64 {
    let pow = if n == 0 { 0.0 } else { n as f64 * r.ln() };
    pow - s * ln_factorial(n)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SeminormParams {
    /// `‖a‖_{r,s} = Σ |a_n| rⁿ / n!ˢ`
    Power { r: f64, s: f64 },
    /// `‖a‖_{m,∞} = Σ_{n≤m} |a_n|`
    Formal { m: usize },
}

impl SeminormParams {
    pub fn power(r: f64, s: f64) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::InvalidSeminorm(format!("r must be positive, got {r}")));
        }
        if !(s >= 0.0 && s.is_finite()) {
            return Err(Error::InvalidSeminorm(format!(
                "s must be finite and nonnegative, got {s}"
            )));
        }
        Ok(SeminormParams::Power { r, s })
    }

    pub fn formal(m: usize) -> Self {
        SeminormParams::Formal { m }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            SeminormParams::Power { r, s } => SeminormParams::power(r, s).map(|_| ()),
            SeminormParams::Formal { .. } => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries {
    center: Complex64,
    coeffs: Vec<Complex64>,
    polynomial: bool,
}

impl TruncatedSeries {
    /// A polynomial model: coefficients past the stored ones are zero.
    pub fn polynomial(center: Complex64, coeffs: Vec<Complex64>) -> Self {
        Self::build(center, coeffs, true)
    }

    /// A truncation: only `coeffs` are known.
    pub fn truncated(center: Complex64, coeffs: Vec<Complex64>) -> Self {
        Self::build(center, coeffs, false)
    }

    fn build(center: Complex64, mut coeffs: Vec<Complex64>, polynomial: bool) -> Self {
        if coeffs.is_empty() {
            coeffs.push(Complex64::new(0.0, 0.0));
        }
        TruncatedSeries {
            center,
            coeffs,
            polynomial,
        }
    }

    pub fn from_real(center: f64, coeffs: &[f64]) -> Self {
        Self::polynomial(
            Complex64::new(center, 0.0),
            coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect(),
        )
    }

    pub fn zero(center: Complex64, order: usize) -> Self {
        Self::polynomial(center, vec![Complex64::new(0.0, 0.0); order + 1])
    }

    pub fn constant(center: Complex64, value: Complex64, order: usize) -> Self {
        let mut s = Self::zero(center, order);
        s.coeffs[0] = value;
        s
    }

    /// `(z - center)^power`, stored through `max(order, power)`.
    pub fn monomial(center: Complex64, power: usize, order: usize) -> Self {
        let mut s = Self::zero(center, order.max(power));
        s.coeffs[power] = Complex64::new(1.0, 0.0);
        s
    }

    pub fn center(&self) -> Complex64 {
        self.center
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Largest order through which the stored coefficients are exact.
    pub fn trunc_order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_polynomial(&self) -> bool {
        self.polynomial
    }

    /// Coefficient of order `n`, if it is known.
    pub fn coeff(&self, n: usize) -> Option<Complex64> {
        match self.coeffs.get(n) {
            Some(&c) => Some(c),
            None if self.polynomial => Some(Complex64::new(0.0, 0.0)),
            None => None,
        }
    }

    /// Index of the last nonzero stored coefficient (0 for the zero series).
    pub fn degree(&self) -> usize {
        self.coeffs
            .iter()
            .rposition(|c| c.norm() != 0.0)
            .unwrap_or(0)
    }

    /// Index of the first coefficient with modulus above `tol`.
    pub fn valuation(&self, tol: f64) -> Option<usize> {
        self.coeffs.iter().position(|c| c.norm() > tol)
    }

    /// Re-expresses the series with `order` stored coefficients.
    ///
    /// Polynomials can be padded to any order. A truncation can only be cut;
    /// asking for more orders than are known keeps the existing ones.
    pub fn with_order(&self, order: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        if order < coeffs.len() - 1 {
            let polynomial = self.polynomial && self.degree() <= order;
            coeffs.truncate(order + 1);
            return Self::build(self.center, coeffs, polynomial);
        }
        if self.polynomial {
            coeffs.resize(order + 1, Complex64::new(0.0, 0.0));
        }
        Self::build(self.center, coeffs, self.polynomial)
    }

    fn check_center(&self, other: &Self) -> Result<()> {
        if self.center != other.center {
            return Err(Error::CenterMismatch(self.center, other.center));
        }
        Ok(())
    }

    /// Common exact order of a binary result and whether it is still a polynomial.
    fn combined(&self, other: &Self, product: bool) -> (usize, bool) {
        let n = self.trunc_order().min(other.trunc_order());
        let poly = self.polynomial
            && other.polynomial
            && if product {
                self.degree() + other.degree() <= n
            } else {
                self.degree().max(other.degree()) <= n
            };
        (n, poly)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_center(other)?;
        let (n, poly) = self.combined(other, false);
        let coeffs = (0..=n).map(|i| self.coeffs[i] + other.coeffs[i]).collect();
        Ok(Self::build(self.center, coeffs, poly))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self::build(
            self.center,
            self.coeffs.iter().map(|&c| c * factor).collect(),
            self.polynomial,
        )
    }

    /// Cauchy product through the common exact order.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_center(other)?;
        let (n, poly) = self.combined(other, true);
        let mut out = vec![Complex64::new(0.0, 0.0); n + 1];
        for (p, &a) in self.coeffs.iter().enumerate().take(n + 1) {
            if a.norm() == 0.0 {
                continue;
            }
            for (q, &b) in other.coeffs.iter().enumerate().take(n + 1 - p) {
                out[p + q] += a * b;
            }
        }
        Ok(Self::build(self.center, out, poly))
    }

    /// `d/dz`; the exact order drops by one.
    pub fn differentiate(&self) -> Result<Self> {
        if self.coeffs.len() == 1 {
            if self.polynomial {
                return Ok(Self::zero(self.center, 0));
            }
            return Err(Error::TruncationExhausted);
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(n, &c)| c * n as f64)
            .collect();
        Ok(Self::build(self.center, coeffs, self.polynomial))
    }

    /// Weighted seminorm over the stored coefficients.
    pub fn seminorm(&self, params: &SeminormParams) -> Result<f64> {
        params.validate()?;
        match *params {
            SeminormParams::Formal { m } => {
                Ok(self.coeffs.iter().take(m + 1).map(|c| c.norm()).sum())
            }
            SeminormParams::Power { r, s } => {
                let limit = f64::MAX.ln();
                let mut total = 0.0;
                for (n, c) in self.coeffs.iter().enumerate() {
                    let modulus = c.norm();
                    if modulus == 0.0 {
                        continue;
                    }
                    let lw = log_weight(n, r, s);
                    let lt = modulus.ln() + lw;
                    if lw > limit || lt > limit {
                        return Err(Error::WeightOverflow { order: n });
                    }
                    total += lt.exp();
                }
                if !total.is_finite() {
                    return Err(Error::WeightOverflow {
                        order: self.trunc_order(),
                    });
                }
                Ok(total)
            }
        }
    }

    /// Re-expands a polynomial around `new_center`.
    pub fn shift_center(&self, new_center: Complex64) -> Result<Self> {
        if !self.polynomial {
            return Err(Error::NotPolynomial);
        }
        let d = new_center - self.center;
        let mut c = self.coeffs.clone();
        if d != Complex64::new(0.0, 0.0) {
            // repeated synthetic division by (z - new_center)
            let n = c.len();
            for i in 0..n {
                for j in (i..n - 1).rev() {
                    let next = c[j + 1];
                    c[j] += d * next;
                }
            }
        }
        Ok(Self::polynomial(new_center, c))
    }

    /// Sum of the stored coefficients at `z` (Horner in `z - center`).
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let u = z - self.center;
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * u + c)
    }

    /// Largest coefficient difference over the orders where both are exact.
    pub fn max_deviation(&self, other: &Self) -> f64 {
        let n = self.trunc_order().min(other.trunc_order());
        (0..=n)
            .map(|i| (self.coeffs[i] - other.coeffs[i]).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

#[derive(Serialize, Deserialize)]
struct SeriesRepr {
    center: Complex64,
    coeffs: Vec<Complex64>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    polynomial: bool,
}

impl Serialize for TruncatedSeries {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        SeriesRepr {
            center: self.center,
            coeffs: self.coeffs.clone(),
            polynomial: self.polynomial,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for TruncatedSeries {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = SeriesRepr::deserialize(deserializer)?;
        if repr.coeffs.is_empty() {
            return Err(serde::de::Error::custom("series needs at least one coefficient"));
        }
        Ok(TruncatedSeries::build(repr.center, repr.coeffs, repr.polynomial))
    }
}
