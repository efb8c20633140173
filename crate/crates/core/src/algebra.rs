//! The product algebra `𝒜 = ∏_j 𝒜_{s_j}` over a finite set of zeros, the
//! canonical element `y`, and the Taylor homomorphism `μ`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::derivation::{delta0_apply, delta0_polynomial, ProductDerivation};
use crate::error::{Error, Result};
use crate::function::{FunctionModel, ZeroDatum};
use crate::series::{SeminormParams, TruncatedSeries};

const ORIGIN: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// One series per zero, each centered at 0 in its own variable `y_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgebraElement {
    components: Vec<TruncatedSeries>,
}

impl AlgebraElement {
    pub fn new(components: Vec<TruncatedSeries>) -> Self {
        AlgebraElement { components }
    }

    pub fn constant(count: usize, value: Complex64, order: usize) -> Self {
        Self::new(vec![TruncatedSeries::constant(ORIGIN, value, order); count])
    }

    pub fn unit(count: usize, order: usize) -> Self {
        Self::constant(count, Complex64::new(1.0, 0.0), order)
    }

    pub fn zero(count: usize, order: usize) -> Self {
        Self::constant(count, ORIGIN, order)
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn components(&self) -> &[TruncatedSeries] {
        &self.components
    }

    /// Smallest exact order over the components.
    pub fn order(&self) -> usize {
        self.components.iter().map(|c| c.trunc_order()).min().unwrap_or(0)
    }

    fn zip_with(
        &self,
        other: &Self,
        op: impl Fn(&TruncatedSeries, &TruncatedSeries) -> Result<TruncatedSeries>,
    ) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::ComponentMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| op(a, b))
            .collect::<Result<_>>()?;
        Ok(Self::new(components))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, TruncatedSeries::add)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, TruncatedSeries::sub)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, TruncatedSeries::mul)
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self::new(self.components.iter().map(|c| c.scale(factor)).collect())
    }

    pub fn with_order(&self, order: usize) -> Self {
        Self::new(self.components.iter().map(|c| c.with_order(order)).collect())
    }

    pub fn max_abs(&self) -> f64 {
        self.components.iter().map(|c| c.max_abs()).fold(0.0, f64::max)
    }

    /// Largest coefficient difference over exact orders, component by component.
    pub fn max_deviation(&self, other: &Self) -> f64 {
        assert_eq!(self.len(), other.len(), "component count mismatch");
        self.components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.max_deviation(b))
            .fold(0.0, f64::max)
    }

    /// Largest component seminorm, component `j` measured with `params[j]`.
    pub fn seminorm(&self, params: &[SeminormParams]) -> Result<f64> {
        if params.len() != self.len() {
            return Err(Error::ComponentMismatch {
                expected: self.len(),
                found: params.len(),
            });
        }
        self.components
            .iter()
            .zip(params)
            .try_fold(0.0, |acc, (c, p)| Ok(f64::max(acc, c.seminorm(p)?)))
    }
}

/// The element `y = (λ_j + y_j)_j`.
pub fn element_y(zeros: &[ZeroDatum], order: usize) -> Result<AlgebraElement> {
    if zeros.is_empty() {
        return Err(Error::NoZeros);
    }
    Ok(AlgebraElement::new(
        zeros
            .iter()
            .map(|z| TruncatedSeries::polynomial(ORIGIN, vec![z.lambda, Complex64::new(1.0, 0.0)]).with_order(order))
            .collect(),
    ))
}

/// `μ(f) = (Σ f⁽ⁿ⁾(λ_j)/n! · y_jⁿ)_j`.
pub fn mu(f: &FunctionModel, zeros: &[ZeroDatum], order: usize) -> Result<AlgebraElement> {
    if zeros.is_empty() {
        return Err(Error::NoZeros);
    }
    let components = zeros
        .iter()
        .map(|z| {
            let t = f.taylor_at(z.lambda, order)?;
            let recentered = if t.is_polynomial() {
                TruncatedSeries::polynomial(ORIGIN, t.into_coeffs())
            } else {
                TruncatedSeries::truncated(ORIGIN, t.into_coeffs())
            };
            Ok(recentered)
        })
        .collect::<Result<_>>()?;
    Ok(AlgebraElement::new(components))
}

/// `max |μ(δ₀ f) − δ(μ f)|` over components and exact orders.
///
/// For polynomial `h` and `f` the left side is expanded from the global
/// polynomial `h·f'`; otherwise `δ₀ f` is formed from the full Taylor data of
/// `h` at each zero. The right side goes through the localized `δ_j`.
pub fn intertwining_residual(h: &FunctionModel, zeros: &[ZeroDatum], f: &FunctionModel, order: usize) -> Result<f64> {
    let lhs = match delta0_polynomial(h, f) {
        Some(image) => mu(&image, zeros, order)?,
        None => {
            let components = zeros
                .iter()
                .map(|z| {
                    let local = f.taylor_at(z.lambda, order + 1)?;
                    let image = delta0_apply(h, &local, order)?;
                    Ok(TruncatedSeries::truncated(ORIGIN, image.into_coeffs()))
                })
                .collect::<Result<_>>()?;
            AlgebraElement::new(components)
        }
    };
    let rhs = ProductDerivation::new(h, zeros, order)?.apply(&mu(f, zeros, order)?)?;
    Ok(lhs.max_deviation(&rhs))
}

/// The two sides of the diagonal embedding `λ(P_{s+t}) → λ(P_s × P_t)`:
/// `(‖a‖_{rq, s+t}, Σ |a_n| rⁿqⁿ / (n!ˢ n!ᵗ))`.
pub fn kothe_diagonal_embed(a: &TruncatedSeries, s: f64, t: f64, r: f64, q: f64) -> Result<(f64, f64)> {
    let joint = a.seminorm(&SeminormParams::power(r * q, s + t)?)?;
    SeminormParams::power(r, s)?;
    SeminormParams::power(q, t)?;
    let split = a
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| c.norm() != 0.0)
        .map(|(n, c)| {
            let ln_n = crate::series::ln_factorial(n);
            let lw = n as f64 * (r.ln() + q.ln()) - s * ln_n - t * ln_n;
            (c.norm().ln() + lw).exp()
        })
        .sum();
    Ok((joint, split))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn element_y_examples() {
        let y = element_y(&[ZeroDatum::real(0.0, 2)], 4).unwrap();
        assert_eq!(y.components()[0], TruncatedSeries::monomial(ORIGIN, 1, 4));

        let y = element_y(&[ZeroDatum::real(0.0, 1), ZeroDatum::real(1.0, 2)], 3).unwrap();
        assert_eq!(y.components()[1].coeffs(), &[c(1.0), c(1.0), c(0.0), c(0.0)]);

        let hbar = Complex64::new(0.7, 0.2);
        let zeros = crate::function::SinhDeformation::new(hbar).unwrap().zero_window(1);
        let y = element_y(&zeros, 2).unwrap();
        for (j, comp) in (-1..=1).zip(y.components()) {
            let expected = Complex64::new(0.0, PI * j as f64) / hbar;
            assert!((comp.coeffs()[0] - expected).norm() < 1e-15);
            assert_eq!(comp.coeffs()[1], c(1.0));
        }

        assert_eq!(element_y(&[], 3), Err(Error::NoZeros));
    }

    #[test]
    fn mu_examples() {
        let zeros = [ZeroDatum::real(0.0, 1), ZeroDatum::real(1.0, 2)];
        let one = mu(&FunctionModel::from_real(&[1.0]), &zeros, 5).unwrap();
        assert_eq!(one.max_deviation(&AlgebraElement::unit(2, 5)), 0.0);

        let id = mu(&FunctionModel::monomial(1), &zeros, 5).unwrap();
        assert_eq!(id.max_deviation(&element_y(&zeros, 5).unwrap()), 0.0);

        let h = FunctionModel::from_roots(&[c(0.0), c(1.0), c(1.0)], c(1.0));
        let image = mu(&h, &zeros, 8).unwrap();
        for (comp, z) in image.components().iter().zip(&zeros) {
            assert_eq!(comp.valuation(1e-12), Some(z.order));
        }
    }

    #[test]
    fn intertwining_small_cases() {
        let zeros = [ZeroDatum::real(0.0, 2)];
        let h = FunctionModel::monomial(2);
        let constant = FunctionModel::from_real(&[4.0]);
        assert_eq!(intertwining_residual(&h, &zeros, &constant, 16).unwrap(), 0.0);
        let cube = FunctionModel::monomial(3);
        assert!(intertwining_residual(&h, &zeros, &cube, 16).unwrap() <= 1e-12);
    }

    #[test]
    fn intertwining_for_oracle_h() {
        let h = FunctionModel::sinh_deformation(c(1.0)).unwrap();
        let zeros = crate::function::SinhDeformation::new(c(1.0)).unwrap().zero_window(2);
        let f = FunctionModel::from_real(&[0.5, -1.0, 0.0, 2.0, 0.25]);
        assert!(intertwining_residual(&h, &zeros, &f, 20).unwrap() <= 1e-10);
    }

    #[test]
    fn kothe_examples() {
        let a = TruncatedSeries::monomial(ORIGIN, 5, 5);
        let (x, y) = kothe_diagonal_embed(&a, 0.5, 1.0 / 3.0, 2.0, 3.0).unwrap();
        let direct = 6f64.powi(5) / 120f64.powf(0.5 + 1.0 / 3.0);
        assert!((x - direct).abs() <= 1e-12 * direct);
        assert!((y - direct).abs() <= 1e-12 * direct);

        let one = TruncatedSeries::constant(ORIGIN, c(1.0), 0);
        assert_eq!(kothe_diagonal_embed(&one, 1.0, 1.0, 1.0, 1.0).unwrap(), (1.0, 1.0));
    }

    #[test]
    fn seminorm_takes_max_over_components() {
        let a = AlgebraElement::new(vec![
            TruncatedSeries::from_real(0.0, &[1.0, 1.0]),
            TruncatedSeries::from_real(0.0, &[3.0]),
        ]);
        let p = [SeminormParams::formal(1), SeminormParams::formal(0)];
        assert_eq!(a.seminorm(&p).unwrap(), 3.0);
        assert!(a.seminorm(&p[..1]).is_err());
    }
}
