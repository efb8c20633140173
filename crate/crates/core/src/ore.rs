//! Truncated Ore extension `𝒜[x; δ]` with left normal form `Σ c_i xⁱ` and the
//! rule `x·a = a·x + δ(a)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{element_y, mu, AlgebraElement};
use crate::derivation::ProductDerivation;
use crate::error::{Error, Result};
use crate::function::{FunctionModel, ZeroDatum};
use crate::series::SeminormParams;

/// `Σ coeffs[i] · xⁱ`, coefficients on the left.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrePoly {
    coeffs: Vec<AlgebraElement>,
}

impl OrePoly {
    pub fn new(coeffs: Vec<AlgebraElement>) -> Result<Self> {
        let Some(first) = coeffs.first() else {
            return Err(Error::InvalidArgument("an Ore polynomial needs at least one coefficient".into()));
        };
        if let Some(bad) = coeffs.iter().find(|c| c.len() != first.len()) {
            return Err(Error::ComponentMismatch {
                expected: first.len(),
                found: bad.len(),
            });
        }
        Ok(OrePoly { coeffs })
    }

    /// `η(a)`: the degree-zero polynomial `a`.
    pub fn scalar(a: AlgebraElement) -> Self {
        OrePoly { coeffs: vec![a] }
    }

    pub fn coeffs(&self) -> &[AlgebraElement] {
        &self.coeffs
    }

    pub fn x_degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn components(&self) -> usize {
        self.coeffs[0].len()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.max_abs()).fold(0.0, f64::max)
    }

    /// Largest coefficient difference; missing x-powers count as zero.
    pub fn max_deviation(&self, other: &Self) -> f64 {
        let n = self.coeffs.len().max(other.coeffs.len());
        (0..n)
            .map(|i| match (self.coeffs.get(i), other.coeffs.get(i)) {
                (Some(a), Some(b)) => a.max_deviation(b),
                (Some(a), None) | (None, Some(a)) => a.max_abs(),
                (None, None) => 0.0,
            })
            .fold(0.0, f64::max)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.components() != other.components() {
            return Err(Error::ComponentMismatch {
                expected: self.components(),
                found: other.components(),
            });
        }
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| match (self.coeffs.get(i), other.coeffs.get(i)) {
                (Some(a), Some(b)) => a.add(b),
                (Some(a), None) | (None, Some(a)) => Ok(a.clone()),
                (None, None) => unreachable!(),
            })
            .collect::<Result<_>>()?;
        Ok(OrePoly { coeffs })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        OrePoly {
            coeffs: self.coeffs.iter().map(|c| c.scale(factor)).collect(),
        }
    }

    /// `Σ_i (max_j ‖c_{i,j}‖_{params[j]}) · ρⁱ`
    pub fn seminorm(&self, params: &[SeminormParams], rho: f64) -> Result<f64> {
        if !(rho > 0.0) {
            return Err(Error::InvalidArgument(format!("rho must be positive, got {rho}")));
        }
        self.coeffs
            .iter()
            .enumerate()
            .try_fold(0.0, |acc, (i, c)| Ok(acc + c.seminorm(params)? * rho.powi(i as i32)))
    }
}

/// Arithmetic context: `h`, the working set of zeros and the series order.
#[derive(Debug, Clone)]
pub struct OreAlgebra {
    h: FunctionModel,
    zeros: Vec<ZeroDatum>,
    order: usize,
    delta: ProductDerivation,
}

impl OreAlgebra {
    pub fn new(h: FunctionModel, zeros: Vec<ZeroDatum>, order: usize) -> Result<Self> {
        if zeros.is_empty() {
            return Err(Error::NoZeros);
        }
        let delta = ProductDerivation::new(&h, &zeros, order)?;
        Ok(OreAlgebra { h, zeros, order, delta })
    }

    pub fn h(&self) -> &FunctionModel {
        &self.h
    }

    pub fn zeros(&self) -> &[ZeroDatum] {
        &self.zeros
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn derivation(&self) -> &ProductDerivation {
        &self.delta
    }

    pub fn delta(&self, a: &AlgebraElement) -> Result<AlgebraElement> {
        self.delta.apply(a)
    }

    pub fn unit(&self) -> OrePoly {
        OrePoly::scalar(AlgebraElement::unit(self.zeros.len(), self.order))
    }

    /// `xⁱ`
    pub fn x_pow(&self, power: usize) -> OrePoly {
        let n = self.zeros.len();
        let mut coeffs = vec![AlgebraElement::zero(n, self.order); power + 1];
        coeffs[power] = AlgebraElement::unit(n, self.order);
        OrePoly { coeffs }
    }

    pub fn x(&self) -> OrePoly {
        self.x_pow(1)
    }

    /// `η(y)`
    pub fn y(&self) -> Result<OrePoly> {
        Ok(OrePoly::scalar(element_y(&self.zeros, self.order)?))
    }

    /// `η(μ(f))`
    pub fn embed(&self, f: &FunctionModel) -> Result<OrePoly> {
        Ok(OrePoly::scalar(mu(f, &self.zeros, self.order)?))
    }

    fn check(&self, p: &OrePoly) -> Result<()> {
        if p.components() != self.zeros.len() {
            return Err(Error::ComponentMismatch {
                expected: self.zeros.len(),
                found: p.components(),
            });
        }
        Ok(())
    }

    /// `(a xⁱ)(b xʲ) = Σ_m C(i,m) · a · δᵐ(b) · x^{i+j-m}`, extended bilinearly.
    pub fn mul(&self, p: &OrePoly, q: &OrePoly) -> Result<OrePoly> {
        self.check(p)?;
        self.check(q)?;
        let dp = p.x_degree();
        let n = self.zeros.len();
        // δᵐ(b_j) for m <= deg p
        let mut powers: Vec<Vec<AlgebraElement>> = Vec::with_capacity(q.coeffs.len());
        for b in &q.coeffs {
            let mut chain = vec![b.clone()];
            for m in 0..dp {
                let next = self.delta(&chain[m])?;
                chain.push(next);
            }
            powers.push(chain);
        }
        let mut out = vec![AlgebraElement::zero(n, self.order); dp + q.x_degree() + 1];
        for (i, a) in p.coeffs.iter().enumerate() {
            if a.max_abs() == 0.0 {
                continue;
            }
            let mut binom = 1.0;
            for m in 0..=i {
                for (j, chain) in powers.iter().enumerate() {
                    let term = a.mul(&chain[m])?.scale(Complex64::new(binom, 0.0));
                    let slot = &mut out[i + j - m];
                    *slot = slot.add(&term)?;
                }
                binom = binom * (i - m) as f64 / (m + 1) as f64;
            }
        }
        OrePoly::new(out)
    }

    pub fn commutator(&self, p: &OrePoly, q: &OrePoly) -> Result<OrePoly> {
        self.mul(p, q)?.sub(&self.mul(q, p)?)
    }

    /// Checks `[x, y·xᵈ] = μ(h)·xᵈ` for `d < x_degree` (and `[x, y] = μ(h)`
    /// when `x_degree` is 0 or 1).
    pub fn verify_main_relation(&self, x_degree: usize) -> Result<MainRelationReport> {
        let x = self.x();
        let y = self.y()?;
        let target = self.embed(&self.h)?;
        let mut deviations = Vec::new();
        for d in 0..x_degree.max(1) {
            let xd = self.x_pow(d);
            let lhs = self.commutator(&x, &self.mul(&y, &xd)?)?;
            let rhs = self.mul(&target, &xd)?;
            deviations.push(lhs.max_deviation(&rhs));
        }
        let deviation = deviations.iter().cloned().fold(0.0, f64::max);
        Ok(MainRelationReport {
            zeros: self.zeros.clone(),
            order: self.order,
            x_degree,
            deviations,
            deviation,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MainRelationReport {
    pub zeros: Vec<ZeroDatum>,
    pub order: usize,
    pub x_degree: usize,
    /// Deviation of `[x, y·xᵈ]` from `μ(h)·xᵈ` for each `d`.
    pub deviations: Vec<f64>,
    pub deviation: f64,
}

pub fn verify_main_relation(h: &FunctionModel, zeros: &[ZeroDatum], order: usize, x_degree: usize) -> Result<MainRelationReport> {
    OreAlgebra::new(h.clone(), zeros.to_vec(), order)?.verify_main_relation(x_degree)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::TruncatedSeries;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn two_zero_algebra(order: usize) -> OreAlgebra {
        let h = FunctionModel::from_roots(&[c(0.0), c(1.0), c(1.0)], c(1.0));
        OreAlgebra::new(h, vec![ZeroDatum::real(0.0, 1), ZeroDatum::real(1.0, 2)], order).unwrap()
    }

    fn sample_element(order: usize) -> AlgebraElement {
        AlgebraElement::new(vec![
            TruncatedSeries::from_real(0.0, &[0.5, -1.0, 2.0]).with_order(order),
            TruncatedSeries::from_real(0.0, &[1.0, 0.0, 0.0, 3.0]).with_order(order),
        ])
    }

    #[test]
    fn defining_relation() {
        let alg = two_zero_algebra(10);
        let a = OrePoly::scalar(sample_element(10));
        let xa = alg.mul(&alg.x(), &a).unwrap();
        let da = alg.delta(&a.coeffs()[0]).unwrap();
        let expected = OrePoly::new(vec![da, a.coeffs()[0].clone()]).unwrap();
        assert!(xa.max_deviation(&expected) < 1e-14);

        let xx = alg.mul(&alg.x(), &alg.x()).unwrap();
        assert_eq!(xx.max_deviation(&alg.x_pow(2)), 0.0);
        assert_eq!(alg.commutator(&alg.x(), &alg.x()).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn x_squared_times_scalar() {
        let alg = two_zero_algebra(10);
        let a = sample_element(10);
        let got = alg.mul(&alg.x_pow(2), &OrePoly::scalar(a.clone())).unwrap();
        let d1 = alg.delta(&a).unwrap();
        let d2 = alg.delta(&d1).unwrap();
        let expected = OrePoly::new(vec![d2, d1.scale(c(2.0)), a]).unwrap();
        assert!(got.max_deviation(&expected) < 1e-13);
    }

    #[test]
    fn commutator_with_embedded_function() {
        let alg = two_zero_algebra(12);
        let f = FunctionModel::from_real(&[1.0, 2.0, 0.0, -1.0]);
        let mf = alg.embed(&f).unwrap();
        let got = alg.commutator(&alg.x(), &mf).unwrap();
        let expected = OrePoly::scalar(alg.delta(&mf.coeffs()[0]).unwrap());
        assert!(got.max_deviation(&expected) < 1e-13);
    }

    #[test]
    fn main_relation_examples() {
        let y = verify_main_relation(&FunctionModel::monomial(1), &[ZeroDatum::real(0.0, 1)], 16, 3).unwrap();
        assert_eq!(y.deviation, 0.0);
        for k in 1..=3 {
            let r = verify_main_relation(&FunctionModel::monomial(k + 1), &[ZeroDatum::real(0.0, k + 1)], 16, 3).unwrap();
            assert!(r.deviation <= 1e-12);
        }
        let alg = two_zero_algebra(16);
        assert!(alg.verify_main_relation(3).unwrap().deviation <= 1e-12);
    }

    #[test]
    fn seminorm_examples() {
        let alg = OreAlgebra::new(FunctionModel::monomial(2), vec![ZeroDatum::real(0.0, 2)], 6).unwrap();
        let p = [SeminormParams::power(1.0, 1.0).unwrap()];
        assert_eq!(alg.unit().seminorm(&p, 2.0).unwrap(), 1.0);
        assert_eq!(alg.x_pow(3).seminorm(&p, 2.0).unwrap(), 8.0);
        let yx1 = alg
            .mul(&alg.y().unwrap(), &alg.x())
            .unwrap()
            .add(&alg.unit())
            .unwrap();
        assert_eq!(yx1.seminorm(&p, 2.0).unwrap(), 3.0);
    }

    #[test]
    fn mismatched_components_are_rejected() {
        let alg = two_zero_algebra(4);
        let single = OrePoly::scalar(AlgebraElement::unit(1, 4));
        assert!(matches!(alg.mul(&alg.x(), &single), Err(Error::ComponentMismatch { .. })));
        assert!(OreAlgebra::new(FunctionModel::monomial(1), vec![], 4).is_err());
    }

    #[test]
    fn json_shape() {
        let p = OrePoly::scalar(AlgebraElement::unit(1, 0));
        let text = serde_json::to_string(&p).unwrap();
        assert_eq!(text, r#"{"coeffs":[{"components":[{"center":[0.0,0.0],"coeffs":[[1.0,0.0]],"polynomial":true}]}]}"#);
    }
}
