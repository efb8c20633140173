//! The derivation `δ₀(f) = h·f'`, its localizations `δ_j = h(y_j + λ_j)·d/dy_j`
//! at the zeros of `h`, and stability constants `‖δ₀ f‖ <= C‖f‖`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::AlgebraElement;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::function::{FunctionModel, ZeroDatum};
use crate::series::{log_weight, SeminormParams, TruncatedSeries};

/// `h·f'` through `order`, with `h` expanded at the center of `f`.
pub fn delta0_apply(h: &FunctionModel, f: &TruncatedSeries, order: usize) -> Result<TruncatedSeries> {
    let hs = h.taylor_at(f.center(), order)?;
    let df = f.differentiate()?.with_order(order);
    hs.mul(&df)
}

/// `δ₀` on a polynomial `f` with polynomial `h`, as a new polynomial model.
pub fn delta0_polynomial(h: &FunctionModel, f: &FunctionModel) -> Option<FunctionModel> {
    let (hc, fc) = (h.polynomial_coeffs()?, f.polynomial_coeffs()?);
    let origin = Complex64::new(0.0, 0.0);
    let hs = TruncatedSeries::polynomial(origin, hc.to_vec());
    let df = TruncatedSeries::polynomial(origin, fc.to_vec()).differentiate().ok()?;
    let order = hs.degree() + df.degree();
    let product = hs.with_order(order).mul(&df.with_order(order)).ok()?;
    Some(FunctionModel::polynomial(product.into_coeffs()))
}

/// `δ_j` for one zero `λ_j` of order `k_j`, acting on series in `y_j = z - λ_j`.
///
/// The local model `h(y + λ)` carries exact zeros below order `k`, so `δ_j`
/// keeps the exact order of its argument.
#[derive(Debug, Clone)]
pub struct ComponentDerivation {
    zero: ZeroDatum,
    local_h: TruncatedSeries,
}

impl ComponentDerivation {
    pub fn new(h: &FunctionModel, zero: ZeroDatum, order: usize) -> Result<Self> {
        let g = h.local_factor(&zero, order.saturating_sub(zero.order))?;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); zero.order];
        coeffs.extend_from_slice(g.coeffs());
        let origin = Complex64::new(0.0, 0.0);
        let local_h = if g.is_polynomial() {
            TruncatedSeries::polynomial(origin, coeffs).with_order(order)
        } else {
            TruncatedSeries::truncated(origin, coeffs).with_order(order)
        };
        Ok(ComponentDerivation { zero, local_h })
    }

    pub fn zero(&self) -> &ZeroDatum {
        &self.zero
    }

    /// `h(y + λ)` as a series in `y`.
    pub fn local_h(&self) -> &TruncatedSeries {
        &self.local_h
    }

    pub fn apply(&self, a: &TruncatedSeries) -> Result<TruncatedSeries> {
        if a.center() != self.local_h.center() {
            return Err(Error::CenterMismatch(a.center(), self.local_h.center()));
        }
        let k = self.zero.order;
        let n_out = a.trunc_order().min(self.local_h.trunc_order());
        let h = self.local_h.coeffs();
        let src = a.coeffs();
        let mut out = vec![Complex64::new(0.0, 0.0); n_out + 1];
        for (n, slot) in out.iter_mut().enumerate() {
            // h_p * (q + 1) a_{q+1} with p + q = n and p >= k
            for p in k..=n {
                let q = n - p;
                if let Some(&next) = src.get(q + 1) {
                    *slot += h[p] * next * (q + 1) as f64;
                }
            }
        }
        let polynomial = a.is_polynomial()
            && self.local_h.is_polynomial()
            && (a.degree() + self.local_h.degree()).saturating_sub(1) <= n_out;
        Ok(if polynomial {
            TruncatedSeries::polynomial(a.center(), out)
        } else {
            TruncatedSeries::truncated(a.center(), out)
        })
    }
}

/// `δ_j(a)` for a series `a` in `y_j`.
pub fn deltaj_apply(h: &FunctionModel, zero: &ZeroDatum, a: &TruncatedSeries) -> Result<TruncatedSeries> {
    ComponentDerivation::new(h, *zero, a.trunc_order())?.apply(a)
}

/// The product derivation `δ = ∏ δ_j` on `𝒜 = ∏ 𝒜_{s_j}`.
#[derive(Debug, Clone)]
pub struct ProductDerivation {
    parts: Vec<ComponentDerivation>,
}

impl ProductDerivation {
    pub fn new(h: &FunctionModel, zeros: &[ZeroDatum], order: usize) -> Result<Self> {
        let parts = zeros
            .iter()
            .map(|z| ComponentDerivation::new(h, *z, order))
            .collect::<Result<_>>()?;
        Ok(ProductDerivation { parts })
    }

    pub fn parts(&self) -> &[ComponentDerivation] {
        &self.parts
    }

    pub fn apply(&self, a: &AlgebraElement) -> Result<AlgebraElement> {
        if a.len() != self.parts.len() {
            return Err(Error::ComponentMismatch {
                expected: self.parts.len(),
                found: a.len(),
            });
        }
        let comps = self
            .parts
            .iter()
            .zip(a.components())
            .map(|(d, c)| d.apply(c))
            .collect::<Result<_>>()?;
        Ok(AlgebraElement::new(comps))
    }
}

pub fn delta_apply(h: &FunctionModel, zeros: &[ZeroDatum], a: &AlgebraElement) -> Result<AlgebraElement> {
    let order = a.components().iter().map(|c| c.trunc_order()).max().unwrap_or(0);
    ProductDerivation::new(h, zeros, order)?.apply(a)
}

/// `C_r = Σ_m rᵐ / m!ˢ`, summed until the terms fall below double precision
/// and closed with a ratio-test bound on the tail. The result is an upper bound.
pub fn power_series_constant(r: f64, s: f64) -> Result<f64> {
    SeminormParams::power(r, s)?;
    if s == 0.0 {
        return Err(Error::InvalidArgument("C_r diverges for s = 0".into()));
    }
    let mut sum = 0.0;
    let mut m = 0usize;
    loop {
        let term = log_weight(m, r, s).exp();
        sum += term;
        let next = log_weight(m + 1, r, s).exp();
        // terms from m + 1 on shrink at least by this ratio
        let ratio = r / ((m + 2) as f64).powf(s);
        if ratio < 1.0 && next < 1e-16 * sum {
            let tail = next / (1.0 - ratio);
            return Ok((sum + tail) * (1.0 + 1e-15 * (m + 2) as f64));
        }
        m += 1;
    }
}

/// `C_r · M · r^{k-1} / R^k`, valid for zeros of order `k >= 2` and `s >= 1/(k-1)`.
pub fn stability_bound_analytic(zero: &ZeroDatum, r: f64, s: f64, m_bound: f64, radius: f64) -> Result<f64> {
    let k = zero.order;
    if k < 2 || s < 1.0 / (k - 1) as f64 {
        return Err(Error::StabilityOutOfRange { order: k, s });
    }
    if !(m_bound >= 0.0 && radius > 0.0) {
        return Err(Error::InvalidArgument("Cauchy data must satisfy M >= 0, R > 0".into()));
    }
    let cr = power_series_constant(r, s)?;
    Ok(cr * m_bound * r.powi(k as i32 - 1) / radius.powi(k as i32))
}

/// A random polynomial of degree `<= degree` centered at `center`, with
/// coefficients uniform in the unit disc.
pub fn random_series(rng: &mut impl Rng, center: Complex64, degree: usize) -> TruncatedSeries {
    let coeffs = (0..=degree)
        .map(|_| {
            let radius = rng.random::<f64>().sqrt();
            Complex64::from_polar(radius, 2.0 * PI * rng.random::<f64>())
        })
        .collect();
    TruncatedSeries::polynomial(center, coeffs)
}

/// Independent generator for trial `index` of a seeded sweep.
pub fn trial_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Largest `‖δ₀ f‖ / ‖f‖` over `trials` random polynomials of degree `<= degree`
/// expanded at `zero.lambda`. A lower bound for the operator seminorm.
pub fn stability_empirical(
    h: &FunctionModel,
    zero: &ZeroDatum,
    params: &SeminormParams,
    degree: usize,
    trials: usize,
    seed: u64,
    exec: Execution,
) -> Result<f64> {
    params.validate()?;
    // with polynomial h the image is computed without truncation
    let order = match h.polynomial_coeffs() {
        Some(c) => degree + c.len(),
        None => degree,
    };
    let ratios = exec.try_map(trials, |i| -> Result<f64> {
        let f = random_series(&mut trial_rng(seed, i), zero.lambda, degree);
        let image = delta0_apply(h, &f, order)?;
        Ok(image.seminorm(params)? / f.seminorm(params)?)
    })?;
    Ok(ratios.into_iter().fold(0.0, f64::max))
}

/// Operator bound of `δ₀` restricted to the first `m + 1` Taylor coefficients
/// at a zero, measured in `‖·‖_{m,∞}`: the largest column sum of the
/// coefficient map `f_q ↦ (δ₀ f)_n`.
pub fn formal_stability_constant(h: &FunctionModel, zero: &ZeroDatum, m: usize) -> Result<f64> {
    let local = ComponentDerivation::new(h, *zero, m)?;
    let hc = local.local_h().coeffs();
    Ok((1..=m)
        .map(|q| {
            (q..=m)
                .map(|n| q as f64 * hc[n - q + 1].norm())
                .sum::<f64>()
        })
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityCertificate {
    pub zero: ZeroDatum,
    pub r: f64,
    pub s: f64,
    #[serde(rename = "M")]
    pub m_bound: f64,
    #[serde(rename = "R")]
    pub radius: f64,
    #[serde(rename = "C_r")]
    pub c_r: f64,
    #[serde(rename = "C_analytic")]
    pub c_analytic: f64,
    #[serde(rename = "C_empirical")]
    pub c_empirical: f64,
    pub trials: usize,
    pub degree: usize,
    pub seed: u64,
}

impl StabilityCertificate {
    pub fn dominated(&self) -> bool {
        self.c_empirical <= self.c_analytic * (1.0 + 1e-9)
    }
}

#[derive(Debug, Clone)]
pub struct StabilityConfig {
    pub radius: f64,
    pub samples: usize,
    pub degree: usize,
    pub trials: usize,
    pub seed: u64,
    pub exec: Execution,
}

impl Default for StabilityConfig {
    fn default() -> Self {
        StabilityConfig {
            radius: 1.0,
            samples: 256,
            degree: 64,
            trials: 200,
            seed: 0,
            exec: Execution::default(),
        }
    }
}

/// Analytic and empirical stability constants of `‖·‖_{λ,r,s}` for one zero.
pub fn certify(h: &FunctionModel, zero: &ZeroDatum, r: f64, s: f64, cfg: &StabilityConfig) -> Result<StabilityCertificate> {
    let m_bound = h.cauchy_bounds(zero.lambda, cfg.radius, cfg.samples)?;
    let c_analytic = stability_bound_analytic(zero, r, s, m_bound, cfg.radius)?;
    let params = SeminormParams::power(r, s)?;
    let c_empirical = stability_empirical(h, zero, &params, cfg.degree, cfg.trials, cfg.seed, cfg.exec)?;
    Ok(StabilityCertificate {
        zero: *zero,
        r,
        s,
        m_bound,
        radius: cfg.radius,
        c_r: power_series_constant(r, s)?,
        c_analytic,
        c_empirical,
        trials: cfg.trials,
        degree: cfg.degree,
        seed: cfg.seed,
    })
}
