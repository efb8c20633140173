//! Holomorphic models of `h`: zeros, local Taylor data and Cauchy bounds.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::TruncatedSeries;

/// Relative tolerance below which a Taylor coefficient counts as zero.
pub const ZERO_TOL: f64 = 1e-9;
/// Number of Taylor coefficients inspected when deciding the order of a zero.
pub const PROBE_DEPTH: usize = 32;
/// Relative inflation applied to a sampled maximum modulus.
pub const CAUCHY_MARGIN: f64 = 0.05;
/// Grouping radii, relative to `1 + |z|`, tried in turn when collecting
/// eigenvalues into candidate multiple roots.
pub const CLUSTER_RADII: [f64; 3] = [1e-3, 1e-2, 5e-2];

/// A rule producing Taylor coefficients of a holomorphic function at any center.
///
/// Implementations must be deterministic: identical requests give identical
/// coefficients.
pub trait CoefficientRule: Send + Sync {
    fn name(&self) -> String;
    /// `f⁽ⁿ⁾(center)/n!` for `n = 0..=order`.
    fn taylor(&self, center: Complex64, order: usize) -> Vec<Complex64>;
    /// Radius of the disc around `center` on which the Taylor series represents
    /// the function. Zero means `center` is outside the domain.
    fn validity_radius(&self, center: Complex64) -> f64;
}

/// `h(y) = sinh(ħy) / sinh(ħ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinhDeformation {
    pub hbar: Complex64,
}

impl SinhDeformation {
    pub fn new(hbar: Complex64) -> Result<Self> {
        if hbar.norm() == 0.0 || !hbar.is_finite() {
            return Err(Error::InvalidArgument(format!("hbar must be finite and nonzero, got {hbar}")));
        }
        if hbar.sinh().norm() < 1e-300 {
            return Err(Error::InvalidArgument(format!("sinh(hbar) vanishes for hbar = {hbar}")));
        }
        Ok(SinhDeformation { hbar })
    }

    /// The zeros `πi·j/ħ` for `|j| <= window`, each simple.
    pub fn zero_window(&self, window: usize) -> Vec<ZeroDatum> {
        let w = window as i64;
        (-w..=w)
            .map(|j| ZeroDatum::new(Complex64::new(0.0, PI * j as f64) / self.hbar, 1))
            .collect()
    }
}

impl CoefficientRule for SinhDeformation {
    fn name(&self) -> String {
        "sinh_deformation".into()
    }

    fn taylor(&self, center: Complex64, order: usize) -> Vec<Complex64> {
        let norm = self.hbar.sinh();
        let at = self.hbar * center;
        let (even, odd) = (at.sinh() / norm, at.cosh() / norm);
        let mut power = Complex64::new(1.0, 0.0);
        (0..=order)
            .map(|n| {
                if n > 0 {
                    power = power * self.hbar / n as f64;
                }
                power * if n % 2 == 0 { even } else { odd }
            })
            .collect()
    }

    fn validity_radius(&self, _center: Complex64) -> f64 {
        f64::INFINITY
    }
}

#[derive(Clone)]
pub enum FunctionModel {
    /// Coefficients of `h` at the origin, lowest order first.
    Polynomial(Vec<Complex64>),
    Oracle(Arc<dyn CoefficientRule>),
}

impl fmt::Debug for FunctionModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionModel::Polynomial(c) => f.debug_tuple("Polynomial").field(c).finish(),
            FunctionModel::Oracle(rule) => f.debug_tuple("Oracle").field(&rule.name()).finish(),
        }
    }
}

impl FunctionModel {
    pub fn polynomial(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.norm() == 0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(Complex64::new(0.0, 0.0));
        }
        FunctionModel::Polynomial(coeffs)
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::polynomial(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    /// `y^power`
    pub fn monomial(power: usize) -> Self {
        let mut c = vec![Complex64::new(0.0, 0.0); power + 1];
        c[power] = Complex64::new(1.0, 0.0);
        FunctionModel::Polynomial(c)
    }

    /// Expands `∏ (z - root)` times `scale`.
    pub fn from_roots(roots: &[Complex64], scale: Complex64) -> Self {
        let mut c = vec![scale];
        for &r in roots {
            let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
            for (i, &a) in c.iter().enumerate() {
                next[i + 1] += a;
                next[i] -= a * r;
            }
            c = next;
        }
        Self::polynomial(c)
    }

    pub fn sinh_deformation(hbar: Complex64) -> Result<Self> {
        Ok(FunctionModel::Oracle(Arc::new(SinhDeformation::new(hbar)?)))
    }

    pub fn polynomial_coeffs(&self) -> Option<&[Complex64]> {
        match self {
            FunctionModel::Polynomial(c) => Some(c),
            FunctionModel::Oracle(_) => None,
        }
    }

    pub fn validity_radius(&self, center: Complex64) -> f64 {
        match self {
            FunctionModel::Polynomial(_) => f64::INFINITY,
            FunctionModel::Oracle(rule) => rule.validity_radius(center),
        }
    }

    /// Taylor coefficients `f⁽ⁿ⁾(λ)/n!`, `n <= order`.
    pub fn taylor_at(&self, lambda: Complex64, order: usize) -> Result<TruncatedSeries> {
        match self {
            FunctionModel::Polynomial(c) => Ok(TruncatedSeries::polynomial(Complex64::new(0.0, 0.0), c.clone())
                .shift_center(lambda)?
                .with_order(order)),
            FunctionModel::Oracle(rule) => {
                if !(rule.validity_radius(lambda) > 0.0) || !lambda.is_finite() {
                    return Err(Error::OutOfRegion { point: lambda });
                }
                Ok(TruncatedSeries::truncated(lambda, rule.taylor(lambda, order)))
            }
        }
    }

    /// Value at `z`. Oracle models are summed from their Taylor data at `z`.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        match self {
            FunctionModel::Polynomial(c) => Ok(c
                .iter()
                .rev()
                .fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a)),
            FunctionModel::Oracle(_) => Ok(self.taylor_at(z, 0)?.coeffs()[0]),
        }
    }

    /// Order of `lambda` as a zero, probing the first [`PROBE_DEPTH`] coefficients.
    pub fn zero_order(&self, lambda: Complex64, tol: f64) -> Result<usize> {
        self.zero_order_with_depth(lambda, tol, PROBE_DEPTH)
    }

    pub fn zero_order_with_depth(&self, lambda: Complex64, tol: f64, depth: usize) -> Result<usize> {
        let t = self.taylor_at(lambda, depth)?;
        let scale = t.max_abs();
        if scale == 0.0 {
            return Err(Error::OrderUndecidable { point: lambda, depth });
        }
        let threshold = tol * scale;
        let c0 = t.coeffs()[0].norm();
        if c0 > threshold {
            return Err(Error::NotAZero { point: lambda, value: c0 });
        }
        t.valuation(threshold)
            .ok_or(Error::OrderUndecidable { point: lambda, depth })
    }

    /// Checks that `zero` is a zero of exactly the declared order.
    pub fn validate_zero(&self, zero: &ZeroDatum, tol: f64) -> Result<()> {
        let found = self.zero_order_with_depth(zero.lambda, tol, PROBE_DEPTH.max(zero.order + 1))?;
        if found != zero.order {
            return Err(Error::InvalidArgument(format!(
                "declared zero {} has order {found}, not {}",
                zero.lambda, zero.order
            )));
        }
        Ok(())
    }

    /// `g` with `h(z) = (z - λ)^k g(z)`, as a series in `z - λ` through `order`.
    pub fn local_factor(&self, zero: &ZeroDatum, order: usize) -> Result<TruncatedSeries> {
        self.validate_zero(zero, ZERO_TOL)?;
        let t = self.taylor_at(zero.lambda, order + zero.order)?;
        let g = t.coeffs()[zero.order..].to_vec();
        Ok(if t.is_polynomial() {
            TruncatedSeries::polynomial(zero.lambda, g).with_order(order)
        } else {
            TruncatedSeries::truncated(zero.lambda, g)
        })
    }

    /// Cauchy data `M` for the circle `|z - λ| = radius`: the sampled maximum
    /// modulus inflated by [`CAUCHY_MARGIN`], so that `|c_p| <= M / radius^p`.
    pub fn cauchy_bounds(&self, lambda: Complex64, radius: f64, samples: usize) -> Result<f64> {
        if !(radius > 0.0) || samples == 0 {
            return Err(Error::InvalidArgument("radius and sample count must be positive".into()));
        }
        if !(radius < self.validity_radius(lambda)) {
            return Err(Error::OutOfRegion {
                point: lambda + Complex64::new(radius, 0.0),
            });
        }
        let model = self.summable_taylor(lambda, radius)?;
        let max = (0..samples)
            .map(|i| {
                let t = 2.0 * PI * i as f64 / samples as f64;
                model.eval(lambda + Complex64::from_polar(radius, t)).norm()
            })
            .fold(0.0, f64::max);
        Ok((1.0 + CAUCHY_MARGIN) * max)
    }

    /// A Taylor model at `lambda` long enough that its tail on the circle of
    /// the given radius is below double precision.
    fn summable_taylor(&self, lambda: Complex64, radius: f64) -> Result<TruncatedSeries> {
        if let FunctionModel::Polynomial(c) = self {
            return self.taylor_at(lambda, c.len() - 1);
        }
        let mut order = 32;
        loop {
            let t = self.taylor_at(lambda, order)?;
            let terms: Vec<f64> = t
                .coeffs()
                .iter()
                .enumerate()
                .map(|(n, c)| c.norm() * radius.powi(n as i32))
                .collect();
            let total: f64 = terms.iter().sum();
            let tail = terms[order - 3..].iter().cloned().fold(0.0, f64::max);
            if tail <= 1e-17 * total || order >= 1024 {
                return Ok(t);
            }
            order *= 2;
        }
    }

    /// Newton on `h^{(k−1)}`, of which a `k`-fold zero is a simple zero.
    fn polish_multiple_root(&self, mut z: Complex64, k: usize) -> Complex64 {
        let mut last = f64::INFINITY;
        for _ in 0..8 {
            let Ok(t) = self.taylor_at(z, k) else { break };
            let (a, b) = (t.coeffs()[k - 1], t.coeffs()[k]);
            if b.norm() == 0.0 {
                break;
            }
            let step = -a / (b * k as f64);
            if !step.is_finite() || step.norm() >= last {
                break;
            }
            z += step;
            last = step.norm();
            if last <= f64::EPSILON * (1.0 + z.norm()) {
                break;
            }
        }
        z
    }

    /// All zeros of a polynomial inside `region`, with multiplicities.
    pub fn find_zeros(&self, region: &Region) -> Result<Vec<ZeroDatum>> {
        let coeffs = match self {
            FunctionModel::Polynomial(c) => c,
            FunctionModel::Oracle(_) => return Err(Error::ZeroSearchUnsupported),
        };
        if coeffs.iter().all(|c| c.norm() == 0.0) {
            return Err(Error::InvalidArgument("h is identically zero".into()));
        }
        let lowest = coeffs.iter().position(|c| c.norm() != 0.0).unwrap_or(0);
        let reduced = &coeffs[lowest..];
        let mut zeros = Vec::new();
        if lowest > 0 {
            zeros.push(ZeroDatum::new(Complex64::new(0.0, 0.0), lowest));
        }
        // clusters that validate at a fine radius are kept; the rest are
        // regrouped at coarser radii, since high multiplicities scatter more
        let mut pool = companion_roots(reduced);
        for radius in CLUSTER_RADII {
            let mut rest = Vec::new();
            for cluster in cluster_roots(&pool, radius) {
                if cluster.len() < 2 {
                    rest.extend(cluster);
                    continue;
                }
                let centroid = cluster.iter().sum::<Complex64>() / cluster.len() as f64;
                let centroid = self.polish_multiple_root(centroid, cluster.len());
                match self.zero_order(centroid, ZERO_TOL) {
                    Ok(k) if k == cluster.len() => zeros.push(ZeroDatum::new(centroid, k)),
                    _ => rest.extend(cluster),
                }
            }
            pool = rest;
        }
        for r in pool {
            let r = self.polish_multiple_root(r, 1);
            zeros.push(ZeroDatum::new(r, self.zero_order(r, ZERO_TOL)?));
        }
        zeros.retain(|z| region.contains(z.lambda));
        zeros.sort_by(|a, b| {
            (a.lambda.re, a.lambda.im)
                .partial_cmp(&(b.lambda.re, b.lambda.im))
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        Ok(zeros)
    }
}

/// Eigenvalues of the companion matrix of `coeffs` (lowest order first).
fn companion_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let degree = coeffs.len() - 1;
    if degree == 0 {
        return Vec::new();
    }
    let lead = coeffs[degree];
    if degree == 1 {
        return vec![-coeffs[0] / lead];
    }
    let mut m = DMatrix::<Complex64>::zeros(degree, degree);
    for i in 1..degree {
        m[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..degree {
        m[(i, degree - 1)] = -coeffs[i] / lead;
    }
    Schur::new(m)
        .eigenvalues()
        .map(|v| v.iter().cloned().collect())
        .unwrap_or_default()
}

/// Single-linkage grouping of nearby roots.
fn cluster_roots(roots: &[Complex64], radius: f64) -> Vec<Vec<Complex64>> {
    let n = roots.len();
    let mut label: Vec<usize> = (0..n).collect();
    fn find(label: &mut [usize], i: usize) -> usize {
        let mut i = i;
        while label[i] != i {
            label[i] = label[label[i]];
            i = label[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            let scale = 1.0 + roots[i].norm().max(roots[j].norm());
            if (roots[i] - roots[j]).norm() <= radius * scale {
                let (a, b) = (find(&mut label, i), find(&mut label, j));
                label[a] = b;
            }
        }
    }
    let mut groups: Vec<(usize, Vec<Complex64>)> = Vec::new();
    for i in 0..n {
        let root = find(&mut label, i);
        match groups.iter_mut().find(|(r, _)| *r == root) {
            Some((_, g)) => g.push(roots[i]),
            None => groups.push((root, vec![roots[i]])),
        }
    }
    groups.into_iter().map(|(_, g)| g).collect()
}

/// Axis-aligned rectangle in the complex plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub re: (f64, f64),
    pub im: (f64, f64),
}

impl Region {
    pub fn everywhere() -> Self {
        Region {
            re: (f64::NEG_INFINITY, f64::INFINITY),
            im: (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        self.re.0 <= z.re && z.re <= self.re.1 && self.im.0 <= z.im && z.im <= self.im.1
    }
}

/// The exponent `s = 1/(k-1)` attached to a zero of order `k`; infinite for `k = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinite,
}

impl Exponent {
    pub fn as_f64(self) -> f64 {
        match self {
            Exponent::Finite(s) => s,
            Exponent::Infinite => f64::INFINITY,
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Exponent::Finite(s) => serializer.serialize_f64(*s),
            Exponent::Infinite => serializer.serialize_str("infinity"),
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Num(s) => Ok(Exponent::Finite(s)),
            Raw::Text(t) if t == "infinity" => Ok(Exponent::Infinite),
            Raw::Text(t) => Err(serde::de::Error::custom(format!("unknown exponent {t:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroDatum {
    pub lambda: Complex64,
    pub order: usize,
    pub exponent: Exponent,
}

impl ZeroDatum {
    pub fn new(lambda: Complex64, order: usize) -> Self {
        assert!(order >= 1, "a zero has order at least 1");
        let exponent = if order == 1 {
            Exponent::Infinite
        } else {
            Exponent::Finite(1.0 / (order - 1) as f64)
        };
        ZeroDatum { lambda, order, exponent }
    }

    pub fn real(lambda: f64, order: usize) -> Self {
        Self::new(Complex64::new(lambda, 0.0), order)
    }
}
