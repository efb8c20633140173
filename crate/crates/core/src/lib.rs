//! Computable pieces of the universal analytic algebra for the relation
//! `[x, y] = h(y)`.
//!
//! - [`series`]: truncated power series and the seminorms `Σ |a_n| rⁿ/n!ˢ`.
//! - [`function`]: models of `h`, its zeros and local Taylor data.
//! - [`derivation`]: `δ₀ = h·d/dz`, the localized `δ_j`, stability constants.
//! - [`algebra`] and [`ore`]: `𝒜 = ∏ 𝒜_{s_j}`, `μ`, and Ore-extension arithmetic.
//! - [`operators`]: Jordan-pair representations, Volterra norms, decay bounds.
//!
//! Sweeps over random trials and over Volterra powers run on rayon when the
//! `parallel` feature is enabled; see [`exec::Execution`].

pub mod algebra;
pub mod derivation;
pub mod error;
pub mod exec;
pub mod expr;
pub mod function;
pub mod operators;
pub mod ore;
pub mod series;
pub mod spec;

pub use algebra::{element_y, intertwining_residual, kothe_diagonal_embed, mu, AlgebraElement};
pub use derivation::{
    delta0_apply, delta_apply, deltaj_apply, stability_bound_analytic, stability_empirical, StabilityCertificate,
};
pub use error::{Error, Result};
pub use exec::Execution;
pub use function::{Exponent, FunctionModel, Region, ZeroDatum};
pub use num_complex::Complex64;
pub use ore::{verify_main_relation, OreAlgebra, OrePoly};
pub use series::{SeminormParams, TruncatedSeries};
pub use spec::FunctionSpec;
