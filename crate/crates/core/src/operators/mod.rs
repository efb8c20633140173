//! Concrete realizations and numeric oracles: Jordan-block pairs solving
//! `[X, Y] = h(Y)`, powers of the Volterra operator, and norm-decay bounds.

pub mod bounds;
pub mod jordan;
pub mod volterra;

pub use bounds::{bound_propagator, BoundSequence, Envelope};
pub use jordan::{evaluate_orepoly, jordan_pair, MatrixRep};
pub use volterra::{commutator_residual_tv, volterra_norms, VolterraNorm};
