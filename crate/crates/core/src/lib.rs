//! Geometric formulation of finite-level and continuum quantum mechanics.
//!
//! States live on a real chart of the Hilbert space carrying a Kähler structure
//! (metric `G`, Poisson tensor `Λ`, complex structure `J`). Observables become
//! quadratic functions, the momentum map sends states to the dual of `u(n)`,
//! and the continuum picture is reached through the Weyl-Wigner map.

pub mod error;
pub mod kahler;
pub mod lie;
pub mod linops;
pub mod phasespace;
pub mod u4chart;
pub mod validation;
pub mod witness;

pub use error::{Error, Result};
pub use linops::{CMat, CVec, DensityState, HermitianOperator, StateVector};
