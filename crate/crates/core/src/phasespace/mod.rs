//! Weyl-Wigner machinery: an exact discrete Weyl system on `Z_N × Z_N`,
//! Wigner functions and Moyal products on `(q, p)` grids, truncated Fock
//! space, and polar-form diagnostics of evolved wave functions.

pub mod discrete;
pub mod fock;
pub mod grid;
pub mod moyal;
pub mod polar;

pub use discrete::{DiscreteWeylSystem, Ordering};

pub use fock::FockSpace;
pub use grid::{PhaseSpaceFunction, PhaseSpaceGrid, QGrid, WaveFunction1D};

use serde::Serialize;

/// Non-fatal diagnostics attached to grid computations.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Warning {
    /// `|ψ|` at the grid edge exceeds the decay threshold.
    EdgeDecay { edge_amplitude: f64 },
    /// Fraction of spectral weight in the top quarter of the q-frequencies.
    Aliasing { nyquist_fraction: f64 },
    /// Probability mass lost above the Fock truncation.
    Truncation { estimated_error: f64 },
    /// Grid points excluded for `|ψ|` below the node threshold.
    NodesMasked { count: usize },
}
