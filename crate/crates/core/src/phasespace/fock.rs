//! Truncated Fock space, coherent states, displacement operators and Berezin symbols.

use num_complex::Complex64;
use serde::Serialize;

use super::Warning;
use crate::error::{Error, Result};
use crate::linops::{c, propagator, CMat, CVec, HermitianOperator, StateVector, I};

/// Lost probability above which a coherent state carries [`Warning::Truncation`].
pub const TRUNCATION_TOL: f64 = 1e-12;

/// Span of `|0⟩ … |M-1⟩` with `a|n⟩ = √n |n-1⟩`.
///
/// `[a, a†] = I` except in the top-left-out corner: its last diagonal entry is `1 - M`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FockSpace {
    pub dim: usize,
}

#[derive(Clone, Debug)]
pub struct CoherentState {
    pub z: Complex64,
    pub state: StateVector,
    /// `1 - Σ_{n<M} e^{-|z|²} |z|^{2n}/n!`
    pub truncation_error: f64,
    pub warnings: Vec<Warning>,
}

impl FockSpace {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameters("Fock truncation must be positive".into()));
        }
        Ok(Self { dim })
    }

    pub fn annihilation(&self) -> CMat {
        let mut a = CMat::zeros(self.dim, self.dim);
        for n in 1..self.dim {
            a[(n - 1, n)] = c((n as f64).sqrt(), 0.0);
        }
        a
    }

    pub fn creation(&self) -> CMat {
        self.annihilation().adjoint()
    }

    pub fn number(&self) -> HermitianOperator {
        HermitianOperator::from_real_diagonal(&(0..self.dim).map(|n| n as f64).collect::<Vec<_>>())
    }

    pub fn basis(&self, n: usize) -> Result<StateVector> {
        if n >= self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: n });
        }
        let mut v = CVec::zeros(self.dim);
        v[n] = c(1.0, 0.0);
        Ok(StateVector::new(v))
    }

    /// `|z⟩` from the series `e^{-|z|²/2} Σ z^n/√n! |n⟩`, renormalized after truncation.
    pub fn coherent_state(&self, z: Complex64) -> CoherentState {
        let mut amps = CVec::zeros(self.dim);
        let mut cur = c((-z.norm_sqr() / 2.0).exp(), 0.0);
        amps[0] = cur;
        for n in 1..self.dim {
            cur = cur * z / (n as f64).sqrt();
            amps[n] = cur;
        }
        let kept: f64 = amps.iter().map(|x| x.norm_sqr()).sum();
        let truncation_error = (1.0 - kept).max(0.0);
        let warnings = if truncation_error > TRUNCATION_TOL {
            vec![Warning::Truncation { estimated_error: truncation_error }]
        } else {
            Vec::new()
        };
        let state = StateVector::new(amps.unscale(kept.sqrt()));
        CoherentState { z, state, truncation_error, warnings }
    }

    /// `D(z) = exp(z a† - z̄ a)`, as `exp(-iK)` with Hermitian `K = i(z a† - z̄ a)`.
    pub fn displacement(&self, z: Complex64) -> CMat {
        let a = self.annihilation();
        let k = (self.creation() * z - a * z.conj()) * I;
        let k = HermitianOperator::hermitian_part(&k).expect("square");
        propagator(&k, 1.0, 1.0)
    }

    /// `⟨z|A|z⟩` with the normalized truncated coherent state.
    pub fn berezin_symbol(&self, a: &CMat, z: Complex64) -> Result<Complex64> {
        if a.nrows() != self.dim || a.ncols() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: a.nrows() });
        }
        let v = self.coherent_state(z).state;
        Ok(v.amplitudes().dotc(&(a * v.amplitudes())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linops::{commutator, max_abs, unitarity_defect};

    #[test]
    fn ladder_commutator_except_top() {
        let f = FockSpace::new(12).unwrap();
        let comm = commutator(&f.annihilation(), &f.creation());
        for i in 0..12 {
            for j in 0..12 {
                let expect = match (i == j, i) {
                    (true, 11) => -11.0,
                    (true, _) => 1.0,
                    _ => 0.0,
                };
                assert!((comm[(i, j)] - c(expect, 0.0)).norm() < 1e-12);
            }
        }
        assert!(max_abs(&(f.creation() * f.annihilation() - f.number().into_matrix())) < 1e-12);
    }

    #[test]
    fn vacuum_and_berezin_at_zero() {
        let f = FockSpace::new(10).unwrap();
        let v = f.coherent_state(c(0.0, 0.0));
        assert!((v.state.amplitudes() - f.basis(0).unwrap().amplitudes()).norm() < 1e-15);
        let n = f.number().into_matrix();
        assert!(f.berezin_symbol(&n, c(0.0, 0.0)).unwrap().norm() < 1e-15);
    }

    // Oracle: Σ n e^{-1}/n! over n < 40, renormalized.
    #[test]
    fn mean_photon_number_poisson_series() {
        let f = FockSpace::new(40).unwrap();
        let (mut w, mut s0, mut s1) = ((-1.0f64).exp(), 0.0, 0.0);
        for n in 0..40 {
            if n > 0 {
                w /= n as f64;
            }
            s0 += w;
            s1 += n as f64 * w;
        }
        let b = f.berezin_symbol(&f.number().into_matrix(), c(1.0, 0.0)).unwrap();
        assert!((b.re - s1 / s0).abs() < 1e-14);
        assert!((b.re - 1.0).abs() < 1e-8 && b.im.abs() < 1e-15);
    }

    #[test]
    fn eigenvector_of_annihilation() {
        let m = 40;
        let f = FockSpace::new(m).unwrap();
        let zmax = (m as f64).sqrt() / 4.0;
        for z in [c(zmax, 0.0), c(0.3, -0.9), Complex64::from_polar(zmax, 2.0)] {
            let cs = f.coherent_state(z);
            assert!(cs.warnings.is_empty());
            let v = cs.state.amplitudes();
            assert!((f.annihilation() * v - v * z).norm() < 1e-6);
            let b = f.berezin_symbol(&f.number().into_matrix(), z).unwrap();
            assert!((b.re - z.norm_sqr()).abs() < 1e-6);
        }
    }

    #[test]
    fn displacement_group_inverse_and_vacuum() {
        let f = FockSpace::new(40).unwrap();
        let z = c(0.8, -0.5);
        let d = f.displacement(z);
        assert!(unitarity_defect(&d) < 1e-12);
        assert!(max_abs(&(&d * f.displacement(-z) - CMat::identity(40, 40))) < 1e-10);
        let from_vac = &d * f.basis(0).unwrap().amplitudes();
        assert!((from_vac - f.coherent_state(z).state.amplitudes()).norm() < 1e-6);
    }

    #[test]
    fn truncation_warning() {
        let f = FockSpace::new(6).unwrap();
        let cs = f.coherent_state(c(2.0, 0.0));
        assert!(cs.truncation_error > 0.1);
        assert!(matches!(cs.warnings[..], [Warning::Truncation { .. }]));
    }
}
