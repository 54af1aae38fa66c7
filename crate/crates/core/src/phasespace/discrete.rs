//! Clock and shift on `C^N` and the Weyl operators they generate.
//!
//! `W(x, α) = τ^{-xα} X^x Z^{-α}` with `τ = e^{iπ/N}` satisfies
//! `W(v1) W(v2) = e^{iπ ω(v1, v2)/N} W(v1 + v2)` for integer labels, where
//! `ω((x1, α1), (x2, α2)) = x1 α2 - x2 α1`. Labels are not reduced mod `N`
//! because `τ^{-xα}` is only `2N`-periodic.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::linops::{c, CMat};

/// Factor ordering of the Weyl operator.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Ordering {
    /// `τ^{-xα} X^x Z^{-α}`
    #[default]
    Symmetric,
    /// `X^x Z^{-α}`
    ShiftFirst,
    /// `Z^{-α} X^x`
    ClockFirst,
}

pub fn symplectic_form(v1: (i64, i64), v2: (i64, i64)) -> i64 {
    v1.0 * v2.1 - v2.0 * v1.1
}

#[derive(Clone, Debug)]
pub struct DiscreteWeylSystem {
    n: usize,
    ordering: Ordering,
}

impl DiscreteWeylSystem {
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "N must be positive");
        Self { n, ordering: Ordering::Symmetric }
    }

    pub fn with_ordering(n: usize, ordering: Ordering) -> Self {
        Self { ordering, ..Self::new(n) }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `e^{iπ k/N}`, with `k` reduced mod `2N` first.
    pub fn tau_pow(&self, k: i64) -> Complex64 {
        let m = 2 * self.n as i64;
        Complex64::from_polar(1.0, PI * k.rem_euclid(m) as f64 / self.n as f64)
    }

    /// `ω^k = e^{2πi k/N}`.
    pub fn omega_pow(&self, k: i64) -> Complex64 {
        self.tau_pow(2 * k.rem_euclid(self.n as i64))
    }

    /// `X|k⟩ = |k+1⟩`.
    pub fn shift(&self) -> CMat {
        self.shift_pow(1)
    }

    /// `Z = diag(ω^k)`.
    pub fn clock(&self) -> CMat {
        self.clock_pow(1)
    }

    fn shift_pow(&self, x: i64) -> CMat {
        DiscreteWeylSystem::with_ordering(self.n, Ordering::ShiftFirst).weyl(x, 0)
    }

    fn clock_pow(&self, a: i64) -> CMat {
        CMat::from_diagonal(&nalgebra::DVector::from_iterator(
            self.n,
            (0..self.n as i64).map(|k| self.omega_pow(a * k)),
        ))
    }

    pub fn weyl(&self, x: i64, alpha: i64) -> CMat {
        let n = self.n as i64;
        // Column k of X^x Z^{-α} is ω^{-αk} |k + x⟩.
        let global = match self.ordering {
            Ordering::Symmetric => self.tau_pow(-x * alpha),
            Ordering::ShiftFirst => c(1.0, 0.0),
            Ordering::ClockFirst => self.omega_pow(-alpha * x),
        };
        let mut m = CMat::zeros(self.n, self.n);
        for k in 0..n {
            m[((k + x).rem_euclid(n) as usize, k as usize)] = global * self.omega_pow(-alpha * k);
        }
        m
    }

    /// Phase in `W(v1) W(v2) = phase · W(v1 + v2)` for the symmetric ordering.
    pub fn composition_phase(&self, v1: (i64, i64), v2: (i64, i64)) -> Complex64 {
        self.tau_pow(symplectic_form(v1, v2))
    }

    /// Labels `0..N` in both components, row-major over `(x, α)`.
    pub fn labels(&self) -> impl Iterator<Item = (i64, i64)> {
        let n = self.n as i64;
        (0..n).flat_map(move |x| (0..n).map(move |a| (x, a)))
    }

    /// `χ_A(v) = Tr(A W(v))`, indexed as [`Self::labels`].
    pub fn characteristic(&self, a: &CMat) -> Vec<Complex64> {
        self.labels().map(|(x, al)| (a * self.weyl(x, al)).trace()).collect()
    }

    fn fourier_kernel(&self, u: (i64, i64), v: (i64, i64), sign: i64) -> Complex64 {
        self.omega_pow(sign * symplectic_form(u, v))
    }

    /// Weyl symbol `s_A(u) = N^{-1} Σ_v e^{-2πi ω(u,v)/N} χ_A(v)`.
    pub fn symbol(&self, a: &CMat) -> Vec<Complex64> {
        let chi = self.characteristic(a);
        let labels: Vec<_> = self.labels().collect();
        let inv_n = 1.0 / self.n as f64;
        labels
            .iter()
            .map(|&u| {
                labels.iter().zip(&chi).map(|(&v, x)| self.fourier_kernel(u, v, -1) * x).sum::<Complex64>() * inv_n
            })
            .collect()
    }

    /// Inverse of [`Self::symbol`]: `f̂ = N^{-1} Σ_v f̃(v) W(v)^†` with `f̃` the
    /// symplectic Fourier transform of `f`.
    pub fn quantize(&self, f: &[Complex64]) -> CMat {
        assert_eq!(f.len(), self.n * self.n, "function must be sampled on Z_N x Z_N");
        let labels: Vec<_> = self.labels().collect();
        let inv_n = 1.0 / self.n as f64;
        let mut out = CMat::zeros(self.n, self.n);
        for &v in &labels {
            let ft: Complex64 =
                labels.iter().zip(f).map(|(&u, x)| self.fourier_kernel(u, v, 1) * x).sum::<Complex64>() * inv_n;
            if ft.norm() > 0.0 {
                out += self.weyl(v.0, v.1).adjoint() * (ft * inv_n);
            }
        }
        out
    }
}
