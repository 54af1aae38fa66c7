//! Uniform `(q, p)` grids, sampled wave functions and Wigner functions.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::Warning;
use crate::error::{Error, Result};
use crate::linops::c;

/// `|ψ|` above this at either grid edge triggers [`Warning::EdgeDecay`].
pub const EDGE_DECAY: f64 = 1e-8;
pub const NORM_TOL: f64 = 1e-10;

/// Uniform 1D grid `x_j = min + j·step`, `j = 0..n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QGrid {
    pub min: f64,
    pub step: f64,
    pub n: usize,
}

impl QGrid {
    /// `n` points covering `[min, max)`.
    pub fn new(min: f64, max: f64, n: usize) -> Result<Self> {
        if n < 2 || max <= min || !min.is_finite() || !max.is_finite() {
            return Err(Error::Grid(format!("bad grid [{min}, {max}) with {n} points")));
        }
        Ok(Self { min, step: (max - min) / n as f64, n })
    }

    pub fn point(&self, j: usize) -> f64 {
        self.min + j as f64 * self.step
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.point(j)).collect()
    }

    pub fn length(&self) -> f64 {
        self.step * self.n as f64
    }
}

/// Phase-space grid with a fixed `ħ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PhaseSpaceGrid {
    pub q: QGrid,
    pub p: QGrid,
    pub hbar: f64,
}

impl PhaseSpaceGrid {
    pub fn new(q: QGrid, p: QGrid, hbar: f64) -> Result<Self> {
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::InvalidParameters(format!("hbar must be positive, got {hbar}")));
        }
        if !q.n.is_power_of_two() || !p.n.is_power_of_two() {
            return Err(Error::Grid(format!("grid sizes must be powers of two, got {} x {}", q.n, p.n)));
        }
        Ok(Self { q, p, hbar })
    }

    /// `N_q = N_p = 512`, `q, p ∈ [-8√ħ, 8√ħ)`.
    pub fn default_for(hbar: f64) -> Result<Self> {
        let l = 8.0 * hbar.sqrt();
        Self::new(QGrid::new(-l, l, 512)?, QGrid::new(-l, l, 512)?, hbar)
    }

    pub fn cell(&self) -> f64 {
        self.q.step * self.p.step
    }

    /// Samples `f(q, p)` with rows indexed by `q`.
    pub fn sample<F: Fn(f64, f64) -> Complex64 + Sync>(&self, f: F) -> PhaseSpaceFunction {
        let vals: Vec<Complex64> = (0..self.q.n * self.p.n)
            .into_par_iter()
            .map(|idx| f(self.q.point(idx / self.p.n), self.p.point(idx % self.p.n)))
            .collect();
        PhaseSpaceFunction { grid: *self, values: DMatrix::from_row_slice(self.q.n, self.p.n, &vals) }
    }

    pub fn sample_real<F: Fn(f64, f64) -> f64 + Sync>(&self, f: F) -> PhaseSpaceFunction {
        self.sample(|q, p| c(f(q, p), 0.0))
    }

    /// `∫∫ f dq dp / (2πħ)`.
    pub fn integrate(&self, f: &DMatrix<Complex64>) -> Complex64 {
        f.sum() * (self.cell() / (2.0 * PI * self.hbar))
    }
}

/// Complex function sampled on a [`PhaseSpaceGrid`], `values[(i, j)] = f(q_i, p_j)`.
#[derive(Clone, Debug)]
pub struct PhaseSpaceFunction {
    pub grid: PhaseSpaceGrid,
    pub values: DMatrix<Complex64>,
}

impl PhaseSpaceFunction {
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_imag(&self) -> f64 {
        self.values.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    pub fn real(&self) -> DMatrix<f64> {
        self.values.map(|z| z.re)
    }

    pub fn integral(&self) -> Complex64 {
        self.grid.integrate(&self.values)
    }

    /// `∫ f dp / (2πħ)` at each `q_i`.
    pub fn q_marginal(&self) -> Vec<f64> {
        let s = self.grid.p.step / (2.0 * PI * self.grid.hbar);
        self.values.row_iter().map(|r| r.iter().map(|z| z.re).sum::<f64>() * s).collect()
    }

    /// `∫ f dq / (2πħ)` at each `p_j`.
    pub fn p_marginal(&self) -> Vec<f64> {
        let s = self.grid.q.step / (2.0 * PI * self.grid.hbar);
        self.values.column_iter().map(|col| col.iter().map(|z| z.re).sum::<f64>() * s).collect()
    }

    /// `∫∫ f g dq dp / (2πħ)`.
    pub fn overlap(&self, other: &Self) -> Complex64 {
        self.grid.integrate(&self.values.component_mul(&other.values))
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self { grid: self.grid, values: &self.values - &other.values }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self { grid: self.grid, values: &self.values * s }
    }
}

/// Wave function on a q-grid, `Σ|ψ|² Δq = 1`.
#[derive(Clone, Debug)]
pub struct WaveFunction1D {
    pub grid: QGrid,
    pub values: Vec<Complex64>,
}

impl WaveFunction1D {
    pub fn new(grid: QGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.n {
            return Err(Error::DimensionMismatch { expected: grid.n, got: values.len() });
        }
        let w = Self { grid, values };
        if (w.norm_sqr() - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidParameters(format!("wave function norm² = {}", w.norm_sqr())));
        }
        Ok(w)
    }

    pub fn normalized(grid: QGrid, values: Vec<Complex64>) -> Result<Self> {
        let n: f64 = values.iter().map(|z| z.norm_sqr()).sum::<f64>() * grid.step;
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::ZeroNorm);
        }
        let s = 1.0 / n.sqrt();
        Self::new(grid, values.into_iter().map(|z| z * s).collect())
    }

    pub fn from_fn<F: Fn(f64) -> Complex64>(grid: QGrid, f: F) -> Result<Self> {
        Self::normalized(grid, grid.points().into_iter().map(f).collect())
    }

    /// Harmonic oscillator eigenfunction `n` (`m = ω = 1`).
    pub fn oscillator(grid: QGrid, n: usize, hbar: f64) -> Result<Self> {
        Self::from_fn(grid, |q| c(hermite_function(n, q / hbar.sqrt()), 0.0))
    }

    /// `exp(-(q - q0)²/(2σ²) + i p0 q/ħ)`.
    pub fn gaussian_packet(grid: QGrid, q0: f64, p0: f64, sigma: f64, hbar: f64) -> Result<Self> {
        Self::from_fn(grid, |q| Complex64::from_polar((-(q - q0).powi(2) / (2.0 * sigma * sigma)).exp(), p0 * q / hbar))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.step
    }

    pub fn density(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.norm_sqr()).collect()
    }

    pub fn edge_amplitude(&self) -> f64 {
        self.values[0].norm().max(self.values[self.values.len() - 1].norm())
    }

    pub fn edge_warning(&self) -> Option<Warning> {
        let e = self.edge_amplitude();
        (e > EDGE_DECAY).then_some(Warning::EdgeDecay { edge_amplitude: e })
    }

    /// `ψ̃(p) = (2πħ)^{-1/2} ∫ ψ(q) e^{-ipq/ħ} dq` at the given momenta.
    pub fn momentum_amplitudes(&self, ps: &[f64], hbar: f64) -> Vec<Complex64> {
        let s = self.grid.step / (2.0 * PI * hbar).sqrt();
        ps.par_iter()
            .map(|&p| {
                (0..self.grid.n)
                    .map(|j| self.values[j] * Complex64::from_polar(1.0, -p * self.grid.point(j) / hbar))
                    .sum::<Complex64>()
                    * s
            })
            .collect()
    }

    /// `⟨ψ|φ⟩`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.values.iter().zip(&other.values).map(|(a, b)| a.conj() * b).sum::<Complex64>() * self.grid.step
    }
}

/// Normalized Hermite function `h_n(x) = (2^n n! √π)^{-1/2} H_n(x) e^{-x²/2}`.
pub fn hermite_function(n: usize, x: f64) -> f64 {
    let g = (-x * x / 2.0).exp() / PI.powf(0.25);
    let (mut prev, mut cur) = (0.0, g);
    for k in 0..n {
        let next = (2.0 / (k + 1) as f64).sqrt() * x * cur - (k as f64 / (k + 1) as f64).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

#[derive(Clone, Debug)]
pub struct WignerResult {
    pub function: PhaseSpaceFunction,
    pub warnings: Vec<Warning>,
}

/// `W(q, p) = ∫ e^{-ipy/ħ} ψ(q + y/2) ψ*(q - y/2) dy`, normalized so that
/// `∫∫ W dq dp / (2πħ) = 1`.
///
/// The p-grid of `grid` is used as given; the q-grid must coincide with the
/// wave function's.
pub fn wigner_function(psi: &WaveFunction1D, grid: &PhaseSpaceGrid) -> Result<WignerResult> {
    if psi.grid != grid.q {
        return Err(Error::Grid("wave function and phase-space q-grids differ".into()));
    }
    let (nq, np) = (grid.q.n, grid.p.n);
    let dq = grid.q.step;
    let hbar = grid.hbar;
    let v = &psi.values;
    let rows: Vec<Vec<Complex64>> = (0..nq)
        .into_par_iter()
        .map(|j| {
            let kmax = j.min(nq - 1 - j);
            let mut row = vec![Complex64::new(0.0, 0.0); np];
            for (m, out) in row.iter_mut().enumerate() {
                let p = grid.p.point(m);
                // k and -k pair into 2 Re(e^{-iθk} ψ_{j+k} ψ*_{j-k}).
                let step = Complex64::from_polar(1.0, -2.0 * p * dq / hbar);
                let mut ph = step;
                let mut acc = v[j].norm_sqr();
                for k in 1..=kmax {
                    acc += 2.0 * (ph * v[j + k] * v[j - k].conj()).re;
                    ph *= step;
                    if k % 64 == 0 {
                        ph /= ph.norm();
                    }
                }
                *out = c(2.0 * dq * acc, 0.0);
            }
            row
        })
        .collect();
    let flat: Vec<Complex64> = rows.into_iter().flatten().collect();
    let function = PhaseSpaceFunction { grid: *grid, values: DMatrix::from_row_slice(nq, np, &flat) };
    Ok(WignerResult { function, warnings: psi.edge_warning().into_iter().collect() })
}

/// Analytic oscillator Wigner function `2 (-1)^n L_n(2r²/ħ) e^{-r²/ħ}`.
pub fn oscillator_wigner(n: usize, q: f64, p: f64, hbar: f64) -> f64 {
    let x = 2.0 * (q * q + p * p) / hbar;
    let (mut l0, mut l1) = (1.0, 1.0 - x);
    let ln = match n {
        0 => l0,
        1 => l1,
        _ => {
            for k in 1..n {
                let l2 = ((2 * k + 1) as f64 - x) * l1 / (k + 1) as f64 - k as f64 * l0 / (k + 1) as f64;
                l0 = l1;
                l1 = l2;
            }
            l1
        }
    };
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    2.0 * sign * ln * (-(q * q + p * p) / hbar).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn default_grid(hbar: f64) -> PhaseSpaceGrid {
        PhaseSpaceGrid::default_for(hbar).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(QGrid::new(1.0, 0.0, 8).is_err());
        let q = QGrid::new(-1.0, 1.0, 6).unwrap();
        assert!(PhaseSpaceGrid::new(q, q, 1.0).is_err());
        let q = QGrid::new(-1.0, 1.0, 8).unwrap();
        assert!(PhaseSpaceGrid::new(q, q, 0.0).is_err());
        assert_eq!(q.step, 0.25);
    }

    #[test]
    fn hermite_functions_orthonormal() {
        let g = QGrid::new(-12.0, 12.0, 1024).unwrap();
        for a in 0..5 {
            for b in 0..5 {
                let s: f64 =
                    g.points().iter().map(|&x| hermite_function(a, x) * hermite_function(b, x)).sum::<f64>() * g.step;
                assert!((s - if a == b { 1.0 } else { 0.0 }).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn ground_state_wigner_matches_gaussian() {
        for hbar in [1.0, 0.3] {
            let grid = default_grid(hbar);
            let psi = WaveFunction1D::oscillator(grid.q, 0, hbar).unwrap();
            let w = wigner_function(&psi, &grid).unwrap();
            assert!(w.warnings.is_empty());
            let oracle = grid.sample_real(|q, p| oscillator_wigner(0, q, p, hbar));
            assert!(w.function.sub(&oracle).max_abs() < 1e-10);
            assert!(w.function.real().min() > -1e-8);
            assert!((w.function.integral() - c(1.0, 0.0)).norm() < 1e-6);
        }
    }

    #[test]
    fn marginals() {
        let hbar = 1.0;
        let grid = default_grid(hbar);
        let psi = WaveFunction1D::gaussian_packet(grid.q, 0.7, -0.4, 0.8, hbar).unwrap();
        let w = wigner_function(&psi, &grid).unwrap().function;
        let qm = w.q_marginal();
        for (a, b) in qm.iter().zip(psi.density()) {
            assert!((a - b).abs() < 1e-6);
        }
        let pt = psi.momentum_amplitudes(&grid.p.points(), hbar);
        for (a, b) in w.p_marginal().iter().zip(pt) {
            assert!((a - b.norm_sqr()).abs() < 1e-6);
        }
    }

    #[test]
    fn first_excited_negative_at_origin() {
        let grid = default_grid(1.0);
        let psi = WaveFunction1D::oscillator(grid.q, 1, 1.0).unwrap();
        let w = wigner_function(&psi, &grid).unwrap().function;
        let oracle = grid.sample_real(|q, p| oscillator_wigner(1, q, p, 1.0));
        assert!(w.sub(&oracle).max_abs() < 1e-9);
        assert!(w.values[(256, 256)].re < -1.9);
    }

    #[test]
    fn translation_covariance() {
        let hbar = 1.0;
        let grid = default_grid(hbar);
        let (s, shift) = (grid.q.step, 40);
        let a = WaveFunction1D::gaussian_packet(grid.q, 0.0, 0.5, 1.0, hbar).unwrap();
        let b = WaveFunction1D::gaussian_packet(grid.q, shift as f64 * s, 0.5, 1.0, hbar).unwrap();
        let (wa, wb) = (wigner_function(&a, &grid).unwrap().function, wigner_function(&b, &grid).unwrap().function);
        for i in 0..grid.q.n - shift {
            for j in 0..grid.p.n {
                assert!((wb.values[(i + shift, j)] - wa.values[(i, j)]).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn overlap_formula() {
        let hbar = 1.0;
        let grid = default_grid(hbar);
        let a = WaveFunction1D::gaussian_packet(grid.q, 0.3, 0.2, 1.0, hbar).unwrap();
        let b = WaveFunction1D::gaussian_packet(grid.q, -0.5, 0.6, 0.8, hbar).unwrap();
        let (wa, wb) = (wigner_function(&a, &grid).unwrap().function, wigner_function(&b, &grid).unwrap().function);
        assert!((wa.overlap(&wb).re - a.inner(&b).norm_sqr()).abs() < 1e-5);
    }

    #[test]
    fn edge_warning() {
        let grid = default_grid(1.0);
        let psi = WaveFunction1D::gaussian_packet(grid.q, 6.0, 0.0, 1.0, 1.0).unwrap();
        let w = wigner_function(&psi, &grid).unwrap();
        assert!(matches!(w.warnings[..], [Warning::EdgeDecay { .. }]));
    }
}
