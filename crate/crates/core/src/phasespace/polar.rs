//! Polar form `ψ = A e^{iS/ħ}` of grid wave functions under Schrödinger evolution.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;

use super::grid::{QGrid, WaveFunction1D};
use super::Warning;
use crate::error::{Error, Result};
use crate::linops::{c, propagator, CMat, CVec, HermitianOperator};

/// `|ψ|` at or below this is treated as a node.
pub const NODE_THRESHOLD: f64 = 1e-8;

fn signed_k(a: usize, grid: &QGrid) -> f64 {
    let n = grid.n;
    let s = if a < n.div_ceil(2) { a as f64 } else { a as f64 - n as f64 };
    2.0 * PI * s / grid.length()
}

/// `d^order f / dq^order` by FFT; the Nyquist mode is dropped for odd orders.
pub fn spectral_derivative(values: &[Complex64], grid: &QGrid, order: u32) -> Vec<Complex64> {
    let n = grid.n;
    let mut planner = FftPlanner::new();
    let mut buf = values.to_vec();
    planner.plan_fft_forward(n).process(&mut buf);
    for (a, z) in buf.iter_mut().enumerate() {
        let k = signed_k(a, grid);
        *z *= if order % 2 == 1 && n.is_multiple_of(2) && a == n / 2 { c(0.0, 0.0) } else { (c(0.0, k)).powu(order) };
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    buf.into_iter().map(|z| z / n as f64).collect()
}

/// Fourier-grid Hamiltonian `T + V` with `T = F† diag(ħ²k²/2m) F`.
pub fn fourier_grid_hamiltonian<V: Fn(f64) -> f64>(
    grid: &QGrid,
    mass: f64,
    hbar: f64,
    potential: V,
) -> Result<HermitianOperator> {
    if !(mass > 0.0 && hbar > 0.0) {
        return Err(Error::InvalidParameters("mass and hbar must be positive".into()));
    }
    let n = grid.n;
    let kin: Vec<f64> = (0..n).map(|a| hbar * hbar * signed_k(a, grid).powi(2) / (2.0 * mass)).collect();
    // T_{jl} depends on j - l only.
    let t: Vec<Complex64> = (0..n)
        .map(|d| {
            kin.iter()
                .enumerate()
                .map(|(a, &e)| Complex64::from_polar(e, 2.0 * PI * (a * d % n) as f64 / n as f64))
                .sum::<Complex64>()
                / n as f64
        })
        .collect();
    let mut h = CMat::from_fn(n, n, |j, l| t[(j + n - l) % n]);
    for j in 0..n {
        h[(j, j)] += c(potential(grid.point(j)), 0.0);
    }
    HermitianOperator::hermitian_part(&h)
}

/// `ψ(k·dt)` for `k = 0..=steps`.
pub fn evolve_series(
    h: &HermitianOperator,
    psi0: &WaveFunction1D,
    dt: f64,
    steps: usize,
    hbar: f64,
) -> Result<Vec<WaveFunction1D>> {
    if h.dim() != psi0.grid.n {
        return Err(Error::DimensionMismatch { expected: h.dim(), got: psi0.grid.n });
    }
    let u = propagator(h, dt, hbar);
    let mut cur = CVec::from_vec(psi0.values.clone());
    let mut out = vec![psi0.clone()];
    for _ in 0..steps {
        cur = &u * &cur;
        out.push(WaveFunction1D::normalized(psi0.grid, cur.iter().copied().collect())?);
    }
    Ok(out)
}

/// Fields at one time; masked points hold `NaN`.
#[derive(Clone, Debug, Serialize)]
pub struct PolarRecord {
    pub t: f64,
    pub density: Vec<f64>,
    /// `v = (ħ/m) Im(ψ* ∂ψ) / |ψ|²`
    pub velocity: Vec<f64>,
    /// `U = -ħ²/(2m) ∂²A / A`
    pub quantum_potential: Vec<f64>,
    /// `∂_t ρ + ∂_q(ρ v)`, present when the time stencil fits.
    pub continuity: Option<Vec<f64>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PolarDiagnostics {
    pub records: Vec<PolarRecord>,
    pub max_continuity_residual: f64,
    pub masked_points: usize,
    pub warnings: Vec<Warning>,
}

/// Polar-form fields along a time series spaced by `dt`. `∂_t ρ` uses a
/// fourth-order central difference, so the first and last two records carry
/// no continuity residual.
pub fn polar_diagnostics(series: &[WaveFunction1D], dt: f64, mass: f64, hbar: f64) -> Result<PolarDiagnostics> {
    let first = series.first().ok_or_else(|| Error::InvalidParameters("empty time series".into()))?;
    let grid = first.grid;
    if series.iter().any(|w| w.grid != grid) {
        return Err(Error::Grid("time series on mixed grids".into()));
    }
    let n = grid.n;
    let mut masked_points = 0;
    let mut currents = Vec::with_capacity(series.len());
    let mut records = Vec::with_capacity(series.len());
    for (i, psi) in series.iter().enumerate() {
        let d1 = spectral_derivative(&psi.values, &grid, 1);
        let amp: Vec<Complex64> = psi.values.iter().map(|z| c(z.norm(), 0.0)).collect();
        let a2 = spectral_derivative(&amp, &grid, 2);
        let density = psi.density();
        let j: Vec<f64> = (0..n).map(|k| hbar / mass * (psi.values[k].conj() * d1[k]).im).collect();
        let mut velocity = vec![f64::NAN; n];
        let mut qpot = vec![f64::NAN; n];
        for k in 0..n {
            if amp[k].re > NODE_THRESHOLD {
                velocity[k] = j[k] / density[k];
                qpot[k] = -hbar * hbar / (2.0 * mass) * a2[k].re / amp[k].re;
            } else {
                masked_points += 1;
            }
        }
        currents.push(j);
        records.push(PolarRecord { t: i as f64 * dt, density, velocity, quantum_potential: qpot, continuity: None });
    }
    let mut max_res = 0.0f64;
    for i in 2..series.len().saturating_sub(2) {
        let jc: Vec<Complex64> = currents[i].iter().map(|&x| c(x, 0.0)).collect();
        let div = spectral_derivative(&jc, &grid, 1);
        let rho = |s: usize, k: usize| records[s].density[k];
        let res: Vec<f64> = (0..n)
            .map(|k| {
                if series[i].values[k].norm() <= NODE_THRESHOLD {
                    return f64::NAN;
                }
                let dt_rho = (-rho(i + 2, k) + 8.0 * rho(i + 1, k) - 8.0 * rho(i - 1, k) + rho(i - 2, k)) / (12.0 * dt);
                dt_rho + div[k].re
            })
            .collect();
        max_res = res.iter().filter(|x| x.is_finite()).fold(max_res, |m, x| m.max(x.abs()));
        records[i].continuity = Some(res);
    }
    let warnings = if masked_points > 0 { vec![Warning::NodesMasked { count: masked_points }] } else { Vec::new() };
    Ok(PolarDiagnostics { records, max_continuity_residual: max_res, masked_points, warnings })
}
