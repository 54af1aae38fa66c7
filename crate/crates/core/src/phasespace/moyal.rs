//! Moyal star products on phase-space grids.
//!
//! The spectral backend Fourier-transforms in `q` only. In that mixed
//! representation the product is
//!
//! ```text
//! (f⋆g)~_K(p) = Σ_{a+b=K} f~_a(p + ħk_b/2) g~_b(p - ħk_a/2)
//! ```
//!
//! and the momentum shifts are whole grid steps when `Δp = πħ/(L_q r)` for an
//! integer `r`. Values beyond the p-range are clamped to the edge value. It is
//! exact for q-band-limited functions that decay in `p`, and for constants.
//!
//! The series backend truncates the bidifferential expansion at `ħ²` and uses
//! eighth-order finite differences. It is exact for polynomials of degree ≤ 2.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::Serialize;

use super::grid::{oscillator_wigner, PhaseSpaceFunction, PhaseSpaceGrid, QGrid};
use super::Warning;
use crate::error::{Error, Result};
use crate::linops::{c, I};

/// Spectral weight above half the q-Nyquist frequency that triggers [`Warning::Aliasing`].
pub const ALIASING_FRACTION: f64 = 1e-12;
/// Relative magnitude below which a q-frequency is treated as absent.
pub const SPECTRAL_CUTOFF: f64 = 1e-17;
/// Stencil width of the finite-difference derivatives.
pub const FD_POINTS: usize = 9;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum MoyalBackend {
    #[default]
    Spectral,
    Series,
}

#[derive(Clone, Debug)]
pub struct MoyalResult {
    pub function: PhaseSpaceFunction,
    pub warnings: Vec<Warning>,
}

impl PhaseSpaceGrid {
    /// Grid with `q ∈ [-q_half, q_half)` on `nq` points and `Δp = πħ/(2 q_half r)`,
    /// with enough p-points (a power of two) to cover `[-p_half, p_half)`.
    pub fn for_moyal(hbar: f64, q_half: f64, nq: usize, p_half: f64, r: usize) -> Result<Self> {
        if r == 0 {
            return Err(Error::Grid("lattice ratio r must be positive".into()));
        }
        let q = QGrid::new(-q_half, q_half, nq)?;
        let dp = PI * hbar / (q.length() * r as f64);
        let np = ((2.0 * p_half / dp).ceil() as usize).next_power_of_two();
        let half = dp * (np / 2) as f64;
        Self::new(q, QGrid { min: -half, step: dp, n: np }, hbar)
    }

    /// `r` in `Δp = πħ/(L_q r)` when it is an integer.
    pub fn lattice_ratio(&self) -> Option<usize> {
        let r = PI * self.hbar / (self.q.length() * self.p.step);
        let ri = r.round();
        ((r - ri).abs() < 1e-9 * r.max(1.0) && ri >= 1.0).then_some(ri as usize)
    }
}

fn signed(a: usize, n: usize) -> i64 {
    if a < n.div_ceil(2) {
        a as i64
    } else {
        a as i64 - n as i64
    }
}

/// Rows `a` (q-frequency index), columns p; `f~_a(p)` with `f = Σ_a f~_a e^{i k_a q}`.
fn q_spectrum(f: &PhaseSpaceFunction) -> DMatrix<Complex64> {
    let (nq, np) = (f.grid.q.n, f.grid.p.n);
    let fft = FftPlanner::new().plan_fft_forward(nq);
    let l = f.grid.q.length();
    let qmin = f.grid.q.min;
    let cols: Vec<Vec<Complex64>> = (0..np)
        .into_par_iter()
        .map(|m| {
            let mut col: Vec<Complex64> = (0..nq).map(|j| f.values[(j, m)]).collect();
            fft.process(&mut col);
            for (a, z) in col.iter_mut().enumerate() {
                let k = 2.0 * PI * signed(a, nq) as f64 / l;
                *z *= Complex64::from_polar(1.0 / nq as f64, -k * qmin);
            }
            col
        })
        .collect();
    DMatrix::from_fn(nq, np, |a, m| cols[m][a])
}

fn q_synthesis(spec: &DMatrix<Complex64>, grid: &PhaseSpaceGrid) -> DMatrix<Complex64> {
    let (nq, np) = (grid.q.n, grid.p.n);
    let ifft = FftPlanner::new().plan_fft_inverse(nq);
    let l = grid.q.length();
    let cols: Vec<Vec<Complex64>> = (0..np)
        .into_par_iter()
        .map(|m| {
            let mut col: Vec<Complex64> = (0..nq)
                .map(|a| spec[(a, m)] * Complex64::from_polar(1.0, 2.0 * PI * signed(a, nq) as f64 / l * grid.q.min))
                .collect();
            ifft.process(&mut col);
            col
        })
        .collect();
    DMatrix::from_fn(nq, np, |j, m| cols[m][j])
}

/// Fraction of `Σ|f~_a|²` carried by `|a| > N_q/4`.
pub fn nyquist_fraction(f: &PhaseSpaceFunction) -> f64 {
    let s = q_spectrum(f);
    let nq = f.grid.q.n;
    let (mut hi, mut tot) = (0.0, 0.0);
    for a in 0..nq {
        let w: f64 = s.row(a).iter().map(|z| z.norm_sqr()).sum();
        tot += w;
        if signed(a, nq).unsigned_abs() as usize > nq / 4 {
            hi += w;
        }
    }
    if tot == 0.0 {
        0.0
    } else {
        hi / tot
    }
}

fn active_rows(s: &DMatrix<Complex64>) -> Vec<usize> {
    let norms: Vec<f64> = s.row_iter().map(|r| r.iter().map(|z| z.norm()).fold(0.0, f64::max)).collect();
    let top = norms.iter().cloned().fold(0.0, f64::max);
    (0..norms.len()).filter(|&a| norms[a] > SPECTRAL_CUTOFF * top).collect()
}

fn check_same_grid(f: &PhaseSpaceFunction, g: &PhaseSpaceFunction) -> Result<()> {
    if f.grid != g.grid {
        return Err(Error::Grid("operands live on different grids".into()));
    }
    Ok(())
}

fn spectral_star(f: &PhaseSpaceFunction, g: &PhaseSpaceFunction) -> Result<MoyalResult> {
    let grid = f.grid;
    let r = grid
        .lattice_ratio()
        .ok_or_else(|| Error::Grid("spectral Moyal product needs Δp = πħ/(L_q r) with integer r".into()))?
        as i64;
    let (nq, np) = (grid.q.n, grid.p.n);
    let (fs, gs) = (q_spectrum(f), q_spectrum(g));
    let (fa, gb) = (active_rows(&fs), active_rows(&gs));
    // Rows padded with their edge values so every shifted read stays in range.
    let pad = r as usize * nq.div_ceil(2) + 1;
    let padded = |spec: &DMatrix<Complex64>, a: usize| -> Vec<Complex64> {
        let row = spec.row(a);
        let (first, last) = (row[0], row[np - 1]);
        std::iter::repeat_n(first, pad).chain(row.iter().copied()).chain(std::iter::repeat_n(last, pad)).collect()
    };
    let f_rows: Vec<Option<Vec<Complex64>>> = (0..nq).map(|a| fa.contains(&a).then(|| padded(&fs, a))).collect();
    let g_rows: Vec<Option<Vec<Complex64>>> = (0..nq).map(|b| gb.contains(&b).then(|| padded(&gs, b))).collect();
    let rows: Vec<Vec<Complex64>> = (0..nq)
        .into_par_iter()
        .map(|k| {
            let mut row = vec![Complex64::new(0.0, 0.0); np];
            for &a in &fa {
                let b = (k + nq - a) % nq;
                let (Some(fr), Some(gr)) = (&f_rows[a], &g_rows[b]) else { continue };
                let (sa, sb) = (signed(a, nq), signed(b, nq));
                let f0 = (pad as i64 + r * sb) as usize;
                let g0 = (pad as i64 - r * sa) as usize;
                for ((z, x), y) in row.iter_mut().zip(&fr[f0..f0 + np]).zip(&gr[g0..g0 + np]) {
                    *z += x * y;
                }
            }
            row
        })
        .collect();
    let spec = DMatrix::from_fn(nq, np, |k, m| rows[k][m]);
    let values = q_synthesis(&spec, &grid);
    let mut warnings = Vec::new();
    for h in [f, g] {
        let frac = nyquist_fraction(h);
        if frac > ALIASING_FRACTION {
            warnings.push(Warning::Aliasing { nyquist_fraction: frac });
        }
    }
    Ok(MoyalResult { function: PhaseSpaceFunction { grid, values }, warnings })
}

/// Finite-difference weights for derivatives `0..=order` at `z` on nodes `x` (Fornberg).
pub fn fd_weights(z: f64, x: &[f64], order: usize) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut w = vec![vec![0.0; n]; order + 1];
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    w[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    w[k][i] = c1 * (k as f64 * w[k - 1][i - 1] - c5 * w[k][i - 1]) / c2;
                }
                w[0][i] = -c1 * c5 * w[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                w[k][j] = (c4 * w[k][j] - k as f64 * w[k - 1][j]) / c3;
            }
            w[0][j] = c4 * w[0][j] / c3;
        }
        c1 = c2;
    }
    w
}

/// Stencils for derivative `order` at every index of an `n`-point grid with spacing `h`.
fn stencils(n: usize, h: f64, order: usize) -> Vec<(usize, Vec<f64>)> {
    let width = FD_POINTS.min(n);
    (0..n)
        .map(|i| {
            let start = i.saturating_sub(width / 2).min(n - width);
            let nodes: Vec<f64> = (0..width).map(|k| (start + k) as f64 - i as f64).collect();
            let w = fd_weights(0.0, &nodes, order);
            (start, w[order].iter().map(|x| x / h.powi(order as i32)).collect())
        })
        .collect()
}

#[derive(Clone, Copy)]
enum Axis {
    Q,
    P,
}

fn derivative(v: &DMatrix<Complex64>, grid: &PhaseSpaceGrid, axis: Axis, order: usize) -> DMatrix<Complex64> {
    let (nq, np) = v.shape();
    match axis {
        Axis::Q => {
            let st = stencils(nq, grid.q.step, order);
            DMatrix::from_fn(nq, np, |i, m| {
                let (s, w) = &st[i];
                w.iter().enumerate().map(|(k, x)| v[(s + k, m)] * *x).sum()
            })
        }
        Axis::P => {
            let st = stencils(np, grid.p.step, order);
            DMatrix::from_fn(nq, np, |i, m| {
                let (s, w) = &st[m];
                w.iter().enumerate().map(|(k, x)| v[(i, s + k)] * *x).sum()
            })
        }
    }
}

struct Derivs {
    q: DMatrix<Complex64>,
    p: DMatrix<Complex64>,
    qq: DMatrix<Complex64>,
    pp: DMatrix<Complex64>,
    qp: DMatrix<Complex64>,
}

fn derivs(f: &PhaseSpaceFunction) -> Derivs {
    let g = &f.grid;
    let q = derivative(&f.values, g, Axis::Q, 1);
    let qp = derivative(&q, g, Axis::P, 1);
    Derivs {
        p: derivative(&f.values, g, Axis::P, 1),
        qq: derivative(&f.values, g, Axis::Q, 2),
        pp: derivative(&f.values, g, Axis::P, 2),
        q,
        qp,
    }
}

/// `{f, g} = ∂_q f ∂_p g - ∂_p f ∂_q g` by finite differences.
pub fn poisson_bracket_fd(f: &PhaseSpaceFunction, g: &PhaseSpaceFunction) -> Result<PhaseSpaceFunction> {
    check_same_grid(f, g)?;
    let (df, dg) = (derivs(f), derivs(g));
    Ok(PhaseSpaceFunction { grid: f.grid, values: df.q.component_mul(&dg.p) - df.p.component_mul(&dg.q) })
}

fn series_star(f: &PhaseSpaceFunction, g: &PhaseSpaceFunction) -> MoyalResult {
    let hbar = f.grid.hbar;
    let (df, dg) = (derivs(f), derivs(g));
    let pb = df.q.component_mul(&dg.p) - df.p.component_mul(&dg.q);
    let second = df.qq.component_mul(&dg.pp) - df.qp.component_mul(&dg.qp) * c(2.0, 0.0) + df.pp.component_mul(&dg.qq);
    let values = f.values.component_mul(&g.values) + pb * (I * (hbar / 2.0)) - second * c(hbar * hbar / 8.0, 0.0);
    MoyalResult { function: PhaseSpaceFunction { grid: f.grid, values }, warnings: Vec::new() }
}

pub fn moyal_star(f: &PhaseSpaceFunction, g: &PhaseSpaceFunction, backend: MoyalBackend) -> Result<MoyalResult> {
    check_same_grid(f, g)?;
    match backend {
        MoyalBackend::Spectral => spectral_star(f, g),
        MoyalBackend::Series => Ok(series_star(f, g)),
    }
}

/// `(f⋆g - g⋆f) / (iħ)`.
pub fn moyal_bracket(f: &PhaseSpaceFunction, g: &PhaseSpaceFunction, backend: MoyalBackend) -> Result<MoyalResult> {
    let fg = moyal_star(f, g, backend)?;
    let gf = moyal_star(g, f, backend)?;
    let mut warnings = fg.warnings;
    for w in gf.warnings {
        if !warnings.contains(&w) {
            warnings.push(w);
        }
    }
    let s = 1.0 / (I * f.grid.hbar);
    Ok(MoyalResult { function: fg.function.sub(&gf.function).scale(s), warnings })
}

/// `‖H⋆ρ_n - E ρ_n‖_∞ / ‖ρ_n‖_∞` for `H = (p² + q²)/2` and the oscillator
/// Wigner function `ρ_n`, with the series backend.
pub fn stationary_moyal_check(grid: &PhaseSpaceGrid, level: usize, energy: f64) -> f64 {
    let hbar = grid.hbar;
    let h = grid.sample_real(|q, p| 0.5 * (q * q + p * p));
    let rho = grid.sample_real(|q, p| oscillator_wigner(level, q, p, hbar));
    let hr = series_star(&h, &rho).function;
    hr.sub(&rho.scale(c(energy, 0.0))).max_abs() / rho.max_abs()
}

/// Fixed pair of displaced Gaussians used for the semiclassical check.
pub fn semiclassical_pair(q: f64, p: f64) -> (f64, f64, [f64; 2], [f64; 2]) {
    let ea = (-((q - 0.4).powi(2) + (p + 0.3).powi(2))).exp();
    let eb = (-((q + 0.3).powi(2) + (p - 0.2).powi(2)) / 1.5).exp();
    let da = [-2.0 * (q - 0.4) * ea, -2.0 * (p + 0.3) * ea];
    let db = [-2.0 * (q + 0.3) / 1.5 * eb, -2.0 * (p - 0.2) / 1.5 * eb];
    (ea, eb, da, db)
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergencePoint {
    pub hbar: f64,
    pub max_error: f64,
    pub n_q: usize,
    pub n_p: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceReport {
    pub points: Vec<ConvergencePoint>,
    /// Least-squares slope of `log max_error` against `log ħ`.
    pub slope: f64,
    pub warnings: Vec<Warning>,
}

/// `max |(f⋆g - g⋆f)/(iħ) - {f, g}|` for the [`semiclassical_pair`] at each ħ.
pub fn semiclassical_convergence(hbars: &[f64]) -> Result<ConvergenceReport> {
    let mut points = Vec::new();
    let mut warnings = Vec::new();
    for &hbar in hbars {
        let grid = PhaseSpaceGrid::for_moyal(hbar, 10.0, 128, 7.0, 1)?;
        let f = grid.sample_real(|q, p| semiclassical_pair(q, p).0);
        let g = grid.sample_real(|q, p| semiclassical_pair(q, p).1);
        let pb = grid.sample_real(|q, p| {
            let (_, _, da, db) = semiclassical_pair(q, p);
            da[0] * db[1] - da[1] * db[0]
        });
        let br = moyal_bracket(&f, &g, MoyalBackend::Spectral)?;
        warnings.extend(br.warnings);
        points.push(ConvergencePoint { hbar, max_error: br.function.sub(&pb).max_abs(), n_q: grid.q.n, n_p: grid.p.n });
    }
    let slope = log_log_slope(&points.iter().map(|p| (p.hbar, p.max_error)).collect::<Vec<_>>());
    Ok(ConvergenceReport { points, slope, warnings })
}

pub fn log_log_slope(xy: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = xy.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}
