//! Two-qubit entanglement witnesses: concurrence, von Neumann entropy, the
//! `ρ_t(a, b, c, φ)` family and the functional-independence test `dS ∧ dC`.
//!
//! Entropy uses the standard sign `S = -Tr ρ log ρ` (natural log).

use nalgebra::DVector;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lie::{self, DualFunction};
use crate::linops::{
    c, eigh, kron, matrix_sqrt_psd, partial_trace, pauli, CMat, DensityState, StateVector, Subsystem, DENSITY_TOL, I,
};

/// Smallest eigenvalue (and eigenvalue gap) accepted as interior.
pub const INTERIOR_TOL: f64 = 1e-8;
/// Bisection tolerance in `c` for the independence locus.
pub const LOCUS_TOL: f64 = 1e-12;

fn xlogx(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// `-Σ λ log λ` over the clipped spectrum of the Hermitian part of `m`.
pub fn entropy_of_matrix(m: &CMat) -> f64 {
    -eigh(m).values.into_iter().map(|l| xlogx(l.max(0.0))).sum::<f64>()
}

pub fn von_neumann_entropy(rho: &DensityState) -> f64 {
    entropy_of_matrix(rho.matrix())
}

/// Entropy of the reduced state of a normalized two-qubit pure state.
pub fn pure_state_entropy(psi: &StateVector) -> Result<f64> {
    if psi.dim() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, got: psi.dim() });
    }
    let rho = DensityState::from_pure(psi)?;
    let r1 = partial_trace(rho.matrix(), 2, 2, Subsystem::First)?;
    Ok(entropy_of_matrix(&r1))
}

/// Spin-flipped state `(σ2⊗σ2) ρ* (σ2⊗σ2)`.
pub fn spin_flip(m: &CMat) -> CMat {
    let yy = kron(&pauli()[2], &pauli()[2]);
    &yy * m.map(|z| z.conj()) * &yy
}

/// Eigenvalues below this are treated as exact zeros before taking square roots.
pub const SPECTRUM_FLOOR: f64 = 1e-13;

/// Concurrence of any 4x4 Hermitian matrix, with its spectrum clipped at zero.
///
/// The `λ_i` (square roots of the eigenvalues of `ρ ρ̃`) are taken as the
/// singular values of `√ρ √ρ̃`, which avoids square roots of rounding noise.
pub fn concurrence_of_matrix(m: &CMat) -> f64 {
    let sq = eigh(m).apply(|l| c(if l > SPECTRUM_FLOOR { l.sqrt() } else { 0.0 }, 0.0));
    let l = (&sq * spin_flip(&sq)).singular_values();
    let lmax = l.iter().cloned().fold(0.0, f64::max);
    (2.0 * lmax - l.iter().sum::<f64>()).max(0.0)
}

pub fn concurrence(rho: &DensityState) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, got: rho.dim() });
    }
    matrix_sqrt_psd(rho.matrix())?;
    Ok(concurrence_of_matrix(rho.matrix()))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RhoTParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub phi: f64,
}

impl RhoTParams {
    pub fn new(a: f64, b: f64, c: f64, phi: f64) -> Self {
        Self { a, b, c, phi }
    }

    fn s(&self) -> f64 {
        ((self.a - self.b).powi(2) + self.c * self.c).sqrt()
    }

    /// `(1-a-b, λ-, λ+)` with `λ± = (a + b ± √((a-b)² + c²)) / 2`; the fourth eigenvalue is 0.
    pub fn spectrum(&self) -> [f64; 3] {
        let s = self.s();
        [1.0 - self.a - self.b, 0.5 * (self.a + self.b - s), 0.5 * (self.a + self.b + s)]
    }

    pub fn matrix(&self) -> CMat {
        let mut m = CMat::zeros(4, 4);
        m[(1, 1)] = c(self.a, 0.0);
        m[(2, 2)] = c(self.b, 0.0);
        m[(3, 3)] = c(1.0 - self.a - self.b, 0.0);
        let off = (I * self.phi).exp() * (0.5 * self.c);
        m[(1, 2)] = off;
        m[(2, 1)] = off.conj();
        m
    }

    fn check_ranges(&self) -> Result<()> {
        let Self { a, b, c, phi } = *self;
        if ![a, b, c, phi].iter().all(|x| x.is_finite()) {
            return Err(Error::InvalidParameters("non-finite parameter".into()));
        }
        if !(0.0..=1.0).contains(&a) || !(0.0..=1.0).contains(&b) || !(0.0..=1.0).contains(&c) {
            return Err(Error::InvalidParameters(format!("a, b, c must lie in [0, 1] (got {a}, {b}, {c})")));
        }
        if a + b > 1.0 + DENSITY_TOL {
            return Err(Error::InvalidParameters(format!("a + b = {} exceeds 1", a + b)));
        }
        Ok(())
    }

    /// Whether all nonzero-branch eigenvalues exceed [`INTERIOR_TOL`] and `λ+ ≠ λ-`.
    pub fn is_interior(&self) -> bool {
        let [l0, lm, _] = self.spectrum();
        self.check_ranges().is_ok() && l0 > INTERIOR_TOL && lm > INTERIOR_TOL && self.s() > INTERIOR_TOL
    }
}

/// Assemble and validate `ρ_t`.
pub fn rho_t(p: RhoTParams) -> Result<DensityState> {
    p.check_ranges()?;
    let min = p.spectrum().into_iter().fold(f64::INFINITY, f64::min);
    if min < -DENSITY_TOL {
        return Err(Error::NotPositive { min_eigenvalue: min });
    }
    DensityState::new(p.matrix())
}

/// Entropy of `ρ_t` from the closed-form spectrum.
pub fn rho_t_entropy(p: &RhoTParams) -> f64 {
    -p.spectrum().into_iter().map(xlogx).sum::<f64>()
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessRecord {
    pub params: RhoTParams,
    pub entropy: f64,
    pub concurrence: f64,
    /// `(∂_a, ∂_b, ∂_c, ∂_φ)` of `S`.
    pub d_entropy: [f64; 4],
    /// `(∂_a, ∂_b, ∂_c, ∂_φ)` of `C`.
    pub d_concurrence: [f64; 4],
    pub wedge_norm: f64,
}

/// Euclidean norm of the 2x2 minors of `[u; v]`.
pub fn wedge_norm(u: &[f64], v: &[f64]) -> f64 {
    let mut acc = 0.0;
    for i in 0..u.len() {
        for j in i + 1..u.len() {
            acc += (u[i] * v[j] - u[j] * v[i]).powi(2);
        }
    }
    acc.sqrt()
}

/// Analytic `∂S/∂(a, b, c, φ)` at an interior point.
pub fn entropy_differential(p: &RhoTParams) -> Result<[f64; 4]> {
    if !p.is_interior() {
        return Err(Error::NotInterior(format!("{p:?}")));
    }
    let [l0, lm, lp] = p.spectrum();
    let s = p.s();
    let (g0, gm, gp) = (l0.ln(), lm.ln(), lp.ln());
    let skew = (p.a - p.b) / (2.0 * s) * (gp - gm);
    let mean = 0.5 * (gp + gm);
    Ok([g0 - mean - skew, g0 - mean + skew, -p.c / (2.0 * s) * (gp - gm), 0.0])
}

pub fn witness_differentials(p: RhoTParams) -> Result<WitnessRecord> {
    let rho = rho_t(p)?;
    let d_entropy = entropy_differential(&p)?;
    let d_concurrence = [0.0, 0.0, 1.0, 0.0];
    Ok(WitnessRecord {
        params: p,
        entropy: von_neumann_entropy(&rho),
        concurrence: concurrence_of_matrix(rho.matrix()),
        wedge_norm: wedge_norm(&d_entropy, &d_concurrence),
        d_entropy,
        d_concurrence,
    })
}

/// Entropy as a function on `u*(4)`.
pub struct EntropyFunction;

impl DualFunction for EntropyFunction {
    fn value(&self, xi: &CMat) -> f64 {
        entropy_of_matrix(xi)
    }
}

/// Concurrence as a function on `u*(4)`.
pub struct ConcurrenceFunction;

impl DualFunction for ConcurrenceFunction {
    fn value(&self, xi: &CMat) -> f64 {
        concurrence_of_matrix(xi)
    }
}

/// `{S, C}(ρ_t)` through the Lie-Poisson tensor of `u*(4)` with central-difference gradients.
pub fn poisson_bracket_sc(p: RhoTParams) -> Result<f64> {
    let rho = rho_t(p)?;
    Ok(lie::lie_poisson_bracket(&EntropyFunction, &ConcurrenceFunction, rho.matrix()))
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct LocusPoint {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub wedge_norm: f64,
}

/// `c(a) = √(-4 + 16a - 12a²)`, the closed-form locus on `b = a`.
pub fn locus_closed_form(a: f64) -> Option<f64> {
    let v = -4.0 + 16.0 * a - 12.0 * a * a;
    (v >= 0.0).then(|| v.sqrt())
}

/// Root of `∂S/∂a` along `c` on the slice `b = a`, then `wedge_norm` there.
///
/// On the slice `∂S/∂b = ∂S/∂a` and `∂S/∂φ = 0`, so the root is a zero of
/// `dS ∧ dC`. `∂S/∂a` is increasing in `c`; `None` when it has no sign change.
pub fn independence_point(a: f64) -> Option<LocusPoint> {
    if !(a > 0.0 && a < 0.5) {
        return None;
    }
    let g = |c: f64| entropy_differential(&RhoTParams::new(a, a, c, 0.0)).map(|d| d[0]).ok();
    let mut lo = 1e-6;
    let mut hi = (2.0 * a - 4.0 * INTERIOR_TOL).min(1.0);
    let (glo, ghi) = (g(lo)?, g(hi)?);
    if glo.signum() == ghi.signum() {
        return None;
    }
    while hi - lo > LOCUS_TOL {
        let mid = 0.5 * (lo + hi);
        match g(mid) {
            Some(v) if v.signum() == glo.signum() => lo = mid,
            Some(_) => hi = mid,
            None => return None,
        }
    }
    let c = 0.5 * (lo + hi);
    let rec = witness_differentials(RhoTParams::new(a, a, c, 0.0)).ok()?;
    Some(LocusPoint { a, b: a, c, wedge_norm: rec.wedge_norm })
}

pub fn independence_locus(a_grid: &[f64]) -> Vec<LocusPoint> {
    a_grid.iter().filter_map(|&a| independence_point(a)).collect()
}

/// Golden-section minimizer of `wedge_norm` over `b` at fixed `(a, c)`.
pub fn argmin_wedge_over_b(a: f64, c: f64) -> Option<f64> {
    let f =
        |b: f64| witness_differentials(RhoTParams::new(a, b, c, 0.0)).map(|r| r.wedge_norm).unwrap_or(f64::INFINITY);
    // valid b: c² < 4ab and a + b < 1
    let mut lo = c * c / (4.0 * a) + 1e-9;
    let mut hi = 1.0 - a - 1e-9;
    if lo >= hi {
        return None;
    }
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > 1e-10 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        }
    }
    Some(0.5 * (lo + hi))
}

/// Distance in `(a, b, c)` from a point to the sampled locus curve.
pub fn distance_to_locus(p: &RhoTParams, samples: usize) -> f64 {
    let lo = 1.0 / 3.0;
    let hi = 0.5;
    (0..=samples)
        .filter_map(|k| {
            let a = lo + (hi - lo) * k as f64 / samples as f64;
            locus_closed_form(a).map(|c| ((p.a - a).powi(2) + (p.b - a).powi(2) + (p.c - c).powi(2)).sqrt())
        })
        .fold(f64::INFINITY, f64::min)
}

/// The listed closed form for the entropy of `ρ_t`; it equals `-S`.
pub fn closed_form_entropy(p: &RhoTParams) -> f64 {
    let RhoTParams { a, b, .. } = *p;
    let s = p.s();
    let two_s = -2.0 * (-1.0 + a + b) * (1.0 - a - b).ln()
        + (a + b - s) * (0.5 * (a + b - s)).ln()
        + (a + b + s) * (0.5 * (a + b + s)).ln();
    two_s / 2.0
}

/// Uniform draw of valid `(a, b, c, φ)` with every eigenvalue and the gap above `1e-3`.
pub fn random_interior_params<R: rand::Rng + ?Sized>(rng: &mut R) -> RhoTParams {
    loop {
        let p = RhoTParams::new(rng.random(), rng.random(), rng.random(), rng.random_range(-3.0..3.0));
        if rho_t(p).is_ok() && p.spectrum().iter().all(|&l| l > 1e-3) && p.s() > 1e-3 {
            return p;
        }
    }
}

/// Central-difference `∂S/∂(a, b, c, φ)` from the matrix entropy.
pub fn entropy_differential_fd(p: &RhoTParams, h: f64) -> [f64; 4] {
    let base = DVector::from_vec(vec![p.a, p.b, p.c, p.phi]);
    let s = |v: &DVector<f64>| entropy_of_matrix(&RhoTParams::new(v[0], v[1], v[2], v[3]).matrix());
    let mut out = [0.0; 4];
    for (i, o) in out.iter_mut().enumerate() {
        let mut vp = base.clone();
        let mut vm = base.clone();
        vp[i] += h;
        vm[i] -= h;
        *o = (s(&vp) - s(&vm)) / (2.0 * h);
    }
    out
}
