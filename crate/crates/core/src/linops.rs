//! Finite-dimensional linear algebra over `C^n`.
//!
//! Hermitian diagonalization is delegated to `nalgebra`; everything that needs a
//! spectrum (propagators, square roots, entropies) goes through [`eigh`] so that
//! ordering and eigenvector phases are uniform across the crate.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

/// Tolerance on `|A - A†|` accepted by [`HermitianOperator::new`].
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Tolerance for density-matrix checks and eigenvalue clipping.
pub const DENSITY_TOL: f64 = 1e-10;

pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn hermiticity_defect(m: &CMat) -> f64 {
    max_abs(&(m - m.adjoint()))
}

fn check_square(m: &CMat) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(())
}

/// A Hermitian `n x n` matrix, validated on construction.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    mat: CMat,
}

impl HermitianOperator {
    pub fn new(mat: CMat) -> Result<Self> {
        check_square(&mat)?;
        let deviation = hermiticity_defect(&mat);
        if deviation > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self { mat })
    }

    /// Hermitian part `(M + M†)/2` of an arbitrary square matrix.
    pub fn hermitian_part(mat: &CMat) -> Result<Self> {
        check_square(mat)?;
        Ok(Self { mat: (mat + mat.adjoint()).scale(0.5) })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d = DVector::from_iterator(diag.len(), diag.iter().map(|&x| c(x, 0.0)));
        Self { mat: DMatrix::from_diagonal(&d) }
    }

    pub fn identity(n: usize) -> Self {
        Self { mat: CMat::identity(n, n) }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn into_matrix(self) -> CMat {
        self.mat
    }

    /// `<psi|A|psi>` (real up to rounding).
    pub fn expectation(&self, psi: &CVec) -> f64 {
        psi.dotc(&(&self.mat * psi)).re
    }

    pub fn eig(&self) -> Eigh {
        eigh(&self.mat)
    }
}

/// Spectral decomposition `A = V diag(values) V†`, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct Eigh {
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns.
    pub vectors: CMat,
}

impl Eigh {
    /// `V diag(f(values)) V†`.
    pub fn apply<F: Fn(f64) -> Complex64>(&self, f: F) -> CMat {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for (j, &l) in self.values.iter().enumerate() {
            let fl = f(l);
            for i in 0..n {
                scaled[(i, j)] *= fl;
            }
        }
        scaled * self.vectors.adjoint()
    }

    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }
}

/// Diagonalize the Hermitian part of `m`.
///
/// Eigenvalues come out ascending; the first component of each eigenvector
/// above `1e-10` in modulus is rotated onto the positive real axis.
pub fn eigh(m: &CMat) -> Eigh {
    let sym = (m + m.adjoint()).scale(0.5);
    let n = sym.nrows();
    let dec = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| dec.eigenvalues[a].total_cmp(&dec.eigenvalues[b]));
    let mut vectors = CMat::zeros(n, n);
    let mut values = Vec::with_capacity(n);
    for (j, &k) in order.iter().enumerate() {
        values.push(dec.eigenvalues[k]);
        let col = dec.eigenvectors.column(k);
        let phase = col.iter().find(|z| z.norm() > 1e-10).map(|z| z.conj() / z.norm()).unwrap_or(c(1.0, 0.0));
        for i in 0..n {
            vectors[(i, j)] = col[i] * phase;
        }
    }
    Eigh { values, vectors }
}

pub fn eig_herm(a: &HermitianOperator) -> Eigh {
    eigh(a.matrix())
}

/// `U(t) = exp(-i H t / hbar)`.
pub fn propagator(h: &HermitianOperator, t: f64, hbar: f64) -> CMat {
    h.eig().apply(|l| (-I * (l * t / hbar)).exp())
}

/// Schrödinger evolution `psi(t) = exp(-i H t / hbar) psi0`.
pub fn evolve(h: &HermitianOperator, psi: &StateVector, t: f64, hbar: f64) -> Result<StateVector> {
    if psi.dim() != h.dim() {
        return Err(Error::DimensionMismatch { expected: h.dim(), got: psi.dim() });
    }
    Ok(StateVector::new(propagator(h, t, hbar) * psi.amplitudes()))
}

/// Principal square root of a positive semidefinite Hermitian matrix.
pub fn matrix_sqrt_psd(m: &CMat) -> Result<CMat> {
    let e = eigh(m);
    if e.min() < -DENSITY_TOL {
        return Err(Error::NotPositive { min_eigenvalue: e.min() });
    }
    Ok(e.apply(|l| c(l.max(0.0).sqrt(), 0.0)))
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

pub fn anticommutator(a: &CMat, b: &CMat) -> CMat {
    a * b + b * a
}

/// Hilbert-Schmidt inner product `Tr(A† B)`.
pub fn trace_inner(a: &CMat, b: &CMat) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// `Tr(A B)` without forming the product.
pub fn trace_product(a: &CMat, b: &CMat) -> Complex64 {
    let n = a.nrows();
    let mut acc = c(0.0, 0.0);
    for i in 0..n {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

pub fn unitarity_defect(u: &CMat) -> f64 {
    let n = u.nrows();
    max_abs(&(u.adjoint() * u - CMat::identity(n, n)))
}

/// Which factor of `C^{d1} ⊗ C^{d2}` survives a partial trace.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    First,
    Second,
}

/// Partial trace of an operator on `C^{d1} ⊗ C^{d2}` keeping `keep`.
pub fn partial_trace(m: &CMat, d1: usize, d2: usize, keep: Subsystem) -> Result<CMat> {
    let n = d1 * d2;
    if m.nrows() != n || m.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, got: m.nrows() });
    }
    let out = match keep {
        Subsystem::First => CMat::from_fn(d1, d1, |i, j| (0..d2).map(|k| m[(i * d2 + k, j * d2 + k)]).sum()),
        Subsystem::Second => CMat::from_fn(d2, d2, |i, j| (0..d1).map(|k| m[(k * d2 + i, k * d2 + j)]).sum()),
    };
    Ok(out)
}

/// A (possibly unnormalized) vector of `C^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amps: CVec,
}

impl StateVector {
    pub fn new(amps: CVec) -> Self {
        Self { amps }
    }

    pub fn from_slice(amps: &[Complex64]) -> Self {
        Self { amps: CVec::from_column_slice(amps) }
    }

    /// Normalized copy; fails on the zero vector.
    pub fn normalized(amps: CVec) -> Result<Self> {
        let n = amps.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::ZeroNorm);
        }
        Ok(Self { amps: amps.unscale(n) })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &CVec {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.norm_squared()
    }

    /// `|psi><psi|`.
    pub fn projector(&self) -> CMat {
        &self.amps * self.amps.adjoint()
    }
}

/// A density matrix: Hermitian, positive semidefinite, unit trace.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityState {
    mat: CMat,
}

impl DensityState {
    pub fn new(mat: CMat) -> Result<Self> {
        check_square(&mat)?;
        let deviation = hermiticity_defect(&mat);
        if deviation > DENSITY_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        let trace = mat.trace();
        if (trace.re - 1.0).abs() > DENSITY_TOL || trace.im.abs() > DENSITY_TOL {
            return Err(Error::TraceNotOne { trace: trace.re });
        }
        let min_eigenvalue = eigh(&mat).min();
        if min_eigenvalue < -DENSITY_TOL {
            return Err(Error::NotPositive { min_eigenvalue });
        }
        Ok(Self { mat })
    }

    pub fn from_pure(psi: &StateVector) -> Result<Self> {
        let psi = StateVector::normalized(psi.amplitudes().clone())?;
        Ok(Self { mat: psi.projector() })
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    /// Eigenvalues (ascending) with tiny negative values clipped to zero.
    pub fn spectrum(&self) -> Vec<f64> {
        eigh(&self.mat).values.into_iter().map(|l| l.max(0.0)).collect()
    }
}

/// Random Hermitian matrix with i.i.d. Gaussian entries (GUE-like scaling).
pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> HermitianOperator {
    let g = CMat::from_fn(n, n, |_, _| c(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    HermitianOperator::hermitian_part(&g).expect("square")
}

/// Random complex vector with Gaussian components (not normalized).
pub fn random_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CVec {
    CVec::from_fn(n, |_, _| c(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

/// Haar-distributed unit vector.
pub fn random_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> StateVector {
    StateVector::normalized(random_vector(n, rng)).expect("nonzero with probability one")
}

/// Random unitary from the eigenvectors of a random Hermitian matrix.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMat {
    let h = random_hermitian(n, rng);
    propagator(&h, 1.0, 1.0)
}

/// Random full-rank density matrix `G G† / Tr(G G†)`.
pub fn random_density<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DensityState {
    let g = CMat::from_fn(n, n, |_, _| c(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let m = &g * g.adjoint();
    let t = m.trace().re;
    let m = m.unscale(t);
    DensityState { mat: (&m + m.adjoint()).scale(0.5) }
}

pub fn pauli() -> [CMat; 4] {
    let z = c(0.0, 0.0);
    let o = c(1.0, 0.0);
    [
        CMat::from_row_slice(2, 2, &[o, z, z, o]),
        CMat::from_row_slice(2, 2, &[z, o, o, z]),
        CMat::from_row_slice(2, 2, &[z, -I, I, z]),
        CMat::from_row_slice(2, 2, &[o, z, z, -o]),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rejects_non_hermitian() {
        let m = CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(HermitianOperator::new(m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn rejects_non_square_and_nan() {
        assert!(matches!(HermitianOperator::new(CMat::zeros(2, 3)), Err(Error::NotSquare { .. })));
        let mut m = CMat::identity(2, 2);
        m[(0, 0)] = c(f64::NAN, 0.0);
        assert!(matches!(HermitianOperator::new(m), Err(Error::NonFinite)));
    }

    #[test]
    fn pauli_z_spectrum() {
        let z = HermitianOperator::new(pauli()[3].clone()).unwrap();
        let e = z.eig();
        assert_eq!(e.values, vec![-1.0, 1.0]);
        assert_relative_eq!(e.vectors[(1, 0)].re, 1.0);
        assert_relative_eq!(e.vectors[(0, 1)].re, 1.0);
    }

    #[test]
    fn eigenvector_phase_convention() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = random_hermitian(5, &mut rng);
        let e = h.eig();
        for j in 0..5 {
            let first = e.vectors.column(j).iter().copied().find(|z| z.norm() > 1e-10).unwrap();
            assert!(first.im.abs() < 1e-14 && first.re > 0.0);
        }
    }

    #[test]
    fn identity_partial_trace() {
        let id = CMat::identity(6, 6);
        let r = partial_trace(&id, 2, 3, Subsystem::First).unwrap();
        assert_relative_eq!(max_abs(&(r - CMat::identity(2, 2).scale(3.0))), 0.0);
        let r = partial_trace(&id, 2, 3, Subsystem::Second).unwrap();
        assert_relative_eq!(max_abs(&(r - CMat::identity(3, 3).scale(2.0))), 0.0);
    }

    #[test]
    fn partial_trace_of_product_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_density(2, &mut rng);
        let b = random_density(3, &mut rng);
        let ab = kron(a.matrix(), b.matrix());
        let ra = partial_trace(&ab, 2, 3, Subsystem::First).unwrap();
        let rb = partial_trace(&ab, 2, 3, Subsystem::Second).unwrap();
        assert!(max_abs(&(ra - a.matrix())) < 1e-14);
        assert!(max_abs(&(rb - b.matrix())) < 1e-14);
    }

    #[test]
    fn evolve_pauli_x() {
        let x = HermitianOperator::new(pauli()[1].clone()).unwrap();
        let psi = StateVector::from_slice(&[c(1.0, 0.0), c(0.0, 0.0)]);
        let out = evolve(&x, &psi, std::f64::consts::FRAC_PI_2, 1.0).unwrap();
        assert!((out.amplitudes()[0]).norm() < 1e-15);
        assert!((out.amplitudes()[1] - c(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn evolve_matches_taylor_series() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let h = random_hermitian(4, &mut rng);
        let psi = random_state(4, &mut rng);
        let t = 0.3;
        let hbar = 0.7;
        let gen = h.matrix().scale(t / hbar) * (-I);
        let mut term = psi.amplitudes().clone();
        let mut acc = term.clone();
        for k in 1..60 {
            term = (&gen * term).unscale(k as f64);
            acc += &term;
        }
        let out = evolve(&h, &psi, t, hbar).unwrap();
        assert!((out.amplitudes() - acc).norm() < 1e-12);
    }

    #[test]
    fn density_validation() {
        let bad_trace = CMat::identity(2, 2);
        assert!(matches!(DensityState::new(bad_trace), Err(Error::TraceNotOne { .. })));
        let neg = CMat::from_row_slice(2, 2, &[c(1.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-0.5, 0.0)]);
        assert!(matches!(DensityState::new(neg), Err(Error::NotPositive { .. })));
        assert!(StateVector::normalized(CVec::zeros(3)).is_err());
    }

    #[test]
    fn sqrt_rejects_negative() {
        let m = CMat::from_diagonal(&CVec::from_vec(vec![c(1.0, 0.0), c(-1e-3, 0.0)]));
        assert!(matrix_sqrt_psd(&m).is_err());
    }

    proptest! {
        #[test]
        fn eig_reconstructs(seed in any::<u64>(), n in 1usize..8) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let h = random_hermitian(n, &mut rng);
            let e = h.eig();
            let rec = e.apply(|l| c(l, 0.0));
            prop_assert!(max_abs(&(rec - h.matrix())) < 1e-12 * (1.0 + max_abs(h.matrix())));
            prop_assert!(unitarity_defect(&e.vectors) < 1e-12);
            prop_assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        }

        #[test]
        fn evolution_is_unitary(seed in any::<u64>(), t in -3.0f64..3.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let h = random_hermitian(5, &mut rng);
            let u = propagator(&h, t, 1.0);
            prop_assert!(unitarity_defect(&u) < 1e-12);
        }

        #[test]
        fn sqrt_squares_back(seed in any::<u64>(), n in 1usize..6) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let rho = random_density(n, &mut rng);
            let s = matrix_sqrt_psd(rho.matrix()).unwrap();
            prop_assert!(max_abs(&(&s * &s - rho.matrix())) < 1e-12);
        }

        #[test]
        fn partial_trace_preserves_trace(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let rho = random_density(6, &mut rng);
            let r = partial_trace(rho.matrix(), 3, 2, Subsystem::Second).unwrap();
            prop_assert!((r.trace() - c(1.0, 0.0)).norm() < 1e-12);
            prop_assert!(DensityState::new(r).is_ok());
        }
    }
}
