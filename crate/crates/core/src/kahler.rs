//! Kähler structure on the realified Hilbert space `C^n = R^{2n}`.
//!
//! A point is `x = (q_1..q_n, p_1..p_n)` with `z = q + i p`. Covectors use the
//! same ordering (`dq` block, then `dp` block). Contravariant tensors are stored
//! as `2n x 2n` matrices acting on covector components.
//!
//! Conventions fixed here:
//! * `G(df, dg) = f_q g_q + f_p g_p`
//! * `Λ(df, dg) = f_p g_q - f_q g_p`, so `X_f = f_p ∂_q - f_q ∂_p`
//! * `J ∂_q = ∂_p`, `J ∂_p = -∂_q`
//! * `Δ = q ∂_q + p ∂_p` (dilation) and `Γ = J Δ = q ∂_p - p ∂_q` (phase)
//!
//! With these, `G(df_A, df_B) = 2 f_{AB+BA}` and `Λ(df_A, df_B) = -2 f_{-i[A,B]}`,
//! which fixes the coefficients in [`star_hilbert`] and [`star_projective`].

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linops::{c, CMat, CVec, HermitianOperator, StateVector};

/// Coefficient of `G` in the Hilbert-space star product.
pub const STAR_G: f64 = 0.25;
/// Coefficient of `Λ` in the Hilbert-space star product.
pub const STAR_LAMBDA: Complex64 = Complex64 { re: 0.0, im: -0.25 };
/// `G̃(e_A, e_A) = VARIANCE_KAPPA (e_{A²} - e_A²)`.
pub const VARIANCE_KAPPA: f64 = 4.0;
/// The flow of `HAMILTONIAN_FLOW_SCALE / hbar * X_{f_H}` is Schrödinger evolution.
pub const HAMILTONIAN_FLOW_SCALE: f64 = 0.5;
/// Residual below which a quadratic function counts as Kählerian.
pub const KAHLER_TOL: f64 = 1e-9;
/// Residual threshold for the finite-difference Kähler test.
pub const KAHLER_FD_TOL: f64 = 1e-6;

/// Point of the real chart.
#[derive(Clone, Debug, PartialEq)]
pub struct ChartPoint {
    x: DVector<f64>,
}

impl ChartPoint {
    pub fn new(x: DVector<f64>) -> Result<Self> {
        if !x.len().is_multiple_of(2) || x.is_empty() {
            return Err(Error::InvalidParameters(format!("chart vector of odd length {}", x.len())));
        }
        Ok(Self { x })
    }

    pub fn from_state(psi: &StateVector) -> Self {
        let z = psi.amplitudes();
        let n = z.len();
        let x = DVector::from_fn(2 * n, |i, _| if i < n { z[i].re } else { z[i - n].im });
        Self { x }
    }

    pub fn to_state(&self) -> StateVector {
        let n = self.n();
        StateVector::new(CVec::from_fn(n, |i, _| c(self.x[i], self.x[i + n])))
    }

    /// Complex dimension.
    pub fn n(&self) -> usize {
        self.x.len() / 2
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.x
    }

    pub fn z(&self) -> CVec {
        self.to_state().amplitudes().clone()
    }

    /// `N = <psi|psi> = |x|²`.
    pub fn norm_sqr(&self) -> f64 {
        self.x.norm_squared()
    }

    /// Dilation field `Δ`.
    pub fn dilation(&self) -> DVector<f64> {
        self.x.clone()
    }

    /// Phase field `Γ = J Δ = q ∂_p - p ∂_q`.
    pub fn phase(&self) -> DVector<f64> {
        complex_structure(self.n()) * &self.x
    }
}

/// Contravariant metric `G` (identity in these coordinates).
pub fn metric(n: usize) -> DMatrix<f64> {
    DMatrix::identity(2 * n, 2 * n)
}

/// Poisson tensor `Λ` with `Λ(α, β) = αᵀ Λ β`.
pub fn poisson(n: usize) -> DMatrix<f64> {
    let mut l = DMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        l[(n + k, k)] = 1.0;
        l[(k, n + k)] = -1.0;
    }
    l
}

/// Complex structure `J` acting on tangent vectors.
pub fn complex_structure(n: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        j[(n + k, k)] = 1.0;
        j[(k, n + k)] = -1.0;
    }
    j
}

pub fn eval_tensor(t: &DMatrix<f64>, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    a.dot(&(t * b))
}

pub fn g(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    a.dot(b)
}

pub fn lambda(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    let n = a.len() / 2;
    (0..n).map(|k| a[n + k] * b[k] - a[k] * b[n + k]).sum()
}

/// `<df, dg> = G(df, dg) + i Λ(df, dg)` computed from the complex gradients
/// `w = ∂_q f + i ∂_p f` as `Σ w_f conj(w_g)`.
pub fn hermitian_pairing(a: &DVector<f64>, b: &DVector<f64>) -> Complex64 {
    let n = a.len() / 2;
    (0..n).map(|k| c(a[k], a[n + k]) * c(b[k], b[n + k]).conj()).sum()
}

/// Hamiltonian vector field `X_f = Λ(df, ·)`.
pub fn hamiltonian_field(df: &DVector<f64>) -> DVector<f64> {
    let n = df.len() / 2;
    poisson(n).transpose() * df
}

/// Gradient vector field `G(df, ·)`.
pub fn gradient_field(df: &DVector<f64>) -> DVector<f64> {
    df.clone()
}

/// `f_A(psi) = <psi|A|psi>` for any square `A`.
pub fn f_value(a: &CMat, x: &ChartPoint) -> Complex64 {
    let z = x.z();
    z.dotc(&(a * &z))
}

/// `e_A(psi) = <psi|A|psi> / <psi|psi>`.
pub fn e_value(a: &CMat, x: &ChartPoint) -> Complex64 {
    f_value(a, x) / x.norm_sqr()
}

/// Analytic `df_A = (2 Re(Az), 2 Im(Az))` for Hermitian `A`.
pub fn df(a: &HermitianOperator, x: &ChartPoint) -> DVector<f64> {
    let az = a.matrix() * x.z();
    let n = x.n();
    DVector::from_fn(2 * n, |i, _| if i < n { 2.0 * az[i].re } else { 2.0 * az[i - n].im })
}

/// Analytic `de_A = (df_A - e_A dN) / N`.
pub fn de(a: &HermitianOperator, x: &ChartPoint) -> DVector<f64> {
    let n = x.norm_sqr();
    let e = e_value(a.matrix(), x).re;
    (df(a, x) - x.coords().scale(2.0 * e)).unscale(n)
}

/// Central-difference gradient of a scalar function on the chart.
pub fn fd_gradient<F: Fn(&DVector<f64>) -> f64>(f: F, x: &DVector<f64>, h: f64) -> DVector<f64> {
    DVector::from_fn(x.len(), |i, _| {
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[i] += h;
        xm[i] -= h;
        (f(&xp) - f(&xm)) / (2.0 * h)
    })
}

/// Central-difference Hessian.
pub fn fd_hessian<F: Fn(&DVector<f64>) -> f64>(f: F, x: &DVector<f64>, h: f64) -> DMatrix<f64> {
    let d = x.len();
    let mut hess = DMatrix::zeros(d, d);
    for i in 0..d {
        for j in i..d {
            let mut acc = 0.0;
            for (si, sj, w) in [(1.0, 1.0, 1.0), (1.0, -1.0, -1.0), (-1.0, 1.0, -1.0), (-1.0, -1.0, 1.0)] {
                let mut y = x.clone();
                y[i] += si * h;
                y[j] += sj * h;
                acc += w * f(&y);
            }
            hess[(i, j)] = acc / (4.0 * h * h);
            hess[(j, i)] = hess[(i, j)];
        }
    }
    hess
}

/// `f_A ⋆ f_B = ¼ G(df_A, df_B) - (i/4) Λ(df_A, df_B)`, equal to `f_{AB}`.
pub fn star_hilbert(a: &HermitianOperator, b: &HermitianOperator, x: &ChartPoint) -> Complex64 {
    let (da, db) = (df(a, x), df(b, x));
    STAR_G * g(&da, &db) + STAR_LAMBDA * lambda(&da, &db)
}

/// `e_A ⋆ e_B = e_A e_B + ¼ G_P(de_A, de_B) - (i/4) Λ_P(de_A, de_B)`, equal to `e_{AB}`.
pub fn star_projective(a: &HermitianOperator, b: &HermitianOperator, x: &ChartPoint) -> Complex64 {
    let t = ProjectiveTensors::at(x);
    let (da, db) = (de(a, x), de(b, x));
    let ea = e_value(a.matrix(), x).re;
    let eb = e_value(b.matrix(), x).re;
    c(ea * eb, 0.0) + STAR_G * eval_tensor(&t.g_p, &da, &db) + STAR_LAMBDA * eval_tensor(&t.lambda_p, &da, &db)
}

/// `G̃(e_A, e_A) = G_P(de_A, de_A)`, the scaled variance of `A`.
pub fn variance_form(a: &HermitianOperator, x: &ChartPoint) -> f64 {
    let d = de(a, x);
    x.norm_sqr() * g(&d, &d)
}

/// Conformally rescaled and horizontal tensors at a point.
///
/// `G_P = N G`, `Λ_P = N Λ`, `G_H = N G - Δ⊗Δ - Γ⊗Γ`, `Λ_H = N Λ + Δ⊗Γ - Γ⊗Δ`.
/// `G_H` and `Λ_H` annihilate the vertical covectors `θ = q dq + p dp` and
/// `ω = q dp - p dq`.
#[derive(Clone, Debug)]
pub struct ProjectiveTensors {
    pub norm_sqr: f64,
    pub g_p: DMatrix<f64>,
    pub lambda_p: DMatrix<f64>,
    pub g_h: DMatrix<f64>,
    pub lambda_h: DMatrix<f64>,
}

impl ProjectiveTensors {
    pub fn at(x: &ChartPoint) -> Self {
        let n = x.n();
        let nn = x.norm_sqr();
        let d = x.dilation();
        let gm = x.phase();
        let g_p = metric(n).scale(nn);
        let lambda_p = poisson(n).scale(nn);
        let g_h = &g_p - &d * d.transpose() - &gm * gm.transpose();
        let lambda_h = &lambda_p + &d * gm.transpose() - &gm * d.transpose();
        Self { norm_sqr: nn, g_p, lambda_p, g_h, lambda_h }
    }
}

/// Vertical covectors `(θ, ω)`.
pub fn vertical_covectors(x: &ChartPoint) -> (DVector<f64>, DVector<f64>) {
    (x.dilation(), x.phase())
}

/// The four quadratic functions of a qubit in real coordinates.
///
/// Equal to `(f_{σ0}, f_{σ1}, f_{σ2}, f_{σ3})`; note the factor 2 on the
/// off-diagonal polynomials.
pub fn qubit_quadratics(x: &ChartPoint) -> Result<[f64; 4]> {
    if x.n() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: x.n() });
    }
    let v = x.coords();
    let (q1, q2, p1, p2) = (v[0], v[1], v[2], v[3]);
    Ok([
        q1 * q1 + p1 * p1 + q2 * q2 + p2 * p2,
        2.0 * (q1 * q2 + p1 * p2),
        2.0 * (q1 * p2 - p1 * q2),
        q1 * q1 + p1 * p1 - q2 * q2 - p2 * p2,
    ])
}

/// Real quadratic function `f(x) = xᵀ S x` on the chart.
#[derive(Clone, Debug)]
pub struct QuadraticForm {
    s: DMatrix<f64>,
}

impl QuadraticForm {
    /// `f_A` for Hermitian `A`.
    pub fn from_hermitian(a: &HermitianOperator) -> Self {
        let m = a.matrix();
        let n = m.nrows();
        let s = DMatrix::from_fn(2 * n, 2 * n, |i, j| {
            let (bi, bj) = (i / n, j / n);
            let z = m[(i % n, j % n)];
            match (bi, bj) {
                (0, 0) | (1, 1) => z.re,
                (0, 1) => -z.im,
                _ => z.im,
            }
        });
        Self { s }
    }

    /// `xᵀ M x` for an arbitrary real `2n x 2n` matrix.
    pub fn from_real_matrix(m: &DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() || !m.nrows().is_multiple_of(2) {
            return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
        }
        Ok(Self { s: (m + m.transpose()).scale(0.5) })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.s
    }

    pub fn value(&self, x: &DVector<f64>) -> f64 {
        x.dot(&(&self.s * x))
    }

    /// Matrix `K` of the linear Hamiltonian field, `X_f(x) = K x`.
    pub fn hamiltonian_matrix(&self) -> DMatrix<f64> {
        let n = self.s.nrows() / 2;
        poisson(n).transpose() * self.s.scale(2.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KahlerTest {
    pub kahlerian: bool,
    /// `max |K + Kᵀ|`, the Killing defect of `X_f` for the flat metric.
    pub residual: f64,
}

/// Algebraic test: the linear field `K x` is Killing iff `K + Kᵀ = 0`.
pub fn is_kahlerian(f: &QuadraticForm) -> KahlerTest {
    let k = f.hamiltonian_matrix();
    let residual = (&k + k.transpose()).amax();
    KahlerTest { kahlerian: residual <= KAHLER_TOL, residual }
}

/// Finite-difference test for any smooth function: the Jacobian of
/// `X_f = Λ(df)` must be antisymmetric at `x`.
pub fn is_kahlerian_fd<F: Fn(&DVector<f64>) -> f64>(f: F, x: &DVector<f64>) -> KahlerTest {
    let n = x.len() / 2;
    let hess = fd_hessian(f, x, 1e-4);
    let jac = poisson(n).transpose() * hess;
    let residual = (&jac + jac.transpose()).amax();
    KahlerTest { kahlerian: residual <= KAHLER_FD_TOL, residual }
}

/// Schrödinger vector field `(1 / 2ħ) X_{f_H}`.
pub fn schrodinger_field(h: &HermitianOperator, hbar: f64, x: &ChartPoint) -> DVector<f64> {
    hamiltonian_field(&df(h, x)).scale(HAMILTONIAN_FLOW_SCALE / hbar)
}

/// Classical RK4 integration of an autonomous field on the chart.
pub fn integrate_rk4<F: Fn(&DVector<f64>) -> DVector<f64>>(
    field: F,
    x0: &DVector<f64>,
    t: f64,
    steps: usize,
) -> DVector<f64> {
    let dt = t / steps as f64;
    let mut x = x0.clone();
    for _ in 0..steps {
        let k1 = field(&x);
        let k2 = field(&(&x + k1.scale(dt / 2.0)));
        let k3 = field(&(&x + k2.scale(dt / 2.0)));
        let k4 = field(&(&x + k3.scale(dt)));
        x += (k1 + k2.scale(2.0) + k3.scale(2.0) + k4).scale(dt / 6.0);
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linops::{anticommutator, commutator, evolve, pauli, random_hermitian, random_state, random_vector, I};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn point(seed: u64, n: usize) -> (ChaCha8Rng, ChartPoint) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi = StateVector::new(random_vector(n, &mut rng));
        (rng, ChartPoint::from_state(&psi))
    }

    fn herm(m: CMat) -> HermitianOperator {
        HermitianOperator::new(m).unwrap()
    }

    #[test]
    fn tensor_identities() {
        let n = 3;
        let j = complex_structure(n);
        let l = poisson(n);
        let id = DMatrix::<f64>::identity(2 * n, 2 * n);
        assert_eq!(&j * &j, -&id);
        assert_eq!(&l + l.transpose(), DMatrix::zeros(2 * n, 2 * n));
        assert_eq!(j.transpose() * metric(n) * &j, metric(n));
        assert_eq!(l, metric(n) * &j);
    }

    #[test]
    fn phase_field_generates_phase_rotation() {
        let (_, x) = point(1, 3);
        let theta = 1e-6;
        let rotated = ChartPoint::from_state(&StateVector::new(x.z() * (I * theta).exp()));
        let fd = (rotated.coords() - x.coords()).unscale(theta);
        assert!((fd - x.phase()).amax() < 1e-5);
    }

    #[test]
    fn vertical_contractions() {
        let (_, x) = point(2, 3);
        let (theta, omega) = vertical_covectors(&x);
        let nn = x.norm_sqr();
        assert!((theta.dot(&x.dilation()) - nn).abs() < 1e-12);
        assert!(theta.dot(&x.phase()).abs() < 1e-12);
        assert!((omega.dot(&x.phase()) - nn).abs() < 1e-12);
        assert!(omega.dot(&x.dilation()).abs() < 1e-12);
    }

    #[test]
    fn df_matches_finite_differences() {
        let (mut rng, x) = point(4, 3);
        let a = random_hermitian(3, &mut rng);
        let fd = fd_gradient(|y| f_value(a.matrix(), &ChartPoint::new(y.clone()).unwrap()).re, x.coords(), 1e-6);
        assert!((fd - df(&a, &x)).amax() < 1e-7);
        let fd = fd_gradient(|y| e_value(a.matrix(), &ChartPoint::new(y.clone()).unwrap()).re, x.coords(), 1e-6);
        assert!((fd - de(&a, &x)).amax() < 1e-7);
    }

    // Oracle: least-squares fit of (α, β) in α G + β Λ = f_{AB} over random samples.
    #[test]
    fn star_coefficients_calibrated() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for _ in 0..20 {
            let a = random_hermitian(3, &mut rng);
            let b = random_hermitian(3, &mut rng);
            let x = ChartPoint::from_state(&StateVector::new(random_vector(3, &mut rng)));
            let (da, db) = (df(&a, &x), df(&b, &x));
            let target = f_value(&(a.matrix() * b.matrix()), &x);
            rows.push([g(&da, &db), lambda(&da, &db)]);
            rhs.push(target);
        }
        let m = DMatrix::from_fn(rows.len(), 2, |i, j| rows[i][j]);
        let re = DVector::from_iterator(rhs.len(), rhs.iter().map(|z| z.re));
        let im = DVector::from_iterator(rhs.len(), rhs.iter().map(|z| z.im));
        let svd = m.svd(true, true);
        let cre = svd.solve(&re, 1e-14).unwrap();
        let cim = svd.solve(&im, 1e-14).unwrap();
        assert!((cre[0] - STAR_G).abs() < 1e-12 && cre[1].abs() < 1e-12);
        assert!(cim[0].abs() < 1e-12 && (cim[1] - STAR_LAMBDA.im).abs() < 1e-12);
    }

    #[test]
    fn printed_half_coefficients_give_reversed_product() {
        let (mut rng, x) = point(12, 2);
        let a = random_hermitian(2, &mut rng);
        let b = random_hermitian(2, &mut rng);
        let (da, db) = (df(&a, &x), df(&b, &x));
        let printed = 0.5 * g(&da, &db) + 0.5 * I * lambda(&da, &db);
        let ba = f_value(&(b.matrix() * a.matrix()), &x);
        assert!((printed - ba * 2.0).norm() < 1e-10);
    }

    #[test]
    fn bracket_operator_identities() {
        let (mut rng, x) = point(5, 4);
        let a = random_hermitian(4, &mut rng);
        let b = random_hermitian(4, &mut rng);
        let (da, db) = (df(&a, &x), df(&b, &x));
        let jordan = f_value(&anticommutator(a.matrix(), b.matrix()), &x).re;
        let lie = f_value(&(commutator(a.matrix(), b.matrix()) * (-I)), &x).re;
        assert!((g(&da, &db) - 2.0 * jordan).abs() < 1e-10);
        assert!((lambda(&da, &db) + 2.0 * lie).abs() < 1e-10);
    }

    #[test]
    fn qubit_example_values() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi = StateVector::from_slice(&[c(s, 0.0), c(s, 0.0)]);
        let v = qubit_quadratics(&ChartPoint::from_state(&psi)).unwrap();
        let expect = [1.0, 1.0, 0.0, 0.0];
        for k in 0..4 {
            assert!((v[k] - expect[k]).abs() < 1e-15);
        }
    }

    #[test]
    fn qubit_quadratics_match_expectations() {
        let p = pauli();
        for seed in 0..50 {
            let (_, x) = point(100 + seed, 2);
            let v = qubit_quadratics(&x).unwrap();
            for k in 0..4 {
                assert!((v[k] - f_value(&p[k], &x).re).abs() < 1e-12);
            }
        }
    }

    // G(df_a, df_b) = 2 f_{{σa,σb}}: the four quadratics close under the Jordan bracket.
    #[test]
    fn qubit_jordan_closure() {
        let p = pauli();
        let (_, x) = point(21, 2);
        let f = qubit_quadratics(&x).unwrap();
        for a in 0..4 {
            for b in 0..4 {
                let (da, db) = (df(&herm(p[a].clone()), &x), df(&herm(p[b].clone()), &x));
                let expect = match (a, b) {
                    (0, k) | (k, 0) => 4.0 * f[k],
                    (j, k) if j == k => 4.0 * f[0],
                    _ => 0.0,
                };
                assert!((g(&da, &db) - expect).abs() < 1e-12, "{a}{b}");
            }
        }
    }

    #[test]
    fn identity_generates_vertical_fields() {
        let (_, x) = point(6, 3);
        let one = HermitianOperator::identity(3);
        let d = df(&one, &x);
        assert!((gradient_field(&d) - x.dilation().scale(2.0)).amax() < 1e-14);
        assert!((hamiltonian_field(&d) + x.phase().scale(2.0)).amax() < 1e-14);
    }

    #[test]
    fn identity_is_in_kernel_of_projective_metric() {
        let (mut rng, x) = point(7, 3);
        let one = HermitianOperator::identity(3);
        let a = random_hermitian(3, &mut rng);
        assert!(variance_form(&one, &x).abs() < 1e-12);
        let t = ProjectiveTensors::at(&x);
        assert!(eval_tensor(&t.g_p, &de(&one, &x), &de(&a, &x)).abs() < 1e-12);
    }

    #[test]
    fn kahler_examples() {
        let p = pauli();
        assert!(is_kahlerian(&QuadraticForm::from_hermitian(&herm(p[1].clone()))).kahlerian);
        // f = q1² - p1²: a squeeze, not an isometry.
        let mut m = DMatrix::zeros(4, 4);
        m[(0, 0)] = 1.0;
        m[(2, 2)] = -1.0;
        let t = is_kahlerian(&QuadraticForm::from_real_matrix(&m).unwrap());
        assert!(!t.kahlerian && t.residual > 1.0);
        // Real-coordinate form of the non-normal matrix [[1,1],[0,1]] acting on (q1, q2).
        let mut nn = DMatrix::zeros(4, 4);
        nn[(0, 0)] = 1.0;
        nn[(0, 1)] = 1.0;
        nn[(1, 1)] = 1.0;
        assert!(!is_kahlerian(&QuadraticForm::from_real_matrix(&nn).unwrap()).kahlerian);
    }

    #[test]
    fn kahler_fd_agrees() {
        let (_, x) = point(8, 2);
        let f1 = QuadraticForm::from_hermitian(&herm(pauli()[1].clone()));
        assert!(is_kahlerian_fd(|y| f1.value(y), x.coords()).kahlerian);
        let cubic = is_kahlerian_fd(|y| y[0].powi(3), &DVector::from_vec(vec![0.7, 0.1, -0.2, 0.4]));
        assert!(!cubic.kahlerian);
    }

    #[test]
    fn hamiltonian_flow_is_schrodinger() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let h = random_hermitian(3, &mut rng);
        let psi = random_state(3, &mut rng);
        let hbar = 0.8;
        let x0 = ChartPoint::from_state(&psi);
        let xt = integrate_rk4(
            |y| schrodinger_field(&h, hbar, &ChartPoint::new(y.clone()).unwrap()),
            x0.coords(),
            0.9,
            2000,
        );
        let exact = ChartPoint::from_state(&evolve(&h, &psi, 0.9, hbar).unwrap());
        assert!((xt - exact.coords()).amax() < 1e-10);
    }

    proptest! {
        #[test]
        fn star_reproduces_operator_product(seed in any::<u64>(), n in 1usize..5) {
            let (mut rng, x) = point(seed, n);
            let a = random_hermitian(n, &mut rng);
            let b = random_hermitian(n, &mut rng);
            let scale = 1.0 + x.norm_sqr() * (a.matrix().norm() * b.matrix().norm());
            let lhs = star_hilbert(&a, &b, &x);
            let rhs = f_value(&(a.matrix() * b.matrix()), &x);
            prop_assert!((lhs - rhs).norm() < 1e-12 * scale);
            let lhs = star_projective(&a, &b, &x);
            let rhs = e_value(&(a.matrix() * b.matrix()), &x);
            prop_assert!((lhs - rhs).norm() < 1e-12 * scale);
        }

        #[test]
        fn variance_identity(seed in any::<u64>(), n in 1usize..5) {
            let (mut rng, x) = point(seed, n);
            let a = random_hermitian(n, &mut rng);
            let e = e_value(a.matrix(), &x).re;
            let e2 = e_value(&(a.matrix() * a.matrix()), &x).re;
            let lhs = variance_form(&a, &x);
            prop_assert!((lhs - VARIANCE_KAPPA * (e2 - e * e)).abs() < 1e-10 * (1.0 + e2.abs()));
        }

        #[test]
        fn hermitian_pairing_splits(seed in any::<u64>(), n in 1usize..5) {
            let (mut rng, x) = point(seed, n);
            let a = random_hermitian(n, &mut rng);
            let b = random_hermitian(n, &mut rng);
            let (da, db) = (df(&a, &x), df(&b, &x));
            let h = hermitian_pairing(&da, &db);
            let expect = c(g(&da, &db), lambda(&da, &db));
            prop_assert!((h - expect).norm() < 1e-12 * (1.0 + expect.norm()));
        }

        #[test]
        fn horizontal_tensors_annihilate_vertical(seed in any::<u64>(), n in 1usize..5) {
            let (_, x) = point(seed, n);
            let t = ProjectiveTensors::at(&x);
            let (theta, omega) = vertical_covectors(&x);
            let s = 1e-12 * (1.0 + x.norm_sqr()).powi(2);
            prop_assert!((&t.g_h * &theta).amax() < s);
            prop_assert!((&t.g_h * &omega).amax() < s);
            prop_assert!((&t.lambda_h * &theta).amax() < s);
            prop_assert!((&t.lambda_h * &omega).amax() < s);
        }

        #[test]
        fn horizontal_agrees_on_e_functions(seed in any::<u64>()) {
            let (mut rng, x) = point(seed, 3);
            let a = random_hermitian(3, &mut rng);
            let b = random_hermitian(3, &mut rng);
            let t = ProjectiveTensors::at(&x);
            let (da, db) = (de(&a, &x), de(&b, &x));
            prop_assert!((eval_tensor(&t.g_h, &da, &db) - eval_tensor(&t.g_p, &da, &db)).abs() < 1e-10);
            prop_assert!((eval_tensor(&t.lambda_h, &da, &db) - eval_tensor(&t.lambda_p, &da, &db)).abs() < 1e-10);
        }

        #[test]
        fn hermitian_quadratics_are_kahlerian(seed in any::<u64>(), n in 1usize..5) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_hermitian(n, &mut rng);
            let f = QuadraticForm::from_hermitian(&a);
            prop_assert!(is_kahlerian(&f).kahlerian);
            let x = ChartPoint::from_state(&StateVector::new(random_vector(n, &mut rng)));
            prop_assert!((f.value(x.coords()) - f_value(a.matrix(), &x).re).abs() < 1e-10 * (1.0 + x.norm_sqr()));
        }
    }
}
