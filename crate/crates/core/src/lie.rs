//! The dual `u*(n)` of the unitary Lie algebra, its Lie-Poisson and Jordan
//! tensors, and the momentum map from the Hilbert space.
//!
//! Points of `u*(n)` are Hermitian matrices `ξ`, paired with Hermitian `A` by
//! `α_A(ξ) = Tr(ξ A)`. On functions with matrix gradients `∇F`:
//!
//! ```text
//! {F, G}(ξ) = Tr(ξ (-i)[∇F, ∇G])        R(F, G)(ξ) = Tr(ξ {∇F, ∇G})
//! ```

use crate::error::{Error, Result};
use crate::kahler::{self, ChartPoint, ProjectiveTensors};
use crate::linops::{
    anticommutator, c, commutator, hermiticity_defect, kron, max_abs, pauli, trace_product, unitarity_defect, CMat,
    HermitianOperator, StateVector, I,
};

/// Tolerance on `Tr(λ_μ λ_ν) = 2 δ_μν`.
pub const BASIS_TOL: f64 = 1e-12;
/// Step for finite-difference gradients on `u*(n)`.
pub const FD_STEP: f64 = 1e-5;
/// `Λ(df_A, df_B) = LIE_PULLBACK · μ*{α_A, α_B}` (same factor for `Λ_P` and `μ̃`).
pub const LIE_PULLBACK: f64 = -2.0;
/// `G(df_A, df_B) = JORDAN_PULLBACK · μ*R(α_A, α_B)`.
pub const JORDAN_PULLBACK: f64 = 2.0;

/// A Hermitian basis of `u(n)` normalized by `Tr(λ_μ λ_ν) = 2 δ_μν`.
#[derive(Clone, Debug)]
pub struct LieBasis {
    n: usize,
    elems: Vec<CMat>,
}

impl LieBasis {
    pub fn new(elems: Vec<CMat>) -> Result<Self> {
        let n = elems.first().map(|m| m.nrows()).unwrap_or(0);
        if elems.len() != n * n || n == 0 {
            return Err(Error::IncompleteBasis { n, expected: n * n, got: elems.len() });
        }
        let mut deviation = 0.0f64;
        for (mu, a) in elems.iter().enumerate() {
            if a.nrows() != n || a.ncols() != n {
                return Err(Error::DimensionMismatch { expected: n, got: a.nrows() });
            }
            let h = hermiticity_defect(a);
            if h > BASIS_TOL {
                return Err(Error::NotHermitian { deviation: h });
            }
            for (nu, b) in elems.iter().enumerate() {
                let target = if mu == nu { 2.0 } else { 0.0 };
                deviation = deviation.max((trace_product(a, b) - c(target, 0.0)).norm());
            }
        }
        if deviation > BASIS_TOL {
            return Err(Error::NonOrthogonalBasis { deviation });
        }
        Ok(Self { n, elems })
    }

    /// Generalized Gell-Mann basis with `λ_0 = sqrt(2/n) I`.
    ///
    /// For `n = 2` this is `(I, σ1, σ2, σ3)`; for `n = 3` it is the standard
    /// Gell-Mann ordering `λ_1 .. λ_8`.
    pub fn gell_mann(n: usize) -> Self {
        let e = |j: usize, k: usize| {
            let mut m = CMat::zeros(n, n);
            m[(j, k)] = c(1.0, 0.0);
            m
        };
        let mut elems = vec![CMat::identity(n, n).scale((2.0 / n as f64).sqrt())];
        for k in 1..n {
            for j in 0..k {
                elems.push(e(j, k) + e(k, j));
                elems.push((e(j, k) - e(k, j)) * (-I));
            }
            let l = k as f64;
            let mut d = CMat::zeros(n, n);
            for j in 0..k {
                d[(j, j)] = c(1.0, 0.0);
            }
            d[(k, k)] = c(-l, 0.0);
            elems.push(d.scale((2.0 / (l * (l + 1.0))).sqrt()));
        }
        Self { n, elems }
    }

    pub fn u2() -> Self {
        Self::gell_mann(2)
    }

    pub fn u3() -> Self {
        Self::gell_mann(3)
    }

    /// `(σ_k ⊗ τ_j) / √2` at index `4k + j`.
    pub fn u4() -> Self {
        let p = pauli();
        let mut elems = Vec::with_capacity(16);
        for k in 0..4 {
            for j in 0..4 {
                elems.push(kron(&p[k], &p[j]).unscale(2f64.sqrt()));
            }
        }
        Self { n: 4, elems }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn elements(&self) -> &[CMat] {
        &self.elems
    }

    /// Coefficients `ξ_μ = Tr(ξ λ_μ) / 2`, so that `ξ = Σ ξ_μ λ_μ`.
    pub fn coefficients(&self, xi: &CMat) -> Vec<f64> {
        self.elems.iter().map(|l| 0.5 * trace_product(xi, l).re).collect()
    }

    pub fn from_coefficients(&self, coeffs: &[f64]) -> CMat {
        self.elems.iter().zip(coeffs).fold(CMat::zeros(self.n, self.n), |acc, (l, &x)| acc + l.scale(x))
    }
}

/// `[λ_μ, λ_ν] = 2i C_μνρ λ_ρ` and `{λ_μ, λ_ν} = 2 d_μνρ λ_ρ`, sums over all
/// `ρ` including the identity direction.
#[derive(Clone, Debug)]
pub struct StructureConstants {
    dim: usize,
    c: Vec<f64>,
    d: Vec<f64>,
}

impl StructureConstants {
    pub fn dim(&self) -> usize {
        self.dim
    }

    fn idx(&self, mu: usize, nu: usize, rho: usize) -> usize {
        (mu * self.dim + nu) * self.dim + rho
    }

    pub fn c(&self, mu: usize, nu: usize, rho: usize) -> f64 {
        self.c[self.idx(mu, nu, rho)]
    }

    pub fn d(&self, mu: usize, nu: usize, rho: usize) -> f64 {
        self.d[self.idx(mu, nu, rho)]
    }

    /// Nonzero entries `(μ, ν, ρ, value)` with `μ < ν < ρ` for `C`.
    pub fn c_table(&self, tol: f64) -> Vec<(usize, usize, usize, f64)> {
        self.table(|m, n, r| m < n && n < r, |m, n, r| self.c(m, n, r), tol)
    }

    /// Nonzero entries with `μ <= ν <= ρ` for `d`.
    pub fn d_table(&self, tol: f64) -> Vec<(usize, usize, usize, f64)> {
        self.table(|m, n, r| m <= n && n <= r, |m, n, r| self.d(m, n, r), tol)
    }

    fn table<P, V>(&self, keep: P, val: V, tol: f64) -> Vec<(usize, usize, usize, f64)>
    where
        P: Fn(usize, usize, usize) -> bool,
        V: Fn(usize, usize, usize) -> f64,
    {
        let mut out = Vec::new();
        for m in 0..self.dim {
            for n in 0..self.dim {
                for r in 0..self.dim {
                    let v = val(m, n, r);
                    if keep(m, n, r) && v.abs() > tol {
                        out.push((m, n, r, v));
                    }
                }
            }
        }
        out
    }

    /// `Σ_ρ (d_μνρ + i C_μνρ) λ_ρ`, which should equal `λ_μ λ_ν`.
    pub fn reconstruct_product(&self, basis: &LieBasis, mu: usize, nu: usize) -> CMat {
        let n = basis.n();
        (0..self.dim)
            .fold(CMat::zeros(n, n), |acc, r| acc + &basis.elements()[r] * c(self.d(mu, nu, r), self.c(mu, nu, r)))
    }
}

pub fn structure_constants(basis: &LieBasis) -> StructureConstants {
    let dim = basis.len();
    let l = basis.elements();
    let mut cc = vec![0.0; dim * dim * dim];
    let mut dd = vec![0.0; dim * dim * dim];
    for mu in 0..dim {
        for nu in 0..dim {
            let comm = commutator(&l[mu], &l[nu]);
            let anti = anticommutator(&l[mu], &l[nu]);
            for (rho, lr) in l.iter().enumerate() {
                let i = (mu * dim + nu) * dim + rho;
                cc[i] = (trace_product(&comm, lr) / c(0.0, 4.0)).re;
                dd[i] = trace_product(&anti, lr).re / 4.0;
            }
        }
    }
    StructureConstants { dim, c: cc, d: dd }
}

/// `mu,nu,rho,value` rows with 17 significant digits.
pub fn table_csv(rows: &[(usize, usize, usize, f64)]) -> String {
    let mut out = String::from("mu,nu,rho,value\n");
    for (a, b, r, v) in rows {
        out.push_str(&format!("{a},{b},{r},{v:.16e}\n"));
    }
    out
}

/// A smooth function on `u*(n)`.
pub trait DualFunction {
    fn value(&self, xi: &CMat) -> f64;

    /// Hermitian gradient with `dF(δξ) = Tr(∇F δξ)`; central differences by default.
    fn gradient(&self, xi: &CMat) -> CMat {
        fd_gradient(|m| self.value(m), xi, FD_STEP)
    }
}

/// `α_A(ξ) = Tr(ξ A)`.
#[derive(Clone, Debug)]
pub struct LinearFunction {
    pub a: HermitianOperator,
}

impl DualFunction for LinearFunction {
    fn value(&self, xi: &CMat) -> f64 {
        trace_product(xi, self.a.matrix()).re
    }

    fn gradient(&self, _xi: &CMat) -> CMat {
        self.a.matrix().clone()
    }
}

/// Central-difference Hermitian gradient along the orthonormal directions `λ_μ / √2`.
pub fn fd_gradient<F: Fn(&CMat) -> f64>(f: F, xi: &CMat, h: f64) -> CMat {
    let n = xi.nrows();
    let basis = LieBasis::gell_mann(n);
    let mut grad = CMat::zeros(n, n);
    for l in basis.elements() {
        let e = l.unscale(2f64.sqrt());
        let dp = f(&(xi + e.scale(h)));
        let dm = f(&(xi - e.scale(h)));
        grad += e.scale((dp - dm) / (2.0 * h));
    }
    grad
}

pub fn lie_poisson_tensor(xi: &CMat, gf: &CMat, gg: &CMat) -> f64 {
    trace_product(xi, &(commutator(gf, gg) * (-I))).re
}

pub fn jordan_tensor(xi: &CMat, gf: &CMat, gg: &CMat) -> f64 {
    trace_product(xi, &anticommutator(gf, gg)).re
}

pub fn lie_poisson_bracket<F: DualFunction + ?Sized, G: DualFunction + ?Sized>(f: &F, g: &G, xi: &CMat) -> f64 {
    lie_poisson_tensor(xi, &f.gradient(xi), &g.gradient(xi))
}

pub fn jordan_bracket<F: DualFunction + ?Sized, G: DualFunction + ?Sized>(f: &F, g: &G, xi: &CMat) -> f64 {
    jordan_tensor(xi, &f.gradient(xi), &g.gradient(xi))
}

/// `μ(ψ) = |ψ><ψ|`.
pub fn momentum_map(psi: &StateVector) -> CMat {
    psi.projector()
}

/// `μ̃(ψ) = |ψ><ψ| / <ψ|ψ>`.
pub fn projective_momentum_map(psi: &StateVector) -> Result<CMat> {
    let nn = psi.norm_sqr();
    if nn == 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok(psi.projector().unscale(nn))
}

/// `max |μ(Uψ) - U μ(ψ) U†|`.
pub fn equivariance_defect(u: &CMat, psi: &StateVector) -> Result<f64> {
    if u.nrows() != psi.dim() || u.ncols() != psi.dim() {
        return Err(Error::DimensionMismatch { expected: psi.dim(), got: u.nrows() });
    }
    let deviation = unitarity_defect(u);
    if deviation > 1e-10 {
        return Err(Error::NotUnitary { deviation });
    }
    let lhs = momentum_map(&StateVector::new(u * psi.amplitudes()));
    let rhs = u * momentum_map(psi) * u.adjoint();
    Ok(max_abs(&(lhs - rhs)))
}

/// Hamiltonian flow of `α_{H/ħ}` on `u*(n)`, i.e. `dξ/dt = -(i/ħ)[H, ξ]`, by RK4.
pub fn heisenberg_flow(h: &HermitianOperator, xi0: &CMat, t: f64, hbar: f64, steps: usize) -> CMat {
    let dt = t / steps as f64;
    let field = |x: &CMat| commutator(h.matrix(), x) * (-I / hbar);
    let mut x = xi0.clone();
    for _ in 0..steps {
        let k1 = field(&x);
        let k2 = field(&(&x + k1.scale(dt / 2.0)));
        let k3 = field(&(&x + k2.scale(dt / 2.0)));
        let k4 = field(&(&x + k3.scale(dt)));
        x += (k1 + k2.scale(2.0) + k3.scale(2.0) + k4).scale(dt / 6.0);
    }
    x
}

/// Absolute residuals of the pullback identities at one point.
#[derive(Clone, Copy, Debug, Default)]
pub struct PullbackReport {
    /// `|α_A(μψ) - f_A(ψ)|` and `|α_A(μ̃ψ) - e_A(ψ)|`, larger of the two.
    pub values: f64,
    /// `|Λ(df_A, df_B) - LIE_PULLBACK {α_A, α_B}(μψ)|`
    pub lie_hilbert: f64,
    /// `|Λ_P(de_A, de_B) - LIE_PULLBACK {α_A, α_B}(μ̃ψ)|`
    pub lie_projective: f64,
    /// `|G(df_A, df_B) - JORDAN_PULLBACK R(α_A, α_B)(μψ)|`
    pub jordan_hilbert: f64,
    /// `|R(α_A, α_B)(μ̃ψ) - (½ G_P(de_A, de_B) + 2 e_A e_B)|`
    pub jordan_projective: f64,
}

impl PullbackReport {
    pub fn max(&self) -> f64 {
        [self.values, self.lie_hilbert, self.lie_projective, self.jordan_hilbert, self.jordan_projective]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

pub fn pullback_residuals(a: &HermitianOperator, b: &HermitianOperator, psi: &StateVector) -> Result<PullbackReport> {
    if a.dim() != psi.dim() || b.dim() != psi.dim() {
        return Err(Error::DimensionMismatch { expected: psi.dim(), got: a.dim() });
    }
    let x = ChartPoint::from_state(psi);
    let mu = momentum_map(psi);
    let mt = projective_momentum_map(psi)?;
    let (fa, fb) = (LinearFunction { a: a.clone() }, LinearFunction { a: b.clone() });
    let values = (fa.value(&mu) - kahler::f_value(a.matrix(), &x).re)
        .abs()
        .max((fa.value(&mt) - kahler::e_value(a.matrix(), &x).re).abs());

    let (da, db) = (kahler::df(a, &x), kahler::df(b, &x));
    let lie_hilbert = (kahler::lambda(&da, &db) - LIE_PULLBACK * lie_poisson_bracket(&fa, &fb, &mu)).abs();
    let jordan_hilbert = (kahler::g(&da, &db) - JORDAN_PULLBACK * jordan_bracket(&fa, &fb, &mu)).abs();

    let t = ProjectiveTensors::at(&x);
    let (pa, pb) = (kahler::de(a, &x), kahler::de(b, &x));
    let lie_projective =
        (kahler::eval_tensor(&t.lambda_p, &pa, &pb) - LIE_PULLBACK * lie_poisson_bracket(&fa, &fb, &mt)).abs();
    let ea = fa.value(&mt);
    let eb = fb.value(&mt);
    let jordan_projective =
        (jordan_bracket(&fa, &fb, &mt) - (0.5 * kahler::eval_tensor(&t.g_p, &pa, &pb) + 2.0 * ea * eb)).abs();
    Ok(PullbackReport { values, lie_hilbert, lie_projective, jordan_hilbert, jordan_projective })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linops::{evolve, random_hermitian, random_state, random_unitary, random_vector};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const S3: f64 = 1.7320508075688772;

    #[test]
    fn bases_are_orthonormal() {
        for b in [LieBasis::u2(), LieBasis::u3(), LieBasis::u4(), LieBasis::gell_mann(5)] {
            assert!(LieBasis::new(b.elements().to_vec()).is_ok());
        }
    }

    #[test]
    fn rejects_bad_bases() {
        let mut e = LieBasis::u2().elements().to_vec();
        e[1] = e[1].scale(1.1);
        assert!(matches!(LieBasis::new(e.clone()), Err(Error::NonOrthogonalBasis { .. })));
        e.pop();
        assert!(matches!(LieBasis::new(e), Err(Error::IncompleteBasis { .. })));
    }

    #[test]
    fn u2_is_levi_civita() {
        let sc = structure_constants(&LieBasis::u2());
        let eps = |a: usize, b: usize, c: usize| {
            ((a as i64 - b as i64) * (b as i64 - c as i64) * (c as i64 - a as i64)) as f64 / 2.0
        };
        for a in 1..4 {
            for b in 1..4 {
                for r in 1..4 {
                    assert!((sc.c(a, b, r) - eps(a, b, r)).abs() < 1e-14);
                }
            }
        }
    }

    // Values checked by hand from the explicit Gell-Mann matrices.
    #[test]
    fn u3_gell_mann_constants() {
        let sc = structure_constants(&LieBasis::u3());
        let cases_c = [
            ((1, 2, 3), 1.0),
            ((4, 5, 8), S3 / 2.0),
            ((6, 7, 8), S3 / 2.0),
            ((1, 4, 7), 0.5),
            ((1, 5, 6), -0.5),
            ((2, 4, 6), 0.5),
            ((2, 5, 7), 0.5),
            ((3, 4, 5), 0.5),
            ((3, 6, 7), -0.5),
        ];
        for ((a, b, r), v) in cases_c {
            assert!((sc.c(a, b, r) - v).abs() < 1e-14, "C{a}{b}{r}");
        }
        let cases_d = [
            ((1, 1, 8), 1.0 / S3),
            ((2, 2, 8), 1.0 / S3),
            ((3, 3, 8), 1.0 / S3),
            ((8, 8, 8), -1.0 / S3),
            ((4, 4, 8), -0.5 / S3),
            ((7, 7, 8), -0.5 / S3),
            ((3, 4, 4), 0.5),
            ((3, 6, 6), -0.5),
            ((1, 4, 6), 0.5),
            ((2, 4, 7), -0.5),
            ((1, 1, 0), (2.0f64 / 3.0).sqrt()),
            ((0, 1, 1), (2.0f64 / 3.0).sqrt()),
        ];
        for ((a, b, r), v) in cases_d {
            assert!((sc.d(a, b, r) - v).abs() < 1e-14, "d{a}{b}{r}");
        }
    }

    #[test]
    fn structure_constant_symmetries() {
        for basis in [LieBasis::u3(), LieBasis::u4()] {
            let sc = structure_constants(&basis);
            let n = sc.dim();
            for a in 0..n {
                for b in 0..n {
                    for r in 0..n {
                        let v = sc.c(a, b, r);
                        assert!((v + sc.c(b, a, r)).abs() < 1e-14);
                        assert!((v - sc.c(b, r, a)).abs() < 1e-14);
                        let w = sc.d(a, b, r);
                        assert!((w - sc.d(b, a, r)).abs() < 1e-14);
                        assert!((w - sc.d(a, r, b)).abs() < 1e-14);
                    }
                }
            }
        }
    }

    #[test]
    fn products_reconstruct() {
        for basis in [LieBasis::u2(), LieBasis::u3(), LieBasis::u4()] {
            let sc = structure_constants(&basis);
            let l = basis.elements();
            for mu in 0..basis.len() {
                for nu in 0..basis.len() {
                    let rec = sc.reconstruct_product(&basis, mu, nu);
                    assert!(max_abs(&(rec - &l[mu] * &l[nu])) < 1e-13);
                }
            }
        }
    }

    #[test]
    fn jacobi_identity_u3() {
        let sc = structure_constants(&LieBasis::u3());
        let n = sc.dim();
        let mut worst = 0.0f64;
        for a in 1..n {
            for b in 1..n {
                for cc in 1..n {
                    for e in 0..n {
                        let s: f64 = (0..n)
                            .map(|k| {
                                sc.c(a, b, k) * sc.c(k, cc, e)
                                    + sc.c(b, cc, k) * sc.c(k, a, e)
                                    + sc.c(cc, a, k) * sc.c(k, b, e)
                            })
                            .sum();
                        worst = worst.max(s.abs());
                    }
                }
            }
        }
        assert!(worst < 1e-13);
    }

    #[test]
    fn jordan_example_sigma1() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let xi = random_hermitian(2, &mut rng);
        let s1 = LinearFunction { a: HermitianOperator::new(pauli()[1].clone()).unwrap() };
        let r = jordan_bracket(&s1, &s1, xi.matrix());
        assert!((r - 2.0 * xi.matrix().trace().re).abs() < 1e-13);
    }

    #[test]
    fn pure_state_momentum_map() {
        let psi = StateVector::from_slice(&[c(1.0, 0.0), c(0.0, 0.0)]);
        let mu = momentum_map(&psi);
        let p = pauli();
        let xi = (&p[0] + &p[3]).scale(0.5);
        assert!(max_abs(&(mu - xi)) < 1e-15);
    }

    #[test]
    fn equivariance_rejects_non_unitary() {
        let psi = StateVector::from_slice(&[c(1.0, 0.0), c(0.0, 0.0)]);
        assert!(matches!(equivariance_defect(&CMat::identity(2, 2).scale(2.0), &psi), Err(Error::NotUnitary { .. })));
    }

    #[test]
    fn fd_gradient_of_linear_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = random_hermitian(3, &mut rng);
        let xi = random_hermitian(3, &mut rng);
        let f = LinearFunction { a: a.clone() };
        let g = fd_gradient(|m| f.value(m), xi.matrix(), 1e-4);
        assert!(max_abs(&(g - a.matrix())) < 1e-10);
    }

    #[test]
    fn schrodinger_equals_heisenberg() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let h = random_hermitian(4, &mut rng);
        let psi = random_state(4, &mut rng);
        let hbar = 1.3;
        let t = 0.8;
        let lhs = momentum_map(&evolve(&h, &psi, t, hbar).unwrap());
        let rhs = heisenberg_flow(&h, &momentum_map(&psi), t, hbar, 2000);
        assert!(max_abs(&(lhs - rhs)) < 1e-8);
    }

    proptest! {
        #[test]
        fn pullbacks_hold(seed in any::<u64>(), n in 2usize..5) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_hermitian(n, &mut rng);
            let b = random_hermitian(n, &mut rng);
            let psi = StateVector::new(random_vector(n, &mut rng));
            let r = pullback_residuals(&a, &b, &psi).unwrap();
            let scale = (1.0 + psi.norm_sqr()) * (1.0 + a.matrix().norm() * b.matrix().norm());
            prop_assert!(r.max() < 1e-12 * scale, "{:?}", r);
        }

        #[test]
        fn equivariance(seed in any::<u64>(), n in 2usize..6) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let u = random_unitary(n, &mut rng);
            let psi = random_state(n, &mut rng);
            prop_assert!(equivariance_defect(&u, &psi).unwrap() < 1e-12);
        }

        #[test]
        fn brackets_antisymmetric_and_symmetric(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let xi = random_hermitian(3, &mut rng);
            let a = random_hermitian(3, &mut rng);
            let b = random_hermitian(3, &mut rng);
            let (x, ga, gb) = (xi.matrix(), a.matrix(), b.matrix());
            prop_assert!((lie_poisson_tensor(x, ga, gb) + lie_poisson_tensor(x, gb, ga)).abs() < 1e-12);
            prop_assert!((jordan_tensor(x, ga, gb) - jordan_tensor(x, gb, ga)).abs() < 1e-12);
        }

        #[test]
        fn coefficient_round_trip(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let basis = LieBasis::u4();
            let xi = random_hermitian(4, &mut rng);
            let back = basis.from_coefficients(&basis.coefficients(xi.matrix()));
            prop_assert!(max_abs(&(back - xi.matrix())) < 1e-13);
        }
    }
}
