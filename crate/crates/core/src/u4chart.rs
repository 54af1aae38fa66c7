//! The two-qubit chart `(y0, m_k, n_j, r_kj)` on `u*(4)`.
//!
//! ```text
//! ξ = y0 σ0⊗τ0 + Σ m_k σk⊗τ0 + Σ n_j σ0⊗τj + Σ (m_k n_j + r_kj) σk⊗τj
//! ```
//!
//! Chart vector fields are computed by the chain rule through the Lie-Poisson
//! and Jordan tensors of [`crate::lie`]. Chart brackets use
//! `{F, G} = 2 Tr(ξ (-i)[∇F, ∇G])` and `R(F, G) = 2 Tr(ξ {∇F, ∇G})`; the factor
//! 2 makes `{m1, m2} = m3` and `R(y0, x) = x` for the linear coordinates.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lie;
use crate::linops::{c, kron, pauli, trace_product, CMat, HermitianOperator};

pub const DIM: usize = 16;
/// Scale of the chart brackets relative to [`lie::lie_poisson_tensor`] / [`lie::jordan_tensor`].
pub const CHART_BRACKET_SCALE: f64 = 2.0;
/// Componentwise tolerance for matching printed fields.
pub const FIELD_TOL: f64 = 1e-9;

pub const LABELS: [&str; DIM] =
    ["y0", "m1", "m2", "m3", "n1", "n2", "n3", "r11", "r12", "r13", "r21", "r22", "r23", "r31", "r32", "r33"];

/// One of the sixteen chart coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coord {
    Y0,
    /// `m_k`, `k ∈ 1..=3`
    M(usize),
    /// `n_j`, `j ∈ 1..=3`
    N(usize),
    /// `r_kj`, `k, j ∈ 1..=3`
    R(usize, usize),
}

impl Coord {
    pub fn index(self) -> usize {
        match self {
            Coord::Y0 => 0,
            Coord::M(k) => k,
            Coord::N(j) => 3 + j,
            Coord::R(k, j) => 7 + 3 * (k - 1) + (j - 1),
        }
    }

    pub fn from_index(i: usize) -> Self {
        match i {
            0 => Coord::Y0,
            1..=3 => Coord::M(i),
            4..=6 => Coord::N(i - 3),
            _ => Coord::R((i - 7) / 3 + 1, (i - 7) % 3 + 1),
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        let s = if s == "lambda0" { "y0" } else { s };
        LABELS.iter().position(|&l| l == s).map(Self::from_index)
    }

    pub fn label(self) -> &'static str {
        LABELS[self.index()]
    }

    pub fn all() -> impl Iterator<Item = Coord> {
        (0..DIM).map(Coord::from_index)
    }
}

/// `σ_k ⊗ τ_j`.
pub fn sigma_tau(k: usize, j: usize) -> CMat {
    let p = pauli();
    kron(&p[k], &p[j])
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct U4ChartPoint {
    pub y0: f64,
    pub m: [f64; 3],
    pub n: [f64; 3],
    pub r: [[f64; 3]; 3],
}

impl U4ChartPoint {
    pub fn from_vector(v: &[f64]) -> Result<Self> {
        if v.len() != DIM {
            return Err(Error::DimensionMismatch { expected: DIM, got: v.len() });
        }
        let mut r = [[0.0; 3]; 3];
        for (k, row) in r.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = v[7 + 3 * k + j];
            }
        }
        Ok(Self { y0: v[0], m: [v[1], v[2], v[3]], n: [v[4], v[5], v[6]], r })
    }

    pub fn to_vector(&self) -> [f64; DIM] {
        let mut v = [0.0; DIM];
        v[0] = self.y0;
        v[1..4].copy_from_slice(&self.m);
        v[4..7].copy_from_slice(&self.n);
        for k in 0..3 {
            for j in 0..3 {
                v[7 + 3 * k + j] = self.r[k][j];
            }
        }
        v
    }

    pub fn get(&self, c: Coord) -> f64 {
        self.to_vector()[c.index()]
    }

    /// Matrix with ¼-trace coordinates equal to this point.
    pub fn to_matrix(&self) -> CMat {
        let mut a = sigma_tau(0, 0).scale(self.y0);
        for k in 1..4 {
            a += sigma_tau(k, 0).scale(self.m[k - 1]);
            a += sigma_tau(0, k).scale(self.n[k - 1]);
            for j in 1..4 {
                a += sigma_tau(k, j).scale(self.m[k - 1] * self.n[j - 1] + self.r[k - 1][j - 1]);
            }
        }
        a
    }

    pub fn from_matrix(a: &CMat) -> Result<Self> {
        if a.nrows() != 4 || a.ncols() != 4 {
            return Err(Error::DimensionMismatch { expected: 4, got: a.nrows() });
        }
        let t = |k: usize, j: usize| 0.25 * trace_product(a, &sigma_tau(k, j)).re;
        let m = [t(1, 0), t(2, 0), t(3, 0)];
        let n = [t(0, 1), t(0, 2), t(0, 3)];
        let mut r = [[0.0; 3]; 3];
        for k in 0..3 {
            for j in 0..3 {
                r[k][j] = t(k + 1, j + 1) - m[k] * n[j];
            }
        }
        Ok(Self { y0: t(0, 0), m, n, r })
    }
}

pub fn to_chart(a: &HermitianOperator) -> Result<U4ChartPoint> {
    U4ChartPoint::from_matrix(a.matrix())
}

pub fn from_chart(p: &U4ChartPoint) -> HermitianOperator {
    HermitianOperator::hermitian_part(&p.to_matrix()).expect("4x4")
}

/// Value of a chart coordinate as a function of the matrix.
pub fn coordinate_value(coord: Coord, xi: &CMat) -> f64 {
    U4ChartPoint::from_matrix(xi).map(|p| p.get(coord)).unwrap_or(f64::NAN)
}

/// Hermitian gradient of a chart coordinate at the matrix point `ξ`.
pub fn coordinate_gradient(coord: Coord, p: &U4ChartPoint) -> CMat {
    match coord {
        Coord::Y0 => sigma_tau(0, 0).scale(0.25),
        Coord::M(k) => sigma_tau(k, 0).scale(0.25),
        Coord::N(j) => sigma_tau(0, j).scale(0.25),
        Coord::R(k, j) => {
            (sigma_tau(k, j) - sigma_tau(k, 0).scale(p.n[j - 1]) - sigma_tau(0, j).scale(p.m[k - 1])).scale(0.25)
        }
    }
}

/// Chart Poisson matrix `P^{ab} = {x^a, x^b}` and Jordan matrix `R^{ab} = R(x^a, x^b)`.
pub fn chart_tensors(p: &U4ChartPoint) -> (DMatrix<f64>, DMatrix<f64>) {
    let xi = p.to_matrix();
    let grads: Vec<CMat> = Coord::all().map(|c| coordinate_gradient(c, p)).collect();
    let mut pm = DMatrix::zeros(DIM, DIM);
    let mut rm = DMatrix::zeros(DIM, DIM);
    for a in 0..DIM {
        for b in 0..DIM {
            pm[(a, b)] = CHART_BRACKET_SCALE * lie::lie_poisson_tensor(&xi, &grads[a], &grads[b]);
            rm[(a, b)] = CHART_BRACKET_SCALE * lie::jordan_tensor(&xi, &grads[a], &grads[b]);
        }
    }
    (pm, rm)
}

/// Hamiltonian field `{x, ·}` of a coordinate, as chart components.
pub fn hamiltonian_field_chart(coord: Coord, p: &U4ChartPoint) -> [f64; DIM] {
    let xi = p.to_matrix();
    let ga = coordinate_gradient(coord, p);
    let mut out = [0.0; DIM];
    for (b, o) in out.iter_mut().enumerate() {
        let gb = coordinate_gradient(Coord::from_index(b), p);
        *o = CHART_BRACKET_SCALE * lie::lie_poisson_tensor(&xi, &ga, &gb);
    }
    out
}

/// Riemannian (gradient) field `R(x, ·)` of a coordinate.
pub fn riemann_field_chart(coord: Coord, p: &U4ChartPoint) -> [f64; DIM] {
    let xi = p.to_matrix();
    let ga = coordinate_gradient(coord, p);
    let mut out = [0.0; DIM];
    for (b, o) in out.iter_mut().enumerate() {
        let gb = coordinate_gradient(Coord::from_index(b), p);
        *o = CHART_BRACKET_SCALE * lie::jordan_tensor(&xi, &ga, &gb);
    }
    out
}

/// Matrix-side chart Poisson matrix with central-difference gradients of the
/// coordinate functions `x^a ∘ chart`; independent of [`coordinate_gradient`].
pub fn chart_poisson_fd(p: &U4ChartPoint) -> DMatrix<f64> {
    let xi = p.to_matrix();
    let grads: Vec<CMat> = Coord::all().map(|c| lie::fd_gradient(|m| coordinate_value(c, m), &xi, 1e-3)).collect();
    DMatrix::from_fn(DIM, DIM, |a, b| CHART_BRACKET_SCALE * lie::lie_poisson_tensor(&xi, &grads[a], &grads[b]))
}

/// The field listings to compare against, transcribed term by term.
pub mod printed {
    use super::{Coord, U4ChartPoint, DIM};

    pub type Field = fn(&U4ChartPoint) -> [f64; DIM];

    struct V {
        y0: f64,
        m: [f64; 4],
        n: [f64; 4],
        r: [[f64; 4]; 4],
    }

    fn v(p: &U4ChartPoint) -> V {
        let mut r = [[0.0; 4]; 4];
        for k in 0..3 {
            for j in 0..3 {
                r[k + 1][j + 1] = p.r[k][j];
            }
        }
        V { y0: p.y0, m: [0.0, p.m[0], p.m[1], p.m[2]], n: [0.0, p.n[0], p.n[1], p.n[2]], r }
    }

    struct Out([f64; DIM]);

    impl Out {
        fn set(&mut self, c: Coord, x: f64) {
            self.0[c.index()] = x;
        }
    }

    use Coord::{M, N, R, Y0};

    pub fn ham_m1(p: &U4ChartPoint) -> [f64; DIM] {
        let V { m, r, .. } = v(p);
        let mut o = Out([0.0; DIM]);
        o.set(R(2, 3), r[3][3]);
        o.set(R(3, 3), -r[2][3]);
        o.set(R(2, 2), r[3][2]);
        o.set(R(3, 2), -r[2][2]);
        o.set(R(3, 1), r[2][1]);
        o.set(R(2, 1), -r[3][1]);
        o.set(M(3), -m[2]);
        o.set(M(2), m[3]);
        o.0
    }

    pub fn ham_n1(p: &U4ChartPoint) -> [f64; DIM] {
        let V { n, r, .. } = v(p);
        let mut o = Out([0.0; DIM]);
        o.set(R(3, 3), -r[3][2]);
        o.set(R(3, 2), r[3][3]);
        o.set(R(2, 3), -r[2][2]);
        o.set(R(2, 2), r[2][3]);
        o.set(R(1, 3), -r[1][2]);
        o.set(R(1, 2), r[1][3]);
        o.set(N(3), -n[2]);
        o.set(N(2), n[3]);
        o.0
    }

    pub fn ham_r11(p: &U4ChartPoint) -> [f64; DIM] {
        let V { m, n, r, .. } = v(p);
        let mut o = Out([0.0; DIM]);
        o.set(N(3), r[1][2]);
        o.set(R(1, 3), -((m[1] * m[1] - 1.0) * n[2] + 2.0 * m[1] * r[1][2]));
        o.set(N(2), -r[1][3]);
        o.set(R(1, 2), (m[1] * m[1] - 1.0) * n[3] + 2.0 * m[1] * r[1][3]);
        o.set(M(3), r[2][1]);
        o.set(R(3, 1), -(m[2] * (n[1] * n[1] - 1.0) + 2.0 * n[1] * r[2][1]));
        o.set(M(2), -r[3][1]);
        o.set(R(2, 1), m[3] * (n[1] * n[1] - 1.0) + 2.0 * n[1] * r[3][1]);
        o.set(
            R(2, 2),
            m[2] * r[1][3] + m[1] * (m[2] * n[3] + r[2][3]) + n[2] * (m[3] * n[1] + r[3][1]) + n[1] * r[3][2],
        );
        o.set(
            R(3, 3),
            -(m[3] * r[1][2] + n[3] * (m[2] * n[1] + r[2][1]) + n[1] * r[2][3] + m[1] * (m[3] * n[2] + r[3][2])),
        );
        o.set(
            R(2, 3),
            -m[2] * r[1][2] - m[1] * (m[2] * n[2] + r[2][2]) + n[3] * (m[3] * n[1] + r[3][1]) + n[1] * r[3][3],
        );
        o.set(
            R(3, 2),
            m[3] * r[1][3] - n[2] * (m[2] * n[1] + r[2][1]) - n[1] * r[2][2] + m[1] * (m[3] * n[3] + r[3][3]),
        );
        o.0
    }

    pub fn ham_r12(p: &U4ChartPoint) -> [f64; DIM] {
        let V { m, n, r, .. } = v(p);
        let mut o = Out([0.0; DIM]);
        o.set(N(3), r[1][1]);
        o.set(R(1, 3), -((m[1] * m[1] - 1.0) * n[1] + 2.0 * m[1] * r[1][1]));
        o.set(N(1), -r[1][3]);
        o.set(R(1, 1), (m[1] * m[1] - 1.0) * n[3] + 2.0 * m[1] * r[1][3]);
        o.set(M(3), -r[2][2]);
        o.set(R(3, 2), m[2] * (n[2] * n[2] - 1.0) + 2.0 * n[2] * r[2][2]);
        o.set(
            R(3, 3),
            -m[3] * r[1][1] + n[3] * (m[2] * n[2] + r[2][2]) + n[2] * r[2][3] - m[1] * (m[3] * n[1] + r[3][1]),
        );
        o.set(M(2), r[3][2]);
        o.set(
            R(2, 1),
            m[2] * r[1][3] + m[1] * (m[2] * n[3] + r[2][3]) - n[2] * (m[3] * n[1] + r[3][1]) - n[1] * r[3][2],
        );
        o.set(R(2, 2), -(m[3] * (n[2] * n[2] - 1.0) + 2.0 * n[2] * r[3][2]));
        o.set(
            R(2, 3),
            -(m[2] * r[1][1] + m[1] * (m[2] * n[1] + r[2][1]) + n[3] * (m[3] * n[2] + r[3][2]) + n[2] * r[3][3]),
        );
        o.set(
            R(3, 1),
            m[3] * r[1][3] + n[2] * (m[2] * n[1] + r[2][1]) + n[1] * r[2][2] + m[1] * (m[3] * n[3] + r[3][3]),
        );
        o.0
    }

    pub fn ham_r21(p: &U4ChartPoint) -> [f64; DIM] {
        let V { m, n, r, .. } = v(p);
        let mut o = Out([0.0; DIM]);
        o.set(M(3), r[1][1]);
        o.set(R(3, 1), -(m[1] * (n[1] * n[1] - 1.0) + 2.0 * n[1] * r[1][1]));
        o.set(N(3), -r[2][2]);
        o.set(R(2, 3), (m[2] * m[2] - 1.0) * n[2] + 2.0 * m[2] * r[2][2]);
        o.set(N(2), r[2][3]);
        o.set(R(2, 2), -((m[2] * m[2] - 1.0) * n[3] + 2.0 * m[2] * r[2][3]));
        o.set(M(1), -r[3][1]);
        o.set(R(1, 1), m[3] * (n[1] * n[1] - 1.0) + 2.0 * n[1] * r[3][1]);
        o.set(
            R(1, 2),
            -m[2] * r[1][3] - m[1] * (m[2] * n[3] + r[2][3]) + n[2] * (m[3] * n[1] + r[3][1]) + n[1] * r[3][2],
        );
        o.set(
            R(3, 3),
            -n[3] * (m[1] * n[1] + r[1][1]) - n[1] * r[1][3] + m[3] * r[2][2] + m[2] * (m[3] * n[2] + r[3][2]),
        );
        o.set(
            R(1, 3),
            m[2] * r[1][2] + m[1] * (m[2] * n[2] + r[2][2]) + n[3] * (m[3] * n[1] + r[3][1]) + n[1] * r[3][3],
        );
        o.set(
            R(3, 2),
            -(n[2] * (m[1] * n[1] + r[1][1]) + n[1] * r[1][2] + m[3] * r[2][3] + m[2] * (m[3] * n[3] + r[3][3])),
        );
        o.0
    }

    pub fn riem_y0(p: &U4ChartPoint) -> [f64; DIM] {
        let V { y0, m, n, r } = v(p);
        let mut o = Out([0.0; DIM]);
        o.set(Y0, y0);
        for k in 1..4 {
            o.set(M(k), m[k]);
            o.set(N(k), n[k]);
            for j in 1..4 {
                o.set(R(k, j), r[k][j] - n[j] * m[k]);
            }
        }
        o.0
    }

    pub fn riem_m1(p: &U4ChartPoint) -> [f64; DIM] {
        let V { y0, m, n, r } = v(p);
        let mut o = Out([0.0; DIM]);
        o.set(M(1), y0);
        for j in 1..4 {
            o.set(N(j), m[1] * n[j] + r[1][j]);
            o.set(R(1, j), -(m[1] * r[1][j] + n[j] * (m[1] * m[1] + y0 - 1.0)));
            o.set(R(2, j), -m[2] * (m[1] * n[j] + r[1][j]));
            o.set(R(3, j), -m[3] * (m[1] * n[j] + r[1][j]));
        }
        o.set(Y0, m[1]);
        o.0
    }

    pub fn riem_n1(p: &U4ChartPoint) -> [f64; DIM] {
        let V { y0, m, n, r } = v(p);
        let mut o = Out([0.0; DIM]);
        for k in 1..4 {
            o.set(M(k), m[k] * n[1] + r[k][1]);
            o.set(R(k, 1), -(n[1] * r[k][1] + m[k] * (n[1] * n[1] + y0 - 1.0)));
            o.set(R(k, 2), -n[2] * (m[k] * n[1] + r[k][1]));
            o.set(R(k, 3), -n[3] * (m[k] * n[1] + r[k][1]));
        }
        o.set(N(1), y0);
        o.set(Y0, n[1]);
        o.0
    }

    pub fn riem_r11(p: &U4ChartPoint) -> [f64; DIM] {
        let V { y0, m, n, r } = v(p);
        let mut o = Out([0.0; DIM]);
        o.set(M(1), m[1] * r[1][1] + n[1] * (m[1] * m[1] + y0 - 1.0));
        o.set(M(2), m[1] * (m[2] * n[1] + r[2][1]));
        o.set(M(3), m[1] * (m[3] * n[1] + r[3][1]));
        o.set(N(1), n[1] * r[1][1] + m[1] * (n[1] * n[1] + y0 - 1.0));
        o.set(N(2), n[1] * (m[1] * n[2] + r[1][2]));
        o.set(N(3), n[1] * (m[1] * n[3] + r[1][3]));
        o.set(
            R(1, 1),
            -((2.0 * n[1] * n[1] + y0 - 2.0) * m[1] * m[1]
                + 2.0 * n[1] * r[1][1] * m[1]
                + n[1] * n[1] * (y0 - 2.0)
                + y0),
        );
        o.set(R(1, 2), -(m[1] * n[2] * r[1][1] + n[1] * (m[1] * r[1][2] + n[2] * (2.0 * m[1] * m[1] + y0 - 2.0))));
        o.set(R(1, 3), -(m[1] * n[3] * r[1][1] + n[1] * (m[1] * r[1][3] + n[3] * (2.0 * m[1] * m[1] + y0 - 2.0))));
        o.set(R(2, 1), -(m[2] * n[1] * r[1][1] + m[1] * (n[1] * r[2][1] + m[2] * (2.0 * n[1] * n[1] + y0 - 2.0))));
        o.set(R(2, 2), m[3] * n[3] - m[2] * n[1] * r[1][2] - m[1] * n[2] * (2.0 * m[2] * n[1] + r[2][1]) + r[3][3]);
        o.set(R(2, 3), -(m[3] * n[2] + m[2] * n[1] * r[1][3] + m[1] * n[3] * (2.0 * m[2] * n[1] + r[2][1]) + r[3][2]));
        o.set(R(3, 1), -(m[3] * n[1] * r[1][1] + m[1] * (n[1] * r[3][1] + m[3] * (2.0 * n[1] * n[1] + y0 - 2.0))));
        o.set(R(3, 2), -(m[2] * n[3] + m[3] * n[1] * r[1][2] + r[2][3] + m[1] * n[2] * (2.0 * m[3] * n[1] + r[3][1])));
        o.set(R(3, 3), m[2] * n[2] - m[3] * n[1] * r[1][3] + r[2][2] - m[1] * n[3] * (2.0 * m[3] * n[1] + r[3][1]));
        o.set(Y0, m[1] * n[1] - r[1][1]);
        o.0
    }

    pub fn riem_r12(p: &U4ChartPoint) -> [f64; DIM] {
        let V { y0, m, n, r } = v(p);
        let mut o = Out([0.0; DIM]);
        o.set(M(1), m[1] * r[1][2] + n[2] * (m[1] * m[1] + y0 - 1.0));
        o.set(M(2), m[1] * (m[2] * n[2] + r[2][2]));
        o.set(M(3), m[1] * (m[3] * n[2] + r[3][2]));
        o.set(N(1), n[2] * (m[1] * n[1] + r[1][1]));
        o.set(N(2), n[2] * r[1][2] + m[1] * (n[2] * n[2] + y0 - 1.0));
        o.set(N(3), n[2] * (m[1] * n[3] + r[1][3]));
        o.set(R(1, 1), -(m[1] * n[2] * r[1][1] + n[1] * (m[1] * r[1][2] + n[2] * (2.0 * m[1] * m[1] + y0 - 2.0))));
        o.set(
            R(1, 2),
            -((2.0 * n[2] * n[2] + y0 - 2.0) * m[1] * m[1]
                + 2.0 * n[2] * r[1][2] * m[1]
                + n[2] * n[2] * (y0 - 2.0)
                + y0),
        );
        o.set(R(1, 3), -(m[1] * n[3] * r[1][2] + n[2] * (m[1] * r[1][3] + n[3] * (2.0 * m[1] * m[1] + y0 - 2.0))));
        o.set(R(2, 1), -(m[3] * n[3] + m[2] * n[2] * r[1][1] + m[1] * n[1] * (2.0 * m[2] * n[2] + r[2][2]) + r[3][3]));
        o.set(R(2, 2), -(m[2] * n[2] * r[1][2] + m[1] * (n[2] * r[2][2] + m[2] * (2.0 * n[2] * n[2] + y0 - 2.0))));
        o.set(R(2, 3), m[3] * n[1] - m[2] * n[2] * r[1][3] - m[1] * n[3] * (2.0 * m[2] * n[2] + r[2][2]) + r[3][1]);
        o.set(R(3, 1), m[2] * n[3] - m[3] * n[2] * r[1][1] + r[2][3] - m[1] * n[1] * (2.0 * m[3] * n[2] + r[3][2]));
        o.set(R(3, 2), -(m[3] * n[2] * r[1][2] + m[1] * (n[2] * r[3][2] + m[3] * (2.0 * n[2] * n[2] + y0 - 2.0))));
        o.set(R(3, 3), -(m[2] * n[1] + m[3] * n[2] * r[1][3] + r[2][1] + m[1] * n[3] * (2.0 * m[3] * n[2] + r[3][2])));
        o.set(Y0, m[1] * n[2] - r[1][2]);
        o.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FieldKind {
    Hamiltonian,
    Riemannian,
}

/// A printed field together with the coordinate that generates it.
#[derive(Clone, Copy)]
pub struct Listing {
    pub name: &'static str,
    pub kind: FieldKind,
    pub coord: Coord,
    pub printed: printed::Field,
}

pub fn listings() -> Vec<Listing> {
    use FieldKind::*;
    vec![
        Listing { name: "{m1,.}", kind: Hamiltonian, coord: Coord::M(1), printed: printed::ham_m1 },
        Listing { name: "{n1,.}", kind: Hamiltonian, coord: Coord::N(1), printed: printed::ham_n1 },
        Listing { name: "{r11,.}", kind: Hamiltonian, coord: Coord::R(1, 1), printed: printed::ham_r11 },
        Listing { name: "{r12,.}", kind: Hamiltonian, coord: Coord::R(1, 2), printed: printed::ham_r12 },
        Listing { name: "{r21,.}", kind: Hamiltonian, coord: Coord::R(2, 1), printed: printed::ham_r21 },
        Listing { name: "J_y0", kind: Riemannian, coord: Coord::Y0, printed: printed::riem_y0 },
        Listing { name: "J_m1", kind: Riemannian, coord: Coord::M(1), printed: printed::riem_m1 },
        Listing { name: "J_n1", kind: Riemannian, coord: Coord::N(1), printed: printed::riem_n1 },
        Listing { name: "J_r11", kind: Riemannian, coord: Coord::R(1, 1), printed: printed::riem_r11 },
        Listing { name: "J_r12", kind: Riemannian, coord: Coord::R(1, 2), printed: printed::riem_r12 },
    ]
}

pub fn derived_field(kind: FieldKind, coord: Coord, p: &U4ChartPoint) -> [f64; DIM] {
    match kind {
        FieldKind::Hamiltonian => hamiltonian_field_chart(coord, p),
        FieldKind::Riemannian => riemann_field_chart(coord, p),
    }
}

/// One `(field, component, point)` comparison.
#[derive(Clone, Debug, Serialize)]
pub struct FieldRow {
    pub field: &'static str,
    pub component: &'static str,
    pub point_id: usize,
    pub derived: f64,
    pub printed: f64,
    pub delta: f64,
}

/// Per-field verdict.
#[derive(Clone, Debug, Serialize)]
pub struct FieldSummary {
    pub field: &'static str,
    pub max_delta: f64,
    /// Largest `|derived + printed|`, i.e. the mismatch after flipping the printed sign.
    pub max_delta_flipped: f64,
    pub matches: bool,
    pub matches_up_to_sign: bool,
    /// Components whose printed term disagrees at some point.
    pub mismatched_components: Vec<&'static str>,
    /// Components that agree only after flipping their printed sign.
    pub sign_flipped_components: Vec<&'static str>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FieldReport {
    pub rows: Vec<FieldRow>,
    pub summaries: Vec<FieldSummary>,
    /// Max over points of `|P_chain - P_matrix_fd|`.
    pub chain_rule_residual: f64,
}

impl FieldReport {
    pub fn all_match(&self) -> bool {
        self.summaries.iter().all(|s| s.matches)
    }
}

pub fn compare_fields(points: &[U4ChartPoint]) -> FieldReport {
    let mut rows = Vec::new();
    let mut summaries = Vec::new();
    for l in listings() {
        let mut max_delta = 0.0f64;
        let mut max_flip = 0.0f64;
        let mut comp_delta = [0.0f64; DIM];
        let mut comp_flip = [0.0f64; DIM];
        for (pid, p) in points.iter().enumerate() {
            let d = derived_field(l.kind, l.coord, p);
            let q = (l.printed)(p);
            for b in 0..DIM {
                let delta = d[b] - q[b];
                max_delta = max_delta.max(delta.abs());
                max_flip = max_flip.max((d[b] + q[b]).abs());
                comp_delta[b] = comp_delta[b].max(delta.abs());
                comp_flip[b] = comp_flip[b].max((d[b] + q[b]).abs());
                rows.push(FieldRow {
                    field: l.name,
                    component: LABELS[b],
                    point_id: pid,
                    derived: d[b],
                    printed: q[b],
                    delta,
                });
            }
        }
        let mismatched: Vec<&'static str> =
            (0..DIM).filter(|&b| comp_delta[b] > FIELD_TOL).map(|b| LABELS[b]).collect();
        let flipped: Vec<&'static str> =
            (0..DIM).filter(|&b| comp_delta[b] > FIELD_TOL && comp_flip[b] <= FIELD_TOL).map(|b| LABELS[b]).collect();
        summaries.push(FieldSummary {
            field: l.name,
            max_delta,
            max_delta_flipped: max_flip,
            matches: max_delta <= FIELD_TOL,
            matches_up_to_sign: max_delta <= FIELD_TOL || max_flip <= FIELD_TOL,
            mismatched_components: mismatched,
            sign_flipped_components: flipped,
        });
    }
    let chain_rule_residual =
        points.iter().map(|p| (chart_tensors(p).0 - chart_poisson_fd(p)).amax()).fold(0.0, f64::max);
    FieldReport { rows, summaries, chain_rule_residual }
}

/// Fields of the linear coordinates `(y0, m_k, n_j, t_kj)`, i.e. the basis
/// elements `σk⊗τj / 4`, as chart components.
pub fn basis_field(kind: FieldKind, k: usize, j: usize, p: &U4ChartPoint) -> [f64; DIM] {
    let xi = p.to_matrix();
    let ga = sigma_tau(k, j).scale(0.25);
    let mut out = [0.0; DIM];
    for (b, o) in out.iter_mut().enumerate() {
        let gb = coordinate_gradient(Coord::from_index(b), p);
        *o = CHART_BRACKET_SCALE
            * match kind {
                FieldKind::Hamiltonian => lie::lie_poisson_tensor(&xi, &ga, &gb),
                FieldKind::Riemannian => lie::jordan_tensor(&xi, &ga, &gb),
            };
    }
    out
}

fn all_basis_fields(p: &U4ChartPoint) -> Vec<[f64; DIM]> {
    let mut out = Vec::with_capacity(32);
    for kind in [FieldKind::Hamiltonian, FieldKind::Riemannian] {
        for k in 0..4 {
            for j in 0..4 {
                out.push(basis_field(kind, k, j, p));
            }
        }
    }
    out
}

fn rank(m: &DMatrix<f64>, rel_tol: f64) -> usize {
    let sv = m.clone().svd(false, false).singular_values;
    let top = sv.iter().cloned().fold(0.0, f64::max);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * top).count()
}

/// Rank of the 32 basis fields evaluated at one point.
pub fn pointwise_rank(p: &U4ChartPoint) -> usize {
    let f = all_basis_fields(p);
    rank(&DMatrix::from_fn(DIM, f.len(), |b, i| f[i][b]), 1e-9)
}

/// Lie bracket `[X, Y]^b = X^a ∂_a Y^b - Y^a ∂_a X^b` of chart fields, central differences.
pub fn field_bracket<X, Y>(x: X, y: Y, p: &U4ChartPoint, h: f64) -> [f64; DIM]
where
    X: Fn(&U4ChartPoint) -> [f64; DIM],
    Y: Fn(&U4ChartPoint) -> [f64; DIM],
{
    let base = p.to_vector();
    let shifted = |a: usize, s: f64| {
        let mut v = base;
        v[a] += s;
        U4ChartPoint::from_vector(&v).expect("16")
    };
    let (xv, yv) = (x(p), y(p));
    let mut out = [0.0; DIM];
    for a in 0..DIM {
        if xv[a] == 0.0 && yv[a] == 0.0 {
            continue;
        }
        let (pp, pm) = (shifted(a, h), shifted(a, -h));
        let (yp, ym, xp, xm) = (y(&pp), y(&pm), x(&pp), x(&pm));
        for b in 0..DIM {
            out[b] += xv[a] * (yp[b] - ym[b]) / (2.0 * h) - yv[a] * (xp[b] - xm[b]) / (2.0 * h);
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct AlgebraReport {
    /// Rank of the fields at each sample point.
    pub pointwise_ranks: Vec<usize>,
    /// Real dimension of the span of the 32 basis fields as functions (sampled).
    pub algebra_dimension: usize,
    /// Largest residual of a pairwise bracket after projection on that span.
    pub closure_residual: f64,
    /// Largest `|[X_i, X_j] + [X_j, X_i]|`.
    pub antisymmetry_residual: f64,
    pub rank_at_origin: usize,
    pub rank_at_pure_state: usize,
}

/// Brackets of the `σk⊗τj` Hamiltonian and Riemannian fields, sampled at `points`.
pub fn field_algebra_report(points: &[U4ChartPoint]) -> AlgebraReport {
    let pointwise_ranks: Vec<usize> = points.iter().map(pointwise_rank).collect();
    let gens: Vec<(FieldKind, usize, usize)> = [FieldKind::Hamiltonian, FieldKind::Riemannian]
        .into_iter()
        .flat_map(|kind| (0..16).map(move |i| (kind, i / 4, i % 4)))
        .collect();
    let stack = |f: &dyn Fn(&U4ChartPoint) -> [f64; DIM]| -> DVector<f64> {
        DVector::from_iterator(DIM * points.len(), points.iter().flat_map(f))
    };
    let columns: Vec<DVector<f64>> = gens.iter().map(|&(kd, k, j)| stack(&|p| basis_field(kd, k, j, p))).collect();
    let span = DMatrix::from_columns(&columns);
    let algebra_dimension = rank(&span, 1e-9);
    let svd = span.clone().svd(true, false);
    let u = svd.u.expect("u");
    let basis_cols: Vec<DVector<f64>> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > 1e-9 * svd.singular_values.max())
        .map(|i| u.column(i).into_owned())
        .collect();
    let q = DMatrix::from_columns(&basis_cols);

    let mut closure = 0.0f64;
    let mut anti = 0.0f64;
    let pick = [0usize, 1, 5, 6, 11, 16, 17, 21, 26, 31];
    for (ii, &i) in pick.iter().enumerate() {
        for &j in &pick[ii + 1..] {
            let (ki, ai, bi) = gens[i];
            let (kj, aj, bj) = gens[j];
            let fi = move |p: &U4ChartPoint| basis_field(ki, ai, bi, p);
            let fj = move |p: &U4ChartPoint| basis_field(kj, aj, bj, p);
            let br = stack(&|p| field_bracket(fi, fj, p, 1e-4));
            let rev = stack(&|p| field_bracket(fj, fi, p, 1e-4));
            anti = anti.max((&br + &rev).amax());
            let proj = &q * (q.transpose() * &br);
            closure = closure.max((&br - proj).amax());
        }
    }
    let origin = U4ChartPoint::from_vector(&[0.0; DIM]).expect("16");
    let psi = crate::linops::CVec::from_vec(vec![c(0.6, 0.1), c(-0.3, 0.5), c(0.2, -0.4), c(0.25, 0.15)]).normalize();
    let pure = U4ChartPoint::from_matrix(&(&psi * psi.adjoint())).expect("4x4");
    AlgebraReport {
        pointwise_ranks,
        algebra_dimension,
        closure_residual: closure,
        antisymmetry_residual: anti,
        rank_at_origin: pointwise_rank(&origin),
        rank_at_pure_state: pointwise_rank(&pure),
    }
}

/// Random chart point with coordinates uniform in `[-1, 1]`.
pub fn random_point<R: rand::Rng + ?Sized>(rng: &mut R) -> U4ChartPoint {
    let v: Vec<f64> = (0..DIM).map(|_| rng.random_range(-1.0..1.0)).collect();
    U4ChartPoint::from_vector(&v).expect("16")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linops::{max_abs, random_hermitian};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn extraction_examples() {
        let p = U4ChartPoint::from_matrix(&sigma_tau(0, 0)).unwrap();
        assert_eq!(p.y0, 1.0);
        assert_eq!(p.to_vector()[1..].iter().map(|x| x.abs()).sum::<f64>(), 0.0);
        let p = U4ChartPoint::from_matrix(&sigma_tau(1, 1)).unwrap();
        assert_eq!(p.r[0][0], 1.0);
        assert_eq!(p.m, [0.0; 3]);
        let mut v = [0.0; DIM];
        v[Coord::M(1).index()] = 0.5;
        v[Coord::N(1).index()] = 0.5;
        let a = U4ChartPoint::from_vector(&v).unwrap().to_matrix();
        let t11 = 0.25 * trace_product(&a, &sigma_tau(1, 1)).re;
        assert!((t11 - 0.25).abs() < 1e-15);
        assert!(U4ChartPoint::from_matrix(&a).unwrap().r[0][0].abs() < 1e-15);
        assert!(U4ChartPoint::from_matrix(&CMat::zeros(3, 3)).is_err());
    }

    #[test]
    fn coordinate_labels_round_trip() {
        for c in Coord::all() {
            assert_eq!(Coord::from_index(c.index()), c);
            assert_eq!(Coord::parse(c.label()), Some(c));
        }
        assert_eq!(Coord::parse("lambda0"), Some(Coord::Y0));
    }

    // Oracle for the bracket scale: fit κ in κ·Tr(ξ(-i)[∇m1, ∇m2]) = m3.
    #[test]
    fn chart_scale_calibrated() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (mut num, mut den) = (0.0, 0.0);
        for _ in 0..10 {
            let p = random_point(&mut rng);
            let xi = p.to_matrix();
            let raw = lie::lie_poisson_tensor(
                &xi,
                &coordinate_gradient(Coord::M(1), &p),
                &coordinate_gradient(Coord::M(2), &p),
            );
            num += raw * p.m[2];
            den += raw * raw;
        }
        assert!((num / den - CHART_BRACKET_SCALE).abs() < 1e-12);
    }

    #[test]
    fn y0_is_casimir() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let p = random_point(&mut rng);
        assert!(hamiltonian_field_chart(Coord::Y0, &p).iter().all(|x| x.abs() < 1e-14));
    }

    #[test]
    fn m1_field_at_origin_block() {
        let mut v = [0.0; DIM];
        v[0] = 0.3;
        v[Coord::M(2).index()] = 0.4;
        v[Coord::M(3).index()] = -0.7;
        let p = U4ChartPoint::from_vector(&v).unwrap();
        let f = hamiltonian_field_chart(Coord::M(1), &p);
        for (b, x) in f.iter().enumerate() {
            let expect = match Coord::from_index(b) {
                Coord::M(2) => -0.7,
                Coord::M(3) => -0.4,
                _ => 0.0,
            };
            assert!((x - expect).abs() < 1e-14, "{}", LABELS[b]);
        }
    }

    #[test]
    fn local_generators_preserve_separability() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut p = random_point(&mut rng);
        p.r = [[0.0; 3]; 3];
        for k in 1..4 {
            for c in [Coord::M(k), Coord::N(k)] {
                let f = hamiltonian_field_chart(c, &p);
                assert!(f[7..].iter().all(|x| x.abs() < 1e-10));
            }
        }
    }

    #[test]
    fn zero_point_riemann_r_components_vanish() {
        let p = U4ChartPoint::from_vector(&[0.0; DIM]).unwrap();
        for c in Coord::all() {
            assert!(riemann_field_chart(c, &p).iter().all(|x| *x == 0.0));
        }
    }

    #[test]
    fn chain_rule_consistency() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..5 {
            let p = random_point(&mut rng);
            let (pm, _) = chart_tensors(&p);
            assert!((pm - chart_poisson_fd(&p)).amax() < 1e-9);
        }
    }

    #[test]
    fn algebra_report() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let pts: Vec<U4ChartPoint> = (0..4).map(|_| random_point(&mut rng)).collect();
        let r = field_algebra_report(&pts);
        assert!(r.pointwise_ranks.iter().all(|&k| k == 16));
        // gl(4,C) has real dimension 32; the centre iI acts trivially.
        assert_eq!(r.algebra_dimension, 31);
        assert!(r.closure_residual < 1e-6, "{}", r.closure_residual);
        assert!(r.antisymmetry_residual < 1e-12);
        assert_eq!(r.rank_at_origin, 0);
        // GL(4,C) orbit of a rank-one positive matrix: 2·4 - 1 real dimensions.
        assert_eq!(r.rank_at_pure_state, 7);
    }

    #[test]
    fn printed_field_verdicts() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let pts: Vec<U4ChartPoint> = (0..20).map(|_| random_point(&mut rng)).collect();
        let r = compare_fields(&pts);
        assert!(r.chain_rule_residual < 1e-9);
        assert_eq!(r.rows.len(), 10 * DIM * 20);
        for s in &r.summaries {
            match s.field {
                "{m1,.}" => {
                    assert!(!s.matches_up_to_sign);
                    assert_eq!(s.mismatched_components, vec!["r21", "r31"]);
                    assert_eq!(s.sign_flipped_components, vec!["r21", "r31"]);
                }
                "{r11,.}" | "J_r11" | "J_r12" => {
                    assert!(!s.matches && s.matches_up_to_sign, "{}", s.field);
                    assert!(s.max_delta_flipped < FIELD_TOL);
                }
                _ => assert!(s.matches, "{}", s.field),
            }
        }
    }

    proptest! {
        #[test]
        fn chart_round_trip(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_hermitian(4, &mut rng);
            let p = to_chart(&a).unwrap();
            prop_assert!(max_abs(&(from_chart(&p).into_matrix() - a.matrix())) < 1e-12);
            let q = random_point(&mut rng);
            let back = U4ChartPoint::from_matrix(&q.to_matrix()).unwrap();
            let d = back.to_vector().iter().zip(q.to_vector()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            prop_assert!(d < 1e-12);
        }

        #[test]
        fn poisson_matrix_antisymmetric(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = random_point(&mut rng);
            let (pm, rm) = chart_tensors(&p);
            prop_assert!((&pm + pm.transpose()).amax() < 1e-12);
            prop_assert!((&rm - rm.transpose()).amax() < 1e-12);
        }
    }
}
