use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub type C64 = Complex64;
pub type Vec3 = [f64; 3];

pub(crate) const I: C64 = C64::new(0.0, 1.0);

/// Real 3×3 matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Mat3R(pub [[f64; 3]; 3]);

impl Mat3R {
    pub const fn zero() -> Self {
        Self([[0.0; 3]; 3])
    }

    pub const fn identity() -> Self {
        Self([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    }

    pub const fn diag(d: Vec3) -> Self {
        Self([[d[0], 0.0, 0.0], [0.0, d[1], 0.0], [0.0, 0.0, d[2]]])
    }

    pub fn from_rows(rows: [[f64; 3]; 3]) -> Self {
        Self(rows)
    }

    pub fn rows(&self) -> &[[f64; 3]; 3] {
        &self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|x| x.is_finite())
    }

    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    /// Determinant by cofactor expansion along the first row.
    pub fn det(&self) -> f64 {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// Sum of the three principal 2×2 minors (the middle coefficient of the
    /// characteristic polynomial).
    pub fn principal_minor_sum(&self) -> f64 {
        let m = &self.0;
        (m[0][0] * m[1][1] - m[0][1] * m[1][0])
            + (m[0][0] * m[2][2] - m[0][2] * m[2][0])
            + (m[1][1] * m[2][2] - m[1][2] * m[2][1])
    }

    pub fn transpose(&self) -> Self {
        let m = &self.0;
        Self([
            [m[0][0], m[1][0], m[2][0]],
            [m[0][1], m[1][1], m[2][1]],
            [m[0][2], m[1][2], m[2][2]],
        ])
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.map(|row| row.map(|x| x * s)))
    }

    pub fn mul_vec(&self, v: &Vec3) -> Vec3 {
        self.0.map(|row| row[0] * v[0] + row[1] * v[1] + row[2] * v[2])
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        self.0
            .iter()
            .map(|row| row.iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn norm_frobenius(&self) -> f64 {
        self.0.iter().flatten().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Largest Euclidean row norm.
    pub fn max_row_norm(&self) -> f64 {
        self.0.iter().map(norm3).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().fold(0.0, |a, x| a.max(x.abs()))
    }

    pub fn to_array(self) -> [[f64; 3]; 3] {
        self.0
    }
}

impl Add for Mat3R {
    type Output = Mat3R;
    fn add(self, rhs: Mat3R) -> Mat3R {
        let mut out = self;
        for i in 0..3 {
            for j in 0..3 {
                out.0[i][j] += rhs.0[i][j];
            }
        }
        out
    }
}

impl Sub for Mat3R {
    type Output = Mat3R;
    fn sub(self, rhs: Mat3R) -> Mat3R {
        self + (-rhs)
    }
}

impl Neg for Mat3R {
    type Output = Mat3R;
    fn neg(self) -> Mat3R {
        self.scale(-1.0)
    }
}

impl Mul for Mat3R {
    type Output = Mat3R;
    fn mul(self, rhs: Mat3R) -> Mat3R {
        Mat3R(matmul(&self.0, &rhs.0))
    }
}

/// Hermitian 3×3 complex matrix. Only the diagonal and the strict upper
/// triangle are free; the lower triangle is always the conjugate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat3H {
    entries: [[C64; 3]; 3],
}

impl Mat3H {
    /// `upper` holds the (0,1), (0,2), (1,2) entries.
    pub fn from_parts(diag: Vec3, upper: [C64; 3]) -> Self {
        let z = C64::new(0.0, 0.0);
        let mut e = [[z; 3]; 3];
        for (i, d) in diag.iter().enumerate() {
            e[i][i] = C64::new(*d, 0.0);
        }
        for (k, (i, j)) in UPPER.iter().enumerate() {
            e[*i][*j] = upper[k];
            e[*j][*i] = upper[k].conj();
        }
        Self { entries: e }
    }

    pub fn zero() -> Self {
        Self::from_parts([0.0; 3], [C64::new(0.0, 0.0); 3])
    }

    pub fn identity() -> Self {
        Self::from_parts([1.0; 3], [C64::new(0.0, 0.0); 3])
    }

    /// Accepts a full matrix if it is Hermitian to within `tol` (absolute);
    /// the upper triangle and real diagonal are kept.
    pub fn try_from_rows(rows: [[C64; 3]; 3], tol: f64) -> Option<Self> {
        for i in 0..3 {
            for j in i..3 {
                if (rows[i][j] - rows[j][i].conj()).norm() > tol {
                    return None;
                }
            }
        }
        Some(Self::from_parts(
            [rows[0][0].re, rows[1][1].re, rows[2][2].re],
            [rows[0][1], rows[0][2], rows[1][2]],
        ))
    }

    /// `B·B†`, Hermitian and positive semidefinite.
    pub fn gram(b: &[[C64; 3]; 3]) -> Self {
        let dot = |i: usize, j: usize| -> C64 { (0..3).map(|k| b[i][k] * b[j][k].conj()).sum() };
        Self::from_parts(
            [dot(0, 0).re, dot(1, 1).re, dot(2, 2).re],
            [dot(0, 1), dot(0, 2), dot(1, 2)],
        )
    }

    pub fn rows(&self) -> &[[C64; 3]; 3] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.entries[i][j]
    }

    pub fn diagonal(&self) -> Vec3 {
        [
            self.entries[0][0].re,
            self.entries[1][1].re,
            self.entries[2][2].re,
        ]
    }

    pub fn upper(&self) -> [C64; 3] {
        UPPER.map(|(i, j)| self.entries[i][j])
    }

    pub fn is_finite(&self) -> bool {
        self.entries
            .iter()
            .flatten()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn trace(&self) -> f64 {
        self.diagonal().iter().sum()
    }

    /// Real because the matrix is Hermitian.
    pub fn det(&self) -> f64 {
        let [d0, d1, d2] = self.diagonal();
        let [c01, c02, c12] = self.upper();
        d0 * d1 * d2 + 2.0 * (c01 * c12 * c02.conj()).re
            - d0 * c12.norm_sqr()
            - d1 * c02.norm_sqr()
            - d2 * c01.norm_sqr()
    }

    pub fn norm_frobenius(&self) -> f64 {
        self.entries
            .iter()
            .flatten()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::from_parts(self.diagonal().map(|d| d * s), self.upper().map(|z| z * s))
    }

    pub fn shifted(&self, shift: f64) -> Self {
        Self::from_parts(self.diagonal().map(|d| d - shift), self.upper())
    }

    /// `R·C·Rᵀ` for a real orthogonal `r`.
    pub fn congruence(&self, r: &Mat3R) -> Self {
        let mut out = [[C64::new(0.0, 0.0); 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, slot) in row.iter_mut().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for k in 0..3 {
                    for l in 0..3 {
                        acc += self.entries[k][l] * (r.0[i][k] * r.0[j][l]);
                    }
                }
                *slot = acc;
            }
        }
        Self::from_parts(
            [out[0][0].re, out[1][1].re, out[2][2].re],
            [out[0][1], out[0][2], out[1][2]],
        )
    }

    pub fn mul_full(&self, rhs: &Mat3H) -> [[C64; 3]; 3] {
        let mut out = [[C64::new(0.0, 0.0); 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, slot) in row.iter_mut().enumerate() {
                *slot = (0..3).map(|k| self.entries[i][k] * rhs.entries[k][j]).sum();
            }
        }
        out
    }
}

const UPPER: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

/// Complex 2×2 matrix, row-major. Density matrices and their derivatives.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2C(pub [[C64; 2]; 2]);

impl Mat2C {
    pub fn zero() -> Self {
        Self([[C64::new(0.0, 0.0); 2]; 2])
    }

    pub fn identity() -> Self {
        let (o, z) = (C64::new(1.0, 0.0), C64::new(0.0, 0.0));
        Self([[o, z], [z, o]])
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        Self([[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]])
    }

    pub fn scale(&self, s: C64) -> Self {
        Self(self.0.map(|row| row.map(|x| x * s)))
    }

    pub fn commutator(&self, rhs: &Mat2C) -> Self {
        *self * *rhs - *rhs * *self
    }

    /// Largest entrywise distance from the adjoint.
    pub fn hermiticity_defect(&self) -> f64 {
        let adj = self.adjoint();
        (*self - adj)
            .0
            .iter()
            .flatten()
            .fold(0.0, |a, z| a.max(z.norm()))
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().fold(0.0, |a, z| a.max(z.norm()))
    }
}

impl Add for Mat2C {
    type Output = Mat2C;
    fn add(self, rhs: Mat2C) -> Mat2C {
        let mut out = self;
        for i in 0..2 {
            for j in 0..2 {
                out.0[i][j] += rhs.0[i][j];
            }
        }
        out
    }
}

impl Sub for Mat2C {
    type Output = Mat2C;
    fn sub(self, rhs: Mat2C) -> Mat2C {
        self + rhs.scale(C64::new(-1.0, 0.0))
    }
}

impl Mul for Mat2C {
    type Output = Mat2C;
    fn mul(self, rhs: Mat2C) -> Mat2C {
        let mut out = Mat2C::zero();
        for i in 0..2 {
            for j in 0..2 {
                out.0[i][j] = self.0[i][0] * rhs.0[0][j] + self.0[i][1] * rhs.0[1][j];
            }
        }
        out
    }
}

pub fn matmul<const N: usize>(a: &[[f64; N]; N], b: &[[f64; N]; N]) -> [[f64; N]; N] {
    let mut out = [[0.0; N]; N];
    for i in 0..N {
        for k in 0..N {
            let aik = a[i][k];
            for j in 0..N {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

pub fn dot3(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross3(a: &Vec3, b: &Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn norm3(a: &Vec3) -> f64 {
    dot3(a, a).sqrt()
}
