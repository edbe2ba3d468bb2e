//! Complex scalars and 2×2 complex linear algebra.
//!
//! Every Hamiltonian handled by this crate is a traceless 2×2 block
//! `H = d·σ`, so eigenvalues, eigenvectors and propagators are written in
//! closed form instead of going through a general eigensolver.
//!
//! Matrices are row-major in the sublattice basis `{a, b}`: `m.0[r][c]` is the
//! entry in row `r`, column `c`.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{DqptError, Result};

pub type ComplexScalar = Complex64;

pub const ZERO: ComplexScalar = Complex64::new(0.0, 0.0);
pub const ONE: ComplexScalar = Complex64::new(1.0, 0.0);
pub const I: ComplexScalar = Complex64::new(0.0, 1.0);

/// Numerical tolerances shared by the linear-algebra layers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Largest `|tr H|` accepted as traceless.
    pub trace: f64,
    /// `|ε| < exceptional · ‖H‖` counts as an exceptional point.
    pub exceptional: f64,
    /// Largest imaginary part dropped from a quantity that must be real.
    pub real_residue: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            trace: 1e-12,
            exceptional: 1e-9,
            real_residue: 1e-8,
        }
    }
}

/// Principal square root: non-negative real part, and non-negative imaginary
/// part when the real part vanishes (so `sqrt(-1) = i` regardless of the sign
/// of a zero imaginary part).
pub fn principal_sqrt(z: ComplexScalar) -> ComplexScalar {
    let r = z.sqrt();
    if r.re < 0.0 || (r.re == 0.0 && r.im < 0.0) {
        -r
    } else {
        r
    }
}

/// `cos(x)` and `sin(x)/x` for complex `x`, with the removable singularity
/// handled by a short series.
pub(crate) fn cos_sinc(x: ComplexScalar) -> (ComplexScalar, ComplexScalar) {
    if x.norm() < 1e-4 {
        let x2 = x * x;
        let cos = ONE - x2 / 2.0 + x2 * x2 / 24.0;
        let sinc = ONE - x2 / 6.0 + x2 * x2 / 120.0;
        (cos, sinc)
    } else {
        (x.cos(), x.sin() / x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vec2(pub [ComplexScalar; 2]);

impl Vec2 {
    pub const fn new(a: ComplexScalar, b: ComplexScalar) -> Self {
        Self([a, b])
    }

    pub fn from_real(a: f64, b: f64) -> Self {
        Self([Complex64::new(a, 0.0), Complex64::new(b, 0.0)])
    }

    /// `⟨self|other⟩`, conjugate-linear in `self`.
    pub fn dot(&self, other: &Vec2) -> ComplexScalar {
        self.0[0].conj() * other.0[0] + self.0[1].conj() * other.0[1]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0[0].norm_sqr() + self.0[1].norm_sqr()
    }

    pub fn scale(&self, s: ComplexScalar) -> Vec2 {
        Vec2([self.0[0] * s, self.0[1] * s])
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.is_finite())
    }

    pub fn max_abs_diff(&self, other: &Vec2) -> f64 {
        (self.0[0] - other.0[0]).norm().max((self.0[1] - other.0[1]).norm())
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2([self.0[0] + rhs.0[0], self.0[1] + rhs.0[1]])
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2([self.0[0] - rhs.0[0], self.0[1] - rhs.0[1]])
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2([-self.0[0], -self.0[1]])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[ComplexScalar; 2]; 2]);

impl Mat2 {
    pub const fn new(m00: ComplexScalar, m01: ComplexScalar, m10: ComplexScalar, m11: ComplexScalar) -> Self {
        Self([[m00, m01], [m10, m11]])
    }

    pub const fn identity() -> Self {
        Self([[ONE, ZERO], [ZERO, ONE]])
    }

    pub const fn zero() -> Self {
        Self([[ZERO, ZERO], [ZERO, ZERO]])
    }

    pub const fn sigma_x() -> Self {
        Self([[ZERO, ONE], [ONE, ZERO]])
    }

    pub fn sigma_y() -> Self {
        Self([[ZERO, -I], [I, ZERO]])
    }

    pub fn sigma_z() -> Self {
        Self([[ONE, ZERO], [ZERO, -ONE]])
    }

    /// Zero-diagonal matrix with `m01 = upper`, `m10 = lower`.
    pub const fn off_diagonal(upper: ComplexScalar, lower: ComplexScalar) -> Self {
        Self([[ZERO, upper], [lower, ZERO]])
    }

    pub fn trace(&self) -> ComplexScalar {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> ComplexScalar {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn dagger(&self) -> Mat2 {
        let m = &self.0;
        Mat2([[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]])
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, s: ComplexScalar) -> Mat2 {
        let m = &self.0;
        Mat2([[m[0][0] * s, m[0][1] * s], [m[1][0] * s, m[1][1] * s]])
    }

    pub fn max_abs_diff(&self, other: &Mat2) -> f64 {
        self.0
            .iter()
            .flatten()
            .zip(other.0.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|z| z.is_finite())
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, rhs: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &rhs.0);
        Mat2([
            [a[0][0] + b[0][0], a[0][1] + b[0][1]],
            [a[1][0] + b[1][0], a[1][1] + b[1][1]],
        ])
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, rhs: Mat2) -> Mat2 {
        self + rhs.scale(-ONE)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &rhs.0);
        Mat2([
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ])
    }
}

impl Mul<Vec2> for Mat2 {
    type Output = Vec2;
    fn mul(self, v: Vec2) -> Vec2 {
        mat_vec(&self, &v)
    }
}

pub fn mat_vec(m: &Mat2, v: &Vec2) -> Vec2 {
    Vec2([
        m.0[0][0] * v.0[0] + m.0[0][1] * v.0[1],
        m.0[1][0] * v.0[0] + m.0[1][1] * v.0[1],
    ])
}

/// Quasi-energy `ε` of a traceless block, fixed by `ε² = -det H` and the
/// principal branch.
pub fn traceless_energy(h: &Mat2) -> ComplexScalar {
    principal_sqrt(-h.det())
}

/// `exp(-iHt) = cos(εt)·I - i·sin(εt)/ε·H` for traceless `H`.
pub fn traceless_exp(h: &Mat2, t: f64) -> Result<Mat2> {
    traceless_exp_with(h, t, &Tolerances::default())
}

pub fn traceless_exp_with(h: &Mat2, t: f64, tol: &Tolerances) -> Result<Mat2> {
    let trace = h.trace().norm();
    if trace > tol.trace * h.norm().max(1.0) {
        return Err(DqptError::NonTraceless { trace });
    }
    let eps = traceless_energy(h);
    let (cos, sinc) = if eps.norm() < tol.exceptional * h.norm() {
        // Nilpotent limit: H² = 0, so the series stops at first order.
        (ONE, ONE)
    } else {
        cos_sinc(eps * t)
    };
    Ok(Mat2::identity().scale(cos) + h.scale(-I * sinc * t))
}
