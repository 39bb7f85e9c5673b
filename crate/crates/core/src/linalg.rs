//! Minimal fixed-size 2-vector and 2×2 matrix algebra for single-mode phase space.

use std::ops::{Add, Mul, Neg, Sub};

use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Vec2<T>(pub [T; 2]);

/// Row-major 2×2 matrix.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Mat2<T>(pub [[T; 2]; 2]);

impl<T: Real> Vec2<T> {
    pub fn new(x: T, y: T) -> Self {
        Vec2([x, y])
    }

    pub fn zero() -> Self {
        Vec2([T::zero(); 2])
    }

    pub fn dot(&self, other: &Self) -> T {
        self.0[0] * other.0[0] + self.0[1] * other.0[1]
    }

    pub fn norm_sqr(&self) -> T {
        self.dot(self)
    }

    pub fn scale(&self, s: T) -> Self {
        Vec2([self.0[0] * s, self.0[1] * s])
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        (self.0[0] - other.0[0])
            .abs()
            .max((self.0[1] - other.0[1]).abs())
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }
}

impl<T: Real> Mat2<T> {
    pub fn new(a: T, b: T, c: T, d: T) -> Self {
        Mat2([[a, b], [c, d]])
    }

    pub fn identity() -> Self {
        Self::diag(T::one(), T::one())
    }

    pub fn zero() -> Self {
        Mat2([[T::zero(); 2]; 2])
    }

    pub fn diag(a: T, d: T) -> Self {
        Self::new(a, T::zero(), T::zero(), d)
    }

    /// Phase-space rotation `[[cos x, sin x], [-sin x, cos x]]`.
    pub fn rotation(x: T) -> Self {
        let (s, c) = x.sin_cos();
        Self::new(c, s, -s, c)
    }

    /// Generator of [`Mat2::rotation`]: `d/dx R(x) = J R(x)`.
    pub fn rotation_generator() -> Self {
        Self::new(T::zero(), T::one(), -T::one(), T::zero())
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.0[i][j]
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.0[0][0], self.0[1][0], self.0[0][1], self.0[1][1])
    }

    pub fn det(&self) -> T {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn trace(&self) -> T {
        self.0[0][0] + self.0[1][1]
    }

    /// Inverse, or `None` when the determinant is not a normal nonzero number.
    pub fn inverse(&self) -> Option<Self> {
        let det = self.det();
        if det == T::zero() || !det.is_finite() {
            return None;
        }
        let inv = T::one() / det;
        Some(Self::new(
            self.0[1][1] * inv,
            -self.0[0][1] * inv,
            -self.0[1][0] * inv,
            self.0[0][0] * inv,
        ))
    }

    pub fn scale(&self, s: T) -> Self {
        let m = self.0;
        Self::new(m[0][0] * s, m[0][1] * s, m[1][0] * s, m[1][1] * s)
    }

    pub fn mul_vec(&self, v: &Vec2<T>) -> Vec2<T> {
        let m = self.0;
        Vec2([
            m[0][0] * v.0[0] + m[0][1] * v.0[1],
            m[1][0] * v.0[0] + m[1][1] * v.0[1],
        ])
    }

    /// `vᵀ M v`.
    pub fn quad_form(&self, v: &Vec2<T>) -> T {
        v.dot(&self.mul_vec(v))
    }

    /// `R M Rᵀ`.
    pub fn congruence(&self, r: &Self) -> Self {
        *r * *self * r.transpose()
    }

    pub fn asymmetry(&self) -> T {
        (self.0[0][1] - self.0[1][0]).abs()
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        let mut out = T::zero();
        for i in 0..2 {
            for j in 0..2 {
                out = out.max((self.0[i][j] - other.0[i][j]).abs());
            }
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|x| x.is_finite())
    }
}

impl<T: Real> Add for Vec2<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Vec2([self.0[0] + rhs.0[0], self.0[1] + rhs.0[1]])
    }
}

impl<T: Real> Sub for Vec2<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Vec2([self.0[0] - rhs.0[0], self.0[1] - rhs.0[1]])
    }
}

impl<T: Real> Neg for Vec2<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Vec2([-self.0[0], -self.0[1]])
    }
}

impl<T: Real> Add for Mat2<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let (a, b) = (self.0, rhs.0);
        Mat2::new(
            a[0][0] + b[0][0],
            a[0][1] + b[0][1],
            a[1][0] + b[1][0],
            a[1][1] + b[1][1],
        )
    }
}

impl<T: Real> Sub for Mat2<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + rhs.scale(-T::one())
    }
}

impl<T: Real> Mul for Mat2<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let (a, b) = (self.0, rhs.0);
        Mat2::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}
