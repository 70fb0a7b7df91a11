//! Minkowski 3-space `M³` and its identification with `sl₂(ℝ)`.
//!
//! Coordinates are `(x, y, z)` with `z` time-like, so the form is
//! `(u, v) = u_z v_z − u_x v_x − u_y v_y`. The bracket `[u, v]` is the
//! Lorentzian cross product, characterized by `([u, v], w) = det(u, v, w)`.
//! Under [`to_sl2`] it becomes half the matrix commutator.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

/// A vector of `M³`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct MinkVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl MinkVector {
    pub const ZERO: MinkVector = MinkVector::new(0.0, 0.0, 0.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    /// Rejects NaN and infinite coordinates.
    pub fn try_new(x: f64, y: f64, z: f64) -> Option<Self> {
        (x.is_finite() && y.is_finite() && z.is_finite()).then_some(Self { x, y, z })
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(self, other: Self) -> f64 {
        mink_dot(self, other)
    }

    pub fn bracket(self, other: Self) -> Self {
        mink_bracket(self, other)
    }

    /// The Minkowski square `(u, u)`.
    pub fn norm_sq(self) -> f64 {
        mink_dot(self, self)
    }

    /// Euclidean length of the coordinate triple.
    pub fn euclid_norm(self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn norm_inf(self) -> f64 {
        self.x.abs().max(self.y.abs()).max(self.z.abs())
    }

    /// Euclidean cross product in `ℝ³`.
    pub fn cross(self, o: Self) -> Self {
        Self::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    /// Lowers the index: the coordinate vector `G u` with `G = diag(−1, −1, 1)`,
    /// so that `(u, v) = u · G v` in Euclidean terms.
    pub fn lower(self) -> Self {
        Self::new(-self.x, -self.y, self.z)
    }
}

impl From<[f64; 3]> for MinkVector {
    fn from(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }
}

impl From<MinkVector> for [f64; 3] {
    fn from(v: MinkVector) -> Self {
        v.to_array()
    }
}

impl fmt::Display for MinkVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

impl Add for MinkVector {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for MinkVector {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for MinkVector {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for MinkVector {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Mul<MinkVector> for f64 {
    type Output = MinkVector;
    fn mul(self, v: MinkVector) -> MinkVector {
        v * self
    }
}

impl Div<f64> for MinkVector {
    type Output = Self;
    fn div(self, s: f64) -> Self {
        Self::new(self.x / s, self.y / s, self.z / s)
    }
}

impl AddAssign for MinkVector {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl SubAssign for MinkVector {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl std::iter::Sum for MinkVector {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::ZERO, Add::add)
    }
}

/// `(u, v) = u_z v_z − u_x v_x − u_y v_y`.
pub fn mink_dot(u: MinkVector, v: MinkVector) -> f64 {
    u.z * v.z - u.x * v.x - u.y * v.y
}

/// The Lorentzian cross product `[u, v] = G (u × v)`, `G = diag(−1, −1, 1)`.
pub fn mink_bracket(u: MinkVector, v: MinkVector) -> MinkVector {
    u.cross(v).lower()
}

/// Causal character of a vector with respect to a tolerance on `(u, u)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CausalClass {
    TimeLike,
    SpaceLike,
    LightLike,
}

pub fn classify(u: MinkVector, tol: f64) -> CausalClass {
    let s = mink_dot(u, u);
    if s > tol {
        CausalClass::TimeLike
    } else if s < -tol {
        CausalClass::SpaceLike
    } else {
        CausalClass::LightLike
    }
}

/// Whether `u` and `v` are linearly dependent, judged by `|u × v| ≤ tol · |u||v|`.
pub fn are_parallel(u: MinkVector, v: MinkVector, tol: f64) -> bool {
    u.cross(v).euclid_norm() <= tol * u.euclid_norm() * v.euclid_norm()
}

/// A trace-free 2×2 matrix `[[a, b], [c, −a]]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Sl2Matrix {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Sl2Matrix {
    pub const fn new(a: f64, b: f64, c: f64) -> Self {
        Self { a, b, c }
    }

    /// `[[0, 1], [1, 0]]`.
    pub const E1: Sl2Matrix = Sl2Matrix::new(0.0, 1.0, 1.0);
    /// `[[1, 0], [0, −1]]`.
    pub const E2: Sl2Matrix = Sl2Matrix::new(1.0, 0.0, 0.0);
    /// `[[0, −1], [1, 0]]`.
    pub const E3: Sl2Matrix = Sl2Matrix::new(0.0, -1.0, 1.0);

    pub fn to_rows(self) -> [[f64; 2]; 2] {
        [[self.a, self.b], [self.c, -self.a]]
    }

    pub fn trace(self) -> f64 {
        0.0
    }

    pub fn dot(self, other: Self) -> f64 {
        sl2_dot(self, other)
    }

    pub fn bracket(self, other: Self) -> Self {
        sl2_bracket(self, other)
    }
}

impl Add for Sl2Matrix {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.a + o.a, self.b + o.b, self.c + o.c)
    }
}

impl Sub for Sl2Matrix {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.a - o.a, self.b - o.b, self.c - o.c)
    }
}

impl Mul<f64> for Sl2Matrix {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self::new(self.a * s, self.b * s, self.c * s)
    }
}

/// `(x, y, z) ↦ [[x, y + z], [y − z, −x]]`.
pub fn to_sl2(u: MinkVector) -> Sl2Matrix {
    Sl2Matrix::new(u.x, u.y + u.z, u.y - u.z)
}

/// `[[a, b], [c, −a]] ↦ (a, (b + c)/2, (b − c)/2)`.
pub fn from_sl2(m: Sl2Matrix) -> MinkVector {
    MinkVector::new(m.a, 0.5 * (m.b + m.c), 0.5 * (m.b - m.c))
}

/// `(A, B) = −½ tr(AB)`.
pub fn sl2_dot(m: Sl2Matrix, n: Sl2Matrix) -> f64 {
    -(m.a * n.a) - 0.5 * (m.b * n.c + m.c * n.b)
}

/// Half the matrix commutator, `½ (AB − BA)`.
pub fn sl2_bracket(m: Sl2Matrix, n: Sl2Matrix) -> Sl2Matrix {
    Sl2Matrix::new(
        0.5 * (m.b * n.c - n.b * m.c),
        m.a * n.b - n.a * m.b,
        m.c * n.a - n.c * m.a,
    )
}
