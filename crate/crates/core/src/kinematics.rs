//! Attitude representations: Hamilton quaternions (scalar first), rotation
//! vectors, Rodrigues vectors and direction cosine matrices.
//!
//! Body rates compose on the right, `2q̇ = q ∘ ω`. A DCM built here is the
//! attitude matrix of the body frame relative to the reference frame, so it
//! maps reference-frame coordinates into body coordinates:
//! `C v = vec(q* ∘ v ∘ q)`.

use std::ops::Mul;

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;

/// Below this magnitude the rotation-vector maps switch to series.
pub const SMALL_ANGLE: f64 = 1e-8;

/// Rodrigues vectors are only extracted for `|w|` above this.
pub const RODRIGUES_MIN_W: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Default for Quaternion {
    fn default() -> Self {
        Self::identity()
    }
}

impl Quaternion {
    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Self { w, x, y, z }
    }

    pub const fn identity() -> Self {
        Self::new(1.0, 0.0, 0.0, 0.0)
    }

    pub fn from_parts(w: f64, v: Vec3) -> Self {
        Self::new(w, v.x, v.y, v.z)
    }

    /// Pure quaternion `[0, v]`.
    pub fn pure(v: Vec3) -> Self {
        Self::from_parts(0.0, v)
    }

    /// Rotation by `angle` about the unit `axis`.
    pub fn from_axis_angle(axis: Vec3, angle: f64) -> Self {
        let (s, c) = (0.5 * angle).sin_cos();
        Self::from_parts(c, axis * s)
    }

    pub fn vector(&self) -> Vec3 {
        Vec3::new(self.x, self.y, self.z)
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    pub fn norm(&self) -> f64 {
        (self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn conjugate(&self) -> Self {
        Self::new(self.w, -self.x, -self.y, -self.z)
    }

    pub fn scale(&self, k: f64) -> Self {
        Self::new(self.w * k, self.x * k, self.y * k, self.z * k)
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)
    }

    pub fn normalize(&self) -> Result<Self> {
        let n = self.norm();
        if !(n >= 1e-15) {
            return Err(Error::DegenerateQuaternion { norm: n });
        }
        Ok(self.scale(1.0 / n))
    }

    /// Hamilton product `self ∘ rhs`.
    pub fn multiply(&self, rhs: &Self) -> Self {
        let (a, b) = (self, rhs);
        Self::new(
            a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
        )
    }

    /// Active rotation `vec(q ∘ v ∘ q*)`.
    pub fn rotate(&self, v: &Vec3) -> Vec3 {
        self.multiply(&Self::pure(*v)).multiply(&self.conjugate()).vector()
    }

    /// Attitude matrix with `C v = vec(q* ∘ v ∘ q)` (q assumed unit).
    pub fn to_dcm(&self) -> Dcm {
        let (w, x, y, z) = (self.w, self.x, self.y, self.z);
        // transpose of the active rotation matrix
        Dcm(Matrix3::new(
            w * w + x * x - y * y - z * z,
            2.0 * (x * y + w * z),
            2.0 * (x * z - w * y),
            2.0 * (x * y - w * z),
            w * w - x * x + y * y - z * z,
            2.0 * (y * z + w * x),
            2.0 * (x * z + w * y),
            2.0 * (y * z - w * x),
            w * w - x * x - y * y + z * z,
        ))
    }

    /// `g = 2 vec(q) / w`, defined while the rotation angle stays below π.
    pub fn to_rodrigues(&self) -> Result<Vec3> {
        if !(self.w.abs() > RODRIGUES_MIN_W) {
            return Err(Error::RodriguesSingular { w: self.w });
        }
        Ok(self.vector() * (2.0 / self.w))
    }

    /// Rotation vector with angle in `[0, π]`.
    pub fn to_rotvec(&self) -> Vec3 {
        let q = if self.w < 0.0 { self.scale(-1.0) } else { *self };
        let v = q.vector();
        let s = v.norm();
        if s < SMALL_ANGLE {
            return v * (2.0 / q.w.max(f64::MIN_POSITIVE));
        }
        v * (2.0 * s.atan2(q.w) / s)
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;

    fn mul(self, rhs: Self) -> Self {
        self.multiply(&rhs)
    }
}

/// `q = (2 + g) / √(4 + |g|²)`.
pub fn quat_from_rodrigues(g: &Vec3) -> Quaternion {
    let inv = 1.0 / (4.0 + g.norm_squared()).sqrt();
    Quaternion::from_parts(2.0 * inv, g * inv)
}

/// `q = cos(|g|/2) + (g/|g|) sin(|g|/2)`.
pub fn quat_from_rotvec(g: &Vec3) -> Quaternion {
    let a2 = g.norm_squared();
    let a = a2.sqrt();
    if a < SMALL_ANGLE {
        // sin(a/2)/a ≈ 1/2 − a²/48
        return Quaternion::from_parts(1.0 - a2 / 8.0, g * (0.5 - a2 / 48.0));
    }
    let (s, c) = (0.5 * a).sin_cos();
    Quaternion::from_parts(c, g * (s / a))
}

/// Skew matrix with `skew(g) v = g × v`.
pub fn skew(g: &Vec3) -> Matrix3<f64> {
    Matrix3::new(0.0, -g.z, g.y, g.z, 0.0, -g.x, -g.y, g.x, 0.0)
}

/// Direction cosine matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dcm(pub Matrix3<f64>);

impl Dcm {
    pub fn identity() -> Self {
        Self(Matrix3::identity())
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn apply(&self, v: &Vec3) -> Vec3 {
        self.0 * v
    }

    /// Largest entry of `|CᵀC − I|`.
    pub fn orthonormality_error(&self) -> f64 {
        (self.0.transpose() * self.0 - Matrix3::identity()).abs().max()
    }

    pub fn determinant(&self) -> f64 {
        self.0.determinant()
    }
}

/// `C = I − (4/(4+|g|²)) g× + (2/(4+|g|²)) (g×)²`.
pub fn dcm_from_rodrigues(g: &Vec3) -> Dcm {
    let k = skew(g);
    let d = 4.0 + g.norm_squared();
    Dcm(Matrix3::identity() - k * (4.0 / d) + k * k * (2.0 / d))
}

/// `C = I − (sin|g|/|g|) g× + ((1 − cos|g|)/|g|²) (g×)²`.
pub fn dcm_from_rotvec(g: &Vec3) -> Dcm {
    let k = skew(g);
    let a2 = g.norm_squared();
    let a = a2.sqrt();
    let (s, c) = if a < SMALL_ANGLE {
        (1.0 - a2 / 6.0, 0.5 - a2 / 24.0)
    } else {
        (a.sin() / a, (1.0 - a.cos()) / a2)
    };
    Dcm(Matrix3::identity() - k * s + k * k * c)
}

/// `ε = 2·|vec(q_est* ∘ q_true)|` in radians.
pub fn attitude_error(q_est: &Quaternion, q_true: &Quaternion) -> f64 {
    2.0 * q_est.conjugate().multiply(q_true).vector().norm()
}

/// Body-frame incremental update `q_start ∘ q(g_inc)`, renormalized.
pub fn update_attitude(q_start: &Quaternion, g_inc: &Vec3) -> Quaternion {
    let q = q_start.multiply(&quat_from_rodrigues(g_inc));
    q.normalize().unwrap_or(q)
}
