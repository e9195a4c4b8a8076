//! Rotation and pose mathematics.
//!
//! Rotations are plain 3x3 matrices wrapped in [`RotationMatrix`]; the
//! attitude error between two orientations is the exponential-coordinate
//! vector of `R^T R_d`, obtained through the SO(3) logarithm.

use core::f64::consts::PI;
use core::ops::Mul;

use nalgebra::{Matrix3, Vector3};

use crate::{Error, Result};

pub type Vec3 = Vector3<f64>;
pub type Mat3 = Matrix3<f64>;

/// Frobenius tolerance used when validating externally supplied rotations.
pub const ORTHOGONALITY_TOL: f64 = 1e-6;

/// Below this trace offset from -1 the logarithm extracts the axis from the
/// symmetric part instead of dividing by `sin(theta)`.
const NEAR_PI_TRACE: f64 = -1.0 + 1e-6;

/// A member of SO(3).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RotationMatrix(Mat3);

impl RotationMatrix {
    /// Validates orthogonality and orientation within [`ORTHOGONALITY_TOL`].
    pub fn new(m: Mat3) -> Result<Self> {
        let deviation = deviation_from_so3(&m);
        if !deviation.is_finite() || deviation > ORTHOGONALITY_TOL {
            return Err(Error::InvalidRotation { deviation });
        }
        Ok(Self(m))
    }

    /// Wraps a matrix known to be a rotation (products of rotations, Rodrigues).
    pub(crate) fn from_matrix_unchecked(m: Mat3) -> Self {
        Self(m)
    }

    pub fn identity() -> Self {
        Self(Mat3::identity())
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.0
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    /// `max(||R^T R - I||_F, |det R - 1|)`.
    pub fn deviation(&self) -> f64 {
        deviation_from_so3(&self.0)
    }

    pub fn is_valid(&self, tol: f64) -> bool {
        self.deviation() <= tol
    }

    pub fn transform(&self, v: &Vec3) -> Vec3 {
        self.0 * v
    }
}

impl Default for RotationMatrix {
    fn default() -> Self {
        Self::identity()
    }
}

impl Mul for RotationMatrix {
    type Output = RotationMatrix;

    fn mul(self, rhs: RotationMatrix) -> RotationMatrix {
        RotationMatrix(self.0 * rhs.0)
    }
}

fn deviation_from_so3(m: &Mat3) -> f64 {
    let ortho = (m.transpose() * m - Mat3::identity()).norm();
    let det = (m.determinant() - 1.0).abs();
    ortho.max(det)
}

/// Position (NED, metres) plus orientation of the body frame in the world.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Pose {
    pub position: Vec3,
    pub rotation: RotationMatrix,
}

impl Pose {
    pub fn new(position: Vec3, rotation: RotationMatrix) -> Self {
        Self { position, rotation }
    }

    /// Pose from NED position and roll/pitch/heading angles.
    pub fn from_xyz_rpy(x: f64, y: f64, z: f64, roll: f64, pitch: f64, heading: f64) -> Self {
        Self::new(Vec3::new(x, y, z), rpy_to_rotation(roll, pitch, heading))
    }

    pub fn is_finite(&self) -> bool {
        self.position.iter().all(|v| v.is_finite()) && self.rotation.0.iter().all(|v| v.is_finite())
    }
}

/// Skew-symmetric matrix `[v]x`.
pub fn hat(v: &Vec3) -> Mat3 {
    Mat3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

/// Rodrigues' formula.
pub fn so3_exp(v: &Vec3) -> RotationMatrix {
    let theta_sq = v.norm_squared();
    let theta = libm::sqrt(theta_sq);
    let (a, b) = if theta < 1e-4 {
        (
            1.0 - theta_sq / 6.0 + theta_sq * theta_sq / 120.0,
            0.5 - theta_sq / 24.0 + theta_sq * theta_sq / 720.0,
        )
    } else {
        (libm::sin(theta) / theta, (1.0 - libm::cos(theta)) / theta_sq)
    };
    let k = hat(v);
    RotationMatrix(Mat3::identity() + k * a + k * k * b)
}

/// Exponential coordinates of a rotation; the result has norm in `[0, pi]`.
pub fn so3_log(r: &RotationMatrix) -> Result<Vec3> {
    let deviation = r.deviation();
    if !deviation.is_finite() || deviation > ORTHOGONALITY_TOL {
        return Err(Error::InvalidRotation { deviation });
    }
    let m = &r.0;
    let trace = m.trace();
    let cos = ((trace - 1.0) * 0.5).clamp(-1.0, 1.0);
    // sin(theta) * axis
    let w = Vec3::new(m[(2, 1)] - m[(1, 2)], m[(0, 2)] - m[(2, 0)], m[(1, 0)] - m[(0, 1)]) * 0.5;
    let sin = w.norm();
    let theta = libm::atan2(sin, cos);

    if trace < NEAR_PI_TRACE {
        // sym(R) = cos I + (1 - cos) a a^T
        let sym = (m + m.transpose()) * 0.5;
        let outer = (sym - Mat3::identity() * cos) / (1.0 - cos);
        let k = (0..3)
            .max_by(|&i, &j| outer[(i, i)].total_cmp(&outer[(j, j)]))
            .unwrap_or(0);
        let mut axis: Vec3 = outer.column(k).into_owned();
        axis /= axis.norm();
        if axis.dot(&w) < 0.0 {
            axis = -axis;
        }
        return Ok(axis * theta);
    }

    if sin < 1e-6 {
        // theta / sin(theta) ~ 1 + theta^2 / 6
        return Ok(w * (1.0 + theta * theta / 6.0));
    }
    Ok(w * (theta / sin))
}

/// Body-frame attitude error: exponential coordinates of `R^T R_d`.
pub fn attitude_error(r: &RotationMatrix, r_d: &RotationMatrix) -> Result<Vec3> {
    let relative = RotationMatrix(r.0.transpose() * r_d.0);
    so3_log(&relative)
}

/// Axis-angle magnitude of an attitude error vector.
pub fn theta_norm(e: &Vec3) -> f64 {
    e.norm()
}

/// Component-wise `p - p_d`.
pub fn position_error(p: &Vec3, p_d: &Vec3) -> Vec3 {
    p - p_d
}

pub fn rot_x(a: f64) -> Mat3 {
    let (s, c) = (libm::sin(a), libm::cos(a));
    Mat3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c)
}

pub fn rot_y(a: f64) -> Mat3 {
    let (s, c) = (libm::sin(a), libm::cos(a));
    Mat3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c)
}

pub fn rot_z(a: f64) -> Mat3 {
    let (s, c) = (libm::sin(a), libm::cos(a));
    Mat3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

/// ZYX composition `Rz(heading) * Ry(pitch) * Rx(roll)`.
pub fn rpy_to_rotation(roll: f64, pitch: f64, heading: f64) -> RotationMatrix {
    RotationMatrix(rot_z(heading) * rot_y(pitch) * rot_x(roll))
}

/// Inverse of [`rpy_to_rotation`]; at the pitch singularity roll is reported as 0.
pub fn rotation_to_rpy(r: &RotationMatrix) -> (f64, f64, f64) {
    let m = &r.0;
    let pitch = libm::asin((-m[(2, 0)]).clamp(-1.0, 1.0));
    if libm::fabs(m[(2, 0)]) > 1.0 - 1e-12 {
        let heading = libm::atan2(-m[(0, 1)], m[(1, 1)]);
        return (0.0, pitch, heading);
    }
    let roll = libm::atan2(m[(2, 1)], m[(2, 2)]);
    let heading = libm::atan2(m[(1, 0)], m[(0, 0)]);
    (roll, pitch, heading)
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_angle(a: f64) -> f64 {
    let mut w = libm::fmod(a + PI, 2.0 * PI);
    if w <= 0.0 {
        w += 2.0 * PI;
    }
    w - PI
}
