use nalgebra::{Matrix3, Vector3};

use super::GeometryError;

/// Largest deviation of `MᵀM` from the identity accepted by [`RotationMatrix::from_angles`].
pub const ORTHONORMALITY_TOLERANCE: f64 = 1e-6;

/// A Geant3-style rotation.
///
/// The six angles (degrees) give the polar (θ) and azimuthal (φ) directions of the local
/// x, y and z axes in the mother frame; column `i` of the matrix is
/// `(sinθᵢ cosφᵢ, sinθᵢ sinφᵢ, cosθᵢ)`. The matrix therefore maps local vectors into the
/// mother frame.
#[derive(Debug, Clone, PartialEq)]
pub struct RotationMatrix {
    pub id: i32,
    pub angles: [f64; 6],
    matrix: Matrix3<f64>,
}

impl RotationMatrix {
    pub fn identity() -> Self {
        Self {
            id: 0,
            angles: [90.0, 0.0, 90.0, 90.0, 0.0, 0.0],
            matrix: Matrix3::identity(),
        }
    }

    pub fn from_angles(id: i32, angles: [f64; 6]) -> Result<Self, GeometryError> {
        if angles.iter().any(|a| !a.is_finite()) {
            return Err(GeometryError::NonOrthonormal(id));
        }
        let raw = Matrix3::from_columns(&[
            axis(angles[0], angles[1]),
            axis(angles[2], angles[3]),
            axis(angles[4], angles[5]),
        ]);
        let deviation = (raw.transpose() * raw - Matrix3::identity()).abs().max();
        if deviation > ORTHONORMALITY_TOLERANCE {
            return Err(GeometryError::NonOrthonormal(id));
        }
        Ok(Self {
            id,
            angles,
            matrix: orthonormalize(raw),
        })
    }

    /// Local-to-mother rotation.
    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.matrix
    }
}

/// Unit vector for polar angle `theta` and azimuth `phi`, both in degrees.
fn axis(theta: f64, phi: f64) -> Vector3<f64> {
    let (st, ct) = sin_cos_deg(theta);
    let (sp, cp) = sin_cos_deg(phi);
    Vector3::new(st * cp, st * sp, ct)
}

/// Exact at multiples of 90°, so axis-aligned rotations carry no rounding noise.
fn sin_cos_deg(deg: f64) -> (f64, f64) {
    let r = deg.rem_euclid(360.0);
    if r == 0.0 {
        (0.0, 1.0)
    } else if r == 90.0 {
        (1.0, 0.0)
    } else if r == 180.0 {
        (0.0, -1.0)
    } else if r == 270.0 {
        (-1.0, 0.0)
    } else {
        r.to_radians().sin_cos()
    }
}

/// Gram-Schmidt over the columns in order.
fn orthonormalize(m: Matrix3<f64>) -> Matrix3<f64> {
    let c0 = m.column(0).normalize();
    let c1 = (m.column(1) - c0 * c0.dot(&m.column(1))).normalize();
    let c2 = m.column(2) - c0 * c0.dot(&m.column(2));
    let c2 = (c2 - c1 * c1.dot(&c2)).normalize();
    Matrix3::from_columns(&[c0, c1, c2])
}
