use std::ops::{Add, Sub};

use nalgebra::Vector3;

/// Energy-momentum four-vector in GeV.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FourMomentum {
    pub px: f64,
    pub py: f64,
    pub pz: f64,
    pub e: f64,
}

impl FourMomentum {
    pub fn new(px: f64, py: f64, pz: f64, e: f64) -> Self {
        Self { px, py, pz, e }
    }

    pub fn from_parts(p: Vector3<f64>, e: f64) -> Self {
        Self::new(p.x, p.y, p.z, e)
    }

    pub fn p3(&self) -> Vector3<f64> {
        Vector3::new(self.px, self.py, self.pz)
    }

    pub fn p(&self) -> f64 {
        self.p3().norm()
    }

    pub fn mass2(&self) -> f64 {
        self.e * self.e - self.p3().norm_squared()
    }

    /// Invariant mass, clamped at zero for slightly space-like rounding.
    pub fn mass(&self) -> f64 {
        self.mass2().max(0.0).sqrt()
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.px, self.py, self.pz, self.e]
    }

    /// Lorentz boost by velocity `beta` (the frame moving with `-beta` sees this vector).
    pub fn boosted(&self, beta: &Vector3<f64>) -> Self {
        let b2 = beta.norm_squared();
        if b2 == 0.0 {
            return *self;
        }
        let gamma = 1.0 / (1.0 - b2).sqrt();
        let bp = beta.dot(&self.p3());
        let g2 = (gamma - 1.0) / b2;
        let p = self.p3() + beta * (g2 * bp + gamma * self.e);
        Self::from_parts(p, gamma * (self.e + bp))
    }
}

impl Add for FourMomentum {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.px + o.px, self.py + o.py, self.pz + o.pz, self.e + o.e)
    }
}

impl Sub for FourMomentum {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.px - o.px, self.py - o.py, self.pz - o.pz, self.e - o.e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boost_of_rest_mass_gives_moving_particle() {
        let m = 0.1349768;
        let rest = FourMomentum::new(0.0, 0.0, 0.0, m);
        let beta = Vector3::new(0.0, 0.0, 0.6);
        let moving = rest.boosted(&beta);
        assert!((moving.e - m * 1.25).abs() < 1e-15);
        assert!((moving.pz - m * 0.75).abs() < 1e-15);
        assert!((moving.mass() - m).abs() < 1e-12);
    }
}
