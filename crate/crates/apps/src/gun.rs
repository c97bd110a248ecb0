use nalgebra::Vector3;
use vmc_core::{McContext, McError, McResult, NO_PARENT};

/// A particle gun: `multiplicity` identical primaries per event.
#[derive(Debug, Clone, PartialEq)]
pub struct GunConfig {
    pub pdg: i32,
    /// GeV
    pub kinetic_energy: f64,
    pub direction: Vector3<f64>,
    /// cm
    pub vertex: Vector3<f64>,
    pub multiplicity: u32,
}

impl GunConfig {
    /// Normalizes the direction; rejects a null direction or negative energy.
    pub fn new(
        pdg: i32,
        kinetic_energy: f64,
        direction: Vector3<f64>,
        vertex: Vector3<f64>,
        multiplicity: u32,
    ) -> McResult<Self> {
        let norm = direction.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(McError::Application(format!(
                "gun direction {direction:?} is not a direction"
            )));
        }
        if !(kinetic_energy.is_finite() && kinetic_energy >= 0.0) {
            return Err(McError::Application(format!("gun energy {kinetic_energy} GeV")));
        }
        Ok(Self {
            pdg,
            kinetic_energy,
            direction: direction / norm,
            vertex,
            multiplicity,
        })
    }

    /// Pushes the configured primaries onto the stack.
    pub fn fire(&self, mc: &mut McContext<'_>) -> McResult<()> {
        for _ in 0..self.multiplicity {
            push_primary(mc, self.pdg, self.kinetic_energy, &self.direction, &self.vertex)?;
        }
        Ok(())
    }
}

/// Adds one primary with the given kinetic energy, taking the mass from the particle table.
pub fn push_primary(
    mc: &mut McContext<'_>,
    pdg: i32,
    kinetic_energy: f64,
    direction: &Vector3<f64>,
    vertex: &Vector3<f64>,
) -> McResult<()> {
    let mass = mc.particle(pdg)?.mass;
    let e = mass + kinetic_energy;
    let p = (e * e - mass * mass).max(0.0).sqrt();
    let (px, py, pz) = (p * direction.x, p * direction.y, p * direction.z);
    let to_be_done = true;
    mc.stack().set_track(
        to_be_done, NO_PARENT, pdg, px, py, pz, e, vertex.x, vertex.y, vertex.z, 0.0, 1.0,
    )?;
    Ok(())
}
