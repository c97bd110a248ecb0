use std::fmt;

use super::rotation::RotationMatrix;
use super::shape::Shape;
use super::GeometryError;

#[derive(Debug, Clone, PartialEq)]
pub struct Material {
    pub id: i32,
    pub name: String,
    /// g/cm³
    pub density: f64,
    /// Radiation length X0 in cm.
    pub radiation_length: f64,
    /// Stopping power in GeV/cm at the nominal `density`.
    pub dedx_ref: f64,
}

impl Material {
    /// Stopping power at the nominal density.
    pub fn dedx(&self) -> f64 {
        self.dedx_at(self.density)
    }

    /// Stopping power scaled linearly to another density.
    pub fn dedx_at(&self, density: f64) -> f64 {
        self.dedx_ref * density / self.density
    }

    pub(crate) fn validate(&self) -> Result<(), GeometryError> {
        let ok = self.density.is_finite()
            && self.density > 0.0
            && self.radiation_length.is_finite()
            && self.radiation_length > 0.0
            && self.dedx_ref.is_finite()
            && self.dedx_ref >= 0.0;
        if ok {
            Ok(())
        } else {
            Err(GeometryError::BadValue(format!(
                "material {} ({}): density={} x0={} dedx={}",
                self.id, self.name, self.density, self.radiation_length, self.dedx_ref
            )))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrackingMedium {
    pub id: i32,
    pub name: String,
    pub material_id: i32,
    /// Kinetic-energy cut in GeV below which charged tracks are stopped.
    pub energy_cut: f64,
    /// cm
    pub max_step: f64,
}

impl TrackingMedium {
    pub(crate) fn validate(&self) -> Result<(), GeometryError> {
        let ok =
            self.energy_cut.is_finite() && self.energy_cut >= 0.0 && self.max_step.is_finite() && self.max_step > 0.0;
        if ok {
            Ok(())
        } else {
            Err(GeometryError::BadValue(format!(
                "medium {} ({}): cut={} max_step={}",
                self.id, self.name, self.energy_cut, self.max_step
            )))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Volume {
    /// Always four characters, right-padded with spaces.
    pub name: String,
    pub shape: Shape,
    pub medium_id: i32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PlacementFlag {
    Only,
    Many,
}

impl PlacementFlag {
    pub fn parse(flag: &str) -> Option<Self> {
        match flag.trim() {
            "ONLY" => Some(PlacementFlag::Only),
            "MANY" => Some(PlacementFlag::Many),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PlacementFlag::Only => "ONLY",
            PlacementFlag::Many => "MANY",
        }
    }
}

impl fmt::Display for PlacementFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One positioned copy of a volume inside a mother: `p_mother = R·p_local + translation`.
#[derive(Debug, Clone, PartialEq)]
pub struct Placement {
    pub volume: String,
    pub copy: u32,
    pub mother: String,
    pub translation: [f64; 3],
    pub rotation_id: i32,
    pub flag: PlacementFlag,
}

/// `many` (a MANY-placed volume) is carved out of `volume`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Carve {
    pub volume: String,
    pub many: String,
}

/// The raw declarations of a geometry, in declaration order.
///
/// This is what the builder accumulates and the XML exporter writes; the closed
/// [`super::Geometry`] adds the resolved indices used for navigation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GeometryStore {
    pub materials: Vec<Material>,
    pub media: Vec<TrackingMedium>,
    pub rotations: Vec<RotationMatrix>,
    pub volumes: Vec<Volume>,
    pub placements: Vec<Placement>,
    pub carves: Vec<Carve>,
}

impl GeometryStore {
    pub fn material(&self, id: i32) -> Option<&Material> {
        self.materials.iter().find(|m| m.id == id)
    }

    pub fn medium(&self, id: i32) -> Option<&TrackingMedium> {
        self.media.iter().find(|m| m.id == id)
    }

    pub fn rotation(&self, id: i32) -> Option<&RotationMatrix> {
        self.rotations.iter().find(|r| r.id == id)
    }

    pub fn volume_index(&self, name: &str) -> Option<usize> {
        self.volumes.iter().position(|v| v.name == name)
    }
}

/// Geant3 volume names are four characters; shorter names are right-padded with spaces.
pub fn volume_name(name: &str) -> Result<String, GeometryError> {
    let trimmed = name.trim_end();
    if trimmed.is_empty() || trimmed.len() > 4 || !trimmed.is_ascii() {
        return Err(GeometryError::BadName(name.to_string()));
    }
    Ok(format!("{trimmed:<4}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_padded_to_four() {
        assert_eq!(volume_name("GAP").unwrap(), "GAP ");
        assert_eq!(volume_name("TRTU").unwrap(), "TRTU");
        assert_eq!(volume_name("GAP ").unwrap(), "GAP ");
        assert!(volume_name("TOOLONG").is_err());
        assert!(volume_name("").is_err());
    }

    #[test]
    fn dedx_scales_with_density() {
        let al = Material {
            id: 1,
            name: "AL".into(),
            density: 2.70,
            radiation_length: 8.9,
            dedx_ref: 0.004,
        };
        assert_eq!(al.dedx(), 0.004);
        assert!((al.dedx_at(5.40) - 0.008).abs() < 1e-15);
    }
}
