use super::closed::Geometry;
use super::rotation::RotationMatrix;
use super::shape::{Shape, ShapeKind};
use super::store::{volume_name, Carve, GeometryStore, Material, Placement, PlacementFlag, TrackingMedium, Volume};
use super::{GeometryError, VolumeId};

/// Mutable geometry under construction, with the Geant3 call surface.
///
/// Every call validates eagerly; [`GeometryBuilder::close`] re-validates the whole store
/// (the importer feeds unchecked stores through the same path).
#[derive(Debug, Clone, Default)]
pub struct GeometryBuilder {
    store: GeometryStore,
}

impl GeometryBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Wraps declarations that have not been checked yet; `close` validates them.
    pub fn from_store(store: GeometryStore) -> Self {
        Self { store }
    }

    pub fn store(&self) -> &GeometryStore {
        &self.store
    }

    pub fn define_material(
        &mut self,
        id: i32,
        name: &str,
        density: f64,
        radiation_length: f64,
        dedx_ref: f64,
    ) -> Result<(), GeometryError> {
        if self.store.material(id).is_some() {
            return Err(GeometryError::DuplicateId { kind: "material", id });
        }
        let material = Material {
            id,
            name: name.to_string(),
            density,
            radiation_length,
            dedx_ref,
        };
        material.validate()?;
        self.store.materials.push(material);
        Ok(())
    }

    pub fn define_medium(
        &mut self,
        id: i32,
        name: &str,
        material_id: i32,
        energy_cut: f64,
        max_step: f64,
    ) -> Result<(), GeometryError> {
        if self.store.medium(id).is_some() {
            return Err(GeometryError::DuplicateId { kind: "medium", id });
        }
        if self.store.material(material_id).is_none() {
            return Err(GeometryError::UnknownMaterial(material_id));
        }
        let medium = TrackingMedium {
            id,
            name: name.to_string(),
            material_id,
            energy_cut,
            max_step,
        };
        medium.validate()?;
        self.store.media.push(medium);
        Ok(())
    }

    /// Defines a volume. Only the first `nparams` entries of `params` are used.
    pub fn gsvolu(
        &mut self,
        name: &str,
        shape: &str,
        medium_id: i32,
        params: &[f64],
        nparams: usize,
    ) -> Result<VolumeId, GeometryError> {
        let name = volume_name(name)?;
        if self.store.volume_index(&name).is_some() {
            return Err(GeometryError::DuplicateVolume(name));
        }
        let kind = ShapeKind::parse(shape).ok_or_else(|| GeometryError::UnknownShape(shape.to_string()))?;
        if self.store.medium(medium_id).is_none() {
            return Err(GeometryError::UnknownMedium(medium_id));
        }
        if nparams > params.len() {
            return Err(GeometryError::BadShapeParams(format!(
                "nparams={nparams} but only {} values supplied",
                params.len()
            )));
        }
        let shape = Shape::new(kind, &params[..nparams])?;
        self.store.volumes.push(Volume { name, shape, medium_id });
        Ok(VolumeId::from_index(self.store.volumes.len() - 1))
    }

    /// Places copy `copy` of `name` inside `mother`; the daughter is rotated by `rot_id`,
    /// then translated by `(x, y, z)` in the mother frame.
    #[allow(clippy::too_many_arguments)]
    pub fn gspos(
        &mut self,
        name: &str,
        copy: u32,
        mother: &str,
        x: f64,
        y: f64,
        z: f64,
        rot_id: i32,
        flag: &str,
    ) -> Result<(), GeometryError> {
        let volume = volume_name(name)?;
        let mother = volume_name(mother).map_err(|_| GeometryError::UnknownMother(mother.into()))?;
        if self.store.volume_index(&volume).is_none() {
            return Err(GeometryError::UnknownVolume(volume));
        }
        if self.store.volume_index(&mother).is_none() {
            return Err(GeometryError::UnknownMother(mother));
        }
        if rot_id != 0 && self.store.rotation(rot_id).is_none() {
            return Err(GeometryError::UnknownRotation(rot_id));
        }
        let flag = PlacementFlag::parse(flag).ok_or_else(|| GeometryError::BadFlag(flag.into()))?;
        if copy == 0 {
            return Err(GeometryError::BadCopyNumber(volume));
        }
        if ![x, y, z].iter().all(|v| v.is_finite()) {
            return Err(GeometryError::BadValue(format!(
                "placement of {volume}: ({x}, {y}, {z})"
            )));
        }
        let duplicate = self
            .store
            .placements
            .iter()
            .any(|p| p.volume == volume && p.copy == copy && p.mother == mother);
        if duplicate {
            return Err(GeometryError::DuplicateCopy { volume, copy, mother });
        }
        self.store.placements.push(Placement {
            volume,
            copy,
            mother,
            translation: [x, y, z],
            rotation_id: rot_id,
            flag,
        });
        Ok(())
    }

    #[allow(clippy::too_many_arguments)]
    pub fn gsrotm(
        &mut self,
        id: i32,
        theta1: f64,
        phi1: f64,
        theta2: f64,
        phi2: f64,
        theta3: f64,
        phi3: f64,
    ) -> Result<(), GeometryError> {
        if id <= 0 || self.store.rotation(id).is_some() {
            return Err(GeometryError::DuplicateRotation(id));
        }
        let rotation = RotationMatrix::from_angles(id, [theta1, phi1, theta2, phi2, theta3, phi3])?;
        self.store.rotations.push(rotation);
        Ok(())
    }

    /// Declares that the MANY-placed `many_name` is carved out of `carved`: points
    /// inside both resolve to `many_name`.
    pub fn gsbool(&mut self, carved: &str, many_name: &str) -> Result<(), GeometryError> {
        let volume = volume_name(carved)?;
        let many = volume_name(many_name)?;
        for name in [&volume, &many] {
            if self.store.volume_index(name).is_none() {
                return Err(GeometryError::UnknownVolume(name.clone()));
            }
        }
        check_single_many(&self.store, &many)?;
        if !self.store.carves.iter().any(|c| c.volume == volume && c.many == many) {
            self.store.carves.push(Carve { volume, many });
        }
        Ok(())
    }

    pub fn volume_id(&self, name: &str) -> Result<VolumeId, GeometryError> {
        let name = volume_name(name)?;
        self.store
            .volume_index(&name)
            .map(VolumeId::from_index)
            .ok_or(GeometryError::UnknownVolume(name))
    }

    pub fn close(self) -> Result<Geometry, GeometryError> {
        Geometry::from_store(self.store)
    }
}

pub(crate) fn check_single_many(store: &GeometryStore, many: &str) -> Result<(), GeometryError> {
    let placements: Vec<_> = store.placements.iter().filter(|p| p.volume == many).collect();
    match placements.as_slice() {
        [p] if p.flag == PlacementFlag::Many => Ok(()),
        [] | [_] => Err(GeometryError::NotManyPlacement(many.to_string())),
        _ => Err(GeometryError::MultiplyPlacedMany(many.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn with_al() -> GeometryBuilder {
        let mut b = GeometryBuilder::new();
        b.define_material(1, "AL", 2.70, 8.9, 0.004).unwrap();
        b.define_medium(1, "AL_med", 1, 0.001, 1.0).unwrap();
        b
    }

    #[test]
    fn gsvolu_assigns_ids_and_rejects_duplicates() {
        let mut b = with_al();
        let id = b.gsvolu("TRTU", "TUBE", 1, &[0.0, 60.0, 50.0], 3).unwrap();
        assert_eq!(id, VolumeId(1));
        assert_eq!(b.volume_id("TRTU").unwrap(), id);
        assert!(matches!(
            b.gsvolu("TRTU", "TUBE", 1, &[0.0, 60.0, 50.0], 3),
            Err(GeometryError::DuplicateVolume(_))
        ));
        assert!(matches!(
            b.gsvolu("BADV", "TUBE", 1, &[60.0, 0.0, 50.0], 3),
            Err(GeometryError::BadShapeParams(_))
        ));
        assert!(matches!(
            b.gsvolu("XXXX", "TUBE", 7, &[0.0, 1.0, 1.0], 3),
            Err(GeometryError::UnknownMedium(7))
        ));
        assert!(matches!(
            b.gsvolu("CONE", "CONE", 1, &[0.0, 1.0, 1.0], 3),
            Err(GeometryError::UnknownShape(_))
        ));
    }

    #[test]
    fn gspos_checks_references() {
        let mut b = with_al();
        b.gsvolu("EXPH", "BOX", 1, &[200.0, 100.0, 100.0], 3).unwrap();
        b.gsvolu("TRTU", "TUBE", 1, &[0.0, 60.0, 50.0], 3).unwrap();
        b.gspos("TRTU", 1, "EXPH", -100.0, 0.0, 0.0, 0, "ONLY").unwrap();
        assert!(matches!(
            b.gspos("TRTU", 1, "EXPH", -100.0, 0.0, 0.0, 0, "ONLY"),
            Err(GeometryError::DuplicateCopy { .. })
        ));
        assert!(matches!(
            b.gspos("NONE", 1, "EXPH", 0.0, 0.0, 0.0, 0, "ONLY"),
            Err(GeometryError::UnknownVolume(_))
        ));
        assert!(matches!(
            b.gspos("TRTU", 2, "NONE", 0.0, 0.0, 0.0, 0, "ONLY"),
            Err(GeometryError::UnknownMother(_))
        ));
        assert!(matches!(
            b.gspos("TRTU", 2, "EXPH", 0.0, 0.0, 0.0, 5, "ONLY"),
            Err(GeometryError::UnknownRotation(5))
        ));
        assert!(matches!(
            b.gspos("TRTU", 2, "EXPH", 0.0, 0.0, 0.0, 0, "SOME"),
            Err(GeometryError::BadFlag(_))
        ));
    }

    #[test]
    fn material_and_medium_validation() {
        let mut b = with_al();
        assert!(matches!(
            b.define_material(2, "VAC", 0.0, 1.0, 0.0),
            Err(GeometryError::BadValue(_))
        ));
        assert!(matches!(
            b.define_material(1, "AL2", 2.7, 8.9, 0.004),
            Err(GeometryError::DuplicateId { .. })
        ));
        assert!(matches!(
            b.define_medium(2, "bad", 99, 0.001, 1.0),
            Err(GeometryError::UnknownMaterial(99))
        ));
        assert!(matches!(
            b.define_medium(3, "bad", 1, 0.001, 0.0),
            Err(GeometryError::BadValue(_))
        ));
        assert_eq!(b.store().medium(1).unwrap().material_id, 1);
    }

    #[test]
    fn gsrotm_rejects_reuse() {
        let mut b = with_al();
        b.gsrotm(1, 90.0, 0.0, 90.0, 90.0, 0.0, 0.0).unwrap();
        assert!(matches!(
            b.gsrotm(1, 90.0, 0.0, 90.0, 90.0, 0.0, 0.0),
            Err(GeometryError::DuplicateRotation(1))
        ));
        assert!(matches!(
            b.gsrotm(0, 90.0, 0.0, 90.0, 90.0, 0.0, 0.0),
            Err(GeometryError::DuplicateRotation(0))
        ));
    }

    #[test]
    fn gsbool_requires_single_many_placement() {
        let mut b = with_al();
        b.gsvolu("WRLD", "BOX", 1, &[100.0, 100.0, 100.0], 3).unwrap();
        b.gsvolu("BOXA", "BOX", 1, &[10.0, 10.0, 10.0], 3).unwrap();
        b.gsvolu("TUBB", "TUBE", 1, &[0.0, 5.0, 20.0], 3).unwrap();
        b.gspos("BOXA", 1, "WRLD", 0.0, 0.0, 0.0, 0, "ONLY").unwrap();
        b.gspos("TUBB", 1, "WRLD", 0.0, 0.0, 0.0, 0, "ONLY").unwrap();
        assert!(matches!(
            b.gsbool("BOXA", "TUBB"),
            Err(GeometryError::NotManyPlacement(_))
        ));
        b.gsvolu("TUBC", "TUBE", 1, &[0.0, 5.0, 20.0], 3).unwrap();
        b.gspos("TUBC", 1, "WRLD", 0.0, 0.0, 0.0, 0, "MANY").unwrap();
        b.gspos("TUBC", 2, "WRLD", 50.0, 0.0, 0.0, 0, "MANY").unwrap();
        assert!(matches!(
            b.gsbool("BOXA", "TUBC"),
            Err(GeometryError::MultiplyPlacedMany(_))
        ));
    }
}
