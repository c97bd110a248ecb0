//! Geant3-style geometry: materials, tracking media, BOX/TUBE volumes, positioned copies
//! with ONLY/MANY flags, rotations and boolean carving, plus analytic navigation.
//!
//! Units follow Geant3 defaults: cm, GeV, degrees. A geometry is built through
//! [`GeometryBuilder`] and frozen with [`GeometryBuilder::close`], after which it is
//! immutable and can be shared between threads.

mod builder;
mod closed;
mod navigator;
mod rotation;
mod shape;
mod store;

use std::fmt;

use thiserror::Error;

pub use builder::GeometryBuilder;
pub use closed::{Geometry, PlacedNode};
pub use navigator::{PathLevel, VolumePath};
pub use rotation::{RotationMatrix, ORTHONORMALITY_TOLERANCE};
pub use shape::{Segments, Shape, ShapeKind, SURFACE_TOLERANCE};
pub use store::{volume_name, Carve, GeometryStore, Material, Placement, PlacementFlag, TrackingMedium, Volume};

/// Deepest allowed volume hierarchy, world included.
pub const MAX_DEPTH: usize = 16;

/// Numeric volume identifier, 1-based in definition order (as returned by `gsvolu`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VolumeId(pub u32);

impl VolumeId {
    pub fn from_index(index: usize) -> Self {
        VolumeId(index as u32 + 1)
    }

    pub fn index(self) -> usize {
        self.0 as usize - 1
    }
}

impl fmt::Display for VolumeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("geometry is closed")]
    GeometryClosed,
    #[error("bad volume name {0:?}")]
    BadName(String),
    #[error("volume {0} already defined")]
    DuplicateVolume(String),
    #[error("unknown shape {0}")]
    UnknownShape(String),
    #[error("bad shape parameters: {0}")]
    BadShapeParams(String),
    #[error("unknown tracking medium {0}")]
    UnknownMedium(i32),
    #[error("unknown material {0}")]
    UnknownMaterial(i32),
    #[error("{kind} id {id} already defined")]
    DuplicateId { kind: &'static str, id: i32 },
    #[error("bad value: {0}")]
    BadValue(String),
    #[error("unknown volume {0}")]
    UnknownVolume(String),
    #[error("unknown mother volume {0}")]
    UnknownMother(String),
    #[error("unknown rotation {0}")]
    UnknownRotation(i32),
    #[error("bad placement flag {0:?} (expected ONLY or MANY)")]
    BadFlag(String),
    #[error("copy numbers must be positive ({0})")]
    BadCopyNumber(String),
    #[error("copy {copy} of {volume} already placed in {mother}")]
    DuplicateCopy { volume: String, copy: u32, mother: String },
    #[error("rotation {0} already defined or reserved")]
    DuplicateRotation(i32),
    #[error("rotation {0} is not orthonormal")]
    NonOrthonormal(i32),
    #[error("{0} has no MANY placement")]
    NotManyPlacement(String),
    #[error("{0} has a MANY position, which must be its only position")]
    MultiplyPlacedMany(String),
    #[error("no world volume")]
    NoWorld,
    #[error("dangling reference: {0}")]
    DanglingReference(String),
    #[error("volume {0} is placed inside itself")]
    CyclicPlacement(String),
    #[error("hierarchy under {volume} is {depth} levels deep (max {MAX_DEPTH})")]
    DepthExceeded { volume: String, depth: usize },
    #[error("point is outside the world volume")]
    OutsideWorld,
    #[error("point is not inside the innermost volume of the path")]
    NotInside,
    #[error("ray never leaves its volume")]
    NoIntersection,
    #[error("direction is not a unit vector")]
    BadDirection,
}
