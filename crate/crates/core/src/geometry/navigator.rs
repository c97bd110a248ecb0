use nalgebra::Vector3;

use super::closed::Geometry;
use super::shape::SURFACE_TOLERANCE;
use super::{GeometryError, VolumeId};

/// One level of a [`VolumePath`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PathLevel {
    pub volume: VolumeId,
    pub copy: u32,
    /// Placement index; `None` for the world.
    pub placement: Option<usize>,
}

/// The chain of physical volumes containing a point, from the world inwards.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VolumePath {
    levels: Vec<PathLevel>,
}

impl VolumePath {
    pub fn levels(&self) -> &[PathLevel] {
        &self.levels
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn innermost(&self) -> &PathLevel {
        self.levels.last().expect("a located path is never empty")
    }

    pub fn volume_id(&self) -> VolumeId {
        self.innermost().volume
    }

    pub fn copy(&self) -> u32 {
        self.innermost().copy
    }

    /// `(name, copy)` pairs from the world inwards.
    pub fn names(&self, geometry: &Geometry) -> Vec<(String, u32)> {
        self.levels
            .iter()
            .map(|l| (geometry.volume(l.volume).name.clone(), l.copy))
            .collect()
    }
}

impl Geometry {
    /// Finds the deepest volume containing `point` (world frame, cm).
    ///
    /// Surfaces are closed, so a point on a daughter's surface belongs to the daughter.
    /// When sibling daughters overlap, [`Geometry::takes_precedence`] decides.
    pub fn locate(&self, point: &Vector3<f64>) -> Result<VolumePath, GeometryError> {
        let world = self.world();
        if !self.shape(world).contains(point) {
            return Err(GeometryError::OutsideWorld);
        }
        let mut levels = vec![PathLevel {
            volume: world,
            copy: 1,
            placement: None,
        }];
        let mut current = world;
        let mut local = *point;
        loop {
            let mut winner: Option<(usize, Vector3<f64>)> = None;
            for &p in self.daughters(current) {
                let node = self.node(p);
                let inner = node.point_to_local(&local);
                if !self.shape(VolumeId::from_index(node.volume)).contains(&inner) {
                    continue;
                }
                winner = match winner {
                    Some((held, _)) if !self.takes_precedence(p, held) => winner,
                    _ => Some((p, inner)),
                };
            }
            let Some((p, inner)) = winner else { break };
            let node = self.node(p);
            current = VolumeId::from_index(node.volume);
            local = inner;
            levels.push(PathLevel {
                volume: current,
                copy: node.copy,
                placement: Some(p),
            });
        }
        Ok(VolumePath { levels })
    }

    /// Expresses a world-frame point and direction in the frame of every level of `path`.
    pub fn local_frames(
        &self,
        path: &VolumePath,
        point: &Vector3<f64>,
        dir: &Vector3<f64>,
    ) -> Vec<(Vector3<f64>, Vector3<f64>)> {
        let mut frames = Vec::with_capacity(path.depth());
        let mut p = *point;
        let mut d = *dir;
        for level in path.levels() {
            if let Some(idx) = level.placement {
                let node = self.node(idx);
                p = node.point_to_local(&p);
                d = node.dir_to_local(&d);
            }
            frames.push((p, d));
        }
        frames
    }

    /// Smallest positive distance along `dir` at which the result of [`Geometry::locate`]
    /// changes: leaving any volume of `path`, entering a daughter of the innermost volume,
    /// or entering an overlapping sibling that takes precedence over a volume of `path`.
    pub fn distance_to_boundary(
        &self,
        path: &VolumePath,
        point: &Vector3<f64>,
        dir: &Vector3<f64>,
    ) -> Result<f64, GeometryError> {
        if !dir.iter().all(|c| c.is_finite()) || (dir.norm() - 1.0).abs() > 1e-9 {
            return Err(GeometryError::BadDirection);
        }
        let frames = self.local_frames(path, point, dir);
        let (p_in, d_in) = frames.last().expect("non-empty path");
        let innermost = path.volume_id();
        if !self.shape(innermost).contains_within(p_in, SURFACE_TOLERANCE) {
            return Err(GeometryError::NotInside);
        }

        let mut best = f64::INFINITY;
        for (level, (p, d)) in path.levels().iter().zip(&frames) {
            best = best.min(self.shape(level.volume).exit_distance(p, d));
        }
        for &idx in self.daughters(innermost) {
            best = best.min(self.entry_into(idx, p_in, d_in));
        }
        for k in 1..path.depth() {
            let held = path.levels()[k].placement.expect("non-world level has a placement");
            let mother = path.levels()[k - 1].volume;
            let (p, d) = &frames[k - 1];
            for &idx in self.daughters(mother) {
                if idx != held && self.takes_precedence(idx, held) {
                    best = best.min(self.entry_into(idx, p, d));
                }
            }
        }
        if best.is_finite() {
            Ok(best)
        } else {
            Err(GeometryError::NoIntersection)
        }
    }

    /// Entry distance into placement `idx`, given a point and direction in its mother frame.
    fn entry_into(&self, idx: usize, p: &Vector3<f64>, d: &Vector3<f64>) -> f64 {
        let node = self.node(idx);
        self.shape(VolumeId::from_index(node.volume))
            .entry_distance(&node.point_to_local(p), &node.dir_to_local(d))
            .unwrap_or(f64::INFINITY)
    }

    /// Whether `point` lies inside the solid of the innermost level of `path`, with every
    /// surface pushed outwards by `tol`.
    pub fn path_contains(&self, path: &VolumePath, point: &Vector3<f64>, tol: f64) -> bool {
        let zero = Vector3::zeros();
        let frames = self.local_frames(path, point, &zero);
        let (p, _) = frames.last().expect("non-empty path");
        self.shape(path.volume_id()).contains_within(p, tol)
    }
}
