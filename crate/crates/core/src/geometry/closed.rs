use std::collections::{HashMap, HashSet};

use nalgebra::{Matrix3, Vector3};

use super::builder::check_single_many;
use super::shape::Shape;
use super::store::{GeometryStore, Material, PlacementFlag, TrackingMedium, Volume};
use super::{GeometryError, VolumeId, MAX_DEPTH};

/// A placement with its references resolved to indices.
#[derive(Debug, Clone, PartialEq)]
pub struct PlacedNode {
    /// Volume index (not the 1-based id).
    pub volume: usize,
    pub mother: usize,
    pub copy: u32,
    pub flag: PlacementFlag,
    pub translation: Vector3<f64>,
    rotation: Matrix3<f64>,
    inverse: Matrix3<f64>,
}

impl PlacedNode {
    /// Local-to-mother rotation.
    pub fn rotation(&self) -> &Matrix3<f64> {
        &self.rotation
    }

    pub fn point_to_local(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.inverse * (p - self.translation)
    }

    pub fn point_to_mother(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.rotation * p + self.translation
    }

    pub fn dir_to_local(&self, d: &Vector3<f64>) -> Vector3<f64> {
        self.inverse * d
    }
}

/// A closed, immutable geometry ready for navigation. Safe to share between threads.
#[derive(Debug, Clone)]
pub struct Geometry {
    store: GeometryStore,
    world: usize,
    names: HashMap<String, usize>,
    nodes: Vec<PlacedNode>,
    daughters: Vec<Vec<usize>>,
    media: Vec<usize>,
    materials: Vec<usize>,
    /// (volume carved from, MANY volume) pairs, by volume index.
    carves: HashSet<(usize, usize)>,
}

impl Geometry {
    pub(crate) fn from_store(store: GeometryStore) -> Result<Self, GeometryError> {
        let mut material_ids = HashSet::new();
        for m in &store.materials {
            if !material_ids.insert(m.id) {
                return Err(GeometryError::DuplicateId {
                    kind: "material",
                    id: m.id,
                });
            }
            m.validate()?;
        }
        let mut medium_ids = HashSet::new();
        for m in &store.media {
            if !medium_ids.insert(m.id) {
                return Err(GeometryError::DuplicateId {
                    kind: "medium",
                    id: m.id,
                });
            }
            if !material_ids.contains(&m.material_id) {
                return Err(GeometryError::DanglingReference(format!(
                    "medium {} references material {}",
                    m.id, m.material_id
                )));
            }
            m.validate()?;
        }
        let mut rotation_ids = HashSet::new();
        for r in &store.rotations {
            if r.id <= 0 || !rotation_ids.insert(r.id) {
                return Err(GeometryError::DuplicateRotation(r.id));
            }
        }

        if store.volumes.is_empty() {
            return Err(GeometryError::NoWorld);
        }
        let mut names = HashMap::new();
        let mut media = Vec::with_capacity(store.volumes.len());
        let mut materials = Vec::with_capacity(store.volumes.len());
        for (i, v) in store.volumes.iter().enumerate() {
            super::store::volume_name(&v.name)
                .ok()
                .filter(|n| *n == v.name)
                .ok_or_else(|| GeometryError::BadName(v.name.clone()))?;
            if names.insert(v.name.clone(), i).is_some() {
                return Err(GeometryError::DuplicateVolume(v.name.clone()));
            }
            let medium = store.media.iter().position(|m| m.id == v.medium_id).ok_or_else(|| {
                GeometryError::DanglingReference(format!("volume {} references medium {}", v.name, v.medium_id))
            })?;
            let material = store
                .materials
                .iter()
                .position(|m| m.id == store.media[medium].material_id)
                .expect("medium material checked above");
            // revalidate: imported stores bypass Shape::new
            super::shape::Shape::new(v.shape.kind(), &v.shape.params())?;
            media.push(medium);
            materials.push(material);
        }

        let mut nodes = Vec::with_capacity(store.placements.len());
        let mut daughters = vec![Vec::new(); store.volumes.len()];
        let mut seen_copies = HashSet::new();
        for (i, p) in store.placements.iter().enumerate() {
            let volume = *names
                .get(&p.volume)
                .ok_or_else(|| GeometryError::DanglingReference(format!("placement of unknown volume {}", p.volume)))?;
            let mother = *names.get(&p.mother).ok_or_else(|| {
                GeometryError::DanglingReference(format!("{} placed into unknown mother {:?}", p.volume, p.mother))
            })?;
            let rotation = if p.rotation_id == 0 {
                Matrix3::identity()
            } else {
                *store
                    .rotation(p.rotation_id)
                    .ok_or_else(|| {
                        GeometryError::DanglingReference(format!(
                            "{} uses unknown rotation {}",
                            p.volume, p.rotation_id
                        ))
                    })?
                    .matrix()
            };
            if p.copy == 0 {
                return Err(GeometryError::BadCopyNumber(p.volume.clone()));
            }
            if !p.translation.iter().all(|v| v.is_finite()) {
                return Err(GeometryError::BadValue(format!("placement of {}", p.volume)));
            }
            if !seen_copies.insert((volume, p.copy, mother)) {
                return Err(GeometryError::DuplicateCopy {
                    volume: p.volume.clone(),
                    copy: p.copy,
                    mother: p.mother.clone(),
                });
            }
            nodes.push(PlacedNode {
                volume,
                mother,
                copy: p.copy,
                flag: p.flag,
                translation: Vector3::from(p.translation),
                rotation,
                inverse: rotation.transpose(),
            });
            daughters[mother].push(i);
        }

        let placed: HashSet<usize> = nodes.iter().map(|n| n.volume).collect();
        let world = (0..store.volumes.len())
            .find(|i| !placed.contains(i))
            .ok_or(GeometryError::NoWorld)?;

        let mut carves = HashSet::new();
        for c in &store.carves {
            let carved = *names
                .get(&c.volume)
                .ok_or_else(|| GeometryError::DanglingReference(format!("carve of unknown volume {}", c.volume)))?;
            let many = *names
                .get(&c.many)
                .ok_or_else(|| GeometryError::DanglingReference(format!("carve by unknown volume {}", c.many)))?;
            check_single_many(&store, &c.many)?;
            carves.insert((carved, many));
        }

        check_hierarchy(&store.volumes, &nodes, &daughters)?;

        Ok(Self {
            store,
            world,
            names,
            nodes,
            daughters,
            media,
            materials,
            carves,
        })
    }

    pub fn store(&self) -> &GeometryStore {
        &self.store
    }

    pub fn world(&self) -> VolumeId {
        VolumeId::from_index(self.world)
    }

    pub fn n_volumes(&self) -> usize {
        self.store.volumes.len()
    }

    pub fn volume(&self, id: VolumeId) -> &Volume {
        &self.store.volumes[id.index()]
    }

    pub fn shape(&self, id: VolumeId) -> &Shape {
        &self.volume(id).shape
    }

    pub fn volume_id(&self, name: &str) -> Result<VolumeId, GeometryError> {
        let name = super::store::volume_name(name)?;
        self.names
            .get(&name)
            .copied()
            .map(VolumeId::from_index)
            .ok_or(GeometryError::UnknownVolume(name))
    }

    pub fn medium_of(&self, id: VolumeId) -> &TrackingMedium {
        &self.store.media[self.media[id.index()]]
    }

    pub fn material_of(&self, id: VolumeId) -> &Material {
        &self.store.materials[self.materials[id.index()]]
    }

    pub fn nodes(&self) -> &[PlacedNode] {
        &self.nodes
    }

    pub fn node(&self, placement: usize) -> &PlacedNode {
        &self.nodes[placement]
    }

    /// Placement indices of the daughters of `id`, in placement order.
    pub fn daughters(&self, id: VolumeId) -> &[usize] {
        &self.daughters[id.index()]
    }

    /// Whether `many` has been carved out of `volume` with `gsbool`.
    pub fn is_carved(&self, volume: VolumeId, many: VolumeId) -> bool {
        self.carves.contains(&(volume.index(), many.index()))
    }

    /// Overlap precedence between two sibling placements containing the same point: a MANY
    /// volume wins over a volume it is carved out of, otherwise the later placement wins.
    pub fn takes_precedence(&self, challenger: usize, holder: usize) -> bool {
        let (c, h) = (self.nodes[challenger].volume, self.nodes[holder].volume);
        if self.carves.contains(&(h, c)) {
            return true;
        }
        if self.carves.contains(&(c, h)) {
            return false;
        }
        challenger > holder
    }
}

/// Rejects placement cycles and hierarchies deeper than [`MAX_DEPTH`].
fn check_hierarchy(
    volumes: &[Volume],
    nodes: &[super::closed::PlacedNode],
    daughters: &[Vec<usize>],
) -> Result<(), GeometryError> {
    // depth[v] = number of levels in the deepest chain rooted at v (1 for a leaf)
    let mut depth: Vec<Option<usize>> = vec![None; volumes.len()];
    let mut on_stack = vec![false; volumes.len()];

    fn visit(
        v: usize,
        volumes: &[Volume],
        nodes: &[PlacedNode],
        daughters: &[Vec<usize>],
        depth: &mut [Option<usize>],
        on_stack: &mut [bool],
    ) -> Result<usize, GeometryError> {
        if let Some(d) = depth[v] {
            return Ok(d);
        }
        if on_stack[v] {
            return Err(GeometryError::CyclicPlacement(volumes[v].name.clone()));
        }
        on_stack[v] = true;
        let mut deepest = 0;
        for &p in &daughters[v] {
            let d = visit(nodes[p].volume, volumes, nodes, daughters, depth, on_stack)?;
            deepest = deepest.max(d);
        }
        on_stack[v] = false;
        let d = deepest + 1;
        if d > MAX_DEPTH {
            return Err(GeometryError::DepthExceeded {
                volume: volumes[v].name.clone(),
                depth: d,
            });
        }
        depth[v] = Some(d);
        Ok(d)
    }

    for v in 0..volumes.len() {
        visit(v, volumes, nodes, daughters, &mut depth, &mut on_stack)?;
    }
    Ok(())
}
