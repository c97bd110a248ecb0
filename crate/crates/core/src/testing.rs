//! Reference implementations and generators for tests of navigation and interchange.
//!
//! [`BruteForceLocator`] answers point-location queries without the navigator: it
//! flattens the placement tree into physical volumes with composed 4×4 world transforms
//! and tests containment with its own shape formulas.

use std::collections::HashSet;

use nalgebra::{Matrix4, Vector3, Vector4};
use rand::Rng;

use crate::geometry::{Geometry, GeometryBuilder, Shape, VolumeId};

/// One physical volume: a chain of placements from the world.
#[derive(Debug, Clone)]
pub struct PhysicalVolume {
    /// Index of the parent physical volume; `None` for the world.
    pub parent: Option<usize>,
    pub placement: Option<usize>,
    pub volume: VolumeId,
    pub copy: u32,
    pub world_to_local: Matrix4<f64>,
    pub depth: usize,
}

#[derive(Debug, Clone)]
pub struct BruteForceLocator {
    physical: Vec<PhysicalVolume>,
    shapes: Vec<Shape>,
    carves: HashSet<(usize, usize)>,
}

fn homogeneous(rotation: &nalgebra::Matrix3<f64>, t: &Vector3<f64>) -> Matrix4<f64> {
    let mut m = Matrix4::identity();
    m.fixed_view_mut::<3, 3>(0, 0).copy_from(rotation);
    m.fixed_view_mut::<3, 1>(0, 3).copy_from(t);
    m
}

fn inside(shape: &Shape, p: &Vector3<f64>) -> bool {
    let [a, b, c] = shape.params();
    match shape {
        Shape::Box { .. } => p.x.abs() <= a && p.y.abs() <= b && p.z.abs() <= c,
        Shape::Tube { .. } => {
            let r2 = p.x * p.x + p.y * p.y;
            p.z.abs() <= c && r2 <= b * b && r2 >= a * a
        }
    }
}

impl BruteForceLocator {
    pub fn new(geometry: &Geometry) -> Self {
        let store = geometry.store();
        let world = geometry.world();
        let mut physical = vec![PhysicalVolume {
            parent: None,
            placement: None,
            volume: world,
            copy: 1,
            world_to_local: Matrix4::identity(),
            depth: 0,
        }];
        // mother-to-world transforms, composed explicitly
        let mut local_to_world: Vec<Matrix4<f64>> = vec![Matrix4::identity()];
        let mut next = 0;
        while next < physical.len() {
            let mother = physical[next].volume;
            for (idx, p) in store.placements.iter().enumerate() {
                if p.mother != store.volumes[mother.index()].name {
                    continue;
                }
                let rotation = if p.rotation_id == 0 {
                    nalgebra::Matrix3::identity()
                } else {
                    *store.rotation(p.rotation_id).expect("closed geometry").matrix()
                };
                let to_mother = homogeneous(&rotation, &Vector3::from(p.translation));
                let to_world = local_to_world[next] * to_mother;
                let world_to_local = to_world.try_inverse().expect("rigid transform");
                physical.push(PhysicalVolume {
                    parent: Some(next),
                    placement: Some(idx),
                    volume: VolumeId::from_index(store.volume_index(&p.volume).expect("closed geometry")),
                    copy: p.copy,
                    world_to_local,
                    depth: physical[next].depth + 1,
                });
                local_to_world.push(to_world);
            }
            next += 1;
        }
        let shapes = store.volumes.iter().map(|v| v.shape).collect();
        let carves = store
            .carves
            .iter()
            .map(|c| {
                (
                    store.volume_index(&c.volume).expect("closed geometry"),
                    store.volume_index(&c.many).expect("closed geometry"),
                )
            })
            .collect();
        Self {
            physical,
            shapes,
            carves,
        }
    }

    pub fn physical_volumes(&self) -> &[PhysicalVolume] {
        &self.physical
    }

    fn contains(&self, pv: &PhysicalVolume, point: &Vector3<f64>) -> bool {
        let h = pv.world_to_local * Vector4::new(point.x, point.y, point.z, 1.0);
        inside(&self.shapes[pv.volume.index()], &Vector3::new(h.x, h.y, h.z))
    }

    /// Does sibling `a` win over sibling `b` where they overlap?
    fn wins(&self, a: &PhysicalVolume, b: &PhysicalVolume) -> bool {
        let (va, vb) = (a.volume.index(), b.volume.index());
        if self.carves.contains(&(vb, va)) {
            true
        } else if self.carves.contains(&(va, vb)) {
            false
        } else {
            a.placement > b.placement
        }
    }

    /// `(volume, copy)` chain from the world inwards, or `None` outside the world.
    pub fn locate(&self, point: &Vector3<f64>) -> Option<Vec<(VolumeId, u32)>> {
        let containing: Vec<bool> = self.physical.iter().map(|pv| self.contains(pv, point)).collect();
        if !containing[0] {
            return None;
        }
        let mut current = 0;
        let mut chain = vec![(self.physical[0].volume, 1)];
        loop {
            let mut best: Option<usize> = None;
            for (i, pv) in self.physical.iter().enumerate() {
                if pv.parent != Some(current) || !containing[i] {
                    continue;
                }
                best = match best {
                    Some(b) if !self.wins(pv, &self.physical[b]) => Some(b),
                    _ => Some(i),
                };
            }
            match best {
                Some(b) => {
                    chain.push((self.physical[b].volume, self.physical[b].copy));
                    current = b;
                }
                None => return Some(chain),
            }
        }
    }
}

/// Geant3 angles for a rotation whose columns are the given unit vectors.
pub fn angles_for(columns: &nalgebra::Matrix3<f64>) -> [f64; 6] {
    let mut out = [0.0; 6];
    for i in 0..3 {
        let c = columns.column(i);
        out[2 * i] = c.z.clamp(-1.0, 1.0).acos().to_degrees();
        out[2 * i + 1] = c.y.atan2(c.x).to_degrees();
    }
    out
}

fn random_rotation<R: Rng + ?Sized>(rng: &mut R) -> nalgebra::Matrix3<f64> {
    let axis = Vector3::new(
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.0..1.0f64),
    );
    let axis = if axis.norm() < 1e-3 {
        Vector3::z_axis()
    } else {
        nalgebra::Unit::new_normalize(axis)
    };
    let angle = rng.random_range(0.0..std::f64::consts::TAU);
    *nalgebra::Rotation3::from_axis_angle(&axis, angle).matrix()
}

/// Radius of the sphere around the origin enclosing `shape`.
fn bounding_radius(shape: &Shape) -> f64 {
    let [a, b, c] = shape.params();
    match shape {
        Shape::Box { .. } => (a * a + b * b + c * c).sqrt(),
        Shape::Tube { .. } => (b * b + c * c).sqrt(),
    }
}

fn random_shape<R: Rng + ?Sized>(rng: &mut R, max_radius: f64) -> Option<(Shape, &'static str, [f64; 3])> {
    // each half-length at most max_radius / 2 so the bounding sphere stays below max_radius
    let h = max_radius / 2.0;
    if h < 0.05 {
        return None;
    }
    let is_box = rng.random_bool(0.5);
    let mut len = |lo: f64| rng.random_range(lo * h..h);
    if is_box {
        let p = [len(0.2), len(0.2), len(0.2)];
        Some((
            Shape::Box {
                dx: p[0],
                dy: p[1],
                dz: p[2],
            },
            "BOX",
            p,
        ))
    } else {
        let rmax = len(0.3);
        let dz = len(0.2);
        let hollow = len(0.0) > 0.6 * h;
        let rmin = if hollow { 0.5 * rmax * (len(0.0) / h) } else { 0.0 };
        let p = [rmin, rmax, dz];
        Some((Shape::Tube { rmin, rmax, dz }, "TUBE", p))
    }
}

/// Random point inside `shape` at which a sphere of radius `r` fits entirely.
fn random_interior<R: Rng + ?Sized>(rng: &mut R, shape: &Shape, r: f64) -> Option<Vector3<f64>> {
    let [a, b, c] = shape.params();
    let mut sym = |half: f64| -> Option<f64> {
        let room = half - r;
        (room > 0.0).then(|| rng.random_range(-room..=room))
    };
    match shape {
        Shape::Box { .. } => Some(Vector3::new(sym(a)?, sym(b)?, sym(c)?)),
        Shape::Tube { .. } => {
            let z = sym(c)?;
            let (lo, hi) = (a + r, b - r);
            if hi <= lo {
                return None;
            }
            let rho = rng.random_range(lo..=hi);
            let phi = rng.random_range(0.0..std::f64::consts::TAU);
            Some(Vector3::new(rho * phi.cos(), rho * phi.sin(), z))
        }
    }
}

/// A random closed geometry with up to `max_volumes` volumes.
///
/// Daughters fit inside their mothers; siblings may overlap (the later placement wins),
/// some placements are rotated, and occasionally a MANY volume is carved out of a
/// sibling with `gsbool`.
pub fn random_geometry<R: Rng + ?Sized>(rng: &mut R, max_volumes: usize) -> Geometry {
    let mut b = GeometryBuilder::new();
    b.define_material(1, "AIR", 1.205e-3, 30390.0, 2.2e-6).unwrap();
    b.define_material(2, "AL", 2.70, 8.9, 0.004).unwrap();
    b.define_medium(1, "AIR_MED", 1, 0.001, 10.0).unwrap();
    b.define_medium(2, "AL_MED", 2, 0.001, 1.0).unwrap();

    let world = [
        rng.random_range(50.0..150.0),
        rng.random_range(50.0..150.0),
        rng.random_range(50.0..150.0),
    ];
    b.gsvolu("WRLD", "BOX", 1, &world, 3).unwrap();
    let mut shapes = vec![Shape::Box {
        dx: world[0],
        dy: world[1],
        dz: world[2],
    }];
    let mut names = vec!["WRLD".to_string()];
    let mut next_rot = 1;
    let n = rng.random_range(1..=max_volumes.max(1));
    let mut many_candidate: Option<(String, String)> = None;

    for i in 1..n {
        let mother = rng.random_range(0..names.len());
        let [a, bb, c] = shapes[mother].params();
        let room = match shapes[mother] {
            Shape::Box { .. } => a.min(bb).min(c),
            Shape::Tube { .. } => ((bb - a) / 2.0).min(c),
        };
        let Some((shape, kind, params)) = random_shape(rng, room * 0.9) else {
            continue;
        };
        let r = bounding_radius(&shape);
        let Some(pos) = random_interior(rng, &shapes[mother], r) else {
            continue;
        };
        let name = format!("V{i:03}");
        b.gsvolu(&name, kind, rng.random_range(1..=2), &params, 3).unwrap();
        let rot = if rng.random_bool(0.4) {
            let angles = angles_for(&random_rotation(rng));
            b.gsrotm(
                next_rot, angles[0], angles[1], angles[2], angles[3], angles[4], angles[5],
            )
            .unwrap();
            next_rot += 1;
            next_rot - 1
        } else {
            0
        };
        let many = mother != 0 && many_candidate.is_none() && rng.random_bool(0.2);
        let flag = if many { "MANY" } else { "ONLY" };
        b.gspos(&name, 1, &names[mother], pos.x, pos.y, pos.z, rot, flag)
            .unwrap();
        if many {
            many_candidate = Some((names[mother].clone(), name.clone()));
        }
        shapes.push(shape);
        names.push(name);
    }
    // carve the MANY volume out of a sibling that shares its mother, when one exists
    if let Some((mother, many)) = many_candidate {
        let store = b.store().clone();
        let sibling = store
            .placements
            .iter()
            .find(|p| p.mother.trim_end() == mother.trim_end() && p.volume.trim_end() != many)
            .map(|p| p.volume.clone());
        if let Some(sibling) = sibling {
            b.gsbool(&sibling, &many).unwrap();
        }
    }
    b.close().expect("generated geometry is valid")
}

/// A random point drawn uniformly from the world's bounding box.
pub fn random_point_in_world<R: Rng + ?Sized>(rng: &mut R, geometry: &Geometry) -> Vector3<f64> {
    let h = geometry.shape(geometry.world()).half_extent();
    Vector3::new(
        rng.random_range(-h.x..=h.x),
        rng.random_range(-h.y..=h.y),
        rng.random_range(-h.z..=h.z),
    )
}

/// An isotropic unit vector.
pub fn random_direction<R: Rng + ?Sized>(rng: &mut R) -> Vector3<f64> {
    let cos_t: f64 = rng.random_range(-1.0..=1.0);
    let phi = rng.random_range(0.0..std::f64::consts::TAU);
    let sin_t = (1.0 - cos_t * cos_t).sqrt();
    Vector3::new(sin_t * phi.cos(), sin_t * phi.sin(), cos_t)
}

/// Outcome of the boundary ε-consistency check for one ray.
#[derive(Debug, Clone, PartialEq)]
pub enum RayCheck {
    /// Start point outside the world; nothing to check.
    Skipped,
    /// `locate` is unchanged just before the boundary and changes just after it.
    Strict,
    /// The ray only grazes a surface near the boundary, as established by bisection.
    Tangential,
    Violation(String),
}

/// Longest excursion into another volume still counted as a graze, cm.
pub const GRAZE_LENGTH: f64 = 1e-6;

type Located = Option<crate::geometry::VolumePath>;

fn locate_opt(geometry: &Geometry, p: &Vector3<f64>) -> Located {
    geometry.locate(p).ok()
}

/// First parameter in `(lo, hi]` where the located path differs from `start`, given that
/// it differs at `hi` and agrees at `lo`.
fn bisect_change(
    geometry: &Geometry,
    origin: &Vector3<f64>,
    dir: &Vector3<f64>,
    start: &Located,
    mut lo: f64,
    mut hi: f64,
) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if locate_opt(geometry, &(origin + dir * mid)) == *start {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Scans `[a, b]` for a point whose path differs from `start`.
fn find_difference(
    geometry: &Geometry,
    origin: &Vector3<f64>,
    dir: &Vector3<f64>,
    start: &Located,
    a: f64,
    b: f64,
) -> Option<f64> {
    const SAMPLES: usize = 256;
    (0..=SAMPLES)
        .map(|i| a + (b - a) * i as f64 / SAMPLES as f64)
        .find(|t| locate_opt(geometry, &(origin + dir * *t)) != *start)
}

/// Checks the boundary ε-consistency property for the ray `origin + t·dir`.
///
/// With `s = distance_to_boundary`, the path at `s − ε` must equal the starting path and
/// the path at `s + ε` must differ. A failing ray is certified tangential when a bisection
/// search along the ray shows it touches another region only over a stretch shorter
/// than [`GRAZE_LENGTH`] (or not at all) before returning to the starting path.
pub fn check_ray(geometry: &Geometry, origin: &Vector3<f64>, dir: &Vector3<f64>, eps: f64) -> RayCheck {
    let Ok(path) = geometry.locate(origin) else {
        return RayCheck::Skipped;
    };
    let s = match geometry.distance_to_boundary(&path, origin, dir) {
        Ok(s) => s,
        Err(e) => return RayCheck::Violation(format!("distance_to_boundary failed: {e}")),
    };
    let start = Some(path);
    let before_t = (s - eps).max(0.0);
    let before = locate_opt(geometry, &(origin + dir * before_t));
    let after = locate_opt(geometry, &(origin + dir * (s + eps)));
    if before == start && after != start {
        return RayCheck::Strict;
    }

    // Where does the ray first leave the starting path?
    let window_end = s + eps + GRAZE_LENGTH;
    let Some(hit) = find_difference(geometry, origin, dir, &start, 0.0, window_end) else {
        // never leaves within the window: the boundary at s is only touched
        return if after == start {
            RayCheck::Tangential
        } else {
            RayCheck::Violation(format!("no path change found near s = {s}"))
        };
    };
    let change = if hit == 0.0 {
        0.0
    } else {
        let lo = hit - window_end / 256.0;
        bisect_change(geometry, origin, dir, &start, lo.max(0.0), hit)
    };
    if change < s - eps - GRAZE_LENGTH {
        return RayCheck::Violation(format!("path changes at t = {change}, before the boundary s = {s}"));
    }
    // A graze returns to the starting path shortly after leaving it.
    let returned = locate_opt(geometry, &(origin + dir * (change + GRAZE_LENGTH))) == start;
    if returned && (after == start || before != start) {
        RayCheck::Tangential
    } else {
        RayCheck::Violation(format!(
            "boundary at s = {s} but path changes at t = {change} (before ok: {}, after differs: {})",
            before == start,
            after != start
        ))
    }
}

/// A minimal engine for exercising run control: every track takes up to `steps`
/// unit-length steps along its direction, each depositing `edep`, and a track's first
/// step pushes `secondaries(track)` photons.
///
/// Each step carries the path located at its start point; the track ends early once that
/// point is outside the world, so a vertex outside the world gives no steps.
pub struct ToyEngine {
    pub steps: usize,
    pub edep: f64,
    pub secondaries: Box<dyn Fn(&crate::StackEntry) -> usize + Send>,
}

impl ToyEngine {
    pub fn new(steps: usize) -> Self {
        Self {
            steps,
            edep: 0.0,
            secondaries: Box::new(|_| 0),
        }
    }

    pub fn with_edep(mut self, edep: f64) -> Self {
        self.edep = edep;
        self
    }

    pub fn with_secondaries(mut self, f: impl Fn(&crate::StackEntry) -> usize + Send + 'static) -> Self {
        self.secondaries = Box::new(f);
        self
    }
}

impl crate::TransportEngine for ToyEngine {
    fn name(&self) -> &str {
        "toy"
    }

    fn transport_track(
        &mut self,
        track: &crate::StackEntry,
        session: &mut crate::TrackSession<'_>,
    ) -> crate::McResult<()> {
        let p = track.momentum.p();
        let dir = if p > 0.0 { track.momentum.p3() / p } else { Vector3::z() };
        for i in 0..self.steps {
            let start = track.position + dir * i as f64;
            let Ok(path) = session.geometry().locate(&start) else {
                return Ok(());
            };
            if i == 0 {
                for k in 0..(self.secondaries)(track) {
                    let e = 0.01 * (k + 1) as f64;
                    session.push_secondary(
                        22,
                        crate::FourMomentum::from_parts(dir * e, e),
                        track.position,
                        track.time,
                    )?;
                }
            }
            let last = i + 1 == self.steps;
            let state = crate::StepState {
                track_id: track.track_id,
                pdg: track.pdg,
                charge: 0.0,
                path,
                position: start + dir,
                time: track.time,
                momentum: track.momentum,
                step_length: 1.0,
                edep: self.edep,
                entering: i == 0,
                exiting: false,
                stopped: last,
                status: if last {
                    crate::TrackStatus::Stopped
                } else {
                    crate::TrackStatus::Alive
                },
            };
            session.stepping(&state)?;
        }
        Ok(())
    }
}

/// An application with a one-box world and a fixed list of primaries per event.
///
/// `primaries_per_event[i]` photons are generated in event `i + 1`; later events have none.
#[derive(Debug, Clone, Default)]
pub struct CountingApp {
    pub primaries_per_event: Vec<usize>,
    pub steps_seen: usize,
}

impl CountingApp {
    pub fn new(primaries_per_event: Vec<usize>) -> Self {
        Self {
            primaries_per_event,
            steps_seen: 0,
        }
    }

    /// A random app with `1..=3` events of `0..=5` primaries each.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let events = rng.random_range(1..=3);
        Self::new((0..events).map(|_| rng.random_range(0..=5)).collect())
    }
}

impl crate::Application for CountingApp {
    fn construct_geometry(&mut self, mc: &mut crate::McContext<'_>) -> crate::McResult<()> {
        mc.material(1, "AIR", 1.205e-3, 30390.0, 2.2e-6)?;
        mc.medium(1, "AIR_MED", 1, 0.001, 10.0)?;
        mc.gsvolu("WRLD", "BOX", 1, &[100.0, 100.0, 100.0], 3)?;
        Ok(())
    }

    fn generate_primaries(&mut self, mc: &mut crate::McContext<'_>) -> crate::McResult<()> {
        let event = mc.event_number() as usize;
        let n = self.primaries_per_event.get(event - 1).copied().unwrap_or(0);
        for i in 0..n {
            let e = 0.1 * (i + 1) as f64;
            mc.stack()
                .set_track(true, crate::NO_PARENT, 22, 0.0, 0.0, e, e, 0.0, 0.0, 0.0, 0.0, 1.0)?;
        }
        Ok(())
    }

    fn stepping(&mut self, _mc: &mut crate::McContext<'_>) -> crate::McResult<()> {
        self.steps_seen += 1;
        Ok(())
    }
}

/// A primary particle for [`RecordingApp`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Primary {
    pub pdg: i32,
    pub momentum: crate::FourMomentum,
    pub position: Vector3<f64>,
}

impl Primary {
    /// A particle of kinetic energy `kinetic` (GeV) heading along `dir`.
    pub fn with_kinetic(
        particles: &crate::ParticleDb,
        pdg: i32,
        kinetic: f64,
        dir: Vector3<f64>,
        position: Vector3<f64>,
    ) -> Self {
        let m = particles.lookup(pdg).expect("known particle").mass;
        let e = kinetic + m;
        let p = (e * e - m * m).max(0.0).sqrt();
        Self {
            pdg,
            momentum: crate::FourMomentum::from_parts(dir.normalize() * p, e),
            position,
        }
    }
}

type GeometryFn = Box<dyn FnMut(&mut crate::McContext<'_>) -> crate::McResult<()> + Send>;

/// An application that records every step and every transported track.
///
/// `events[i]` lists the primaries of event `i + 1`. Tracks are transported one after
/// another, so the steps of `tracks[i]` are the contiguous run starting at
/// `first_step[i]`.
pub struct RecordingApp {
    geometry: GeometryFn,
    pub events: Vec<Vec<Primary>>,
    pub steps: Vec<crate::StepState>,
    pub tracks: Vec<crate::StackEntry>,
    pub first_step: Vec<usize>,
}

impl RecordingApp {
    pub fn new(
        geometry: impl FnMut(&mut crate::McContext<'_>) -> crate::McResult<()> + Send + 'static,
        events: Vec<Vec<Primary>>,
    ) -> Self {
        Self {
            geometry: Box::new(geometry),
            events,
            steps: Vec::new(),
            tracks: Vec::new(),
            first_step: Vec::new(),
        }
    }

    /// Steps of track `id`, in order, across all events.
    pub fn steps_of(&self, id: crate::TrackId) -> impl Iterator<Item = &crate::StepState> {
        self.steps.iter().filter(move |s| s.track_id == id)
    }

    /// Steps of the `index`-th transported track.
    pub fn steps_of_index(&self, index: usize) -> &[crate::StepState] {
        let start = self.first_step[index];
        let end = self.first_step.get(index + 1).copied().unwrap_or(self.steps.len());
        &self.steps[start..end]
    }
}

impl crate::Application for RecordingApp {
    fn construct_geometry(&mut self, mc: &mut crate::McContext<'_>) -> crate::McResult<()> {
        (self.geometry)(mc)
    }

    fn generate_primaries(&mut self, mc: &mut crate::McContext<'_>) -> crate::McResult<()> {
        let event = mc.event_number() as usize;
        let primaries = self.events.get(event - 1).cloned().unwrap_or_default();
        for p in primaries {
            let m = p.momentum;
            let v = p.position;
            mc.stack().set_track(
                true,
                crate::NO_PARENT,
                p.pdg,
                m.px,
                m.py,
                m.pz,
                m.e,
                v.x,
                v.y,
                v.z,
                0.0,
                1.0,
            )?;
        }
        Ok(())
    }

    fn pre_track(&mut self, mc: &mut crate::McContext<'_>) -> crate::McResult<()> {
        self.tracks.push(mc.current_track()?.clone());
        self.first_step.push(self.steps.len());
        Ok(())
    }

    fn stepping(&mut self, mc: &mut crate::McContext<'_>) -> crate::McResult<()> {
        self.steps.push(mc.step_state()?.clone());
        Ok(())
    }
}
