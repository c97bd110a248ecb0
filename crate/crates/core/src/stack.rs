//! The particle-stack contract and a LIFO implementation.

use std::sync::Arc;

use nalgebra::Vector3;
use thiserror::Error;

use crate::kinematics::FourMomentum;
use crate::particles::{ParticleDb, ParticleError};

pub type TrackId = i32;

/// Parent id carried by primaries.
pub const NO_PARENT: TrackId = -1;

/// Allowed |E² − p² − m²| in GeV².
pub const MASS_SHELL_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StackError {
    #[error("unknown PDG code {0}")]
    UnknownPdg(i32),
    #[error("track with PDG {pdg} is off mass shell (E² − p² − m² = {residual:e} GeV²)")]
    OffMassShell { pdg: i32, residual: f64 },
    #[error("parent {0} is not a track of this event")]
    UnknownParent(TrackId),
    #[error("no track has been popped yet")]
    NoCurrentTrack,
    #[error("bad track value: {0}")]
    BadValue(String),
}

impl From<ParticleError> for StackError {
    fn from(e: ParticleError) -> Self {
        match e {
            ParticleError::UnknownPdg(pdg) => StackError::UnknownPdg(pdg),
            other => StackError::BadValue(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StackEntry {
    pub track_id: TrackId,
    pub parent_id: TrackId,
    pub pdg: i32,
    pub momentum: FourMomentum,
    /// Production vertex in cm.
    pub position: Vector3<f64>,
    /// Production time in seconds.
    pub time: f64,
    pub to_be_done: bool,
    pub weight: f64,
}

impl StackEntry {
    pub fn is_primary(&self) -> bool {
        self.parent_id == NO_PARENT
    }
}

/// What a transport engine needs from a particle stack.
///
/// `set_track` mirrors the Geant3-style call `SetTrack(toBeDone, parent, pdg, px, py, pz,
/// e, vx, vy, vz, t, weight)`; polarization and production-mechanism arguments are not
/// carried.
pub trait McStack: Send {
    #[allow(clippy::too_many_arguments)]
    fn set_track(
        &mut self,
        to_be_done: bool,
        parent: TrackId,
        pdg: i32,
        px: f64,
        py: f64,
        pz: f64,
        e: f64,
        vx: f64,
        vy: f64,
        vz: f64,
        t: f64,
        weight: f64,
    ) -> Result<TrackId, StackError>;

    /// Next to-be-done track, or `None` when the event is exhausted.
    fn pop_next_track(&mut self) -> Option<StackEntry>;

    /// The track `pop_next_track` would return, without removing it.
    fn peek_next_track(&self) -> Option<&StackEntry>;

    /// Tracks pushed during the current event.
    fn n_tracks(&self) -> usize;

    /// Id of the most recently popped track.
    fn current_track(&self) -> Result<TrackId, StackError>;

    fn track(&self, id: TrackId) -> Option<&StackEntry>;

    /// Forget everything; called before each event's primaries are generated.
    fn reset(&mut self);
}

/// LIFO stack: secondaries pushed while a track is transported come out before any
/// remaining primary, which makes transport depth-first.
///
/// Popped entries stay readable through [`ParticleStack::archive`] until the next reset.
#[derive(Debug, Clone)]
pub struct ParticleStack {
    particles: Arc<ParticleDb>,
    entries: Vec<StackEntry>,
    pending: Vec<TrackId>,
    popped: Vec<TrackId>,
    current: Option<TrackId>,
}

impl ParticleStack {
    pub fn new(particles: Arc<ParticleDb>) -> Self {
        Self {
            particles,
            entries: Vec::new(),
            pending: Vec::new(),
            popped: Vec::new(),
            current: None,
        }
    }

    /// Every track pushed this event, in id order.
    pub fn entries(&self) -> &[StackEntry] {
        &self.entries
    }

    /// Popped tracks in pop order.
    pub fn archive(&self) -> impl Iterator<Item = &StackEntry> {
        self.popped.iter().map(|&id| &self.entries[id as usize])
    }

    pub fn n_pending(&self) -> usize {
        self.pending.len()
    }
}

impl McStack for ParticleStack {
    fn set_track(
        &mut self,
        to_be_done: bool,
        parent: TrackId,
        pdg: i32,
        px: f64,
        py: f64,
        pz: f64,
        e: f64,
        vx: f64,
        vy: f64,
        vz: f64,
        t: f64,
        weight: f64,
    ) -> Result<TrackId, StackError> {
        let mass = self.particles.lookup(pdg)?.mass;
        let values = [px, py, pz, e, vx, vy, vz, t, weight];
        if values.iter().any(|v| !v.is_finite()) {
            return Err(StackError::BadValue(format!("non-finite track values {values:?}")));
        }
        if parent != NO_PARENT && (parent < 0 || parent as usize >= self.entries.len()) {
            return Err(StackError::UnknownParent(parent));
        }
        let momentum = FourMomentum::new(px, py, pz, e);
        let residual = momentum.mass2() - mass * mass;
        if residual.abs() > MASS_SHELL_TOLERANCE || e < momentum.p() - 1e-9 {
            return Err(StackError::OffMassShell { pdg, residual });
        }
        let track_id = self.entries.len() as TrackId;
        self.entries.push(StackEntry {
            track_id,
            parent_id: parent,
            pdg,
            momentum,
            position: Vector3::new(vx, vy, vz),
            time: t,
            to_be_done,
            weight,
        });
        if to_be_done {
            self.pending.push(track_id);
        }
        Ok(track_id)
    }

    fn pop_next_track(&mut self) -> Option<StackEntry> {
        let id = self.pending.pop()?;
        self.current = Some(id);
        self.popped.push(id);
        Some(self.entries[id as usize].clone())
    }

    fn peek_next_track(&self) -> Option<&StackEntry> {
        self.pending.last().map(|&id| &self.entries[id as usize])
    }

    fn n_tracks(&self) -> usize {
        self.entries.len()
    }

    fn current_track(&self) -> Result<TrackId, StackError> {
        self.current.ok_or(StackError::NoCurrentTrack)
    }

    fn track(&self, id: TrackId) -> Option<&StackEntry> {
        usize::try_from(id).ok().and_then(|i| self.entries.get(i))
    }

    fn reset(&mut self) {
        self.entries.clear();
        self.pending.clear();
        self.popped.clear();
        self.current = None;
    }
}
