use nalgebra::Vector3;

use crate::geometry::VolumePath;
use crate::kinematics::FourMomentum;
use crate::stack::TrackId;

/// How a step left the track.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TrackStatus {
    Alive,
    /// Kinetic energy fell below the cut; the remainder was deposited on this step.
    Stopped,
    Decayed,
    /// The step ended on the world boundary heading out.
    LeftWorld,
}

/// Snapshot of the track after one step, as seen by user stepping code.
///
/// `path` is the volume the step was taken in; `position` and `momentum` are post-step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepState {
    pub track_id: TrackId,
    pub pdg: i32,
    /// Units of e.
    pub charge: f64,
    pub path: VolumePath,
    pub position: Vector3<f64>,
    pub time: f64,
    pub momentum: FourMomentum,
    pub step_length: f64,
    pub edep: f64,
    /// First step inside this innermost volume.
    pub entering: bool,
    /// The step ended on the volume boundary.
    pub exiting: bool,
    pub stopped: bool,
    pub status: TrackStatus,
}
