use thiserror::Error;

use crate::decayer::DecayError;
use crate::geometry::GeometryError;
use crate::lifecycle::RunPhase;
use crate::particles::ParticleError;
use crate::stack::StackError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum McError {
    #[error("engine {0:?} is already registered")]
    DuplicateEngineName(String),
    #[error("unknown engine: {0}")]
    UnknownEngine(String),
    #[error("{operation} is not allowed in phase {phase:?}")]
    InvalidPhase { operation: &'static str, phase: RunPhase },
    #[error("stack ran empty inside a primary")]
    StackUnderflow,
    #[error("step accessor called outside a Stepping callback")]
    OutsideStepping,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Stack(#[from] StackError),
    #[error(transparent)]
    Particle(#[from] ParticleError),
    #[error(transparent)]
    Decay(#[from] DecayError),
    #[error("navigation failed for track {track}: {source}")]
    Navigation { track: i32, source: GeometryError },
    #[error("track {track} exceeded {limit} steps")]
    StepLimit { track: i32, limit: u64 },
    #[error("bad configuration: {0}")]
    Config(String),
    #[error("application error: {0}")]
    Application(String),
}

pub type McResult<T> = Result<T, McError>;
