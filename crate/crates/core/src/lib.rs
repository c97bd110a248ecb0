//! Engine-independent particle-transport framework.
//!
//! A user simulation implements [`Application`] against the abstract contracts in this
//! crate and is executed by whichever [`TransportEngine`] an [`EngineRegistry`] selects at
//! run time. The crate also provides the Geant3-style geometry modeller, the particle
//! table, a LIFO particle stack, a two-body decayer and XML geometry interchange.

pub mod application;
pub mod config;
pub mod decayer;
pub mod engine;
pub mod error;
pub mod exporter;
pub mod geometry;
pub mod kinematics;
pub mod lifecycle;
pub mod particles;
pub mod registry;
pub mod stack;
pub mod step;
pub mod testing;
pub mod trace;

pub use application::{Application, McContext};
pub use config::{EngineConfig, PartialConfig, DEFAULT_SEED, PHYSICS_FLAGS};
pub use decayer::{DecayChannel, DecayError, DecayProduct, Decayer, TwoBodyDecayer};
pub use engine::{TrackSession, TransportEngine};
pub use error::{McError, McResult};
pub use exporter::{export_xml, import_xml, XmlError};
pub use geometry::{Geometry, GeometryBuilder, GeometryError, VolumeId, VolumePath};
pub use kinematics::FourMomentum;
pub use lifecycle::{build_geometry, MonteCarlo, RunPhase, RunState, RunSummary};
pub use particles::{ParticleDb, ParticleDef, ParticleError, SPEED_OF_LIGHT_CM_S};
pub use registry::{EngineFactory, EngineRegistry};
pub use stack::{McStack, ParticleStack, StackEntry, StackError, TrackId, NO_PARENT};
pub use step::{StepState, TrackStatus};
pub use trace::{CallbackTag, CallbackTrace, TraceError};
