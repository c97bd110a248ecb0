//! The transport-engine contract.

use std::sync::Arc;

use nalgebra::Vector3;

use crate::application::{Application, GeometryAccess, McContext};
use crate::decayer::Decayer;
use crate::error::McResult;
use crate::geometry::Geometry;
use crate::kinematics::FourMomentum;
use crate::particles::ParticleDb;
use crate::stack::{McStack, StackEntry, TrackId};
use crate::step::StepState;
use crate::trace::{CallbackTag, CallbackTrace};

/// A concrete Monte Carlo: moves one track at a time through a closed geometry.
///
/// The run driver ([`crate::MonteCarlo`]) owns the event loop, the stack and all
/// callbacks except `Stepping`; an engine only produces steps and reports each one through
/// [`TrackSession::stepping`].
pub trait TransportEngine: Send {
    fn name(&self) -> &str;

    /// Called once after the geometry is closed.
    fn initialize(&mut self, _geometry: Arc<Geometry>, _particles: Arc<ParticleDb>) -> McResult<()> {
        Ok(())
    }

    /// Installs a user decayer. Engines without decay physics ignore it.
    fn set_external_decayer(&mut self, _decayer: Arc<dyn Decayer>) {}

    /// Transports `track` until it stops, decays or leaves the world.
    fn transport_track(&mut self, track: &StackEntry, session: &mut TrackSession<'_>) -> McResult<()>;
}

/// What an engine may touch while transporting one track.
pub struct TrackSession<'a> {
    app: &'a mut dyn Application,
    stack: &'a mut dyn McStack,
    geometry: &'a Geometry,
    particles: &'a ParticleDb,
    trace: Option<&'a mut CallbackTrace>,
    event: u64,
    steps: u64,
    edep: f64,
}

impl<'a> TrackSession<'a> {
    pub fn new(
        app: &'a mut dyn Application,
        stack: &'a mut dyn McStack,
        geometry: &'a Geometry,
        particles: &'a ParticleDb,
        trace: Option<&'a mut CallbackTrace>,
        event: u64,
    ) -> Self {
        Self {
            app,
            stack,
            geometry,
            particles,
            trace,
            event,
            steps: 0,
            edep: 0.0,
        }
    }

    pub fn geometry(&self) -> &'a Geometry {
        self.geometry
    }

    pub fn particles(&self) -> &'a ParticleDb {
        self.particles
    }

    pub fn event_number(&self) -> u64 {
        self.event
    }

    /// Steps reported so far.
    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// Energy deposited by the reported steps, GeV.
    pub fn edep(&self) -> f64 {
        self.edep
    }

    /// Reports a finished step to the user's `Stepping` callback.
    pub fn stepping(&mut self, step: &StepState) -> McResult<()> {
        if let Some(trace) = self.trace.as_deref_mut() {
            trace.push(CallbackTag::Stepping);
        }
        self.steps += 1;
        self.edep += step.edep;
        let mut mc = McContext::new(
            GeometryAccess::Closed(self.geometry),
            self.particles,
            &mut *self.stack,
            Some(step),
            self.event,
        );
        self.app.stepping(&mut mc)
    }

    /// Pushes a secondary of the current track onto the stack.
    pub fn push_secondary(
        &mut self,
        pdg: i32,
        momentum: FourMomentum,
        position: Vector3<f64>,
        time: f64,
    ) -> McResult<TrackId> {
        let parent = self.stack.current_track()?;
        let weight = self.stack.track(parent).map_or(1.0, |t| t.weight);
        let id = self.stack.set_track(
            true,
            parent,
            pdg,
            momentum.px,
            momentum.py,
            momentum.pz,
            momentum.e,
            position.x,
            position.y,
            position.z,
            time,
            weight,
        )?;
        Ok(id)
    }
}
