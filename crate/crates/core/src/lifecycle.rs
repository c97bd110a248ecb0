//! The run-control driver: geometry construction, the event loop and callback ordering.

use std::sync::Arc;

use crate::application::{Application, GeometryAccess, McContext};
use crate::config::EngineConfig;
use crate::decayer::Decayer;
use crate::engine::{TrackSession, TransportEngine};
use crate::error::{McError, McResult};
use crate::geometry::{Geometry, GeometryBuilder};
use crate::particles::ParticleDb;
use crate::stack::{McStack, ParticleStack};
use crate::trace::{CallbackTag, CallbackTrace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RunPhase {
    Created,
    GeometryConstructed,
    Initialized,
    Running,
    Finished,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunState {
    pub phase: RunPhase,
    pub events_completed: u64,
}

/// Totals of one `run_mc` call.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunSummary {
    pub events: u64,
    pub tracks: u64,
    pub steps: u64,
    /// GeV
    pub total_edep: f64,
}

/// One engine instance together with its stack, geometry and run state.
///
/// Created by [`crate::EngineRegistry::create`]; driven with [`MonteCarlo::init_mc`] and
/// [`MonteCarlo::run_mc`].
pub struct MonteCarlo {
    engine: Box<dyn TransportEngine>,
    config: EngineConfig,
    particles: Arc<ParticleDb>,
    stack: Box<dyn McStack>,
    geometry: Option<Arc<Geometry>>,
    state: RunState,
    trace: Option<CallbackTrace>,
}

impl MonteCarlo {
    pub fn new(engine: Box<dyn TransportEngine>, config: EngineConfig, particles: Arc<ParticleDb>) -> Self {
        let stack = Box::new(ParticleStack::new(particles.clone()));
        Self {
            engine,
            config,
            particles,
            stack,
            geometry: None,
            state: RunState {
                phase: RunPhase::Created,
                events_completed: 0,
            },
            trace: None,
        }
    }

    pub fn engine_name(&self) -> &str {
        self.engine.name()
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn state(&self) -> RunState {
        self.state
    }

    pub fn particles(&self) -> &Arc<ParticleDb> {
        &self.particles
    }

    pub fn geometry(&self) -> Option<&Arc<Geometry>> {
        self.geometry.as_ref()
    }

    pub fn stack(&self) -> &dyn McStack {
        self.stack.as_ref()
    }

    /// Replaces the default LIFO stack. Only before `init_mc`.
    pub fn set_stack(&mut self, stack: Box<dyn McStack>) -> McResult<()> {
        self.require(&[RunPhase::Created], "set_stack")?;
        self.stack = stack;
        Ok(())
    }

    pub fn set_external_decayer(&mut self, decayer: Arc<dyn Decayer>) {
        self.engine.set_external_decayer(decayer);
    }

    /// Starts recording callbacks from now on.
    pub fn record_trace(&mut self) {
        self.trace.get_or_insert_with(CallbackTrace::new);
    }

    pub fn trace(&self) -> Option<&CallbackTrace> {
        self.trace.as_ref()
    }

    fn require(&self, allowed: &[RunPhase], operation: &'static str) -> McResult<()> {
        if allowed.contains(&self.state.phase) {
            Ok(())
        } else {
            Err(McError::InvalidPhase {
                operation,
                phase: self.state.phase,
            })
        }
    }

    fn tag(&mut self, tag: CallbackTag) {
        if let Some(trace) = &mut self.trace {
            trace.push(tag);
        }
    }

    /// Builds and closes the application's geometry, then initializes the engine.
    pub fn init_mc(&mut self, app: &mut dyn Application) -> McResult<()> {
        self.require(&[RunPhase::Created], "init_mc")?;

        self.tag(CallbackTag::ConstructGeometry);
        let mut builder = GeometryBuilder::new();
        {
            let mut mc = McContext::new(
                GeometryAccess::Building(&mut builder),
                &self.particles,
                self.stack.as_mut(),
                None,
                0,
            );
            app.construct_geometry(&mut mc)?;
        }
        let geometry = Arc::new(builder.close()?);
        self.state.phase = RunPhase::GeometryConstructed;

        self.tag(CallbackTag::InitGeometry);
        {
            let mut mc = McContext::new(
                GeometryAccess::Closed(&geometry),
                &self.particles,
                self.stack.as_mut(),
                None,
                0,
            );
            app.init_geometry(&mut mc)?;
        }
        self.engine.initialize(geometry.clone(), self.particles.clone())?;
        self.geometry = Some(geometry);
        self.state.phase = RunPhase::Initialized;
        Ok(())
    }

    /// Runs `n_events` events. May be called again after it finishes; event numbers carry on.
    pub fn run_mc(&mut self, app: &mut dyn Application, n_events: u64) -> McResult<RunSummary> {
        self.require(&[RunPhase::Initialized, RunPhase::Finished], "run_mc")?;
        let geometry = self.geometry.clone().expect("initialized engine has a geometry");
        self.state.phase = RunPhase::Running;

        let mut summary = RunSummary::default();
        for _ in 0..n_events {
            let event = self.state.events_completed + 1;
            self.run_event(app, &geometry, event, &mut summary)?;
            self.state.events_completed = event;
            summary.events += 1;
        }
        self.state.phase = RunPhase::Finished;
        Ok(summary)
    }

    fn callback(
        &mut self,
        app: &mut dyn Application,
        geometry: &Geometry,
        event: u64,
        tag: CallbackTag,
    ) -> McResult<()> {
        self.tag(tag);
        let mut mc = McContext::new(
            GeometryAccess::Closed(geometry),
            &self.particles,
            self.stack.as_mut(),
            None,
            event,
        );
        match tag {
            CallbackTag::GeneratePrimaries => app.generate_primaries(&mut mc),
            CallbackTag::BeginEvent => app.begin_event(&mut mc),
            CallbackTag::BeginPrimary => app.begin_primary(&mut mc),
            CallbackTag::PreTrack => app.pre_track(&mut mc),
            CallbackTag::PostTrack => app.post_track(&mut mc),
            CallbackTag::FinishPrimary => app.finish_primary(&mut mc),
            CallbackTag::FinishEvent => app.finish_event(&mut mc),
            CallbackTag::ConstructGeometry | CallbackTag::InitGeometry | CallbackTag::Stepping => {
                unreachable!("{tag} is not dispatched here")
            }
        }
    }

    fn run_event(
        &mut self,
        app: &mut dyn Application,
        geometry: &Geometry,
        event: u64,
        summary: &mut RunSummary,
    ) -> McResult<()> {
        self.stack.reset();
        self.callback(app, geometry, event, CallbackTag::GeneratePrimaries)?;
        self.callback(app, geometry, event, CallbackTag::BeginEvent)?;

        let mut in_primary = false;
        while let Some(track) = self.stack.pop_next_track() {
            if !in_primary {
                self.callback(app, geometry, event, CallbackTag::BeginPrimary)?;
                in_primary = true;
            }
            self.callback(app, geometry, event, CallbackTag::PreTrack)?;
            let mut session = TrackSession::new(
                app,
                self.stack.as_mut(),
                geometry,
                &self.particles,
                self.trace.as_mut(),
                event,
            );
            self.engine.transport_track(&track, &mut session)?;
            summary.tracks += 1;
            summary.steps += session.steps();
            summary.total_edep += session.edep();
            self.callback(app, geometry, event, CallbackTag::PostTrack)?;
            // the bracket closes before the next primary is popped, so FinishPrimary still
            // sees the last track of this one as current
            if self.stack.peek_next_track().is_none_or(|next| next.is_primary()) {
                self.callback(app, geometry, event, CallbackTag::FinishPrimary)?;
                in_primary = false;
            }
        }
        self.callback(app, geometry, event, CallbackTag::FinishEvent)
    }
}

/// Runs only the application's geometry construction and closes the result.
///
/// For tools that inspect or export a geometry without transporting anything.
pub fn build_geometry(app: &mut dyn Application, particles: &Arc<ParticleDb>) -> McResult<Geometry> {
    let mut builder = GeometryBuilder::new();
    let mut stack = ParticleStack::new(particles.clone());
    {
        let mut mc = McContext::new(GeometryAccess::Building(&mut builder), particles, &mut stack, None, 0);
        app.construct_geometry(&mut mc)?;
    }
    Ok(builder.close()?)
}
